use clap::Parser;
use lipmorph_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(meta) => println!("{}", meta.to_json_line()),
        Err(err) => {
            eprintln!("lipmorph: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
