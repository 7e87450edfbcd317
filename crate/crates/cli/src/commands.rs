use std::path::Path;
use std::time::Instant;

use lipmorph::morphology::{dilation_valid_origin, erosion_valid_origin};
use lipmorph::{
    lip_mul, match_threshold, quantize_map, read_pgm, write_map, write_pgm, AdditiveSF, AsplundRequest, BorderPolicy,
    DistanceMap, GreyImage, MapMethod, Method, PgmVariant, SanitationPolicy, StructuringFunction,
};

use crate::bench::{run_bench, BenchConfig};
use crate::{
    read_file, write_file, AsplundArgs, BenchArgs, BorderArg, CliError, Command, Context, LipmulArgs, MatchArgs,
    MethodArg, MorphArgs, MorphOp, RunMetadata,
};

/// Executes one command and returns the metadata record to print.
pub fn run(command: &Command) -> Result<RunMetadata, CliError> {
    let start = Instant::now();
    let mut meta = match command {
        Command::Asplund(args) => asplund(args)?,
        Command::Lipmul(args) => lipmul(args)?,
        Command::Morph(args) => morph(args)?,
        Command::Match(args) => matching(args)?,
        Command::Bench(args) => bench(args)?,
    };
    meta.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(meta)
}

fn load_pgm(path: &Path) -> Result<GreyImage, CliError> {
    read_pgm(&read_file(path)?).context(path.display().to_string())
}

fn load_probe(path: &Path, mask: Option<&Path>) -> Result<StructuringFunction, CliError> {
    let probe = load_pgm(path)?;
    match mask {
        None => Ok(StructuringFunction::from_image(&probe)),
        Some(mask_path) => {
            let mask = load_pgm(mask_path)?;
            StructuringFunction::with_mask(&probe, &mask).context(mask_path.display().to_string())
        }
    }
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

fn metadata(command: &str, method: &str, image: &Path, probe: &Path, m: f64) -> RunMetadata {
    RunMetadata {
        command: command.into(),
        method: method.into(),
        image_path: path_string(image),
        probe_path: path_string(probe),
        m,
        clamped_pixels: 0,
        max_equiv_discrepancy: None,
        wall_time_ms: 0.0,
        matches: None,
        seed: None,
    }
}

fn request(image: GreyImage, probe: StructuringFunction, method: Method, strict: bool) -> AsplundRequest {
    let scale = image.scale();
    let mut req = AsplundRequest::new(image, probe).method(method);
    if strict {
        req.sanitation = SanitationPolicy::strict(scale);
    }
    req
}

fn asplund(args: &AsplundArgs) -> Result<RunMetadata, CliError> {
    let image = load_pgm(&args.image)?;
    let probe = load_probe(&args.probe, args.probe_mask.as_deref())?;
    let m = image.scale().m();
    let (method, name) = match args.method {
        MethodArg::Direct => (Method::Direct, "direct"),
        MethodArg::Gradient => (Method::Gradient, "gradient"),
        MethodArg::Both => (Method::Both, "both"),
    };
    let outcome = request(image, probe, method, args.strict).run().context("asplund")?;

    write_file(&args.out, &write_map(&outcome.map).context("asplund map")?)?;
    if let Some(preview) = &args.png_preview {
        let img = quantize_map(&outcome.map, args.ceiling).context("preview")?;
        write_file(preview, &write_pgm(&img, PgmVariant::P5).context("preview")?)?;
    }

    let mut meta = metadata("asplund", name, &args.image, &args.probe, m);
    meta.clamped_pixels = outcome.clamped_pixels;
    meta.max_equiv_discrepancy = outcome.max_equiv_discrepancy;
    Ok(meta)
}

fn lipmul(args: &LipmulArgs) -> Result<RunMetadata, CliError> {
    if !(args.alpha.is_finite() && args.alpha > 0.0) {
        return Err(CliError::Usage(format!(
            "--alpha must be a positive real, got {}",
            args.alpha
        )));
    }
    let image = load_pgm(&args.image)?;
    let scale = image.scale();
    let maxval = scale.m() - 1.0;
    let mut out = image.clone();
    for (i, &v) in image.pixels().iter().enumerate() {
        // 0 is the LIP zero and stays fixed under every scaling
        let scaled = if v == 0.0 {
            0.0
        } else {
            lip_mul(args.alpha, v, scale).context("lipmul")?.round().min(maxval)
        };
        out.set(i % image.width(), i / image.width(), scaled);
    }
    write_file(&args.out, &write_pgm(&out, PgmVariant::P5).context("lipmul output")?)?;
    Ok(metadata(
        "lipmul",
        &format!("alpha={}", args.alpha),
        &args.image,
        Path::new(""),
        scale.m(),
    ))
}

fn morph(args: &MorphArgs) -> Result<RunMetadata, CliError> {
    let image = load_pgm(&args.image)?;
    let sf_image = load_pgm(&args.sf)?;
    let active = match &args.sf_mask {
        None => vec![true; sf_image.pixels().len()],
        Some(p) => {
            let mask = load_pgm(p)?;
            if (mask.width(), mask.height()) != (sf_image.width(), sf_image.height()) {
                return Err(CliError::Usage(format!(
                    "mask {}x{} does not match structuring function {}x{}",
                    mask.width(),
                    mask.height(),
                    sf_image.width(),
                    sf_image.height()
                )));
            }
            mask.pixels().iter().map(|&v| v != 0.0).collect()
        }
    };
    let sf = AdditiveSF::new(sf_image.width(), sf_image.height(), sf_image.pixels().to_vec(), active)
        .context(path_string(&args.sf))?;
    let plane = lipmorph::RealPlane::new(image.width(), image.height(), image.pixels().to_vec()).context("image")?;
    let border = match args.border {
        BorderArg::Valid => BorderPolicy::Valid,
        BorderArg::Replicate => BorderPolicy::Replicate,
    };

    let (out, name) = match args.op {
        MorphOp::DilateAdd => (lipmorph::dilate_add(&plane, &sf, border), "dilate-add"),
        MorphOp::ErodeAdd => (lipmorph::erode_add(&plane, &sf, border), "erode-add"),
        MorphOp::DilateMult => (lipmorph::dilate_mult(&plane, &sf, border), "dilate-mult"),
        MorphOp::ErodeMult => (lipmorph::erode_mult(&plane, &sf, border), "erode-mult"),
    };
    let out = out.context(name)?;
    let origin = match (border, args.op) {
        (BorderPolicy::Replicate, _) => (0, 0),
        (BorderPolicy::Valid, MorphOp::DilateAdd | MorphOp::DilateMult) => dilation_valid_origin(&sf),
        (BorderPolicy::Valid, MorphOp::ErodeAdd | MorphOp::ErodeMult) => erosion_valid_origin(&sf),
    };
    let map = DistanceMap {
        width: out.width(),
        height: out.height(),
        origin: (origin.0 as i32, origin.1 as i32),
        values: out.into_values(),
        method: MapMethod::Direct,
    };
    write_file(&args.out, &write_map(&map).context("morph output")?)?;
    Ok(metadata("morph", name, &args.image, &args.sf, image.scale().m()))
}

fn matching(args: &MatchArgs) -> Result<RunMetadata, CliError> {
    if !(args.threshold.is_finite() && args.threshold >= 0.0) {
        return Err(CliError::Usage(format!(
            "--threshold must be non-negative, got {}",
            args.threshold
        )));
    }
    let image = load_pgm(&args.image)?;
    let probe = load_probe(&args.probe, args.probe_mask.as_deref())?;
    let m = image.scale().m();
    let outcome = request(image, probe, Method::Gradient, args.strict)
        .run()
        .context("match")?;
    let found = match_threshold(&outcome.map, args.threshold).context("match")?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["x", "y", "distance"])?;
    for hit in &found {
        csv.write_record([hit.x.to_string(), hit.y.to_string(), hit.distance.to_string()])?;
    }
    let bytes = csv.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&args.out, &bytes)?;

    let mut meta = metadata("match", "gradient", &args.image, &args.probe, m);
    meta.clamped_pixels = outcome.clamped_pixels;
    meta.matches = Some(found.len());
    Ok(meta)
}

fn bench(args: &BenchArgs) -> Result<RunMetadata, CliError> {
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let config = BenchConfig {
        sizes: args.sizes.clone(),
        windows: args.windows.clone(),
        reps: args.reps,
        flat_probe: !args.random_probe,
        seed: args.seed,
    };
    eprintln!("bench seed {}", config.seed);
    let rows = run_bench(&config).context("bench")?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        csv.serialize(row)?;
    }
    let bytes = csv.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&args.out, &bytes)?;

    let probe = if config.flat_probe { "flat" } else { "random" };
    let mut meta = metadata(
        "bench",
        "direct,gradient-naive,gradient-fast",
        Path::new(""),
        Path::new(probe),
        256.0,
    );
    meta.seed = Some(config.seed);
    Ok(meta)
}
