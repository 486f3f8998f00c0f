use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use wmark_core::attacks::AttackSpec;
use wmark_core::error::{Error, Result};
use wmark_core::metrics::{capacity_bits_default, mse, nc, psnr, PeakMode, QualityReport};
use wmark_core::watermark::{self, EmbedParams};
use wmark_core::{pnm, BandSelector, GrayImage, WatermarkBits};

use crate::model_io;
use crate::{AttackArgs, EmbedArgs, EvaluateArgs, ExtractArgs, GridArg, SweepAlphaArgs};

/// Built-in benchmark grid: the JPEG qualities, noise settings, and 3x3
/// filters commonly used to stress frequency-domain watermarks.
const STANDARD_GRID: [&str; 12] = [
    "jpeg:q=70",
    "jpeg:q=50",
    "jpeg:q=20",
    "jpeg:q=10",
    "gauss-noise:v=0.01",
    "salt-pepper:d=0.01",
    "sharpen",
    "rotate:angle=1",
    "median:n=3",
    "average:n=3",
    "gauss-filter:n=3,sigma=0.5",
    "crop",
];

fn resolve_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| {
            std::env::var("WMARK_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn band_from_arg(arg: &Option<String>) -> Result<BandSelector> {
    match arg {
        None => Ok(BandSelector::low_band()),
        Some(list) => {
            let ranks: Vec<usize> = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad zig-zag rank `{s}`")))
                })
                .collect::<Result<_>>()?;
            BandSelector::from_zigzag_ranks(&ranks)
        }
    }
}

fn parse_number_list<T: std::str::FromStr>(list: &str, what: &str) -> Result<Vec<T>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} value `{s}`")))
        })
        .collect()
}

/// Embed pre-check: the cover must be exactly 8x the logo in each axis.
fn check_embed_geometry(cover: &GrayImage, wm: &WatermarkBits) -> Result<()> {
    let want_w = wm.width() * 8;
    let want_h = wm.height() * 8;
    if cover.width() != want_w || cover.height() != want_h {
        return Err(Error::InvalidDimensions(format!(
            "cover dimensions must be multiples of 8 and exactly 8x the watermark \
             ({}x{} watermark needs a {}x{} cover, got {}x{})",
            wm.width(),
            wm.height(),
            want_w,
            want_h,
            cover.width(),
            cover.height()
        )));
    }
    Ok(())
}

pub fn embed(args: EmbedArgs) -> Result<ExitCode> {
    let cover = pnm::read_pgm(&args.cover)?;
    let wm = pnm::read_logo(&args.wm)?;
    check_embed_geometry(&cover, &wm)?;
    let params = EmbedParams {
        alpha: args.alpha,
        band: band_from_arg(&args.band_indices)?,
    };
    let marked = watermark::embed(&cover, &wm, &params)?;
    pnm::write_pgm(&args.out, &marked)?;
    if let Some(path) = &args.save_model {
        let model = watermark::fit_cover_model(&cover, &params.band)?;
        model_io::save_model(path, &model)?;
    }
    let report = QualityReport {
        mse: mse(&cover, &marked)?,
        psnr_db: psnr(&cover, &marked, args.peak_mode.into())?,
        nc: None,
        capacity_bits: capacity_bits_default(cover.width(), cover.height())?,
    };
    println!(
        "PSNR={}dB capacity={}bits",
        fmt_db(report.psnr_db),
        report.capacity_bits
    );
    Ok(ExitCode::SUCCESS)
}

pub fn extract(args: ExtractArgs) -> Result<ExitCode> {
    let cover = pnm::read_pgm(&args.cover)?;
    let suspect = pnm::read_pgm(&args.suspect)?;
    let params = EmbedParams {
        alpha: args.alpha,
        band: band_from_arg(&args.band_indices)?,
    };
    let rec = match &args.model {
        Some(path) => {
            let model = model_io::load_model(path)?;
            watermark::extract_with_model(&model, &cover, &suspect, &params)?
        }
        None => watermark::extract(&cover, &suspect, &params)?,
    };
    pnm::write_logo(&args.out, &rec.bits)?;
    if let Some(ref_path) = &args.reference {
        let reference = pnm::read_logo(ref_path)?;
        let corr = nc(&reference, &rec.bits)?;
        println!("NC={corr:.6}");
    }
    Ok(ExitCode::SUCCESS)
}

fn sanitize_spec(spec: &AttackSpec) -> String {
    let mut name = spec.label().to_string();
    let params = spec.params_string();
    if !params.is_empty() {
        name.push('_');
        name.push_str(&params.replace(['=', ',', '.'], "-"));
    }
    name
}

pub fn attack(args: AttackArgs) -> Result<ExitCode> {
    let img = pnm::read_pgm(&args.input)?;
    let seed = resolve_seed(args.seed);
    let specs: Vec<AttackSpec> = args
        .spec
        .iter()
        .map(|s| AttackSpec::parse(s, seed))
        .collect::<Result<_>>()?;

    if specs.len() == 1 {
        let out = specs[0].apply(&img)?;
        pnm::write_pgm(&args.out, &out)?;
    } else {
        fs::create_dir_all(&args.out)?;
        for spec in &specs {
            let out = spec.apply(&img)?;
            let path = args.out.join(format!("{}.pgm", sanitize_spec(spec)));
            pnm::write_pgm(path, &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.4}")
    }
}

fn csv_writer(out: &Option<std::path::PathBuf>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

pub fn evaluate(args: EvaluateArgs) -> Result<ExitCode> {
    let cover = pnm::read_pgm(&args.cover)?;
    let wm = pnm::read_logo(&args.wm)?;
    check_embed_geometry(&cover, &wm)?;
    let params = EmbedParams {
        alpha: args.alpha,
        band: band_from_arg(&args.band_indices)?,
    };
    let seed = resolve_seed(args.seed);
    let peak: PeakMode = args.peak_mode.into();

    // row order: jpeg sweep replaces the grid; explicit specs always append
    let mut spec_strings: Vec<String> = Vec::new();
    match &args.jpeg_sweep {
        Some(list) => {
            for q in parse_number_list::<u8>(list, "quality")? {
                spec_strings.push(format!("jpeg:q={q}"));
            }
        }
        None => {
            if matches!(args.grid, GridArg::Standard) {
                spec_strings.extend(STANDARD_GRID.iter().map(|s| s.to_string()));
            }
        }
    }
    spec_strings.extend(args.spec.iter().cloned());
    let specs: Vec<AttackSpec> = spec_strings
        .iter()
        .map(|s| AttackSpec::parse(s, seed))
        .collect::<Result<_>>()?;

    let marked = watermark::embed(&cover, &wm, &params)?;

    let mut writer = csv_writer(&args.out)?;
    writer
        .write_record(["attack", "params", "psnr_db", "nc", "ms"])
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;

    let mut any_failed = false;
    for spec in &specs {
        let start = Instant::now();
        let row = run_row(&cover, &marked, &wm, spec, &params, peak);
        let ms = start.elapsed().as_millis();
        let (psnr_field, nc_field) = match row {
            Ok((p, c)) => (fmt_db(p), format!("{c:.6}")),
            Err(err) => {
                eprintln!("row {}: {err}", spec.label());
                any_failed = true;
                (String::new(), String::new())
            }
        };
        writer
            .write_record([
                spec.label().to_string(),
                spec.params_string(),
                psnr_field,
                nc_field,
                ms.to_string(),
            ])
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    writer
        .flush()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(if any_failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_row(
    cover: &GrayImage,
    marked: &GrayImage,
    wm: &WatermarkBits,
    spec: &AttackSpec,
    params: &EmbedParams,
    peak: PeakMode,
) -> Result<(f64, f64)> {
    let attacked = spec.apply(marked)?;
    let p = psnr(marked, &attacked, peak)?;
    let rec = watermark::extract(cover, &attacked, params)?;
    let corr = nc(wm, &rec.bits)?;
    Ok((p, corr))
}

pub fn sweep_alpha(args: SweepAlphaArgs) -> Result<ExitCode> {
    let cover = pnm::read_pgm(&args.cover)?;
    let wm = pnm::read_logo(&args.wm)?;
    check_embed_geometry(&cover, &wm)?;
    let band = band_from_arg(&args.band_indices)?;
    let alphas: Vec<f64> = parse_number_list(&args.alphas, "alpha")?;
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("alpha list is empty".into()));
    }
    let peak: PeakMode = args.peak_mode.into();

    let mut writer = csv_writer(&args.out)?;
    writer
        .write_record(["alpha", "psnr_db", "nc"])
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    for &alpha in &alphas {
        let params = EmbedParams {
            alpha,
            band: band.clone(),
        };
        let marked = watermark::embed(&cover, &wm, &params)?;
        let p = psnr(&cover, &marked, peak)?;
        let rec = watermark::extract(&cover, &marked, &params)?;
        let corr = nc(&wm, &rec.bits)?;
        writer
            .write_record([format!("{alpha}"), fmt_db(p), format!("{corr:.6}")])
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    writer
        .flush()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(ExitCode::SUCCESS)
}
