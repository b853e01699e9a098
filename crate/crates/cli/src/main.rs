use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dmd_stego::formats::{self, Report};
use dmd_stego::optics::{
    self, complex_correlation, generate_hologram, letterbox_resample, reconstruct, simulate_4f,
    ApertureSpec, PropagationParams,
};
use dmd_stego::{
    capacity_of_plan, decode_field, embed, encode_field, extract, normalize_field, quantize_field,
    Codebook, Error, NormalizationParams, Payload, PhaseAssignment, StegoKey, Strategy,
};

#[derive(Parser)]
#[command(name = "dmd-stego", version, about = "Superpixel DMD encoding with hidden payloads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a Fresnel hologram of an 8-bit object image.
    Hologram(HologramArgs),
    /// Encode a complex field as a DMD pattern without hidden data.
    Encode(EncodeArgs),
    /// Encode a complex field and hide a payload file in it.
    Embed(EmbedArgs),
    /// Recover a hidden payload from a DMD pattern.
    Extract(ExtractArgs),
    /// Decode a DMD pattern into its superpixel field.
    Decode(DecodeArgs),
    /// Report the hiding capacity of a field.
    Capacity(CapacityArgs),
    /// Numerically reconstruct the object plane of a hologram.
    Reconstruct(ReconstructArgs),
    /// Simulate the 4f spatial filter on a DMD pattern.
    Sim4f(Sim4fArgs),
    /// Structural similarity of two PGM images.
    Ssim(SsimArgs),
}

#[derive(Args)]
struct Geometry {
    /// Wavelength in meters.
    #[arg(long)]
    wavelength: f64,
    /// Object-to-hologram distance in meters.
    #[arg(long, allow_hyphen_values = true)]
    distance: f64,
    /// DMD mirror pitch in meters; a superpixel spans four mirrors.
    #[arg(long)]
    pitch: f64,
}

impl Geometry {
    fn params(&self) -> Result<PropagationParams, Error> {
        PropagationParams::new(self.wavelength, self.distance, 4.0 * self.pitch)
    }
}

#[derive(Args)]
struct Modulation {
    /// Peak amplitude as a fraction of the largest superpixel modulus.
    #[arg(long, default_value_t = 0.8)]
    alpha: f64,
    /// Sixteen comma-separated phase indices in row-major mirror order.
    #[arg(long)]
    phase_map: Option<String>,
}

impl Modulation {
    fn codebook(&self) -> Result<Codebook, Error> {
        Ok(Codebook::build(assignment(self.phase_map.as_deref())?))
    }

    fn normalization(&self) -> Result<NormalizationParams, Error> {
        NormalizationParams::new(self.alpha)
    }
}

fn assignment(phase_map: Option<&str>) -> Result<PhaseAssignment, Error> {
    phase_map.map_or_else(|| Ok(PhaseAssignment::row_major()), str::parse)
}

#[derive(Args)]
struct HologramArgs {
    #[arg(long)]
    object: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    geometry: Geometry,
    /// Superpixel grid as WIDTHxHEIGHT, e.g. 480x270.
    #[arg(long)]
    superpixels: String,
    /// Diffuser seed (16 hex digits).
    #[arg(long, default_value = "0000000000000000")]
    seed: String,
    /// Use a flat object phase instead of a random diffuser.
    #[arg(long)]
    no_diffuser: bool,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "min")]
    strategy: String,
    /// Seed for the random strategy (16 hex digits).
    #[arg(long, default_value = "0000000000000000")]
    key: String,
    #[command(flatten)]
    modulation: Modulation,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    payload: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Secret key (16 hex digits).
    #[arg(long)]
    key: String,
    /// Strategy for superpixels after the payload ends.
    #[arg(long, default_value = "min")]
    fill: String,
    #[command(flatten)]
    modulation: Modulation,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    key: String,
    #[arg(long)]
    phase_map: Option<String>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    phase_map: Option<String>,
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long)]
    field: PathBuf,
    #[command(flatten)]
    modulation: Modulation,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Hologram field (CFLD).
    #[arg(long, conflicts_with = "pattern", required_unless_present = "pattern")]
    field: Option<PathBuf>,
    /// DMD pattern (PBM); decoded to its superpixel field first.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    /// Object image to score the reconstruction against.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    geometry: Geometry,
    #[arg(long)]
    phase_map: Option<String>,
}

#[derive(Args)]
struct Sim4fArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Aperture center FX,FY in cycles per mirror; defaults to the phase ramp.
    #[arg(long)]
    aperture_center: Option<String>,
    /// Aperture radius in cycles per mirror.
    #[arg(long, default_value_t = ApertureSpec::DEFAULT_RADIUS)]
    aperture_radius: f64,
    #[arg(long)]
    phase_map: Option<String>,
}

#[derive(Args)]
struct SsimArgs {
    a: PathBuf,
    b: PathBuf,
}

fn parse_grid(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Usage(format!("grid must look like WIDTHxHEIGHT, got {s:?}"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn emit(report: &Report) {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", formats::write_report(report));
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Hologram(a) => {
            let params = a.geometry.params()?;
            let (w, h) = parse_grid(&a.superpixels)?;
            let seed: StegoKey = a.seed.parse()?;
            let object = formats::read_image(&a.object)?;
            let holo = generate_hologram(&object, &params, w, h, (!a.no_diffuser).then_some(seed.0));
            formats::write_field(&a.output, &holo)?;
            let (_, scale) = normalize_field(&holo, &NormalizationParams::default());
            emit(&Report {
                scale: Some(scale),
                seed: (!a.no_diffuser).then(|| seed.to_string()),
                warnings: params.sampling_warnings(w, h),
                ..Default::default()
            });
        }
        Command::Encode(a) => {
            let strategy: Strategy = a.strategy.parse()?;
            let key: StegoKey = a.key.parse()?;
            let params = a.modulation.normalization()?;
            let cb = a.modulation.codebook()?;
            let field = formats::read_field(&a.field)?;
            let out = encode_field(&field, strategy, key, &params, &cb)?;
            formats::write_pattern(&a.output, &out.pattern)?;
            emit(&Report {
                capacity_bits: Some(capacity_of_plan(&out.plan, &cb)),
                scale: Some(out.scale),
                strategy: Some(strategy.to_string()),
                seed: Some(key.to_string()),
                ..Default::default()
            });
        }
        Command::Embed(a) => {
            let fill: Strategy = a.fill.parse()?;
            let key: StegoKey = a.key.parse()?;
            let params = a.modulation.normalization()?;
            let cb = a.modulation.codebook()?;
            let field = formats::read_field(&a.field)?;
            let payload = Payload::from_bytes(&std::fs::read(&a.payload)?);
            let (scaled, scale) = normalize_field(&field, &params);
            let plan = quantize_field(&scaled, &cb);
            let pattern = embed(&plan, &payload, key, fill, &cb)?;
            formats::write_pattern(&a.output, &pattern)?;
            emit(&Report {
                capacity_bits: Some(capacity_of_plan(&plan, &cb)),
                payload_bits: Some(payload.len() as u64),
                scale: Some(scale),
                strategy: Some(fill.to_string()),
                seed: Some(key.to_string()),
                ..Default::default()
            });
        }
        Command::Extract(a) => {
            let key: StegoKey = a.key.parse()?;
            let cb = Codebook::build(assignment(a.phase_map.as_deref())?);
            let pattern = formats::read_pattern(&a.pattern)?;
            let payload = extract(&pattern, key, &cb)?;
            std::fs::write(&a.output, payload.to_bytes())?;
            emit(&Report {
                payload_bits: Some(payload.len() as u64),
                seed: Some(key.to_string()),
                ..Default::default()
            });
        }
        Command::Decode(a) => {
            let cb = Codebook::build(assignment(a.phase_map.as_deref())?);
            let pattern = formats::read_pattern(&a.pattern)?;
            let (plan, field) = decode_field(&pattern, &cb);
            formats::write_field(&a.output, &field)?;
            emit(&Report {
                capacity_bits: Some(capacity_of_plan(&plan, &cb)),
                ..Default::default()
            });
        }
        Command::Capacity(a) => {
            let params = a.modulation.normalization()?;
            let cb = a.modulation.codebook()?;
            let field = formats::read_field(&a.field)?;
            let (scaled, scale) = normalize_field(&field, &params);
            let plan = quantize_field(&scaled, &cb);
            emit(&Report {
                capacity_bits: Some(capacity_of_plan(&plan, &cb)),
                scale: Some(scale),
                ..Default::default()
            });
        }
        Command::Reconstruct(a) => {
            let params = a.geometry.params()?;
            let field = match (&a.field, &a.pattern) {
                (Some(path), _) => formats::read_field(path)?,
                (None, Some(path)) => {
                    let cb = Codebook::build(assignment(a.phase_map.as_deref())?);
                    decode_field(&formats::read_pattern(path)?, &cb).1
                }
                (None, None) => return Err(Error::Usage("need --field or --pattern".into())),
            };
            let image = reconstruct(&field, &params);
            formats::write_image(&a.output, &image)?;
            let ssim = match &a.reference {
                Some(path) => {
                    let reference = formats::read_image(path)?;
                    let reference = letterbox_resample(&reference, image.width(), image.height());
                    Some(optics::ssim(&image, &reference)?)
                }
                None => None,
            };
            emit(&Report {
                ssim,
                warnings: params.sampling_warnings(field.width(), field.height()),
                ..Default::default()
            });
        }
        Command::Sim4f(a) => {
            let cb = Codebook::build(assignment(a.phase_map.as_deref())?);
            let aperture = match &a.aperture_center {
                Some(s) => {
                    let bad = || Error::Usage(format!("aperture center must be FX,FY, got {s:?}"));
                    let (fx, fy) = s.split_once(',').ok_or_else(bad)?;
                    let fx: f64 = fx.trim().parse().map_err(|_| bad())?;
                    let fy: f64 = fy.trim().parse().map_err(|_| bad())?;
                    let origin = dmd_stego::superpixel::phase_angle(cb.assignment().indices()[0]);
                    ApertureSpec::new((fx, fy), a.aperture_radius, origin)?
                }
                None => ApertureSpec::for_assignment(cb.assignment())
                    .ok_or_else(|| {
                        Error::Usage(
                            "phase map is not a linear ramp; pass --aperture-center".into(),
                        )
                    })?
                    .with_radius(a.aperture_radius)?,
            };
            let pattern = formats::read_pattern(&a.pattern)?;
            let simulated = simulate_4f(&pattern, &aperture)?;
            let (_, ideal) = decode_field(&pattern, &cb);
            formats::write_field(&a.output, &simulated)?;
            emit(&Report {
                correlation: Some(complex_correlation(simulated.values(), ideal.values())),
                ..Default::default()
            });
        }
        Command::Ssim(a) => {
            let x = formats::read_image(&a.a)?;
            let y = formats::read_image(&a.b)?;
            println!("{:.4}", optics::ssim(&x, &y)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
