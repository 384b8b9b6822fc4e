//! Command-line front end.
//!
//! ```text
//! indoor-mmwave eval-pathloss --model los --d 10
//! indoor-mmwave fit --input corner_data.csv --model corner
//! indoor-mmwave azimuth-gain --input spectrum.csv
//! indoor-mmwave fade-stats --k-db 6.5 --samples 1000000
//! indoor-mmwave simulate --scene h_building --terminals 10000 --seed 7 --out run/
//! ```
//!
//! Failures print `{"error": <kind>, "message": <text>}` on stderr and exit 1;
//! usage errors exit 2.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::angular::{azimuth_gain, AngularSpectrum, BeamSelectionModel};
use crate::error::{Error, Result};
use crate::fading::{coherence_time, fade_depth_cdf, fade_durations, k_factor_two_moment, ricean_trace, FadeTrace, RiceanParams};
use crate::fitting::{fit_corner_model, fit_slope_fixed_intercept, fit_slope_intercept, read_measurements_csv, FitReport};
use crate::propagation::{friis_gain_db, CornerGeometry, CornerModel, FrequencyScaled, PathGainModel};
use crate::scene::load_scene;
use crate::stats::{median, stream_rng, EmpiricalCdf};
use crate::syssim::{simulate_coverage, RadioConfig, SimOptions};

#[derive(Debug, Parser)]
#[command(name = "indoor-mmwave", version, about = "Indoor mmWave propagation models and coverage simulation")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (or directory for `simulate` and `fit`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for reports and statistics.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PgModel {
    Los,
    NlosRoom,
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitModel {
    Corner,
    SlopeIntercept,
    FixedIntercept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum System {
    #[value(name = "28ghz")]
    Mmwave,
    #[value(name = "2ghz")]
    Legacy,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a path-gain model at one or more distances.
    EvalPathloss {
        #[arg(long, value_enum)]
        model: PgModel,
        /// Distance in meters (Manhattan distance for the corner model; defaults to d1 + d2).
        #[arg(long = "d", required_unless_present_all = ["d1", "d2"], num_args = 1..)]
        d: Vec<f64>,
        /// First corridor leg for the corner model.
        #[arg(long)]
        d1: Option<f64>,
        /// Second corridor leg for the corner model.
        #[arg(long)]
        d2: Option<f64>,
        /// Carrier in GHz; constants are rescaled from 28 GHz.
        #[arg(long, default_value_t = 28.0)]
        freq: f64,
    },
    /// Fit a model to measurements (columns seg1_m, seg2_m, seg3_m, penetrations, pg_db).
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "corner")]
        model: FitModel,
        /// Fixed 1 m intercept; defaults to free space at `--freq`.
        #[arg(long, allow_hyphen_values = true)]
        pl1: Option<f64>,
        #[arg(long, default_value_t = 28.0)]
        freq: f64,
    },
    /// Azimuth gain of a 360-bin spectrum, or draws from the beam-selection model.
    AzimuthGain {
        /// CSV with columns angle_deg,power_linear.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of beam-selection draws when no input is given.
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
    },
    /// Fade statistics of a recorded trace or of a synthetic Ricean trace.
    FadeStats {
        /// Trace CSV (`rate_hz=<r>` header, one power value per line).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 6.5)]
        k_db: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.0)]
        correlation_ms: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
        threshold_db: f64,
    },
    /// Monte-Carlo coverage simulation of a scene.
    Simulate {
        /// Scene file, or a shipped scene name such as `h_building`.
        #[arg(long)]
        scene: String,
        /// Overrides the scene's terminal count.
        #[arg(long)]
        terminals: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "28ghz")]
        system: System,
    },
}

/// Rounds to 4 decimals and trims trailing zeros.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!((v * 1e4).round() / 1e4)
    } else {
        json!(format_number(v))
    }
}

fn deciles_json(cdf: &EmpiricalCdf) -> Value {
    let d = cdf.deciles();
    let mut m = serde_json::Map::new();
    for (i, v) in d.iter().enumerate() {
        m.insert(format!("p{}", (i + 1) * 10), num(*v));
    }
    Value::Object(m)
}

fn deciles_csv(name: &str, cdf: &EmpiricalCdf) -> String {
    let mut out = format!("quantile,{name}\n");
    for (i, v) in cdf.deciles().iter().enumerate() {
        out.push_str(&format!("{},{}\n", format_number((i + 1) as f64 / 10.0), format_number(*v)));
    }
    out
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value") + "\n"
}

struct Ctx<'a> {
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// `--seed`, else the scene's seed, else 0.
    fn seed_or(&self, scene_seed: Option<u64>) -> u64 {
        self.seed.or(scene_seed).unwrap_or(0)
    }

    /// Payload to `--out` if given, otherwise to stdout.
    fn emit(&mut self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)?;
                }
                std::fs::write(p, text)?;
                Ok(())
            }
            None => Ok(self.stdout.write_all(text.as_bytes())?),
        }
    }
}

fn eval_pathloss(ctx: &mut Ctx, model: PgModel, ds: &[f64], d1: Option<f64>, d2: Option<f64>, freq: f64) -> Result<()> {
    let summed;
    let ds = match (ds.is_empty(), d1, d2) {
        (true, Some(a), Some(b)) => {
            summed = [a + b];
            &summed[..]
        }
        _ => ds,
    };
    let values = ds
        .iter()
        .map(|&d| -> Result<f64> {
            match model {
                PgModel::Los => PathGainModel::LOS_28GHZ.scale_frequency(freq)?.path_gain(d),
                PgModel::NlosRoom => PathGainModel::NLOS_ROOM_28GHZ.scale_frequency(freq)?.path_gain(d),
                PgModel::Corner => {
                    let m = CornerModel::default().scale_frequency(freq)?;
                    match d1 {
                        Some(d1) => m.path_gain_at(d, CornerGeometry { d1, d2 }),
                        None if d2.is_some() => Err(Error::Domain("--d2 requires --d1".into())),
                        None => m.path_gain_segments(&[d]),
                    }
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let text = match ctx.format {
        None => values.iter().map(|v| format_number(*v) + "\n").collect(),
        Some(Format::Csv) => {
            let mut s = String::from("d_m,pg_db\n");
            for (d, v) in ds.iter().zip(&values) {
                s.push_str(&format!("{},{}\n", format_number(*d), format_number(*v)));
            }
            s
        }
        Some(Format::Json) => pretty(&json!({
            "model": format!("{model:?}").to_lowercase(),
            "frequency_ghz": freq,
            "points": ds.iter().zip(&values).map(|(d, v)| json!({"d_m": d, "pg_db": num(*v)})).collect::<Vec<_>>(),
        })),
    };
    ctx.emit(&text)
}

fn report_json(report: &FitReport) -> Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    let obj = v.as_object_mut().unwrap();
    obj.remove("residuals");
    if let Some(p) = obj.get_mut("parameters").and_then(Value::as_object_mut) {
        for val in p.values_mut() {
            if let Some(f) = val.as_f64() {
                *val = num(f);
            }
        }
    }
    for key in ["rms_error_db", "mean_bias_db", "lognormal_max_cdf_gap_db"] {
        if let Some(f) = obj.get(key).and_then(Value::as_f64) {
            obj.insert(key.into(), num(f));
        }
    }
    v
}

fn residuals_csv(report: &FitReport) -> String {
    let mut s = String::from("index,residual_db\n");
    for (i, r) in report.residuals.iter().enumerate() {
        s.push_str(&format!("{i},{r}\n"));
    }
    s
}

fn fit(ctx: &mut Ctx, input: &Path, model: FitModel, pl1: Option<f64>, freq: f64) -> Result<()> {
    let text = std::fs::read_to_string(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    let data = read_measurements_csv(&text)?;
    let pl1 = pl1.unwrap_or_else(|| friis_gain_db(1.0, freq));
    let report = match model {
        FitModel::Corner => fit_corner_model(&data, pl1)?,
        FitModel::SlopeIntercept => fit_slope_intercept(&data)?,
        FitModel::FixedIntercept => fit_slope_fixed_intercept(&data, pl1)?,
    };
    let json_text = pretty(&report_json(&report));
    if let Some(dir) = ctx.out.clone() {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("fit_report.json"), &json_text)?;
        std::fs::write(dir.join("residuals.csv"), residuals_csv(&report))?;
    }
    let text = match ctx.format {
        Some(Format::Csv) => residuals_csv(&report),
        _ => json_text,
    };
    Ok(ctx.stdout.write_all(text.as_bytes())?)
}

fn azimuth(ctx: &mut Ctx, input: Option<&Path>, draws: usize) -> Result<()> {
    let text = match input {
        Some(p) => {
            let csv = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            let g = azimuth_gain(&AngularSpectrum::from_csv(&csv)?);
            match ctx.format {
                Some(Format::Csv) => format!("azimuth_gain_db\n{}\n", format_number(g)),
                _ => pretty(&json!({ "azimuth_gain_db": num(g) })),
            }
        }
        None => {
            if draws == 0 {
                return Err(Error::Domain("--draws must be >= 1".into()));
            }
            let model = BeamSelectionModel::default();
            let mut rng = stream_rng(ctx.seed_or(None), 0);
            let gains = (0..draws).map(|_| model.sample_gain(&mut rng)).collect::<Result<Vec<_>>>()?;
            let cdf = EmpiricalCdf::new(gains)?;
            match ctx.format {
                Some(Format::Csv) => deciles_csv("azimuth_gain_db", &cdf),
                _ => pretty(&json!({
                    "draws": draws,
                    "ideal_gain_db": num(model.ideal_gain_db()),
                    "mean_gain_db": num(cdf.mean()),
                    "azimuth_gain_db": deciles_json(&cdf),
                })),
            }
        }
    };
    ctx.emit(&text)
}

fn fade_stats(ctx: &mut Ctx, input: Option<&Path>, k_db: f64, samples: usize, corr_ms: f64, threshold_db: f64) -> Result<()> {
    let trace = match input {
        Some(p) => {
            let csv = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            FadeTrace::from_csv(&csv)?
        }
        None => {
            let mut rng = stream_rng(ctx.seed_or(None), 0);
            ricean_trace(&RiceanParams::new(k_db, corr_ms), samples, &mut rng)?
        }
    };
    let depth = fade_depth_cdf(&trace)?;
    let text = match ctx.format {
        Some(Format::Csv) => deciles_csv("fade_depth_db", &depth),
        _ => {
            let durations = fade_durations(&trace, threshold_db)?;
            let coherence = coherence_time(&trace).ok();
            let dur_cdf = EmpiricalCdf::new(durations.clone()).ok();
            pretty(&json!({
                "samples": trace.len(),
                "rate_hz": trace.rate_hz(),
                "k_factor_db": num(k_factor_two_moment(&trace)?),
                "fade_depth_db": deciles_json(&depth),
                "coherence_time_ms": coherence.map(num),
                "fades": {
                    "threshold_db": threshold_db,
                    "count": durations.len(),
                    "median_ms": dur_cdf.as_ref().map(|_| num(median(&durations))),
                    "p90_ms": dur_cdf.as_ref().map(|c| num(c.quantile(0.9))),
                    "max_ms": dur_cdf.as_ref().map(|c| num(c.max())),
                },
            }))
        }
    };
    ctx.emit(&text)
}

fn simulate(ctx: &mut Ctx, scene: &str, terminals: Option<usize>, threads: Option<usize>, system: System) -> Result<()> {
    let scene = load_scene(scene)?;
    let radio = match system {
        System::Mmwave => scene.radio.clone(),
        System::Legacy => RadioConfig {
            tx_power_dbm: scene.radio.tx_power_dbm,
            noise_figure_db: scene.radio.noise_figure_db,
            corner_loss_db: scene.radio.corner_loss_db,
            ..RadioConfig::comparison_2ghz()
        },
    };
    let opts = SimOptions {
        n_terminals: terminals.unwrap_or(scene.layout.terminals().count),
        seed: ctx.seed_or(scene.seed),
        threads,
    };
    let coverage = simulate_coverage(&scene.layout, &radio, &scene.models, opts)?;
    if let Some(dir) = &ctx.out {
        coverage.write_outputs(dir)?;
    }
    let text = match ctx.format {
        Some(Format::Csv) => coverage.sinr_cdf_csv(),
        _ => coverage.summary_json(),
    };
    Ok(ctx.stdout.write_all(text.as_bytes())?)
}

fn error_json(e: &Error) -> String {
    json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_with(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = writeln!(stderr, "{rendered}");
                    let _ = writeln!(stderr, "{}", json!({ "error": "usage", "message": rendered.lines().next().unwrap_or("") }));
                    2
                }
            };
        }
    };
    let mut ctx = Ctx {
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
        stdout,
    };
    let result = match &cli.command {
        Command::EvalPathloss { model, d, d1, d2, freq } => eval_pathloss(&mut ctx, *model, d, *d1, *d2, *freq),
        Command::Fit { input, model, pl1, freq } => fit(&mut ctx, input, *model, *pl1, *freq),
        Command::AzimuthGain { input, draws } => azimuth(&mut ctx, input.as_deref(), *draws),
        Command::FadeStats {
            input,
            k_db,
            samples,
            correlation_ms,
            threshold_db,
        } => fade_stats(&mut ctx, input.as_deref(), *k_db, *samples, *correlation_ms, *threshold_db),
        Command::Simulate {
            scene,
            terminals,
            threads,
            system,
        } => simulate(&mut ctx, scene, *terminals, *threads, *system),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(&e));
            1
        }
    }
}

/// Runs the CLI on the process streams.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
