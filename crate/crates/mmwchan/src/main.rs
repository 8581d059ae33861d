//! Command-line front end for the mmWave campaign pipelines.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mmwchan::campaign::{load_campaign, summarize_campaign, Campaign, LosClass};
use mmwchan::combining::{multibeam_path_loss_samples, CombineMode};
use mmwchan::delay::{directional_stats, empirical_cdf, StatsFilter};
use mmwchan::extension::{
    distance_extension_factor, extended_distance_m, extension_curve, load_ple_file,
};
use mmwchan::geom::Point3;
use mmwchan::pathloss::{all_angle_path_loss_samples, fit_ple};
use mmwchan::raytrace::{trace_paths, Scene};
use mmwchan::synth::{generate_campaign, write_generated, GeneratorConfig};
use mmwchan::synthesis::{omni_stats, SynthesisOptions};
use mmwchan::tables;

#[derive(Parser)]
#[command(
    name = "mmwchan",
    version,
    about = "Directional mmWave campaign processing: delay spreads, path loss, \
             beam combining, distance extension, ray tracing, omni PDP synthesis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    Los,
    Nlos,
}

impl From<ClassArg> for LosClass {
    fn from(c: ClassArg) -> LosClass {
        match c {
            ClassArg::Los => LosClass::Los,
            ClassArg::Nlos => LosClass::Nlos,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterArg {
    AllAngles,
    StrongestBeam,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Coherent,
    Noncoherent,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Per-class location counts (measured / with-signal / outage) with and
    /// without a distance cap
    Summary {
        #[arg(long)]
        input: PathBuf,
        /// Distance cap in meters for the capped block
        #[arg(long, default_value_t = 200.0)]
        d_max: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Location ids to exclude explicitly
        #[arg(long)]
        exclude: Vec<String>,
    },
    /// RMS delay spread statistics (and optional CDF data) per LOS class
    DelayStats {
        #[arg(long)]
        input: PathBuf,
        /// Restrict to one class (default: both)
        #[arg(long)]
        class: Option<ClassArg>,
        #[arg(long, value_enum, default_value_t = FilterArg::AllAngles)]
        filter: FilterArg,
        #[arg(long, default_value_t = 5.0)]
        threshold_db: f64,
        /// Also emit the empirical CDF of the samples
        #[arg(long)]
        cdf: bool,
        #[arg(long)]
        exclude: Vec<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Close-in PLE fits: over all angles, single best beam, and combined
    /// beams up to --k
    PathlossFit {
        #[arg(long)]
        input: PathBuf,
        /// Carrier frequency for the 1 m anchor (default: campaign value)
        #[arg(long)]
        freq: Option<f64>,
        /// Restrict to one LOS class (default: all locations)
        #[arg(long)]
        class: Option<ClassArg>,
        /// Largest beam count to combine
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long, default_value_t = 5.0)]
        threshold_db: f64,
        #[arg(long)]
        exclude: Vec<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Beam-combining distance extension table from a PLE file
    DeeTable {
        #[arg(long)]
        ple_file: PathBuf,
        #[arg(long, default_value_t = 200.0)]
        d1: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate d2 and the extension factor for one (d1, DEE) pair, and
    /// optionally a whole extension curve
    Extend {
        #[arg(long)]
        dee: f64,
        #[arg(long, default_value_t = 200.0)]
        d1: f64,
        /// Emit a (d1, d2) curve from --curve-min to --curve-max
        #[arg(long)]
        curve_min: Option<f64>,
        #[arg(long)]
        curve_max: Option<f64>,
        #[arg(long)]
        curve_step: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Trace LOS and specular reflection paths through a facet scene
    Trace {
        #[arg(long)]
        scene: PathBuf,
        /// TX position as x,y,z in meters
        #[arg(long, value_parser = parse_point)]
        tx: Point3,
        /// RX position as x,y,z in meters
        #[arg(long, value_parser = parse_point)]
        rx: Point3,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Synthesize absolute-timing omnidirectional PDPs and their statistics
    SynthOmni {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = 20.0)]
        gate_deg: f64,
        #[arg(long, default_value_t = 5.0)]
        threshold_db: f64,
        #[arg(long)]
        exclude: Vec<String>,
        /// Directory for per-location omni PDP exports
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded synthetic campaign with ground truth and scene
    Generate {
        #[arg(long)]
        seed: u64,
        /// Output directory for campaign.json, ground_truth.json, scene.txt
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 25)]
        locations: usize,
        #[arg(long, default_value_t = 3.2)]
        ple: f64,
        #[arg(long, default_value_t = 0.0)]
        shadow_sigma: f64,
        #[arg(long, default_value_t = 73e9)]
        freq: f64,
        #[arg(long, default_value_t = 0.35)]
        los_fraction: f64,
        #[arg(long, default_value_t = 0.1)]
        outage_fraction: f64,
        #[arg(long, default_value_t = 30.0)]
        d_min: f64,
        #[arg(long, default_value_t = 200.0)]
        d_max: f64,
        #[arg(long, default_value_t = 181.0)]
        max_path_loss: f64,
    },
}

fn parse_point(s: &str) -> Result<Point3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got `{s}`"));
    }
    let mut v = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse()
            .map_err(|e| format!("bad coordinate `{p}`: {e}"))?;
    }
    Ok(Point3::new(v[0], v[1], v[2]))
}

fn load_excluded(path: &PathBuf, exclude: &[String]) -> Result<Campaign> {
    let campaign = load_campaign(path)?;
    Ok(if exclude.is_empty() {
        campaign
    } else {
        campaign.excluding(exclude)
    })
}

fn write_or_print(output: &Option<PathBuf>, name: &str, contents: &str) -> Result<()> {
    print!("{contents}");
    if let Some(dir) = output {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn init_thread_pool() {
    if let Ok(n) = std::env::var("MMWCHAN_NUM_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> Result<()> {
    env_logger::init();
    init_thread_pool();
    let cli = Cli::parse();
    match cli.command {
        Command::Summary {
            input,
            d_max,
            output,
            exclude,
        } => {
            let campaign = load_excluded(&input, &exclude)?;
            let summary = summarize_campaign(&campaign, d_max)?;
            write_or_print(&output, "summary.csv", &tables::summary_csv(&summary))?;
        }

        Command::DelayStats {
            input,
            class,
            filter,
            threshold_db,
            cdf,
            exclude,
            output,
        } => {
            let campaign = load_excluded(&input, &exclude)?;
            let filter = match filter {
                FilterArg::AllAngles => StatsFilter::AllAngles,
                FilterArg::StrongestBeam => StatsFilter::StrongestBeam,
            };
            let classes: Vec<LosClass> = match class {
                Some(c) => vec![c.into()],
                None => LosClass::ALL.to_vec(),
            };
            let mut rows = Vec::new();
            let mut all_samples = Vec::new();
            for c in &classes {
                match directional_stats(&campaign, *c, filter, threshold_db) {
                    Ok(stats) => {
                        all_samples.extend(stats.values());
                        rows.push(tables::StatsRow {
                            label: c.to_string(),
                            stats: Some(stats),
                        });
                    }
                    Err(mmwchan::Error::EmptyClass(_)) if class.is_none() => {
                        rows.push(tables::StatsRow {
                            label: c.to_string(),
                            stats: None,
                        });
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            write_or_print(&output, "delay_stats.csv", &tables::stats_csv(&rows))?;
            if cdf {
                let cdf_table = tables::cdf_csv(&empirical_cdf(&all_samples)?);
                write_or_print(&output, "delay_cdf.csv", &cdf_table)?;
            }
        }

        Command::PathlossFit {
            input,
            freq,
            class,
            k,
            mode,
            threshold_db,
            exclude,
            output,
        } => {
            let mut campaign = load_excluded(&input, &exclude)?;
            if let Some(c) = class {
                let c: LosClass = c.into();
                campaign.locations.retain(|l| l.los_class == c);
            }
            let freq = freq.unwrap_or(campaign.carrier_freq_hz);
            if k < 1 {
                bail!("--k must be >= 1");
            }
            let modes: Vec<CombineMode> = match mode {
                ModeArg::Coherent => vec![CombineMode::Coherent],
                ModeArg::Noncoherent => vec![CombineMode::NonCoherent],
                ModeArg::Both => vec![CombineMode::Coherent, CombineMode::NonCoherent],
            };
            let mut rows = Vec::new();
            let all = all_angle_path_loss_samples(&campaign, threshold_db)?;
            rows.push(tables::FitRow {
                tag: "all-angles".to_string(),
                k_beams: 1,
                model: fit_ple(&all, freq)?,
                n_samples: all.len(),
            });
            let best = multibeam_path_loss_samples(
                &campaign,
                1,
                CombineMode::NonCoherent,
                threshold_db,
            )?;
            rows.push(tables::FitRow {
                tag: "single-best-beam".to_string(),
                k_beams: 1,
                model: fit_ple(&best, freq)?,
                n_samples: best.len(),
            });
            for m in &modes {
                for ki in 2..=k {
                    let samples =
                        multibeam_path_loss_samples(&campaign, ki, *m, threshold_db)?;
                    rows.push(tables::FitRow {
                        tag: format!("multibeam-{m}"),
                        k_beams: ki,
                        model: fit_ple(&samples, freq)?,
                        n_samples: samples.len(),
                    });
                }
            }
            write_or_print(&output, "pathloss_fit.csv", &tables::fit_report_csv(&rows))?;
        }

        Command::DeeTable {
            ple_file,
            d1,
            output,
        } => {
            let file = load_ple_file(&ple_file)?;
            let table = tables::dee_table_csv(&file.groups, d1)?;
            write_or_print(&output, "dee_table.csv", &table)?;
        }

        Command::Extend {
            dee,
            d1,
            curve_min,
            curve_max,
            curve_step,
            output,
        } => {
            let d2 = extended_distance_m(d1, dee)?;
            let def = distance_extension_factor(d1, dee)?;
            write_or_print(&output, "extend.csv", &tables::extend_csv(d1, dee, d2, def))?;
            match (curve_min, curve_max, curve_step) {
                (Some(lo), Some(hi), Some(step)) => {
                    let curve = extension_curve(dee, lo, hi, step)?;
                    write_or_print(&output, "extension_curve.csv", &tables::curve_csv(&curve))?;
                }
                (None, None, None) => {}
                _ => bail!("--curve-min, --curve-max, and --curve-step must be given together"),
            }
        }

        Command::Trace {
            scene,
            tx,
            rx,
            max_order,
            output,
        } => {
            let scene = Scene::load(&scene)?;
            let paths = trace_paths(&scene, tx, rx, max_order)?;
            write_or_print(&output, "trace.csv", &tables::trace_csv(&paths))?;
        }

        Command::SynthOmni {
            input,
            scene,
            gate_deg,
            threshold_db,
            exclude,
            output,
        } => {
            let campaign = load_excluded(&input, &exclude)?;
            let scene = Scene::load(&scene)?;
            let opts = SynthesisOptions {
                gate_deg,
                threshold_db,
                ..SynthesisOptions::default()
            };
            let report = omni_stats(&campaign, &scene, &opts)?;
            write_or_print(&output, "omni_stats.csv", &tables::omni_stats_csv(&report))?;
            write_or_print(&output, "omni_counts.csv", &tables::omni_counts_csv(&report))?;
            write_or_print(
                &output,
                "omni_manifest.csv",
                &tables::omni_manifest_csv(&report),
            )?;
            if let Some(dir) = &output {
                for o in &report.outcomes {
                    if let Some(omni) = &o.omni {
                        let path = dir.join(format!("omni_{}.csv", o.location_id));
                        fs::write(&path, tables::omni_pdp_csv(omni))
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                }
            }
            let failures = tables::failure_lines(&report);
            if !failures.is_empty() {
                eprintln!("{} location(s) not synthesized:", failures.len());
                for f in failures {
                    eprintln!("  {f}");
                }
            }
        }

        Command::Generate {
            seed,
            output,
            locations,
            ple,
            shadow_sigma,
            freq,
            los_fraction,
            outage_fraction,
            d_min,
            d_max,
            max_path_loss,
        } => {
            let config = GeneratorConfig {
                n_locations: locations,
                carrier_freq_hz: freq,
                ple,
                shadow_sigma_db: shadow_sigma,
                los_fraction,
                outage_fraction,
                d_min_m: d_min,
                d_max_m: d_max,
                max_path_loss_db: max_path_loss,
                ..GeneratorConfig::default()
            };
            let (campaign, truth, scene) = generate_campaign(&config, seed)?;
            let written = write_generated(&output, &campaign, &truth, &scene)?;
            for path in written {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
