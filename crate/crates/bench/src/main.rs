//! Command-line front end: generate scenario files, run them, drive
//! refinement studies, and validate configs (including a
//! finite-difference spot check of the assembled tangent).

use std::error::Error;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fibril_bench::config::ScenarioConfig;
use fibril_bench::emit::{write_csv, write_geometry};
use fibril_bench::fd::{perturb_state, tangent_fd_distance_cols};
use fibril_bench::run::run_scenario;
use fibril_bench::scenarios::{
    generate_arc_benchmark, generate_crossing_fibers, generate_helical_spring,
    generate_rope_twisting, ArcVariant, HelixVariant,
};
use fibril_bench::studies::arc_study;
use fibril_bench::translate::build;
use fibril_bench::config::ElementConfig;

#[derive(Parser)]
#[command(
    name = "fibril-bench",
    about = "Scenario runner for the fibril beam engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in scenario as TOML.
    Generate {
        /// One of: arc-thick, arc-slender, rope-torsion-free,
        /// rope-six-field, helix-release, helix-compression,
        /// crossing-point, crossing-line.
        scenario: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario file and emit its records.
    Run {
        config: PathBuf,
        /// Directory for <name>.csv and <name>-geometry.txt.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Mesh-refinement study on the arc benchmark.
    Convergence {
        /// arc-thick or arc-slender.
        scenario: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![16usize, 32, 64])]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 512)]
        reference: usize,
        /// Use full quadrature on the levels (the reference stays
        /// reduced).
        #[arg(long, default_value_t = false)]
        full: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Parse, validate, build, and spot-check a scenario file.
    Validate {
        config: PathBuf,
        /// Seed for the randomized tangent spot check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn builtin(name: &str) -> Option<ScenarioConfig> {
    Some(match name {
        "arc-thick" => generate_arc_benchmark(16, ArcVariant::Thick, true),
        "arc-slender" => generate_arc_benchmark(16, ArcVariant::Slender, true),
        "rope-torsion-free" => generate_rope_twisting(ElementConfig::TorsionFree),
        "rope-six-field" => {
            generate_rope_twisting(ElementConfig::SimoReissner { reduced: true })
        }
        "helix-release" => generate_helical_spring(HelixVariant::DeskRelease),
        "helix-compression" => generate_helical_spring(HelixVariant::PaperCompression),
        "crossing-point" => generate_crossing_fibers(90.0, 1.5, false),
        "crossing-line" => generate_crossing_fibers(10.0, 1.5, false),
        _ => return None,
    })
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Box<dyn Error>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(ScenarioConfig::from_toml(&text)?)
}

fn main() -> Result<(), Box<dyn Error>> {
    match Cli::parse().command {
        Command::Generate { scenario, out } => {
            let config = builtin(&scenario)
                .ok_or_else(|| format!("unknown scenario {scenario:?}; see --help"))?;
            let text = config.to_toml()?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
        }
        Command::Run { config, out_dir } => {
            let config = load_config(&config)?;
            let outcome = run_scenario(&config)?;
            std::fs::create_dir_all(&out_dir)?;
            let csv_path = out_dir.join(format!("{}.csv", config.name));
            std::fs::write(&csv_path, write_csv(&outcome.records))?;
            eprintln!(
                "{}: {} accepted steps, {} halvings, {} Newton iterations → {}",
                config.name,
                outcome.steps,
                outcome.halvings,
                outcome.accumulated_iterations,
                csv_path.display()
            );
            if !outcome.frames.is_empty() {
                let geo_path = out_dir.join(format!("{}-geometry.txt", config.name));
                std::fs::write(&geo_path, write_geometry(&outcome.frames))?;
                eprintln!("geometry → {}", geo_path.display());
            }
        }
        Command::Convergence {
            scenario,
            levels,
            reference,
            full,
            threads,
        } => {
            let variant = match scenario.as_str() {
                "arc-thick" => ArcVariant::Thick,
                "arc-slender" => ArcVariant::Slender,
                other => return Err(format!("unknown arc variant {other:?}").into()),
            };
            let study = arc_study(variant, !full, &levels, reference, threads)?;
            println!("elements  l2_error        order");
            for (i, (n, e)) in study.levels.iter().enumerate() {
                let order = if i == 0 {
                    "    —".to_owned()
                } else {
                    format!("{:6.3}", study.orders[i - 1])
                };
                println!("{n:8}  {e:.8e}  {order}");
            }
        }
        Command::Validate { config, seed } => {
            let config = load_config(&config)?;
            let (model, _plan) = build(&config)?;
            eprintln!(
                "{}: parsed, {} fibers, {} elements, {} dofs",
                config.name,
                model.fiber_count(),
                model.elements().len(),
                model.n_dofs()
            );
            // Spot check: randomly deform the initial state a little and
            // compare a random batch of tangent columns against central
            // differences through the increment map.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let extent = config
                .fibers
                .iter()
                .flat_map(|f| f.stations.iter())
                .flat_map(|s| s[0..3].iter().map(|v| v.abs()))
                .fold(1e-6f64, f64::max);
            let mut state = model.initial_state();
            perturb_state(&model, &mut state, 1e-3 * extent, 1e-2, &mut rng);
            let mut cols: Vec<usize> = (0..model.n_dofs()).collect();
            cols.shuffle(&mut rng);
            cols.truncate(60.min(model.n_dofs()));
            cols.sort_unstable();
            let s_probe = rng.random_range(0.1..=1.0) * config.solver.s_end;
            let distance =
                tangent_fd_distance_cols(&model, &state, s_probe, None, &cols, 1e-7 * extent)?;
            eprintln!(
                "tangent spot check over {} columns at s = {s_probe:.3}: relative distance {distance:.3e}",
                cols.len()
            );
            if !(distance < 1e-4) {
                return Err(format!(
                    "assembled tangent disagrees with finite differences: {distance:.3e}"
                )
                .into());
            }
            println!("{}: OK", config.name);
        }
    }
    Ok(())
}
