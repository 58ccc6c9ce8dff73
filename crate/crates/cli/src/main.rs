use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ldp_core::citest::{ChiSquare, CiTest, FisherZ};
use ldp_core::experiment::{run_experiment, run_scaling, write_experiment_csv, write_scaling_csv, ExperimentConfig, RunOptions};
use ldp_core::graph::io::write_edge_list;
use ldp_core::ldp::run_ldp;
use ldp_core::synth::{named_graph, named_graph_ids};
use ldp_core::Dataset64;

/// Exit status when discovery ran but found no identifiable adjustment set.
const EXIT_NOT_IDENTIFIABLE: u8 = 2;

#[derive(Parser)]
#[command(name = "ldp", version, about = "Adjustment-set discovery by covariate partitioning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition the columns of a CSV around an exposure/outcome pair.
    Run {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        exposure: String,
        #[arg(long)]
        outcome: String,
        #[arg(long, value_enum)]
        test: DataTest,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// Result JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replicated benchmark run from a JSON config. `LDP_SEED` overrides the
    /// config seed.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Per-replicate rows plus an aggregate row.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Record wall time per replicate. Makes the output run-dependent.
        #[arg(long)]
        timing: bool,
    },
    /// Oracle test counts on the replicated ten-node layout, k = 1..=max-k.
    Scaling {
        #[arg(long)]
        max_k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        timing: bool,
    },
    /// Built-in graphs.
    Graphs {
        #[command(subcommand)]
        action: GraphsAction,
    },
}

#[derive(Subcommand)]
enum GraphsAction {
    List,
    /// Write a graph as an edge list.
    Export {
        #[arg(long)]
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DataTest {
    #[value(name = "fisher_z")]
    FisherZ,
    #[value(name = "chi_square")]
    ChiSquare,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn cmd_run(data: &Path, exposure: &str, outcome: &str, test: DataTest, alpha: f64, out: &Path) -> Result<bool> {
    let file = File::open(data).with_context(|| format!("opening {}", data.display()))?;
    let d = Dataset64::read_csv(file)
        .with_context(|| format!("reading {}", data.display()))?
        .with_roles(exposure, outcome)
        .context("exposure and outcome must be columns of the data")?;
    let tester: Box<dyn CiTest> = match test {
        DataTest::FisherZ => Box::new(FisherZ::new(&d, alpha)?),
        DataTest::ChiSquare => Box::new(ChiSquare::new(&d, alpha)?),
    };
    let candidates: Vec<&str> = d
        .columns()
        .iter()
        .map(String::as_str)
        .filter(|c| *c != exposure && *c != outcome)
        .collect();
    let result = run_ldp(tester.as_ref(), &candidates, exposure, outcome)?;
    let mut w = create(out)?;
    serde_json::to_writer_pretty(&mut w, &result)?;
    std::io::Write::flush(&mut w)?;
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(result.vas.is_some())
}

fn cmd_experiment(config: &Path, out: &Path, workers: usize, timing: bool) -> Result<()> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Ok(seed) = std::env::var("LDP_SEED") {
        cfg.seed = seed.trim().parse().with_context(|| format!("LDP_SEED={seed} is not an unsigned integer"))?;
    }
    let output = run_experiment(&cfg, RunOptions { workers, timing })?;
    write_experiment_csv(&cfg, &output, create(out)?)?;
    println!("{}", serde_json::to_string_pretty(&output.report)?);
    Ok(())
}

fn cmd_scaling(max_k: usize, out: &Path, timing: bool) -> Result<()> {
    let rows = run_scaling(max_k, timing)?;
    write_scaling_csv(&rows, create(out)?)?;
    for r in &rows {
        println!("|Z|={} tests={} ratio={:.3}", r.covariates, r.tests_executed, r.ratio);
    }
    Ok(())
}

fn cmd_graphs(action: &GraphsAction) -> Result<()> {
    match action {
        GraphsAction::List => {
            for id in named_graph_ids() {
                let g = named_graph(id)?;
                println!("{id}\t{} nodes\t{} edges", g.len(), g.edge_count());
            }
            println!("scaling_<k>\t8k+2 nodes");
        }
        GraphsAction::Export { id, out } => {
            let g = named_graph(id)?;
            write_edge_list(&g, out).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            data,
            exposure,
            outcome,
            test,
            alpha,
            out,
        } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                bail!("alpha {alpha} outside (0, 1)");
            }
            let identified = cmd_run(&data, &exposure, &outcome, test, alpha, &out)?;
            return Ok(if identified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NOT_IDENTIFIABLE)
            });
        }
        Command::Experiment {
            config,
            out,
            workers,
            timing,
        } => cmd_experiment(&config, &out, workers, timing)?,
        Command::Scaling { max_k, out, timing } => cmd_scaling(max_k, &out, timing)?,
        Command::Graphs { action } => cmd_graphs(&action)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
