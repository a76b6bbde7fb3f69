use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use coinwalk::config::ExperimentConfig;
use coinwalk::experiments::run;
use coinwalk::figures::{figure_config, FIGURE_IDS};
use coinwalk::manifest::RunManifest;
use coinwalk::output::sha256_hex;
use coinwalk::run_to_dir;
use coinwalk::verify::run_criteria;

#[derive(Parser)]
#[command(name = "coinwalk", version, about = "Biased-coin quantum walk experiments")]
struct Cli {
    /// Override the noise seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the output directory of the config.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run { config: PathBuf },
    /// Run the preset for one figure panel.
    Figure {
        id: Option<String>,
        /// List the known panel ids.
        #[arg(long)]
        list: bool,
        /// Print the preset config instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Evaluate the acceptance criteria.
    Verify {
        /// Restrict to these criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Compare a manifest against the files beside it.
    Check {
        manifest: PathBuf,
        /// Also rerun the recorded config and compare bytes.
        #[arg(long)]
        rerun: bool,
    },
}

fn execute(cli: &Cli, mut cfg: ExperimentConfig) -> anyhow::Result<()> {
    if let (Some(seed), Some(noise)) = (cli.seed, cfg.noise.as_mut()) {
        noise.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output.directory = dir.clone();
    }
    let dir = cfg.output.directory.clone();
    let (output, manifest) = run_to_dir(&cfg, &dir)?;
    for f in &manifest.files {
        println!("{}", dir.join(&f.path).display());
    }
    println!("{}", serde_json::to_string_pretty(&output.summary)?);
    Ok(())
}

fn check(path: &Path, rerun: bool) -> anyhow::Result<bool> {
    let manifest = RunManifest::load(path).with_context(|| format!("reading {}", path.display()))?;
    let dir = path.parent().map(PathBuf::from).unwrap_or_default();
    let mut problems = manifest.mismatches(&dir);
    if rerun {
        manifest.config.validate()?;
        let fresh = run(&manifest.config)?;
        for f in &manifest.files {
            match fresh.artifacts.get(&f.path) {
                Some(bytes) if sha256_hex(bytes) == f.sha256 => {}
                Some(_) => problems.push(format!("{}: rerun differs", f.path)),
                None => problems.push(format!("{}: not produced on rerun", f.path)),
            }
        }
    }
    for p in &problems {
        eprintln!("{p}");
    }
    println!("{} files, {} problems", manifest.files.len(), problems.len());
    Ok(problems.is_empty())
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(config)?;
            execute(&cli, cfg)?;
        }
        Command::Figure { id, list, print_config } => {
            if *list {
                FIGURE_IDS.iter().for_each(|id| println!("{id}"));
                return Ok(ExitCode::SUCCESS);
            }
            let Some(id) = id else { bail!("missing figure id (see --list)") };
            let Some(cfg) = figure_config(id) else { bail!("unknown figure id {id:?} (see --list)") };
            if *print_config {
                println!("{}", serde_json::to_string_pretty(&cfg)?);
            } else {
                execute(&cli, cfg)?;
            }
        }
        Command::Verify { only } => {
            let verdicts = run_criteria(only);
            verdicts.iter().for_each(|v| println!("{v}"));
            if verdicts.iter().any(|v| !v.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Check { manifest, rerun } => {
            if !check(manifest, *rerun)? {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
