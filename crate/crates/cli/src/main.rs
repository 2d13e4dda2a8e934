use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use dialmark::bench::{aggregate, emit_plots, read_results, run_grid, write_summary, Algorithm, GridConfig, GroupKey};
use dialmark::ontology::{generate_synthetic_domain, to_json, DomainSpec};
use dialmark::personalization::PersonalizationMode;

#[derive(Parser)]
#[command(name = "dialmark", version, about = "Personalized dialogue-management benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a grid of benchmark cells and write one CSV row per cell.
    Run(RunArgs),
    /// Summarize a results CSV into tables and SVG bar charts.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate a synthetic ontology from a cardinality spec.
    GenDomain {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Flags override the matching keys of the config file.
#[derive(clap::Args)]
struct RunArgs {
    /// JSON grid config with the same keys as these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Vec<u8>,
    /// Shipped domain name (cr, sfr, lap, fin) or an ontology JSON path.
    #[arg(long)]
    domain: Vec<String>,
    #[arg(long, value_parser = parse_algo)]
    algo: Vec<Algorithm>,
    #[arg(long, value_parser = parse_mode)]
    mode: Vec<PersonalizationMode>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Added to the seed range.
    #[arg(long, env = "DIALMARK_SEED_OFFSET")]
    seed_offset: Option<u64>,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<PersonalizationMode, String> {
    PersonalizationMode::parse(s).map_err(|e| e.to_string())
}

impl RunArgs {
    fn into_config(self) -> anyhow::Result<GridConfig> {
        let mut c = match &self.config {
            Some(p) => GridConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => GridConfig::default(),
        };
        if !self.env.is_empty() {
            c.env = self.env;
        }
        if !self.domain.is_empty() {
            c.domain = self.domain;
        }
        if !self.algo.is_empty() {
            c.algo = self.algo;
        }
        if !self.mode.is_empty() {
            c.mode = self.mode;
        }
        c.seeds = self.seeds.unwrap_or(c.seeds);
        c.train = self.train.unwrap_or(c.train);
        c.test = self.test.unwrap_or(c.test);
        c.out = self.out.unwrap_or(c.out);
        c.jobs = self.jobs.unwrap_or(c.jobs);
        c.seed_offset += self.seed_offset.unwrap_or(0);
        Ok(c)
    }
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let config = args.into_config()?;
    config.validate()?;
    log::info!("{} cells, {} jobs, writing {}", config.cells().len(), config.jobs, config.out.display());
    let outcome = run_grid(&config)?;
    log::info!("{} cells finished, {} failed", outcome.results.len(), outcome.failures.len());
    if !outcome.failures.is_empty() {
        for (key, e) in &outcome.failures {
            log::error!("{key:?}: {e}");
        }
        bail!("{} cells failed", outcome.failures.len());
    }
    Ok(())
}

fn report(input: PathBuf, out_dir: PathBuf) -> anyhow::Result<()> {
    let rows = read_results(&input).with_context(|| format!("reading {}", input.display()))?;
    std::fs::create_dir_all(&out_dir)?;
    let by_env = aggregate(&rows, &[GroupKey::Env, GroupKey::Domain, GroupKey::Label])?;
    write_summary(out_dir.join("summary_by_env.csv"), &by_env)?;
    write_summary(out_dir.join("summary_by_domain.csv"), &aggregate(&rows, &[GroupKey::Domain, GroupKey::Label])?)?;
    let grand = aggregate(&rows, &[GroupKey::Label])?;
    write_summary(out_dir.join("grand_mean.csv"), &grand)?;
    for g in &grand {
        println!("{:<8} {:>7.2} (sd {:.2}, {} cells)", g.label.as_deref().unwrap_or("?"), g.mean, g.sd, g.cells);
    }
    for f in emit_plots(&by_env, &out_dir)? {
        log::info!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run(args) => run(args)?,
        Command::Report { input, out_dir } => report(input, out_dir)?,
        Command::GenDomain { spec, out } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let spec: DomainSpec =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", spec.display()))?;
            let domain = generate_synthetic_domain(&spec)?;
            std::fs::write(&out, to_json(&domain)?).with_context(|| format!("writing {}", out.display()))?;
            log::info!("wrote {domain} to {}", out.display());
        }
    }
    Ok(())
}
