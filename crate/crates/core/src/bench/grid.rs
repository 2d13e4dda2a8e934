use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::results::{write_results, ResultRow, ResultSink};
use super::sim::{SimSettings, Simulation};
use crate::baselines::{write_history, DatabaseEntropy, ExperienceEntropy, Handcrafted, RandomQuestioner};
use crate::dialog::{write_transcript, EpisodeRecord, Policy};
use crate::env::EnvironmentConfig;
use crate::error::{Error, Result};
use crate::ontology::{load_domain, shipped_domain, ItemSet};
use crate::personalization::{train_cell, PersonalizationMode};
use crate::rl::{write_checkpoint, LearnerKind, RlConfig};
use crate::rng::StreamRoot;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "RQ")]
    Rq,
    #[serde(rename = "EMDB")]
    Emdb,
    #[serde(rename = "EMDM")]
    Emdm,
    #[serde(rename = "HDC")]
    Hdc,
    #[serde(rename = "DQN")]
    Dqn,
    #[serde(rename = "GP")]
    Gp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [Self::Rq, Self::Emdb, Self::Emdm, Self::Hdc, Self::Dqn, Self::Gp];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Rq => "RQ",
            Self::Emdb => "EMDB",
            Self::Emdm => "EMDM",
            Self::Hdc => "HDC",
            Self::Dqn => "DQN",
            Self::Gp => "GP",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}' (RQ, EMDB, EMDM, HDC, DQN, GP)")))
    }

    pub fn learner(&self) -> Option<LearnerKind> {
        match self {
            Self::Dqn => Some(LearnerKind::Dqn),
            Self::Gp => Some(LearnerKind::Gp),
            _ => None,
        }
    }

    /// Baselines have no personalization variants and always run as `v`.
    pub fn modes(&self, requested: &[PersonalizationMode]) -> Vec<PersonalizationMode> {
        if self.learner().is_some() {
            requested.to_vec()
        } else {
            vec![PersonalizationMode::Vanilla]
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

/// Grid definition. Keys mirror the `run` command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub env: Vec<u8>,
    /// Shipped domain names or paths to ontology JSON files.
    pub domain: Vec<String>,
    pub algo: Vec<Algorithm>,
    #[serde(alias = "personalization")]
    pub mode: Vec<PersonalizationMode>,
    pub seeds: u64,
    pub seed_offset: u64,
    pub train: usize,
    pub test: usize,
    pub out: PathBuf,
    pub jobs: usize,
    pub precision: Precision,
    pub simulator: SimSettings,
    pub rl: RlConfig,
    /// Where to write learner checkpoints and dialogue-history files.
    pub checkpoint_dir: Option<PathBuf>,
    /// Where to write test-phase transcripts, one JSONL file per cell.
    pub transcript_dir: Option<PathBuf>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            env: (1..=6).collect(),
            domain: crate::ontology::SHIPPED_DOMAINS.iter().map(|s| s.to_string()).collect(),
            algo: Algorithm::ALL.to_vec(),
            mode: PersonalizationMode::ALL.to_vec(),
            seeds: 10,
            seed_offset: 0,
            train: 4000,
            test: 500,
            out: PathBuf::from("results.csv"),
            jobs: 1,
            precision: Precision::F64,
            simulator: SimSettings::default(),
            rl: RlConfig::default(),
            checkpoint_dir: None,
            transcript_dir: None,
        }
    }
}

impl GridConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.env {
            EnvironmentConfig::standard(*e)?;
        }
        if self.domain.is_empty() || self.algo.is_empty() || self.seeds == 0 {
            return Err(Error::Config("grid needs at least one domain, algorithm and seed".into()));
        }
        if self.algo.iter().any(|a| a.learner().is_some()) && self.mode.is_empty() {
            return Err(Error::Config("learners need at least one personalization mode".into()));
        }
        if self.test == 0 {
            return Err(Error::Config("test must be positive".into()));
        }
        self.simulator.profiles.validate()?;
        self.rl.dqn.validate()?;
        self.rl.gp.validate()
    }

    /// Every cell in canonical order: env, domain, algorithm, mode, seed.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for env in &self.env {
            for domain in &self.domain {
                for algo in &self.algo {
                    for mode in algo.modes(&self.mode) {
                        for seed in self.seed_offset..self.seed_offset + self.seeds {
                            out.push(CellKey { env_id: *env, domain: domain.clone(), algorithm: *algo, mode, seed });
                        }
                    }
                }
            }
        }
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub env_id: u8,
    pub domain: String,
    pub algorithm: Algorithm,
    pub mode: PersonalizationMode,
    pub seed: u64,
}

impl CellKey {
    /// Short domain label: file stem for paths, the name otherwise.
    pub fn domain_label(&self) -> String {
        Path::new(&self.domain)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.domain.clone())
    }

    /// Root of the user streams. Shared by every algorithm and mode so all
    /// of them face the same users.
    pub fn user_root(&self) -> StreamRoot {
        StreamRoot::new(format!("env{}/{}/seed{}", self.env_id, self.domain_label(), self.seed))
    }

    pub fn policy_root(&self) -> StreamRoot {
        self.user_root().child(format!("{}/{}", self.algorithm, self.mode))
    }

    fn file_stem(&self) -> String {
        format!("env{}_{}_{}_{}_seed{}", self.env_id, self.domain_label(), self.algorithm, self.mode, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    pub train_rewards: Vec<i32>,
    pub test_rewards: Vec<i32>,
    pub test_reward_mean: f64,
    pub test_success_rate: f64,
    pub wall_clock_s: f64,
}

impl CellResult {
    pub fn row(&self) -> ResultRow {
        ResultRow {
            env_id: self.key.env_id,
            domain: self.key.domain_label(),
            algorithm: self.key.algorithm,
            mode: self.key.mode,
            seed: self.key.seed,
            train_episodes: self.train_rewards.len(),
            test_episodes: self.test_rewards.len(),
            test_reward_mean: self.test_reward_mean,
            test_success_rate: self.test_success_rate,
            wall_clock_s: (self.wall_clock_s * 1000.0).round() / 1000.0,
        }
    }
}

pub fn resolve_domain(name: &str) -> Result<ItemSet> {
    if name.ends_with(".json") || Path::new(name).exists() {
        load_domain(name)
    } else {
        shipped_domain(name)
    }
}

/// Trains and evaluates one cell.
pub fn run_cell(key: &CellKey, config: &GridConfig) -> Result<CellResult> {
    match config.precision {
        Precision::F32 => run_cell_as::<f32>(key, config),
        Precision::F64 => run_cell_as::<f64>(key, config),
    }
}

fn run_cell_as<T: Scalar>(key: &CellKey, config: &GridConfig) -> Result<CellResult> {
    let start = Instant::now();
    let domain = resolve_domain(&key.domain)?;
    let sim = Simulation::<T>::new(domain, EnvironmentConfig::standard(key.env_id)?, &config.simulator)?;
    let users = key.user_root();
    let policy_root = key.policy_root();

    let (train_rewards, test) = match key.algorithm.learner() {
        Some(kind) => {
            let mut trained = train_cell(key.mode, kind, &sim, &config.rl, config.train, &users, &policy_root)?;
            if let Some(dir) = &config.checkpoint_dir {
                let cp = trained.policy.checkpoint(&key.domain_label(), key.env_id, key.seed);
                write_checkpoint(dir.join(format!("{}.json", key.file_stem())), &cp)?;
            }
            let test = evaluate(&sim, &mut trained.policy, &users, &policy_root, config)?;
            (trained.train_rewards, test)
        }
        None => {
            let mut policy: Box<dyn Policy<T>> = match key.algorithm {
                Algorithm::Rq => Box::new(RandomQuestioner),
                Algorithm::Emdb => Box::new(DatabaseEntropy),
                Algorithm::Hdc => Box::new(Handcrafted),
                _ => Box::new(ExperienceEntropy::new()),
            };
            let train = if key.algorithm == Algorithm::Emdm {
                let mut emdm = ExperienceEntropy::new();
                let rewards = train_episodes(&sim, &mut emdm, &users, &policy_root, config.train)?;
                emdm.frozen = true;
                if let Some(dir) = &config.checkpoint_dir {
                    let file = std::fs::File::create(dir.join(format!("{}.jsonl", key.file_stem())))?;
                    write_history(&emdm.history, std::io::BufWriter::new(file))?;
                }
                policy = Box::new(emdm);
                rewards
            } else {
                train_episodes(&sim, &mut policy, &users, &policy_root, config.train)?
            };
            let test = evaluate(&sim, &mut policy, &users, &policy_root, config)?;
            (train, test)
        }
    };

    if let Some(dir) = &config.transcript_dir {
        let file = std::fs::File::create(dir.join(format!("{}.jsonl", key.file_stem())))?;
        let mut out = std::io::BufWriter::new(file);
        for record in &test {
            write_transcript(record, &mut out)?;
        }
    }

    let n = test.len() as f64;
    let test_rewards: Vec<i32> = test.iter().map(|r| r.reward).collect();
    Ok(CellResult {
        key: key.clone(),
        train_rewards,
        test_reward_mean: test_rewards.iter().map(|r| f64::from(*r)).sum::<f64>() / n,
        test_success_rate: test.iter().filter(|r| r.success).count() as f64 / n,
        test_rewards,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

fn train_episodes<T: Scalar, P: Policy<T> + ?Sized>(
    sim: &Simulation<T>,
    policy: &mut P,
    users: &StreamRoot,
    policy_root: &StreamRoot,
    n: usize,
) -> Result<Vec<i32>> {
    let mut rng = policy_root.stream("train");
    let root = users.child("train");
    (0..n).map(|i| sim.episode(policy, &root, i, &mut rng).map(|r| r.reward)).collect()
}

fn evaluate<T: Scalar, P: Policy<T> + ?Sized>(
    sim: &Simulation<T>,
    policy: &mut P,
    users: &StreamRoot,
    policy_root: &StreamRoot,
    config: &GridConfig,
) -> Result<Vec<EpisodeRecord<T>>> {
    let mut rng = policy_root.stream("test");
    let root = users.child("test");
    (0..config.test).map(|i| sim.episode(policy, &root, i, &mut rng)).collect()
}

/// Outcome of a grid run. Failed cells are reported, not fatal.
#[derive(Debug, Default)]
pub struct GridOutcome {
    pub results: Vec<CellResult>,
    pub failures: Vec<(CellKey, Error)>,
}

/// Runs every cell of `config` on `config.jobs` threads, appending each
/// finished cell to `config.out` as it completes and finally rewriting the
/// file in canonical cell order.
pub fn run_grid(config: &GridConfig) -> Result<GridOutcome> {
    config.validate()?;
    for dir in [&config.checkpoint_dir, &config.transcript_dir].into_iter().flatten() {
        std::fs::create_dir_all(dir)?;
    }
    let cells = config.cells();
    let sink = Mutex::new(ResultSink::create(&config.out)?);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let total = cells.len();
    let done = Mutex::new(0usize);

    let outcomes: Vec<(CellKey, Result<CellResult>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|key| {
                let outcome = run_cell(key, config);
                match &outcome {
                    Ok(res) => {
                        let mut s = sink.lock().expect("sink lock");
                        if let Err(e) = s.append(&res.row()) {
                            log::error!("could not append {key:?}: {e}");
                        }
                    }
                    Err(e) => log::error!("cell {key:?} failed: {e}"),
                }
                let mut n = done.lock().expect("progress lock");
                *n += 1;
                log::info!(
                    "[{}/{total}] {} {} {} {} seed {}",
                    *n,
                    key.env_id,
                    key.domain_label(),
                    key.algorithm,
                    key.mode,
                    key.seed
                );
                (key.clone(), outcome)
            })
            .collect()
    });
    drop(sink);

    let mut outcome = GridOutcome::default();
    for (key, res) in outcomes {
        match res {
            Ok(r) => outcome.results.push(r),
            Err(e) => outcome.failures.push((key, e)),
        }
    }
    let rows: Vec<ResultRow> = outcome.results.iter().map(CellResult::row).collect();
    write_results(&config.out, &rows)?;
    Ok(outcome)
}
