use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::Deserialize;

use super::{derive_seed, generate_fs, make_evidence, pr_auc, BenchError, FsParams, FS_MODEL};
use crate::grounder::{ground_network, Aggregator, GroundOptions, Mode};
use crate::inference::{gibbs_marginals, GibbsParams, MarginalTable};
use crate::io::{parse_model, Database, Model, OutputError, ResultRow, Settings};
use crate::learning::{learn_weights, LearnConfig, Optimizer, TrainingSet};
use crate::logic::GroundAtom;

const TAG_TRAIN: u64 = 1;
const TAG_TEST: u64 = 2;
const TAG_SPLIT: u64 = 3;
const TAG_GIBBS: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsGibbs {
    pub chains: usize,
    pub burn_in: usize,
    pub samples: usize,
}

impl Default for FsGibbs {
    fn default() -> Self {
        let d = GibbsParams::default();
        FsGibbs {
            chains: d.chains,
            burn_in: d.burn_in,
            samples: d.samples,
        }
    }
}

/// Sweep description, readable from a TOML file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub train_sizes: Vec<usize>,
    pub dbs_per_train_size: usize,
    pub test_sizes: Vec<usize>,
    pub trials: usize,
    pub seeds: Vec<u64>,
    #[serde(with = "mode_list")]
    pub methods: Vec<Mode>,
    #[serde(with = "aggregator_str")]
    pub aggregator: Aggregator,
    pub evidence_fraction: f64,
    pub prior_std: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub per_db_normalize: bool,
    pub gibbs: FsGibbs,
    pub fs: FsParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let learn = LearnConfig::default();
        ExperimentConfig {
            train_sizes: vec![20, 40, 60, 80, 100],
            dbs_per_train_size: 1,
            test_sizes: vec![50, 100, 200, 400],
            trials: 3,
            seeds: vec![1],
            methods: vec![Mode::Mln, Mode::DaMln],
            aggregator: Aggregator::Max,
            evidence_fraction: 0.5,
            prior_std: learn.prior_std,
            max_iterations: learn.max_iterations,
            tolerance: learn.tolerance,
            per_db_normalize: false,
            gibbs: FsGibbs::default(),
            fs: FsParams::default(),
        }
    }
}

mod mode_list {
    use super::Mode;
    use serde::{Deserialize, Deserializer};
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mode>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

mod aggregator_str {
    use super::Aggregator;
    use serde::{Deserialize, Deserializer};
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Aggregator, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::InvalidConfig(m.into()));
        if self.train_sizes.is_empty() || self.test_sizes.is_empty() {
            return bad("train_sizes and test_sizes must be non-empty");
        }
        if self
            .train_sizes
            .iter()
            .chain(&self.test_sizes)
            .any(|&s| s < 2)
        {
            return bad("sizes must be at least 2");
        }
        if self.trials == 0 || self.seeds.is_empty() || self.dbs_per_train_size == 0 {
            return bad("trials, seeds and dbs_per_train_size must be non-empty/positive");
        }
        if self.methods.is_empty() {
            return bad("methods must be non-empty");
        }
        if !(0.0..=1.0).contains(&self.evidence_fraction) {
            return bad("evidence_fraction must lie in [0,1]");
        }
        if self.gibbs.chains == 0 || self.gibbs.samples == 0 {
            return bad("gibbs chains and samples must be positive");
        }
        self.fs.validate()
    }

    fn learn_config(&self, mode: Mode) -> LearnConfig {
        LearnConfig {
            prior_std: self.prior_std,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            optimizer: Optimizer::ConjugateGradient,
            mode,
            aggregator: self.aggregator,
            per_db_normalize: self.per_db_normalize,
        }
    }
}

struct TestCase {
    seed: u64,
    size: usize,
    trial: usize,
    evidence: Database,
    truth: Database,
}

fn auc_of(scores: &MarginalTable, truth: &Database, predicate: Option<&str>) -> f64 {
    let labels: BTreeMap<GroundAtom, bool> = truth
        .literals
        .iter()
        .filter(|(a, _)| predicate.is_none_or(|p| a.predicate == p))
        .map(|(a, &v)| (a.clone(), v))
        .collect();
    match pr_auc(scores, &labels) {
        Ok(v) => v,
        Err(e) => {
            log::debug!("AUC undefined ({e})");
            f64::NAN
        }
    }
}

fn infer(
    model: &Model,
    case: &TestCase,
    cfg: &ExperimentConfig,
) -> Result<MarginalTable, BenchError> {
    let sig = case
        .evidence
        .signature(model)
        .map_err(crate::grounder::GroundError::from)?;
    let queries: BTreeSet<String> = ["Smokes", "Cancer"].iter().map(|s| s.to_string()).collect();
    let net = ground_network(
        model,
        &sig,
        &case.evidence,
        &queries,
        &GroundOptions::default(),
    )?;
    let params = GibbsParams {
        chains: cfg.gibbs.chains,
        burn_in: cfg.gibbs.burn_in,
        samples: cfg.gibbs.samples,
        seed: derive_seed(case.seed, &[TAG_GIBBS, case.size as u64, case.trial as u64]),
    };
    Ok(gibbs_marginals(&net, &params)?)
}

/// Learns once per (seed, method) and scores every test case. Rows come out
/// ordered by seed, method, test size and trial.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, BenchError> {
    cfg.validate()?;
    let base = parse_model(FS_MODEL).expect("shipped model parses");

    // learned models, per seed then method
    let jobs: Vec<(u64, Mode)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.methods.iter().map(move |&m| (s, m)))
        .collect();
    let learned: Vec<Result<Model, BenchError>> = jobs
        .par_iter()
        .map(|&(seed, mode)| {
            let dbs = cfg
                .train_sizes
                .iter()
                .flat_map(|&size| (0..cfg.dbs_per_train_size).map(move |k| (size, k)))
                .map(|(size, k)| {
                    let s = derive_seed(seed, &[TAG_TRAIN, size as u64, k as u64]);
                    generate_fs(size, &cfg.fs, s).map(|w| w.database)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let ts = TrainingSet::new(&base, dbs)?;
            let result = learn_weights(&base, &ts, &cfg.learn_config(mode))?;
            log::info!(
                "seed {seed} {mode}: learned weights {:?} (converged: {})",
                result.weights,
                result.converged
            );
            Ok(base.with_weights(&result.weights).with_settings(Settings {
                mode,
                aggregator: cfg.aggregator,
            }))
        })
        .collect();

    let cases: Vec<(u64, usize, usize)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| {
            cfg.test_sizes
                .iter()
                .flat_map(move |&n| (0..cfg.trials).map(move |t| (s, n, t)))
        })
        .collect();
    let scored: Vec<Vec<(f64, f64, f64)>> = cases
        .par_iter()
        .map(|&(seed, size, trial)| {
            let case = generate_fs(
                size,
                &cfg.fs,
                derive_seed(seed, &[TAG_TEST, size as u64, trial as u64]),
            )
            .map(|w| {
                let split = derive_seed(seed, &[TAG_SPLIT, size as u64, trial as u64]);
                let (evidence, truth) = make_evidence(&w.database, cfg.evidence_fraction, split);
                TestCase {
                    seed,
                    size,
                    trial,
                    evidence,
                    truth,
                }
            });
            let seed_pos = cfg.seeds.iter().position(|&s| s == seed).unwrap();
            cfg.methods
                .iter()
                .enumerate()
                .map(|(mi, mode)| {
                    let model = match (&case, &learned[seed_pos * cfg.methods.len() + mi]) {
                        (Ok(_), Ok(m)) => m,
                        (Err(e), _) | (_, Err(e)) => {
                            log::warn!("seed {seed} {mode} size {size} trial {trial} failed: {e}");
                            return (f64::NAN, f64::NAN, f64::NAN);
                        }
                    };
                    let case = case.as_ref().unwrap();
                    match infer(model, case, cfg) {
                        Ok(scores) => (
                            auc_of(&scores, &case.truth, None),
                            auc_of(&scores, &case.truth, Some("Cancer")),
                            auc_of(&scores, &case.truth, Some("Smokes")),
                        ),
                        Err(e) => {
                            log::warn!("seed {seed} {mode} size {size} trial {trial} failed: {e}");
                            (f64::NAN, f64::NAN, f64::NAN)
                        }
                    }
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(cases.len() * cfg.methods.len());
    for &seed in &cfg.seeds {
        for (mi, &method) in cfg.methods.iter().enumerate() {
            for (ci, &(s, size, trial)) in cases.iter().enumerate() {
                if s != seed {
                    continue;
                }
                let (auc_all, auc_cancer, auc_smokes) = scored[ci][mi];
                rows.push(ResultRow {
                    method,
                    aggregator: cfg.aggregator,
                    train_sizes: cfg.train_sizes.clone(),
                    test_size: size,
                    trial,
                    seed,
                    auc_all,
                    auc_cancer,
                    auc_smokes,
                });
            }
        }
    }
    Ok(rows)
}

/// Mean overall AUC of `method` at `test_size`, ignoring undefined trials.
pub fn mean_auc(rows: &[ResultRow], method: Mode, test_size: usize) -> f64 {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method && r.test_size == test_size && !r.auc_all.is_nan())
        .map(|r| r.auc_all)
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// Whitespace-separated table of mean AUC per test size, one column per
/// method, for gnuplot.
pub fn write_gnuplot(rows: &[ResultRow], mut sink: impl Write) -> Result<(), OutputError> {
    let ctx = |source| OutputError {
        context: "writing gnuplot data".into(),
        source,
    };
    let mut methods: Vec<Mode> = Vec::new();
    let mut sizes: BTreeSet<usize> = BTreeSet::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
        sizes.insert(r.test_size);
    }
    let names: Vec<String> = methods.iter().map(|m| m.to_string()).collect();
    writeln!(sink, "# test_size {}", names.join(" ")).map_err(ctx)?;
    for size in sizes {
        write!(sink, "{size}").map_err(ctx)?;
        for &m in &methods {
            write!(sink, " {:.6}", mean_auc(rows, m, size)).map_err(ctx)?;
        }
        writeln!(sink).map_err(ctx)?;
    }
    sink.flush().map_err(ctx)
}
