//! Weight learning by penalized pseudo-log-likelihood.
//!
//! Every training database is grounded over its own domains, so each formula
//! weight enters database `d` as `w_i / s_i(d)`. For a ground atom `a` with
//! observed value `x_a`, let `D_a = sum_i (w_i / s_i(d)) * delta_ai`, where
//! `delta_ai` is the change in the number of true groundings of formula `i`
//! (among `a`'s features) when `a` goes from false to true. Then
//! `log P(x_a | rest) = x_a * D_a - softplus(D_a)`. The `delta` vectors do not
//! depend on the weights and are computed once, with identical
//! `(delta, x_a)` pairs merged.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::grounder::{ground_network, Aggregator, GroundError, GroundOptions, Mode};
use crate::inference::World;
use crate::io::{Database, Model, Settings};
use crate::logic::{LogicError, Signature};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("no training databases")]
    NoDatabases,
    #[error("expected {expected} weights, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("non-finite objective at iteration {iteration}{}", component.map(|c| format!(" (gradient component {c})")).unwrap_or_default())]
    NonFiniteObjective {
        iteration: usize,
        component: Option<usize>,
    },
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
}

/// One training database with the signature it is grounded over.
#[derive(Debug, Clone)]
pub struct TrainingDb {
    pub database: Database,
    pub signature: Signature,
}

#[derive(Debug, Clone, Default)]
pub struct TrainingSet {
    pub databases: Vec<TrainingDb>,
}

impl TrainingSet {
    /// Each database is completed under the closed-world assumption.
    pub fn new(model: &Model, databases: Vec<Database>) -> Result<TrainingSet, LearnError> {
        let databases = databases
            .into_iter()
            .map(|database| {
                let signature = database.signature(model)?;
                Ok(TrainingDb {
                    database,
                    signature,
                })
            })
            .collect::<Result<Vec<_>, LearnError>>()?;
        Ok(TrainingSet { databases })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Optimizer {
    #[default]
    ConjugateGradient,
    GradientAscent,
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimizer::ConjugateGradient => "cg",
            Optimizer::GradientAscent => "ascent",
        })
    }
}

impl FromStr for Optimizer {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cg" => Ok(Optimizer::ConjugateGradient),
            "ascent" | "gradient-ascent" => Ok(Optimizer::GradientAscent),
            _ => Err(format!("unknown optimizer `{s}` (expected cg or ascent)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    pub prior_std: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub optimizer: Optimizer,
    pub mode: Mode,
    pub aggregator: Aggregator,
    /// Divide each database's term by its number of ground atoms.
    pub per_db_normalize: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            prior_std: 10.0,
            max_iterations: 100,
            tolerance: 1e-4,
            optimizer: Optimizer::ConjugateGradient,
            mode: Mode::DaMln,
            aggregator: Aggregator::Max,
            per_db_normalize: false,
        }
    }
}

impl LearnConfig {
    fn validate(&self) -> Result<(), LearnError> {
        if !(self.prior_std > 0.0 && self.prior_std.is_finite()) {
            return Err(LearnError::InvalidConfig(
                "prior_std must be positive".into(),
            ));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(LearnError::InvalidConfig(
                "tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Atoms sharing the same sparse delta vector and observed value.
#[derive(Debug, Clone)]
struct AtomGroup {
    deltas: Vec<(usize, f64)>,
    observed: bool,
    count: f64,
}

#[derive(Debug, Clone)]
struct DbTerm {
    scales: Vec<f64>,
    groups: Vec<AtomGroup>,
    norm: f64,
}

/// Precomputed pseudo-log-likelihood over a training set.
#[derive(Debug, Clone)]
pub struct PllObjective {
    terms: Vec<DbTerm>,
    n_weights: usize,
    prior_var: f64,
}

#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl PllObjective {
    pub fn new(
        model: &Model,
        ts: &TrainingSet,
        cfg: &LearnConfig,
    ) -> Result<PllObjective, LearnError> {
        cfg.validate()?;
        let model = model.with_settings(Settings {
            mode: cfg.mode,
            aggregator: cfg.aggregator,
        });
        let n = model.formulas.len();
        let mut terms = Vec::with_capacity(ts.databases.len());
        for tdb in &ts.databases {
            let net = ground_network(
                &model,
                &tdb.signature,
                &Database::default(),
                &BTreeSet::new(),
                &GroundOptions::default(),
            )?;
            let world = World::from_assignment(&net, &tdb.database.literals);
            let values = world.values();
            let mut groups: HashMap<(Vec<(usize, i64)>, bool), u64> = HashMap::new();
            let mut delta = vec![0i64; n];
            for id in 0..net.num_atoms() {
                let mut touched = Vec::new();
                for &fid in net.features_of(id) {
                    let lanes = net.feature_lanes(fid as usize, values, id as u32);
                    let d = ((lanes >> 1) & 1) as i64 - (lanes & 1) as i64;
                    if d != 0 {
                        let i = net.features()[fid as usize].formula as usize;
                        if delta[i] == 0 {
                            touched.push(i);
                        }
                        delta[i] += d;
                    }
                }
                touched.sort_unstable();
                let key: Vec<(usize, i64)> = touched
                    .iter()
                    .filter(|&&i| delta[i] != 0)
                    .map(|&i| (i, delta[i]))
                    .collect();
                for &i in &touched {
                    delta[i] = 0;
                }
                *groups.entry((key, values[id])).or_default() += 1;
            }
            let mut groups: Vec<AtomGroup> = groups
                .into_iter()
                .map(|((deltas, observed), count)| AtomGroup {
                    deltas: deltas.into_iter().map(|(i, d)| (i, d as f64)).collect(),
                    observed,
                    count: count as f64,
                })
                .collect();
            // HashMap order is not stable; keep summation order deterministic.
            groups.sort_by(|a, b| {
                a.deltas
                    .iter()
                    .map(|&(i, d)| (i, d as i64))
                    .cmp(b.deltas.iter().map(|&(i, d)| (i, d as i64)))
                    .then(a.observed.cmp(&b.observed))
            });
            let norm = if cfg.per_db_normalize {
                1.0 / net.num_atoms().max(1) as f64
            } else {
                1.0
            };
            terms.push(DbTerm {
                scales: net.scales().iter().map(|s| s.scale).collect(),
                groups,
                norm,
            });
        }
        Ok(PllObjective {
            terms,
            n_weights: n,
            prior_var: cfg.prior_std * cfg.prior_std,
        })
    }

    pub fn num_weights(&self) -> usize {
        self.n_weights
    }

    /// Scaling factor applied to each formula in each database.
    pub fn scales(&self) -> Vec<Vec<f64>> {
        self.terms.iter().map(|t| t.scales.clone()).collect()
    }

    fn check(&self, w: &[f64]) -> Result<(), LearnError> {
        if w.len() != self.n_weights {
            return Err(LearnError::WeightCount {
                expected: self.n_weights,
                found: w.len(),
            });
        }
        Ok(())
    }

    pub fn value(&self, w: &[f64]) -> Result<f64, LearnError> {
        self.check(w)?;
        Ok(self.value_and_gradient(w, false).0)
    }

    pub fn gradient(&self, w: &[f64]) -> Result<Vec<f64>, LearnError> {
        self.check(w)?;
        Ok(self.value_and_gradient(w, true).1)
    }

    fn value_and_gradient(&self, w: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let mut value = 0.0;
        let mut grad = vec![0.0; self.n_weights];
        let mut eff = vec![0.0; self.n_weights];
        for term in &self.terms {
            for (e, (wi, s)) in eff.iter_mut().zip(w.iter().zip(&term.scales)) {
                *e = wi / s;
            }
            let mut tv = 0.0;
            for g in &term.groups {
                let d: f64 = g.deltas.iter().map(|&(i, delta)| eff[i] * delta).sum();
                let x = if g.observed { 1.0 } else { 0.0 };
                tv += g.count * (x * d - softplus(d));
                if want_grad {
                    let r = g.count * term.norm * (x - sigmoid(d));
                    for &(i, delta) in &g.deltas {
                        grad[i] += r * delta / term.scales[i];
                    }
                }
            }
            value += term.norm * tv;
        }
        for (i, wi) in w.iter().enumerate() {
            value -= wi * wi / (2.0 * self.prior_var);
            grad[i] -= wi / self.prior_var;
        }
        (value, grad)
    }
}

impl PllObjective {
    /// First and second derivative of the objective along `dir` at `w`.
    fn directional(&self, w: &[f64], dir: &[f64]) -> (f64, f64) {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        let mut eff = vec![0.0; self.n_weights];
        let mut eff_dir = vec![0.0; self.n_weights];
        for term in &self.terms {
            for i in 0..self.n_weights {
                eff[i] = w[i] / term.scales[i];
                eff_dir[i] = dir[i] / term.scales[i];
            }
            for g in &term.groups {
                let (d, dd) = g.deltas.iter().fold((0.0, 0.0), |(a, b), &(i, delta)| {
                    (a + eff[i] * delta, b + eff_dir[i] * delta)
                });
                let x = if g.observed { 1.0 } else { 0.0 };
                let p = sigmoid(d);
                d1 += g.count * term.norm * (x - p) * dd;
                d2 -= g.count * term.norm * p * (1.0 - p) * dd * dd;
            }
        }
        for i in 0..self.n_weights {
            d1 -= w[i] * dir[i] / self.prior_var;
            d2 -= dir[i] * dir[i] / self.prior_var;
        }
        (d1, d2)
    }

    /// Negated diagonal of the Hessian (positive: the objective is concave).
    fn curvature(&self, w: &[f64]) -> Vec<f64> {
        let mut h = vec![1.0 / self.prior_var; self.n_weights];
        let mut eff = vec![0.0; self.n_weights];
        for term in &self.terms {
            for i in 0..self.n_weights {
                eff[i] = w[i] / term.scales[i];
            }
            for g in &term.groups {
                let d: f64 = g.deltas.iter().map(|&(i, delta)| eff[i] * delta).sum();
                let p = sigmoid(d);
                let c = g.count * term.norm * p * (1.0 - p);
                for &(i, delta) in &g.deltas {
                    let v = delta / term.scales[i];
                    h[i] += c * v * v;
                }
            }
        }
        h
    }

    /// Maximizes the (concave) objective along `dir` from `w`; returns the
    /// step length. Newton steps on the directional derivative, kept inside
    /// a bracket where it changes sign.
    fn line_search(&self, w: &[f64], dir: &[f64]) -> f64 {
        let at = |t: f64| -> Vec<f64> { w.iter().zip(dir).map(|(x, d)| x + t * d).collect() };
        let (slope0, _) = self.directional(w, dir);
        if slope0.is_nan() || slope0 <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = f64::INFINITY;
        let mut t = 0.0;
        for _ in 0..LINE_SEARCH_STEPS {
            let (d1, d2) = self.directional(&at(t), dir);
            if !d1.is_finite() {
                hi = t;
            } else if d1 > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if d1.is_finite() && d1.abs() <= 1e-12 * slope0.max(1.0) {
                break;
            }
            let newton = if d1.is_finite() && d2 < 0.0 {
                t - d1 / d2
            } else {
                f64::NAN
            };
            t = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * lo.max(1e-8)
            };
            if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                break;
            }
        }
        t
    }
}

pub fn pll(
    model: &Model,
    ts: &TrainingSet,
    w: &[f64],
    cfg: &LearnConfig,
) -> Result<f64, LearnError> {
    PllObjective::new(model, ts, cfg)?.value(w)
}

pub fn pll_gradient(
    model: &Model,
    ts: &TrainingSet,
    w: &[f64],
    cfg: &LearnConfig,
) -> Result<Vec<f64>, LearnError> {
    PllObjective::new(model, ts, cfg)?.gradient(w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnResult {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub converged: bool,
    pub trace: Vec<TraceRecord>,
}

fn inf_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const LINE_SEARCH_STEPS: usize = 60;

/// Maximizes the PLL starting from the model's weights.
pub fn learn_weights(
    model: &Model,
    ts: &TrainingSet,
    cfg: &LearnConfig,
) -> Result<LearnResult, LearnError> {
    if ts.databases.is_empty() {
        return Err(LearnError::NoDatabases);
    }
    let objective = PllObjective::new(model, ts, cfg)?;
    maximize(&objective, model.weights(), cfg)
}

/// Polak-Ribiere conjugate gradient (or plain gradient ascent) with an
/// Armijo backtracking line search.
pub fn maximize(
    obj: &PllObjective,
    start: Vec<f64>,
    cfg: &LearnConfig,
) -> Result<LearnResult, LearnError> {
    cfg.validate()?;
    obj.check(&start)?;
    let eval = |w: &[f64], iteration: usize| -> Result<(f64, Vec<f64>), LearnError> {
        let (v, g) = obj.value_and_gradient(w, true);
        if !v.is_finite() {
            return Err(LearnError::NonFiniteObjective {
                iteration,
                component: w.iter().position(|x| !x.is_finite()),
            });
        }
        if let Some(c) = g.iter().position(|x| !x.is_finite()) {
            return Err(LearnError::NonFiniteObjective {
                iteration,
                component: Some(c),
            });
        }
        Ok((v, g))
    };

    let mut w = start;
    let (mut f, mut g) = eval(&w, 0)?;
    let mut trace = vec![TraceRecord {
        iteration: 0,
        objective: f,
        grad_norm: inf_norm(&g),
        step: 0.0,
    }];
    // Jacobi-preconditioned ascent direction; plain gradient for the
    // reference ascent optimizer.
    let precondition = |w: &[f64], g: &[f64]| -> Vec<f64> {
        match cfg.optimizer {
            Optimizer::GradientAscent => g.to_vec(),
            Optimizer::ConjugateGradient => obj
                .curvature(w)
                .iter()
                .zip(g)
                .map(|(h, gi)| gi / h)
                .collect(),
        }
    };
    let mut z = precondition(&w, &g);
    let mut dir = z.clone();
    let mut converged = inf_norm(&g) <= cfg.tolerance;

    let mut iteration = 0;
    while !converged && iteration < cfg.max_iterations {
        iteration += 1;
        let mut slope = dot(&g, &dir);
        if slope <= 0.0 {
            dir = z.clone();
            slope = dot(&g, &dir);
        }
        let exact = obj.line_search(&w, &dir);
        let mut step = if exact > 0.0 {
            exact
        } else {
            1.0 / inf_norm(&dir).max(1.0)
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = w.iter().zip(&dir).map(|(x, d)| x + step * d).collect();
            let (ft, gt) = obj.value_and_gradient(&trial, true);
            if ft.is_finite() && ft >= f + ARMIJO_C * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((w_new, f_new, g_new)) = accepted else {
            if dir != z {
                // restart along the preconditioned gradient before giving up
                dir = z.clone();
                continue;
            }
            log::debug!("line search failed at iteration {iteration}; stopping");
            break;
        };
        let (f_new, g_new) = if g_new.iter().all(|x| x.is_finite()) {
            (f_new, g_new)
        } else {
            eval(&w_new, iteration)?
        };

        let z_new = precondition(&w_new, &g_new);
        let beta = match cfg.optimizer {
            Optimizer::GradientAscent => 0.0,
            Optimizer::ConjugateGradient => {
                // Polak–Ribière+
                let denom = dot(&z, &g);
                if denom > 0.0 {
                    let diff: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                    (dot(&z_new, &diff) / denom).max(0.0)
                } else {
                    0.0
                }
            }
        };
        let restart = iteration % obj.n_weights.max(1) == 0;
        dir = z_new
            .iter()
            .zip(&dir)
            .map(|(zn, d)| if restart { *zn } else { zn + beta * d })
            .collect();
        z = z_new;
        w = w_new;
        f = f_new;
        g = g_new;
        let grad_norm = inf_norm(&g);
        trace.push(TraceRecord {
            iteration,
            objective: f,
            grad_norm,
            step,
        });
        converged = grad_norm <= cfg.tolerance;
    }

    Ok(LearnResult {
        weights: w,
        objective: f,
        converged,
        trace,
    })
}
