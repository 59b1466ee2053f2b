//! Marginal inference over a ground network: Gibbs sampling, and exact
//! enumeration for small networks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::grounder::{log_unnormalized_weight, GroundNetwork};
use crate::logic::{Assignment, GroundAtom};

pub const DEFAULT_EXACT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("{0} is an evidence atom")]
    EvidenceAtom(String),
    #[error("{0} is not an atom of the network")]
    UnknownAtom(String),
    #[error("network has no query atoms")]
    NoQueryAtoms,
    #[error("{atoms} free atoms exceeds exact cap of {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },
    #[error("invalid sampler parameters: {0}")]
    InvalidParams(String),
}

/// Truth assignment to every atom of one network, with evidence frozen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    values: Vec<bool>,
    evidence: Vec<bool>,
}

impl World {
    /// Evidence atoms at their observed values, free atoms false.
    pub fn new(net: &GroundNetwork) -> World {
        let n = net.num_atoms();
        let mut values = vec![false; n];
        let mut evidence = vec![false; n];
        for id in 0..n {
            if let Some(v) = net.evidence_value(id) {
                values[id] = v;
                evidence[id] = true;
            }
        }
        World { values, evidence }
    }

    /// Free atoms take their value from `source`; atoms it does not mention
    /// are false.
    pub fn from_assignment(net: &GroundNetwork, source: &impl Assignment) -> World {
        let mut w = World::new(net);
        for &id in net.free_atoms() {
            let id = id as usize;
            w.values[id] = source.truth(&net.atom(id)).unwrap_or(false);
        }
        w
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, id: usize) -> bool {
        self.values[id]
    }

    pub fn is_evidence(&self, id: usize) -> bool {
        self.evidence[id]
    }

    pub fn set(&mut self, id: usize, value: bool) -> Result<(), InferenceError> {
        if self.evidence[id] {
            return Err(InferenceError::EvidenceAtom(format!("atom #{id}")));
        }
        self.values[id] = value;
        Ok(())
    }
}

/// Query atom -> probability of truth.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarginalTable(BTreeMap<GroundAtom, f64>);

impl MarginalTable {
    pub fn insert(&mut self, atom: GroundAtom, p: f64) {
        debug_assert!((0.0..=1.0).contains(&p));
        self.0.insert(atom, p);
    }

    pub fn get(&self, atom: &GroundAtom) -> Option<f64> {
        self.0.get(atom).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroundAtom, &f64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub marginals: MarginalTable,
    pub log_partition: f64,
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

/// `(S+ - S-)`: log-odds of atom `id` being true given the rest of `values`.
/// Only features indexed under the atom are visited.
#[inline]
pub(crate) fn log_odds(net: &GroundNetwork, id: u32, values: &[bool]) -> f64 {
    let mut diff = 0.0;
    for &fid in net.features_of(id as usize) {
        let lanes = net.feature_lanes(fid as usize, values, id);
        let t = (lanes >> 1) & 1;
        let f = lanes & 1;
        if t != f {
            let w = net.feature_weight(fid as usize);
            diff += if t == 1 { w } else { -w };
        }
    }
    diff
}

/// P(atom = true | every other atom of `world`).
pub fn conditional_probability(
    net: &GroundNetwork,
    atom: &GroundAtom,
    world: &World,
) -> Result<f64, InferenceError> {
    let id = net
        .atom_id(atom)
        .ok_or_else(|| InferenceError::UnknownAtom(atom.to_string()))?;
    if net.evidence_value(id).is_some() {
        return Err(InferenceError::EvidenceAtom(atom.to_string()));
    }
    Ok(sigmoid(log_odds(net, id as u32, world.values())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GibbsParams {
    pub chains: usize,
    pub burn_in: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for GibbsParams {
    fn default() -> Self {
        GibbsParams {
            chains: 3,
            burn_in: 1000,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Gibbs estimates of every query atom's marginal.
///
/// Chains start from independent uniform random states of the free atoms and
/// update them in ascending id order once per sweep. Chain `c` draws from a
/// ChaCha stream seeded with `seed + c`.
pub fn gibbs_marginals(
    net: &GroundNetwork,
    params: &GibbsParams,
) -> Result<MarginalTable, InferenceError> {
    if params.chains == 0 || params.samples == 0 {
        return Err(InferenceError::InvalidParams(
            "chains and samples must be positive".into(),
        ));
    }
    let query = net.query_atoms();
    if query.is_empty() {
        return Err(InferenceError::NoQueryAtoms);
    }
    // Only atoms with features need sampling.
    let active: Vec<u32> = net
        .free_atoms()
        .iter()
        .copied()
        .filter(|&a| !net.features_of(a as usize).is_empty())
        .collect();
    let base = World::new(net);

    let counts: Vec<Vec<u64>> = (0..params.chains)
        .into_par_iter()
        .map(|chain| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(chain as u64));
            let mut values = base.values.clone();
            for &a in net.free_atoms() {
                values[a as usize] = rng.gen_bool(0.5);
            }
            let mut counts = vec![0u64; query.len()];
            for sweep in 0..params.burn_in + params.samples {
                for &a in &active {
                    let p = sigmoid(log_odds(net, a, &values));
                    values[a as usize] = rng.gen::<f64>() < p;
                }
                if sweep >= params.burn_in {
                    for (c, &q) in counts.iter_mut().zip(query) {
                        *c += values[q as usize] as u64;
                    }
                }
            }
            counts
        })
        .collect();

    let total = (params.chains * params.samples) as f64;
    let mut table = MarginalTable::default();
    for (k, &q) in query.iter().enumerate() {
        let p = if net.features_of(q as usize).is_empty() {
            0.5
        } else {
            counts.iter().map(|c| c[k]).sum::<u64>() as f64 / total
        };
        table.insert(net.atom(q as usize), p);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactParams {
    pub max_atoms: usize,
}

impl Default for ExactParams {
    fn default() -> Self {
        ExactParams {
            max_atoms: DEFAULT_EXACT_CAP,
        }
    }
}

/// Marginals and log Z by enumerating every assignment of the free atoms.
///
/// Assignments are visited in Gray-code order so each step flips a single
/// atom and only its features are re-evaluated.
pub fn exact_marginals(
    net: &GroundNetwork,
    params: &ExactParams,
) -> Result<ExactResult, InferenceError> {
    let free = net.free_atoms();
    let k = free.len();
    if k > params.max_atoms || k >= 63 {
        return Err(InferenceError::TooManyAtoms {
            atoms: k,
            cap: params.max_atoms,
        });
    }
    let mut world = World::new(net);
    let full = |w: &World| log_unnormalized_weight(net, w).expect("world built from net");
    let mut lw = full(&world);
    let mut max_lw = lw;
    let mut z = 1.0f64;
    let mut acc = vec![0.0f64; k];
    let mut gray = 0u64;

    for step in 1u64..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        let atom = free[bit];
        let d = log_odds(net, atom, &world.values);
        let now_true = !world.values[atom as usize];
        world.values[atom as usize] = now_true;
        gray ^= 1 << bit;
        lw += if now_true { d } else { -d };
        if step % 65_536 == 0 {
            lw = full(&world);
        }
        if lw > max_lw {
            let scale = (max_lw - lw).exp();
            z *= scale;
            acc.iter_mut().for_each(|a| *a *= scale);
            max_lw = lw;
        }
        let e = (lw - max_lw).exp();
        z += e;
        let mut bits = gray;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            acc[j] += e;
            bits &= bits - 1;
        }
    }

    let mut marginals = MarginalTable::default();
    for &q in net.query_atoms() {
        let j = free.binary_search(&q).expect("query atoms are free");
        marginals.insert(net.atom(q as usize), (acc[j] / z).clamp(0.0, 1.0));
    }
    Ok(ExactResult {
        marginals,
        log_partition: max_lw + z.ln(),
    })
}
