//! Connection vectors, scaling-down factors and ground network construction.
//!
//! Each formula's weight is divided by a scaling factor derived from the
//! current domain sizes before it is attached to ground features. In
//! [`Mode::Mln`] every factor is 1 and the network is an ordinary MLN.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::inference::World;
use crate::io::{Database, Model};
use crate::logic::{free_variables, Assignment, Formula, GroundAtom, LogicError, Signature, Term};

/// Default cap on the estimated size of a ground network.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

const MAX_EXPR_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("no size known for domain `{0}`")]
    UnknownDomainSize(String),
    #[error("connection vector is empty")]
    EmptyVector,
    #[error("domain `{0}` has no constants")]
    DomainEmpty(String),
    #[error("grounding needs an estimated {estimate} bytes, over the {budget}-byte memory budget")]
    MemoryBudgetExceeded { estimate: u64, budget: u64 },
    #[error("formula {0} nests too deeply to compile")]
    FormulaTooDeep(usize),
    #[error("formula {formula} has {atoms} atom occurrences; at most 65535 are supported")]
    FormulaTooLarge { formula: usize, atoms: usize },
    #[error("evidence atom {0} is not part of the ground network")]
    UnknownEvidenceAtom(String),
    #[error("world has {found} atoms, network has {expected}")]
    WorldMismatch { expected: usize, found: usize },
    #[error("expected {expected} scaling factors, got {found}")]
    ScaleCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    DaMln,
    Mln,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::DaMln => "damln",
            Mode::Mln => "mln",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "damln" => Ok(Mode::DaMln),
            "mln" => Ok(Mode::Mln),
            _ => Err(format!("unknown mode `{s}` (expected damln or mln)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Aggregator {
    #[default]
    Max,
    Sum,
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregator::Max => "max",
            Aggregator::Sum => "sum",
        })
    }
}

impl FromStr for Aggregator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Aggregator::Max),
            "sum" => Ok(Aggregator::Sum),
            _ => Err(format!("unknown aggregator `{s}` (expected max or sum)")),
        }
    }
}

/// Per-atom-occurrence connection counts of a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionVector(pub Vec<u64>);

impl ConnectionVector {
    pub fn entries(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingFactor {
    pub value: u64,
    pub aggregator: Aggregator,
}

/// Entry `j` is `max(1, prod |D_x|)` over the formula's variables that do not
/// occur in atom occurrence `j`. Each variable counts once.
pub fn connection_vector(
    f: &Formula,
    sig: &Signature,
    sizes: &BTreeMap<String, u64>,
) -> Result<ConnectionVector, GroundError> {
    let vars = free_variables(f, sig)?;
    let mut sized = Vec::with_capacity(vars.len());
    for (name, ty) in &vars {
        let size = *sizes
            .get(ty)
            .ok_or_else(|| GroundError::UnknownDomainSize(ty.clone()))?;
        sized.push((name.as_str(), size));
    }
    let entries = f
        .atoms()
        .iter()
        .map(|atom| {
            let product = sized
                .iter()
                .filter(|(name, _)| {
                    !atom
                        .args
                        .iter()
                        .any(|t| matches!(t, Term::Var(v) if v == name))
                })
                .fold(1u64, |acc, &(_, size)| acc.saturating_mul(size));
            product.max(1)
        })
        .collect();
    Ok(ConnectionVector(entries))
}

pub fn scaling_factor(v: &ConnectionVector, agg: Aggregator) -> Result<ScalingFactor, GroundError> {
    if v.0.is_empty() {
        return Err(GroundError::EmptyVector);
    }
    let value = match agg {
        Aggregator::Max => *v.0.iter().max().unwrap(),
        Aggregator::Sum => v.0.iter().fold(0u64, |a, &b| a.saturating_add(b)),
    };
    Ok(ScalingFactor {
        value: value.max(1),
        aggregator: agg,
    })
}

// ---------------------------------------------------------------------------
// Compiled formulas

/// Two-lane truth values: bit 0 is the value with the focus atom false,
/// bit 1 with it true. A plain evaluation uses `0b00` / `0b11`.
pub(crate) const LANES: u8 = 0b11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Leaf(u16),
    Not,
    And,
    Or,
    Implies,
    Iff,
}

/// Postfix program over atom occurrences.
#[derive(Debug, Clone)]
pub(crate) struct Program {
    ops: Vec<Op>,
}

impl Program {
    fn compile(f: &Formula) -> Program {
        fn go(f: &Formula, ops: &mut Vec<Op>, next: &mut u16) {
            match f {
                Formula::Atom(_) => {
                    ops.push(Op::Leaf(*next));
                    *next += 1;
                }
                Formula::Not(x) => {
                    go(x, ops, next);
                    ops.push(Op::Not);
                }
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Iff(a, b) => {
                    go(a, ops, next);
                    go(b, ops, next);
                    ops.push(match f {
                        Formula::And(..) => Op::And,
                        Formula::Or(..) => Op::Or,
                        Formula::Implies(..) => Op::Implies,
                        _ => Op::Iff,
                    });
                }
            }
        }
        let mut ops = Vec::new();
        go(f, &mut ops, &mut 0);
        Program { ops }
    }

    /// Evaluates with lane-packed leaves.
    #[inline]
    pub(crate) fn eval_lanes(&self, mut leaf: impl FnMut(usize) -> u8) -> u8 {
        let mut stack = [0u8; MAX_EXPR_DEPTH];
        let mut top = 0usize;
        for op in &self.ops {
            match *op {
                Op::Leaf(i) => {
                    stack[top] = leaf(i as usize);
                    top += 1;
                }
                Op::Not => stack[top - 1] ^= LANES,
                _ => {
                    let b = stack[top - 1];
                    let a = stack[top - 2];
                    top -= 1;
                    stack[top - 1] = match *op {
                        Op::And => a & b,
                        Op::Or => a | b,
                        Op::Implies => (a ^ LANES) | b,
                        _ => (a ^ b) ^ LANES,
                    };
                }
            }
        }
        stack[0]
    }

    pub(crate) fn eval(&self, mut leaf: impl FnMut(usize) -> bool) -> bool {
        self.eval_lanes(|i| if leaf(i) { LANES } else { 0 }) & 1 == 1
    }

    /// Kleene three-valued evaluation.
    fn eval3(&self, leaf: impl Fn(usize) -> Option<bool>) -> Option<bool> {
        let mut stack: Vec<Option<bool>> = Vec::with_capacity(8);
        for op in &self.ops {
            match *op {
                Op::Leaf(i) => stack.push(leaf(i as usize)),
                Op::Not => {
                    let a = stack.pop().unwrap();
                    stack.push(a.map(|v| !v));
                }
                _ => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    stack.push(match *op {
                        Op::And => match (a, b) {
                            (Some(false), _) | (_, Some(false)) => Some(false),
                            (Some(true), Some(true)) => Some(true),
                            _ => None,
                        },
                        Op::Or => match (a, b) {
                            (Some(true), _) | (_, Some(true)) => Some(true),
                            (Some(false), Some(false)) => Some(false),
                            _ => None,
                        },
                        Op::Implies => match (a, b) {
                            (Some(false), _) | (_, Some(true)) => Some(true),
                            (Some(true), Some(false)) => Some(false),
                            _ => None,
                        },
                        _ => match (a, b) {
                            (Some(x), Some(y)) => Some(x == y),
                            _ => None,
                        },
                    });
                }
            }
        }
        stack[0]
    }

    fn stack_depth(&self) -> usize {
        let (mut depth, mut max) = (0usize, 0usize);
        for op in &self.ops {
            match op {
                Op::Leaf(_) => depth += 1,
                Op::Not => {}
                _ => depth -= 1,
            }
            max = max.max(depth);
        }
        max
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(usize),
}

#[derive(Debug, Clone)]
struct Occurrence {
    predicate: usize,
    args: Vec<Slot>,
}

/// A formula resolved against a concrete signature.
#[derive(Debug, Clone)]
pub(crate) struct Template {
    var_sizes: Vec<usize>,
    occurrences: Vec<Occurrence>,
    pub(crate) program: Program,
}

impl Template {
    fn compile(index: usize, f: &Formula, sig: &Signature) -> Result<Template, GroundError> {
        let vars = free_variables(f, sig)?;
        let mut var_sizes = Vec::with_capacity(vars.len());
        for (_, ty) in &vars {
            let d = sig
                .domain(ty)
                .ok_or_else(|| LogicError::UnknownDomain(ty.clone()))?;
            var_sizes.push(d.len());
        }
        let mut occurrences = Vec::new();
        for atom in f.atoms() {
            let predicate = sig
                .predicate_index(&atom.predicate)
                .ok_or_else(|| LogicError::UnknownPredicate(atom.predicate.clone()))?;
            let schema = &sig.predicates()[predicate];
            let mut args = Vec::with_capacity(atom.args.len());
            for (term, ty) in atom.args.iter().zip(&schema.arg_types) {
                args.push(match term {
                    Term::Var(v) => Slot::Var(vars.iter().position(|(n, _)| n == v).unwrap()),
                    Term::Const(c) => {
                        let domain = sig.domain(ty).unwrap();
                        let pos =
                            domain
                                .constants
                                .iter()
                                .position(|k| k == c)
                                .ok_or_else(|| LogicError::WrongDomainConstant {
                                    variable: String::new(),
                                    constant: c.clone(),
                                    domain: ty.clone(),
                                })?;
                        Slot::Const(pos)
                    }
                });
            }
            occurrences.push(Occurrence { predicate, args });
        }
        if occurrences.len() > usize::from(u16::MAX) {
            return Err(GroundError::FormulaTooLarge {
                formula: index,
                atoms: occurrences.len(),
            });
        }
        let program = Program::compile(f);
        if program.stack_depth() > MAX_EXPR_DEPTH {
            return Err(GroundError::FormulaTooDeep(index));
        }
        Ok(Template {
            var_sizes,
            occurrences,
            program,
        })
    }

    fn groundings(&self) -> u64 {
        self.var_sizes
            .iter()
            .fold(1u64, |a, &s| a.saturating_mul(s as u64))
    }

    /// Calls `visit` with the atom ids of every grounding, in lexicographic
    /// order of the variables' constant indices.
    fn for_each_grounding(&self, space: &AtomSpace, mut visit: impl FnMut(&[u32])) {
        if self.var_sizes.contains(&0) {
            return;
        }
        let mut binding = vec![0usize; self.var_sizes.len()];
        let mut ids = vec![0u32; self.occurrences.len()];
        let mut consts = Vec::new();
        loop {
            for (k, occ) in self.occurrences.iter().enumerate() {
                consts.clear();
                consts.extend(occ.args.iter().map(|s| match *s {
                    Slot::Var(v) => binding[v],
                    Slot::Const(c) => c,
                }));
                ids[k] = space.id(occ.predicate, &consts) as u32;
            }
            visit(&ids);
            // odometer, last variable fastest
            let mut i = binding.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                binding[i] += 1;
                if binding[i] < self.var_sizes[i] {
                    break;
                }
                binding[i] = 0;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Atom indexing

#[derive(Debug, Clone)]
struct PredicateLayout {
    name: String,
    offset: usize,
    domains: Vec<usize>,
    sizes: Vec<usize>,
}

/// Dense numbering of every ground atom of a signature.
#[derive(Debug, Clone)]
pub struct AtomSpace {
    predicates: Vec<PredicateLayout>,
    constants: Vec<Vec<String>>,
    lookup: Vec<HashMap<String, usize>>,
    len: usize,
}

impl AtomSpace {
    pub fn new(sig: &Signature) -> AtomSpace {
        let constants: Vec<Vec<String>> =
            sig.domains().iter().map(|d| d.constants.clone()).collect();
        let lookup = constants
            .iter()
            .map(|cs| cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
            .collect();
        let mut offset = 0usize;
        let mut predicates = Vec::new();
        for p in sig.predicates() {
            let domains: Vec<usize> = p
                .arg_types
                .iter()
                .map(|t| sig.domain_index(t).expect("validated signature"))
                .collect();
            let sizes: Vec<usize> = domains.iter().map(|&d| constants[d].len()).collect();
            let count = sizes.iter().product::<usize>();
            predicates.push(PredicateLayout {
                name: p.name.clone(),
                offset,
                domains,
                sizes,
            });
            offset += count;
        }
        AtomSpace {
            predicates,
            constants,
            lookup,
            len: offset,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn id(&self, predicate: usize, consts: &[usize]) -> usize {
        let layout = &self.predicates[predicate];
        let mut id = 0usize;
        for (c, s) in consts.iter().zip(&layout.sizes) {
            id = id * s + c;
        }
        layout.offset + id
    }

    pub fn lookup(&self, atom: &GroundAtom) -> Option<usize> {
        let p = self
            .predicates
            .iter()
            .position(|l| l.name == atom.predicate)?;
        let layout = &self.predicates[p];
        if layout.domains.len() != atom.args.len() {
            return None;
        }
        let mut consts = Vec::with_capacity(atom.args.len());
        for (arg, &d) in atom.args.iter().zip(&layout.domains) {
            consts.push(*self.lookup[d].get(arg)?);
        }
        Some(self.id(p, &consts))
    }

    pub fn atom(&self, id: usize) -> GroundAtom {
        let p = self
            .predicates
            .iter()
            .rposition(|l| l.offset <= id && (l.sizes.iter().product::<usize>() > 0))
            .expect("atom id in range");
        let layout = &self.predicates[p];
        let mut rest = id - layout.offset;
        let mut args = vec![String::new(); layout.sizes.len()];
        for k in (0..layout.sizes.len()).rev() {
            let c = rest % layout.sizes[k];
            rest /= layout.sizes[k];
            args[k] = self.constants[layout.domains[k]][c].clone();
        }
        GroundAtom::new(layout.name.clone(), args)
    }

    /// Range of atom ids belonging to `predicate`.
    pub fn predicate_range(&self, predicate: &str) -> Option<std::ops::Range<usize>> {
        let layout = self.predicates.iter().find(|l| l.name == predicate)?;
        Some(layout.offset..layout.offset + layout.sizes.iter().product::<usize>())
    }
}

// ---------------------------------------------------------------------------
// Ground network

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaScale {
    pub connection_vector: ConnectionVector,
    /// Divisor actually applied (1 in MLN mode).
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundFeature {
    pub formula: u32,
    /// Atom id per atom occurrence of the formula.
    pub atoms: Box<[u32]>,
}

#[derive(Debug, Clone)]
pub struct GroundOptions {
    pub memory_budget: u64,
    /// Replaces the computed scaling factors, one per formula.
    pub forced_scales: Option<Vec<f64>>,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            memory_budget: DEFAULT_MEMORY_BUDGET,
            forced_scales: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundNetwork {
    pub(crate) space: AtomSpace,
    pub(crate) templates: Vec<Template>,
    weights: Vec<f64>,
    scales: Vec<FormulaScale>,
    pub(crate) effective: Vec<f64>,
    pub(crate) features: Vec<GroundFeature>,
    pub(crate) index: Vec<Vec<u32>>,
    pub(crate) evidence: Vec<Option<bool>>,
    query: Vec<u32>,
    pub(crate) hidden: Vec<u32>,
    pruned_true: Vec<u64>,
    mode: Mode,
    aggregator: Aggregator,
}

/// Grounds `model` over the domains of `sig`.
///
/// Atoms listed in `evidence` are fixed; unlisted atoms of predicates in
/// `evidence.closed_world` are fixed false. The remaining atoms are free, and
/// those of `queries` predicates form the query set. Features whose truth is
/// determined by evidence are dropped and their contribution kept as a
/// per-formula count.
pub fn ground_network(
    model: &Model,
    sig: &Signature,
    evidence: &Database,
    queries: &BTreeSet<String>,
    opts: &GroundOptions,
) -> Result<GroundNetwork, GroundError> {
    let n_formulas = model.formulas.len();
    let mode = model.settings.mode;
    let aggregator = model.settings.aggregator;

    let mut templates = Vec::with_capacity(n_formulas);
    let mut scales = Vec::with_capacity(n_formulas);
    let sizes = sig.sizes();
    for (i, wf) in model.formulas.iter().enumerate() {
        for (_, ty) in free_variables(&wf.formula, sig)? {
            if sig.domain(&ty).is_some_and(|d| d.is_empty()) {
                return Err(GroundError::DomainEmpty(ty));
            }
        }
        let cv = connection_vector(&wf.formula, sig, &sizes)?;
        let s = scaling_factor(&cv, aggregator)?.value as f64;
        let scale = match mode {
            Mode::DaMln => s,
            Mode::Mln => 1.0,
        };
        scales.push(FormulaScale {
            connection_vector: cv,
            scale,
        });
        templates.push(Template::compile(i, &wf.formula, sig)?);
    }
    if let Some(forced) = &opts.forced_scales {
        if forced.len() != n_formulas {
            return Err(GroundError::ScaleCount {
                expected: n_formulas,
                found: forced.len(),
            });
        }
        for (s, &f) in scales.iter_mut().zip(forced) {
            s.scale = f;
        }
    }

    let space = AtomSpace::new(sig);
    let estimate = estimate_bytes(&space, &templates);
    if estimate > opts.memory_budget {
        return Err(GroundError::MemoryBudgetExceeded {
            estimate,
            budget: opts.memory_budget,
        });
    }

    let mut fixed: Vec<Option<bool>> = vec![None; space.len()];
    for pred in &evidence.closed_world {
        if let Some(range) = space.predicate_range(pred) {
            fixed[range].fill(Some(false));
        }
    }
    for (atom, &value) in &evidence.literals {
        let id = space
            .lookup(atom)
            .ok_or_else(|| GroundError::UnknownEvidenceAtom(atom.to_string()))?;
        fixed[id] = Some(value);
    }

    let mut features = Vec::new();
    let mut pruned_true = vec![0u64; n_formulas];
    for (i, t) in templates.iter().enumerate() {
        t.for_each_grounding(&space, |ids| match determined(&t.program, ids, &fixed) {
            Some(true) => pruned_true[i] += 1,
            Some(false) => {}
            None => features.push(GroundFeature {
                formula: i as u32,
                atoms: ids.into(),
            }),
        });
    }

    let mut index: Vec<Vec<u32>> = vec![Vec::new(); space.len()];
    for (fid, feat) in features.iter().enumerate() {
        for (k, &a) in feat.atoms.iter().enumerate() {
            if !feat.atoms[..k].contains(&a) {
                index[a as usize].push(fid as u32);
            }
        }
    }

    let mut query = Vec::new();
    let mut hidden = Vec::new();
    let query_ranges: Vec<_> = queries
        .iter()
        .filter_map(|q| space.predicate_range(q))
        .collect();
    for (id, value) in fixed.iter().enumerate() {
        if value.is_none() {
            hidden.push(id as u32);
            if query_ranges.iter().any(|r| r.contains(&id)) {
                query.push(id as u32);
            }
        }
    }

    let weights: Vec<f64> = model.formulas.iter().map(|f| f.weight).collect();
    let mut net = GroundNetwork {
        space,
        templates,
        weights: Vec::new(),
        scales,
        effective: Vec::new(),
        features,
        index,
        evidence: fixed,
        query,
        hidden,
        pruned_true,
        mode,
        aggregator,
    };
    net.set_weights(&weights);
    Ok(net)
}

fn estimate_bytes(space: &AtomSpace, templates: &[Template]) -> u64 {
    let mut total = space.len() as u64 * 40;
    for t in templates {
        let per = 32 + 8 * t.occurrences.len() as u64;
        total = total.saturating_add(t.groundings().saturating_mul(per));
    }
    total
}

/// Truth value of a grounding if evidence alone fixes it, under Kleene
/// three-valued evaluation (free atoms unknown).
fn determined(program: &Program, ids: &[u32], fixed: &[Option<bool>]) -> Option<bool> {
    program.eval3(|k| fixed[ids[k] as usize])
}

impl GroundNetwork {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn aggregator(&self) -> Aggregator {
        self.aggregator
    }

    pub fn atom_space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn num_atoms(&self) -> usize {
        self.space.len()
    }

    pub fn features(&self) -> &[GroundFeature] {
        &self.features
    }

    pub fn scales(&self) -> &[FormulaScale] {
        &self.scales
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_i / s_i` per formula.
    pub fn effective_weights(&self) -> &[f64] {
        &self.effective
    }

    pub fn feature_weight(&self, feature: usize) -> f64 {
        self.effective[self.features[feature].formula as usize]
    }

    /// Replaces the raw formula weights; scaling factors are kept.
    pub fn set_weights(&mut self, weights: &[f64]) {
        assert_eq!(weights.len(), self.scales.len(), "one weight per formula");
        self.weights = weights.to_vec();
        self.effective = weights
            .iter()
            .zip(&self.scales)
            .map(|(w, s)| w / s.scale)
            .collect();
    }

    /// Ids of features containing atom `id`.
    pub fn features_of(&self, id: usize) -> &[u32] {
        &self.index[id]
    }

    pub fn evidence_value(&self, id: usize) -> Option<bool> {
        self.evidence[id]
    }

    /// Non-evidence atoms of the query predicates, ascending.
    pub fn query_atoms(&self) -> &[u32] {
        &self.query
    }

    /// All non-evidence atoms, ascending.
    pub fn free_atoms(&self) -> &[u32] {
        &self.hidden
    }

    pub fn atom(&self, id: usize) -> GroundAtom {
        self.space.atom(id)
    }

    pub fn atom_id(&self, atom: &GroundAtom) -> Option<usize> {
        self.space.lookup(atom)
    }

    /// Log-weight contributed by features dropped during grounding.
    pub fn pruned_log_weight(&self) -> f64 {
        self.pruned_true
            .iter()
            .zip(&self.effective)
            .map(|(&n, w)| n as f64 * w)
            .sum()
    }

    pub fn pruned_true_counts(&self) -> &[u64] {
        &self.pruned_true
    }

    #[inline]
    pub(crate) fn feature_true(&self, fid: usize, values: &[bool]) -> bool {
        let feat = &self.features[fid];
        self.templates[feat.formula as usize]
            .program
            .eval(|k| values[feat.atoms[k] as usize])
    }

    /// Lane-packed truth of a feature with `focus` forced both ways.
    #[inline]
    pub(crate) fn feature_lanes(&self, fid: usize, values: &[bool], focus: u32) -> u8 {
        let feat = &self.features[fid];
        self.templates[feat.formula as usize]
            .program
            .eval_lanes(|k| {
                let a = feat.atoms[k];
                if a == focus {
                    0b10
                } else if values[a as usize] {
                    LANES
                } else {
                    0
                }
            })
    }
}

/// `sum_i (w_i / s_i) * n_i(world)`, including pruned features.
pub fn log_unnormalized_weight(net: &GroundNetwork, world: &World) -> Result<f64, GroundError> {
    let values = world.values();
    if values.len() != net.num_atoms() {
        return Err(GroundError::WorldMismatch {
            expected: net.num_atoms(),
            found: values.len(),
        });
    }
    let mut total = net.pruned_log_weight();
    for fid in 0..net.features.len() {
        if net.feature_true(fid, values) {
            total += net.feature_weight(fid);
        }
    }
    Ok(total)
}

/// Number of groundings of `f` that are true in `world`.
pub fn count_true_groundings(
    f: &Formula,
    sig: &Signature,
    world: &impl Assignment,
) -> Result<u64, GroundError> {
    let template = Template::compile(0, f, sig)?;
    let space = AtomSpace::new(sig);
    let mut count = 0u64;
    let mut err = None;
    template.for_each_grounding(&space, |ids| {
        if err.is_some() {
            return;
        }
        let mut values = Vec::with_capacity(ids.len());
        for &id in ids {
            let atom = space.atom(id as usize);
            match world.truth(&atom) {
                Some(v) => values.push(v),
                None => {
                    err = Some(LogicError::UnknownAtom(atom.to_string()));
                    return;
                }
            }
        }
        if template.program.eval(|k| values[k]) {
            count += 1;
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(count),
    }
}
