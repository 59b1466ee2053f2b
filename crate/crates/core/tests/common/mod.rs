//! Seeded generators of small random models and databases.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use damln::grounder::{ground_network, GroundNetwork, GroundOptions};
use damln::inference::World;
use damln::io::{parse_model, Database, Model};
use damln::logic::{evaluate, free_variables, substitute, Formula, GroundAtom, Signature};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Shape {
    pub max_domains: usize,
    pub max_constants: usize,
    pub max_predicates: usize,
    pub max_arity: usize,
    pub max_formulas: usize,
    pub max_depth: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_domains: 2,
            max_constants: 3,
            max_predicates: 3,
            max_arity: 2,
            max_formulas: 4,
            max_depth: 3,
        }
    }
}

struct Pred {
    name: String,
    types: Vec<usize>,
}

fn random_weight(rng: &mut impl Rng) -> String {
    match rng.gen_range(0..4) {
        0 => format!("{:e}", rng.gen_range(-2.0..2.0f64)),
        1 => format!("{}", rng.gen_range(-3i32..=3)),
        _ => format!("{}", rng.gen_range(-2.0..2.0f64)),
    }
}

fn random_atom(rng: &mut impl Rng, preds: &[Pred], constants: &[Vec<String>]) -> String {
    let p = &preds[rng.gen_range(0..preds.len())];
    if p.types.is_empty() {
        return p.name.clone();
    }
    let args: Vec<String> = p
        .types
        .iter()
        .map(|&t| {
            if rng.gen_bool(0.2) {
                constants[t].choose(rng).unwrap().clone()
            } else {
                // variables are typed by name so no formula has a type conflict
                format!("{}{t}", ["x", "y", "z"][rng.gen_range(0..3)])
            }
        })
        .collect();
    format!("{}({})", p.name, args.join(", "))
}

fn random_formula(
    rng: &mut impl Rng,
    depth: usize,
    preds: &[Pred],
    constants: &[Vec<String>],
) -> String {
    if depth == 0 || rng.gen_bool(0.35) {
        return random_atom(rng, preds, constants);
    }
    let sub = |rng: &mut _| random_formula(rng, depth - 1, preds, constants);
    match rng.gen_range(0..5) {
        0 => format!("!({})", sub(rng)),
        1 => format!("({}) ^ ({})", sub(rng), sub(rng)),
        2 => format!("({}) v ({})", sub(rng), sub(rng)),
        3 => format!("({}) => ({})", sub(rng), sub(rng)),
        _ => format!("({}) <=> ({})", sub(rng), sub(rng)),
    }
}

/// Model source text; every constant mentioned is declared in its domain.
pub fn random_model_text(rng: &mut impl Rng, shape: &Shape) -> String {
    let n_domains = rng.gen_range(1..=shape.max_domains);
    let constants: Vec<Vec<String>> = (0..n_domains)
        .map(|d| {
            let k = rng.gen_range(1..=shape.max_constants);
            (0..k)
                .map(|c| format!("{}{c}", ["A", "B", "C"][d % 3]))
                .collect()
        })
        .collect();
    let preds: Vec<Pred> = (0..rng.gen_range(1..=shape.max_predicates))
        .map(|i| Pred {
            name: format!("P{i}"),
            types: (0..rng.gen_range(0..=shape.max_arity))
                .map(|_| rng.gen_range(0..n_domains))
                .collect(),
        })
        .collect();

    let mut text = String::new();
    if rng.gen_bool(0.3) {
        text.push_str(["#mode = mln\n", "#mode = damln\n"][rng.gen_range(0..2)]);
    }
    if rng.gen_bool(0.3) {
        text.push_str(["#aggregator = sum\n", "#aggregator = max\n"][rng.gen_range(0..2)]);
    }
    for (d, cs) in constants.iter().enumerate() {
        text.push_str(&format!("d{d} = {{{}}}\n", cs.join(", ")));
    }
    for p in &preds {
        if p.types.is_empty() {
            text.push_str(&format!("{}\n", p.name));
        } else {
            let types: Vec<String> = p.types.iter().map(|t| format!("d{t}")).collect();
            text.push_str(&format!("{}({})\n", p.name, types.join(", ")));
        }
    }
    for _ in 0..rng.gen_range(1..=shape.max_formulas) {
        let depth = rng.gen_range(0..=shape.max_depth);
        text.push_str(&format!(
            "{} {}\n",
            random_weight(rng),
            random_formula(rng, depth, &preds, &constants)
        ));
    }
    text
}

pub fn random_model(rng: &mut impl Rng, shape: &Shape) -> Model {
    let text = random_model_text(rng, shape);
    parse_model(&text).unwrap_or_else(|e| panic!("generated model does not parse: {e}\n{text}"))
}

/// All ground atoms of the model's predicates, in the atom-space order.
pub fn all_atoms(model: &Model) -> Vec<GroundAtom> {
    let net = ground_network(
        model,
        &model.signature,
        &Database::default(),
        &BTreeSet::new(),
        &GroundOptions::default(),
    )
    .unwrap();
    (0..net.num_atoms()).map(|i| net.atom(i)).collect()
}

/// Each atom independently observed with probability `p_observed`.
pub fn random_evidence(rng: &mut impl Rng, model: &Model, p_observed: f64) -> Database {
    let mut db = Database::default();
    for atom in all_atoms(model) {
        if rng.gen_bool(p_observed) {
            db.insert(atom, rng.gen_bool(0.5)).unwrap();
        }
    }
    db
}

/// Every atom observed: a complete training world.
pub fn random_world(rng: &mut impl Rng, model: &Model) -> Database {
    random_evidence(rng, model, 1.0)
}

pub fn all_predicates(model: &Model) -> BTreeSet<String> {
    model
        .signature
        .predicates()
        .iter()
        .map(|p| p.name.clone())
        .collect()
}

/// A random model, evidence and network with between 1 and `max_free` free
/// atoms and at least one query atom.
pub fn random_network(
    rng: &mut impl Rng,
    shape: &Shape,
    max_free: usize,
) -> (Model, Database, GroundNetwork) {
    loop {
        let model = random_model(rng, shape);
        let p = rng.gen_range(0.0..0.6);
        let evidence = random_evidence(rng, &model, p);
        let net = ground_network(
            &model,
            &model.signature,
            &evidence,
            &all_predicates(&model),
            &GroundOptions::default(),
        )
        .unwrap();
        let free = net.free_atoms().len();
        if free >= 1 && free <= max_free && !net.query_atoms().is_empty() {
            return (model, evidence, net);
        }
    }
}

/// Every binding of `f`'s variables to constants of their domains.
pub fn bindings(f: &Formula, sig: &Signature) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for (var, ty) in free_variables(f, sig).unwrap() {
        let mut next = Vec::new();
        for b in &out {
            for c in &sig.domain(&ty).unwrap().constants {
                let mut b = b.clone();
                b.insert(var.clone(), c.clone());
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Brute-force count of true groundings, by substitution and evaluation.
pub fn brute_count(f: &Formula, sig: &Signature, world: &BTreeMap<GroundAtom, bool>) -> u64 {
    bindings(f, sig)
        .iter()
        .filter(|b| evaluate(&substitute(f, b, sig).unwrap(), world).unwrap())
        .count() as u64
}

/// `sum_i (w_i / s_i) * n_i(world)` from scratch; `world` must be complete.
pub fn brute_log_weight(
    model: &Model,
    sig: &Signature,
    scales: &[f64],
    world: &BTreeMap<GroundAtom, bool>,
) -> f64 {
    model
        .formulas
        .iter()
        .zip(scales)
        .map(|(wf, s)| wf.weight / s * brute_count(&wf.formula, sig, world) as f64)
        .sum()
}

/// The full assignment of `net` with free atoms set from the bits of `mask`.
pub fn world_from_mask(net: &GroundNetwork, mask: u64) -> (World, BTreeMap<GroundAtom, bool>) {
    let mut world = World::new(net);
    for (bit, &id) in net.free_atoms().iter().enumerate() {
        world.set(id as usize, mask >> bit & 1 == 1).unwrap();
    }
    let map = (0..net.num_atoms())
        .map(|id| (net.atom(id), world.get(id)))
        .collect();
    (world, map)
}
