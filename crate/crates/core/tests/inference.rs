mod common;

use std::collections::{BTreeMap, BTreeSet};

use damln::fs::{generate_fs, FsParams, FS_MODEL};
use damln::grounder::{ground_network, log_unnormalized_weight, GroundOptions, Mode};
use damln::inference::{
    conditional_probability, exact_marginals, gibbs_marginals, ExactParams, GibbsParams,
};
use damln::io::{parse_model, Database, Settings};
use damln::learning::{learn_weights, LearnConfig, TrainingSet};
use damln::logic::GroundAtom;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::Shape;

fn max_gap(a: &damln::MarginalTable, b: &damln::MarginalTable) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .map(|(atom, p)| (p - b.get(atom).unwrap()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn conditional_matches_two_world_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let (model, evidence, net) = common::random_network(&mut rng, &Shape::default(), 10);
        let sig = evidence.signature(&model).unwrap();
        let scales: Vec<f64> = net.scales().iter().map(|s| s.scale).collect();
        for mask in 0..(1u64 << net.free_atoms().len()).min(64) {
            let (world, map) = common::world_from_mask(&net, mask);
            for &id in net.free_atoms() {
                let atom = net.atom(id as usize);
                let mut with = map.clone();
                with.insert(atom.clone(), true);
                let mut without = map.clone();
                without.insert(atom.clone(), false);
                let s1 = common::brute_log_weight(&model, &sig, &scales, &with);
                let s0 = common::brute_log_weight(&model, &sig, &scales, &without);
                let expected = 1.0 / (1.0 + (s0 - s1).exp());
                let p = conditional_probability(&net, &atom, &world).unwrap();
                assert!((p - expected).abs() <= 1e-12, "{atom}: {p} vs {expected}");
            }
        }
    }
}

/// Renames every constant through `rename`, in model text and evidence alike.
fn relabel(text: &str, rename: &BTreeMap<String, String>) -> String {
    let mut out = text.to_string();
    for (i, from) in rename.keys().enumerate() {
        out = out.replace(from.as_str(), &format!("\u{1}{i}\u{1}"));
    }
    for (i, to) in rename.values().enumerate() {
        out = out.replace(&format!("\u{1}{i}\u{1}"), to);
    }
    out
}

#[test]
fn marginals_are_invariant_under_constant_renaming() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut done = 0;
    while done < 30 {
        let text = common::random_model_text(&mut rng, &Shape::default());
        let model = parse_model(&text).unwrap();
        let evidence = common::random_evidence(&mut rng, &model, 0.3);
        let q = common::all_predicates(&model);
        let net = ground_network(
            &model,
            &model.signature,
            &evidence,
            &q,
            &GroundOptions::default(),
        )
        .unwrap();
        if net.free_atoms().len() > 14 || net.query_atoms().is_empty() {
            continue;
        }
        let mut rename = BTreeMap::new();
        for d in model.signature.domains() {
            let mut shuffled = d.constants.clone();
            shuffled.shuffle(&mut rng);
            rename.extend(d.constants.iter().cloned().zip(shuffled));
        }
        let renamed_model = parse_model(&relabel(&text, &rename)).unwrap();
        let mut renamed_evidence = Database::default();
        for (atom, &v) in &evidence.literals {
            let args = atom.args.iter().map(|c| rename[c].clone()).collect();
            renamed_evidence
                .insert(GroundAtom::new(atom.predicate.clone(), args), v)
                .unwrap();
        }
        let renamed_net = ground_network(
            &renamed_model,
            &renamed_model.signature,
            &renamed_evidence,
            &q,
            &GroundOptions::default(),
        )
        .unwrap();
        let a = exact_marginals(&net, &ExactParams::default()).unwrap();
        let b = exact_marginals(&renamed_net, &ExactParams::default()).unwrap();
        assert_eq!(a.marginals.len(), b.marginals.len());
        for (atom, p) in a.marginals.iter() {
            let args = atom.args.iter().map(|c| rename[c].clone()).collect();
            let other = b
                .marginals
                .get(&GroundAtom::new(atom.predicate.clone(), args))
                .unwrap();
            assert!((p - other).abs() <= 1e-10, "{atom}: {p} vs {other}");
        }
        assert!((a.log_partition - b.log_partition).abs() <= 1e-9);
        done += 1;
    }
}

#[test]
fn gibbs_matches_exact_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let params = GibbsParams {
        chains: 3,
        burn_in: 1000,
        samples: 100_000,
        seed: 0,
    };
    for i in 0..6 {
        let (_, _, net) = common::random_network(&mut rng, &Shape::default(), 12);
        let exact = exact_marginals(&net, &ExactParams::default()).unwrap();
        let gibbs = gibbs_marginals(&net, &GibbsParams { seed: i, ..params }).unwrap();
        let gap = max_gap(&exact.marginals, &gibbs);
        assert!(gap <= 0.01, "model {i}: gap {gap}");
    }
}

#[test]
fn gibbs_matches_exact_on_four_person_fs_without_evidence() {
    let base = parse_model(FS_MODEL).unwrap();
    let train = generate_fs(20, &FsParams::default(), 3).unwrap().database;
    let ts = TrainingSet::new(&base, vec![train]).unwrap();
    let world = generate_fs(4, &FsParams::default(), 4).unwrap().database;
    let sig = world.signature(&base).unwrap();
    let q: BTreeSet<String> = ["Friends", "Smokes", "Cancer"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for mode in [Mode::Mln, Mode::DaMln] {
        let weights = learn_weights(
            &base,
            &ts,
            &LearnConfig {
                mode,
                ..Default::default()
            },
        )
        .unwrap()
        .weights;
        let model = base.with_weights(&weights).with_settings(Settings {
            mode,
            aggregator: base.settings.aggregator,
        });
        let net = ground_network(
            &model,
            &sig,
            &Database::default(),
            &q,
            &GroundOptions::default(),
        )
        .unwrap();
        assert_eq!(net.free_atoms().len(), 24);
        let exact = exact_marginals(&net, &ExactParams { max_atoms: 24 }).unwrap();
        let gibbs = gibbs_marginals(
            &net,
            &GibbsParams {
                chains: 3,
                burn_in: 1000,
                samples: 100_000,
                seed: 9,
            },
        )
        .unwrap();
        let gap = max_gap(&exact.marginals, &gibbs);
        assert!(gap <= 0.01, "{mode}: gap {gap}");
    }
}

#[test]
fn exact_inference_is_normalized_under_extreme_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..20 {
        let (model, evidence, _) = common::random_network(&mut rng, &Shape::default(), 10);
        let scale = rng.gen_range(50.0..500.0);
        let weights: Vec<f64> = model.weights().iter().map(|w| w * scale).collect();
        let heavy = model.with_weights(&weights);
        let sig = evidence.signature(&heavy).unwrap();
        let q = common::all_predicates(&heavy);
        let net = ground_network(&heavy, &sig, &evidence, &q, &GroundOptions::default()).unwrap();
        let exact = exact_marginals(&net, &ExactParams::default()).unwrap();
        assert!(exact.log_partition.is_finite());
        let mut total = 0.0;
        let mut on: BTreeMap<GroundAtom, f64> = BTreeMap::new();
        for mask in 0..1u64 << net.free_atoms().len() {
            let (world, _) = common::world_from_mask(&net, mask);
            let p = (log_unnormalized_weight(&net, &world).unwrap() - exact.log_partition).exp();
            total += p;
            for &id in net.query_atoms() {
                if world.get(id as usize) {
                    *on.entry(net.atom(id as usize)).or_default() += p;
                }
            }
        }
        assert!(
            (total - 1.0).abs() <= 1e-10,
            "world probabilities sum to {total}"
        );
        for (atom, &p) in exact.marginals.iter() {
            let brute = on.get(atom).copied().unwrap_or(0.0);
            assert!((p - brute).abs() <= 1e-10, "{atom}: {p} vs {brute}");
        }
    }
}
