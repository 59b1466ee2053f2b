use std::collections::BTreeSet;

use damln::fs::{
    average_precision, generate_fs, make_evidence, run_experiment, ExperimentConfig, FsGibbs,
    FsParams,
};
use damln::logic::GroundAtom;
use damln::Mode;
use proptest::prelude::*;

fn atom(pred: &str, args: &[&str]) -> GroundAtom {
    GroundAtom::new(pred, args.iter().map(|s| s.to_string()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn generated_worlds_are_complete_symmetric_and_irreflexive(n in 2usize..40, seed in any::<u64>()) {
        let world = generate_fs(n, &FsParams::default(), seed).unwrap();
        let lits = &world.database.literals;
        let count = |p: &str| lits.keys().filter(|a| a.predicate == p).count();
        prop_assert_eq!(count("Friends"), n * n);
        prop_assert_eq!(count("Smokes"), n);
        prop_assert_eq!(count("Cancer"), n);
        for a in &world.persons {
            prop_assert_eq!(lits[&atom("Friends", &[a, a])], false);
            for b in &world.persons {
                prop_assert_eq!(lits[&atom("Friends", &[a, b])], lits[&atom("Friends", &[b, a])]);
            }
        }
        let g = (n as f64).sqrt().round() as usize;
        prop_assert_eq!(world.groups.len(), g);
        let sizes: Vec<usize> = world.groups.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
    }

    #[test]
    fn evidence_and_truth_partition_the_world(n in 2usize..30, fraction in 0.0f64..=1.0, seed in any::<u64>()) {
        let world = generate_fs(n, &FsParams::default(), seed).unwrap();
        let (evidence, truth) = make_evidence(&world.database, fraction, seed);
        let ev: BTreeSet<&GroundAtom> = evidence.literals.keys().collect();
        let tr: BTreeSet<&GroundAtom> = truth.literals.keys().collect();
        prop_assert!(ev.is_disjoint(&tr));
        for (a, v) in &world.database.literals {
            let placed = evidence.literals.get(a).or_else(|| truth.literals.get(a));
            prop_assert_eq!(placed, Some(v));
            match a.predicate.as_str() {
                "Friends" => prop_assert!(ev.contains(a)),
                "Cancer" => prop_assert!(tr.contains(a)),
                _ => {}
            }
        }
        let observed = ev.iter().filter(|a| a.predicate == "Smokes").count();
        prop_assert_eq!(observed, (fraction * n as f64).floor() as usize);
    }

    #[test]
    fn average_precision_ignores_monotone_rescaling(
        pairs in prop::collection::vec((0.0f64..1.0, any::<bool>()), 1..60),
    ) {
        prop_assume!(pairs.iter().any(|p| p.1));
        let base = average_precision(&pairs).unwrap();
        let squashed: Vec<(f64, bool)> = pairs.iter().map(|&(s, l)| ((3.0 * s).exp() - 7.0, l)).collect();
        prop_assert!((average_precision(&squashed).unwrap() - base).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&base));
    }
}

#[test]
fn experiment_row_count_follows_the_grid() {
    let cfg = ExperimentConfig {
        train_sizes: vec![20, 40],
        test_sizes: vec![50, 100],
        trials: 3,
        seeds: vec![1],
        methods: vec![Mode::Mln, Mode::DaMln],
        gibbs: FsGibbs {
            chains: 1,
            burn_in: 20,
            samples: 100,
        },
        ..Default::default()
    };
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 3);
    assert!(rows.iter().all(|r| r.auc_all.is_finite()));
}

/// A test size equal to a training size: both modes predict about equally well.
#[test]
fn modes_agree_at_a_training_size() {
    let cfg = ExperimentConfig {
        train_sizes: vec![20, 40],
        test_sizes: vec![40],
        trials: 3,
        seeds: vec![1, 2, 3],
        gibbs: FsGibbs {
            chains: 1,
            burn_in: 200,
            samples: 2000,
        },
        ..Default::default()
    };
    let rows = run_experiment(&cfg).unwrap();
    let mln = damln::fs::mean_auc(&rows, Mode::Mln, 40);
    let da = damln::fs::mean_auc(&rows, Mode::DaMln, 40);
    assert!((mln - da).abs() <= 0.05, "MLN {mln} vs DA-MLN {da}");
}
