use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::io::Database;
use crate::logic::GroundAtom;

/// Splits a complete world into evidence and held-out truth.
///
/// Evidence holds every `Friends` literal plus `floor(fraction * count)`
/// uniformly chosen `Smokes` literals. The truth set holds the remaining
/// `Smokes` literals and every `Cancer` literal. `Friends` is closed-world in
/// the evidence database.
pub fn make_evidence(db: &Database, fraction: f64, seed: u64) -> (Database, Database) {
    let fraction = fraction.clamp(0.0, 1.0);
    let mut evidence = Database {
        added_constants: db.added_constants.clone(),
        ..Default::default()
    };
    evidence.closed_world.insert("Friends".into());
    let mut truth = Database {
        added_constants: db.added_constants.clone(),
        ..Default::default()
    };

    let smokes: Vec<(&GroundAtom, bool)> = db
        .literals
        .iter()
        .filter(|(a, _)| a.predicate == "Smokes")
        .map(|(a, &v)| (a, v))
        .collect();
    let k = (fraction * smokes.len() as f64).floor() as usize;
    let mut order: Vec<usize> = (0..smokes.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut observed = vec![false; smokes.len()];
    for &i in &order[..k] {
        observed[i] = true;
    }
    for ((atom, value), seen) in smokes.into_iter().zip(observed) {
        let target = if seen { &mut evidence } else { &mut truth };
        target.literals.insert(atom.clone(), value);
    }
    for (atom, &value) in &db.literals {
        match atom.predicate.as_str() {
            "Friends" => {
                evidence.literals.insert(atom.clone(), value);
            }
            "Cancer" => {
                truth.literals.insert(atom.clone(), value);
            }
            _ => {}
        }
    }
    (evidence, truth)
}
