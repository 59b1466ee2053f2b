use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::BenchError;
use crate::io::Database;
use crate::logic::GroundAtom;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsParams {
    pub p_f_in: f64,
    pub p_f_out: f64,
    pub p_g: f64,
    pub p_s_smoking: f64,
    pub p_s_nonsmoking: f64,
    pub p_c_smoker: f64,
    pub p_c_nonsmoker: f64,
}

impl Default for FsParams {
    fn default() -> Self {
        FsParams {
            p_f_in: 0.8,
            p_f_out: 0.1,
            p_g: 0.3,
            p_s_smoking: 0.7,
            p_s_nonsmoking: 0.1,
            p_c_smoker: 0.5,
            p_c_nonsmoker: 0.01,
        }
    }
}

impl FsParams {
    pub fn validate(&self) -> Result<(), BenchError> {
        let all = [
            self.p_f_in,
            self.p_f_out,
            self.p_g,
            self.p_s_smoking,
            self.p_s_nonsmoking,
            self.p_c_smoker,
            self.p_c_nonsmoker,
        ];
        if all.iter().all(|p| (0.0..=1.0).contains(p)) {
            Ok(())
        } else {
            Err(BenchError::InvalidConfig(
                "probabilities must lie in [0,1]".into(),
            ))
        }
    }
}

/// A complete generated world and the group structure behind it.
#[derive(Debug, Clone)]
pub struct FsWorld {
    pub database: Database,
    pub persons: Vec<String>,
    /// Person indices per group.
    pub groups: Vec<Vec<usize>>,
    pub smoking_groups: Vec<bool>,
}

pub(crate) fn person_name(i: usize) -> String {
    format!("P{i}")
}

/// Generates a complete Friends & Smokers world over `n` persons.
///
/// Persons are shuffled into `round(sqrt(n))` groups whose sizes differ by at
/// most one. Friendship is symmetric and irreflexive.
pub fn generate_fs(n: usize, params: &FsParams, seed: u64) -> Result<FsWorld, BenchError> {
    if n < 2 {
        return Err(BenchError::InvalidSize(n));
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let persons: Vec<String> = (0..n).map(person_name).collect();

    let g = ((n as f64).sqrt().round() as usize).max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let (base, extra) = (n / g, n % g);
    let mut groups = Vec::with_capacity(g);
    let mut group_of = vec![0usize; n];
    let mut next = 0;
    for k in 0..g {
        let size = base + usize::from(k < extra);
        let members: Vec<usize> = order[next..next + size].to_vec();
        for &m in &members {
            group_of[m] = k;
        }
        groups.push(members);
        next += size;
    }
    let smoking_groups: Vec<bool> = (0..g).map(|_| rng.gen_bool(params.p_g)).collect();

    let mut friends = vec![false; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let p = if group_of[a] == group_of[b] {
                params.p_f_in
            } else {
                params.p_f_out
            };
            let f = rng.gen_bool(p);
            friends[a * n + b] = f;
            friends[b * n + a] = f;
        }
    }
    let smokes: Vec<bool> = (0..n)
        .map(|i| {
            rng.gen_bool(if smoking_groups[group_of[i]] {
                params.p_s_smoking
            } else {
                params.p_s_nonsmoking
            })
        })
        .collect();
    let cancer: Vec<bool> = smokes
        .iter()
        .map(|&s| {
            rng.gen_bool(if s {
                params.p_c_smoker
            } else {
                params.p_c_nonsmoker
            })
        })
        .collect();

    let mut db = Database::default();
    db.added_constants.insert("person".into(), persons.clone());
    for a in 0..n {
        for b in 0..n {
            db.literals.insert(
                GroundAtom::new("Friends", vec![persons[a].clone(), persons[b].clone()]),
                friends[a * n + b],
            );
        }
        db.literals.insert(
            GroundAtom::new("Smokes", vec![persons[a].clone()]),
            smokes[a],
        );
        db.literals.insert(
            GroundAtom::new("Cancer", vec![persons[a].clone()]),
            cancer[a],
        );
    }
    Ok(FsWorld {
        database: db,
        persons,
        groups,
        smoking_groups,
    })
}
