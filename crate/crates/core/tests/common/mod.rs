//! Helpers shared by the integration tests, including an exhaustive
//! enumerator that serves as the reference for the exact solver.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use roster::instgen::{generate, small_template};
use roster::model::{Instance, Schedule, SLOTS};

/// Result of trying every complete assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumerated {
    pub optimum: Option<u32>,
    pub feasible_count: u64,
    pub assignments: u64,
}

pub fn assignment_count(inst: &Instance) -> u64 {
    (0..inst.nurse_count()).map(|i| inst.feasible(i).len() as u64).product()
}

/// Visits all `prod |F(i)|` assignments, tracking qualified supply
/// incrementally, and checks every leaf against the demand.
pub fn enumerate(inst: &Instance) -> Enumerated {
    let grades = inst.grades();
    let demand: Vec<u32> = (0..SLOTS)
        .flat_map(|k| (1..=grades).map(move |s| (k, s)))
        .map(|(k, s)| inst.demand().get(k, s))
        .collect();
    let mut supply = vec![0u32; SLOTS * grades];
    let mut out = Enumerated {
        optimum: None,
        feasible_count: 0,
        assignments: 0,
    };

    fn go(inst: &Instance, i: usize, cost: u32, demand: &[u32], supply: &mut [u32], out: &mut Enumerated) {
        let grades = inst.grades();
        if i == inst.nurse_count() {
            out.assignments += 1;
            if demand.iter().zip(supply.iter()).all(|(r, s)| r <= s) {
                out.feasible_count += 1;
                if out.optimum.is_none_or(|b| cost < b) {
                    out.optimum = Some(cost);
                }
            }
            return;
        }
        let g = usize::from(inst.nurse(i).grade);
        for &j in inst.feasible(i) {
            let slots: Vec<usize> = inst.pattern(j).slots().collect();
            for &k in &slots {
                for s in g..=grades {
                    supply[k * grades + s - 1] += 1;
                }
            }
            go(inst, i + 1, cost + inst.cost(i, j), demand, supply, out);
            for &k in &slots {
                for s in g..=grades {
                    supply[k * grades + s - 1] -= 1;
                }
            }
        }
    }

    go(inst, 0, 0, &demand, &mut supply, &mut out);
    out
}

/// Planted small instances with 4, 5 or 6 nurses in turn.
pub fn small_corpus(count: usize, seed: u64) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let mut p = small_template(4 + i % 3, seed + i as u64);
            p.name = format!("small-{i:02}");
            p.demand = roster::instgen::DemandMode::Planted {
                tightness: roster::instgen::Band::ALL[i % 3].tightness(),
            };
            generate(&p).expect("small template is valid").instance
        })
        .collect()
}

/// A uniformly random allowed schedule.
pub fn random_schedule<R: Rng>(inst: &Instance, rng: &mut R) -> Schedule {
    Schedule::new(
        (0..inst.nurse_count())
            .map(|i| *inst.feasible(i).choose(rng).expect("nonempty F(i)"))
            .collect(),
    )
}
