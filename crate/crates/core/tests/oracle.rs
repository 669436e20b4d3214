mod common;

use common::{assignment_count, enumerate, random_schedule, small_corpus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roster::genetic::{run, GaConfig};
use roster::instgen::{generate, small_template, DemandMode};
use roster::model::GradeMatrix;
use roster::oracle::{audit, solve_exact, OracleStatus};

#[test]
fn branch_and_bound_matches_enumeration_on_four_nurses() {
    for seed in 0..25 {
        let mut p = small_template(4, 500 + seed);
        // Odd seeds use unplanted demand, which may be infeasible.
        if seed % 2 == 1 {
            p.demand = DemandMode::Random { tightness: 0.8 };
        }
        let inst = generate(&p).unwrap().instance;
        assert!(assignment_count(&inst) <= 100_000);
        let truth = enumerate(&inst);
        let got = solve_exact(&inst, u64::MAX);
        assert_eq!(got.optimal_cost(), truth.optimum, "seed {seed}");
        match truth.optimum {
            Some(_) => assert_eq!(got.status, OracleStatus::Optimal),
            None => assert_eq!(got.status, OracleStatus::Infeasible),
        }
    }
}

#[test]
fn optimal_witness_is_feasible_and_priced() {
    for inst in small_corpus(9, 40) {
        let r = solve_exact(&inst, u64::MAX);
        let s = r.schedule.clone().expect("planted instances are feasible");
        assert!(inst.is_feasible(&s).unwrap());
        assert_eq!(Some(inst.solution_cost(&s).unwrap()), r.optimal_cost());
        assert!(audit(&s, &inst).is_empty());
    }
}

#[test]
fn zero_demand_optimum_is_sum_of_minima() {
    for inst in small_corpus(6, 7) {
        let inst = inst.with_demand(GradeMatrix::zeros(inst.grades())).unwrap();
        let separable: u32 = (0..inst.nurse_count())
            .map(|i| inst.feasible(i).iter().map(|&j| inst.cost(i, j)).min().unwrap())
            .sum();
        assert_eq!(solve_exact(&inst, u64::MAX).optimal_cost(), Some(separable));
    }
}

#[test]
fn audit_totals_match_the_fitness_penalty() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for inst in small_corpus(12, 90) {
        for _ in 0..50 {
            let s = random_schedule(&inst, &mut rng);
            let eval = inst.evaluate(&s, 20.0).unwrap();
            let report = audit(&s, &inst);
            assert_eq!(report.total_shortfall(), eval.undercover);
            assert_eq!((eval.fitness - f64::from(eval.cost)) / 20.0, report.total_shortfall() as f64);
            assert_eq!(report.is_empty(), inst.is_feasible(&s).unwrap());
        }
    }
}

#[test]
fn ga_never_beats_the_optimum() {
    for inst in small_corpus(6, 300) {
        let optimum = solve_exact(&inst, u64::MAX).optimal_cost().unwrap();
        for seed in 0..3 {
            let r = run(&inst, &GaConfig::tuned(inst.grades()).with_seed(seed)).unwrap();
            if let Some(c) = r.best_feasible_cost {
                assert!(c >= optimum);
            }
        }
    }
}
