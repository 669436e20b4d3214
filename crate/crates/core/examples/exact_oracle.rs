//! Solves a desk-scale instance exactly and compares the GA against it.
//!
//! cargo run --release --example exact_oracle -- [seed]

use roster::genetic::{run, GaConfig};
use roster::instgen::{generate, small_template};
use roster::oracle::{audit, solve_exact};

fn main() -> roster::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(5), |s| s.parse()).expect("seed is an integer");
    let inst = generate(&small_template(6, seed))?.instance;
    let space: u64 = (0..inst.nurse_count()).map(|i| inst.feasible(i).len() as u64).product();
    println!("{} nurses, {space} complete assignments", inst.nurse_count());

    let exact = solve_exact(&inst, 10_000_000);
    println!("oracle: {:?}, cost {:?}, {} nodes", exact.status, exact.cost, exact.nodes);
    if let Some(s) = &exact.schedule {
        println!("witness {:?}, audit empty: {}", s.assignment(), audit(s, &inst).is_empty());
    }

    let mut hits = 0;
    for s in 0..10 {
        let r = run(&inst, &GaConfig::tuned(inst.grades()).with_seed(s))?;
        hits += usize::from(r.best_feasible_cost.is_some() && r.best_feasible_cost == exact.optimal_cost());
        println!("ga seed {s}: {:?}", r.best_feasible_cost);
    }
    println!("optimal in {hits}/10 runs");
    Ok(())
}
