//! Runs the GA on a generated instance with the default parameters and with
//! the tuned configuration, printing the best-so-far trace.
//!
//! cargo run --release --example solve_ga -- [seed]

use roster::genetic::{Engine, GaConfig};
use roster::instgen::{corpus_template, generate};
use roster::oracle::audit;

fn main() -> roster::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(11), |s| s.parse()).expect("seed is an integer");
    let inst = generate(&corpus_template(seed))?.instance;
    let grades = inst.grades();

    for (name, cfg) in [("defaults", GaConfig::new(grades)), ("tuned", GaConfig::tuned(grades))] {
        let mut engine = Engine::new(&inst, cfg.with_seed(seed))?;
        while engine.step() {}
        println!("{name}: {} generations", engine.generation());
        for h in engine.history().iter().step_by(10) {
            println!("  gen {:>3}  fitness {:>7.1}  feasible cost {:?}", h.generation, h.best_fitness, h.best_feasible_cost);
        }
        let r = engine.run();
        let report = audit(&r.best_schedule, &inst);
        println!(
            "  best feasible cost {:?}, {} decodes, {} shortfall units",
            r.best_feasible_cost,
            r.decodes,
            report.total_shortfall()
        );
    }
    Ok(())
}
