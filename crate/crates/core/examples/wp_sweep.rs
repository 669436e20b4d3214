//! Sweeps the preference weight of the combined decoder.
//!
//! cargo run --release --example wp_sweep -- [instances] [runs]

use roster::bench::{render_text, run_bench, summarize, BenchSpec, Grid};
use roster::instgen::{corpus_params, corpus_template, generate};

fn main() -> roster::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().expect("counts are integers"));
    let count = args.next().unwrap_or(6);
    let runs = args.next().unwrap_or(3);

    let instances = corpus_params(count, &corpus_template(1000), "syn")
        .into_iter()
        .map(|(_, p)| generate(&p).map(|g| g.instance))
        .collect::<roster::Result<Vec<_>>>()?;

    let mut spec = BenchSpec::new(Grid::WeightSweep.cells(3));
    spec.runs = runs;
    let mut records = Vec::new();
    run_bench(&spec, &instances, &[], |r| {
        records.push(r.clone());
        Ok(())
    })?;
    // Low weights favour cover, high weights favour cheap patterns.
    print!("{}", render_text(&summarize(&records, spec.censor)));
    Ok(())
}
