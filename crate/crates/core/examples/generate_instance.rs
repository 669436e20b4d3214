//! Generates one full-size instance, prints its shape and writes it as JSON.
//!
//! cargo run --example generate_instance -- [seed] [out.json]

use roster::instgen::{corpus_template, generate, write_instance, DemandMode};

fn main() -> roster::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(Ok(7), |s| s.parse()).expect("seed is an integer");
    let out = args.next().unwrap_or_else(|| "instance.json".into());

    let params = roster::instgen::GenParams {
        name: format!("example-{seed}"),
        demand: DemandMode::Planted { tightness: 0.97 },
        ..corpus_template(seed)
    };
    let g = generate(&params)?;
    let inst = &g.instance;
    let planted = g.planted.as_ref().expect("planted demand keeps its witness");

    println!("{}: {} nurses, {} grades, {} patterns", inst.name(), inst.nurse_count(), inst.grades(), inst.patterns().len());
    let sizes: Vec<usize> = (0..inst.nurse_count()).map(|i| inst.feasible(i).len()).collect();
    println!("|F(i)| from {} to {}", sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
    println!("demand (rows are slots Sun..Sat days then nights, columns grades 1..p):");
    for (k, row) in inst.demand().rows().iter().enumerate() {
        println!("  {k:>2} {row:?}");
    }
    println!("planted schedule costs {}", inst.solution_cost(planted)?);

    write_instance(&out, inst, Some(planted))?;
    println!("wrote {out}");
    Ok(())
}
