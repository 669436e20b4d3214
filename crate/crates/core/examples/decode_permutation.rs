//! Decodes the identity permutation and a shuffled one with every decoder.
//!
//! cargo run --example decode_permutation -- [seed]

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roster::decoders::{Decoder, DecoderKind, OrderingKind, SearchOrder, SimpleBound};
use roster::instgen::{corpus_template, generate};

fn main() -> roster::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(3), |s| s.parse()).expect("seed is an integer");
    let inst = generate(&corpus_template(seed))?.instance;
    let n = inst.nurse_count();

    let identity: Vec<usize> = (0..n).collect();
    let mut shuffled = identity.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let variants = [
        (DecoderKind::Cover, OrderingKind::Lexico),
        (DecoderKind::contribution(inst.grades()), OrderingKind::Lexico),
        (DecoderKind::contribution(inst.grades()), OrderingKind::Biased),
        (DecoderKind::combined(inst.grades()), OrderingKind::Lexico),
        (DecoderKind::combined(inst.grades()), OrderingKind::Biased),
    ];
    println!("{:<24} {:>14} {:>14}", "decoder", "identity", "shuffled");
    for (kind, ordering) in variants {
        let label = format!("{}-{}", kind.name(), ordering.name());
        let decoder = Decoder::new(&inst, kind, SearchOrder::build(ordering, &inst, seed))?;
        let cell = |perm: &[usize]| -> roster::Result<String> {
            let d = decoder.decode(perm, &SimpleBound::inactive());
            let e = inst.evaluate(&d.schedule, 20.0)?;
            Ok(format!("{}/{}", e.cost, e.undercover))
        };
        println!("{label:<24} {:>14} {:>14}", cell(&identity)?, cell(&shuffled)?);
    }
    println!("(cells are cost/undercover)");

    // The bound prunes patterns dearer than a known feasible cost.
    let decoder = Decoder::new(&inst, DecoderKind::combined(inst.grades()), SearchOrder::lexico(&inst))?;
    let d = decoder.decode(&identity, &SimpleBound::with_cost(5));
    println!("combined with C* = 5: cost {}, fallbacks {}", inst.solution_cost(&d.schedule)?, d.bound_fallbacks);
    Ok(())
}
