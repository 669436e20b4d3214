//! Applies each permutation crossover to one pair of parents, then mutates.
//!
//! cargo run --example crossover_operators

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roster::genetic::{crossover_pux, crossover_uniform_order, mutate_swap, order_with_cuts, pmx_with_cuts, Crossover};

fn main() {
    let a: Vec<usize> = (0..10).collect();
    let b = vec![9, 3, 7, 1, 5, 0, 8, 2, 6, 4];
    println!("parent a   {a:?}");
    println!("parent b   {b:?}");
    println!("pmx 3..7   {:?}", pmx_with_cuts(&a, &b, 3, 7));
    println!("order 3..7 {:?}", order_with_cuts(&a, &b, 3, 7));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for op in [Crossover::C1, Crossover::Order, Crossover::Pmx, Crossover::UniformOrder, Crossover::Pux { p: 0.66 }] {
        println!("{:<10} {:?}", op.label(), op.apply(&a, &b, &mut rng));
    }

    // With p = 0.5 the parameterised operator is uniform order crossover.
    let x = crossover_pux(&a, &b, 0.5, &mut ChaCha8Rng::seed_from_u64(9)).expect("p in range");
    let y = crossover_uniform_order(&a, &b, &mut ChaCha8Rng::seed_from_u64(9));
    println!("pux50 == uniform: {}", x == y);

    let mut child = a.clone();
    mutate_swap(&mut child, 0.3, &mut rng);
    println!("mutated a  {child:?}");
}
