//! Permutation crossovers and swap mutation.
//!
//! Every operator has a deterministic core taking explicit cut points or a
//! template, and a random wrapper drawing them. Genes are nurse indices
//! `0..n`, so position lookups use plain index tables.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Crossover {
    /// Partially mapped crossover.
    Pmx,
    /// Two-cut order crossover.
    Order,
    /// One-cut head/tail crossover.
    C1,
    /// Uniform order-based crossover (template ones with probability 0.5).
    UniformOrder,
    /// Parameterised uniform order crossover: template ones with probability `p`.
    Pux { p: f64 },
}

impl Crossover {
    pub fn validate(&self) -> Result<()> {
        if let Crossover::Pux { p } = *self {
            check_probability("PUX template probability", p)?;
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            Crossover::Pmx => "pmx".into(),
            Crossover::Order => "order".into(),
            Crossover::C1 => "c1".into(),
            Crossover::UniformOrder => "uniform".into(),
            Crossover::Pux { p } => format!("pux{}", (p * 100.0).round()),
        }
    }

    /// Child of `a` and `b`. The configuration must be valid.
    pub fn apply<R: Rng + ?Sized>(&self, a: &[usize], b: &[usize], rng: &mut R) -> Vec<usize> {
        match *self {
            Crossover::Pmx => crossover_pmx(a, b, rng),
            Crossover::Order => crossover_order(a, b, rng),
            Crossover::C1 => crossover_c1(a, b, rng),
            Crossover::UniformOrder => crossover_uniform_order(a, b, rng),
            Crossover::Pux { p } => uniform_order_draw(a, b, p, rng),
        }
    }
}

impl std::str::FromStr for Crossover {
    type Err = Error;

    /// `pmx`, `order`, `c1`, `uniform`, or `pux` followed by a percentage
    /// (`pux66`) or probability (`pux:0.66`).
    fn from_str(s: &str) -> Result<Self> {
        let op = match s {
            "pmx" => Crossover::Pmx,
            "order" => Crossover::Order,
            "c1" => Crossover::C1,
            "uniform" | "uniform-order" => Crossover::UniformOrder,
            _ => {
                let rest = s
                    .strip_prefix("pux")
                    .ok_or_else(|| Error::ConfigInvalid(format!("unknown crossover {s:?}")))?;
                let p = if let Some(prob) = rest.strip_prefix(':') {
                    prob.parse::<f64>()
                } else {
                    rest.parse::<f64>().map(|pct| pct / 100.0)
                }
                .map_err(|_| Error::ConfigInvalid(format!("bad PUX parameter in {s:?}")))?;
                Crossover::Pux { p }
            }
        };
        op.validate()?;
        Ok(op)
    }
}

pub(crate) fn check_probability(what: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ConfigInvalid(format!("{what} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Two cut points `start <= end` in `0..=n`; the segment is `start..end`.
fn two_cuts<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let x = rng.gen_range(0..=n);
    let y = rng.gen_range(0..=n);
    (x.min(y), x.max(y))
}

fn positions(p: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; p.len()];
    for (i, &g) in p.iter().enumerate() {
        pos[g] = i;
    }
    pos
}

/// PMX with the segment `start..end` taken from `a`. Outside the segment each
/// position takes `b`'s gene, following the segment mapping while that gene
/// is already placed.
pub fn pmx_with_cuts(a: &[usize], b: &[usize], start: usize, end: usize) -> Vec<usize> {
    let n = a.len();
    let pos_a = positions(a);
    let in_segment = |g: usize| (start..end).contains(&pos_a[g]);
    let mut child = a.to_vec();
    for i in (0..start).chain(end..n) {
        let mut gene = b[i];
        while in_segment(gene) {
            gene = b[pos_a[gene]];
        }
        child[i] = gene;
    }
    child
}

pub fn crossover_pmx<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> Vec<usize> {
    let (start, end) = two_cuts(a.len(), rng);
    pmx_with_cuts(a, b, start, end)
}

/// Order crossover: `a[start..end]` stays in place, the other positions are
/// filled from the second cut onwards (wrapping) with `b`'s remaining genes
/// in `b`'s cyclic order from the second cut.
pub fn order_with_cuts(a: &[usize], b: &[usize], start: usize, end: usize) -> Vec<usize> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut placed = vec![false; n];
    let mut child = vec![usize::MAX; n];
    for i in start..end {
        child[i] = a[i];
        placed[a[i]] = true;
    }
    let mut genes = (0..n).map(|k| b[(end + k) % n]).filter(|&g| !placed[g]);
    for k in 0..n {
        let i = (end + k) % n;
        if !(start..end).contains(&i) {
            child[i] = genes.next().expect("gene counts match");
        }
    }
    child
}

pub fn crossover_order<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> Vec<usize> {
    let (start, end) = two_cuts(a.len(), rng);
    order_with_cuts(a, b, start, end)
}

/// C1: `a[..cut]` followed by `b`'s other genes in `b`'s order.
pub fn c1_with_cut(a: &[usize], b: &[usize], cut: usize) -> Vec<usize> {
    let mut placed = vec![false; a.len()];
    let mut child = Vec::with_capacity(a.len());
    for &g in &a[..cut] {
        placed[g] = true;
        child.push(g);
    }
    child.extend(b.iter().copied().filter(|&g| !placed[g]));
    child
}

pub fn crossover_c1<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> Vec<usize> {
    let cut = rng.gen_range(0..=a.len());
    c1_with_cut(a, b, cut)
}

/// Template ones keep `a`'s gene; the remaining genes fill the zero positions
/// in the order they appear in `b`.
pub fn uniform_order_with_template(a: &[usize], b: &[usize], template: &[bool]) -> Vec<usize> {
    let mut placed = vec![false; a.len()];
    let mut child = vec![usize::MAX; a.len()];
    for (i, &keep) in template.iter().enumerate() {
        if keep {
            child[i] = a[i];
            placed[a[i]] = true;
        }
    }
    let mut fill = b.iter().copied().filter(|&g| !placed[g]);
    for (i, &keep) in template.iter().enumerate() {
        if !keep {
            child[i] = fill.next().expect("gene counts match");
        }
    }
    child
}

fn uniform_order_draw<R: Rng + ?Sized>(a: &[usize], b: &[usize], p: f64, rng: &mut R) -> Vec<usize> {
    let template: Vec<bool> = (0..a.len()).map(|_| rng.gen::<f64>() < p).collect();
    uniform_order_with_template(a, b, &template)
}

pub fn crossover_uniform_order<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> Vec<usize> {
    uniform_order_draw(a, b, 0.5, rng)
}

pub fn crossover_pux<R: Rng + ?Sized>(
    a: &[usize],
    b: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_probability("PUX template probability", p)?;
    Ok(uniform_order_draw(a, b, p, rng))
}

/// Each position, with probability `rate`, swaps its gene with a uniformly
/// chosen other position.
pub fn mutate_swap<R: Rng + ?Sized>(genotype: &mut [usize], rate: f64, rng: &mut R) {
    let n = genotype.len();
    if n < 2 || rate <= 0.0 {
        return;
    }
    for i in 0..n {
        if rng.gen::<f64>() < rate {
            let r = rng.gen_range(0..n - 1);
            let j = if r >= i { r + 1 } else { r };
            genotype.swap(i, j);
        }
    }
}
