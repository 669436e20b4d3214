//! Schedule builders that turn a permutation of nurses into a complete
//! schedule.
//!
//! Each nurse, in permutation order, receives one pattern from its feasible
//! set given the undercover left by the nurses before it:
//!
//! * [`DecoderKind::Cover`] looks only at undercover and picks the slots with
//!   the largest shortfall.
//! * [`DecoderKind::Contribution`] scores every feasible pattern by preference
//!   and by how many still-needed (slot, grade) cells it touches.
//! * [`DecoderKind::Combined`] uses the same score but weighs each cell by its
//!   remaining shortfall.
//!
//! Ties in the scored decoders go to the first pattern in the nurse's
//! [`SearchOrder`]. A [`SimpleBound`] removes patterns dearer than the best
//! feasible cost found so far.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CoverageState, GradeMatrix, Instance, PatternKind, Schedule, Side, WorkerType, MAX_COST, SLOTS,
};

/// Probability that the `Biased` ordering visits day patterns first.
pub const BIASED_DAY_FIRST: f64 = 0.75;

/// Weights of the pattern score: one per grade plus the preference weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub grade: Vec<f64>,
    pub preference: f64,
}

impl ScoreWeights {
    pub fn new(grade: Vec<f64>, preference: f64) -> Result<Self> {
        let weights = ScoreWeights { grade, preference };
        weights.validate()?;
        Ok(weights)
    }

    /// Grade weights in the ratio 8:2:1 (extra grades get 1) and the given
    /// preference weight.
    pub fn ratio_8_2_1(grades: usize, preference: f64) -> Self {
        let grade = (0..grades)
            .map(|s| match s {
                0 => 8.0,
                1 => 2.0,
                _ => 1.0,
            })
            .collect();
        ScoreWeights { grade, preference }
    }

    /// Defaults for the contribution decoder (`w_p = 1`).
    pub fn contribution_default(grades: usize) -> Self {
        Self::ratio_8_2_1(grades, 1.0)
    }

    /// Defaults for the combined decoder (`w_p = 0.5`).
    pub fn combined_default(grades: usize) -> Self {
        Self::ratio_8_2_1(grades, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |w: f64| w.is_finite() && w >= 0.0;
        if !ok(self.preference) || !self.grade.iter().copied().all(ok) {
            return Err(Error::ConfigInvalid(format!(
                "score weights must be nonnegative: {:?} / {}",
                self.grade, self.preference
            )));
        }
        Ok(())
    }

    #[inline]
    fn grade_weight(&self, grade: usize) -> f64 {
        self.grade[grade - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "weights", rename_all = "lowercase")]
pub enum DecoderKind {
    Cover,
    Contribution(ScoreWeights),
    Combined(ScoreWeights),
}

impl DecoderKind {
    pub fn contribution(grades: usize) -> Self {
        DecoderKind::Contribution(ScoreWeights::contribution_default(grades))
    }

    pub fn combined(grades: usize) -> Self {
        DecoderKind::Combined(ScoreWeights::combined_default(grades))
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Cover => "cover",
            DecoderKind::Contribution(_) => "contribution",
            DecoderKind::Combined(_) => "combined",
        }
    }

    pub fn weights(&self) -> Option<&ScoreWeights> {
        match self {
            DecoderKind::Cover => None,
            DecoderKind::Contribution(w) | DecoderKind::Combined(w) => Some(w),
        }
    }
}

/// How undercover enters the pattern score.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreMode {
    /// `d_ks` is 1 while any nurse is still needed, else 0.
    Contribution,
    /// `d_ks` is the number of uncovered shifts.
    Combined,
}

impl ScoreMode {
    #[inline]
    fn need(self, undercover: u32) -> u32 {
        match self {
            ScoreMode::Contribution => undercover.min(1),
            ScoreMode::Combined => undercover,
        }
    }

    /// The `d` matrix for this mode.
    pub fn need_matrix(self, undercover: &GradeMatrix) -> GradeMatrix {
        let mut d = GradeMatrix::zeros(undercover.grades());
        for (k, s, v) in undercover.iter() {
            d.set(k, s, self.need(v));
        }
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingKind {
    /// Pattern index order.
    Lexico,
    /// Day and night patterns shuffled separately, days first.
    RandOrder,
    /// Like `RandOrder` but days first only with probability 0.75.
    Biased,
    /// Ascending cost, rotated to a random start.
    RandCost,
    /// Ascending cost.
    Cheapest,
}

impl OrderingKind {
    pub const ALL: [OrderingKind; 5] = [
        OrderingKind::Lexico,
        OrderingKind::RandOrder,
        OrderingKind::Biased,
        OrderingKind::RandCost,
        OrderingKind::Cheapest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingKind::Lexico => "lexico",
            OrderingKind::RandOrder => "rand-order",
            OrderingKind::Biased => "biased",
            OrderingKind::RandCost => "rand-cost",
            OrderingKind::Cheapest => "cheapest",
        }
    }
}

impl std::str::FromStr for OrderingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OrderingKind::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown search ordering {s:?}")))
    }
}

/// Returns `list` read as a circular list starting at `start`.
pub fn rotate_from<T: Copy>(list: &[T], start: usize) -> Vec<T> {
    if list.is_empty() {
        return Vec::new();
    }
    let start = start % list.len();
    list[start..].iter().chain(&list[..start]).copied().collect()
}

/// Visit order over `F(nurse)` for one ordering kind.
pub fn build_ordering<R: Rng + ?Sized>(
    kind: OrderingKind,
    instance: &Instance,
    nurse: usize,
    rng: &mut R,
) -> Vec<usize> {
    let feasible = instance.feasible(nurse);
    let by_cost = || {
        let mut v = feasible.to_vec();
        v.sort_by_key(|&j| (instance.cost(nurse, j), j));
        v
    };
    match kind {
        OrderingKind::Lexico => feasible.to_vec(),
        OrderingKind::Cheapest => by_cost(),
        OrderingKind::RandCost => {
            let sorted = by_cost();
            let start = rng.gen_range(0..sorted.len());
            rotate_from(&sorted, start)
        }
        OrderingKind::RandOrder | OrderingKind::Biased => {
            let block = |kind: PatternKind| -> Vec<usize> {
                feasible
                    .iter()
                    .copied()
                    .filter(|&j| instance.pattern(j).kind() == kind)
                    .collect()
            };
            let mut days = block(PatternKind::Day);
            let mut nights = block(PatternKind::Night);
            let mut combined = block(PatternKind::Combined);
            days.shuffle(rng);
            nights.shuffle(rng);
            combined.shuffle(rng);
            let days_first = kind == OrderingKind::RandOrder || rng.gen_bool(BIASED_DAY_FIRST);
            let (first, second) = if days_first { (days, nights) } else { (nights, days) };
            first.into_iter().chain(second).chain(combined).collect()
        }
    }
}

/// Per-nurse visit orders, drawn once for a whole run and then read-only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOrder {
    kind: OrderingKind,
    visits: Vec<Vec<usize>>,
}

impl SearchOrder {
    /// Draws the orders for every nurse. Nurse `i` uses its own ChaCha stream
    /// of `seed`, so the draw does not depend on other nurses or on the GA's
    /// own random stream.
    pub fn build(kind: OrderingKind, instance: &Instance, seed: u64) -> Self {
        let visits = (0..instance.nurse_count())
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64 + 1);
                build_ordering(kind, instance, i, &mut rng)
            })
            .collect();
        SearchOrder { kind, visits }
    }

    pub fn lexico(instance: &Instance) -> Self {
        Self::build(OrderingKind::Lexico, instance, 0)
    }

    pub fn kind(&self) -> OrderingKind {
        self.kind
    }

    pub fn visits(&self, nurse: usize) -> &[usize] {
        &self.visits[nurse]
    }
}

/// Pruning rule: once a feasible schedule of cost `C*` is known, no nurse may
/// take a pattern costing more than `C*`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimpleBound {
    pub active: bool,
    pub best_feasible_cost: Option<u32>,
}

impl SimpleBound {
    pub fn inactive() -> Self {
        SimpleBound::default()
    }

    pub fn with_cost(cost: u32) -> Self {
        SimpleBound {
            active: true,
            best_feasible_cost: Some(cost),
        }
    }

    #[inline]
    pub fn admits(&self, cost: u32) -> bool {
        match (self.active, self.best_feasible_cost) {
            (true, Some(limit)) => cost <= limit,
            _ => true,
        }
    }
}

/// One nurse's pick. `bound_ignored` is set when the bound pruned the whole
/// feasible set and was dropped for this nurse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub pattern: usize,
    pub bound_ignored: bool,
}

/// `s_ij = w_p (100 - p_ij) + sum_s w_s q_is sum_k a_jk d_ks`, evaluated term
/// by term. `need` is the `d` matrix (see [`ScoreMode::need_matrix`]).
pub fn pattern_score(
    instance: &Instance,
    nurse: usize,
    pattern: usize,
    need: &GradeMatrix,
    weights: &ScoreWeights,
) -> f64 {
    let n = instance.nurse(nurse);
    let shape = instance.pattern(pattern);
    let mut score = weights.preference * f64::from(MAX_COST - instance.cost(nurse, pattern));
    for s in 1..=instance.grades() {
        if !n.qualifies_for(s) {
            continue;
        }
        let covered: u32 = shape.slots().map(|k| need.get(k, s)).sum();
        score += weights.grade_weight(s) * f64::from(covered);
    }
    score
}

/// Contribution/combined pick: highest score over the nurse's visit order,
/// first maximum wins.
pub fn greedy_select(
    instance: &Instance,
    nurse: usize,
    undercover: &GradeMatrix,
    mode: ScoreMode,
    weights: &ScoreWeights,
    visits: &[usize],
    bound: &SimpleBound,
) -> Selection {
    // Collapse the grade sum per slot; a pattern's cover term is then the sum
    // of its slots' values.
    let grade = usize::from(instance.nurse(nurse).grade);
    let mut slot_value = [0.0f64; SLOTS];
    for (k, value) in slot_value.iter_mut().enumerate() {
        let row = undercover.row(k);
        *value = (grade..=instance.grades())
            .map(|s| weights.grade_weight(s) * f64::from(mode.need(row[s - 1])))
            .sum();
    }
    let best = |use_bound: bool| {
        let mut best: Option<(usize, f64)> = None;
        for &j in visits {
            let cost = instance.cost(nurse, j);
            if use_bound && !bound.admits(cost) {
                continue;
            }
            let cover: f64 = instance.pattern(j).slots().map(|k| slot_value[k]).sum();
            let score = weights.preference * f64::from(MAX_COST - cost) + cover;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    };
    match best(true) {
        Some(pattern) => Selection {
            pattern,
            bound_ignored: false,
        },
        None => Selection {
            pattern: best(false).expect("feasible sets are nonempty"),
            bound_ignored: true,
        },
    }
}

/// First grade `s >= grade` with any undercover in `slots`.
fn active_tier(
    undercover: &GradeMatrix,
    grade: usize,
    slots: std::ops::Range<usize>,
) -> Option<usize> {
    (grade..=undercover.grades()).find(|&s| slots.clone().any(|k| undercover.get(k, s) > 0))
}

/// The `count` slots of `side` with the largest undercover at the nurse's
/// active tier, ties Sunday first, as a bitmask.
fn top_slots(undercover: &GradeMatrix, grade: usize, side: Side, count: usize) -> u16 {
    let tier = active_tier(undercover, grade, side.slots());
    let value = |k: usize| tier.map_or(0, |s| undercover.get(k, s));
    let mut slots: Vec<usize> = side.slots().collect();
    slots.sort_by_key(|&k| std::cmp::Reverse(value(k)));
    slots.iter().take(count).fold(0u16, |bits, &k| bits | 1 << k)
}

/// Side holding the single largest undercover at the nurse's active tier.
fn cover_side(undercover: &GradeMatrix, grade: usize, preference: Side) -> Side {
    let Some(tier) = active_tier(undercover, grade, 0..SLOTS) else {
        return preference;
    };
    let max = |side: Side| side.slots().map(|k| undercover.get(k, tier)).max().unwrap_or(0);
    let (day, night) = (max(Side::Day), max(Side::Night));
    match day.cmp(&night) {
        std::cmp::Ordering::Greater => Side::Day,
        std::cmp::Ordering::Less => Side::Night,
        std::cmp::Ordering::Equal => preference,
    }
}

/// Cover decoder pick for one nurse.
///
/// Standard nurses go to the side of the largest undercover (ties use the
/// nurse's day/night preference) and take the `D_i` or `N_i` slots with the
/// largest undercover there; special nurses take their day and night quotas
/// directly. Undercover is read at the nurse's active tier: the best grade it
/// qualifies for that still has any shortfall in the scanned slots.
///
/// The pattern covering exactly the chosen slots is returned. When the
/// feasible set (after the bound) has no such pattern, the one with the
/// largest overlap wins, ties to the lower pattern index.
pub fn cover_select(
    instance: &Instance,
    nurse: usize,
    undercover: &GradeMatrix,
    bound: &SimpleBound,
) -> Selection {
    let n = instance.nurse(nurse);
    let grade = usize::from(n.grade);
    let feasible = instance.feasible(nurse);
    let bound_ignored = !feasible
        .iter()
        .any(|&j| bound.admits(instance.cost(nurse, j)));
    let eligible = |j: usize| bound_ignored || bound.admits(instance.cost(nurse, j));

    let closest = |target: u16, kind: PatternKind| -> Option<usize> {
        let mut best: Option<(usize, u32)> = None;
        for &j in feasible {
            let p = instance.pattern(j);
            if p.kind() != kind || !eligible(j) {
                continue;
            }
            let overlap = (p.bits() & target).count_ones();
            if best.is_none_or(|(_, b)| overlap > b) {
                best = Some((j, overlap));
            }
        }
        best.map(|(j, _)| j)
    };

    let pattern = match n.worker_type() {
        WorkerType::Special => {
            let target = top_slots(undercover, grade, Side::Day, usize::from(n.days))
                | top_slots(undercover, grade, Side::Night, usize::from(n.nights));
            closest(target, PatternKind::Combined)
        }
        WorkerType::Standard => {
            let first = cover_side(undercover, grade, n.preference);
            [first, first.opposite()].into_iter().find_map(|side| {
                let (count, kind) = match side {
                    Side::Day => (n.days, PatternKind::Day),
                    Side::Night => (n.nights, PatternKind::Night),
                };
                closest(top_slots(undercover, grade, side, usize::from(count)), kind)
            })
        }
    };
    Selection {
        pattern: pattern.expect("feasible sets are nonempty and match the contract kind"),
        bound_ignored,
    }
}

/// A decoded permutation.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub schedule: Schedule,
    pub coverage: CoverageState,
    /// Nurses for which the bound pruned every feasible pattern.
    pub bound_fallbacks: usize,
}

/// Decoder bound to one instance, decoder kind and frozen search order.
#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    instance: &'a Instance,
    kind: DecoderKind,
    order: SearchOrder,
}

impl<'a> Decoder<'a> {
    pub fn new(instance: &'a Instance, kind: DecoderKind, order: SearchOrder) -> Result<Self> {
        if let Some(w) = kind.weights() {
            w.validate()?;
            if w.grade.len() != instance.grades() {
                return Err(Error::ConfigInvalid(format!(
                    "{} grade weights for {} grades",
                    w.grade.len(),
                    instance.grades()
                )));
            }
        }
        if order.visits.len() != instance.nurse_count() {
            return Err(Error::ConfigInvalid(
                "search order was built for a different instance".into(),
            ));
        }
        Ok(Decoder {
            instance,
            kind,
            order,
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn kind(&self) -> &DecoderKind {
        &self.kind
    }

    pub fn order(&self) -> &SearchOrder {
        &self.order
    }

    /// Pattern for `nurse` given the current undercover.
    pub fn select(&self, nurse: usize, undercover: &GradeMatrix, bound: &SimpleBound) -> Selection {
        let visits = self.order.visits(nurse);
        match &self.kind {
            DecoderKind::Cover => cover_select(self.instance, nurse, undercover, bound),
            DecoderKind::Contribution(w) => greedy_select(
                self.instance,
                nurse,
                undercover,
                ScoreMode::Contribution,
                w,
                visits,
                bound,
            ),
            DecoderKind::Combined(w) => greedy_select(
                self.instance,
                nurse,
                undercover,
                ScoreMode::Combined,
                w,
                visits,
                bound,
            ),
        }
    }

    /// Builds the schedule for `permutation` (a permutation of the nurse
    /// indices). Always returns a complete schedule.
    pub fn decode(&self, permutation: &[usize], bound: &SimpleBound) -> Decoded {
        let n = self.instance.nurse_count();
        debug_assert!(crate::genetic::is_permutation(permutation, n));
        let mut coverage = CoverageState::empty(self.instance);
        let mut assignment = vec![usize::MAX; n];
        let mut bound_fallbacks = 0;
        for &nurse in permutation {
            let pick = self.select(nurse, coverage.undercover(), bound);
            bound_fallbacks += usize::from(pick.bound_ignored);
            coverage.assign(self.instance, nurse, pick.pattern);
            assignment[nurse] = pick.pattern;
        }
        Decoded {
            schedule: Schedule::new(assignment),
            coverage,
            bound_fallbacks,
        }
    }
}
