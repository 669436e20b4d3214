//! Synthetic instances.
//!
//! Every nurse draws a grade, a contract and a preferred side; preference
//! costs come from that side preference plus a few requested days off. In
//! planted mode a random schedule is drawn first and the demand is thinned
//! from its qualified cover, so the instance is feasible by construction.

mod io;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use io::{from_json, read_instance, read_instance_document, to_json, write_instance, InstanceDocument};

use crate::error::{Error, Result};
use crate::model::{
    GradeMatrix, Instance, Nurse, PatternKind, Schedule, ShiftPattern, Side, DAYS_PER_WEEK, MAX_COST,
    SLOTS,
};

/// Working shifts per week on days and on nights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contract {
    pub days: u8,
    pub nights: u8,
}

impl Contract {
    pub const fn new(days: u8, nights: u8) -> Self {
        Contract { days, nights }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum UniversePolicy {
    /// Every subset needed by the contract menu.
    AllSubsets,
    /// At most `per_group` random patterns per (kind, size) group.
    Sampled { per_group: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum DemandMode {
    /// Each unit of the planted schedule's cover is demanded with probability
    /// `tightness`.
    Planted { tightness: f64 },
    /// Independent draws capped at `tightness` times the number of nurses who
    /// could possibly supply each cell.
    Random { tightness: f64 },
}

impl DemandMode {
    pub fn tightness(self) -> f64 {
        match self {
            DemandMode::Planted { tightness } | DemandMode::Random { tightness } => tightness,
        }
    }
}

/// Preference cost recipe. Costs are integers clamped to `0..=100`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Probability that a nurse prefers days.
    pub day_preference: f64,
    /// Flat cost range for patterns on the non-preferred side.
    pub off_side: (u32, u32),
    /// Upper bound on requested days off per nurse.
    pub max_requests: usize,
    /// Cost range of one violated request.
    pub request_cost: (u32, u32),
    /// Probability that a pattern carries extra noise of `1..=noise_max`;
    /// patterns without noise on the preferred side avoiding every request
    /// cost nothing.
    pub noise_probability: f64,
    pub noise_max: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            day_preference: 0.7,
            off_side: (5, 25),
            max_requests: 2,
            request_cost: (5, 30),
            noise_probability: 0.3,
            noise_max: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub name: String,
    pub nurses: usize,
    pub grades: usize,
    /// Relative frequency of each grade, best grade first.
    pub grade_mix: Vec<f64>,
    /// Standard contracts, drawn uniformly.
    pub contracts: Vec<Contract>,
    /// Probability that a nurse is of the special type.
    pub special_probability: f64,
    /// Day/night splits for special nurses, drawn uniformly.
    pub special_splits: Vec<Contract>,
    pub universe: UniversePolicy,
    pub costs: CostModel,
    /// Probability that a feasible pattern is marked unavailable.
    pub unavailable_probability: f64,
    pub demand: DemandMode,
    /// Probability that a planted nurse works its preferred side.
    pub planted_on_preferred_side: f64,
    /// Drop request and noise costs from the planted patterns, leaving only
    /// the side component.
    pub discount_planted: bool,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            name: "synthetic".into(),
            nurses: 30,
            grades: 3,
            grade_mix: vec![0.25, 0.35, 0.4],
            contracts: vec![Contract::new(5, 4), Contract::new(4, 3), Contract::new(3, 2)],
            special_probability: 0.1,
            special_splits: vec![Contract::new(2, 1)],
            universe: UniversePolicy::AllSubsets,
            costs: CostModel::default(),
            unavailable_probability: 0.05,
            demand: DemandMode::Planted { tightness: 0.85 },
            planted_on_preferred_side: 0.95,
            discount_planted: true,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigInvalid(msg));
        if self.nurses == 0 || self.grades == 0 {
            return bad("at least one nurse and one grade are required".into());
        }
        if self.grade_mix.len() != self.grades
            || self.grade_mix.iter().any(|&w| !(w.is_finite() && w >= 0.0))
            || self.grade_mix.iter().sum::<f64>() <= 0.0
        {
            return bad(format!("grade mix {:?} does not fit {} grades", self.grade_mix, self.grades));
        }
        for (what, p) in [
            ("special probability", self.special_probability),
            ("unavailable probability", self.unavailable_probability),
            ("planted side probability", self.planted_on_preferred_side),
            ("day preference", self.costs.day_preference),
            ("noise probability", self.costs.noise_probability),
            ("tightness", self.demand.tightness()),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{what} must lie in [0, 1], got {p}"));
            }
        }
        let ok = |c: &Contract| c.days as usize <= DAYS_PER_WEEK && c.nights as usize <= DAYS_PER_WEEK;
        if self.special_probability < 1.0 {
            if self.contracts.is_empty() {
                return bad("standard nurses need at least one contract".into());
            }
            if self.contracts.iter().any(|c| !ok(c) || c.days == 0 || c.nights == 0) {
                return bad(format!("standard contracts need 1..=7 days and nights: {:?}", self.contracts));
            }
        }
        if self.special_probability > 0.0 {
            if self.special_splits.is_empty() {
                return bad("special nurses requested but no combined split given".into());
            }
            if self.special_splits.iter().any(|c| !ok(c) || c.days == 0 || c.nights == 0) {
                return bad(format!("combined splits need days and nights: {:?}", self.special_splits));
            }
        }
        let (lo, hi) = self.costs.off_side;
        let (rlo, rhi) = self.costs.request_cost;
        if lo > hi || rlo > rhi || hi > MAX_COST || rhi > MAX_COST || self.costs.noise_max > MAX_COST {
            return bad("cost ranges must be ordered and within 0..=100".into());
        }
        if let UniversePolicy::Sampled { per_group: 0 } = self.universe {
            return bad("sampled universe needs at least one pattern per group".into());
        }
        Ok(())
    }
}

/// A generated instance and, in planted mode, the schedule it was built around.
#[derive(Clone, Debug)]
pub struct Generated {
    pub instance: Instance,
    pub planted: Option<Schedule>,
}

/// All `size`-subsets of `0..7` in lexicographic order.
fn subsets(size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, left: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(pick.clone());
            return;
        }
        for d in start..=DAYS_PER_WEEK - left {
            pick.push(d);
            rec(d + 1, left - 1, pick, out);
            pick.pop();
        }
    }
    let mut out = Vec::new();
    if size <= DAYS_PER_WEEK {
        rec(0, size, &mut Vec::new(), &mut out);
    }
    out
}

fn pattern_of(days: &[usize], nights: &[usize]) -> ShiftPattern {
    ShiftPattern::from_slots(days.iter().copied().chain(nights.iter().map(|d| d + DAYS_PER_WEEK)))
        .expect("nonempty subset")
}

fn sample_group<R: Rng>(mut group: Vec<ShiftPattern>, policy: UniversePolicy, rng: &mut R) -> Vec<ShiftPattern> {
    if let UniversePolicy::Sampled { per_group } = policy {
        if group.len() > per_group {
            let mut keep = index::sample(rng, group.len(), per_group).into_vec();
            keep.sort_unstable();
            group = keep.into_iter().map(|i| group[i]).collect();
        }
    }
    group
}

/// Pattern universe for a contract menu: day groups by size, then night
/// groups, then combined splits, each in lexicographic order (earlier days
/// first).
pub fn pattern_universe<R: Rng>(
    contracts: &[Contract],
    special_splits: &[Contract],
    policy: UniversePolicy,
    rng: &mut R,
) -> Vec<ShiftPattern> {
    let mut day_sizes: Vec<usize> = contracts.iter().map(|c| c.days as usize).collect();
    let mut night_sizes: Vec<usize> = contracts.iter().map(|c| c.nights as usize).collect();
    let mut splits = special_splits.to_vec();
    day_sizes.sort_unstable();
    day_sizes.dedup();
    night_sizes.sort_unstable();
    night_sizes.dedup();
    splits.sort_by_key(|c| (c.days, c.nights));
    splits.dedup();

    let mut universe = Vec::new();
    for &size in &day_sizes {
        let group = subsets(size).iter().map(|d| pattern_of(d, &[])).collect();
        universe.extend(sample_group(group, policy, rng));
    }
    for &size in &night_sizes {
        let group = subsets(size).iter().map(|n| pattern_of(&[], n)).collect();
        universe.extend(sample_group(group, policy, rng));
    }
    for split in &splits {
        let nights = subsets(split.nights as usize);
        let group = subsets(split.days as usize)
            .iter()
            .flat_map(|d| nights.iter().map(move |n| pattern_of(d, n)))
            .collect();
        universe.extend(sample_group(group, policy, rng));
    }
    universe
}

fn pick_weighted<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

struct Profile {
    grade: u8,
    contract: Contract,
    special: bool,
    prefers: Side,
    requests: Vec<(usize, u32)>,
}

/// Side component and request-plus-noise component of a pattern's cost.
fn pattern_cost<R: Rng>(
    profile: &Profile,
    pattern: ShiftPattern,
    model: &CostModel,
    off_side: u32,
    rng: &mut R,
) -> (u32, u32) {
    let side_cost = match (pattern.kind(), profile.prefers) {
        (PatternKind::Day, Side::Night) | (PatternKind::Night, Side::Day) => off_side,
        _ => 0,
    };
    let request_cost: u32 = profile
        .requests
        .iter()
        .filter(|(day, _)| pattern.covers(*day) || pattern.covers(day + DAYS_PER_WEEK))
        .map(|(_, c)| c)
        .sum();
    let noise = if rng.gen::<f64>() < model.noise_probability {
        rng.gen_range(1..=model.noise_max.max(1))
    } else {
        0
    };
    (side_cost, request_cost + noise)
}

/// Draws one instance. Deterministic in `params` (including the seed).
pub fn generate(params: &GenParams) -> Result<Generated> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let universe = pattern_universe(&params.contracts, &params.special_splits, params.universe, &mut rng);
    let model = &params.costs;

    let profiles: Vec<Profile> = (0..params.nurses)
        .map(|_| {
            let grade = pick_weighted(&params.grade_mix, &mut rng) as u8 + 1;
            let special = rng.gen::<f64>() < params.special_probability;
            let menu = if special { &params.special_splits } else { &params.contracts };
            let contract = *menu.choose(&mut rng).expect("validated nonempty");
            let prefers = if rng.gen::<f64>() < model.day_preference { Side::Day } else { Side::Night };
            let count = rng.gen_range(0..=model.max_requests);
            let requests = index::sample(&mut rng, DAYS_PER_WEEK, count.min(DAYS_PER_WEEK))
                .into_iter()
                .map(|day| (day, rng.gen_range(model.request_cost.0..=model.request_cost.1)))
                .collect();
            Profile {
                grade,
                contract,
                special,
                prefers,
                requests,
            }
        })
        .collect();

    let mut nurses = Vec::with_capacity(params.nurses);
    let mut planted = Vec::with_capacity(params.nurses);
    for profile in &profiles {
        let base = Nurse {
            grade: profile.grade,
            days: profile.contract.days,
            nights: profile.contract.nights,
            both: profile.special.then(|| profile.contract.days + profile.contract.nights),
            preference: profile.prefers,
            costs: Default::default(),
            unavailable: Default::default(),
        };
        let feasible: Vec<usize> = (0..universe.len()).filter(|&j| base.contract_allows(universe[j])).collect();
        if feasible.is_empty() {
            return Err(Error::ConfigInvalid(format!(
                "no pattern in the universe fits contract {:?}",
                profile.contract
            )));
        }
        let planted_side = if rng.gen::<f64>() < params.planted_on_preferred_side {
            profile.prefers
        } else {
            profile.prefers.opposite()
        };
        let on_side: Vec<usize> = feasible
            .iter()
            .copied()
            .filter(|&j| match universe[j].kind() {
                PatternKind::Day => planted_side == Side::Day,
                PatternKind::Night => planted_side == Side::Night,
                PatternKind::Combined => true,
            })
            .collect();
        let pool = if on_side.is_empty() { &feasible } else { &on_side };
        let chosen = *pool.choose(&mut rng).expect("nonempty pool");

        let off_side = rng.gen_range(model.off_side.0..=model.off_side.1);
        let mut nurse = base;
        for &j in &feasible {
            let (side, extra) = pattern_cost(profile, universe[j], model, off_side, &mut rng);
            let extra = if params.discount_planted && j == chosen { 0 } else { extra };
            let cost = (side + extra).min(MAX_COST);
            if cost > 0 {
                nurse.costs.insert(j, cost);
            }
        }
        for &j in &feasible {
            if j != chosen && rng.gen::<f64>() < params.unavailable_probability {
                nurse.unavailable.insert(j);
            }
        }
        nurse.preference = lower_mean_side(&nurse, &universe, &feasible).unwrap_or(profile.prefers);
        nurses.push(nurse);
        planted.push(chosen);
    }

    let planted = Schedule::new(planted);
    let grades = params.grades;
    let mut demand = GradeMatrix::zeros(grades);
    let is_planted = matches!(params.demand, DemandMode::Planted { .. });
    match params.demand {
        DemandMode::Planted { tightness } => {
            let mut cover = GradeMatrix::zeros(grades);
            for (i, &j) in planted.assignment().iter().enumerate() {
                for k in universe[j].slots() {
                    for s in usize::from(nurses[i].grade)..=grades {
                        cover.set(k, s, cover.get(k, s) + 1);
                    }
                }
            }
            for (k, s, c) in cover.iter() {
                let kept = (0..c).filter(|_| rng.gen::<f64>() < tightness).count() as u32;
                demand.set(k, s, kept);
            }
        }
        DemandMode::Random { tightness } => {
            for k in 0..SLOTS {
                for s in 1..=grades {
                    let reach = nurses
                        .iter()
                        .filter(|n| n.qualifies_for(s))
                        .filter(|n| {
                            universe
                                .iter()
                                .enumerate()
                                .any(|(j, p)| p.covers(k) && n.contract_allows(*p) && !n.unavailable.contains(&j))
                        })
                        .count() as u32;
                    let cap = (tightness * f64::from(reach)).floor() as u32;
                    demand.set(k, s, rng.gen_range(0..=reach).min(cap));
                }
            }
        }
    }

    let instance = Instance::new(params.name.clone(), demand, universe, nurses)?;
    Ok(Generated {
        instance,
        planted: is_planted.then_some(planted),
    })
}

/// Side whose feasible patterns are cheaper on average; `None` for nurses
/// with only combined patterns or an exact tie.
fn lower_mean_side(nurse: &Nurse, universe: &[ShiftPattern], feasible: &[usize]) -> Option<Side> {
    let mean = |kind: PatternKind| {
        let costs: Vec<f64> = feasible
            .iter()
            .filter(|&&j| universe[j].kind() == kind && !nurse.unavailable.contains(&j))
            .map(|&j| f64::from(nurse.cost(j)))
            .collect();
        (!costs.is_empty()).then(|| costs.iter().sum::<f64>() / costs.len() as f64)
    };
    match (mean(PatternKind::Day), mean(PatternKind::Night)) {
        (Some(d), Some(n)) if d < n => Some(Side::Day),
        (Some(d), Some(n)) if n < d => Some(Side::Night),
        _ => None,
    }
}

/// Demand tightness band of a benchmark corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Loose,
    Medium,
    Tight,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Loose, Band::Medium, Band::Tight];

    pub fn tightness(self) -> f64 {
        match self {
            Band::Loose => 0.9,
            Band::Medium => 0.97,
            Band::Tight => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::Loose => "loose",
            Band::Medium => "medium",
            Band::Tight => "tight",
        }
    }
}

/// Recipe for a benchmark corpus: `count` planted instances cycling through
/// the three tightness bands, seeds `seed, seed + 1, ...`.
pub fn corpus_params(count: usize, template: &GenParams, prefix: &str) -> Vec<(Band, GenParams)> {
    (0..count)
        .map(|i| {
            let band = Band::ALL[i % Band::ALL.len()];
            let params = GenParams {
                name: format!("{prefix}-{i:02}-{}", band.name()),
                demand: DemandMode::Planted {
                    tightness: band.tightness(),
                },
                seed: template.seed.wrapping_add(i as u64),
                ..template.clone()
            };
            (band, params)
        })
        .collect()
}

/// Patterns kept per (kind, size) group in the benchmark corpus.
pub const CORPUS_PER_GROUP: usize = 16;

/// Full-size corpus template: 30 nurses and 3 grades like the defaults, but
/// with a curated pattern list of at most 16 patterns per (kind, size) group
/// instead of every subset.
pub fn corpus_template(seed: u64) -> GenParams {
    GenParams {
        universe: UniversePolicy::Sampled {
            per_group: CORPUS_PER_GROUP,
        },
        seed,
        ..GenParams::default()
    }
}

/// Desk-scale template for exact solving: the full-size cost model with
/// `nurses` nurses and at most six patterns per (kind, size) group, so
/// `|F(i)| <= 12`.
pub fn small_template(nurses: usize, seed: u64) -> GenParams {
    GenParams {
        nurses,
        universe: UniversePolicy::Sampled { per_group: 6 },
        seed,
        ..GenParams::default()
    }
}
