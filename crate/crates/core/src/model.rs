//! Problem data: shift patterns, nurses, demand, and the accounting every
//! other module is measured against (coverage, preference cost, penalized
//! fitness).
//!
//! Slots are 0-based in code: `0..7` are the day shifts Sunday..Saturday and
//! `7..14` the night shifts Sunday..Saturday. Grades are 1-based values with
//! 1 the most qualified; a nurse of grade `g` counts towards the demand of
//! every grade `s >= g`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SLOTS: usize = 14;
pub const DAYS_PER_WEEK: usize = 7;
/// Upper end of the preference cost scale; the decoders score `100 - p`.
pub const MAX_COST: u32 = 100;

const DAY_MASK: u16 = 0x007f;
const NIGHT_MASK: u16 = 0x3f80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Day,
    Night,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Day => Side::Night,
            Side::Night => Side::Day,
        }
    }

    /// Slot indices belonging to this half of the week.
    pub fn slots(self) -> std::ops::Range<usize> {
        match self {
            Side::Day => 0..DAYS_PER_WEEK,
            Side::Night => DAYS_PER_WEEK..SLOTS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Day,
    Night,
    Combined,
}

/// A weekly work pattern: one bit per slot.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftPattern {
    bits: u16,
}

impl ShiftPattern {
    /// Builds a pattern from a bitmask (bit `k` = slot `k`). The empty pattern
    /// is rejected because it has no kind.
    pub fn from_bits(bits: u16) -> Result<Self> {
        if bits == 0 || bits & !(DAY_MASK | NIGHT_MASK) != 0 {
            return Err(Error::InstanceInvalid(format!(
                "pattern bitmask {bits:#06x} is empty or exceeds {SLOTS} slots"
            )));
        }
        Ok(ShiftPattern { bits })
    }

    pub fn from_slots<I: IntoIterator<Item = usize>>(slots: I) -> Result<Self> {
        let mut bits = 0u16;
        for slot in slots {
            if slot >= SLOTS {
                return Err(Error::InstanceInvalid(format!("slot {slot} out of range")));
            }
            bits |= 1 << slot;
        }
        Self::from_bits(bits)
    }

    /// Parses the 14-character `0`/`1` form used in instance files.
    pub fn parse(text: &str) -> Result<Self> {
        if text.len() != SLOTS {
            return Err(Error::InstanceInvalid(format!(
                "pattern {text:?} must have exactly {SLOTS} characters"
            )));
        }
        let mut bits = 0u16;
        for (slot, c) in text.chars().enumerate() {
            match c {
                '1' => bits |= 1 << slot,
                '0' => {}
                _ => {
                    return Err(Error::InstanceInvalid(format!(
                        "pattern {text:?} contains {c:?}"
                    )))
                }
            }
        }
        Self::from_bits(bits)
    }

    #[inline]
    pub fn bits(self) -> u16 {
        self.bits
    }

    #[inline]
    pub fn covers(self, slot: usize) -> bool {
        slot < SLOTS && self.bits & (1 << slot) != 0
    }

    pub fn day_count(self) -> u32 {
        (self.bits & DAY_MASK).count_ones()
    }

    pub fn night_count(self) -> u32 {
        (self.bits & NIGHT_MASK).count_ones()
    }

    pub fn shift_count(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn kind(self) -> PatternKind {
        match (self.bits & DAY_MASK != 0, self.bits & NIGHT_MASK != 0) {
            (true, false) => PatternKind::Day,
            (false, true) => PatternKind::Night,
            _ => PatternKind::Combined,
        }
    }

    /// Covered slots in ascending order.
    pub fn slots(self) -> SlotIter {
        SlotIter { bits: self.bits }
    }
}

impl fmt::Display for ShiftPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for slot in 0..SLOTS {
            f.write_str(if self.covers(slot) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for ShiftPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShiftPattern({self})")
    }
}

pub struct SlotIter {
    bits: u16,
}

impl Iterator for SlotIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let slot = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(slot)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkerType {
    /// Works either all days or all nights in a week.
    Standard,
    /// Works a fixed mixture of days and nights.
    Special,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nurse {
    /// 1 is the highest grade.
    pub grade: u8,
    /// Shifts per week when working days.
    pub days: u8,
    /// Shifts per week when working nights.
    pub nights: u8,
    /// Total shifts per week for special nurses. For them `days` and `nights`
    /// give the fixed split and must add up to this value.
    pub both: Option<u8>,
    /// Tie-break side for the cover decoder.
    pub preference: Side,
    /// Sparse preference costs; patterns not listed cost 0.
    pub costs: BTreeMap<usize, u32>,
    /// Patterns that break a mandatory contractual rule for this nurse.
    pub unavailable: BTreeSet<usize>,
}

impl Nurse {
    pub fn standard(grade: u8, days: u8, nights: u8) -> Self {
        Nurse {
            grade,
            days,
            nights,
            both: None,
            preference: Side::Day,
            costs: BTreeMap::new(),
            unavailable: BTreeSet::new(),
        }
    }

    pub fn special(grade: u8, days: u8, nights: u8) -> Self {
        Nurse {
            both: Some(days + nights),
            ..Nurse::standard(grade, days, nights)
        }
    }

    pub fn worker_type(&self) -> WorkerType {
        if self.both.is_some() {
            WorkerType::Special
        } else {
            WorkerType::Standard
        }
    }

    /// `q_is`: whether this nurse counts towards demand at `grade`.
    #[inline]
    pub fn qualifies_for(&self, grade: usize) -> bool {
        usize::from(self.grade) <= grade
    }

    pub fn cost(&self, pattern: usize) -> u32 {
        self.costs.get(&pattern).copied().unwrap_or(0)
    }

    /// Whether `pattern` matches this nurse's contract, ignoring availability.
    pub fn contract_allows(&self, pattern: ShiftPattern) -> bool {
        let (days, nights) = (u32::from(self.days), u32::from(self.nights));
        match (self.both, pattern.kind()) {
            (None, PatternKind::Day) => pattern.day_count() == days,
            (None, PatternKind::Night) => pattern.night_count() == nights,
            (Some(both), PatternKind::Combined) => {
                pattern.shift_count() == u32::from(both)
                    && pattern.day_count() == days
                    && pattern.night_count() == nights
            }
            _ => false,
        }
    }
}

/// The set `F(i)`: indices of patterns that match the nurse's contract and are
/// not marked unavailable, in ascending index order.
pub fn feasible_patterns(nurse: &Nurse, patterns: &[ShiftPattern]) -> Result<Vec<usize>> {
    if patterns.is_empty() {
        return Err(Error::InstanceInvalid("pattern universe is empty".into()));
    }
    let set: Vec<usize> = patterns
        .iter()
        .enumerate()
        .filter(|&(j, &p)| nurse.contract_allows(p) && !nurse.unavailable.contains(&j))
        .map(|(j, _)| j)
        .collect();
    if set.is_empty() {
        return Err(Error::InstanceInvalid(format!(
            "no feasible pattern for a grade {} nurse with days={} nights={} both={:?}",
            nurse.grade, nurse.days, nurse.nights, nurse.both
        )));
    }
    Ok(set)
}

/// A `14 x grades` table of counts, used for demand, supply and undercover.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradeMatrix {
    grades: usize,
    cells: Vec<u32>,
}

impl GradeMatrix {
    pub fn zeros(grades: usize) -> Self {
        GradeMatrix {
            grades,
            cells: vec![0; SLOTS * grades],
        }
    }

    /// Builds from 14 rows of `grades` entries each.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        if rows.len() != SLOTS {
            return Err(Error::InstanceInvalid(format!(
                "demand has {} rows, expected {SLOTS}",
                rows.len()
            )));
        }
        let grades = rows[0].len();
        if grades == 0 {
            return Err(Error::InstanceInvalid("demand rows are empty".into()));
        }
        if let Some(k) = rows.iter().position(|r| r.len() != grades) {
            return Err(Error::InstanceInvalid(format!(
                "demand row {k} has {} entries, expected {grades}",
                rows[k].len()
            )));
        }
        Ok(GradeMatrix {
            grades,
            cells: rows.concat(),
        })
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.cells.chunks(self.grades).map(<[u32]>::to_vec).collect()
    }

    pub fn grades(&self) -> usize {
        self.grades
    }

    /// `grade` is 1-based.
    #[inline]
    pub fn get(&self, slot: usize, grade: usize) -> u32 {
        self.cells[slot * self.grades + grade - 1]
    }

    #[inline]
    pub fn set(&mut self, slot: usize, grade: usize, value: u32) {
        self.cells[slot * self.grades + grade - 1] = value;
    }

    #[inline]
    pub(crate) fn row(&self, slot: usize) -> &[u32] {
        &self.cells[slot * self.grades..(slot + 1) * self.grades]
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|&c| c == 0)
    }

    /// `(slot, grade, value)` for every cell, grade 1-based.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i / self.grades, i % self.grades + 1, v))
    }
}

/// One pattern index per nurse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    assignment: Vec<usize>,
}

impl Schedule {
    pub fn new(assignment: Vec<usize>) -> Self {
        Schedule { assignment }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn pattern_of(&self, nurse: usize) -> usize {
        self.assignment[nurse]
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

/// Achieved qualified cover and the remaining shortfall for a (possibly
/// partial) schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageState {
    supplied: GradeMatrix,
    undercover: GradeMatrix,
}

impl CoverageState {
    /// Nothing assigned yet: undercover equals demand.
    pub fn empty(instance: &Instance) -> Self {
        CoverageState {
            supplied: GradeMatrix::zeros(instance.grades()),
            undercover: instance.demand().clone(),
        }
    }

    /// Adds one nurse's qualified contribution. Membership of `pattern` in the
    /// nurse's feasible set is the caller's responsibility.
    pub fn assign(&mut self, instance: &Instance, nurse: usize, pattern: usize) {
        let grade = usize::from(instance.nurse(nurse).grade);
        let grades = instance.grades();
        for slot in instance.pattern(pattern).slots() {
            for s in grade..=grades {
                let supplied = self.supplied.get(slot, s) + 1;
                self.supplied.set(slot, s, supplied);
                let under = self.undercover.get(slot, s);
                if under > 0 {
                    self.undercover.set(slot, s, under - 1);
                }
            }
        }
    }

    pub fn supplied(&self) -> &GradeMatrix {
        &self.supplied
    }

    pub fn undercover(&self) -> &GradeMatrix {
        &self.undercover
    }

    pub fn total_undercover(&self) -> u64 {
        self.undercover.total()
    }

    pub fn is_covered(&self) -> bool {
        self.undercover.is_zero()
    }
}

/// A phase-two rostering instance. Immutable once built; derived tables
/// (feasible sets, dense costs) are computed in [`Instance::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    name: String,
    grades: usize,
    demand: GradeMatrix,
    patterns: Vec<ShiftPattern>,
    nurses: Vec<Nurse>,
    feasible: Vec<Vec<usize>>,
    allowed: Vec<Vec<bool>>,
    cost_table: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        demand: GradeMatrix,
        patterns: Vec<ShiftPattern>,
        nurses: Vec<Nurse>,
    ) -> Result<Self> {
        let grades = demand.grades();
        if grades == 0 {
            return Err(Error::InstanceInvalid("at least one grade is required".into()));
        }
        if nurses.is_empty() {
            return Err(Error::InstanceInvalid("instance has no nurses".into()));
        }
        let m = patterns.len();
        let mut feasible = Vec::with_capacity(nurses.len());
        let mut allowed = Vec::with_capacity(nurses.len());
        let mut cost_table = Vec::with_capacity(nurses.len());
        for (i, nurse) in nurses.iter().enumerate() {
            let context = |msg: String| Error::InstanceInvalid(format!("nurse {i}: {msg}"));
            if nurse.grade == 0 || usize::from(nurse.grade) > grades {
                return Err(context(format!("grade {} outside 1..={grades}", nurse.grade)));
            }
            if let Some(both) = nurse.both {
                if u32::from(both) != u32::from(nurse.days) + u32::from(nurse.nights) {
                    return Err(context(format!(
                        "special contract both={both} differs from days+nights={}",
                        u32::from(nurse.days) + u32::from(nurse.nights)
                    )));
                }
            }
            if let Some((&j, &c)) = nurse.costs.iter().find(|&(&j, &c)| j >= m || c > MAX_COST) {
                return Err(context(format!("cost {c} for pattern {j} is out of range")));
            }
            if let Some(&j) = nurse.unavailable.iter().find(|&&j| j >= m) {
                return Err(context(format!("unavailable pattern {j} does not exist")));
            }
            let set = feasible_patterns(nurse, &patterns).map_err(|e| match e {
                Error::InstanceInvalid(msg) => context(msg),
                other => other,
            })?;
            let mut mask = vec![false; m];
            for &j in &set {
                mask[j] = true;
            }
            let mut costs = vec![0; m];
            for (&j, &c) in &nurse.costs {
                costs[j] = c;
            }
            feasible.push(set);
            allowed.push(mask);
            cost_table.push(costs);
        }
        Ok(Instance {
            name: name.into(),
            grades,
            demand,
            patterns,
            nurses,
            feasible,
            allowed,
            cost_table,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grades(&self) -> usize {
        self.grades
    }

    pub fn demand(&self) -> &GradeMatrix {
        &self.demand
    }

    pub fn patterns(&self) -> &[ShiftPattern] {
        &self.patterns
    }

    pub fn pattern(&self, j: usize) -> ShiftPattern {
        self.patterns[j]
    }

    pub fn nurses(&self) -> &[Nurse] {
        &self.nurses
    }

    pub fn nurse(&self, i: usize) -> &Nurse {
        &self.nurses[i]
    }

    pub fn nurse_count(&self) -> usize {
        self.nurses.len()
    }

    /// `F(i)` in ascending pattern order.
    pub fn feasible(&self, nurse: usize) -> &[usize] {
        &self.feasible[nurse]
    }

    pub fn is_allowed(&self, nurse: usize, pattern: usize) -> bool {
        self.allowed[nurse].get(pattern).copied().unwrap_or(false)
    }

    /// `p_ij`.
    #[inline]
    pub fn cost(&self, nurse: usize, pattern: usize) -> u32 {
        self.cost_table[nurse][pattern]
    }

    /// Returns a copy with a different demand matrix.
    pub fn with_demand(&self, demand: GradeMatrix) -> Result<Self> {
        if demand.grades() != self.grades {
            return Err(Error::InstanceInvalid(format!(
                "demand has {} grades, instance has {}",
                demand.grades(),
                self.grades
            )));
        }
        Ok(Instance {
            demand,
            ..self.clone()
        })
    }

    fn check_assignment(&self, nurse: usize, pattern: usize) -> Result<()> {
        if nurse >= self.nurse_count() || !self.is_allowed(nurse, pattern) {
            return Err(Error::ScheduleInvalid(format!(
                "pattern {pattern} is not feasible for nurse {nurse}"
            )));
        }
        Ok(())
    }

    pub fn check_schedule(&self, schedule: &Schedule) -> Result<()> {
        if schedule.len() != self.nurse_count() {
            return Err(Error::ScheduleInvalid(format!(
                "schedule has {} entries for {} nurses",
                schedule.len(),
                self.nurse_count()
            )));
        }
        for (i, &j) in schedule.assignment().iter().enumerate() {
            self.check_assignment(i, j)?;
        }
        Ok(())
    }

    /// Coverage of a partial schedule; `None` entries are unassigned nurses.
    pub fn coverage(&self, partial: &[Option<usize>]) -> Result<CoverageState> {
        if partial.len() > self.nurse_count() {
            return Err(Error::ScheduleInvalid(format!(
                "{} entries for {} nurses",
                partial.len(),
                self.nurse_count()
            )));
        }
        let mut state = CoverageState::empty(self);
        for (i, &slot) in partial.iter().enumerate() {
            if let Some(j) = slot {
                self.check_assignment(i, j)?;
                state.assign(self, i, j);
            }
        }
        Ok(state)
    }

    pub fn schedule_coverage(&self, schedule: &Schedule) -> Result<CoverageState> {
        self.check_schedule(schedule)?;
        let mut state = CoverageState::empty(self);
        for (i, &j) in schedule.assignment().iter().enumerate() {
            state.assign(self, i, j);
        }
        Ok(state)
    }

    /// Total preference cost `sum_i p_{i, j(i)}`.
    pub fn solution_cost(&self, schedule: &Schedule) -> Result<u32> {
        self.check_schedule(schedule)?;
        Ok(self.cost_unchecked(schedule))
    }

    pub(crate) fn cost_unchecked(&self, schedule: &Schedule) -> u32 {
        schedule
            .assignment()
            .iter()
            .enumerate()
            .map(|(i, &j)| self.cost(i, j))
            .sum()
    }

    /// Preference cost plus `penalty_weight` per uncovered (slot, grade) unit.
    pub fn fitness(&self, schedule: &Schedule, penalty_weight: f64) -> Result<f64> {
        let evaluation = self.evaluate(schedule, penalty_weight)?;
        Ok(evaluation.fitness)
    }

    pub fn is_feasible(&self, schedule: &Schedule) -> Result<bool> {
        Ok(self.schedule_coverage(schedule)?.is_covered())
    }

    /// Cost, undercover and fitness in one pass.
    pub fn evaluate(&self, schedule: &Schedule, penalty_weight: f64) -> Result<Evaluation> {
        check_penalty_weight(penalty_weight)?;
        let coverage = self.schedule_coverage(schedule)?;
        Ok(Evaluation::new(
            self.cost_unchecked(schedule),
            coverage.total_undercover(),
            penalty_weight,
        ))
    }
}

pub(crate) fn check_penalty_weight(w: f64) -> Result<()> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(Error::ConfigInvalid(format!(
            "penalty weight must be a nonnegative number, got {w}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub cost: u32,
    pub undercover: u64,
    pub fitness: f64,
}

impl Evaluation {
    pub fn new(cost: u32, undercover: u64, penalty_weight: f64) -> Self {
        Evaluation {
            cost,
            undercover,
            fitness: f64::from(cost) + penalty_weight * undercover as f64,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.undercover == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every subset of `size` slots within one half of the week.
    fn half_patterns(side: Side, size: usize) -> Vec<ShiftPattern> {
        let offset = side.slots().start;
        (0u16..128)
            .filter(|b| b.count_ones() as usize == size)
            .map(|b| ShiftPattern::from_bits(b << offset).unwrap())
            .collect()
    }

    fn all_half_patterns() -> Vec<ShiftPattern> {
        (1..=7)
            .flat_map(|n| {
                let mut v = half_patterns(Side::Day, n);
                v.extend(half_patterns(Side::Night, n));
                v
            })
            .collect()
    }

    fn single_grade_instance(patterns: Vec<ShiftPattern>, nurses: Vec<Nurse>, r: u32) -> Instance {
        let demand = GradeMatrix::from_rows(&vec![vec![r]; SLOTS]).unwrap();
        Instance::new("t", demand, patterns, nurses).unwrap()
    }

    #[test]
    fn pattern_kinds_follow_halves() {
        assert_eq!(ShiftPattern::parse("11000000000000").unwrap().kind(), PatternKind::Day);
        assert_eq!(ShiftPattern::parse("00000000000001").unwrap().kind(), PatternKind::Night);
        assert_eq!(
            ShiftPattern::parse("10000001000000").unwrap().kind(),
            PatternKind::Combined
        );
        assert!(ShiftPattern::parse("00000000000000").is_err());
        assert!(ShiftPattern::parse("0000000000000").is_err());
        assert!(ShiftPattern::parse("0000000000000x").is_err());
    }

    #[test]
    fn pattern_text_round_trips() {
        let p = ShiftPattern::parse("01010000100001").unwrap();
        assert_eq!(p.to_string(), "01010000100001");
        assert_eq!(p.slots().collect::<Vec<_>>(), vec![1, 3, 8, 13]);
        assert_eq!((p.day_count(), p.night_count()), (2, 2));
    }

    #[test]
    fn nurse_without_shifts_has_no_feasible_pattern() {
        let nurse = Nurse::standard(1, 0, 0);
        assert!(matches!(
            feasible_patterns(&nurse, &all_half_patterns()),
            Err(Error::InstanceInvalid(_))
        ));
    }

    #[test]
    fn full_week_contract_has_two_patterns() {
        let universe = all_half_patterns();
        let set = feasible_patterns(&Nurse::standard(1, 7, 7), &universe).unwrap();
        let chosen: Vec<String> = set.iter().map(|&j| universe[j].to_string()).collect();
        assert_eq!(chosen, vec!["11111110000000", "00000001111111"]);
    }

    #[test]
    fn four_days_or_three_nights() {
        // C(7,4) + C(7,3), counted by brute-force enumeration of all 2^14 masks.
        let universe: Vec<ShiftPattern> = (1u16..1 << 14)
            .map(|b| ShiftPattern::from_bits(b).unwrap())
            .filter(|p| {
                (p.kind() == PatternKind::Day && p.day_count() == 4)
                    || (p.kind() == PatternKind::Night && p.night_count() == 3)
            })
            .collect();
        assert_eq!(universe.len(), 70);
        let set = feasible_patterns(&Nurse::standard(2, 4, 3), &universe).unwrap();
        assert_eq!(set.len(), 70);
    }

    #[test]
    fn special_nurses_only_get_matching_combined_patterns() {
        let universe: Vec<ShiftPattern> = ["11000001000000", "11100000000000", "10000001100000", "11000000100000"]
            .iter()
            .map(|s| ShiftPattern::parse(s).unwrap())
            .collect();
        let set = feasible_patterns(&Nurse::special(1, 2, 1), &universe).unwrap();
        assert_eq!(set, vec![0, 3]);
    }

    #[test]
    fn unavailable_patterns_are_excluded() {
        let universe = half_patterns(Side::Day, 6);
        let mut nurse = Nurse::standard(1, 6, 6);
        nurse.unavailable.insert(0);
        nurse.unavailable.insert(3);
        let set = feasible_patterns(&nurse, &universe).unwrap();
        assert_eq!(set, vec![1, 2, 4, 5, 6]);
    }

    #[test]
    fn empty_partial_schedule_leaves_full_demand() {
        let inst = single_grade_instance(all_half_patterns(), vec![Nurse::standard(1, 7, 7)], 1);
        let cov = inst.coverage(&[]).unwrap();
        assert_eq!(cov.undercover(), inst.demand());
        assert_eq!(cov.total_undercover(), 14);
    }

    #[test]
    fn all_days_pattern_covers_day_half() {
        let universe = all_half_patterns();
        let inst = single_grade_instance(universe.clone(), vec![Nurse::standard(1, 7, 7)], 1);
        let all_days = inst.feasible(0)[0];
        assert_eq!(universe[all_days].to_string(), "11111110000000");
        let cov = inst.coverage(&[Some(all_days)]).unwrap();
        for k in 0..SLOTS {
            assert_eq!(cov.undercover().get(k, 1), u32::from(k >= 7), "slot {k}");
        }
    }

    #[test]
    fn lower_grade_nurse_is_gated_by_qualification() {
        let pattern = ShiftPattern::parse("10000000000000").unwrap();
        let demand = GradeMatrix::zeros(3);
        let inst = Instance::new("g", demand, vec![pattern], vec![Nurse::standard(2, 1, 1)]).unwrap();
        let cov = inst.coverage(&[Some(0)]).unwrap();
        assert_eq!(cov.supplied().get(0, 1), 0);
        assert_eq!(cov.supplied().get(0, 2), 1);
        assert_eq!(cov.supplied().get(0, 3), 1);
        assert_eq!(cov.supplied().total(), 2);
    }

    #[test]
    fn out_of_set_assignment_is_rejected() {
        let universe = all_half_patterns();
        let inst = single_grade_instance(universe, vec![Nurse::standard(1, 7, 7)], 0);
        assert!(matches!(inst.coverage(&[Some(0)]), Err(Error::ScheduleInvalid(_))));
        assert!(matches!(
            inst.solution_cost(&Schedule::new(vec![0])),
            Err(Error::ScheduleInvalid(_))
        ));
        assert!(inst.solution_cost(&Schedule::new(vec![])).is_err());
    }

    #[test]
    fn cost_is_additive() {
        let universe = half_patterns(Side::Day, 7);
        let mut a = Nurse::standard(1, 7, 7);
        a.costs.insert(0, 3);
        let mut b = Nurse::standard(1, 7, 7);
        b.costs.insert(0, 8);
        let inst = single_grade_instance(universe, vec![a, b], 0);
        let s = Schedule::new(vec![0, 0]);
        assert_eq!(inst.solution_cost(&s).unwrap(), 11);
        assert_eq!(inst.fitness(&s, 20.0).unwrap(), 11.0);
        assert!(inst.is_feasible(&s).unwrap());
    }

    #[test]
    fn zero_cost_schedule_costs_nothing() {
        let inst = single_grade_instance(half_patterns(Side::Day, 7), vec![Nurse::standard(1, 7, 7)], 0);
        assert_eq!(inst.solution_cost(&Schedule::new(vec![0])).unwrap(), 0);
    }

    #[test]
    fn penalty_adds_weighted_undercover() {
        // Three uncovered night slots, preference cost 10.
        let universe = vec![ShiftPattern::parse("11111110000000").unwrap()];
        let mut nurse = Nurse::standard(1, 7, 7);
        nurse.costs.insert(0, 10);
        let mut rows = vec![vec![0]; SLOTS];
        for row in rows.iter_mut().skip(7).take(3) {
            row[0] = 1;
        }
        let inst = Instance::new("p", GradeMatrix::from_rows(&rows).unwrap(), universe, vec![nurse]).unwrap();
        let s = Schedule::new(vec![0]);
        assert_eq!(inst.fitness(&s, 20.0).unwrap(), 70.0);
        assert_eq!(inst.fitness(&s, 0.0).unwrap(), 10.0);
        assert!(!inst.is_feasible(&s).unwrap());
        assert!(matches!(inst.fitness(&s, -1.0), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn demand_beyond_supply_is_never_feasible() {
        let universe = half_patterns(Side::Day, 7);
        let inst = single_grade_instance(universe, vec![Nurse::standard(1, 7, 7)], 2);
        assert!(!inst.is_feasible(&Schedule::new(vec![0])).unwrap());
    }

    #[test]
    fn instance_validation() {
        let universe = all_half_patterns();
        let demand = GradeMatrix::zeros(2);
        let bad_grade = Instance::new("x", demand.clone(), universe.clone(), vec![Nurse::standard(3, 5, 4)]);
        assert!(matches!(bad_grade, Err(Error::InstanceInvalid(_))));
        let mut pricey = Nurse::standard(1, 5, 4);
        pricey.costs.insert(0, 101);
        assert!(Instance::new("x", demand.clone(), universe.clone(), vec![pricey]).is_err());
        let mut bad_special = Nurse::special(1, 2, 2);
        bad_special.both = Some(5);
        assert!(Instance::new("x", demand.clone(), universe.clone(), vec![bad_special]).is_err());
        assert!(GradeMatrix::from_rows(&vec![vec![0, 0]; 13]).is_err());
        let mut ragged = vec![vec![0, 0]; SLOTS];
        ragged[4] = vec![0];
        assert!(GradeMatrix::from_rows(&ragged).is_err());
    }
}
