//! Exact reference solver and schedule audit for small instances.
//!
//! [`solve_exact`] is a depth-first branch-and-bound over nurses in index
//! order. Each nurse branches on its feasible patterns in ascending cost
//! order. A node is cut when its cost plus the cheapest possible completion
//! cannot beat the incumbent, or when some (slot, grade) shortfall exceeds
//! what the remaining nurses could still supply.

use serde::{Deserialize, Serialize};

use crate::model::{GradeMatrix, Instance, Schedule, SLOTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    LimitExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub status: OracleStatus,
    /// Proven optimum when `status` is `Optimal`; best cost found otherwise.
    pub cost: Option<u32>,
    pub schedule: Option<Schedule>,
    pub nodes: u64,
}

impl OracleResult {
    pub fn optimal_cost(&self) -> Option<u32> {
        match self.status {
            OracleStatus::Optimal => self.cost,
            _ => None,
        }
    }
}

struct Search<'a> {
    instance: &'a Instance,
    grades: usize,
    branches: Vec<Vec<usize>>,
    /// Sum of per-nurse minimum costs of nurses `t..`.
    min_rest: Vec<u32>,
    /// `supply_rest[t][k * grades + s - 1]`: nurses `t..` that could cover
    /// slot `k` at grade `s`.
    supply_rest: Vec<Vec<u32>>,
    demand: Vec<u32>,
    supplied: Vec<u32>,
    assignment: Vec<usize>,
    best: Option<(u32, Vec<usize>)>,
    nodes: u64,
    node_limit: u64,
    aborted: bool,
}

impl Search<'_> {
    fn cover_possible(&self, t: usize) -> bool {
        let rest = &self.supply_rest[t];
        self.demand
            .iter()
            .zip(&self.supplied)
            .zip(rest)
            .all(|((&r, &got), &more)| r <= got + more)
    }

    fn apply(&mut self, nurse: usize, pattern: usize, delta: i32) {
        let grade = usize::from(self.instance.nurse(nurse).grade);
        for k in self.instance.pattern(pattern).slots() {
            for s in grade..=self.grades {
                let cell = &mut self.supplied[k * self.grades + s - 1];
                *cell = cell.wrapping_add_signed(delta);
            }
        }
    }

    fn descend(&mut self, t: usize, cost: u32) {
        let n = self.instance.nurse_count();
        if t == n {
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.assignment.clone()));
            }
            return;
        }
        for b in 0..self.branches[t].len() {
            let j = self.branches[t][b];
            let next = cost + self.instance.cost(t, j);
            // Branches are cost-sorted, so later ones cannot do better either.
            if self
                .best
                .as_ref()
                .is_some_and(|(best, _)| next + self.min_rest[t + 1] >= *best)
            {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.node_limit {
                self.aborted = true;
                return;
            }
            self.apply(t, j, 1);
            if self.cover_possible(t + 1) {
                self.assignment[t] = j;
                self.descend(t + 1, next);
            }
            self.apply(t, j, -1);
            if self.aborted {
                return;
            }
        }
    }
}

/// Exact optimum of the rostering integer program by branch-and-bound.
/// Gives up with `LimitExceeded` after `node_limit` branch nodes.
pub fn solve_exact(instance: &Instance, node_limit: u64) -> OracleResult {
    let n = instance.nurse_count();
    let grades = instance.grades();
    let branches: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut f = instance.feasible(i).to_vec();
            f.sort_by_key(|&j| (instance.cost(i, j), j));
            f
        })
        .collect();
    let mut min_rest = vec![0u32; n + 1];
    let mut supply_rest = vec![vec![0u32; SLOTS * grades]; n + 1];
    for i in (0..n).rev() {
        min_rest[i] = min_rest[i + 1] + instance.cost(i, branches[i][0]);
        let reach = instance
            .feasible(i)
            .iter()
            .fold(0u16, |acc, &j| acc | instance.pattern(j).bits());
        let grade = usize::from(instance.nurse(i).grade);
        let mut row = supply_rest[i + 1].clone();
        for k in 0..SLOTS {
            if reach & (1 << k) != 0 {
                for s in grade..=grades {
                    row[k * grades + s - 1] += 1;
                }
            }
        }
        supply_rest[i] = row;
    }
    let demand: Vec<u32> = (0..SLOTS)
        .flat_map(|k| (1..=grades).map(move |s| (k, s)))
        .map(|(k, s)| instance.demand().get(k, s))
        .collect();
    let mut search = Search {
        instance,
        grades,
        branches,
        min_rest,
        supply_rest,
        demand,
        supplied: vec![0; SLOTS * grades],
        assignment: vec![0; n],
        best: None,
        nodes: 0,
        node_limit,
        aborted: false,
    };
    if search.cover_possible(0) {
        search.descend(0, 0);
    }
    let status = match (&search.best, search.aborted) {
        (_, true) => OracleStatus::LimitExceeded,
        (Some(_), false) => OracleStatus::Optimal,
        (None, false) => OracleStatus::Infeasible,
    };
    let (cost, schedule) = match search.best {
        Some((c, a)) => (Some(c), Some(Schedule::new(a))),
        None => (None, None),
    };
    OracleResult {
        status,
        cost,
        schedule,
        nodes: search.nodes,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    /// 0-based slot.
    pub slot: usize,
    pub grade: usize,
    pub missing: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvalidAssignment {
    pub nurse: usize,
    pub pattern: usize,
}

/// Every constraint violation of a schedule.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Set when the schedule length differs from the nurse count:
    /// `(entries, nurses)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_mismatch: Option<(usize, usize)>,
    pub invalid: Vec<InvalidAssignment>,
    pub shortfalls: Vec<Shortfall>,
}

impl AuditReport {
    pub fn is_empty(&self) -> bool {
        self.length_mismatch.is_none() && self.invalid.is_empty() && self.shortfalls.is_empty()
    }

    pub fn total_shortfall(&self) -> u64 {
        self.shortfalls.iter().map(|s| u64::from(s.missing)).sum()
    }
}

/// Lists out-of-set assignments and every uncovered (slot, grade). Cover is
/// counted from the valid assignments only.
pub fn audit(schedule: &Schedule, instance: &Instance) -> AuditReport {
    let n = instance.nurse_count();
    let mut report = AuditReport::default();
    if schedule.len() != n {
        report.length_mismatch = Some((schedule.len(), n));
    }
    let grades = instance.grades();
    let mut supplied = GradeMatrix::zeros(grades);
    for (nurse, &pattern) in schedule.assignment().iter().enumerate().take(n) {
        if !instance.is_allowed(nurse, pattern) {
            report.invalid.push(InvalidAssignment { nurse, pattern });
            continue;
        }
        let grade = usize::from(instance.nurse(nurse).grade);
        for k in instance.pattern(pattern).slots() {
            for s in grade..=grades {
                supplied.set(k, s, supplied.get(k, s) + 1);
            }
        }
    }
    for (slot, grade, demand) in instance.demand().iter() {
        let got = supplied.get(slot, grade);
        if demand > got {
            report.shortfalls.push(Shortfall {
                slot,
                grade,
                missing: demand - got,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Nurse, ShiftPattern};

    fn singles() -> Vec<ShiftPattern> {
        (0..SLOTS).map(|k| ShiftPattern::from_slots([k]).unwrap()).collect()
    }

    fn nurse_with_costs(grade: u8, costs: &[(usize, u32)]) -> Nurse {
        let mut n = Nurse::standard(grade, 1, 1);
        n.costs.extend(costs.iter().copied());
        n
    }

    #[test]
    fn zero_demand_is_separable() {
        let nurses = vec![
            nurse_with_costs(1, &[(0, 5), (1, 2), (2, 9)]),
            nurse_with_costs(1, &[(0, 1), (3, 4)]),
        ];
        let inst = Instance::new("z", GradeMatrix::zeros(1), singles(), nurses).unwrap();
        let r = solve_exact(&inst, 1_000_000);
        assert_eq!(r.status, OracleStatus::Optimal);
        // Nurse 0: every uncosted pattern is free.
        assert_eq!(r.optimal_cost(), Some(0));
        assert!(audit(r.schedule.as_ref().unwrap(), &inst).is_empty());
    }

    #[test]
    fn grade_one_shortage_is_infeasible() {
        let mut d = GradeMatrix::zeros(2);
        d.set(0, 1, 2);
        let nurses = vec![Nurse::standard(1, 1, 1), Nurse::standard(2, 1, 1)];
        let inst = Instance::new("i", d, singles(), nurses).unwrap();
        let r = solve_exact(&inst, 1_000_000);
        assert_eq!(r.status, OracleStatus::Infeasible);
        assert_eq!(r.cost, None);
    }

    #[test]
    fn node_limit_is_reported() {
        let nurses = vec![Nurse::standard(1, 1, 1); 6];
        let mut d = GradeMatrix::zeros(1);
        for k in 0..6 {
            d.set(k, 1, 1);
        }
        let inst = Instance::new("l", d, singles(), nurses).unwrap();
        assert_eq!(solve_exact(&inst, 3).status, OracleStatus::LimitExceeded);
        assert_eq!(solve_exact(&inst, 1_000_000).status, OracleStatus::Optimal);
    }

    #[test]
    fn audit_reports_one_missing_night() {
        let mut d = GradeMatrix::zeros(3);
        d.set(9, 1, 1);
        let inst = Instance::new("a", d, singles(), vec![Nurse::standard(1, 1, 1)]).unwrap();
        let report = audit(&Schedule::new(vec![0]), &inst);
        assert_eq!(
            report.shortfalls,
            vec![Shortfall {
                slot: 9,
                grade: 1,
                missing: 1
            }]
        );
        assert!(report.invalid.is_empty());
        assert!(audit(&Schedule::new(vec![9]), &inst).is_empty());
    }

    #[test]
    fn audit_flags_bad_assignments() {
        let patterns = vec![
            ShiftPattern::parse("10000000000000").unwrap(),
            ShiftPattern::parse("11000000000000").unwrap(),
        ];
        let inst = Instance::new("b", GradeMatrix::zeros(1), patterns, vec![Nurse::standard(1, 1, 1)]).unwrap();
        let report = audit(&Schedule::new(vec![1]), &inst);
        assert_eq!(report.invalid, vec![InvalidAssignment { nurse: 0, pattern: 1 }]);
        let report = audit(&Schedule::new(vec![0, 0]), &inst);
        assert_eq!(report.length_mismatch, Some((2, 1)));
        assert!(!report.is_empty());
    }
}
