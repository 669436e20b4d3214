//! JSON instance files.
//!
//! ```json
//! {
//!   "name": "syn-00-loose",
//!   "grades": 3,
//!   "demand": [[1, 2, 4], ...],          // 14 rows, Sun..Sat days then nights
//!   "patterns": ["11111000000000", ...],
//!   "nurses": [{"grade": 1, "days": 5, "nights": 4, "preference": "day",
//!               "costs": {"3": 20}, "unavailable": [7]}],
//!   "planted": [0, 4, ...]               // optional
//! }
//! ```
//!
//! Costs are stored sparsely; absent entries are zero. `both` is present only
//! for special nurses.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GradeMatrix, Instance, Nurse, Schedule, ShiftPattern, Side, SLOTS};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NurseRecord {
    grade: u8,
    days: u8,
    nights: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    both: Option<u8>,
    preference: Side,
    #[serde(default)]
    costs: BTreeMap<usize, u32>,
    #[serde(default)]
    unavailable: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    grades: usize,
    demand: Vec<Vec<u32>>,
    patterns: Vec<String>,
    nurses: Vec<NurseRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    planted: Option<Vec<usize>>,
}

/// An instance together with the schedule it was generated around, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceDocument {
    pub instance: Instance,
    pub planted: Option<Schedule>,
}

pub fn to_json(instance: &Instance, planted: Option<&Schedule>) -> String {
    let file = InstanceFile {
        name: instance.name().to_string(),
        grades: instance.grades(),
        demand: instance.demand().rows(),
        patterns: instance.patterns().iter().map(ToString::to_string).collect(),
        nurses: instance
            .nurses()
            .iter()
            .map(|n| NurseRecord {
                grade: n.grade,
                days: n.days,
                nights: n.nights,
                both: n.both,
                preference: n.preference,
                costs: n.costs.iter().filter(|(_, &c)| c > 0).map(|(&j, &c)| (j, c)).collect(),
                unavailable: n.unavailable.clone(),
            })
            .collect(),
        planted: planted.map(|s| s.assignment().to_vec()),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
    text.push('\n');
    text
}

/// 1-based (line, column) of byte offset `at`.
fn position(text: &str, at: usize) -> (usize, usize) {
    let before = &text[..at.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

/// Byte offset of the opening bracket of demand row `row`.
fn demand_row_offset(text: &str, row: usize) -> Option<usize> {
    let key = text.find("\"demand\"")?;
    let open = key + text[key..].find('[')?;
    let mut depth = 0usize;
    let mut seen = 0usize;
    for (i, ch) in text[open..].char_indices() {
        match ch {
            '[' => {
                depth += 1;
                if depth == 2 {
                    if seen == row {
                        return Some(open + i);
                    }
                    seen += 1;
                }
            }
            ']' => {
                depth -= 1;
                if depth == 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_error(text: &str, at: Option<usize>, message: String) -> Error {
    let (line, column) = at.map_or((1, 1), |a| position(text, a));
    Error::Parse { line, column, message }
}

pub fn from_json(text: &str) -> Result<InstanceDocument> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.demand.len() != SLOTS {
        let at = text.find("\"demand\"");
        return Err(parse_error(
            text,
            at,
            format!("demand has {} rows, expected {SLOTS}", file.demand.len()),
        ));
    }
    if let Some(k) = file.demand.iter().position(|r| r.len() != file.grades) {
        return Err(parse_error(
            text,
            demand_row_offset(text, k),
            format!(
                "demand row {k} has {} entries, expected {} grades",
                file.demand[k].len(),
                file.grades
            ),
        ));
    }
    let demand = GradeMatrix::from_rows(&file.demand)?;
    let patterns = file
        .patterns
        .iter()
        .map(|p| ShiftPattern::parse(p))
        .collect::<Result<Vec<_>>>()?;
    let nurses = file
        .nurses
        .into_iter()
        .map(|r| Nurse {
            grade: r.grade,
            days: r.days,
            nights: r.nights,
            both: r.both,
            preference: r.preference,
            costs: r.costs.into_iter().filter(|&(_, c)| c > 0).collect(),
            unavailable: r.unavailable,
        })
        .collect();
    let instance = Instance::new(file.name, demand, patterns, nurses)?;
    let planted = file.planted.map(Schedule::new);
    if let Some(s) = &planted {
        instance.check_schedule(s)?;
    }
    Ok(InstanceDocument { instance, planted })
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance, planted: Option<&Schedule>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(instance, planted)).map_err(|e| Error::io(path, e))
}

pub fn read_instance_document(path: impl AsRef<Path>) -> Result<InstanceDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    read_instance_document(path).map(|d| d.instance)
}
