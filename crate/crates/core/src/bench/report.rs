//! Text and CSV tables from a [`Summary`].

use std::fmt::Write;

use super::{CellSummary, Summary};

/// Decoder-by-method table of (feasibility, mean cost), rows and columns in
/// order of first appearance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Pivot {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// `values[row][column]`.
    pub values: Vec<Vec<Option<(f64, f64)>>>,
}

impl Pivot {
    pub fn get(&self, row: &str, column: &str) -> Option<(f64, f64)> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        self.values[r][c]
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["variant".to_string()];
        for c in &self.columns {
            header.push(format!("{c} feasibility"));
            header.push(format!("{c} cost"));
        }
        w.write_record(&header).expect("in-memory write");
        for (row, values) in self.rows.iter().zip(&self.values) {
            let mut line = vec![row.clone()];
            for v in values {
                match v {
                    Some((f, c)) => {
                        line.push(format!("{f:.4}"));
                        line.push(format!("{c:.2}"));
                    }
                    None => line.extend([String::new(), String::new()]),
                }
            }
            w.write_record(&line).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }
}

fn variant(cell: &CellSummary) -> String {
    format!("{}-{}", cell.decoder, cell.ordering)
}

/// Pivot of every non-sweep cell.
pub fn pivot(summary: &Summary) -> Pivot {
    let mut p = Pivot::default();
    let cells: Vec<&CellSummary> = summary.cells.iter().filter(|c| c.wp.is_none()).collect();
    for c in &cells {
        let row = variant(c);
        if !p.rows.contains(&row) {
            p.rows.push(row);
        }
        if !p.columns.contains(&c.method) {
            p.columns.push(c.method.clone());
        }
    }
    p.values = vec![vec![None; p.columns.len()]; p.rows.len()];
    for c in cells {
        let r = p.rows.iter().position(|x| *x == variant(c)).expect("row added");
        let k = p.columns.iter().position(|x| *x == c.method).expect("column added");
        p.values[r][k] = Some((c.feasibility, c.mean_cost));
    }
    p
}

fn opt_secs(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |s| format!("{s:.3}"))
}

/// Cell table, then the decoder/method pivot and the weight sweep when
/// present.
pub fn render_text(summary: &Summary) -> String {
    let mut out = String::new();
    let width = summary.cells.iter().map(|c| c.cell.len()).max().unwrap_or(0).max(4);
    writeln!(
        out,
        "{:<width$}  {:>5}  {:>6}  {:>6}  {:>7}  {:>7}  {:>7}  {:>7}  {:>6}",
        "cell", "inst", "runs", "feas%", "cost", "time", "optimal", "within3", "infeas"
    )
    .unwrap();
    for c in &summary.cells {
        let optimal = if c.oracle_instances > 0 {
            format!("{}/{}", c.optimal_instances, c.oracle_instances)
        } else {
            "-".into()
        };
        writeln!(
            out,
            "{:<width$}  {:>5}  {:>6}  {:>6.1}  {:>7.2}  {:>7}  {:>7}  {:>7}  {:>6}",
            c.cell,
            c.instances,
            c.runs,
            100.0 * c.feasibility,
            c.mean_cost,
            opt_secs(c.mean_seconds),
            optimal,
            c.near_optimal_runs,
            c.infeasible_runs
        )
        .unwrap();
    }

    let p = pivot(summary);
    if !p.rows.is_empty() {
        let rw = p.rows.iter().map(String::len).max().unwrap_or(0).max(7);
        let cw = p.columns.iter().map(String::len).max().unwrap_or(0).max(14);
        write!(out, "\n{:<rw$}", "variant").unwrap();
        for c in &p.columns {
            write!(out, "  {c:>cw$}").unwrap();
        }
        out.push('\n');
        for (row, values) in p.rows.iter().zip(&p.values) {
            write!(out, "{row:<rw$}").unwrap();
            for v in values {
                let text = v.map_or_else(|| "-".into(), |(f, c)| format!("{:.1}% {:.1}", 100.0 * f, c));
                write!(out, "  {text:>cw$}").unwrap();
            }
            out.push('\n');
        }
    }

    let mut sweep: Vec<&CellSummary> = summary.cells.iter().filter(|c| c.wp.is_some()).collect();
    if !sweep.is_empty() {
        sweep.sort_by(|a, b| a.wp.partial_cmp(&b.wp).expect("finite weights"));
        writeln!(out, "\n{:>6}  {:>6}  {:>7}", "wp", "feas%", "cost").unwrap();
        for c in sweep {
            writeln!(
                out,
                "{:>6}  {:>6.1}  {:>7.2}",
                c.wp.expect("filtered"),
                100.0 * c.feasibility,
                c.mean_cost
            )
            .unwrap();
        }
    }
    out
}

fn to_csv<T: serde::Serialize>(rows: &[T], header: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).expect("in-memory write");
    }
    for r in rows {
        w.serialize(r).expect("summary rows serialize");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

pub fn render_cells_csv(summary: &Summary) -> String {
    to_csv(
        &summary.cells,
        &[
            "cell", "decoder", "ordering", "method", "wp", "instances", "runs", "feasibility",
            "mean_cost", "mean_seconds", "oracle_instances", "optimal_instances", "optimal_runs",
            "near_optimal_runs", "infeasible_runs",
        ],
    )
}

/// Per-instance breakdown: infeasible, feasible and optimal runs.
pub fn render_instances_csv(summary: &Summary) -> String {
    to_csv(
        &summary.instances,
        &[
            "cell", "instance", "runs", "feasible_runs", "best_cost", "optimum", "optimal_runs",
            "near_optimal_runs", "mean_seconds",
        ],
    )
}
