//! Experiment grids, results files and their summaries.
//!
//! A results file is JSON lines, one record per GA run or oracle solve.
//! Summaries are always recomputed from the raw lines, so a partial grid can
//! be resumed by appending the missing runs.

mod report;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{pivot, render_cells_csv, render_instances_csv, render_text, Pivot};

use crate::decoders::{DecoderKind, OrderingKind, ScoreWeights};
use crate::error::{Error, Result};
use crate::genetic::{random_search, run, Crossover, GaConfig, CENSORED_COST};
use crate::model::Instance;
use crate::oracle::{solve_exact, OracleStatus};

/// Decodes per run of the decoder-only baseline.
pub const BASELINE_SAMPLES: usize = 10_000;

/// Runs within this many cost units of the optimum count as near-optimal.
pub const NEAR_OPTIMAL: u32 = 3;

/// One algorithm variant of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub label: String,
    pub decoder: DecoderKind,
    pub ordering: OrderingKind,
    pub crossover: Crossover,
    pub bound: bool,
    /// Decode this many random permutations instead of running the GA.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<usize>,
    /// Preference weight when the cell belongs to a weight sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<f64>,
}

impl Cell {
    pub fn ga(decoder: DecoderKind, ordering: OrderingKind, crossover: Crossover, bound: bool) -> Cell {
        let label = format!(
            "{}-{}/{}{}",
            decoder.name(),
            ordering.name(),
            crossover.label(),
            if bound { "+bound" } else { "" }
        );
        Cell {
            label,
            decoder,
            ordering,
            crossover,
            bound,
            baseline: None,
            sweep: None,
        }
    }

    pub fn baseline(decoder: DecoderKind, ordering: OrderingKind, samples: usize) -> Cell {
        Cell {
            label: format!("{}-{}/random", decoder.name(), ordering.name()),
            baseline: Some(samples),
            ..Cell::ga(decoder, ordering, Crossover::Order, false)
        }
    }

    /// Combined decoder with the given preference weight.
    pub fn weight(grades: usize, wp: f64, ordering: OrderingKind, crossover: Crossover) -> Cell {
        let decoder = DecoderKind::Combined(ScoreWeights::ratio_8_2_1(grades, wp));
        let mut cell = Cell::ga(decoder, ordering, crossover, false);
        cell.label = format!("{} wp={wp}", cell.label);
        cell.sweep = Some(wp);
        cell
    }

    /// Column label for pivots: crossover, `random` for the baseline, with a
    /// `+bound` suffix.
    pub fn method(&self) -> String {
        match self.baseline {
            Some(_) => "random".into(),
            None => format!("{}{}", self.crossover.label(), if self.bound { "+bound" } else { "" }),
        }
    }

    pub fn config(&self, grades: usize, seed: u64) -> GaConfig {
        GaConfig {
            crossover: self.crossover,
            decoder: self.decoder.clone(),
            ordering: self.ordering,
            bound: self.bound,
            ..GaConfig::new(grades)
        }
        .with_seed(seed)
    }
}

/// Named experiment grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    /// Four decoder variants by the baseline and four crossovers, then the
    /// PUX family with and without the bound.
    Table,
    /// The four decoder variants under PMX.
    Decoders,
    /// Contribution decoder under every pattern ordering.
    Orderings,
    /// Combined decoder over a range of preference weights.
    WeightSweep,
    /// Tuned configuration with and without the simple bound.
    Bound,
    /// Decoder-only random permutations for the four decoder variants.
    Baseline,
}

/// Preference weights of the default sweep.
pub const SWEEP_WEIGHTS: [f64; 5] = [0.1, 0.25, 0.5, 1.0, 2.0];

impl Grid {
    pub const ALL: [Grid; 6] = [
        Grid::Table,
        Grid::Decoders,
        Grid::Orderings,
        Grid::WeightSweep,
        Grid::Bound,
        Grid::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Grid::Table => "table",
            Grid::Decoders => "decoders",
            Grid::Orderings => "orderings",
            Grid::WeightSweep => "wp-sweep",
            Grid::Bound => "bound",
            Grid::Baseline => "baseline",
        }
    }

    pub fn cells(self, grades: usize) -> Vec<Cell> {
        let variants = decoder_variants(grades);
        let tuned = |bound| Cell::ga(DecoderKind::combined(grades), OrderingKind::Biased, Crossover::Pux { p: 0.66 }, bound);
        match self {
            Grid::Table => {
                let mut cells = Vec::new();
                for (decoder, ordering) in &variants {
                    cells.push(Cell::baseline(decoder.clone(), *ordering, BASELINE_SAMPLES));
                    for crossover in [Crossover::C1, Crossover::Order, Crossover::UniformOrder, Crossover::Pmx] {
                        cells.push(Cell::ga(decoder.clone(), *ordering, crossover, false));
                    }
                }
                for p in [0.5, 0.66, 0.8, 0.9] {
                    cells.push(Cell::ga(DecoderKind::combined(grades), OrderingKind::Biased, Crossover::Pux { p }, false));
                }
                cells.push(tuned(true));
                cells
            }
            Grid::Decoders => variants
                .into_iter()
                .map(|(d, o)| Cell::ga(d, o, Crossover::Pmx, false))
                .collect(),
            Grid::Orderings => OrderingKind::ALL
                .iter()
                .map(|&o| Cell::ga(DecoderKind::contribution(grades), o, Crossover::Pmx, false))
                .collect(),
            Grid::WeightSweep => SWEEP_WEIGHTS
                .iter()
                .map(|&wp| Cell::weight(grades, wp, OrderingKind::Biased, Crossover::Pux { p: 0.66 }))
                .collect(),
            Grid::Bound => vec![tuned(false), tuned(true)],
            Grid::Baseline => variants
                .into_iter()
                .map(|(d, o)| Cell::baseline(d, o, BASELINE_SAMPLES))
                .collect(),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Grid::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown grid {s:?}")))
    }
}

/// Cover, Contribution and Combined with lexicographic ties, then
/// Contribution with the biased ordering.
pub fn decoder_variants(grades: usize) -> Vec<(DecoderKind, OrderingKind)> {
    vec![
        (DecoderKind::Cover, OrderingKind::Lexico),
        (DecoderKind::contribution(grades), OrderingKind::Lexico),
        (DecoderKind::combined(grades), OrderingKind::Lexico),
        (DecoderKind::contribution(grades), OrderingKind::Biased),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub cells: Vec<Cell>,
    pub runs: usize,
    /// Run `r` of every cell uses seed `base_seed + r`, so all cells start
    /// from the same initial populations.
    pub base_seed: u64,
    pub censor: f64,
    /// Record wall time; off by default so reruns are byte-identical.
    pub timing: bool,
}

impl BenchSpec {
    pub fn new(cells: Vec<Cell>) -> Self {
        BenchSpec {
            cells,
            runs: 20,
            base_seed: 0,
            censor: CENSORED_COST,
            timing: false,
        }
    }

    pub fn seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() || self.runs == 0 {
            return Err(Error::ConfigInvalid("a bench needs at least one cell and one run".into()));
        }
        if !(self.censor.is_finite() && self.censor >= 0.0) {
            return Err(Error::ConfigInvalid(format!("bad censor value {}", self.censor)));
        }
        let mut seen = HashSet::new();
        for cell in &self.cells {
            if !seen.insert(&cell.label) {
                return Err(Error::ConfigInvalid(format!("duplicate cell {:?}", cell.label)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: String,
    pub decoder: String,
    pub ordering: String,
    /// Crossover label, `random` for the baseline, `+bound` when bounded.
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wp: Option<f64>,
    pub instance: String,
    pub run: usize,
    pub seed: u64,
    pub best_feasible_cost: Option<u32>,
    pub best_fitness: f64,
    pub generations: usize,
    pub decodes: u64,
    pub bound_fallbacks: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub instance: String,
    pub status: OracleStatus,
    pub cost: Option<u32>,
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Run(RunRecord),
    Oracle(OracleRecord),
}

impl Record {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// One run of `cell` on `instance`.
pub fn run_cell(cell: &Cell, instance: &Instance, run_index: usize, seed: u64, timing: bool) -> Result<RunRecord> {
    let config = cell.config(instance.grades(), seed);
    let started = Instant::now();
    let result = match cell.baseline {
        Some(samples) => random_search(instance, &config, samples)?,
        None => run(instance, &config)?,
    };
    Ok(RunRecord {
        cell: cell.label.clone(),
        decoder: cell.decoder.name().into(),
        ordering: cell.ordering.name().into(),
        method: cell.method(),
        wp: cell.sweep,
        instance: instance.name().into(),
        run: run_index,
        seed,
        best_feasible_cost: result.best_feasible_cost,
        best_fitness: result.best_fitness,
        generations: result.generations,
        decodes: result.decodes,
        bound_fallbacks: result.bound_fallbacks,
        seconds: timing.then(|| started.elapsed().as_secs_f64()),
    })
}

pub fn oracle_record(instance: &Instance, node_limit: u64, timing: bool) -> OracleRecord {
    let started = Instant::now();
    let result = solve_exact(instance, node_limit);
    OracleRecord {
        instance: instance.name().into(),
        status: result.status,
        cost: result.cost,
        nodes: result.nodes,
        seconds: timing.then(|| started.elapsed().as_secs_f64()),
    }
}

/// Runs every (cell, instance, run) triple not already in `done`, handing
/// each finished record to `sink` in grid order. Runs of one (cell,
/// instance) pair execute in parallel.
pub fn run_bench<F>(spec: &BenchSpec, instances: &[Instance], done: &[Record], mut sink: F) -> Result<usize>
where
    F: FnMut(&Record) -> Result<()>,
{
    spec.validate()?;
    let mut names = HashSet::new();
    for inst in instances {
        if !names.insert(inst.name()) {
            return Err(Error::ConfigInvalid(format!("duplicate instance name {:?}", inst.name())));
        }
    }
    let finished: HashSet<(&str, &str, usize)> = done
        .iter()
        .filter_map(|r| match r {
            Record::Run(r) => Some((r.cell.as_str(), r.instance.as_str(), r.run)),
            Record::Oracle(_) => None,
        })
        .collect();
    let mut written = 0;
    for cell in &spec.cells {
        for inst in instances {
            let todo: Vec<usize> = (0..spec.runs)
                .filter(|&r| !finished.contains(&(cell.label.as_str(), inst.name(), r)))
                .collect();
            let records = todo
                .par_iter()
                .map(|&r| run_cell(cell, inst, r, spec.seed(r), spec.timing))
                .collect::<Result<Vec<_>>>()?;
            for record in records {
                sink(&Record::Run(record))?;
                written += 1;
            }
        }
    }
    Ok(written)
}

/// Parses a results file body. Blank lines are skipped.
pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| Error::Parse {
                line: i + 1,
                column: e.column(),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Reads a results file; a missing file reads as empty.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<Record>> {
    let path = path.as_ref();
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut text = String::new();
    for line in BufReader::new(file).lines() {
        text.push_str(&line.map_err(|e| Error::io(path, e))?);
        text.push('\n');
    }
    parse_records(&text)
}

/// Appending writer for a results file.
pub struct ResultsWriter {
    path: std::path::PathBuf,
    file: std::fs::File,
}

impl ResultsWriter {
    /// Opens `path` for appending, truncating it first unless `resume`.
    pub fn open(path: impl AsRef<Path>, resume: bool) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .append(resume)
            .truncate(!resume)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        Ok(ResultsWriter { path, file })
    }

    pub fn write(&mut self, record: &Record) -> Result<()> {
        writeln!(self.file, "{}", record.to_line()).map_err(|e| Error::io(&self.path, e))
    }
}

/// Per (cell, instance) outcome over all runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub cell: String,
    pub instance: String,
    pub runs: usize,
    pub feasible_runs: usize,
    pub best_cost: Option<u32>,
    /// Proven optimum, when an oracle record says so.
    pub optimum: Option<u32>,
    pub optimal_runs: usize,
    pub near_optimal_runs: usize,
    pub mean_seconds: Option<f64>,
}

impl InstanceSummary {
    pub fn feasibility(&self) -> f64 {
        self.feasible_runs as f64 / self.runs as f64
    }

    pub fn censored_cost(&self, censor: f64) -> f64 {
        self.best_cost.map_or(censor, f64::from)
    }

    pub fn infeasible_runs(&self) -> usize {
        self.runs - self.feasible_runs
    }

    pub fn optimum_found(&self) -> bool {
        self.optimum.is_some() && self.best_cost == self.optimum
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub cell: String,
    pub decoder: String,
    pub ordering: String,
    pub method: String,
    pub wp: Option<f64>,
    pub instances: usize,
    pub runs: usize,
    /// Per-instance fraction of feasible runs, averaged over instances.
    pub feasibility: f64,
    /// Per-instance best feasible cost (censored), averaged over instances.
    pub mean_cost: f64,
    pub mean_seconds: Option<f64>,
    /// Instances with an oracle optimum, and those where some run hit it.
    pub oracle_instances: usize,
    pub optimal_instances: usize,
    pub optimal_runs: usize,
    pub near_optimal_runs: usize,
    pub infeasible_runs: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub cells: Vec<CellSummary>,
    pub instances: Vec<InstanceSummary>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Aggregates run records by cell (in order of first appearance) and by
/// instance within each cell. Oracle records supply optima.
pub fn summarize(records: &[Record], censor: f64) -> Summary {
    let mut optima: HashMap<&str, u32> = HashMap::new();
    for r in records {
        if let Record::Oracle(o) = r {
            if let (OracleStatus::Optimal, Some(c)) = (o.status, o.cost) {
                optima.insert(&o.instance, c);
            }
        }
    }
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, BTreeMap<&str, Vec<&RunRecord>>> = HashMap::new();
    let mut instance_order: HashMap<&str, Vec<&str>> = HashMap::new();
    for r in records {
        let Record::Run(r) = r else { continue };
        let by_instance = groups.entry(&r.cell).or_insert_with(|| {
            order.push(&r.cell);
            BTreeMap::new()
        });
        if !by_instance.contains_key(r.instance.as_str()) {
            instance_order.entry(&r.cell).or_default().push(&r.instance);
        }
        by_instance.entry(&r.instance).or_default().push(r);
    }

    let mut summary = Summary::default();
    for cell in order {
        let by_instance = &groups[cell];
        let mut per_instance = Vec::new();
        for &name in &instance_order[cell] {
            let runs = &by_instance[name];
            let optimum = optima.get(name).copied();
            let costs: Vec<u32> = runs.iter().filter_map(|r| r.best_feasible_cost).collect();
            per_instance.push(InstanceSummary {
                cell: cell.into(),
                instance: name.into(),
                runs: runs.len(),
                feasible_runs: costs.len(),
                best_cost: costs.iter().copied().min(),
                optimum,
                optimal_runs: optimum.map_or(0, |o| costs.iter().filter(|&&c| c == o).count()),
                near_optimal_runs: optimum.map_or(0, |o| costs.iter().filter(|&&c| c <= o + NEAR_OPTIMAL).count()),
                mean_seconds: if runs.iter().all(|r| r.seconds.is_some()) {
                    mean(runs.iter().filter_map(|r| r.seconds))
                } else {
                    None
                },
            });
        }
        let first = by_instance.values().next().and_then(|v| v.first()).expect("nonempty group");
        let n = per_instance.len() as f64;
        summary.cells.push(CellSummary {
            cell: cell.into(),
            decoder: first.decoder.clone(),
            ordering: first.ordering.clone(),
            method: first.method.clone(),
            wp: first.wp,
            instances: per_instance.len(),
            runs: per_instance.iter().map(|s| s.runs).sum(),
            feasibility: per_instance.iter().map(InstanceSummary::feasibility).sum::<f64>() / n,
            mean_cost: per_instance.iter().map(|s| s.censored_cost(censor)).sum::<f64>() / n,
            mean_seconds: if per_instance.iter().all(|s| s.mean_seconds.is_some()) {
                mean(per_instance.iter().filter_map(|s| s.mean_seconds))
            } else {
                None
            },
            oracle_instances: per_instance.iter().filter(|s| s.optimum.is_some()).count(),
            optimal_instances: per_instance.iter().filter(|s| s.optimum_found()).count(),
            optimal_runs: per_instance.iter().map(|s| s.optimal_runs).sum(),
            near_optimal_runs: per_instance.iter().map(|s| s.near_optimal_runs).sum(),
            infeasible_runs: per_instance.iter().map(InstanceSummary::infeasible_runs).sum(),
        });
        summary.instances.extend(per_instance);
    }
    summary
}
