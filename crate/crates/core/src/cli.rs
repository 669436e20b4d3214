//! The `roster` command line: `generate`, `solve`, `bench`, `oracle` and
//! `report`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    oracle_record, read_records, render_cells_csv, render_instances_csv, render_text, run_bench, summarize,
    BenchSpec, Cell, Grid, OracleRecord, Record, ResultsWriter, RunRecord,
};
use crate::decoders::{DecoderKind, OrderingKind, ScoreWeights};
use crate::error::{Error, Result};
use crate::genetic::{Crossover, CENSORED_COST};
use crate::instgen::{
    corpus_params, corpus_template, generate, read_instance, small_template, write_instance, DemandMode, GenParams,
    UniversePolicy,
};
use crate::model::Instance;
use crate::oracle::{audit, solve_exact, AuditReport};

#[derive(Parser, Debug)]
#[command(name = "roster", version, about = "Indirect genetic algorithm for nurse rostering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate one synthetic instance, or a corpus with --corpus.
    Generate(GenerateArgs),
    /// One GA run on one instance.
    Solve(SolveArgs),
    /// Run an experiment grid over a set of instances.
    Bench(BenchArgs),
    /// Solve small instances exactly.
    Oracle(OracleArgs),
    /// Summarize a results file.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Template {
    /// 30 nurses, 3 grades, curated pattern list.
    Full,
    /// 6 nurses and at most 12 patterns per nurse, solvable exactly.
    Small,
    /// Every subset pattern.
    AllSubsets,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DemandArg {
    Planted,
    Random,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Output file, or directory with --corpus.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "full")]
    pub template: Template,
    /// Write this many instances cycling through the tightness bands.
    #[arg(long)]
    pub corpus: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub nurses: Option<usize>,
    #[arg(long)]
    pub grades: Option<usize>,
    #[arg(long, value_enum)]
    pub demand: Option<DemandArg>,
    /// Demand tightness in [0, 1].
    #[arg(long)]
    pub tightness: Option<f64>,
    #[arg(long)]
    pub special_probability: Option<f64>,
    #[arg(long)]
    pub unavailable_probability: Option<f64>,
    /// Patterns kept per (kind, size) group; 0 keeps every subset.
    #[arg(long)]
    pub per_group: Option<usize>,
}

impl GenerateArgs {
    fn params(&self) -> GenParams {
        let mut p = match self.template {
            Template::Full => corpus_template(self.seed),
            Template::Small => small_template(6, self.seed),
            Template::AllSubsets => GenParams {
                seed: self.seed,
                ..GenParams::default()
            },
        };
        if let Some(name) = &self.name {
            p.name = name.clone();
        }
        if let Some(n) = self.nurses {
            p.nurses = n;
        }
        if let Some(g) = self.grades {
            p.grades = g;
            p.grade_mix = vec![1.0; g];
        }
        let tightness = self.tightness.unwrap_or(p.demand.tightness());
        p.demand = match self.demand {
            Some(DemandArg::Random) => DemandMode::Random { tightness },
            Some(DemandArg::Planted) | None => DemandMode::Planted { tightness },
        };
        if let Some(v) = self.special_probability {
            p.special_probability = v;
        }
        if let Some(v) = self.unavailable_probability {
            p.unavailable_probability = v;
        }
        match self.per_group {
            Some(0) => p.universe = UniversePolicy::AllSubsets,
            Some(k) => p.universe = UniversePolicy::Sampled { per_group: k },
            None => {}
        }
        p
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DecoderArg {
    Cover,
    Contribution,
    Combined,
}

#[derive(Args, Debug)]
pub struct GaArgs {
    #[arg(long, value_enum, default_value = "combined")]
    pub decoder: DecoderArg,
    /// lexico, rand-order, biased, rand-cost or cheapest.
    #[arg(long, default_value = "biased")]
    pub ordering: OrderingKind,
    /// pmx, order, c1, uniform, pux66 or pux:P.
    #[arg(long, default_value = "pux66")]
    pub crossover: Crossover,
    /// Prune patterns dearer than the best feasible cost so far.
    #[arg(long)]
    pub bound: bool,
    /// Preference weight of the score (decoder default when absent).
    #[arg(long)]
    pub wp: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub penalty_weight: Option<f64>,
    #[arg(long)]
    pub max_generations: Option<usize>,
}

impl GaArgs {
    fn cell(&self, grades: usize) -> Cell {
        let decoder = match (self.decoder, self.wp) {
            (DecoderArg::Cover, _) => DecoderKind::Cover,
            (DecoderArg::Contribution, None) => DecoderKind::contribution(grades),
            (DecoderArg::Combined, None) => DecoderKind::combined(grades),
            (DecoderArg::Contribution, Some(wp)) => DecoderKind::Contribution(ScoreWeights::ratio_8_2_1(grades, wp)),
            (DecoderArg::Combined, Some(wp)) => DecoderKind::Combined(ScoreWeights::ratio_8_2_1(grades, wp)),
        };
        Cell::ga(decoder, self.ordering, self.crossover, self.bound)
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Results file receiving the run record (replaced).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Best schedule with its audit, as JSON.
    #[arg(long)]
    pub schedule_out: Option<PathBuf>,
    /// Also solve exactly and report the gap.
    #[arg(long)]
    pub oracle_node_limit: Option<u64>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Instance files or directories of `*.json` files.
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    /// table, decoders, orderings, wp-sweep, bound or baseline; repeatable.
    #[arg(long = "grid", default_value = "table")]
    pub grids: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Seed of run 0; run r uses seed + r in every cell.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = CENSORED_COST)]
    pub censor: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep existing records and run only what is missing.
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub timing: bool,
    /// Record exact optima first, with this node limit per instance.
    #[arg(long)]
    pub oracle_node_limit: Option<u64>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    #[arg(long, default_value_t = 10_000_000)]
    pub node_limit: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    pub results: PathBuf,
    #[arg(long, default_value_t = CENSORED_COST)]
    pub censor: f64,
    /// Per-cell summary CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Decoder-by-method pivot CSV.
    #[arg(long)]
    pub pivot_csv: Option<PathBuf>,
    /// Per-instance breakdown CSV.
    #[arg(long)]
    pub instances_csv: Option<PathBuf>,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Expands directories to their `*.json` files, sorted by name.
pub fn instance_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(|e| Error::io(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

pub fn load_instances(inputs: &[PathBuf]) -> Result<Vec<Instance>> {
    instance_paths(inputs)?.iter().map(read_instance).collect()
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let params = args.params();
    match args.corpus {
        None => {
            let g = generate(&params)?;
            write_instance(&args.out, &g.instance, g.planted.as_ref())?;
            println!(
                "{}: {} nurses, {} patterns, demand {}",
                args.out.display(),
                g.instance.nurse_count(),
                g.instance.patterns().len(),
                g.instance.demand().total()
            );
        }
        Some(count) => {
            std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
            let prefix = args.name.clone().unwrap_or_else(|| "syn".into());
            for (_, p) in corpus_params(count, &params, &prefix) {
                let g = generate(&p)?;
                write_instance(args.out.join(format!("{}.json", p.name)), &g.instance, g.planted.as_ref())?;
            }
            println!("{}: {count} instances", args.out.display());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ScheduleRow {
    nurse: usize,
    pattern: usize,
    shifts: String,
    cost: u32,
}

#[derive(Serialize)]
struct ScheduleFile {
    instance: String,
    cell: String,
    seed: u64,
    feasible: bool,
    cost: u32,
    fitness: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimum: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<i64>,
    assignment: Vec<ScheduleRow>,
    audit: AuditReport,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let instance = read_instance(&args.instance)?;
    let cell = args.ga.cell(instance.grades());
    let mut config = cell.config(instance.grades(), args.ga.seed);
    if let Some(n) = args.ga.population {
        config.population_size = n;
    }
    if let Some(w) = args.ga.penalty_weight {
        config.penalty_weight = w;
    }
    config.max_generations = args.ga.max_generations;
    config.validate()?;
    let started = std::time::Instant::now();
    let result = crate::genetic::run(&instance, &config)?;
    let record = RunRecord {
        cell: cell.label.clone(),
        decoder: cell.decoder.name().into(),
        ordering: cell.ordering.name().into(),
        method: cell.method(),
        wp: args.ga.wp,
        instance: instance.name().into(),
        run: 0,
        seed: args.ga.seed,
        best_feasible_cost: result.best_feasible_cost,
        best_fitness: result.best_fitness,
        generations: result.generations,
        decodes: result.decodes,
        bound_fallbacks: result.bound_fallbacks,
        seconds: args.timing.then(|| started.elapsed().as_secs_f64()),
    };

    let oracle = args.oracle_node_limit.map(|limit| solve_exact(&instance, limit));
    let optimum = oracle.as_ref().and_then(|o| o.optimal_cost());
    let schedule = &result.best_schedule;
    let cost = instance.solution_cost(schedule)?;
    let gap = optimum.zip(result.best_feasible_cost).map(|(o, c)| i64::from(c) - i64::from(o));

    if let Some(path) = &args.out {
        let mut w = ResultsWriter::open(path, false)?;
        w.write(&Record::Run(record))?;
        if let Some(o) = &oracle {
            w.write(&Record::Oracle(OracleRecord {
                instance: instance.name().into(),
                status: o.status,
                cost: o.cost,
                nodes: o.nodes,
                seconds: None,
            }))?;
        }
    }
    if let Some(path) = &args.schedule_out {
        let file = ScheduleFile {
            instance: instance.name().into(),
            cell: cell.label.clone(),
            seed: args.ga.seed,
            feasible: result.feasible_found(),
            cost,
            fitness: result.best_fitness,
            optimum,
            gap,
            assignment: schedule
                .assignment()
                .iter()
                .enumerate()
                .map(|(i, &j)| ScheduleRow {
                    nurse: i,
                    pattern: j,
                    shifts: instance.pattern(j).to_string(),
                    cost: instance.cost(i, j),
                })
                .collect(),
            audit: audit(schedule, &instance),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("schedule serializes");
        text.push('\n');
        write_file(path, &text)?;
    }
    match result.best_feasible_cost {
        Some(c) => print!("{}: feasible, cost {c}", instance.name()),
        None => print!("{}: infeasible, best fitness {}", instance.name(), result.best_fitness),
    }
    if let Some(g) = gap {
        print!(", gap {g} to optimum {}", optimum.unwrap());
    }
    println!(" ({} generations)", result.generations);
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let instances = load_instances(&args.instances)?;
    let grades = instances.first().map_or(3, Instance::grades);
    if let Some(g) = instances.iter().find(|i| i.grades() != grades) {
        return Err(Error::ConfigInvalid(format!(
            "instance {} has {} grades, expected {grades}",
            g.name(),
            g.grades()
        )));
    }
    let mut cells = Vec::new();
    for name in &args.grids {
        for cell in name.parse::<Grid>()?.cells(grades) {
            if !cells.iter().any(|c: &Cell| c.label == cell.label) {
                cells.push(cell);
            }
        }
    }
    let spec = BenchSpec {
        cells,
        runs: args.runs,
        base_seed: args.seed,
        censor: args.censor,
        timing: args.timing,
    };
    let done = if args.resume { read_records(&args.out)? } else { Vec::new() };
    let mut writer = ResultsWriter::open(&args.out, args.resume)?;
    if let Some(limit) = args.oracle_node_limit {
        for inst in &instances {
            let known = done
                .iter()
                .any(|r| matches!(r, Record::Oracle(o) if o.instance == inst.name()));
            if !known {
                writer.write(&Record::Oracle(oracle_record(inst, limit, args.timing)))?;
            }
        }
    }
    let written = run_bench(&spec, &instances, &done, |r| writer.write(r))?;
    eprintln!("{written} runs written to {}", args.out.display());
    let mut all = read_records(&args.out)?;
    all.retain(|r| !matches!(r, Record::Run(r) if !spec.cells.iter().any(|c| c.label == r.cell)));
    print!("{}", render_text(&summarize(&all, args.censor)));
    Ok(())
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let instances = load_instances(&args.instances)?;
    let mut writer = args.out.as_ref().map(|p| ResultsWriter::open(p, false)).transpose()?;
    for inst in &instances {
        let record = oracle_record(inst, args.node_limit, args.timing);
        println!(
            "{}: {:?} cost {} ({} nodes)",
            record.instance,
            record.status,
            record.cost.map_or_else(|| "-".into(), |c| c.to_string()),
            record.nodes
        );
        if let Some(w) = writer.as_mut() {
            w.write(&Record::Oracle(record))?;
        }
    }
    Ok(())
}

pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    if !args.results.exists() {
        return Err(Error::io(
            &args.results,
            std::io::Error::new(std::io::ErrorKind::NotFound, "results file not found"),
        ));
    }
    let summary = summarize(&read_records(&args.results)?, args.censor);
    print!("{}", render_text(&summary));
    if let Some(p) = &args.csv {
        write_file(p, &render_cells_csv(&summary))?;
    }
    if let Some(p) = &args.pivot_csv {
        write_file(p, &crate::bench::pivot(&summary).to_csv())?;
    }
    if let Some(p) = &args.instances_csv {
        write_file(p, &render_instances_csv(&summary))?;
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Parses the process arguments and runs the command; errors go to stderr
/// with a nonzero exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
