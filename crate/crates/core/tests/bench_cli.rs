mod common;

use std::path::Path;

use clap::Parser;
use roster::bench::{
    parse_records, pivot, read_records, render_text, run_bench, summarize, BenchSpec, Cell, Grid, Record,
};
use roster::cli::{execute, Cli};
use roster::decoders::{DecoderKind, OrderingKind};
use roster::genetic::Crossover;
use roster::instgen::write_instance;

fn roster(args: &[&str]) -> roster::Result<()> {
    let mut full = vec!["roster"];
    full.extend_from_slice(args);
    execute(&Cli::parse_from(full))
}

fn write_small_corpus(dir: &Path, count: usize) {
    for inst in common::small_corpus(count, 11) {
        write_instance(dir.join(format!("{}.json", inst.name())), &inst, None).unwrap();
    }
}

const TWO_CELLS: &str = r#"{"record":"oracle","instance":"a","status":"optimal","cost":4,"nodes":12}
{"record":"run","cell":"cover-lexico/pmx","decoder":"cover","ordering":"lexico","method":"pmx","instance":"a","run":0,"seed":0,"best_feasible_cost":6,"best_fitness":6.0,"generations":40,"decodes":900,"bound_fallbacks":0}
{"record":"run","cell":"cover-lexico/pmx","decoder":"cover","ordering":"lexico","method":"pmx","instance":"a","run":1,"seed":1,"best_feasible_cost":null,"best_fitness":46.0,"generations":35,"decodes":800,"bound_fallbacks":0}
{"record":"run","cell":"cover-lexico/pmx","decoder":"cover","ordering":"lexico","method":"pmx","instance":"b","run":0,"seed":0,"best_feasible_cost":null,"best_fitness":80.0,"generations":31,"decodes":700,"bound_fallbacks":0}
{"record":"run","cell":"cover-lexico/pmx","decoder":"cover","ordering":"lexico","method":"pmx","instance":"b","run":1,"seed":1,"best_feasible_cost":null,"best_fitness":60.0,"generations":31,"decodes":700,"bound_fallbacks":0}
{"record":"run","cell":"combined-lexico/c1","decoder":"combined","ordering":"lexico","method":"c1","instance":"a","run":0,"seed":0,"best_feasible_cost":4,"best_fitness":4.0,"generations":50,"decodes":1000,"bound_fallbacks":0}
{"record":"run","cell":"combined-lexico/c1","decoder":"combined","ordering":"lexico","method":"c1","instance":"a","run":1,"seed":1,"best_feasible_cost":5,"best_fitness":5.0,"generations":50,"decodes":1000,"bound_fallbacks":0}
{"record":"run","cell":"combined-lexico/c1","decoder":"combined","ordering":"lexico","method":"c1","instance":"b","run":0,"seed":0,"best_feasible_cost":10,"best_fitness":10.0,"generations":50,"decodes":1000,"bound_fallbacks":0}
{"record":"run","cell":"combined-lexico/c1","decoder":"combined","ordering":"lexico","method":"c1","instance":"b","run":1,"seed":1,"best_feasible_cost":null,"best_fitness":20.0,"generations":50,"decodes":1000,"bound_fallbacks":0}
"#;

#[test]
fn two_cell_fixture_pivots_as_expected() {
    let s = summarize(&parse_records(TWO_CELLS).unwrap(), 100.0);
    let p = pivot(&s);
    assert_eq!(p.rows, vec!["cover-lexico", "combined-lexico"]);
    assert_eq!(p.columns, vec!["pmx", "c1"]);
    // Cover: instance a 1/2 feasible, best 6; b never feasible, censored.
    assert_eq!(p.get("cover-lexico", "pmx"), Some((0.25, 53.0)));
    // Combined: a 2/2 with best 4, b 1/2 with best 10.
    assert_eq!(p.get("combined-lexico", "c1"), Some((0.75, 7.0)));
    assert_eq!(p.get("cover-lexico", "c1"), None);
    assert_eq!(
        p.to_csv(),
        "variant,pmx feasibility,pmx cost,c1 feasibility,c1 cost\n\
         cover-lexico,0.2500,53.00,,\n\
         combined-lexico,,,0.7500,7.00\n"
    );
    let combined = &s.cells[1];
    assert_eq!((combined.optimal_instances, combined.oracle_instances), (1, 1));
    assert_eq!((combined.optimal_runs, combined.near_optimal_runs, combined.infeasible_runs), (1, 2, 1));
    let text = render_text(&s);
    let expected = "\
cell                 inst    runs   feas%     cost     time  optimal  within3  infeas
cover-lexico/pmx        2       4    25.0    53.00        -      0/1        1       3
combined-lexico/c1      2       4    75.0     7.00        -      1/1        2       1
";
    assert!(text.starts_with(expected), "{text}");
}

#[test]
fn weight_sweep_reports_one_row_per_weight() {
    let weights = [0.0, 0.25, 0.5, 1.0, 2.0];
    let mut lines = String::new();
    for (i, wp) in weights.iter().enumerate() {
        let cell = Cell::weight(3, *wp, OrderingKind::Biased, Crossover::Pux { p: 0.66 });
        lines.push_str(&format!(
            "{{\"record\":\"run\",\"cell\":\"{}\",\"decoder\":\"combined\",\"ordering\":\"biased\",\"method\":\"pux66\",\"wp\":{wp},\"instance\":\"x\",\"run\":0,\"seed\":0,\"best_feasible_cost\":{},\"best_fitness\":1.0,\"generations\":31,\"decodes\":1,\"bound_fallbacks\":0}}\n",
            cell.label,
            i + 1
        ));
    }
    let text = render_text(&summarize(&parse_records(&lines).unwrap(), 100.0));
    let sweep: Vec<&str> = text.lines().skip_while(|l| !l.trim_start().starts_with("wp")).skip(1).collect();
    assert_eq!(sweep.len(), 5);
    assert!(sweep[0].trim_start().starts_with('0'));
    assert!(sweep[4].trim_start().starts_with('2'));
}

#[test]
fn solve_replays_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    write_small_corpus(dir.path(), 1);
    let inst = dir.path().join("small-00.json");
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let out = dir.path().join(format!("{tag}.jsonl"));
        let sched = dir.path().join(format!("{tag}.schedule.json"));
        roster(&[
            "solve",
            inst.to_str().unwrap(),
            "--seed",
            "5",
            "--bound",
            "--oracle-node-limit",
            "1000000",
            "--out",
            out.to_str().unwrap(),
            "--schedule-out",
            sched.to_str().unwrap(),
        ])
        .unwrap();
        outputs.push((std::fs::read(&out).unwrap(), std::fs::read(&sched).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let sched: serde_json::Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert!(sched["gap"].as_i64().unwrap() >= 0);
}

#[test]
fn bench_replays_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    write_small_corpus(&corpus, 3);
    let run_to = |name: &str, runs: &str, resume: bool| {
        let out = dir.path().join(name);
        let mut args = vec!["bench", corpus.to_str().unwrap(), "--grid", "decoders", "--runs", runs];
        args.extend(["--oracle-node-limit", "1000000", "--out", out.to_str().unwrap()]);
        if resume {
            args.push("--resume");
        }
        roster(&args).unwrap();
        out
    };
    let a = run_to("a.jsonl", "2", false);
    let b = run_to("b.jsonl", "2", false);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let partial = run_to("c.jsonl", "1", false);
    run_to("c.jsonl", "2", true);
    let full = summarize(&read_records(&a).unwrap(), 100.0);
    let resumed = summarize(&read_records(&partial).unwrap(), 100.0);
    assert_eq!(full.cells, resumed.cells);
    assert_eq!(read_records(&partial).unwrap().len(), read_records(&a).unwrap().len());
}

#[test]
fn missing_instance_is_named() {
    let err = roster(&["bench", "/nonexistent/inst.json", "--out", "/tmp/unused.jsonl"]).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/inst.json"), "{err}");
}

#[test]
fn generate_writes_a_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    roster(&["generate", "--template", "small", "--corpus", "4", "--out", out.to_str().unwrap()]).unwrap();
    let files = roster::cli::instance_paths(&[out]).unwrap();
    assert_eq!(files.len(), 4);
    assert!(roster::instgen::read_instance(&files[0]).is_ok());
}

#[test]
fn baseline_cells_decode_random_permutations() {
    let instances = common::small_corpus(2, 4);
    let mut spec = BenchSpec::new(vec![Cell::baseline(DecoderKind::Cover, OrderingKind::Lexico, 50)]);
    spec.runs = 2;
    let mut records = Vec::new();
    run_bench(&spec, &instances, &[], |r| {
        records.push(r.clone());
        Ok(())
    })
    .unwrap();
    assert_eq!(records.len(), 4);
    for r in records {
        let Record::Run(r) = r else { panic!() };
        assert_eq!(r.method, "random");
        assert!(r.decodes <= 50);
    }
    assert_eq!(Grid::Baseline.cells(3).len(), 4);
}
