use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use optigraph::power::{build_day_graph, toy, DayBoundary, Layer, Schedule};
use optigraph::solver::{parse_lp, parse_mps, solve_milp};
use optigraph::SolveOptions;
use optigraph_cli::config::CaseConfig;
use optigraph_cli::ingest::{ingest, write_case};
use serde_json::Value;

fn data(case: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(case)
        .join("config.toml")
}

fn cli(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optigraph"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn stderr_record(out: &Output) -> Value {
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stderr);
    let first = text.lines().next().expect("record on stderr");
    serde_json::from_str(first).expect("json record")
}

#[test]
fn bundled_cases_ingest_to_the_toys() {
    for (name, case) in [
        ("three_bus", toy::three_bus(2)),
        ("two_bus", toy::ring(2, 1)),
    ] {
        let cfg = CaseConfig::load(&data(name)).unwrap();
        let (net, demand) = ingest(&cfg).unwrap();
        assert_eq!(net, case.network, "{name}");
        assert_eq!(demand, case.demand, "{name}");
    }
}

#[test]
fn written_cases_read_back_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    for (k, case) in [
        toy::under_forecast(2, 0.1),
        toy::shortage(1),
        toy::ring(5, 1),
    ]
    .into_iter()
    .enumerate()
    {
        let sub = dir.path().join(k.to_string());
        write_case(&case.network, &case.demand, &sub).unwrap();
        let cfg = CaseConfig::load(&sub.join("config.toml")).unwrap();
        let (net, demand) = ingest(&cfg).unwrap();
        assert_eq!(net, case.network);
        assert_eq!(demand, case.demand);
    }
}

#[test]
fn stats_match_the_library_build() {
    let case = toy::three_bus(2);
    let dg = build_day_graph(
        &case.network,
        &case.demand,
        &Schedule::default(),
        0,
        &DayBoundary::cold(case.network.generators.len()),
    )
    .unwrap();
    let g = &dg.graph;
    let s = stdout_json(&cli(&data("three_bus"), &["stats"]));
    assert_eq!(s["nodes"], g.num_nodes());
    assert_eq!(s["edges"], g.num_edges());
    assert_eq!(s["variables"], g.num_variables());
    assert_eq!(s["constraints"], g.num_constraints());
    assert_eq!(s["binaries"], g.num_binaries());
    assert_eq!(s["subgraphs"], g.num_subgraphs());
    // 1 + 8 + 96 subproblems over 24, 16 and 5 points
    assert_eq!(s["da"]["subproblems"], 1);
    assert_eq!(s["st"]["subproblems"], 8);
    assert_eq!(s["ha"]["subproblems"], 96);
    assert_eq!(s["da"]["points_each"], 24);
    assert_eq!(s["st"]["points_each"], 16);
    assert_eq!(s["ha"]["points_each"], 5);
    let layered: u64 = ["da", "st", "ha"]
        .iter()
        .map(|l| s[l]["variables"].as_u64().unwrap())
        .sum();
    assert_eq!(layered, s["variables"].as_u64().unwrap());
}

#[test]
fn day_beyond_the_data_is_a_usage_error() {
    let r = stderr_record(&cli(&data("two_bus"), &["stats", "--day", "1"]));
    assert_eq!(r["error"], "usage");
}

#[test]
fn zero_demand_costs_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let case = toy::zero_demand(1);
    write_case(&case.network, &case.demand, dir.path()).unwrap();
    let out_dir = dir.path().join("run");
    let out = cli(
        &dir.path().join("config.toml"),
        &[
            "solve",
            "--mode",
            "monolithic",
            "--days",
            "1",
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["mode"], "monolithic");
    assert_eq!(summary["realized_cost"].as_f64().unwrap(), 0.0);
    assert_eq!(summary["total_shed_mw_steps"].as_f64().unwrap(), 0.0);

    let mut rdr = csv::Reader::from_path(out_dir.join("report.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        [
            "time_h",
            "day",
            "committed_da",
            "committed_st",
            "overgen_curtail_mw",
            "shed_mw",
            "realized_cost"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 96);
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r[0].parse::<f64>().unwrap(), k as f64 * 0.25);
        assert_eq!(r[5].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[6].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn receding_solve_writes_a_consistent_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(
        &data("two_bus"),
        &[
            "solve",
            "--days",
            "1",
            "--out",
            dir.path().to_str().unwrap(),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    let mut rdr = csv::Reader::from_path(dir.path().join("report.csv")).unwrap();
    let total: f64 = rdr
        .records()
        .map(|r| r.unwrap()[6].parse::<f64>().unwrap())
        .sum();
    let reported = summary["realized_cost"].as_f64().unwrap();
    assert!(
        (total - reported).abs() <= 1e-6 * reported.abs().max(1.0),
        "{total} vs {reported}"
    );
    assert_eq!(summary["stages"].as_array().unwrap().len(), 105);
}

#[test]
fn exported_models_solve_to_the_internal_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let case = toy::three_bus(1);
    let dg = build_day_graph(
        &case.network,
        &case.demand,
        &Schedule::default(),
        0,
        &DayBoundary::cold(case.network.generators.len()),
    )
    .unwrap();
    let opts = SolveOptions::with_gap(0.0);
    for label in ["da", "st02"] {
        let sub = dg
            .subproblems()
            .find(|s| optigraph::power::Subproblem::label(s.layer, s.index) == label)
            .unwrap();
        let model = dg
            .graph
            .find_subgraph(sub.id)
            .unwrap()
            .flatten()
            .unwrap()
            .model;
        let internal = solve_milp(&model, &opts).unwrap().objective;

        for (format, parse) in [("mps", parse_mps as fn(&str) -> _), ("lp", parse_lp)] {
            let path = dir.path().join(format!("{label}.{format}"));
            let out = cli(
                &data("three_bus"),
                &[
                    "export-model",
                    "--format",
                    format,
                    "--subproblem",
                    label,
                    "--out",
                    path.to_str().unwrap(),
                ],
            );
            assert!(
                out.status.success(),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            let text = fs::read_to_string(&path).unwrap();
            let reread = parse(&text).unwrap();
            assert_eq!(reread.num_columns(), model.num_columns());
            assert_eq!(reread.num_rows(), model.num_rows());
            let external = solve_milp(&reread, &opts).unwrap().objective;
            assert!(
                (external - internal).abs() <= 1e-6 * internal.abs().max(1.0),
                "{label} {format}: {external} vs {internal}"
            );
        }
    }
}

#[test]
fn unknown_subproblem_is_rejected() {
    let r = stderr_record(&cli(
        &data("two_bus"),
        &["export-model", "--subproblem", "st99"],
    ));
    assert_eq!(r["error"], "usage");
}

#[test]
fn graph_exports_land_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    for (view, format) in [("subproblems", "graphml"), ("timepoints", "dot")] {
        let path = dir.path().join(format!("{view}.{format}"));
        let out = cli(
            &data("two_bus"),
            &[
                "export-graph",
                "--view",
                view,
                "--format",
                format,
                "--out",
                path.to_str().unwrap(),
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = fs::read_to_string(&path).unwrap();
        match format {
            "graphml" => assert!(text.contains("<graphml")),
            _ => assert!(text.starts_with("graph") || text.starts_with("strict graph")),
        }
    }
}

/// Copies a bundled case into a scratch directory and replaces one line of
/// one file.
fn corrupt(file: &str, line: usize, with: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let src = data("two_bus").parent().unwrap().to_path_buf();
    for entry in fs::read_dir(&src).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    let path = dir.path().join(file);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[line - 1] = with.to_string();
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let cfg = dir.path().join("config.toml");
    (dir, cfg)
}

#[test]
fn malformed_input_names_file_line_and_field() {
    let gen_header = "label,bus,category,phi_s,phi_f,phi_v,phi_o,phi_c,c_min,c_max,ramp_up,ramp_down,startup_lim,shutdown_lim,min_up_h,min_down_h,eps,eps_s";
    let negative = format!("B0,-1{}", ",1".repeat(23));
    let cases = [
        ("network.csv", 2, "bus,B0,-1,1,lots", "unmet_cost"),
        ("network.csv", 4, "line,B0,B7,500,-100,100", "to"),
        ("network.csv", 4, "line,B0,B1,500,100,-100", "f_min"),
        ("network.csv", 3, "pipe,B1,-1,1,1000", "kind"),
        ("network.csv", 2, "bus,B0,-1,1,-5", "unmet_cost"),
        (
            "generators.csv",
            2,
            "G1,B0,x,500,100,20,5,0,20,150,60,60,80,80,3,2,20,20",
            "category",
        ),
        (
            "generators.csv",
            2,
            "G1,B0,d,500,100,abc,5,0,20,150,60,60,80,80,3,2,20,20",
            "phi_v",
        ),
        (
            "generators.csv",
            3,
            "P1,B9,s,50,30,45,5,0,5,60,120,120,60,60,1,1,20,20",
            "bus",
        ),
        (
            "generators.csv",
            2,
            "G1,B0,d,500,100,20,5,0,200,150,60,60,80,80,3,2,20,20",
            "c_min",
        ),
        (
            "generators.csv",
            1,
            &gen_header.replace("phi_o", "phi_x"),
            "record",
        ),
        ("demand_da.csv", 2, negative.as_str(), "h0"),
        ("demand_rt.csv", 3, "B1,1,2,3", "record"),
    ];
    for (file, line, with, field) in cases {
        let (_dir, cfg) = corrupt(file, line, with);
        let r = stderr_record(&cli(&cfg, &["stats"]));
        assert_eq!(r["error"], "input", "{file}:{line} -> {r}");
        assert!(
            r["file"].as_str().unwrap().ends_with(file),
            "{file}:{line} -> {r}"
        );
        assert_eq!(r["field"], field, "{file}:{line} -> {r}");
        if field != "record" || file != "generators.csv" {
            assert_eq!(r["line"], line as u64, "{file}:{line} -> {r}");
        }
    }
}

#[test]
fn bad_config_is_reported() {
    let (_dir, cfg) = corrupt("config.toml", 8, "uc = 2.0");
    let r = stderr_record(&cli(&cfg, &["stats"]));
    assert_eq!(r["error"], "config");
    let (_dir, cfg) = corrupt("config.toml", 2, "network = \"missing.csv\"");
    let r = stderr_record(&cli(&cfg, &["stats"]));
    assert_eq!(r["error"], "config");
    assert!(r["message"].as_str().unwrap().contains("files.network"));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_optigraph"))
        .args(["solve", "--mode", "sideways"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["error"], "usage");
}

/// One bus, given hourly DA and RT rows, read back through the CSV path.
fn single_bus_demand(da: &[f64], rt: &[f64]) -> optigraph::power::DemandData {
    let dir = tempfile::tempdir().unwrap();
    let case = toy::ring(2, 1);
    write_case(&case.network, &case.demand, dir.path()).unwrap();
    let row = |v: &[f64]| {
        let mut full: Vec<f64> = v.to_vec();
        full.resize(case.demand.hours(), *v.last().unwrap());
        full.iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    for (file, v) in [("demand_da.csv", da), ("demand_rt.csv", rt)] {
        let path = dir.path().join(file);
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[1] = format!("B0,{}", row(v));
        fs::write(&path, lines.join("\n") + "\n").unwrap();
    }
    let cfg = CaseConfig::load(&dir.path().join("config.toml")).unwrap();
    ingest(&cfg).unwrap().1
}

#[test]
fn quarter_hour_values_interpolate_hourly_rows() {
    let d = single_bus_demand(&[100.0, 100.0], &[100.0, 100.0]);
    for t in 0..8 {
        assert_eq!(d.demand(Layer::Ha, 0, t as f64 * 0.25), 100.0);
    }

    let d = single_bus_demand(&[100.0, 200.0], &[100.0, 200.0]);
    let ha: Vec<f64> = (0..5)
        .map(|t| d.demand(Layer::Ha, 0, t as f64 * 0.25))
        .collect();
    assert_eq!(ha, [100.0, 125.0, 150.0, 175.0, 200.0]);
    // the day-ahead layer holds each hourly sample
    assert_eq!(d.demand(Layer::Da, 0, 0.75), 100.0);
    assert_eq!(d.demand(Layer::Da, 0, 1.0), 200.0);

    let d = single_bus_demand(&[100.0], &[120.0]);
    assert_eq!(d.demand(Layer::St, 0, 0.0), 110.0);
    assert_eq!(d.demand(Layer::St, 0, 0.5), 110.0);
}
