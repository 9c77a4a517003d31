use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EX1: &[&str] = &[
    "--alpha",
    "0.065",
    "--gamma=-0.77",
    "--eta",
    "0.5",
    "--p",
    "0.1",
    "--c-it",
    "0.03",
    "--c-mea",
    "0.0019",
    "--c-op",
    "0.0027",
    "--dt",
    "5",
];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run_owned(args: &[String]) -> Output {
    run(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn json_ok(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn error_record(out: &Output, code: i32) -> Value {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    serde_json::from_slice(&out.stderr).expect("stderr is a json record")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn plan_example1_type2_v() {
    let v = json_ok(&run_owned(&with(
        EX1,
        &["plan", "--criterion", "V", "--family", "type2"],
    )));
    let d = &v["plan"]["design"];
    assert!(rel(d["n"].as_f64().unwrap(), 10.6) < 0.02);
    assert!(rel(d["m"].as_f64().unwrap(), 17.7) < 0.02);
    assert!(rel(d["total_time"].as_f64().unwrap(), 119.7) < 0.02);
    assert_eq!(v["plan"]["case"], "case 3");
}

#[test]
fn budget_rescaling_is_homogeneous() {
    let a = run_owned(&with(EX1, &["plan", "--criterion", "A"]));
    let b = run(&[
        "plan",
        "--criterion",
        "A",
        "--alpha",
        "0.065",
        "--gamma=-0.77",
        "--c-it",
        "0.06",
        "--c-mea",
        "0.0038",
        "--c-op",
        "0.0054",
        "--dt",
        "5",
        "--budget",
        "2",
    ]);
    assert_eq!(json_ok(&a), json_ok(&b));
}

#[test]
fn invalid_quantile_names_field() {
    let out = run_owned(&with(EX1, &["plan", "--criterion", "V", "--p", "1.3"]));
    let rec = error_record(&out, 2);
    assert_eq!(rec["field"], "p");
    assert!(rec["message"].as_str().unwrap().contains("`p`"));
}

#[test]
fn infeasible_budget_exits_2() {
    let out = run(&[
        "plan",
        "--criterion",
        "D",
        "--alpha",
        "0.1",
        "--gamma",
        "0",
        "--c-it",
        "0.9",
        "--c-mea",
        "0.1",
        "--c-op",
        "0.1",
        "--dt",
        "5",
    ]);
    assert_eq!(error_record(&out, 2)["error"], "infeasible");
}

#[test]
fn missing_value_exits_2() {
    let out = run(&["plan", "--alpha", "0.1", "--gamma", "0"]);
    let rec = error_record(&out, 2);
    assert_eq!(rec["error"], "missing");
    assert_eq!(rec["field"], "criterion");
}

#[test]
fn config_file_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"alpha": 0.065, "gamma": -0.77, "c_it": 0.03, "c_mea": 0.0019, "c_op": 0.0027, "dt": 5, "criterion": "A"}"#,
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let a = json_ok(&run(&["plan", "--config", path]));
    assert_eq!(a["criterion"], "A");
    let d = json_ok(&run(&["plan", "--config", path, "--criterion", "D"]));
    assert_eq!(d["criterion"], "D");
    assert_eq!(d["plan"]["case"], "case 7");

    std::fs::write(&cfg, r#"{"alpha": 0.065, "colour": 1}"#).unwrap();
    assert_eq!(error_record(&run(&["plan", "--config", path]), 2)["error"], "config");
}

/// Grid points where `a - b` changes sign, refined by linear interpolation.
fn crossings(tau: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..tau.len() {
        let (d0, d1) = (a[i - 1] - b[i - 1], a[i] - b[i]);
        if d0.is_finite() && d1.is_finite() && d0.signum() != d1.signum() {
            out.push(tau[i - 1] + (tau[i] - tau[i - 1]) * d0 / (d0 - d1));
        }
    }
    out
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = rows[0].iter().position(|h| h == name).unwrap();
    rows[1..].iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
}

#[test]
fn curves_cross_at_stationary_points() {
    let grid = ["--lo", "0.1", "--hi", "358.5", "--points", "4000", "--precision", "12"];
    let phi = csv_rows(&run_owned(&with(
        EX1,
        &[&["curve", "--which", "phi_vs_tau"][..], &grid].concat(),
    )));
    let k = csv_rows(&run_owned(&with(
        EX1,
        &[&["curve", "--which", "K"][..], &grid].concat(),
    )));
    assert_eq!(phi[0], ["tau", "phi_D", "phi_A", "phi_V"]);
    let tau = column(&phi, "tau");
    let kk = column(&k, "k");
    let one = |name, want: f64| {
        let x = crossings(&tau, &column(&phi, name), &kk);
        assert!(x.iter().any(|&r| rel(r, want) < 0.01), "{name}: {x:?}");
    };
    one("phi_A", 143.2);
    one("phi_V", 5.72);
    // D crosses where the half log-derivative of alpha tau^3 psi1 - tau^2 meets K
    one("phi_D", 4.958);
}

#[test]
fn objective_curve_minimum() {
    let out = run(&[
        "curve",
        "--which",
        "objective_vs_tau",
        "--criterion",
        "V",
        "--alpha",
        "0.065",
        "--gamma=-0.77",
        "--eta",
        "0.5",
        "--p",
        "0.1",
        "--lo",
        "1",
        "--hi",
        "1000",
        "--points",
        "5000",
        "--n",
        "10",
        "--m",
        "10",
    ]);
    let rows = csv_rows(&out);
    let tau = column(&rows, "tau");
    let v = column(&rows, "objective_V");
    let i = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    assert!((tau[i] - 53.2).abs() < 0.5, "{}", tau[i]);
}

#[test]
fn single_point_curve() {
    let rows = csv_rows(&run(&[
        "curve",
        "--which",
        "phi_vs_tau",
        "--criterion",
        "D",
        "--alpha",
        "0.065",
        "--lo",
        "3",
        "--hi",
        "3",
        "--points",
        "1",
    ]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], ["tau", "phi_D"]);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_fit_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sim.csv");
    let sim = [
        "simulate",
        "--alpha",
        "0.028",
        "--gamma=-2.073",
        "--units",
        "200",
        "--times",
        "50,100,150,200,250",
        "--seed",
        "7",
    ];
    let out = run(&[&sim[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let again = run(&sim);
    assert_eq!(std::fs::read(&path).unwrap(), again.stdout);

    let fit = json_ok(&run(&["fit", path.to_str().unwrap(), "--precision", "17"]));
    let (a, va) = (fit["alpha"].as_f64().unwrap(), fit["var_alpha"].as_f64().unwrap());
    let (g, vg) = (fit["gamma"].as_f64().unwrap(), fit["var_gamma"].as_f64().unwrap());
    assert!((a - 0.028).abs() < 3.0 * va.sqrt(), "{a} +- {}", va.sqrt());
    assert!((g + 2.073).abs() < 3.0 * vg.sqrt(), "{g} +- {}", vg.sqrt());
    assert_eq!(fit["increments"], 1000);
}

#[test]
fn bad_data_files() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.csv", "unit,time,value\nu7,10,1.0\nu7,20,0.4\n");
    let rec = error_record(&run(&["fit", &bad]), 2);
    let msg = rec["message"].as_str().unwrap();
    assert!(msg.contains("u7") && msg.contains("20"), "{msg}");
    assert_eq!(rec["line"], 3);

    let empty = write(dir.path(), "empty.csv", "");
    error_record(&run(&["fit", &empty]), 2);
    let header_only = write(dir.path(), "h.csv", "unit,time,value\n");
    error_record(&run(&["fit", &header_only]), 2);

    let garbled = write(dir.path(), "g.csv", "unit,time,value\na,1,x\n");
    let rec = error_record(&run(&["fit", &garbled]), 2);
    assert_eq!(rec["line"], 2);

    let unsorted = write(dir.path(), "u.csv", "unit,time,value\na,1,1\nb,1,1\na,2,2\n");
    assert!(error_record(&run(&["fit", &unsorted]), 2)["message"]
        .as_str()
        .unwrap()
        .contains("grouped"));
}

#[test]
fn numeric_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    // every unit degrades at exactly the same rate, so the shape estimate diverges
    let flat = write(dir.path(), "flat.csv", "unit,time,value\na,1,1\na,2,2\nb,1,1\nb,3,3\n");
    assert_eq!(error_record(&run(&["fit", &flat]), 3)["error"], "no_convergence");
}

const EX2: &[&str] = &[
    "--alpha",
    "0.028222",
    "--gamma=-2.073",
    "--eta",
    "50",
    "--p",
    "0.05",
    "--c-it",
    "7.56e-2",
    "--c-mea",
    "1.06e-3",
    "--c-op",
    "1.17e-4",
    "--dt",
    "5",
];

#[test]
fn sensitivity_layouts() {
    let rows = csv_rows(&run_owned(&with(
        EX2,
        &["sensitivity", "--multipliers=-3,-2,-1,0,1,2,3"],
    )));
    assert_eq!(rows[0], ["criterion", "gamma", "-3", "-2", "-1", "0", "1", "2", "3"]);
    assert_eq!(rows.len(), 1 + 1 + 1 + 7);
    assert_eq!(rows[1][..2], ["D", "-"]);
    assert_eq!(rows[2][..2], ["A", "-"]);
    let a: Vec<f64> = rows[2][2..].iter().map(|x| x.parse().unwrap()).collect();
    assert!((a[0] - 94.85).abs() < 0.01 && a[3] == 100.0);

    let d = csv_rows(&run_owned(&with(EX2, &["sensitivity", "--criterion", "D"])));
    assert_eq!(d.len(), 2);
    assert_eq!(d[1].len(), 9);

    let zero = csv_rows(&run_owned(&with(
        EX2,
        &["sensitivity", "--multipliers", "0", "--family", "type2"],
    )));
    assert_eq!(zero.len(), 4);
    for r in &zero[1..] {
        assert_eq!(r[2], "100");
    }
}

#[test]
fn sensitivity_is_deterministic() {
    let args = with(
        EX2,
        &[
            "sensitivity",
            "--criterion",
            "V",
            "--multipliers=-1,0,1",
            "--precision",
            "17",
        ],
    );
    assert_eq!(run_owned(&args).stdout, run_owned(&args).stdout);
}

#[test]
fn reported_designs_re_evaluate() {
    for family in ["type1", "type2"] {
        for crit in ["D", "A", "V"] {
            let plan = json_ok(&run_owned(&with(
                EX1,
                &[
                    "plan",
                    "--criterion",
                    crit,
                    "--family",
                    family,
                    "--precision",
                    "17",
                    "--integer",
                ],
            )));
            for key in ["plan", "integer"] {
                let p = &plan[key];
                let d = &p["design"];
                let s = |k: &str| d[k].as_f64().unwrap().to_string();
                let eval = json_ok(&run_owned(&with(
                    EX1,
                    &[
                        "eval",
                        "--criterion",
                        crit,
                        "--family",
                        family,
                        "--precision",
                        "17",
                        "--n",
                        &s("n"),
                        "--m",
                        &s("m"),
                        "--total",
                        &s("total_time"),
                    ],
                )));
                let (a, b) = (p["objective"].as_f64().unwrap(), eval["objective"].as_f64().unwrap());
                assert!(rel(a, b) < 1e-9, "{family} {crit} {key}: {a} vs {b}");
                assert_eq!(eval["feasible"], true);
            }
        }
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("plan.json");
    let out = run_owned(&with(
        EX1,
        &["plan", "--criterion", "A", "--out", path.to_str().unwrap()],
    ));
    assert!(out.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn fixed_nm_interval() {
    let v = json_ok(&run_owned(&with(
        EX1,
        &["plan", "--criterion", "V", "--n", "10", "--m", "10"],
    )));
    assert_eq!(v["verdict"], "Interior");
    assert!((v["tau"].as_f64().unwrap() - 53.2).abs() < 0.5);
    let r = json_ok(&run(&[
        "plan",
        "--criterion",
        "V",
        "--alpha",
        "2.26e-4",
        "--gamma=-11.12",
        "--eta",
        "5",
        "--p",
        "0.05",
        "--n",
        "10",
        "--m",
        "10",
    ]));
    assert_eq!(r["verdict"], "NoInteriorOptimum");
}

#[test]
fn default_precision_is_six_digits() {
    let v = json_ok(&run_owned(&with(EX1, &["plan", "--criterion", "A"])));
    let n = v["plan"]["design"]["n"].as_f64().unwrap();
    assert_eq!(format!("{:.5e}", n).parse::<f64>().unwrap(), n);
    assert_eq!(
        error_record(
            &run_owned(&with(EX1, &["plan", "--criterion", "A", "--precision", "0"])),
            2
        )["field"],
        "precision"
    );
}
