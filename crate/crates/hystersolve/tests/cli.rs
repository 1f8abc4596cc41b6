//! End-to-end tests of the command layer: config files in, CSV/JSON out,
//! exit codes as documented.

use hystersolve::cli::{cmd_check_compat, cmd_norms, cmd_refine, cmd_run, GlobalOpts};
use hystersolve::config::SimulationConfig;
use std::fs;
use std::path::Path;

fn steady_config(steps: usize, stride: usize) -> String {
    format!(
        "mesh.length = 1.0\n\
         mesh.nodes = 21\n\
         time.total = 0.5\n\
         time.steps = {steps}\n\
         preisach.grid_count = 16\n\
         preisach.lambda_max = 1.0\n\
         preisach.offset = 0.5\n\
         preisach.density.kind = constant\n\
         preisach.density.value = 1.0\n\
         laws.kappa.kind = constant\n\
         laws.kappa.value = 1.0\n\
         laws.gamma_left = 1.0\n\
         laws.gamma_right = 1.0\n\
         laws.ustar.kind = constant\n\
         laws.ustar.left = 0.3\n\
         laws.ustar.right = 0.3\n\
         initial.u0.kind = constant\n\
         initial.u0.value = 0.3\n\
         output.snapshot_stride = {stride}\n\
         output.memory_snapshots = true\n"
    )
}

fn ramp_config(steps: usize) -> String {
    steady_config(steps, 4).replace(
        "laws.ustar.kind = constant\nlaws.ustar.left = 0.3\nlaws.ustar.right = 0.3\n",
        "laws.ustar.kind = ramp\nlaws.ustar.left_start = 0.3\nlaws.ustar.left_end = 0.8\n\
         laws.ustar.right_start = 0.3\nlaws.ustar.right_end = 0.8\n",
    )
}

fn count_lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("steady.cfg");
    fs::write(&cfg_path, steady_config(10, 3)).unwrap();
    let out_dir = dir.path().join("out");
    let opts = GlobalOpts {
        force: false,
        out_dir: Some(out_dir.clone()),
    };
    assert_eq!(cmd_run(&cfg_path, &opts), 0);

    // diagnostics: one row per step plus header
    assert_eq!(count_lines(&out_dir.join("diagnostics.csv")), 11);

    // snapshots: ceil(steps/stride) + 1 distinct steps
    let snaps = fs::read_to_string(out_dir.join("snapshots.csv")).unwrap();
    let mut steps: Vec<&str> = snaps
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    steps.dedup();
    assert_eq!(steps.len(), 5, "snapshot steps: {steps:?}");

    // memory snapshot: nodes x thresholds rows plus header
    assert_eq!(count_lines(&out_dir.join("memory.csv")), 1 + 21 * 16);

    // summary JSON with schema version, config echo, estimates
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["config"]["mesh.nodes"], "21");
    assert!(summary["estimates"].as_array().unwrap().len() >= 8);
    assert!(summary["compatibility"]["items"].as_array().unwrap().len() >= 5);

    // steady state: all hard estimates ~ 0
    for est in summary["estimates"].as_array().unwrap() {
        if est["name"] == "mass_balance" {
            assert!(est["measured"].as_f64().unwrap() < 1e-12);
        }
    }
}

#[test]
fn ramp_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("ramp.cfg");
    fs::write(&cfg_path, ramp_config(20)).unwrap();
    let opts = GlobalOpts {
        force: false,
        out_dir: Some(dir.path().join("out")),
    };
    assert_eq!(cmd_run(&cfg_path, &opts), 0);
    assert_eq!(count_lines(&dir.path().join("out/diagnostics.csv")), 21);
}

#[test]
fn invalid_config_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.cfg");
    fs::write(
        &cfg_path,
        steady_config(10, 3)
            .replace("laws.gamma_left = 1.0", "laws.gamma_left = 0.0")
            .replace("laws.gamma_right = 1.0", "laws.gamma_right = 0.0"),
    )
    .unwrap();
    let opts = GlobalOpts::default();
    assert_eq!(cmd_run(&cfg_path, &opts), 3);
    assert_eq!(cmd_check_compat(&cfg_path), 3);
    assert_eq!(cmd_run(Path::new("/nonexistent.cfg"), &opts), 3);
}

#[test]
fn check_compat_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.cfg");
    fs::write(&good, steady_config(10, 3)).unwrap();
    assert_eq!(cmd_check_compat(&good), 0);

    // Robin-incompatible initial data: u0 = 0.3 but u*(0) = 0, so the
    // boundary defect is far above the O(h) tolerance.
    let bad = dir.path().join("incompatible.cfg");
    fs::write(
        &bad,
        steady_config(10, 3)
            .replace("laws.ustar.left = 0.3", "laws.ustar.left = 0.0")
            .replace("laws.ustar.right = 0.3", "laws.ustar.right = 0.0"),
    )
    .unwrap();
    assert_eq!(cmd_check_compat(&bad), 2);

    // run refuses without --force, proceeds with it
    let opts = GlobalOpts {
        force: false,
        out_dir: Some(dir.path().join("o1")),
    };
    assert_eq!(cmd_run(&bad, &opts), 3);
    let forced = GlobalOpts {
        force: true,
        out_dir: Some(dir.path().join("o2")),
    };
    assert_eq!(cmd_run(&bad, &forced), 0);
}

#[test]
fn gpi_outer_map_runs_compatibly() {
    // G = P o g with a linear outer map; the history memory lives in the
    // mapped variable, so compatibility and the run must both go through.
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("gpi.cfg");
    fs::write(
        &cfg_path,
        ramp_config(20) + "preisach.outer.kind = linear\npreisach.outer.slope = 0.8\n",
    )
    .unwrap();
    assert_eq!(cmd_check_compat(&cfg_path), 0);
    let opts = GlobalOpts {
        force: false,
        out_dir: Some(dir.path().join("out")),
    };
    assert_eq!(cmd_run(&cfg_path, &opts), 0);

    let cubic = dir.path().join("gpi_cubic.cfg");
    fs::write(
        &cubic,
        ramp_config(20)
            + "preisach.outer.kind = cubic\npreisach.outer.linear = 0.9\npreisach.outer.cubic = 0.05\n",
    )
    .unwrap();
    let opts2 = GlobalOpts {
        force: false,
        out_dir: Some(dir.path().join("out2")),
    };
    assert_eq!(cmd_run(&cubic, &opts2), 0);
}

#[test]
fn step_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("starved.cfg");
    fs::write(
        &cfg_path,
        ramp_config(10) + "solver.max_iter = 2\nsolver.tol = 1e-14\n",
    )
    .unwrap();
    let opts = GlobalOpts {
        force: false,
        out_dir: Some(dir.path().join("out")),
    };
    assert_eq!(cmd_run(&cfg_path, &opts), 1);
}

#[test]
fn refine_writes_study() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("ramp.cfg");
    fs::write(&cfg_path, ramp_config(10)).unwrap();
    let opts = GlobalOpts {
        force: false,
        out_dir: Some(dir.path().join("out")),
    };
    assert_eq!(cmd_refine(&cfg_path, 3, &opts), 0);
    let study: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/refine.json")).unwrap())
            .unwrap();
    let levels = study["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert_eq!(levels[0]["steps"], 10);
    assert_eq!(levels[2]["steps"], 40);
    assert_eq!(study["pairs"].as_array().unwrap().len(), 2);
}

#[test]
fn norms_command_on_time_series() {
    let dir = tempfile::tempdir().unwrap();
    // first sine eigenfunction on (0, T): |v|_{V*} = T/pi up to quadrature
    let t_len = 2.0_f64;
    let n = 401;
    let mut csv = String::from("t,value\n");
    for k in 0..n {
        let t = t_len * k as f64 / (n - 1) as f64;
        let v = (2.0 / t_len).sqrt() * (std::f64::consts::PI * t / t_len).sin();
        csv.push_str(&format!("{t},{v}\n"));
    }
    let path = dir.path().join("ell1.csv");
    fs::write(&path, csv).unwrap();
    assert_eq!(
        cmd_norms(&path, &["h".into(), "vstar".into(), "lux:power:2".into()]),
        0
    );

    // constant 1 on (0, 1): luxemburg power-2 norm is 1
    let mut csv = String::from("t,value\n");
    for k in 0..101 {
        csv.push_str(&format!("{},1.0\n", k as f64 / 100.0));
    }
    let flat = dir.path().join("flat.csv");
    fs::write(&flat, csv).unwrap();
    assert_eq!(cmd_norms(&flat, &["lux:power:2".into()]), 0);

    // empty sample set and unknown norms are rejected
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "t,value\n").unwrap();
    assert_eq!(cmd_norms(&empty, &["h".into()]), 3);
    assert_eq!(cmd_norms(&path, &["banana".into()]), 3);
    assert_eq!(cmd_norms(&path, &[]), 3);
}

#[test]
fn binary_norms_values_end_to_end() {
    // the first sine eigenfunction: |v|_H = 1 and |v|_{V*} = T/pi
    let dir = tempfile::tempdir().unwrap();
    let t_len = 2.0_f64;
    let n = 400;
    let mut csv = String::from("t,value\n");
    for k in 0..=n {
        let t = t_len * k as f64 / n as f64;
        let v = (2.0 / t_len).sqrt() * (std::f64::consts::PI * t / t_len).sin();
        csv.push_str(&format!("{t},{v}\n"));
    }
    let path = dir.path().join("ell1.csv");
    fs::write(&path, csv).unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_hystersolve"))
        .args(["norms"])
        .arg(&path)
        .args(["--norm", "h", "--norm", "vstar"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let h = doc["norms"]["h"].as_f64().unwrap();
    let vstar = doc["norms"]["vstar"].as_f64().unwrap();
    assert!((h - 1.0).abs() < 1e-4, "h = {h}");
    assert!(
        (vstar - t_len / std::f64::consts::PI).abs() < 1e-4,
        "vstar = {vstar}"
    );
}

#[test]
fn binary_run_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("steady.cfg");
    fs::write(&cfg, steady_config(5, 2)).unwrap();
    let ok = std::process::Command::new(env!("CARGO_BIN_EXE_hystersolve"))
        .arg("run")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "mesh.length = -1\n").unwrap();
    let fail = std::process::Command::new(env!("CARGO_BIN_EXE_hystersolve"))
        .arg("run")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(3));
}

#[test]
fn config_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("a.cfg");
    fs::write(&cfg_path, ramp_config(12)).unwrap();
    let cfg = SimulationConfig::load(&cfg_path).unwrap();
    let echoed = dir.path().join("b.cfg");
    fs::write(&echoed, cfg.write_string()).unwrap();
    let cfg2 = SimulationConfig::load(&echoed).unwrap();
    // base_dir differs only if the directories differ; here both are tempdir
    assert_eq!(cfg, cfg2);
}

#[test]
fn tabulated_inputs_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    // density table: rho = 1 on (0,1) x (-1,1)
    let mut dens = String::from("r,v,rho\n");
    for i in 0..=4 {
        for j in 0..=8 {
            let r = i as f64 / 4.0;
            let v = -1.0 + 2.0 * j as f64 / 8.0;
            dens.push_str(&format!("{r},{v},1.0\n"));
        }
    }
    fs::write(dir.path().join("dens.csv"), dens).unwrap();

    // memory table matching u0 = 0.3: lambda(x, r) = max(0.3 - r, 0)
    let mut lam = String::from("x,r,lambda\n");
    for i in 0..=4 {
        for j in 0..=16 {
            let x = i as f64 / 4.0;
            let r = j as f64 / 16.0;
            lam.push_str(&format!("{x},{r},{}\n", (0.3 - r).max(0.0)));
        }
    }
    fs::write(dir.path().join("lam.csv"), lam).unwrap();

    // boundary series: steps + 1 rows
    let steps = 10;
    let mut us = String::from("left,right\n");
    for i in 0..=steps {
        let v = 0.3 + 0.2 * i as f64 / steps as f64;
        us.push_str(&format!("{v},{v}\n"));
    }
    fs::write(dir.path().join("ustar.csv"), us).unwrap();

    let cfg_text = steady_config(steps, 3)
        .replace(
            "preisach.density.kind = constant\npreisach.density.value = 1.0\n",
            "preisach.density.kind = tabulated\npreisach.density.file = dens.csv\n",
        )
        .replace(
            "laws.ustar.kind = constant\nlaws.ustar.left = 0.3\nlaws.ustar.right = 0.3\n",
            "laws.ustar.kind = file\nlaws.ustar.file = ustar.csv\n",
        )
        + "initial.lambda.kind = file\ninitial.lambda.file = lam.csv\n";
    let cfg_path = dir.path().join("tab.cfg");
    fs::write(&cfg_path, cfg_text).unwrap();
    let opts = GlobalOpts {
        force: false,
        out_dir: Some(dir.path().join("out")),
    };
    assert_eq!(cmd_run(&cfg_path, &opts), 0);

    // short boundary series is a hard error
    let mut us_short = String::from("left,right\n");
    for _ in 0..steps {
        us_short.push_str("0.3,0.3\n");
    }
    fs::write(dir.path().join("ustar.csv"), us_short).unwrap();
    assert_eq!(cmd_run(&cfg_path, &opts), 3);
}
