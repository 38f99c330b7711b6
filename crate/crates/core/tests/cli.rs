use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::process::{Command, Output};

fn omd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omd-tch"))
        .args(args)
        .current_dir(dir)
        .env_remove("MOO_SEED")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

fn digest(path: &Path) -> u64 {
    let mut h = DefaultHasher::new();
    fs::read(path).unwrap().hash(&mut h);
    h.finish()
}

#[test]
fn solve_writes_trace_summary_archive_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(&["solve", "--problem", "vlmop2", "--out-dir", "run"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let run = dir.path().join("run");
    assert_eq!(rows(&run.join("trace.csv")), 5000);
    let header = fs::read_to_string(run.join("trace.csv")).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "round,f_1,f_2,lambda_1,lambda_2,tch_value,archive_size");
    let summary = fs::read_to_string(run.join("trace_summary.csv")).unwrap();
    let labels: Vec<&str> = summary.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["bar", "tilde", "last"]);
    assert!(run.join("trace_archive.csv").exists());
    let manifest = fs::read_to_string(run.join("trace.manifest")).unwrap();
    assert!(manifest.contains("command = solve") || manifest.contains("command=solve"), "{manifest}");
}

#[test]
fn single_round_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(&["solve", "--rounds", "1", "--method", "omd-gd", "--out", "t.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(rows(&dir.path().join("t.csv")), 1);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(&["solve", "--method", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for name in ["ls", "tch", "omd-gd", "adaomd-gd"] {
        assert!(e.contains(name), "{e}");
    }

    let o = omd(&["fedsim", "--rounds", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--clients"));

    assert_eq!(omd(&["solve", "--rounds", "abc"], dir.path()).status.code(), Some(2));
    assert_eq!(omd(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(omd(&["solve", "--pref", "0.5,0.2,0.3"], dir.path()).status.code(), Some(2));
    assert_eq!(omd(&["sweep", "--prefs", "1"], dir.path()).status.code(), Some(2));
    assert_eq!(omd(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(&["sweep", "--rounds", "300", "--seeds", "0..2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    // 4 methods x 10 preferences x 3 seeds
    assert_eq!(rows(&dir.path().join("sweep_summary.csv")), 120);
    for m in ["ls", "tch", "omd-gd", "adaomd-gd"] {
        let svg = fs::read_to_string(dir.path().join(format!("sweep_{m}.svg"))).unwrap();
        assert_eq!(svg.matches("<path").count(), 10);
        assert_eq!(svg.matches("<circle").count(), 30);
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}

#[test]
fn sweep_with_two_preferences_uses_the_axes() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(&["sweep", "--prefs", "2", "--methods", "ls", "--rounds", "50"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    let w: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect();
    assert_eq!(w, vec![(1.0, 0.0), (0.0, 1.0)]);
}

#[test]
fn svg_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = omd(&["sweep", "--problem", "quadratic", "--rounds", "100", "--methods", "omd-gd"], d.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(digest(&a.path().join("sweep_omd-gd.svg")), digest(&b.path().join("sweep_omd-gd.svg")));
}

#[test]
fn single_client_has_zero_parity() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(
        &["fedsim", "--clients", "1", "--rounds", "5", "--heterogeneity", "iid", "--samples", "200"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("fed_summary.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines().skip(1) {
        let parity: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(parity, 0.0, "{line}");
    }
    assert_eq!(rows(&dir.path().join("fed_rounds_omd-gd_seed0.csv")), 5);
}

#[test]
fn manifest_rerun_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(
        &["fedsim", "--clients", "3", "--rounds", "8", "--seeds", "4,9", "--samples", "200", "--methods", "omd-gd,adaomd-gd"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let produced: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    assert_eq!(produced.len(), 5);
    let before: Vec<u64> = produced.iter().map(|p| digest(p)).collect();
    for p in &produced {
        fs::remove_file(p).unwrap();
    }
    let o = omd(&["fedsim", "--config", "fedsim.manifest"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let after: Vec<u64> = produced.iter().map(|p| digest(p)).collect();
    assert_eq!(before, after);

    let o = omd(&["solve", "--method", "adaomd-eg", "--rounds", "200", "--out", "s/t.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let first = digest(&dir.path().join("s/t.csv"));
    fs::remove_file(dir.path().join("s/t.csv")).unwrap();
    let o = omd(&["solve", "--config", "s/t.manifest"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(first, digest(&dir.path().join("s/t.csv")));
}

#[test]
fn config_for_other_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.cfg"), "command = sweep\nrounds = 3\n").unwrap();
    assert_eq!(omd(&["solve", "--config", "c.cfg"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("d.cfg"), "bogus = 3\n").unwrap();
    assert_eq!(omd(&["solve", "--config", "d.cfg"], dir.path()).status.code(), Some(2));
    // flag overrides the file
    fs::write(dir.path().join("e.cfg"), "rounds = 3\n").unwrap();
    let o = omd(&["solve", "--config", "e.cfg", "--rounds", "4", "--out", "t.csv"], dir.path());
    assert!(o.status.success());
    assert_eq!(rows(&dir.path().join("t.csv")), 4);
}

#[test]
fn bound_prints_step_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let o = omd(&["bound", "--variant", "pgd-eg", "--t", "100"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    let eta: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("eta_lambda = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((eta - 0.074466).abs() < 1e-5);
    assert!(!out.contains("high_prob_term"));
    let o = omd(&["bound", "--t", "100", "--gamma", "0.05"], dir.path());
    assert!(String::from_utf8(o.stdout).unwrap().contains("high_prob_term"));
    assert_eq!(omd(&["bound"], dir.path()).status.code(), Some(2));
}

#[test]
fn seed_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: Option<&str>, out: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_omd-tch"));
        c.args(["solve", "--rounds", "20", "--out", out]).current_dir(dir.path()).env_remove("MOO_SEED");
        if let Some(s) = seed {
            c.env("MOO_SEED", s);
        }
        c.output().unwrap()
    };
    assert!(run(Some("7"), "a.csv").status.success());
    assert!(run(Some("7"), "b.csv").status.success());
    assert!(run(None, "c.csv").status.success());
    let p = |f: &str| dir.path().join(f);
    assert_eq!(digest(&p("a.csv")), digest(&p("b.csv")));
    assert_ne!(digest(&p("a.csv")), digest(&p("c.csv")));
    assert!(fs::read_to_string(p("a.manifest")).unwrap().contains('7'));
    assert_eq!(run(Some("x"), "d.csv").status.code(), Some(2));
}
