use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const QUICK_SWEEP: &str = "\
# short ladder, one refinement level
eps_max = 1.6
eps_count = 4
h = 0.2
levels = 1
fit_tol = 10
";

fn sweep_into(dir: &Path, config: &Path, workers: &str) -> Output {
    bin(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--set",
        &format!("workers={workers}"),
    ])
}

#[test]
fn sweep_outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sweep.cfg");
    fs::write(&cfg, QUICK_SWEEP).unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    for (d, w) in [(&a, "1"), (&b, "1"), (&c, "3")] {
        let o = sweep_into(d, &cfg, w);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["sweep.csv", "fit.csv", "plot_subcritical.dat"] {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
        assert_eq!(x, fs::read(c.join(name)).unwrap(), "{name}");
    }
    let sweep = fs::read_to_string(a.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 5);
    assert!(sweep.starts_with("eps,T_est,converged,sensitivity,h_finest"));
    assert_eq!(fs::read_to_string(a.join("fit.csv")).unwrap().lines().count(), 2);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&bin(&["--help"])), 0);
    assert_eq!(code(&bin(&["frobnicate"])), 1);
    assert_eq!(code(&bin(&["solve", "--out", out, "--set", "epss=0.1"])), 1);
    assert_eq!(code(&bin(&["solve", "--out", out, "--config", "/nonexistent/x.cfg"])), 1);
    // Default profile: the multiplier pair does not exist, so theorem mode refuses.
    assert_eq!(code(&bin(&["solve", "--out", out])), 3);
    // A fit outside its tolerance is a numerical failure; outputs are still written.
    let cfg = tmp.path().join("sweep.cfg");
    fs::write(&cfg, QUICK_SWEEP).unwrap();
    let o = bin(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out, "--set", "fit_tol=1e-9"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(tmp.path().join("fit.csv").exists());
    // No row blows up before a tiny horizon cap.
    let o = bin(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out, "--set", "horizon=1", "--set", "horizon_cap=1"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn every_subcommand_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let runs: [(&[&str], &str); 6] = [
        (&["exponents", "--set", "p=2"], "exponents.csv"),
        (&["ode", "--set", "t0=1", "--set", "horizon=40"], "multipliers.csv"),
        (&["testfn", "--set", "points=11"], "testfn.csv"),
        (&["solve", "--set", "mode=free", "--set", "horizon=5", "--set", "h=0.1"], "trace.csv"),
        (&["iterate", "--set", "nodes=401", "--set", "sweeps=50"], "envelope.csv"),
        (&["iterate", "--set", "kind=crit", "--set", "nodes=2001"], "sequences.csv"),
    ];
    for (args, file) in runs {
        let mut full = args.to_vec();
        full.extend(["--out", out]);
        let o = bin(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(tmp.path().join(file)).unwrap();
        assert!(text.lines().count() >= 2 && text.ends_with('\n'), "{file}");
    }
}

#[test]
fn single_point_sweep_skips_the_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = bin(&[
        "sweep", "--out", out, "--set", "eps_count=1", "--set", "eps_max=1.6", "--set", "levels=1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no fit"));
    assert_eq!(fs::read_to_string(tmp.path().join("sweep.csv")).unwrap().lines().count(), 2);
    assert_eq!(fs::read_to_string(tmp.path().join("fit.csv")).unwrap().lines().count(), 1);
}
