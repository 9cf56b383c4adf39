use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sta(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sta"))
        .args(args)
        .current_dir(cwd)
        .env_remove("STA_TRANSPORT_OUT")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn echo_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "experiment = \"echo\"\n[protocol]\nkind = \"cd\"\ns = 0.4\n");
    let out = sta(&["echo", "--config", &cfg, "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("res/echo.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,final_n"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.4);
    assert!(row[1].parse::<f64>().unwrap() < 1e-8);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("res/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "echo");
    assert_eq!(manifest["run_id"].as_str().unwrap().len(), 12);
    assert_eq!(manifest["config"]["oscillator"]["g_max"], 1.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[protocol]\nkind = \"cd\"\ns = -1\n");
    let out = sta(&["echo", "--config", &bad], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("protocol.s"));

    let unknown = write(dir.path(), "unknown.toml", "[protocol]\nkind = \"cd\"\ns = 0.4\nspeed = 2\n");
    assert_eq!(sta(&["echo", "--config", &unknown], dir.path()).status.code(), Some(1));

    let missing = sta(&["echo", "--config", "nope.toml"], dir.path());
    assert_eq!(missing.status.code(), Some(3));

    let ok = write(dir.path(), "ok.toml", "[protocol]\nkind = \"linear\"\ns = 0.3\n");
    let trunc = sta(&["echo", "--config", &ok, "--fock-dim", "4", "--out", "t"], dir.path());
    assert_eq!(trunc.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&trunc.stderr).contains("larger Fock dimension"));

    fs::write(dir.path().join("blocker"), "x").unwrap();
    let io = sta(&["echo", "--config", &ok, "--out", "blocker/sub"], dir.path());
    assert_eq!(io.status.code(), Some(3));
}

#[test]
fn output_dir_from_environment_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[protocol]\nkind = \"ue\"\ns = 0.5\n[waveform]\npoints = 5\n");
    let out = Command::new(env!("CARGO_BIN_EXE_sta"))
        .args(["waveform", "--config", &cfg])
        .current_dir(dir.path())
        .env("STA_TRANSPORT_OUT", "from_env")
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("from_env/waveform.csv")).unwrap();
    assert!(csv.starts_with("t,f,f_dot,f_ddot,h\n"));
    assert_eq!(csv.lines().count(), 6);

    let out = Command::new(env!("CARGO_BIN_EXE_sta"))
        .args(["waveform", "--config", &cfg, "--out", "from_flag"])
        .current_dir(dir.path())
        .env("STA_TRANSPORT_OUT", "from_env2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from_flag/waveform.csv").exists());
    assert!(!dir.path().join("from_env2").exists());
}

#[test]
fn faithful_trace_flag_adds_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[protocol]\nkind = \"cd\"\ns = 0.4\n[trace]\nstops = 6\n");
    let out = sta(&["trace", "--config", &cfg, "--out", "o", "--faithful-trace"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,n_inst,n_lab,n_faithful"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(v[1] < 1e-8 && (v[3] - v[1]).abs() < 1e-8, "{line}");
    }
    let traj = fs::read_to_string(dir.path().join("o/trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,re_alpha,im_alpha,n_lab,n_inst\n"));
}

#[test]
fn sweep_and_scaling_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[sweep]\nprotocols = [\"cd\", \"fourier2\"]\nomega_ratios = [0.98, 1.0, 1.02]\n\
         [scaling]\nflatness_orders = [1]\nflatness_points = 5\n",
    );
    let out = sta(&["sweep", "--config", &cfg, "--out", "s"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert!(csv.starts_with("protocol,omega_ratio,final_n\ncd,9.7999999999999998e-1,"));
    assert_eq!(csv.lines().count(), 7);

    let out = sta(&["scaling", "--config", &cfg, "--out", "x"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let exps = fs::read_to_string(dir.path().join("x/exponents.csv")).unwrap();
    assert!(exps.starts_with("protocol,quantity,exponent,std_error,points\n"));
    assert!(exps.contains("fourier1,final_n_vs_detuning,"));
}

#[test]
fn validate_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = sta(&["validate", "--out", "v"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("v/validate.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(1) == Some("true")), "{csv}");
}
