use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dqpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqpt"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn manifest_flags(dir: &Path) -> serde_json::Value {
    let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
    serde_json::from_str::<serde_json::Value>(&text).unwrap()["flags"].clone()
}

#[test]
fn minimal_flags_resolve_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("q");
    let o = dqpt(&["quench", "--n", "10", "--h", "1.0", "--j", "1.0", "--tmax", "0.2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let flags = manifest_flags(&out);
    assert_eq!(flags["dt"], "0.01");
    assert_eq!(flags["jp"], "0");
    assert_eq!(flags["format"], "csv");
    let csv = fs::read_to_string(out.join("quench.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,f_Q_z,f_Q_opt,n_opt_x,n_opt_y,n_opt_z,lambda,loschmidt,energy,norm,delta_phi"
    );
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 1e-11);
    assert_eq!(first[6], 0.0);
    assert!((first[9] - 1.0).abs() < 1e-11);
    assert_eq!(csv.lines().count(), 22);
}

#[test]
fn identical_runs_are_bit_identical_and_rerunnable() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let common = ["--n", "6", "--h", "0.7", "--jp", "0.3", "--tmax", "1", "--dt", "0.05"];
    for dir in [&a, &b] {
        let mut args = vec!["quench"];
        args.extend_from_slice(&common);
        args.extend_from_slice(&["--out", dir.to_str().unwrap()]);
        assert!(dqpt(&args).status.success());
    }
    let qa = fs::read(a.join("quench.csv")).unwrap();
    assert_eq!(qa, fs::read(b.join("quench.csv")).unwrap());
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());

    // The recorded configuration reproduces the run.
    let c = tmp.path().join("c");
    let conf = a.join("run.conf");
    let o = dqpt(&["quench", "--config", conf.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(qa, fs::read(c.join("quench.csv")).unwrap());
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    fs::write(&conf, "# test\nn = 4\nh = 0.5\ntmax = 0.3\ndt = 0.1\nopt-every = 0\n").unwrap();
    let out = tmp.path().join("o");
    let o = dqpt(&["quench", "--config", conf.to_str().unwrap(), "--h", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let flags = manifest_flags(&out);
    assert_eq!(flags["h"], "2");
    assert_eq!(flags["n"], "4");
    assert_eq!(flags["opt-every"], "0");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.conf");
    fs::write(&bad, "n = 4\nbogus = 1\n").unwrap();
    let out = tmp.path().join("o");
    let o = dqpt(&["quench", "--config", bad.to_str().unwrap(), "--h", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

    let o = dqpt(&["open", "--n", "30", "--h", "1", "--gamma-z", "0.05", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let o = dqpt(&["quench", "--n", "4", "--h", "1", "--dt", "-0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = dqpt(&["quench", "--n", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = dqpt(&["quench", "--n", "4", "--h", "1", "--nonsense"]);
    assert_eq!(o.status.code(), Some(2));

    let o = dqpt(&["spectrum", "--ns", "20", "--h", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn every_command_writes_its_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |name: &str| tmp.path().join(name).to_str().unwrap().to_string();
    let runs: Vec<(Vec<String>, Vec<&str>)> = vec![
        (
            vec!["spectrum".into(), "--ns".into(), "4,6".into(), "--h".into(), "1".into(), "--h-values".into(), "0.5,1".into(), "--tmax".into(), "4".into(), "--dt".into(), "0.05".into(), "--out".into(), p("s")],
            vec!["spectrum_scan.csv", "spectrum_peaks.csv", "decomposition_n4.csv", "decomposition_n6.csv"],
        ),
        (
            vec!["husimi".into(), "--n".into(), "6".into(), "--h".into(), "1".into(), "--husimi-times".into(), "0,0.5".into(), "--theta-nodes".into(), "21".into(), "--phi-nodes".into(), "16".into(), "--out".into(), p("h")],
            vec!["husimi_0.csv", "husimi_1.csv", "husimi_summary.csv"],
        ),
        (
            vec!["open".into(), "--n".into(), "3".into(), "--h".into(), "1".into(), "--scan".into(), "--gz-values".into(), "0,0.1".into(), "--gm-values".into(), "0".into(), "--tmax".into(), "1".into(), "--dt".into(), "0.25".into(), "--format".into(), "json".into(), "--out".into(), p("o")],
            vec!["open_scan.json", "open_gz0_gm0.json", "open_gz1_gm0.json"],
        ),
        (
            vec!["scaling".into(), "--ns".into(), "6,8,10".into(), "--h".into(), "1".into(), "--tmax".into(), "4".into(), "--dt".into(), "0.02".into(), "--workers".into(), "2".into(), "--out".into(), p("c")],
            vec!["peaks.csv", "fits.json", "curve_n8.csv", "rescaled_n10.csv"],
        ),
    ];
    for (args, files) in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = dqpt(&refs);
        assert!(o.status.success(), "{:?}: {}", args[0], String::from_utf8_lossy(&o.stderr));
        let dir = Path::new(args.last().unwrap());
        assert!(dir.join("manifest.json").exists());
        for f in files {
            assert!(dir.join(f).exists(), "{f} missing for {}", args[0]);
        }
    }
    let summary = fs::read_to_string(tmp.path().join("h").join("husimi_summary.csv")).unwrap();
    let row: Vec<f64> = summary.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[4] - std::f64::consts::FRAC_PI_2).abs() < 1e-9 && (row[5] - std::f64::consts::PI).abs() < 1e-9);
    assert!(row[2] <= 1.0 + 1e-6);
}
