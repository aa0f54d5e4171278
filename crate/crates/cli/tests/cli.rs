use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn oqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oqs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn oqs_line(line: &str) -> Output {
    oqs_with(line, &[])
}

/// Whitespace-separated arguments followed by `extra`.
fn oqs_with(line: &str, extra: &[&str]) -> Output {
    let mut args: Vec<&str> = line.split_whitespace().collect();
    args.extend_from_slice(extra);
    oqs(&args)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

fn matrix(rows: usize, entries: &[(f64, f64)]) -> String {
    let e: Vec<String> = entries.iter().map(|(r, i)| format!("[{r},{i}]")).collect();
    format!(
        r#"{{"rows":{rows},"cols":{rows},"entries":[{}]}}"#,
        e.join(",")
    )
}

fn real(rows: usize, entries: &[f64]) -> String {
    matrix(rows, &entries.iter().map(|&x| (x, 0.0)).collect::<Vec<_>>())
}

/// Amplitude damping with V = |0⟩⟨1|, γ = 0.5.
fn amp_damp_generator() -> String {
    format!(
        r#"{{"dim":2,"H":{},"jumps":[{{"V":{},"gamma":0.5}}]}}"#,
        real(2, &[0.0; 4]),
        real(2, &[0.0, 1.0, 0.0, 0.0])
    )
}

#[test]
fn jc_simulate_writes_schema_csv() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("traj.csv");
    let line = "jc simulate --g 1 --gamma-width 2 --delta 0 --c1 1 --tmax 5 --steps 5000 --out";
    let out = oqs_with(line, &[s(&path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t,re_c1,im_c1,abs_c1,gamma,S,rho11,rho00,re_rho10,im_rho10"
    );
    assert_eq!(lines.len(), 5002);
    let last: Vec<f64> = lines[5001].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 5.0);
    assert!((last[6] + last[7] - 1.0).abs() < 1e-12);

    // byte-identical on a second run
    let again = dir.path().join("again.csv");
    assert_eq!(code(&oqs_with(line, &[s(&again)])), 0);
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn jc_methods_agree() {
    let run = |method: &str| {
        let out = oqs_with(
            "jc simulate --g 1 --gamma-width 2 --delta -0.5 --c1 0.8 --c0",
            &[
                "0, 0.6", "--tmax", "2", "--steps", "2000", "--method", method,
            ],
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        stdout(&out)
            .lines()
            .skip(1)
            .map(|l| {
                l.split(',')
                    .map(|x| x.parse::<f64>().unwrap())
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let exact = run("exact");
    for method in ["master", "volterra"] {
        let other = run(method);
        for (a, b) in exact.iter().zip(&other) {
            // rho11 and the coherence
            for col in [6, 8, 9] {
                assert!((a[col] - b[col]).abs() < 1e-5, "{method}: {a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn jc_rates_and_oracle() {
    let out = oqs_line("jc rates --g 1 --gamma-width 2 --tmax 60 --steps 3");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((last[1] - 0.449_441_752_659_943).abs() < 1e-12);
    assert_eq!(last[2], 0.0);

    let out =
        oqs_line("jc oracle --g 1 --gamma-width 2 --tmax 1 --steps 10 --modes 400 --halfwidth 20");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("t,re_c1_discrete,"));
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[5] < 1e-4);
        assert!((v[6] - 1.0).abs() < 1e-8);
    }
}

#[test]
fn jc_bad_parameters_are_usage_errors() {
    let out = oqs_line("jc simulate --g -1 --gamma-width 2 --tmax 1 --steps 10");
    assert_eq!(code(&out), 1);
    let out = oqs_line("jc simulate --g 1 --gamma-width 2 --c1 0.9 --c0 0.9 --tmax 1 --steps 10");
    assert_eq!(code(&out), 1);
    assert_eq!(code(&oqs_line("jc simulate --g 1")), 1);
    assert_eq!(code(&oqs_line("frobnicate")), 1);
    assert_eq!(code(&oqs_line("--help")), 0);
}

#[test]
fn jc_underdamped_rates_turn_negative() {
    let out = oqs_line("jc rates --g 20 --gamma-width 0.1 --tmax 2 --steps 400");
    assert_eq!(code(&out), 0);
    let min = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(min < 0.0);
}

#[test]
fn channel_verify_rejects_transpose_map() {
    let dir = TempDir::new().unwrap();
    let mut swap = vec![0.0; 16];
    for i in 0..2 {
        for j in 0..2 {
            swap[(i * 2 + j) * 4 + j * 2 + i] = 1.0;
        }
    }
    let bad = write(
        &dir,
        "bad_choi.json",
        &format!(r#"{{"dim":2,"choi":{}}}"#, real(4, &swap)),
    );
    let out = oqs_with("channel verify", &[s(&bad)]);
    assert_eq!(code(&out), 2);
    let report = json(&out);
    assert_eq!(report["cp"], false);
    assert!((report["min_choi_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stderr).contains("eigenvalue"));
}

#[test]
fn channel_kraus_and_dilate() {
    let dir = TempDir::new().unwrap();
    let p: f64 = 0.3;
    let k0 = real(2, &[1.0, 0.0, 0.0, (1.0 - p).sqrt()]);
    let k1 = real(2, &[0.0, p.sqrt(), 0.0, 0.0]);
    let file = write(
        &dir,
        "ad.json",
        &format!(r#"{{"dim":2,"kraus":[{k0},{k1}]}}"#),
    );

    let out = oqs_with("channel verify", &[s(&file)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["tp"], true);

    let out = oqs_with("channel kraus", &[s(&file)]);
    assert_eq!(code(&out), 0);
    let kraus = json(&out);
    assert_eq!(kraus["kraus"].as_array().unwrap().len(), 2);
    let round = write(&dir, "round.json", &stdout(&out));
    assert_eq!(code(&oqs_with("channel verify", &[s(&round)])), 0);

    let dil_path = dir.path().join("dil.json");
    let out = oqs_with("channel dilate", &[s(&file), "--out", s(&dil_path)]);
    assert_eq!(code(&out), 0);
    let summary = json(&out);
    assert_eq!(summary["dim_r"], 2);
    assert!(summary["unitarity_deviation"].as_f64().unwrap() < 1e-10);
    let dil: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dil_path).unwrap()).unwrap();
    assert_eq!(dil["unitary"]["rows"], 4);
}

#[test]
fn channel_errors() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&oqs_with("channel verify", &[s(&missing)])), 1);
    let garbage = write(&dir, "g.json", "{not json");
    assert_eq!(code(&oqs_with("channel verify", &[s(&garbage)])), 1);
    // incomplete Kraus set is a violation
    let k = real(2, &[0.5, 0.0, 0.0, 0.5]);
    let weak = write(&dir, "weak.json", &format!(r#"{{"dim":2,"kraus":[{k}]}}"#));
    assert_eq!(code(&oqs_with("channel kraus", &[s(&weak)])), 2);
    assert_eq!(code(&oqs_with("channel verify", &[s(&weak)])), 2);
}

#[test]
fn channel_ppt() {
    let dir = TempDir::new().unwrap();
    let mut bell = vec![0.0; 16];
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        bell[i * 4 + j] = 0.5;
    }
    let f = write(&dir, "bell.json", &real(4, &bell));
    let out = oqs_with("channel ppt", &[s(&f), "--dims", "2, 2"]);
    assert_eq!(code(&out), 2);
    assert!((json(&out)["min_eigenvalue"].as_f64().unwrap() + 0.5).abs() < 1e-10);

    let mut mixed = vec![0.0; 16];
    for i in 0..4 {
        mixed[i * 4 + i] = 0.25;
    }
    let f = write(&dir, "mixed.json", &real(4, &mixed));
    let out = oqs_with("channel ppt", &[s(&f), "--dims", "2, 2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["ppt"], true);

    assert_eq!(
        code(&oqs_with("channel ppt", &[s(&f), "--dims", "2, 3"])),
        1
    );
    assert_eq!(code(&oqs_with("channel ppt", &[s(&f), "--dims", "22"])), 1);

    let mut not_psd = vec![0.0; 16];
    not_psd[0] = 1.5;
    not_psd[5] = -0.5;
    let f = write(&dir, "neg.json", &real(4, &not_psd));
    assert_eq!(
        code(&oqs_with("channel ppt", &[s(&f), "--dims", "2, 2"])),
        2
    );
}

#[test]
fn channel_selftest_is_deterministic() {
    let a = oqs_line("channel selftest --seed 5 --dim 3 --count 10");
    let b = oqs_line("channel selftest --seed 5 --dim 3 --count 10");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["pass"], true);
    let c = oqs_line("channel selftest --seed 6 --dim 3 --count 10");
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gksl_decompose_amplitude_damping() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "amp_damp.json", &amp_damp_generator());
    let out = oqs_with("gksl decompose", &[s(&f)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert!(report["residual"].as_f64().unwrap() < 1e-9);
    let mut rates: Vec<f64> = report["rates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    rates.sort_by(f64::total_cmp);
    assert!((rates[2] - 0.5).abs() < 1e-12);
    assert!(rates[..2].iter().all(|r| r.abs() < 1e-12));

    // the recovered generator is itself a valid input
    let gen = write(&dir, "gen.json", &report["generator"].to_string());
    let again = oqs_with("gksl decompose", &[s(&gen)]);
    assert_eq!(code(&again), 0);
}

#[test]
fn gksl_decompose_superoperator_files() {
    let dir = TempDir::new().unwrap();
    // transpose map minus identity, in column-stacking vec order
    let mut l = vec![0.0; 16];
    for i in 0..2 {
        for j in 0..2 {
            l[(i * 2 + j) * 4 + (j * 2 + i)] += 1.0;
            l[(i * 2 + j) * 4 + (i * 2 + j)] -= 1.0;
        }
    }
    let f = write(
        &dir,
        "t.json",
        &format!(r#"{{"dim":2,"superop":{}}}"#, real(4, &l)),
    );
    let out = oqs_with("gksl decompose", &[s(&f)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not completely positive"));

    let id = real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ],
    );
    let f = write(&dir, "id.json", &format!(r#"{{"dim":2,"superop":{id}}}"#));
    assert_eq!(code(&oqs_with("gksl decompose", &[s(&f)])), 2);
}

#[test]
fn gksl_evolve_relaxes_excited_state() {
    let dir = TempDir::new().unwrap();
    let gen = write(&dir, "amp_damp.json", &amp_damp_generator());
    let rho0 = write(&dir, "rho0.json", &real(2, &[0.0, 0.0, 0.0, 1.0]));
    let out_path = dir.path().join("evo.csv");
    let out = oqs_with(
        "gksl evolve",
        &[
            s(&gen),
            "--rho0",
            s(&rho0),
            "--tmax",
            "4",
            "--steps",
            "8",
            "--out",
            s(&out_path),
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t,re_rho_00,im_rho_00,re_rho_01,im_rho_01,re_rho_10,im_rho_10,re_rho_11,im_rho_11"
    );
    for line in &lines[1..] {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        // excited population decays as e^{−γt} with γ = 0.5
        assert!((v[7] - (-0.5 * v[0]).exp()).abs() < 1e-12);
        assert!((v[1] + v[7] - 1.0).abs() < 1e-12);
    }

    let wrong = write(
        &dir,
        "rho3.json",
        &real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    );
    let out = oqs_with(
        "gksl evolve",
        &[s(&gen), "--rho0", s(&wrong), "--tmax", "1", "--steps", "2"],
    );
    assert_eq!(code(&out), 1);
}
