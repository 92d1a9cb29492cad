use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use evdisagg::csvio::{read_series_file, ReadOptions};
use evdisagg_core::synth::{generate_day, Preset};
use evdisagg_core::{disaggregate_windows, stitch, PipelineParams, WindowSpec};

const BIN: &str = env!("CARGO_BIN_EXE_evdisagg");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("EVDISAGG_LOG").output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &Path, preset: &str, seed: &str, days: &str) {
    let o = run(&["synth", "--preset", preset, "--seed", seed, "--days", days, "--out-dir", s(dir)]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn clean_ev_gives_one_event_per_day() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), "clean-ev", "5", "7");
    let report = d.path().join("r.json");
    let o = run(&["disaggregate", "--input", s(&d.path().join("aggregate.csv")), "--output", s(&report)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let windows = json["windows"].as_array().unwrap();
    assert_eq!(windows.len(), 7);
    for w in windows {
        assert_eq!(w["events"].as_array().unwrap().len(), 1, "{w}");
    }
}

#[test]
fn emitted_series_matches_in_memory_estimate() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), "spike-train", "2", "2");
    let input = d.path().join("aggregate.csv");
    let est = d.path().join("est.csv");
    let report = d.path().join("r.json");
    let o = run(&["disaggregate", "--input", s(&input), "--output", s(&report), "--emit-series", s(&est)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let x = read_series_file(&input, ReadOptions::default()).unwrap();
    let results = disaggregate_windows(&x, WindowSpec::days(), &PipelineParams::default()).unwrap();
    let memory = stitch(&results, &x);
    let back = read_series_file(&est, ReadOptions::default()).unwrap();
    assert_eq!(back.start(), memory.start());
    assert_eq!(back.len(), memory.len());
    for (a, b) in back.values().iter().zip(memory.values()) {
        assert!((a - b).abs() <= 5e-7 + 1e-9, "{a} vs {b}");
    }

    // Report energies agree with the rendered estimate at printed precision.
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let total = json["total_energy_kwh"].as_f64().unwrap();
    assert!((total - memory.energy_kwh()).abs() <= 5e-7 + 1e-9);
    let per_window: f64 = json["windows"].as_array().unwrap().iter().map(|w| w["energy_kwh"].as_f64().unwrap()).sum();
    assert!((per_window - memory.energy_kwh()).abs() <= 1e-5);
}

#[test]
fn malformed_row_exits_1_with_line_number() {
    let d = tempfile::tempdir().unwrap();
    let input = d.path().join("bad.csv");
    fs::write(&input, "timestamp,power_kw\n2013-07-01T00:00,0.1\n2013-07-01T00:01,0.2\n2013-07-01T00:02,oops\n").unwrap();
    let o = run(&["disaggregate", "--input", s(&input), "--output", s(&d.path().join("r.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":4:"), "{}", stderr(&o));
}

#[test]
fn params_file_errors_name_the_line() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), "clean-ev", "1", "1");
    let params = d.path().join("params.cfg");
    fs::write(&params, "# tuned\nt_seed = 15\neta = lots\n").unwrap();
    let o = run(&[
        "disaggregate",
        "--input",
        s(&d.path().join("aggregate.csv")),
        "--params",
        s(&params),
        "--output",
        s(&d.path().join("r.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("params.cfg:3:"), "{}", stderr(&o));

    fs::write(&params, "t_seed = 15\neta = 1.5\n").unwrap();
    let o = run(&[
        "disaggregate",
        "--input",
        s(&d.path().join("aggregate.csv")),
        "--params",
        s(&params),
        "--output",
        s(&d.path().join("r.json")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn misaligned_evaluation_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let a = d.path().join("a.csv");
    let b = d.path().join("b.csv");
    fs::write(&a, "timestamp,power_kw\n2013-07-01T00:00,1\n2013-07-01T00:01,1\n").unwrap();
    fs::write(&b, "timestamp,power_kw\n2013-07-01T00:01,1\n2013-07-01T00:02,1\n").unwrap();
    let o = run(&["evaluate", "--estimate", s(&a), "--truth", s(&b), "--output", s(&d.path().join("e.json"))]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("misaligned"));
}

#[test]
fn zero_truth_month_exits_2_and_names_it() {
    let d = tempfile::tempdir().unwrap();
    let a = d.path().join("a.csv");
    fs::write(&a, "timestamp,power_kw\n2013-07-01T00:00,0\n2013-07-01T00:01,0\n").unwrap();
    let o = run(&["evaluate", "--estimate", s(&a), "--truth", s(&a), "--output", s(&d.path().join("e.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2013-07"), "{}", stderr(&o));
}

#[test]
fn synth_is_byte_identical_for_a_seed() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    synth(&a, "fig2", "1", "1");
    synth(&b, "fig2", "1", "1");
    for f in ["aggregate.csv", "truth_ev.csv", "truth_ac.csv", "truth_dryer.csv", "truth_noise.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    // And matches the library generator.
    let x = read_series_file(&a.join("truth_ev.csv"), ReadOptions::default()).unwrap();
    let lib = generate_day(&Preset::Fig2.spec(1)).unwrap();
    assert!((x.energy_kwh() - lib.ev.energy_kwh()).abs() < 1e-6);
}

#[test]
fn synth_spec_file_and_unknown_preset() {
    let d = tempfile::tempdir().unwrap();
    let spec = d.path().join("scenario.cfg");
    fs::write(&spec, "seed = 4\npreset = dryer-overlap\nnoise_max = 0.1\n").unwrap();
    let out = d.path().join("out");
    let o = run(&["synth", "--spec", s(&spec), "--days", "2", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_series_file(&out.join("aggregate.csv"), ReadOptions::default()).unwrap().len(), 2880);

    let o = run(&["synth", "--preset", "nope", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown preset"));

    let o = run(&["synth", "--preset", "mixed", "--days", "3", "--start", "2014-01-31T00:00", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let x = read_series_file(&out.join("aggregate.csv"), ReadOptions::default()).unwrap();
    assert_eq!(x.start().to_string(), "2014-01-31T00:00");
}

#[test]
fn plot_writes_svg() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), "fig2", "1", "1");
    let svg = d.path().join("p.svg");
    let o = run(&[
        "plot",
        "--input",
        s(&d.path().join("aggregate.csv")),
        "--overlay",
        s(&d.path().join("truth_ac.csv")),
        "--overlay",
        s(&d.path().join("truth_ev.csv")),
        "--output",
        s(&svg),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 3);
}

#[test]
fn logging_goes_to_stderr() {
    let d = tempfile::tempdir().unwrap();
    synth(d.path(), "clean-ev", "1", "1");
    let o = Command::new(BIN)
        .args(["disaggregate", "--input", s(&d.path().join("aggregate.csv")), "--output", s(&d.path().join("r.json"))])
        .env("EVDISAGG_LOG", "info")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("INFO"));
    assert!(o.stdout.is_empty());
}
