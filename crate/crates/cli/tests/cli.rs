use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use compsel_cli::{run_validation, EXIT_DATA, EXIT_EXTERNAL, EXIT_OK, EXIT_USAGE};
use compsel_core::fixtures::validation_cases;
use compsel_core::ReportFormat;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn compsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compsel"))
        .args(args)
        .output()
        .expect("spawn compsel")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_corpus(dir: &Path) {
    std::fs::write(dir.join("one.txt"), b"abracadabra ".repeat(200)).unwrap();
    std::fs::write(dir.join("two.txt"), b"0123456789".repeat(300)).unwrap();
}

#[test]
fn score_prints_winner_lines() {
    let o = compsel(&["score", &data("entropy_coders.csv"), "--schema", "direct"]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("E+D: Huffman 77.92%"), "{out}");
    assert!(out.contains("E+R: LZW"));
}

#[test]
fn score_selected_criteria() {
    let o = compsel(&["score", &data("x4.csv"), "--criteria", "edr"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let out = stdout(&o);
    assert!(out.contains("E+D+R: C4"), "{out}");
    assert!(!out.contains("E+D:"));

    let o = compsel(&["score", &data("x4.csv"), "-c", "e", "-c", "r"]);
    assert!(stdout(&o).contains("single-criterion extension"));
}

#[test]
fn score_error_paths() {
    assert_eq!(compsel(&["score", &data("empty.csv")]).status.code(), Some(EXIT_DATA));
    let o = compsel(&["score", &data("silesia_speeds.csv"), "--schema", "speeds"]);
    assert_eq!(o.status.code(), Some(EXIT_DATA));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    assert_eq!(
        compsel(&["score", &data("x4.csv"), "--criteria", "ex"]).status.code(),
        Some(EXIT_USAGE)
    );
    assert_eq!(
        compsel(&["score", &data("x4.csv"), "--format", "pdf"]).status.code(),
        Some(EXIT_USAGE)
    );
    assert_eq!(
        compsel(&["score", &data("x4.csv"), "--bogus"]).status.code(),
        Some(EXIT_USAGE)
    );
    assert_eq!(compsel(&["frobnicate"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(
        compsel(&["score", "/nonexistent/results.csv"]).status.code(),
        Some(EXIT_DATA)
    );
}

#[test]
fn malformed_row_names_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("bad.csv");
    std::fs::write(&f, "method,encode_s,decode_s,ratio\na,1,1,1\nb,1,oops,1\n").unwrap();
    let o = compsel(&["score", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_DATA));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn help_is_available_per_subcommand() {
    for sub in ["score", "bench", "convert", "validate", "report"] {
        let o = compsel(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(EXIT_OK), "{sub}");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
}

#[test]
fn speeds_need_the_duplicate_flag() {
    let path = data("silesia_speeds.csv");
    let o = compsel(&["score", &path, "--schema", "speeds", "--allow-duplicates"]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stderr(&o));
    assert!(stdout(&o).contains("zlib 1.2.11 -1 #2"));
}

#[test]
fn machine_output_is_reproducible_and_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let a = compsel(&["score", &data("entropy_coders.csv"), "--format", "csv"]);
    let b = compsel(&["score", &data("entropy_coders.csv"), "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    let report = tmp.path().join("report.csv");
    std::fs::write(&report, &a.stdout).unwrap();
    let again = compsel(&["report", report.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(again.status.code(), Some(EXIT_OK));
    assert_eq!(again.stdout, a.stdout);

    for fmt in ["json", "svg", "text"] {
        let o = compsel(&["report", report.to_str().unwrap(), "--format", fmt]);
        assert_eq!(o.status.code(), Some(EXIT_OK), "{fmt}");
        assert!(!o.stdout.is_empty());
    }
    let j1 = compsel(&["score", &data("entropy_coders.csv"), "--format", "json"]);
    let j2 = compsel(&["score", &data("entropy_coders.csv"), "--format", "json"]);
    assert_eq!(j1.stdout, j2.stdout);
}

#[test]
fn validate_passes_and_prints_tables() {
    let o = compsel(&["validate"]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stderr(&o));
    let out = stdout(&o);
    for name in ["X1", "X2", "X3", "X4"] {
        assert!(out.contains(&format!("PASS {name}")), "{out}");
    }
    assert!(out.contains("E+D+R: C4"));
}

#[test]
fn perturbed_fixture_fails_validation() {
    let mut cases = validation_cases();
    // Make C1 the fastest encoder and decoder on X1 by a wide margin.
    cases[0].rows[0] = ("C1", 0.0001, 0.0001, 1.885);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_validation(&cases, ReportFormat::Text, &mut out, &mut err);
    assert_eq!(code, EXIT_DATA);
    let err = String::from_utf8(err).unwrap();
    assert!(err.contains("expected C2, got C1"), "{err}");
}

#[test]
fn convert_subcommands() {
    assert_eq!(stdout(&compsel(&["convert", "bpsp", "8"])).trim(), "1");
    assert_eq!(stdout(&compsel(&["convert", "ratio", "2", "--depth", "16"])).trim(), "8");
    assert_eq!(
        stdout(&compsel(&["convert", "encode-time", "--speed", "1", "--corpus-bytes", "1048576"])).trim(),
        "1"
    );
    assert_eq!(
        stdout(&compsel(&[
            "convert", "decode-time", "--speed", "2", "--ratio", "2", "--corpus-bytes", "4194304"
        ]))
        .trim(),
        "1"
    );
    assert_eq!(compsel(&["convert", "bpsp", "0"]).status.code(), Some(EXIT_DATA));

    let o = compsel(&["convert", "table", &data("div2k_bpsp.csv"), "--schema", "bpsp"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let out = stdout(&o);
    assert!(out.starts_with("method,encode_s,decode_s,ratio\n"));
    assert!(out.contains("PNG,0.213,0.0000609,"));
}

#[test]
fn bench_builtins_then_score() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    small_corpus(&corpus);
    let results = tmp.path().join("results.csv");
    let o = compsel(&[
        "bench",
        "--corpus",
        corpus.to_str().unwrap(),
        "--output",
        results.to_str().unwrap(),
        "--runs",
        "1",
        "--warmup",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stderr(&o));
    let text = std::fs::read_to_string(&results).unwrap();
    let methods: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["huffman", "lzw", "arithmetic"]);
    assert!(results.with_extension("runlog.jsonl").exists());
    let s = compsel(&["score", results.to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(EXIT_OK));
}

#[test]
fn bench_empty_corpus_is_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let results = tmp.path().join("r.csv");
    let o = compsel(&[
        "bench",
        "--corpus",
        tmp.path().to_str().unwrap(),
        "--output",
        results.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_DATA), "{}", stderr(&o));
}

#[test]
fn bench_external_codecs() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    small_corpus(&corpus);

    let registry = tmp.path().join("codecs.toml");
    std::fs::write(
        &registry,
        "[[codec]]\nname = \"missing\"\nencode = \"compsel-no-such-binary\"\ndecode = \"compsel-no-such-binary\"\n",
    )
    .unwrap();
    let results = tmp.path().join("r.csv");
    let args = |reg: &Path| {
        vec![
            "bench".to_owned(),
            "--registry".into(),
            reg.to_string_lossy().into_owned(),
            "--corpus".into(),
            corpus.to_string_lossy().into_owned(),
            "--output".into(),
            results.to_string_lossy().into_owned(),
            "--runs".into(),
            "1".into(),
        ]
    };
    let a = args(&registry);
    let o = compsel(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(EXIT_EXTERNAL), "{}", stderr(&o));

    std::fs::write(
        &registry,
        "[[codec]]\nname = \"store\"\nencode = \"cat\"\ndecode = \"cat\"\n\n\
         [[codec]]\nname = \"huff\"\nbuiltin = \"huffman\"\n",
    )
    .unwrap();
    let o = compsel(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stderr(&o));
    let text = std::fs::read_to_string(&results).unwrap();
    assert!(text.starts_with("# note: external codec timings include process spawn overhead"));
    let s = compsel(&["score", results.to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(EXIT_OK));
    assert!(stdout(&s).contains("note: external codec timings"));
}
