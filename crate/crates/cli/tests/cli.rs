use std::path::PathBuf;
use std::process::Command;

use patcx::seqcore::parse_bits;
use patcx_cli::generator::{load_prefix_file, preset};

fn patcx(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_patcx")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("patcx-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_round_trips_through_a_prefix_file() {
    for name in ["fibonacci", "ternary-toeplitz", "powers-of-two", "block-doubling"] {
        let path = scratch(&format!("{name}.bits"));
        let (code, _, err) = patcx(&["gen", "--spec", name, "--length", "3000", "-o", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let live = preset(name).unwrap().source.prefix(3000).unwrap();
        let read = load_prefix_file(&path).unwrap().prefix(3000).unwrap();
        assert_eq!(live, read, "{name}");
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.lines().next().unwrap().starts_with("# source:"));
        assert!(text.contains("# spec: "));
    }
}

#[test]
fn gen_header_records_toeplitz_depth() {
    let (code, out, _) = patcx(&["gen", "--spec", "ternary-toeplitz", "--length", "27"]);
    assert_eq!(code, 0);
    assert!(out.contains("# depth-consumed: 4"), "{out}");
    assert_eq!(parse_bits(&out).unwrap().len(), 27);
}

#[test]
fn gen_accepts_inline_json() {
    let (code, out, _) = patcx(&["gen", "--spec", r#"{"constant": 1}"#, "--length", "50"]);
    assert_eq!(code, 0);
    assert_eq!(parse_bits(&out).unwrap().to_bit_string(), "1".repeat(50));
}

#[test]
fn pstar_on_constant_input_is_all_ones() {
    let (code, out, _) = patcx(&["pstar", "--spec", r#"{"constant": 0}"#, "--n", "4", "--shifts", "500", "--format", "structured"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let counts: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["pstar_lb"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![1, 1, 1, 1]);
}

#[test]
fn pstar_on_the_intro_prefix_file() {
    let path = scratch("intro.bits");
    std::fs::write(&path, "# intro\n010110\n").unwrap();
    let (code, out, _) = patcx(&["pstar", "--prefix-file", path.to_str().unwrap(), "--n", "2", "--diameter", "2"]);
    assert_eq!(code, 0);
    let row = out.lines().find(|l| l.starts_with("2 ")).unwrap();
    assert!(row.contains(" 4 ") && row.contains("{0,2}"), "{out}");
}

#[test]
fn check_refutes_the_cofinite_example() {
    let (code, out, _) = patcx(&["check-sturmian", "--spec", "cofinite-example", "--n", "3", "--diameter", "16", "--shifts", "10000", "--format", "structured"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "refuted");
    assert_eq!(v["refuting_window"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["refuting_count"], 8);
}

#[test]
fn lang_prints_words_with_first_shifts() {
    let (code, out, _) = patcx(&["lang", "--spec", "fibonacci", "--window", "0,2", "--shifts", "1000"]);
    assert_eq!(code, 0);
    assert!(out.contains("4 words"), "{out}");
}

#[test]
fn witnesses_run() {
    let (code, out, _) = patcx(&["witness", "gap-window", "--spec", "powers-of-two", "--horizon", "4096"]);
    assert_eq!(code, 0);
    assert!(out.contains("{0,1,2}"), "{out}");
    let (code, out, _) = patcx(&["witness", "long-blocks", "--spec", "growing-runs"]);
    assert_eq!(code, 0);
    assert!(out.contains("patterns"), "{out}");
    let (code, out, _) = patcx(&["witness", "nonrecurrence", "--spec", "golden-complement-closed", "--horizon", "5000"]);
    assert_eq!(code, 0);
    assert!(out.contains("{0,1}"), "{out}");
    let (code, out, _) = patcx(&["witness", "doubling", "--n", "3", "--horizon", "65536"]);
    assert_eq!(code, 0);
    assert!(out.contains("certified through"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(patcx(&["frobnicate"]).0, 1);
    assert_eq!(patcx(&["pstar"]).0, 1);
    assert_eq!(patcx(&["pstar", "--spec", "no-such-preset"]).0, 1);
    assert_eq!(patcx(&["pstar", "--spec", r#"{"constant": 7}"#]).0, 1);
    assert_eq!(patcx(&["pstar", "--spec", "fibonacci", "--n", "0"]).0, 1);
    assert_eq!(patcx(&["witness", "nonrecurrence", "--spec", "squares"]).0, 1);
    assert_eq!(patcx(&["--help"]).0, 0);
    assert_eq!(patcx(&["reproduce", "--only", "1,2"]).0, 0);
    // The literal ternary prefix disagrees with the generator.
    let (code, out, _) = patcx(&["reproduce", "--only", "3"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("FAIL"));
}
