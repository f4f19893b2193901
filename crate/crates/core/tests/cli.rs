use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

use congruence_core::spec::{load_spec, parse_spec_file, print_spec};

fn specs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn spec(name: &str) -> String {
    specs_dir().join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_congruence")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let v = if out.is_empty() { serde_json::from_str(&err).unwrap() } else { serde_json::from_str(&out).unwrap() };
    (code, v)
}

#[test]
fn shipped_specs_load_and_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(specs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let loaded = load_spec(&text, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let printed = print_spec(&loaded.file).unwrap();
        assert_eq!(parse_spec_file(&printed).unwrap(), loaded.file, "{}", path.display());
        // the printed form loads to the same objects
        let again = load_spec(&printed, None).unwrap();
        assert_eq!(again.families.len(), loaded.families.len());
        assert_eq!(again.reps.len(), loaded.reps.len());
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn one_plus_t_example_is_the_universal_family() {
    let text = std::fs::read_to_string(specs_dir().join("one_plus_t.toml")).unwrap();
    let s = load_spec(&text, None).unwrap();
    let fam = s.family(Some("universal")).unwrap();
    assert_eq!(fam.dim(), 1);
    assert_eq!(fam.model().base().p(), 3);
    assert_eq!(fam.gen_images()[0].get(0, 0).to_string(), congruence_core::series::parse_series(fam.model(), "1+T").unwrap().to_string());
}

#[test]
fn gamma_report() {
    let (code, v) = report(&["bounds", "gamma", "--e", "2", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"gamma": 5}));
}

#[test]
fn audit_passes_inside_and_fails_at_the_boundary() {
    let s = spec("one_plus_t.toml");
    let (code, v) = report(&["--spec", &s, "--single-thread", "family", "audit", "--n", "2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["verdict"], "pass");
    let (code, v) = report(&["--spec", &s, "family", "audit", "--n", "2", "--point", "3"]);
    assert_eq!(code, 1, "{v}");
    assert_eq!(v["comparison"]["verdict"], "not_congruent");
    assert_eq!(v["comparison"]["word"], "Frob");
}

#[test]
fn reports_are_deterministic() {
    let s = spec("one_plus_t.toml");
    let args = ["--spec", s.as_str(), "--seed", "11", "--single-thread", "family", "audit", "--n", "2", "--ext", "2:1"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a, b);
    let c = spec("hida_cover.toml");
    let args = ["--spec", c.as_str(), "--seed", "3", "--single-thread", "domain", "cover-compare", "--model", "cover", "--point", "0,0", "--samples", "30"];
    let a = run(&args);
    assert_eq!(a.0, 0, "{}", a.2);
    assert_eq!(a, run(&args));
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(run(&["bounds"]).0, 3);
    assert_eq!(run(&["family", "audit"]).0, 3);
    assert_eq!(run(&["--spec", "/nonexistent.toml", "family", "audit"]).0, 3);
    // spec error with a location
    let dir = std::env::temp_dir().join("congruence-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "[context.L]\np = 3\nprecision = 4\n\n[model.D]\nkind = \"disc\"\ncontext = \"M\"\n").unwrap();
    let (code, v) = report(&["--spec", bad.to_str().unwrap(), "domain", "describe", "--n", "1"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "spec");
    assert!(v["error"]["message"].as_str().unwrap().starts_with("7:11:"), "{v}");
    // falsification and inconclusive
    let c = spec("carayol_pair.toml");
    assert_eq!(run(&["--spec", &c, "lattice", "iso", "--rep", "split", "--other", "identity", "--m", "2"]).0, 1);
    assert_eq!(run(&["--spec", &c, "lattice", "carayol", "--rep", "split", "--other", "identity", "--n", "2"]).0, 2);
    assert_eq!(run(&["--spec", &c, "lattice", "iso", "--rep", "split", "--other", "identity", "--m", "1"]).0, 0);
}

#[test]
fn json_flag_writes_the_report() {
    let dir = std::env::temp_dir().join("congruence-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("alpha.json");
    let (code, stdout, _) = run(&["--json", out.to_str().unwrap(), "bounds", "alpha", "--k", "10", "--p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout);
}

#[test]
fn pseudorep_and_phimod_commands() {
    let s3 = spec("s3_standard.toml");
    assert_eq!(run(&["--spec", &s3, "pseudorep", "check"]).0, 0);
    assert_eq!(run(&["--spec", &s3, "pseudorep", "mf"]).0, 0);
    let c4 = spec("c4_table.toml");
    assert_eq!(run(&["--spec", &c4, "pseudorep", "mf", "--pseudorep", "chars"]).0, 0);
    assert_eq!(run(&["--spec", &c4, "pseudorep", "mf", "--pseudorep", "doubled"]).0, 1);
    let (code, v) = report(&["--spec", &c4, "pseudorep", "kernel", "--pseudorep", "doubled", "--m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["corank"], 1);
    assert_eq!(v["generators"].as_array().unwrap().len(), 3);
    let (code, v) = report(&["phimod", "build-sst", "--k", "4", "--p", "3", "--l-inv", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["admissibility"]["admissible"], true);
    assert_eq!(run(&["--precision", "12", "phimod", "wadm", "--k", "4", "--p", "5", "--ap", "25"]).0, 0);
}

#[test]
fn domain_commands() {
    let s = spec("one_plus_t.toml");
    let (code, v) = report(&["--spec", &s, "domain", "member", "--n", "2", "--point", "9"]);
    assert_eq!(code, 0);
    assert_eq!(v["member"], true);
    let (_, v) = report(&["--spec", &s, "domain", "member", "--n", "2", "--point", "3"]);
    assert_eq!(v["member"], false);
    let (code, v) = report(&["--spec", &s, "domain", "sample", "--n", "2", "--count", "5", "--ext", "2:1"]);
    assert_eq!(code, 0);
    assert_eq!(v["points"].as_array().unwrap().len(), 5);
}
