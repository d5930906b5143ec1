use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn solvquot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solvquot")).args(args).env_remove("SOLVQUOT_MAX_ITER").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn spec_file(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn examples(dir: &TempDir) -> String {
    let target = dir.path().join("ex");
    let out = solvquot(&["examples", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    target.to_str().unwrap().to_owned()
}

#[test]
fn compute_weitzenboeck() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    let out = solvquot(&["compute", &format!("{ex}/weitzenboeck.sq"), "--spotcheck", "10"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("c        y\n"), "{text}");
    assert!(text.contains("(-x^2 + 2*y*w)/(2*y)"), "{text}");
    assert!(text.contains("spot     ok"), "{text}");
}

#[test]
fn json_is_schema_valid_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    for name in ["weitzenboeck.sq", "gagm.sq", "charp.sq"] {
        let spec = format!("{ex}/{name}");
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        for path in [&a, &b] {
            let out = solvquot(&["compute", &spec, "--json", path.to_str().unwrap(), "--spotcheck", "5"]);
            assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        }
        let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
        assert_eq!(ta, tb, "{name}");
        let v: serde_json::Value = serde_json::from_str(&ta).unwrap();
        assert_eq!(v["schema"], "solvquot/1");
        for key in ["field", "c", "weight", "b", "b_images", "slices", "stages", "kernel", "presentation", "checks"] {
            assert!(v.get(key).is_some(), "{name}: missing {key}");
        }
        for key in ["invariance", "semi_invariance", "kernel", "reconstruction", "counting"] {
            assert_eq!(v["checks"][key], true, "{name}: {key}");
        }
        assert_eq!(v["checks"]["spotcheck"]["passed"], true, "{name}");
        let out = solvquot(&["verify", &spec, a.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}: {}", stdout(&out));
    }
}

#[test]
fn json_to_stdout() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    let out = solvquot(&["compute", &format!("{ex}/scaling.sq"), "--json", "-"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["weight"], "t1");
}

#[test]
fn no_check_gives_null_checks() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    let out = solvquot(&["compute", &format!("{ex}/shear.sq"), "--no-check", "--json", "-"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["checks"]["invariance"].is_null());
    assert!(v["checks"]["kernel"].is_null());
}

#[test]
fn parse_error_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "bad.sq", "field Q\nvars x y\nunipotent z1\nmap x = x + * y\nmap y = y\n");
    let out = solvquot(&["compute", &spec]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.starts_with("error: line 4, column "), "{err}");
}

#[test]
fn invalid_action_exits_3() {
    let dir = TempDir::new().unwrap();
    // phi(x) at z1 = 0 is 2x, not x
    let spec = spec_file(&dir, "bad.sq", "field Q\nvars x\nunipotent z1\nmap x = 2*x + z1\n");
    let out = solvquot(&["compute", &spec]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn trivial_factor_exits_4() {
    let dir = TempDir::new().unwrap();
    let spec = spec_file(&dir, "triv.sq", "field Q\nvars x\nunipotent z1 z2\nmap x = x + z1*z2\n");
    let out = solvquot(&["compute", &spec]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn iteration_cap_exits_5() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    let spec = format!("{ex}/weitzenboeck.sq");
    let out = solvquot(&["compute", &spec, "--max-iter", "0"]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));
    let out = Command::new(env!("CARGO_BIN_EXE_solvquot"))
        .args(["compute", &spec])
        .env("SOLVQUOT_MAX_ITER", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 5, "{}", stderr(&out));
}

#[test]
fn edited_result_exits_6() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    let spec = format!("{ex}/weitzenboeck.sq");
    let json = dir.path().join("r.json");
    assert_eq!(code(&solvquot(&["compute", &spec, "--json", json.to_str().unwrap()])), 0);
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    v["b_images"][2] = serde_json::Value::String("w".into());
    fs::write(&json, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let out = solvquot(&["verify", &spec, json.to_str().unwrap()]);
    assert_eq!(code(&out), 6);
    assert!(stdout(&out).contains("Phi(b_3) - b_3 = "), "{}", stdout(&out));
}

#[test]
fn malformed_result_exits_2() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    let json = spec_file(&dir, "r.json", "{\"schema\": \"solvquot/0\"}");
    let out = solvquot(&["verify", &format!("{ex}/weitzenboeck.sq"), &json]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn examples_refuses_existing_dir_without_force() {
    let dir = TempDir::new().unwrap();
    let ex = examples(&dir);
    let files: Vec<_> = fs::read_dir(&ex).unwrap().collect();
    assert_eq!(files.len(), 6);
    fs::write(Path::new(&ex).join("shear.sq"), "edited").unwrap();
    assert_eq!(code(&solvquot(&["examples", &ex])), 1);
    assert_eq!(fs::read_to_string(Path::new(&ex).join("shear.sq")).unwrap(), "edited");
    assert_eq!(code(&solvquot(&["examples", &ex, "--force"])), 0);
    assert_ne!(fs::read_to_string(Path::new(&ex).join("shear.sq")).unwrap(), "edited");
}

#[test]
fn missing_file_exits_1() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.sq");
    let out = solvquot(&["compute", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error: "));
}
