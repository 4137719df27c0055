use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use emordle_core::schemes::{builtins, parse_scheme_file};

fn emordle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emordle")).args(args).env_remove("EMORDLE_FONT_DIR").output().unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn gif_frames(path: &Path) -> (usize, gif::Repeat) {
    let bytes = std::fs::read(path).unwrap();
    let mut dec = gif::DecodeOptions::new().read_info(&bytes[..]).unwrap();
    let mut n = 0;
    while dec.read_next_frame().unwrap().is_some() {
        n += 1;
    }
    (n, dec.repeat())
}

#[test]
fn generate_shiver_gif_has_fifty_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.gif");
    let input = data("fear.csv");
    let run = emordle(&[
        "generate",
        "--input",
        input.to_str().unwrap(),
        "--scheme",
        "shiver",
        "--speed",
        "0.5",
        "--entropy",
        "0.5",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert_eq!(stdout.trim(), "words 18, groups 10, duration 2.5 s, frames 50");
    assert_eq!(gif_frames(&out), (50, gif::Repeat::Infinite));
}

#[test]
fn out_of_range_entropy_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.descriptor");
    let input = data("lorem.csv");
    let run = emordle(&[
        "generate",
        "--input",
        input.to_str().unwrap(),
        "--entropy",
        "1.7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let stderr = String::from_utf8(run.stderr).unwrap();
    assert!(stderr.contains("entropy 1.7 is outside [0, 1]; using 1"), "{stderr}");
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out).unwrap()).unwrap();
    assert_eq!(doc["spec"]["entropy"], 1.0);
}

#[test]
fn exit_codes_separate_input_and_render_failures() {
    let missing = emordle(&["generate", "--out", "x.gif"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("Usage"));

    let input = data("lorem.csv");
    let input = input.to_str().unwrap();
    for bad in [
        vec!["--fps", "50", "--out", "x.gif"],
        vec!["--scheme", "wiggle", "--out", "x.gif"],
        vec!["--out", "x.png"],
        vec!["--width", "20", "--out", "x.gif"],
    ] {
        let mut args = vec!["generate", "--input", input];
        args.extend(bad.iter().copied());
        let run = emordle(&args);
        assert_eq!(run.status.code(), Some(2), "{bad:?}: {}", String::from_utf8_lossy(&run.stderr));
    }
    let unwritable = emordle(&["generate", "--input", input, "--out", "/nonexistent/dir/x.gif"]);
    assert_eq!(unwritable.status.code(), Some(3));
}

#[test]
fn stimuli_grid_scheme_filter() {
    let dir = tempfile::tempdir().unwrap();
    let run = emordle(&[
        "stimuli-grid",
        "--schemes",
        "fade",
        "--width",
        "300",
        "--height",
        "200",
        "--fps",
        "5",
        "--outdir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    assert!(names.contains(&"manifest.json".to_string()));
    assert!(names.iter().filter(|n| n.ends_with(".gif")).all(|n| n.starts_with("fade_s")));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["source"], "lorem.csv");
    let conditions = manifest["conditions"].as_array().unwrap();
    assert_eq!(conditions.len(), 9);
    for c in conditions {
        let (frames, _) = gif_frames(&dir.path().join(c["file"].as_str().unwrap()));
        assert_eq!(frames as u64, c["frames"].as_u64().unwrap());
    }

    let unknown =
        emordle(&["stimuli-grid", "--schemes", "fade,wiggle", "--outdir", dir.path().to_str().unwrap()]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn scheme_dump_round_trips() {
    for t in builtins() {
        let run = emordle(&["schemes", "--dump", &t.id]);
        assert!(run.status.success());
        assert_eq!(parse_scheme_file(&String::from_utf8(run.stdout).unwrap()).unwrap(), t);
    }
    let list = String::from_utf8(emordle(&["schemes"]).stdout).unwrap();
    assert_eq!(list.lines().count(), 4);
}

#[test]
fn extra_scheme_file_is_usable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("calm.scheme");
    let dance = String::from_utf8(emordle(&["schemes", "--dump", "dance"]).stdout).unwrap();
    std::fs::write(&path, dance.replacen("id = dance", "id = calm", 1)).unwrap();
    let out = dir.path().join("calm.descriptor");
    let input = data("happiness.csv");
    let run = emordle(&[
        "--scheme-file",
        path.to_str().unwrap(),
        "generate",
        "--input",
        input.to_str().unwrap(),
        "--scheme",
        "calm",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out).unwrap()).unwrap();
    assert_eq!(doc["scheme_id"], "calm");
}
