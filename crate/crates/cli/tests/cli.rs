//! Black-box checks of the binary: exit codes and file outputs.

use std::process::Command;

fn item() -> Command {
    Command::new(env!("CARGO_BIN_EXE_item"))
}

#[test]
fn generate_encode_decode_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let status = item()
        .args([
            "--out-dir", out, "gen-sequence", "--frames", "6", "--width", "64", "--height", "48",
            "--keyed", "--name", "t",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("t.y4m").exists());
    assert!(dir.path().join("t.masks").exists());
    assert!(dir.path().join("t_keyed.y4m").exists());

    let status = item()
        .args([
            "--out-dir", out, "encode",
            dir.path().join("t_keyed.y4m").to_str().unwrap(),
            "--qp", "30", "--gop", "3", "--search-range", "4",
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let status = item()
        .args([
            "--out-dir", out, "decode",
            dir.path().join("stream.iobj").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("decoded.y4m").exists());
}

#[test]
fn missing_input_fails_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = item()
        .args(["--out-dir", out, "encode", "/nonexistent/file.y4m"])
        .status()
        .unwrap();
    assert!(!status.success());
}

#[test]
fn corrupt_bitstream_fails_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = dir.path().join("bad.iobj");
    std::fs::write(&bad, b"NOTASTREAM").unwrap();
    let status = item()
        .args(["--out-dir", out, "decode", bad.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!status.success());
}

#[test]
fn invalid_qp_fails_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    item()
        .args([
            "--out-dir", out, "gen-sequence", "--frames", "1", "--width", "32", "--height", "32",
            "--name", "q",
        ])
        .status()
        .unwrap();
    let status = item()
        .args([
            "--out-dir", out, "encode",
            dir.path().join("q.y4m").to_str().unwrap(),
            "--qp", "77",
        ])
        .status()
        .unwrap();
    assert!(!status.success());
}
