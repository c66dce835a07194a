use std::io::Write;
use std::process::{Command, Output, Stdio};

fn entangle(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_entangle-cc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn matrices_table_cell() {
    let o = entangle(&["matrices", "--m", "3", "--kind", "M"], "");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split_whitespace().collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    let col = header.iter().position(|c| *c == "011").unwrap();
    assert_eq!(row[0], "000");
    assert_eq!(row[col + 1], "IHH");
}

#[test]
fn matrices_json_keys() {
    let o = entangle(
        &[
            "--format", "json", "matrices", "--m", "2", "--kind", "Mprime",
        ],
        "",
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cells"][0][0], "IH");
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 5);
}

#[test]
fn run_text_and_json_agree() {
    let inputs = "0100\n0101\n0011\n0010\n0000\n";
    let args = [
        "run", "--family", "F_u", "--u", "00000", "--inputs", "-", "--seed", "9",
    ];
    let text = stdout(&entangle(&args, inputs));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: serde_json::Value =
        serde_json::from_slice(&entangle(&json_args, inputs).stdout).unwrap();
    assert!(text.starts_with(&format!("value: {}\ncbits: {}\n", v["value"], v["cbits"])));
    assert_eq!(v["cbits"], 4);
    assert_eq!(v["messages"].as_array().unwrap().len(), 4);
    assert_eq!(v["support"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_exit_codes() {
    let ok = entangle(
        &[
            "verify",
            "--family",
            "F_0001",
            "--promise",
            "class-no-complement",
            "--n",
            "1",
        ],
        "",
    );
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("trials: 7\nmismatches: 0\n"));

    let unsupported = entangle(
        &[
            "verify",
            "--family",
            "F_0001",
            "--promise",
            "odd",
            "--n",
            "1",
        ],
        "",
    );
    assert_eq!(unsupported.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unsupported.stderr).contains("no entangled backend"));

    let too_big = entangle(
        &["verify", "--family", "G_11", "--n", "20", "--cap", "1000"],
        "",
    );
    assert_eq!(too_big.status.code(), Some(1));
}

#[test]
fn game_output() {
    let o = entangle(
        &["game", "--m", "2", "--promise", "all", "--target-u", "11"],
        "",
    );
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(0), "IMPOSSIBLE\n")
    );
    let o = entangle(
        &[
            "game",
            "--m",
            "2",
            "--promise",
            "11,01,10",
            "--target-u",
            "11",
            "--format",
            "json",
        ],
        "",
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], "winnable");
}

#[test]
fn usage_errors() {
    assert_eq!(entangle(&["frobnicate"], "").status.code(), Some(1));
    assert_eq!(entangle(&["matrices"], "").status.code(), Some(1));
    assert_eq!(
        entangle(&["run", "--family", "X_1", "--inputs", "-"], "1\n")
            .status
            .code(),
        Some(1)
    );
    assert_eq!(entangle(&["--version"], "").status.code(), Some(0));
}

#[test]
fn reduce_round_trip() {
    let x = "0110\n1010\n1100\n";
    let there = stdout(&entangle(
        &["reduce", "--u", "011", "--u2", "110", "--inputs", "-"],
        x,
    ));
    let back = stdout(&entangle(
        &["reduce", "--u", "110", "--u2", "011", "--inputs", "-"],
        &there,
    ));
    assert_eq!(back, x);
}
