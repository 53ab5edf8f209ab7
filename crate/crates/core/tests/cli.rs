use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gauss-kuzmin"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for cmd in [
        &["digit-law", "--samples", "200000"][..],
        &["empirical-gk", "--n", "2", "--samples", "100000"],
        &[
            "gk", "--grid", "512", "--iters", "6", "--imax", "2000", "--tol", "1e-2",
        ],
    ] {
        let one = run(&[cmd, &["--threads", "1"]].concat());
        let four = run(&[cmd, &["--threads", "4"]].concat());
        assert!(
            one.status.success(),
            "{cmd:?}: {}",
            String::from_utf8_lossy(&one.stderr)
        );
        assert_eq!(one.stdout, four.stdout, "{cmd:?}");
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let args = ["contraction", "--imax", "200"];
    let csv = String::from_utf8(run(&args).stdout).unwrap();
    let json: Value =
        serde_json::from_slice(&run(&[&args[..], &["--format", "json"]].concat()).stdout).unwrap();
    assert_eq!(json["experiment"], "contraction");
    assert_eq!(json["pass"], true);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows = json["rows"].as_array().unwrap();
    let mut count = 0;
    for (line, row) in lines.zip(rows) {
        for (name, cell) in header.iter().zip(line.split(',')) {
            let value = &row[*name];
            let text = match value {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert_eq!(cell, text, "column {name}");
        }
        count += 1;
    }
    assert_eq!(count, rows.len());
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}

#[test]
fn expand_and_exit_codes() {
    let ok = run(&["expand", "13/29"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(ok.stdout).unwrap(),
        "k,digit,numerator,denominator,backward_chain\n1,2,1,2,1/2\n2,4,4,9,2/9\n3,3,13,29,9/29\n"
    );
    assert_eq!(run(&["expand", "7/3"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["gk", "--grid", "4"]).status.code(), Some(2));
    // an impossible tolerance fails the experiment, not the invocation
    let strict = run(&[
        "gk", "--grid", "256", "--iters", "3", "--imax", "1000", "--tol", "1e-12",
    ]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn report_goes_to_out_file() {
    let dir = std::env::temp_dir().join(format!("gk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = run(&[
        "expand",
        "0.375",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"][2]["digit"], 2);
    std::fs::remove_dir_all(dir).unwrap();
}
