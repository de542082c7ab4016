use qborel::coeffring::parse_poly;
use qborel::datum::{make_datum, Series, Specialization};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qborel").chain(args.iter().copied());
    let code = qborel_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn eval_prints_the_shuffle_image() {
    let (code, out, _) = run(&["eval", "--series", "C", "--rank", "2", "--expr", "[x1,x2]"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "(q^2-1)*t_1_2 * (x2 x1)");
    let (code, out, _) = run(&["eval", "--series", "C", "--rank", "3", "--expr", "[x1, x3]"]);
    assert_eq!((code, out.trim()), (0, "0"));
}

#[test]
fn eval_syntax_error_is_a_usage_error() {
    let (code, out, err) = run(&["eval", "--series", "C", "--rank", "2", "--expr", "[x1,[x2"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("offset 7"), "{err}");
    let (code, _, err) = run(&["eval", "--series", "C", "--rank", "2", "--expr", "[x1,x4]"]);
    assert_eq!(code, 2);
    assert!(err.contains("x4"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "--series", "B", "--rank", "3"]).0, 2);
    assert_eq!(run(&["verify", "--series", "C", "--rank", "1"]).0, 2);
    assert_eq!(
        run(&[
            "coproduct",
            "--series",
            "C",
            "--rank",
            "2",
            "--k",
            "3",
            "--m",
            "2"
        ])
        .0,
        2
    );
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn coproduct_table_names_the_parameter() {
    let (code, out, _) = run(&[
        "coproduct",
        "--series",
        "D",
        "--rank",
        "4",
        "--k",
        "1",
        "--m",
        "7",
    ]);
    assert_eq!(code, 0);
    let row = out
        .lines()
        .find(|l| l.trim_start().starts_with("3 "))
        .unwrap();
    assert!(row.contains("= p_4_3"), "{out}");
    assert!(row.contains("e[4,7]") && row.contains("e[1,3]"), "{row}");
}

#[test]
fn coproduct_json_schema_and_round_trip() {
    let (code, out, _) = run(&[
        "coproduct",
        "--series",
        "C",
        "--rank",
        "3",
        "--k",
        "1",
        "--m",
        "5",
        "--mode",
        "assert",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["series"], "C");
    assert_eq!(
        (v["rank"].as_u64(), v["k"].as_u64(), v["m"].as_u64()),
        (Some(3), Some(1), Some(5))
    );
    let vars = make_datum(Series::C, 3, Specialization::Multiparameter)
        .unwrap()
        .vars;
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    for t in terms {
        for key in ["i", "tau", "grouplike", "left", "right", "coefficient"] {
            assert!(!t[key].is_null(), "missing {key}");
        }
        assert_eq!(t["grouplike"].as_array().unwrap().len(), 3);
        for key in ["tau", "coefficient", "braided"] {
            let s = t[key].as_str().unwrap();
            let p = parse_poly(s, vars).unwrap();
            assert_eq!(p.to_string(), s);
        }
    }
    // (1,5) in C3 has no exceptional index
    assert!(terms.iter().all(|t| t["tau"] == "1"));
}

#[test]
fn verify_json_is_one_document() {
    let (code, out, _) = run(&[
        "verify", "--series", "C", "--rank", "3", "--suite", "all", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    let suites: Vec<&str> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["suite"].as_str().unwrap())
        .collect();
    assert_eq!(
        suites,
        [
            "sigma",
            "images",
            "serre",
            "arrangements",
            "coproduct",
            "pbw",
            "identities"
        ]
    );
}

#[test]
fn verify_text_and_numeric_default_for_rank_five() {
    let (code, out, _) = run(&["verify", "--series", "D", "--rank", "5", "--suite", "serre"]);
    assert_eq!(code, 0);
    assert!(out.contains("(numeric)"), "{out}");
    assert!(out.trim_end().ends_with("cases pass"));
}

#[test]
fn pbw_certificate_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pbw.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&[
        "pbw",
        "--series",
        "D",
        "--rank",
        "3",
        "--max-degree",
        "4",
        "--format",
        "json",
        "--out",
        p,
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "pbw");
    assert!(v["cases"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "verify",
        "--series",
        "D",
        "--rank",
        "4",
        "--suite",
        "coproduct",
    ];
    let strip = |s: String| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(run(&args).1), strip(run(&args).1));
}

#[test]
fn binary_honours_worker_count() {
    let bin = env!("CARGO_BIN_EXE_qborel");
    let args = ["eval", "--series", "D", "--rank", "4", "--expr", "[x3,x4]"];
    let ok = std::process::Command::new(bin)
        .args(args)
        .env("QBOREL_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "0");
    let bad = std::process::Command::new(bin)
        .args(args)
        .env("QBOREL_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn mathematical_failures_exit_one() {
    use qborel_cli::CliError;
    let falsified = CliError::Core(qborel::Error::TheoremMismatch {
        witness: "x".into(),
    });
    assert_eq!(falsified.exit_code(), 1);
    assert_eq!(
        CliError::Core(qborel::Error::DegenerateEvaluationPoint("x".into())).exit_code(),
        1
    );
    assert_eq!(
        CliError::Syntax {
            offset: 0,
            msg: "x".into()
        }
        .exit_code(),
        2
    );
}
