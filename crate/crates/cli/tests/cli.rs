use assert_cmd::Command;
use predicates::str::contains;
use serde_json::Value;

fn asym() -> Command {
    let mut c = Command::cargo_bin("asym").unwrap();
    c.env_remove("ASYM_CAP").env_remove("ASYM_MAX_ORDER");
    c
}

fn stdout(args: &[&str]) -> String {
    let out = asym()
        .args(args)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    String::from_utf8(out).unwrap()
}

#[test]
fn single_coefficient() {
    asym()
        .args(["gf", "balanced", "--order", "5", "--coeff", "t2,x2"])
        .assert()
        .success()
        .stdout("4\n");
    asym()
        .args(["gf", "balanced", "--order", "5", "--coeff", "t^2*x^2"])
        .assert()
        .success()
        .stdout("4\n");
    asym()
        .args([
            "gf", "perms", "--order", "4", "--set", "t=1", "--coeff", "r,s,x3",
        ])
        .assert()
        .success()
        .stdout("1/2\tcount 3\n");
}

#[test]
fn fully_asymmetric_matching_counts() {
    let text = stdout(&["gf", "matchings", "--order", "6", "--set", "r=0,s=0,t=1"]);
    let counts: Vec<&str> = text
        .lines()
        .skip(2)
        .map(|l| l.rsplit('\t').next().unwrap())
        .collect();
    assert_eq!(counts, ["1", "0", "0", "8", "48", "384", "4480"]);
}

#[test]
fn unimodal_brute_prefix() {
    let text = stdout(&[
        "gf",
        "unimodal-brute",
        "--order",
        "10",
        "--set",
        "t=1",
        "--format",
        "csv",
    ]);
    let counts: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(
        &counts[..],
        ["1", "2", "4", "8", "15", "27", "47", "79", "130", "209"]
    );
}

#[test]
fn gf_json_is_stable() {
    let args = ["gf", "trees", "--order", "4", "--format", "json"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["entry"]["name"], "trees");
    let total: u64 = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["n"] == 4)
        .map(|t| t["coefficient"].as_str().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 14);
}

#[test]
fn histograms() {
    asym()
        .args(["hist", "balanced", "-n", "3", "--stats", "da"])
        .assert()
        .success()
        .stdout("da\tcount\n1\t12\n3\t8\ntotal\t20\n");
    asym()
        .args(["hist", "matchings", "-n", "2", "--stats", "c,p"])
        .assert()
        .success()
        .stdout("c\tp\tcount\n0\t1\t2\n2\t0\t1\ntotal\t3\n");
    asym()
        .args([
            "hist", "balanced", "-n", "3", "--stats", "da", "--format", "csv",
        ])
        .assert()
        .success()
        .stdout("da,count\n1,12\n3,8\n");
}

#[test]
fn enumerate_trees() {
    let text = stdout(&["enum", "trees", "-n", "3", "--stats", "da,ds"]);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("[[null,null],[null,null]]\tda=0\tds=1"));
    let csv = stdout(&[
        "enum",
        "compositions",
        "-n",
        "3",
        "--stats",
        "da",
        "--format",
        "csv",
    ]);
    assert_eq!(csv, "object,da\n\"1,1,1\",0\n\"1,2\",1\n\"2,1\",1\n3,0\n");
}

#[test]
fn cap_refusal_and_override() {
    asym()
        .args(["hist", "balanced", "-n", "9", "--stats", "da"])
        .assert()
        .code(2)
        .stderr(contains("--cap"));
    asym()
        .args(["hist", "balanced", "-n", "9", "--stats", "da", "--cap", "9"])
        .assert()
        .success();
    asym()
        .env("ASYM_CAP", "9")
        .args(["hist", "balanced", "-n", "9", "--stats", "da"])
        .assert()
        .success();
}

#[test]
fn bijections() {
    let phi = stdout(&["bij", "phi", "--input", "0111000010110110110001"]);
    assert!(
        phi.contains("image           0110010001110111000101\n"),
        "{phi}"
    );
    assert!(phi.contains("Q               {3,4,10}\n"));
    assert!(phi.contains("d               0,1,1,0\n"));
    let back = stdout(&[
        "bij",
        "phi",
        "--inverse",
        "--input",
        "0110010001110111000101",
    ]);
    assert!(back.contains("image           0111000010110110110001\n"));
    assert!(stdout(&["bij", "zigzag", "--input", "0011"]).contains("image           0101\n"));
    assert!(stdout(&["bij", "unimodal-partition", "--input", "1,2,1"])
        .contains("image           3,1\n"));
    assert!(
        stdout(&["bij", "unimodal-partition", "--inverse", "--input", "3,1"])
            .contains("image           1,2,1\n")
    );
    let t = stdout(&[
        "bij",
        "tree-reflect",
        "--input",
        "[[null,null],null]",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&t).unwrap();
    assert_eq!(v["image"], serde_json::json!([null, [null, null]]));
    assert_eq!(v["unique_nodes"], v["da"]);
}

#[test]
fn bijection_check() {
    asym()
        .args(["bij", "zigzag", "--check", "5"])
        .assert()
        .success()
        .stdout("pass          bijection/zigzag\n");
}

#[test]
fn usage_errors() {
    asym()
        .args(["bij", "phi", "--input", "010"])
        .assert()
        .code(2);
    asym()
        .args(["bij", "zigzag", "--input", "01a1"])
        .assert()
        .code(2);
    asym().args(["gf", "nonsense"]).assert().code(2);
    asym()
        .args(["gf", "balanced", "--coeff", "q3"])
        .assert()
        .code(2);
    asym()
        .args(["gf", "balanced", "--set", "x=1"])
        .assert()
        .code(2);
    asym()
        .args(["gf", "balanced", "--order", "201"])
        .assert()
        .code(2);
    asym().args(["gf", "balanced", "--bogus"]).assert().code(2);
    asym()
        .args(["hist", "trees", "-n", "3", "--stats", "c"])
        .assert()
        .code(2);
    asym()
        .args(["verify", "--suite", "no-such-check"])
        .assert()
        .code(2);
    asym()
        .args(["moments", "permutations", "-n", "5"])
        .assert()
        .code(2);
}

#[test]
fn verify_subset_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = [
        "verify",
        "--suite",
        "bijection/,constants/",
        "--json",
        path.to_str().unwrap(),
    ];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    assert!(first.contains("expected-fail constants/kt-printed"));
    assert!(
        first.ends_with("summary: 6 pass, 1 expected-fail, 0 fail, 0 skipped\n"),
        "{first}"
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["expected_fail"], 1);
    assert!(v["footer"]["runtime_ms"].is_object());
    assert!(v["checks"][0].get("runtime_ms").is_none());
}

#[test]
fn moments_csv() {
    let text = stdout(&["moments", "compositions", "-n", "20,40"]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,statistic,exact,prediction,difference,digits")
    );
    assert!(lines
        .next()
        .unwrap()
        .starts_with("20,mean,422343/131072,10/3,"));
}

#[test]
fn oeis_offline_and_unreachable() {
    let dir = tempfile::tempdir().unwrap();
    asym()
        .env("ASYM_OEIS_CACHE", dir.path())
        .args([
            "oeis",
            "check",
            "A047974",
            "--against",
            "matchings-sym",
            "--offline",
        ])
        .assert()
        .success()
        .stdout(contains("pass          oeis/A047974"));
    asym()
        .env("ASYM_OEIS_CACHE", dir.path())
        .env("ASYM_OEIS_ENDPOINT", "http://127.0.0.1:1")
        .args(["oeis", "check", "A047974"])
        .assert()
        .code(3);
    asym()
        .env("ASYM_OEIS_CACHE", dir.path())
        .args([
            "oeis",
            "check",
            "A047974",
            "--against",
            "matchings-no-centered",
            "--offline",
        ])
        .assert()
        .code(1);
    asym()
        .args(["oeis", "check", "A4797", "--offline"])
        .assert()
        .code(2);
}

#[test]
fn help_documents_environment() {
    let text = stdout(&["--help"]);
    for var in [
        "ASYM_CAP",
        "ASYM_MAX_ORDER",
        "ASYM_OEIS_CACHE",
        "ASYM_OEIS_ENDPOINT",
    ] {
        assert!(text.contains(var), "{var}");
    }
    assert!(stdout(&["gf", "--help"]).contains("asym gf balanced --order 5 --coeff t2,x2"));
}
