use std::path::PathBuf;
use std::process::{Command, Output};

fn liesym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liesym")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("liesym-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn sample_writes_rational_grid() {
    let o = liesym(&["sample", "--solution", "x*y/(6*t)", "--grid", "x=-1:1:3 y=-1:1:3 z=0 t=1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,y,u");
    assert_eq!(lines.len(), 10);
    let u: Vec<f64> = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(u[0], 1.0 / 6.0);
    assert_eq!(u[4], 0.0);
    assert_eq!(u[2], -1.0 / 6.0);
}

#[test]
fn sample_to_file_matches_stdout() {
    let dir = scratch("sample");
    let path = dir.join("kink.csv");
    let args = ["sample", "--solution", "tanh(x - y) + 1", "--grid", "x=-2:2:5 y=0:1:2 z=0 t=0"];
    let a = liesym(&args);
    let b = liesym(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn input_errors_exit_2() {
    let o = liesym(&["sample", "--solution", "x*(y", "--grid", "x=0:1:2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
    let o = liesym(&["sample", "--solution", "x*w", "--grid", "x=0:1:2"]);
    assert_eq!(o.status.code(), Some(2), "unbound symbol");
    let o = liesym(&["flow", "--field", "11"]);
    assert_eq!(o.status.code(), Some(2));
    let o = liesym(&["derive", "--pde", "/nonexistent/eq.pde"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_and_table_pass_on_shipped_equation() {
    let o = liesym(&["solve", "--degree", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dimension"], 10);
    let o = liesym(&["table"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reference cells differing: 0"));
}

#[test]
fn corrupted_equation_fails_with_exit_1() {
    let dir = scratch("corrupt");
    let eq = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/kdv31.pde")).unwrap();
    let bad = eq.replace("+ u_xxy", "- u_xxy");
    assert_ne!(bad, eq, "expected a `+ u_xxy` term to flip");
    let path = dir.join("bad.pde");
    std::fs::write(&path, bad).unwrap();
    let o = liesym(&["solve", "--degree", "1", "--json", "--pde", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_ne!(v["dimension"], 10);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config");
    let conf = dir.join("run.conf");
    std::fs::write(&conf, "degree = 1\njson = true\n").unwrap();
    let o = liesym(&["solve", "--config", conf.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["degree"], 1);
    let o = liesym(&["solve", "--config", conf.to_str().unwrap(), "--degree", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["degree"], 2);
    std::fs::write(&conf, "colour = red\n").unwrap();
    assert_eq!(liesym(&["solve", "--config", conf.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn empty_catalog_warns_and_passes() {
    let dir = scratch("empty");
    let cat = dir.join("empty.txt");
    std::fs::write(&cat, "# nothing\n").unwrap();
    let o = liesym(&["verify", "--catalog", cat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn failing_claim_exits_1() {
    let dir = scratch("failing");
    let cat = dir.join("claims.txt");
    std::fs::write(&cat, "name: wrong\nkind: solution\nclaim: x*y/(5*t)\nexpected: zero\nstatus: verified\n").unwrap();
    let o = liesym(&["verify", "--catalog", cat.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failed"], 1);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn flow_applies_to_solution() {
    let o = liesym(&["flow", "--field", "8", "--epsilon", "-1/2", "--apply", "x*y/(6*t)"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("at eps = -1/2"));
}
