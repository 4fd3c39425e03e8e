use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ivdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivdl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_worked_example() {
    let o = ivdl(&["solve", "3", "2", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("x=7 output=111 verified=true"));
}

#[test]
fn solve_without_solution_exits_3() {
    let o = ivdl(&["solve", "4", "3", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("no solution"));
}

#[test]
fn solve_composite_modulus() {
    // 3^x mod 4 alternates 1, 3: no x reaches 2, but 3 is reachable
    let o = ivdl(&["solve", "3", "2", "4"]);
    assert_eq!(o.status.code(), Some(3));
    let o = ivdl(&["solve", "3", "3", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified=true"));
}

#[test]
fn solve_json_report() {
    let o = ivdl(&["solve", "3", "2", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["x"], 7);
    assert_eq!(v["output"], "111");
    assert_eq!(v["verified"], true);
    assert_eq!(v["n"], 3);
    assert_eq!(v["length"], 2265);
    assert_eq!(v["bit_height"], 3);
    assert_eq!(v["p"], "5");
}

#[test]
fn solve_rejects_bad_arguments() {
    assert_eq!(ivdl(&["solve", "7", "2", "5"]).status.code(), Some(2));
    assert_eq!(ivdl(&["solve", "1", "0", "1"]).status.code(), Some(2));
    assert_eq!(ivdl(&["solve", "-3", "2", "5"]).status.code(), Some(2));
    assert_eq!(ivdl(&["solve", "3", "2"]).status.code(), Some(2));
}

#[test]
fn solve_resource_limit_exits_4() {
    let o = ivdl(&["solve", "3", "2", "5", "--limit", "2"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("limit"));
}

#[test]
fn emit_then_run_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (a, b, p) in [("3", "2", "5"), ("2", "9", "13"), ("4", "3", "5")] {
        let file = dir.path().join(format!("{a}_{b}_{p}.ivc"));
        let solved = ivdl(&["solve", a, b, p, "--emit", path_str(&file), "--json"]);
        let report: serde_json::Value = serde_json::from_str(stdout(&solved).trim()).unwrap();
        let ran = ivdl(&["run", path_str(&file)]);
        assert_eq!(ran.status.code(), Some(0));
        assert_eq!(stdout(&ran).trim(), report["output"]);
        assert!(dir.path().join(format!("{a}_{b}_{p}.ivc.labels")).exists());
    }
}

#[test]
fn build_matches_emit() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("e.ivc");
    ivdl(&["solve", "3", "2", "5", "--emit", path_str(&emitted)]);
    let built = ivdl(&["build", "3", "2", "5"]);
    assert_eq!(built.status.code(), Some(0));
    assert_eq!(stdout(&built), fs::read_to_string(&emitted).unwrap());
    let labels = dir.path().join("b.labels");
    let out = dir.path().join("b.ivc");
    ivdl(&["build", "3", "2", "5", "-o", path_str(&out), "--labels", path_str(&labels)]);
    assert_eq!(fs::read_to_string(labels).unwrap(), fs::read_to_string(dir.path().join("e.ivc.labels")).unwrap());
}

#[test]
fn run_small_files() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("ok.ivc");
    fs::write(&ok, "FIRSTHALF\nOUTPUT 1\n").unwrap();
    let o = ivdl(&["run", path_str(&ok)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");

    let dump = ivdl(&["run", path_str(&ok), "--dump-values"]);
    assert_eq!(stdout(&dump).lines().next(), Some("1 [0/2^0,1/2^1)"));

    let bad = dir.path().join("bad.ivc");
    fs::write(&bad, "FIRSTHALF\nAND 1 1\nXOR 1 2\n").unwrap();
    let o = ivdl(&["run", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let forward = dir.path().join("fwd.ivc");
    fs::write(&forward, "FIRSTHALF\nAND 1 3\nNOT 1\n").unwrap();
    let o = ivdl(&["run", path_str(&forward)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    assert_eq!(ivdl(&["run", "/nonexistent/file.ivc"]).status.code(), Some(2));
}

#[test]
fn run_with_limit_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.ivc");
    fs::write(&file, "FIRSTHALF\nPRODUCT 1 1\nRSHIFT 2 1\nOR 3 2\nOUTPUT 4\n").unwrap();
    assert_eq!(ivdl(&["run", path_str(&file), "--limit", "1"]).status.code(), Some(4));
    let svg = dir.path().join("p.svg");
    let o = ivdl(&["run", path_str(&file), "--render", path_str(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));
    let txt = dir.path().join("p.txt");
    ivdl(&["run", path_str(&file), "--render", path_str(&txt)]);
    assert_eq!(fs::read_to_string(&txt).unwrap().lines().nth(3), Some("4 ██··██··"));
}

#[test]
fn oracle_lists_solutions() {
    let o = ivdl(&["oracle", "3", "2", "5"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "3 7\n".to_string()));
    let o = ivdl(&["oracle", "4", "3", "5"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(3), "\n".to_string()));
    let o = ivdl(&["oracle", "2", "1", "5"]);
    assert_eq!(stdout(&o), "0 4\n");
    let o = ivdl(&["oracle", "2", "1", "5", "--n", "4"]);
    assert_eq!(stdout(&o), "0 4 8 12\n");
    assert_eq!(ivdl(&["oracle", "2", "1", "1"]).status.code(), Some(2));
}

#[test]
fn stats_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.ivc");
    fs::write(&one, "FIRSTHALF\n").unwrap();
    let o = ivdl(&["stats", path_str(&one)]);
    assert!(stdout(&o).lines().any(|l| l == "length 1"));

    let dlog = dir.path().join("d.ivc");
    ivdl(&["solve", "3", "2", "5", "--emit", path_str(&dlog)]);
    let text = stdout(&ivdl(&["stats", path_str(&dlog)]));
    for line in ["length 2265", "bit_height 3", "max_components 4", "output_len 3", "op PRODUCT 2", "op OUTPUT 3"] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn render_strips() {
    let o = ivdl(&["render", "--value", "[0,1/2^2) [1/2^1,3/2^2)", "--grid", "3"]);
    assert_eq!(stdout(&o), "██··██··\n");
    let o = ivdl(&["render", "--value", "{}"]);
    assert_eq!(stdout(&o), "········\n");
    let o = ivdl(&["render", "--value", "{}", "--value", "[0,1)", "--indices", "2"]);
    assert_eq!(stdout(&o), "████████\n");
    assert_eq!(ivdl(&["render", "--value", "[0,2)"]).status.code(), Some(2));
}

#[test]
fn render_program_rows_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.ivc");
    ivdl(&["solve", "3", "2", "5", "--emit", path_str(&file)]);
    let o = ivdl(&["render", path_str(&file), "--labeled"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.ends_with("██··██·· x(2)")), "{text}");
    assert!(text.lines().any(|l| l.ends_with("█···█··· e")), "{text}");
    assert!(text.lines().any(|l| l.ends_with("█······· e+22 z")), "{text}");

    let o = ivdl(&["render", path_str(&file), "--indices", "17", "--grid", "2"]);
    assert_eq!(stdout(&o), "17 █·█· x(2)\n");

    for bad in ["0", "5-2", "99999", "x"] {
        assert_eq!(ivdl(&["render", path_str(&file), "--indices", bad]).status.code(), Some(2), "{bad}");
    }

    let svg = dir.path().join("fig.svg");
    let o = ivdl(&["render", path_str(&file), "--labeled", "--format", "svg", "--out", path_str(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    let svg = fs::read_to_string(svg).unwrap();
    for head in ["inputs", "x", "e_row", "c", "f", "e", "select", "out"] {
        assert!(svg.contains(&format!(r#"class="head">{head}<"#)), "missing {head}");
    }
}

#[test]
fn trace_lists_every_instruction() {
    let o = ivdl(&["solve", "3", "2", "5", "--trace"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.contains('\t')).collect();
    assert_eq!(rows.len(), 2265);
    assert_eq!(rows[0], "1\tFIRSTHALF\t[0/2^0,1/2^1)\t");
    assert!(rows.iter().any(|r| r.ends_with(" z")));
}
