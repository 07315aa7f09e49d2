use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eld::io::{load_embedding, matrix_from_csv, matrix_from_json};

fn eld(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eld"))
        .args(args)
        .current_dir(dir)
        .env_remove("ELD_CACHE_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p2.txt"), "0 1\n").unwrap();
    fs::write(dir.path().join("p3.txt"), "# path\n0 1\n1 2\n").unwrap();
    dir
}

#[test]
fn dist_between_small_paths() {
    let dir = workdir();
    let out = eld(
        &["dist", "p2.txt", "p3.txt", "-k", "2", "-p", "1"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let d: f64 = stdout(&out).trim().parse().unwrap();
    assert!((d - 2.0 * 2f64.sqrt() / 6.0).abs() < 1e-6);

    let out = eld(&["dist", "p3.txt", "p3.txt", "-k", "2"], dir.path());
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn exit_codes() {
    let dir = workdir();
    fs::write(dir.path().join("loop.txt"), "0 0\n").unwrap();

    let out = eld(&["dist", "cycle:5", "p3.txt", "-k", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("k=10"), "{}", stderr(&out));

    let out = eld(&["dist", "loop.txt", "p3.txt"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 1"));

    let out = eld(&["dist", "missing.txt", "p3.txt"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    assert_eq!(
        eld(&["matrix", "--mode", "other", "cycle:5"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        eld(&["dist", "cycle:5", "cycle:6", "-p", "0.5"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(eld(&["bench", "er"], dir.path()).status.code(), Some(2));
    assert_eq!(
        eld(&["embed", "cycle:5", "-k", "2"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(eld(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn matrix_outputs() {
    let dir = workdir();
    let out = eld(&["matrix", "cycle:8"], dir.path());
    assert_eq!(stdout(&out), "label,cycle:8\ncycle:8,0\n");

    let inputs = ["cycle:30", "cycle:60", "wheel:30", "wheel:60"];
    let mut args = vec!["matrix", "-k", "5", "-o", "m.csv", "--heatmap", "h.dat"];
    args.extend(inputs);
    assert!(eld(&args, dir.path()).status.success());
    let csv = matrix_from_csv(&fs::read_to_string(dir.path().join("m.csv")).unwrap()).unwrap();
    assert_eq!(csv.labels(), &inputs.map(String::from)[..]);
    // Same family is closer than across families.
    assert!(csv.get(0, 1) < csv.get(0, 2) && csv.get(2, 3) < csv.get(1, 3));
    let heat = fs::read_to_string(dir.path().join("h.dat")).unwrap();
    assert_eq!(
        heat.lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .count(),
        16
    );

    let mut args = vec!["matrix", "--format", "json", "-o", "m.json"];
    args.extend(inputs);
    assert!(eld(&args, dir.path()).status.success());
    let json = matrix_from_json(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert!((json.get(i, j) - csv.get(i, j)).abs() <= 1e-10);
        }
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = workdir();
    let inputs = [
        "er:60,0.2,seed=1,exp=5",
        "ba:50,2,seed=3",
        "roc:4,5",
        "wheel:40",
        "cycle:33",
    ];
    for t in ["1", "8"] {
        let file = format!("t{t}.csv");
        let mut args = vec!["matrix", "--threads", t, "-o", &file];
        args.extend(inputs);
        assert!(eld(&args, dir.path()).status.success());
    }
    let a = fs::read(dir.path().join("t1.csv")).unwrap();
    let b = fs::read(dir.path().join("t8.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn generated_files_match_their_specs() {
    let dir = workdir();
    assert!(eld(
        &["gen", "er:30,0.3,exp=20", "--seed", "9", "-o", "g.txt"],
        dir.path()
    )
    .status
    .success());
    let out = eld(
        &["dist", "g.txt", "er:30,0.3,seed=9,exp=20", "-k", "4"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "0");
    let text = eld(&["gen", "cycle:4"], dir.path());
    assert_eq!(stdout(&text), "#n=4\n0 1 1\n1 2 1\n2 3 1\n0 3 1\n");
}

#[test]
fn bench_reports_one_row_per_size() {
    let dir = workdir();
    let out = eld(&["bench", "ba", "100", "-m", "3"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "size,seconds");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("100,"));
}

#[test]
fn embeddings_and_cache() {
    let dir = workdir();
    assert!(
        eld(&["embed", "p3.txt", "-k", "2", "-o", "p3.elde"], dir.path())
            .status
            .success()
    );
    let emb = load_embedding(dir.path().join("p3.elde")).unwrap();
    assert_eq!((emb.n(), emb.k()), (3, 2));
    assert!((emb.eigenvalues()[1] - 1.0).abs() < 1e-12);

    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_eld"))
            .args(["matrix", "cycle:20", "wheel:20", "roc:3,4"])
            .current_dir(dir.path())
            .env("ELD_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 3);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    let uncached = eld(&["matrix", "cycle:20", "wheel:20", "roc:3,4"], dir.path());
    assert_eq!(first.stdout, uncached.stdout);
}
