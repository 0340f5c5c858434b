use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use domain_rdm::bundle::{matrix_to_document, AnalysisBundle, SystemFile};
use domain_rdm::format::Document;
use domain_rdm::nalgebra::DMatrix;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domain-rdm")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            dir: TempDir::new().unwrap(),
        }
    }
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
    fn s(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }
    fn write(&self, name: &str, text: &str) -> String {
        fs::write(self.path(name), text).unwrap();
        self.s(name)
    }
    fn matrix(&self, name: &str, rows: usize, data: &[f64]) -> String {
        let m = DMatrix::from_row_slice(rows, data.len() / rows, data);
        matrix_to_document(&m, None).write(&self.path(name)).unwrap();
        self.s(name)
    }
    fn model(&self, name: &str, args: &[&str]) -> String {
        let out = self.s(name);
        let mut a = vec!["model"];
        a.extend_from_slice(args);
        a.extend_from_slice(&["--out", &out]);
        assert_eq!(code(&a), 0);
        out
    }
}

fn bytes(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap()
}

#[test]
fn model_then_compare_u0_dimer() {
    let f = Fixture::new();
    let sys = f.model("u0.sys", &["--sites", "2", "--electrons", "2", "--t", "1", "--u", "0"]);
    let out = f.s("cmp.txt");
    let o = run(&["compare", "--system", &sys, "--site-blocks", "1;2", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let b = AnalysisBundle::from_document(&Document::read(Path::new(&out)).unwrap()).unwrap();
    assert_eq!(b.results.len(), 2);
    for r in &b.results {
        assert!(r.difference_norm.unwrap() < 1e-8);
    }
    assert!(b.commutators.as_ref().unwrap().commuting);
    assert!(stdout(&o).contains("common eigenbasis"));
}

#[test]
fn decompose_u4_dimer() {
    let f = Fixture::new();
    let sys = f.model("u4.sys", &["--sites", "2", "--electrons", "2", "--u", "4"]);
    let out = f.s("dec.txt");
    let o = run(&["decompose", "--system", &sys, "--site-blocks", "1;2", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sum check (symmetric)") && stdout(&o).contains("PASS"));
    let b = AnalysisBundle::from_document(&Document::read(Path::new(&out)).unwrap()).unwrap();
    let pops: Vec<f64> = b
        .results
        .iter()
        .map(|r| r.symmetric.as_ref().unwrap().matrix.population)
        .collect();
    assert_eq!(pops.len(), 2);
    for p in pops {
        assert!((p - 1.0).abs() < 1e-12);
    }
    assert!(b.results.iter().all(|r| r.dafh.is_none()));
    assert!(b.partition_deviation.unwrap() < 1e-10);
}

#[test]
fn files_round_trip_bit_identically() {
    let f = Fixture::new();
    let sys = f.model("s.sys", &["--sites", "4", "--electrons", "4", "--u", "2", "--periodic"]);
    let doc = Document::read(Path::new(&sys)).unwrap();
    let again = SystemFile::from_document(&doc).unwrap().to_document();
    again.write(&f.path("s2.sys")).unwrap();
    assert_eq!(bytes(Path::new(&sys)), bytes(&f.path("s2.sys")));

    let out = f.s("cmp.txt");
    assert_eq!(
        code(&[
            "compare",
            "--system",
            &sys,
            "--site-blocks",
            "1;2;3,4",
            "--localize",
            "--out",
            &out
        ]),
        0
    );
    let b = AnalysisBundle::from_document(&Document::read(Path::new(&out)).unwrap()).unwrap();
    b.to_document().write(&f.path("cmp2.txt")).unwrap();
    assert_eq!(bytes(Path::new(&out)), bytes(&f.path("cmp2.txt")));
}

#[test]
fn exit_code_table() {
    let f = Fixture::new();
    let sys = f.model("d.sys", &["--sites", "2", "--electrons", "2", "--u", "4"]);
    let sys4 = f.model("l4.sys", &["--sites", "4", "--electrons", "4", "--u", "2"]);
    let good = f.matrix("good.txt", 2, &[1.0, 0.2, 0.2, 0.5]);
    let neg = f.matrix("neg.txt", 2, &[1.0, 0.0, 0.0, -0.03]);
    let pauli = f.matrix("pauli.txt", 2, &[2.5, 0.0, 0.0, 0.0]);
    let asym = f.matrix("asym.txt", 2, &[1.0, 0.3, 0.0, 1.0]);
    let rect = f.matrix("rect.txt", 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let trunc = f.write("trunc.txt", "rdm-text 1\nkind matrix\nmatrix matrix 2 2\n1 0\n");
    let v0 = f.write("v0.txt", "rdm-text 0\nkind matrix\nmatrix matrix 1 1\n1\nend\n");
    let garbage = f.write("garbage.txt", "hello\n");
    let bad_rdm = f.write(
        "bad.sys",
        &fs::read_to_string(&sys)
            .unwrap()
            .replace("int n_electrons 2", "int n_electrons 4"),
    );
    let no_two = {
        let mut doc = Document::read(Path::new(&sys)).unwrap();
        let mut s = SystemFile::from_document(&doc).unwrap();
        s.two_rdm = None;
        s.model = None;
        doc = s.to_document();
        doc.write(&f.path("one.sys")).unwrap();
        f.s("one.sys")
    };
    let bad_domains = f.write(
        "bad.dom",
        "rdm-text 1\nkind domains\nint domain.count 1\ntext domain.0.label A\nmatrix domain.0.overlap 2 2\n1 0\n0 0\nend\n",
    );
    let hole = f.s("hole.txt");
    assert_eq!(
        code(&["dafh", "--system", &sys4, "--site-blocks", "1;2;3,4", "--out", &hole]),
        0
    );

    let table: Vec<(Vec<&str>, i32)> = vec![
        (vec!["--help"], 0),
        (vec!["--version"], 0),
        (vec![], 1),
        (vec!["frobnicate"], 1),
        (vec!["check", "--matrix", &good], 0),
        (vec!["check", "--matrix", &good, "--expected-trace", "1.5"], 0),
        (vec!["check", "--matrix", &good, "--expected-trace", "2"], 3),
        (vec!["check", "--matrix", &neg], 3),
        (vec!["check", "--matrix", &pauli], 3),
        (vec!["check", "--matrix", &asym], 3),
        (vec!["check", "--matrix", &rect], 3),
        (vec!["check", "--matrix", &trunc], 1),
        (vec!["check", "--matrix", &v0], 1),
        (vec!["check", "--matrix", &garbage], 1),
        (vec!["check", "--matrix", "/nonexistent/x"], 1),
        (vec!["check", "--matrix", &good, "--tol", "-1"], 1),
        (vec!["check", "--matrix", &sys], 1),
        (vec!["model", "--sites", "2", "--electrons", "3", "--u", "1"], 1),
        (vec!["model", "--sites", "9", "--electrons", "2", "--u", "1"], 2),
        (vec!["model", "--sites", "2", "--electrons", "2"], 1),
        (vec!["decompose", "--system", &sys, "--site-blocks", "1;2"], 0),
        (vec!["decompose", "--system", &sys], 1),
        (vec!["decompose", "--system", &sys, "--site-blocks", "1"], 1),
        (vec!["decompose", "--system", &sys, "--site-blocks", "1;3"], 1),
        (vec!["decompose", "--system", &bad_rdm, "--site-blocks", "1;2"], 2),
        (vec!["decompose", "--system", &sys, "--domains", &bad_domains], 2),
        (vec!["decompose", "--system", &sys4, "--site-blocks", "1;2"], 1),
        (vec!["dafh", "--system", &no_two, "--site-blocks", "1;2"], 2),
        (vec!["dafh", "--system", &sys, "--site-blocks", "1;2"], 0),
        (vec!["compare", "--system", &sys, "--site-blocks", "1;2"], 0),
        (vec!["localize", "--input", &good, "--site-blocks", "1;2"], 0),
        (vec!["localize", "--input", &neg, "--site-blocks", "1;2"], 4),
        (vec!["localize", "--input", &asym, "--site-blocks", "1;2"], 2),
        (vec!["localize", "--input", &hole, "--site-blocks", "1;2;3,4"], 4),
        (
            vec!["localize", "--input", &good, "--site-blocks", "1;2", "--conv-tol", "nan"],
            1,
        ),
        (vec!["localize", "--input", &sys, "--site-blocks", "1;2"], 1),
    ];
    for (args, want) in table {
        let o = run(&args);
        assert_eq!(
            o.status.code(),
            Some(want),
            "{args:?}\nstdout: {}\nstderr: {}",
            stdout(&o),
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn check_reports_the_negative_eigenvalue() {
    let f = Fixture::new();
    let neg = f.matrix("neg.txt", 2, &[1.0, 0.0, 0.0, -0.03]);
    let rep = f.s("rep.txt");
    let o = run(&["check", "--matrix", &neg, "--out", &rep]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("NEGATIVE_EIGENVALUE 3.0000"));
    let doc = Document::read(Path::new(&rep)).unwrap();
    assert_eq!(doc.text("verdict").unwrap(), "NOT_REPRESENTABLE");
    assert_eq!(doc.text("finding.0.code").unwrap(), "NEGATIVE_EIGENVALUE");
    assert!((doc.real("finding.0.magnitude").unwrap() - 0.03).abs() < 1e-12);
}

#[test]
fn localize_writes_orbitals() {
    let f = Fixture::new();
    let sys = f.model("s.sys", &["--sites", "4", "--electrons", "4", "--u", "2"]);
    let dec = f.s("dec.txt");
    assert_eq!(
        code(&["decompose", "--system", &sys, "--site-blocks", "1,2;3,4", "--out", &dec]),
        0
    );
    let out = f.s("loc.txt");
    assert_eq!(
        code(&["localize", "--input", &dec, "--site-blocks", "1,2;3,4", "--out", &out]),
        0
    );
    let doc = Document::read(Path::new(&out)).unwrap();
    assert_eq!(doc.int("count").unwrap(), 2);
    for i in 0..2 {
        let l = domain_rdm::cli::read_localized_item(&doc, i).unwrap().unwrap();
        assert!(l.converged);
        assert!((l.occupations.iter().sum::<f64>() - 2.0).abs() < 1e-8);
    }
}
