use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isocurv::generate::curvature_projection;
use isocurv::{flatness_norms, pi1, ModelPoint, QuadTensor, TensorDocument};
use serde_json::Value;
use tempfile::TempDir;

fn isocurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isocurv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen_const_curv(dir: &TempDir, c: &str) -> PathBuf {
    let p = path(dir, "cc.json");
    let out = isocurv(&[
        "gen",
        "const-curv",
        "--dim",
        "4",
        "--index",
        "2",
        "--c",
        c,
        "--out",
        s(&p),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn gen_const_curv_writes_scaled_pi1() {
    let dir = TempDir::new().unwrap();
    let p = gen_const_curv(&dir, "1.5");
    let doc = TensorDocument::read(&p).unwrap();
    let model = doc.model().unwrap();
    assert_eq!((model.dim(), model.index()), (4, 2));
    assert_eq!(doc.tensor("R").unwrap(), pi1(&model).scaled(1.5));
    assert_eq!(doc.meta["generator"], "const-curv");
}

#[test]
fn gen_space_form_is_bochner_flat() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "sf.json");
    let out = isocurv(&[
        "gen",
        "space-form",
        "--n",
        "4",
        "--s",
        "2",
        "--mu",
        "2",
        "--nu",
        "0.5",
        "--out",
        s(&p),
    ]);
    assert_eq!(code(&out), 0);
    let doc = TensorDocument::read(&p).unwrap();
    let model = doc.model().unwrap();
    assert_eq!((model.dim(), model.index()), (8, 4));
    let norms = flatness_norms(&model, &doc.tensor("R").unwrap()).unwrap();
    assert!(norms.boch_norm.unwrap() <= 1e-9);
    assert!((norms.mu_hat.unwrap() - 2.0).abs() < 1e-12);
    assert!((norms.nu_hat - 0.5).abs() < 1e-12);
}

#[test]
fn gen_usage_errors() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "x.json");
    let odd = isocurv(&[
        "gen",
        "space-form",
        "--dim",
        "5",
        "--index",
        "2",
        "--mu",
        "1",
        "--out",
        s(&p),
    ]);
    assert_eq!(code(&odd), 2);
    let missing = isocurv(&["gen", "const-curv", "--dim", "4", "--out", s(&p)]);
    assert_eq!(code(&missing), 2);
    let unknown = isocurv(&["gen", "nonsense", "--dim", "4", "--out", s(&p)]);
    assert_eq!(code(&unknown), 2);
    assert!(!p.exists());
}

#[test]
fn io_failure_has_its_own_exit_code() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("missing").join("x.json");
    let out = isocurv(&[
        "gen",
        "const-curv",
        "--dim",
        "4",
        "--c",
        "1",
        "--out",
        s(&p),
    ]);
    assert_eq!(code(&out), 3);
    let out = isocurv(&["diagnose", s(&p), "--theorem", "ThmA"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn classify_examples() {
    let dir = TempDir::new().unwrap();
    let p = gen_const_curv(&dir, "1.5");
    let out = isocurv(&["classify", s(&p), "--x", "1,0,1,0", "--y", "0,1,0,1"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("strongly isotropic"));

    let out = isocurv(&[
        "--json",
        "classify",
        s(&p),
        "--x",
        "1,0,0,0",
        "--y",
        "0,0,1,0",
        "--tensor",
        "R",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["degeneracy"], "nondegenerate");
    assert!((v["sectional_curvature"].as_f64().unwrap() - 1.5).abs() < 1e-14);

    let out = isocurv(&["classify", s(&p), "--x", "1,0,0,0", "--y", "-2,0,0,0"]);
    assert_eq!(code(&out), 2);
    let out = isocurv(&["classify", s(&p), "--x", "1,0,0", "--y", "0,1,0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn classify_reports_holomorphy_with_j() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "k.json");
    isocurv(&[
        "gen",
        "const-curv",
        "--dim",
        "4",
        "--index",
        "2",
        "--c",
        "1",
        "--complex",
        "--out",
        s(&p),
    ]);
    let out = isocurv(&[
        "--json",
        "classify",
        s(&p),
        "--x",
        "1,0,0,0",
        "--y",
        "0,1,0,0",
    ]);
    assert_eq!(json(&out)["holomorphy"], "holomorphic");
}

#[test]
fn diagnose_theorem_a_on_constant_curvature() {
    let dir = TempDir::new().unwrap();
    let p = gen_const_curv(&dir, "1.5");
    let out = isocurv(&[
        "--json",
        "diagnose",
        s(&p),
        "--theorem",
        "ThmA",
        "--samples",
        "500",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["outcome"], "BothPass");
}

/// Constant curvature plus 0.1 times the curvature-symmetrized unit tensor at
/// (0,1,2,3): a nonzero Weyl part, so both sides of Thm1 fail.
#[test]
fn diagnose_theorem1_on_perturbed_document() {
    let dir = TempDir::new().unwrap();
    let p = gen_const_curv(&dir, "1.0");
    let mut doc = TensorDocument::read(&p).unwrap();
    let model = doc.model().unwrap();
    let mut bump = QuadTensor::zeros(4);
    bump.set(0, 1, 2, 3, 0.1);
    let mut r = doc.tensor("R").unwrap();
    r += &curvature_projection(&bump);
    assert!(flatness_norms(&model, &r).unwrap().conf_norm.unwrap() > 1e-3);
    doc.insert("R", &r).unwrap();
    doc.write(&p).unwrap();

    let out = isocurv(&[
        "--json",
        "diagnose",
        s(&p),
        "--theorem",
        "Thm1",
        "--samples",
        "1000",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["outcome"], "BothFail");
    assert_eq!(v["consistent"], true);
    assert!(v["sides"]
        .as_array()
        .unwrap()
        .iter()
        .all(|side| side["pass"] == false));
}

#[test]
fn diagnose_usage_errors() {
    let dir = TempDir::new().unwrap();
    let p = gen_const_curv(&dir, "1.0");
    assert_eq!(
        code(&isocurv(&[
            "diagnose",
            s(&p),
            "--theorem",
            "ThmA",
            "--tensor",
            "Q"
        ])),
        2
    );
    assert_eq!(code(&isocurv(&["diagnose", s(&p), "--theorem", "Thm9"])), 2);
    assert_eq!(code(&isocurv(&["diagnose", s(&p), "--theorem", "Thm6"])), 2);
    assert_eq!(
        code(&isocurv(&[
            "--tol",
            "-1",
            "diagnose",
            s(&p),
            "--theorem",
            "ThmA"
        ])),
        2
    );
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, r#"{"dim":2,"index":1,"tensors":{"R":[1,2]}}"#).unwrap();
    assert_eq!(
        code(&isocurv(&["diagnose", s(&bad), "--theorem", "ThmA"])),
        2
    );
}

#[test]
fn diagnose_norms_and_uniqueness() {
    let dir = TempDir::new().unwrap();
    let p = gen_const_curv(&dir, "2.0");
    let out = isocurv(&["--json", "diagnose", s(&p), "--theorem", "norms"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["kappa_hat"].as_f64().unwrap() - 2.0).abs() < 1e-14);

    let out = isocurv(&[
        "--json",
        "diagnose",
        s(&p),
        "--theorem",
        "thmb",
        "--samples",
        "100",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["outcome"], "BothPass");
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "r.json");
    isocurv(&[
        "--seed",
        "3",
        "gen",
        "random",
        "--dim",
        "4",
        "--index",
        "2",
        "--out",
        s(&p),
    ]);
    let args = [
        "--json",
        "--seed",
        "5",
        "diagnose",
        s(&p),
        "--theorem",
        "Thm1",
        "--samples",
        "400",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_isocurv"))
        .args(args)
        .env("ISOCURV_THREADS", "1")
        .output()
        .unwrap();
    let many = isocurv(&args);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(json(&many)["outcome"], "BothFail");
    assert!(json(&many)["sides"][0]["sampled"]["witness"].is_object());
}

#[test]
fn identities_exit_codes() {
    let dir = TempDir::new().unwrap();
    let sf = path(&dir, "sf.json");
    isocurv(&[
        "gen",
        "space-form",
        "--n",
        "3",
        "--s",
        "1",
        "--mu",
        "-1",
        "--out",
        s(&sf),
    ]);
    assert_eq!(
        code(&isocurv(&["identities", s(&sf), "--samples", "50"])),
        0
    );

    let r = path(&dir, "r.json");
    isocurv(&[
        "gen",
        "random",
        "--dim",
        "6",
        "--index",
        "2",
        "--complex",
        "--out",
        s(&r),
    ]);
    assert_eq!(code(&isocurv(&["identities", s(&r), "--samples", "50"])), 1);

    let cc = gen_const_curv(&dir, "1.0");
    assert_eq!(code(&isocurv(&["identities", s(&cc)])), 2);
}

#[test]
fn fuzz_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    let args = |p: &Path| {
        isocurv(&[
            "--seed",
            "9",
            "fuzz",
            "--dim",
            "4",
            "--index",
            "2",
            "--trials",
            "6",
            "--samples",
            "60",
            "--out",
            s(p),
        ])
    };
    assert_eq!(code(&args(&a)), 0);
    assert_eq!(code(&args(&b)), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn fuzz_edge_cases() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "z.json");
    let out = isocurv(&[
        "fuzz",
        "--dim",
        "4",
        "--index",
        "2",
        "--trials",
        "0",
        "--out",
        s(&p),
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(v["checks_run"], 0);
    assert!(v["by_theorem"].as_object().unwrap().is_empty());

    assert_eq!(
        code(&isocurv(&[
            "fuzz", "--dim", "4", "--index", "0", "--trials", "1"
        ])),
        2
    );
    assert_eq!(
        code(&isocurv(&[
            "fuzz",
            "--dim",
            "5",
            "--index",
            "2",
            "--complex",
            "--trials",
            "1"
        ])),
        2
    );
}

#[test]
fn written_documents_reload_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "k.json");
    isocurv(&[
        "--seed",
        "4",
        "gen",
        "kaehler",
        "--dim",
        "6",
        "--index",
        "2",
        "--out",
        s(&p),
    ]);
    let doc = TensorDocument::read(&p).unwrap();
    let again = TensorDocument::from_json(&doc.to_json().unwrap()).unwrap();
    assert_eq!(doc, again);
    assert_eq!(doc.to_json().unwrap(), std::fs::read_to_string(&p).unwrap());
    assert!(ModelPoint::hermitian(6, 2)
        .unwrap()
        .complex_structure()
        .is_some());
}
