//! `isocurv` command-line front end.
//!
//! Exit codes: 0 ok / consistent, 1 inconsistent or failed verdict,
//! 2 usage or input error, 3 I/O failure.

use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isocurv::canonical::{build_conformally_flat, build_constant_curvature, build_space_form};
use isocurv::diagnostics::{summary_json, Side};
use isocurv::generate::{random_curvature_like, random_kaehler, random_symmetric};
use isocurv::sampling::stream_rng;
use isocurv::{
    classify_holomorphy, classify_plane, equivalence_check, flatness_norms, fuzz,
    sectional_curvature, theorem6_identities, uniqueness_check, Bilinear, Degeneracy,
    EquivalenceReport, Error, FuzzConfig, ModelPoint, Plane, TensorDocument, TheoremId, Tolerance,
    UniquenessKind, Vector,
};
use nalgebra::DMatrix;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "isocurv",
    version,
    about = "Curvature algebra on indefinite tangent-space models"
)]
struct Cli {
    /// Relative tolerance for every vanishing verdict.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = Tolerance::DEFAULT_REL)]
    tol: f64,
    /// Seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the machine-readable report on stdout (the table goes to stderr).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model tensor and write it as a document.
    Gen(GenArgs),
    /// Classify the plane spanned by two vectors.
    Classify(ClassifyArgs),
    /// Run a two-sided check, flatness norms or a uniqueness check.
    Diagnose(DiagnoseArgs),
    /// Residuals of the pointwise identities of Bochner-flat tensors.
    Identities(IdentitiesArgs),
    /// Random consistency run over all applicable checks.
    Fuzz(FuzzArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    ConstCurv,
    ConfFlat,
    SpaceForm,
    Random,
    Kaehler,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    /// Real dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Number of negative directions.
    #[arg(long)]
    index: Option<usize>,
    /// Complex dimension (space forms); the real dimension is 2n.
    #[arg(long)]
    n: Option<usize>,
    /// Complex index (space forms); the real index is 2s.
    #[arg(long)]
    s: Option<usize>,
    /// Sectional curvature for const-curv.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Holomorphic sectional curvature for space-form.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Antiholomorphic sectional curvature for space-form (default mu/4).
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Symmetric form for conf-flat, dim*dim comma-separated row-major values
    /// (random from the seed when omitted).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sym: Option<Vec<f64>>,
    /// Store the standard complex structure in the document.
    #[arg(long)]
    complex: bool,
    #[arg(long, default_value = "R")]
    name: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    input: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    x: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    y: Vec<f64>,
    /// Tensor whose sectional curvature is reported on nondegenerate planes.
    #[arg(long)]
    tensor: Option<String>,
}

#[derive(Args)]
struct DiagnoseArgs {
    input: PathBuf,
    /// Theorem id (ThmA, Thm1, Thm2, Thm5, Thm6, Thm7, Lemma2, Einstein),
    /// `norms`, or a uniqueness check (ThmB, ThmC, Lemma1).
    #[arg(long)]
    theorem: String,
    #[arg(long)]
    tensor: Option<String>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Args)]
struct IdentitiesArgs {
    input: PathBuf,
    #[arg(long)]
    tensor: Option<String>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Also evaluate the sectional-curvature formula on antiholomorphic pairs.
    #[arg(long)]
    with_pair_sectional: bool,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    index: usize,
    #[arg(long)]
    complex: bool,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Samples per sampled side of each check.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Summary file (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Io(_)) => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<bool, Failure>;

struct Output {
    json: bool,
}

impl Output {
    /// Write errors (a closed pipe, typically) are ignored.
    fn emit(&self, table: &str, report: serde_json::Value) {
        if self.json {
            let _ = io::stderr().write_all(table.as_bytes());
            let text = serde_json::to_string_pretty(&report).expect("serializable report");
            let _ = writeln!(io::stdout().lock(), "{text}");
        } else {
            let _ = io::stdout().lock().write_all(table.as_bytes());
        }
    }
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(raw) = std::env::var("ISOCURV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Failure::Usage(format!(
            "ISOCURV_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    if n == 0 {
        return Err(Failure::Usage("ISOCURV_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(&cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("isocurv: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Failure::Usage(format!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    let tol = Tolerance::new(cli.tol);
    let out = Output { json: cli.json };
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, cli.seed, &out),
        Command::Classify(a) => cmd_classify(a, tol, &out),
        Command::Diagnose(a) => cmd_diagnose(a, cli.seed, tol, &out),
        Command::Identities(a) => cmd_identities(a, cli.seed, tol, &out),
        Command::Fuzz(a) => cmd_fuzz(a, cli.seed, tol, &out),
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

fn gen_model(a: &GenArgs) -> std::result::Result<ModelPoint, Failure> {
    let (dim, index) = match (a.n, a.s, a.dim, a.index) {
        (Some(n), s, None, None) => (2 * n, 2 * s.unwrap_or(0)),
        (None, None, Some(d), i) => (d, i.unwrap_or(0)),
        (None, None, None, _) => return Err(Failure::Usage("missing --dim (or --n)".into())),
        _ => return Err(Failure::Usage("use either --dim/--index or --n/--s".into())),
    };
    let needs_j = a.complex || matches!(a.kind, GenKind::SpaceForm | GenKind::Kaehler);
    if needs_j && (dim % 2 != 0 || index % 2 != 0) {
        return Err(Failure::Usage(format!(
            "a complex structure needs even dimension and index, got ({dim}, {index})"
        )));
    }
    Ok(if needs_j {
        ModelPoint::hermitian(dim, index)?
    } else {
        ModelPoint::new(dim, index)?
    })
}

fn cmd_gen(a: &GenArgs, seed: u64, out: &Output) -> CmdResult {
    let model = gen_model(a)?;
    let m = model.dim();
    let mut rng = stream_rng(seed, 0);
    let mut meta = vec![("seed", seed.to_string())];
    let (label, t) = match a.kind {
        GenKind::ConstCurv => {
            let c = require(a.c, "c")?;
            meta.push(("c", c.to_string()));
            ("const-curv", build_constant_curvature(&model, c))
        }
        GenKind::ConfFlat => {
            let s = match &a.sym {
                Some(v) => {
                    if v.len() != m * m {
                        return Err(Failure::Usage(format!("--sym needs {} values", m * m)));
                    }
                    Bilinear::symmetric(DMatrix::from_row_slice(m, m, v), Tolerance::default())?
                }
                None => random_symmetric(m, &mut rng),
            };
            ("conf-flat", build_conformally_flat(&model, &s)?)
        }
        GenKind::SpaceForm => {
            let mu = require(a.mu, "mu")?;
            let nu = a.nu.unwrap_or(mu / 4.0);
            meta.push(("mu", mu.to_string()));
            meta.push(("nu", nu.to_string()));
            ("space-form", build_space_form(&model, nu, mu)?)
        }
        GenKind::Random => ("random", random_curvature_like(m, &mut rng)),
        GenKind::Kaehler => ("kaehler", random_kaehler(&model, &mut rng)?),
    };
    let mut doc = TensorDocument::new(&model);
    doc.insert(&a.name, &t)?;
    doc.meta.insert("generator".into(), label.into());
    for (k, v) in meta {
        doc.meta.insert(k.into(), v);
    }
    doc.write(&a.out)?;
    let table = format!(
        "wrote {} ({label}, dim {}, index {}, tensor '{}')\n",
        a.out.display(),
        model.dim(),
        model.index(),
        a.name
    );
    out.emit(
        &table,
        json!({ "path": a.out, "generator": label, "dim": model.dim(), "index": model.index(), "tensor": a.name }),
    );
    Ok(true)
}

fn vector(model: &ModelPoint, v: &[f64], flag: &str) -> std::result::Result<Vector, Failure> {
    if v.len() != model.dim() {
        return Err(Failure::Usage(format!(
            "--{flag} needs {} components, got {}",
            model.dim(),
            v.len()
        )));
    }
    Ok(Vector::from_column_slice(v))
}

fn cmd_classify(a: &ClassifyArgs, tol: Tolerance, out: &Output) -> CmdResult {
    let doc = TensorDocument::read(&a.input)?;
    let model = doc.model()?;
    let x = vector(&model, &a.x, "x")?;
    let y = vector(&model, &a.y, "y")?;
    let plane = Plane::new(&model, x, y)?;
    let deg = classify_plane(&model, &plane, tol);
    let mut table = format!("degeneracy    {}\n", deg.label());
    let mut report = json!({ "degeneracy": deg.label() });
    if model.has_complex_structure() {
        let h = classify_holomorphy(&model, &plane, tol)?;
        let _ = writeln!(table, "holomorphy    {}", h.label());
        report["holomorphy"] = json!(h.label());
    }
    if let Some(name) = &a.tensor {
        let t = doc.tensor(name)?;
        if deg == Degeneracy::Nondegenerate {
            let k = sectional_curvature(&model, &t, &plane, tol)?;
            let _ = writeln!(table, "K({name})    {k:.17e}");
            report["sectional_curvature"] = json!(k);
        } else {
            let _ = writeln!(table, "K({name})    undefined (degenerate plane)");
            report["sectional_curvature"] = serde_json::Value::Null;
        }
    }
    out.emit(&table, report);
    Ok(true)
}

fn side_table(rep: &EquivalenceReport) -> String {
    let mut s = format!("check         {}\n", rep.check);
    for Side {
        name,
        role,
        residual,
        pass,
        sampled,
    } in &rep.sides
    {
        let n = sampled
            .as_ref()
            .map_or(String::new(), |r| format!(" [{} samples]", r.samples_used));
        let _ = writeln!(
            s,
            "  {:<10} {:<48} {:>12.4e}  {}{n}",
            format!("{role:?}"),
            name,
            residual,
            if *pass { "pass" } else { "fail" }
        );
    }
    let _ = writeln!(s, "outcome       {:?}", rep.outcome);
    let _ = writeln!(s, "consistent    {}", rep.consistent);
    if let Some(w) = &rep.witness {
        let _ = writeln!(s, "witness       sample {}", w.sample_index);
    }
    for note in &rep.side_notes {
        let _ = writeln!(s, "note          {note}");
    }
    s
}

fn cmd_diagnose(a: &DiagnoseArgs, seed: u64, tol: Tolerance, out: &Output) -> CmdResult {
    let doc = TensorDocument::read(&a.input)?;
    let model = doc.model()?;
    let (name, t) = doc.pick(a.tensor.as_deref())?;
    if a.theorem.eq_ignore_ascii_case("norms") {
        let n = flatness_norms(&model, &t)?;
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
        let mut table = format!("tensor              {name}\n");
        let _ = writeln!(table, "conformal norm      {}", fmt(n.conf_norm));
        let _ = writeln!(table, "Bochner norm        {}", fmt(n.boch_norm));
        let _ = writeln!(
            table,
            "const-curv resid    {:.6e}  (kappa {:.6e})",
            n.const_curv_residual, n.kappa_hat
        );
        let _ = writeln!(
            table,
            "nu / mu fit         {:.6e} / {}",
            n.nu_hat,
            fmt(n.mu_hat)
        );
        let _ = writeln!(table, "antihol resid       {}", fmt(n.antihol_residual));
        let _ = writeln!(table, "Kaehler resid       {}", fmt(n.kaehler_residual));
        let _ = writeln!(table, "Einstein resid      {:.6e}", n.einstein_residual);
        out.emit(&table, serde_json::to_value(&n).expect("serializable"));
        return Ok(true);
    }
    let rep = if let Ok(kind) = a.theorem.parse::<UniquenessKind>() {
        uniqueness_check(&model, kind, &t, a.samples, seed, tol)?
    } else {
        let id: TheoremId = a.theorem.parse()?;
        equivalence_check(&model, &t, id, a.samples, seed, tol)?
    };
    let table = format!("tensor        {name}\n{}", side_table(&rep));
    out.emit(&table, serde_json::to_value(&rep).expect("serializable"));
    Ok(rep.consistent)
}

fn cmd_identities(a: &IdentitiesArgs, seed: u64, tol: Tolerance, out: &Output) -> CmdResult {
    let doc = TensorDocument::read(&a.input)?;
    let model = doc.model()?;
    let (name, t) = doc.pick(a.tensor.as_deref())?;
    let rep = theorem6_identities(&model, &t, a.samples, seed, tol, a.with_pair_sectional)?;
    let mut table = format!("tensor                  {name}\n");
    let _ = writeln!(table, "basis sum               {:.6e}", rep.basis_sum);
    let _ = writeln!(
        table,
        "holomorphic (spacelike) {:.6e}",
        rep.holomorphic_spacelike
    );
    let _ = writeln!(
        table,
        "holomorphic (timelike)  {:.6e}  (informational)",
        rep.holomorphic_timelike
    );
    let _ = writeln!(table, "mixed pair              {:.6e}", rep.mixed_pair);
    if let Some(p) = rep.pair_sectional {
        let _ = writeln!(table, "pair sectional          {p:.6e}  (informational)");
    }
    let _ = writeln!(table, "verdict                 {}", rep.verdict);
    out.emit(&table, serde_json::to_value(&rep).expect("serializable"));
    Ok(rep.verdict)
}

fn cmd_fuzz(a: &FuzzArgs, seed: u64, tol: Tolerance, out: &Output) -> CmdResult {
    let mut cfg = FuzzConfig::new(a.dim, a.index, a.complex, a.trials, seed);
    cfg.samples = a.samples;
    cfg.tolerance = tol.rel;
    let summary = fuzz(&cfg)?;
    let text = summary_json(&summary)?;
    if let Some(path) = &a.out {
        std::fs::write(path, format!("{text}\n")).map_err(Error::from)?;
    }
    let mut table = format!(
        "fuzz ({}, {}){} trials {} seed {}\n",
        a.dim,
        a.index,
        if a.complex { " with J" } else { "" },
        a.trials,
        seed
    );
    let _ = writeln!(
        table,
        "{:<36} {:>9} {:>9} {:>9} {:>9}",
        "check", "pass", "fail", "one-sided", "n/a"
    );
    for (id, t) in &summary.by_theorem {
        let _ = writeln!(
            table,
            "{:<36} {:>9} {:>9} {:>9} {:>9}",
            id.id(),
            t.both_pass,
            t.both_fail,
            t.one_sided,
            t.not_applicable
        );
    }
    let _ = writeln!(
        table,
        "checks run {}, inconsistencies {}",
        summary.checks_run,
        summary.inconsistencies()
    );
    for f in &summary.failures {
        let _ = writeln!(
            table,
            "  trial {} {:?} {}: {}",
            f.trial, f.family, f.theorem, f.detail
        );
    }
    out.emit(
        &table,
        serde_json::to_value(&summary).expect("serializable"),
    );
    Ok(summary.is_consistent())
}
