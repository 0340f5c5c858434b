//! Command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input, 2 validation failure,
//! 3 non-representable matrix (`check`), 4 localization refused.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bundle::{
    domains_from_document, get_localized, matrix_from_document, put_localized, AnalysisBundle, Construction, DomainResult,
    SystemFile,
};
use crate::dafh::dafh_matrix;
use crate::decomposition::{partition_deviation, symmetric_restrict};
use crate::diagnostics::{common_eigenbasis_report, neglect_impact};
use crate::format::{Document, FormatError};
use crate::linalg::sym_eigen;
use crate::localization::{isopycnic_localize, localize_domain, LocalizeOptions, LocalizedOrbitals};
use crate::oracle::{hubbard_fci, parse_site_blocks, site_domains, Boundary, HubbardSpec};
use crate::rdm::{DomainOverlapSet, DomainRestrictedRdm};
use crate::representability::{check, check_domain, RepresentabilityReport};
use crate::{tol, Error};
use clap::{Args, Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_REPRESENTABLE: i32 = 3;
pub const EXIT_LOCALIZE_REFUSED: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "domain-rdm",
    version,
    about = "Domain-restricted 1-RDMs, domain-averaged holes and isopycnic localization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a Hubbard chain exactly and write its RDMs.
    Model(ModelArgs),
    /// Split the 1-RDM into symmetric domain restrictions.
    Decompose(AnalysisArgs),
    /// Build domain-averaged hole matrices from the 2-RDM.
    Dafh(AnalysisArgs),
    /// Check one matrix against the closed-shell bounds.
    Check(CheckArgs),
    /// Localize a domain matrix (or every matrix in an analysis file).
    Localize(LocalizeArgs),
    /// Compare both constructions domain by domain.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long)]
    sites: usize,
    #[arg(long)]
    electrons: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long)]
    u: f64,
    #[arg(long)]
    periodic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "domain_source", required = true, multiple = false)]
struct DomainSource {
    /// Domain overlap file.
    #[arg(long, group = "domain_source")]
    domains: Option<PathBuf>,
    /// Site blocks, 1-based, e.g. "1,2;3,4".
    #[arg(long, group = "domain_source")]
    site_blocks: Option<String>,
}

#[derive(Args, Debug)]
struct AnalysisArgs {
    #[arg(long)]
    system: PathBuf,
    #[command(flatten)]
    domains: DomainSource,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = tol::CHECK)]
    check_tol: f64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    analysis: AnalysisArgs,
    /// Also localize every representable matrix.
    #[arg(long)]
    localize: bool,
    #[arg(long, default_value_t = tol::LOCALIZE_CONV)]
    conv_tol: f64,
    #[arg(long, default_value_t = tol::LOCALIZE_MAX_SWEEPS)]
    max_sweeps: usize,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    expected_trace: Option<f64>,
    #[arg(long, visible_alias = "check-tol", default_value_t = tol::CHECK)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LocalizeArgs {
    /// A matrix file or an analysis file.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    domains: DomainSource,
    #[arg(long, default_value_t = tol::LOCALIZE_CONV)]
    conv_tol: f64,
    #[arg(long, default_value_t = tol::LOCALIZE_MAX_SWEEPS)]
    max_sweeps: usize,
    #[arg(long, default_value_t = tol::CHECK)]
    check_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_) | Error::InvalidPartition(_) | Error::UnknownDomain(_) => EXIT_MALFORMED,
            Error::NegativeOccupation { .. } | Error::NotRepresentable { .. } => EXIT_LOCALIZE_REFUSED,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Invalid(inner) => Failure {
                code: EXIT_INVALID,
                message: inner.to_string(),
            },
            other => Failure {
                code: EXIT_MALFORMED,
                message: other.to_string(),
            },
        }
    }
}

type Outcome = std::result::Result<(String, i32), Failure>;

/// Runs the CLI on `args` (including the program name), printing to
/// stdout/stderr, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Model(a) => cmd_model(a),
        Command::Decompose(a) => cmd_analysis(a, Mode::Decompose),
        Command::Dafh(a) => cmd_analysis(a, Mode::Dafh),
        Command::Compare(a) => {
            let opts = a.localize.then_some(LocalizeOptions {
                conv_tol: a.conv_tol,
                max_sweeps: a.max_sweeps,
                check_tol: a.analysis.check_tol,
            });
            cmd_compare(a.analysis, opts)
        }
        Command::Check(a) => cmd_check(a),
        Command::Localize(a) => cmd_localize(a),
    };
    match result {
        Ok((report, code)) => {
            print!("{report}");
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn check_tol_arg(x: f64, name: &str) -> Result<(), Failure> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_MALFORMED,
            message: format!("{name} must be a non-negative number"),
        })
    }
}

fn write_doc(doc: &Document, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(p) = out {
        doc.write(p)?;
    }
    Ok(())
}

fn cmd_model(a: ModelArgs) -> Outcome {
    let spec = HubbardSpec {
        n_sites: a.sites,
        n_electrons: a.electrons,
        hopping: a.t,
        interaction: a.u,
        boundary: if a.periodic { Boundary::Periodic } else { Boundary::Open },
    };
    let r = hubbard_fci(&spec)?;
    let sys = SystemFile::from_hubbard(&r);
    write_doc(&sys.to_document(), a.out.as_deref())?;
    let mut s = String::new();
    let _ = writeln!(s, "system: {}", sys.source);
    let _ = writeln!(s, "dimension: {}", r.dimension);
    let _ = writeln!(s, "ground energy: {:.12}", r.ground_energy);
    let _ = writeln!(s, "gap: {:.6e}{}", r.gap, if r.degenerate { " (degenerate)" } else { "" });
    let occ: Vec<String> = r
        .one_rdm
        .natural()
        .eigenvalues
        .iter()
        .rev()
        .map(|x| format!("{x:.6}"))
        .collect();
    let _ = writeln!(s, "natural occupations: {}", occ.join(" "));
    Ok((s, EXIT_OK))
}

fn load_domains(src: &DomainSource, n_sites: usize) -> Result<DomainOverlapSet, Failure> {
    let set = match (&src.domains, &src.site_blocks) {
        (Some(p), _) => domains_from_document(&Document::read(p)?)?,
        (None, Some(spec)) => site_domains(n_sites, &parse_site_blocks(spec)?)?,
        (None, None) => unreachable!("clap enforces a domain source"),
    };
    if set.dim() != n_sites {
        return Err(Error::DimensionMismatch {
            expected: n_sites,
            found: set.dim(),
        }
        .into());
    }
    Ok(set)
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Decompose,
    Dafh,
    Compare,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Decompose => "decompose",
            Mode::Dafh => "dafh",
            Mode::Compare => "compare",
        }
    }
}

fn construct(dr: DomainRestrictedRdm, check_tol: f64, loc: Option<(&DomainOverlapSet, &LocalizeOptions)>) -> Construction {
    let report = check_domain(&dr, check_tol);
    let localized = match loc {
        Some((domains, opts)) if report.is_representable() => localize_domain(&dr, domains, opts).ok(),
        _ => None,
    };
    Construction {
        neglect: Some(neglect_impact(&dr)),
        report,
        matrix: dr,
        localized,
    }
}

fn build_bundle(a: &AnalysisArgs, mode: Mode, loc: Option<&LocalizeOptions>) -> Result<AnalysisBundle, Failure> {
    check_tol_arg(a.check_tol, "--check-tol")?;
    let sys = SystemFile::from_document(&Document::read(&a.system)?)?;
    let d = &sys.one_rdm;
    let domains = load_domains(&a.domains, d.dim())?;
    let want_sym = mode != Mode::Dafh;
    let want_dafh = mode != Mode::Decompose;
    let d2 = match (&sys.two_rdm, want_dafh) {
        (None, true) => {
            return Err(Failure {
                code: EXIT_INVALID,
                message: format!("'{}' has no 2-RDM; {} needs one", a.system.display(), mode.name()),
            })
        }
        (d2, _) => d2.clone(),
    };
    let loc = loc.map(|o| (&domains, o));
    let mut results = Vec::with_capacity(domains.len());
    let mut sym_parts = Vec::new();
    let mut dafh_parts = Vec::new();
    for (label, s) in domains.iter() {
        let symmetric = if want_sym {
            let dr = symmetric_restrict(d, s, label)?;
            sym_parts.push(dr.clone());
            Some(construct(dr, a.check_tol, loc))
        } else {
            None
        };
        let dafh = match (&d2, want_dafh) {
            (Some(d2), true) => {
                let dr = dafh_matrix(d, d2, s, label)?;
                dafh_parts.push(dr.clone());
                Some(construct(dr, a.check_tol, loc))
            }
            _ => None,
        };
        let difference_norm = match (&symmetric, &dafh) {
            (Some(x), Some(y)) => Some((x.matrix.matrix.as_matrix() - y.matrix.matrix.as_matrix()).norm()),
            _ => None,
        };
        results.push(DomainResult {
            label: label.to_string(),
            symmetric,
            dafh,
            difference_norm,
        });
    }
    let commutators = if mode == Mode::Compare && sym_parts.len() >= 2 {
        Some(common_eigenbasis_report(&sym_parts)?)
    } else {
        None
    };
    let mut tolerances = vec![
        ("check".to_string(), a.check_tol),
        ("clamp".to_string(), tol::CLAMP),
        ("occupation_floor".to_string(), tol::OCCUPATION_FLOOR),
        ("symmetry".to_string(), tol::SYM),
        ("trace".to_string(), tol::TRACE),
    ];
    if let Some((_, o)) = loc {
        tolerances.push(("localize_conv".to_string(), o.conv_tol));
        tolerances.push(("localize_max_sweeps".to_string(), o.max_sweeps as f64));
    }
    Ok(AnalysisBundle {
        command: mode.name().to_string(),
        source: a.system.display().to_string(),
        tool_version: crate::VERSION.to_string(),
        tolerances,
        one_rdm: sys.one_rdm.clone(),
        two_rdm: d2,
        domains,
        results,
        partition_deviation: want_sym.then(|| partition_deviation(d, &sym_parts)),
        dafh_partition_deviation: want_dafh.then(|| partition_deviation(d, &dafh_parts)),
        commutators,
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn summarize_construction(s: &mut String, name: &str, c: &Construction) {
    let r = &c.report;
    let _ = writeln!(
        s,
        "  {name}: population {:.10} eigenvalues [{:.6e}, {:.6e}] {}",
        c.matrix.population,
        r.min_eigenvalue,
        r.max_eigenvalue,
        r.verdict.as_str()
    );
    for f in &r.findings {
        let _ = writeln!(s, "    {} {:.6e}", f.code, f.magnitude);
    }
    if let Some(n) = &c.neglect {
        if n.population_leak < 0.0 {
            let _ = writeln!(s, "    neglecting negative part loses {:.6e}", -n.population_leak);
        }
    }
    if let Some(l) = &c.localized {
        let _ = writeln!(
            s,
            "    localized {} orbitals, L = {:.10}, {} sweeps{}",
            l.occupations.len(),
            l.functional_value,
            l.sweeps_used,
            if l.converged { "" } else { " (not converged)" }
        );
    }
}

fn summarize(b: &AnalysisBundle) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: {} ({} domains, N = {})",
        b.command,
        b.source,
        b.domains.len(),
        b.one_rdm.n_electrons()
    );
    for r in &b.results {
        let _ = writeln!(s, "domain {}:", r.label);
        if let Some(c) = &r.symmetric {
            summarize_construction(&mut s, "symmetric", c);
        }
        if let Some(c) = &r.dafh {
            summarize_construction(&mut s, "dafh", c);
        }
        if let Some(x) = r.difference_norm {
            let _ = writeln!(s, "  |G_sym - G_dafh|_F = {x:.10e}");
        }
    }
    if let Some(x) = b.partition_deviation {
        let _ = writeln!(s, "sum check (symmetric): max deviation {x:.3e} {}", pass(x < tol::TRACE));
    }
    if let Some(x) = b.dafh_partition_deviation {
        let _ = writeln!(s, "sum check (dafh): max deviation {x:.3e} {}", pass(x < tol::TRACE));
    }
    if let Some(t) = &b.commutators {
        let _ = writeln!(
            s,
            "commutators: max {:.10e} ({})",
            t.max,
            if t.commuting {
                "common eigenbasis"
            } else {
                "no common eigenbasis"
            }
        );
    }
    s
}

fn cmd_analysis(a: AnalysisArgs, mode: Mode) -> Outcome {
    let b = build_bundle(&a, mode, None)?;
    write_doc(&b.to_document(), a.out.as_deref())?;
    Ok((summarize(&b), EXIT_OK))
}

fn cmd_compare(a: AnalysisArgs, loc: Option<LocalizeOptions>) -> Outcome {
    if let Some(o) = &loc {
        check_tol_arg(o.conv_tol, "--conv-tol")?;
    }
    let b = build_bundle(&a, Mode::Compare, loc.as_ref())?;
    write_doc(&b.to_document(), a.out.as_deref())?;
    Ok((summarize(&b), EXIT_OK))
}

fn report_document(r: &RepresentabilityReport, source: &Path) -> Document {
    let mut doc = Document::new("report");
    doc.set_text("source", source.display().to_string());
    doc.set_text("verdict", r.verdict.as_str());
    doc.set_real("hermiticity_deviation", r.hermiticity_deviation);
    doc.set_vector("eigenvalues", &r.eigenvalues);
    doc.set_real("trace", r.trace);
    if let Some(e) = r.expected_trace {
        doc.set_real("expected_trace", e);
    }
    doc.set_int("finding.count", r.findings.len() as i64);
    for (k, f) in r.findings.iter().enumerate() {
        doc.set_text(format!("finding.{k}.code"), f.code.as_str());
        doc.set_real(format!("finding.{k}.magnitude"), f.magnitude);
    }
    doc
}

fn cmd_check(a: CheckArgs) -> Outcome {
    check_tol_arg(a.tol, "--tol")?;
    let m = matrix_from_document(&Document::read(&a.matrix)?)?;
    let r = check(&m, a.expected_trace, a.tol);
    write_doc(&report_document(&r, &a.matrix), a.out.as_deref())?;
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", r.verdict.as_str());
    let _ = writeln!(s, "eigenvalues: [{:.6e}, {:.6e}]", r.min_eigenvalue, r.max_eigenvalue);
    let _ = writeln!(s, "trace: {:.12}", r.trace);
    for f in &r.findings {
        let _ = writeln!(s, "{} {:.12e}", f.code, f.magnitude);
    }
    let code = if r.is_representable() {
        EXIT_OK
    } else {
        EXIT_NOT_REPRESENTABLE
    };
    Ok((s, code))
}

struct LocalizeItem {
    label: String,
    provenance: String,
    outcome: std::result::Result<LocalizedOrbitals, Error>,
}

fn cmd_localize(a: LocalizeArgs) -> Outcome {
    check_tol_arg(a.conv_tol, "--conv-tol")?;
    check_tol_arg(a.check_tol, "--check-tol")?;
    let opts = LocalizeOptions {
        conv_tol: a.conv_tol,
        max_sweeps: a.max_sweeps,
        check_tol: a.check_tol,
    };
    let doc = Document::read(&a.input)?;
    let items: Vec<LocalizeItem> = match doc.kind.as_str() {
        "matrix" => {
            let m = matrix_from_document(&doc)?;
            let domains = load_domains(&a.domains, m.nrows())?;
            if m.ncols() != m.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: m.nrows(),
                    found: m.ncols(),
                }
                .into());
            }
            let spec = sym_eigen(&m)?;
            let label = if doc.has("label") {
                doc.text("label")?.to_string()
            } else {
                "input".to_string()
            };
            vec![LocalizeItem {
                label,
                provenance: "matrix".to_string(),
                outcome: isopycnic_localize(&spec, &domains, &opts).or_else(|e| match e {
                    Error::NoOccupation => Ok(LocalizedOrbitals::empty(m.nrows())),
                    e => Err(e),
                }),
            }]
        }
        "analysis" => {
            let b = AnalysisBundle::from_document(&doc)?;
            let domains = load_domains(&a.domains, b.one_rdm.dim())?;
            let mut v = Vec::new();
            for r in &b.results {
                for c in [&r.symmetric, &r.dafh].into_iter().flatten() {
                    v.push(LocalizeItem {
                        label: r.label.clone(),
                        provenance: c.matrix.provenance.as_str().to_string(),
                        outcome: localize_domain(&c.matrix, &domains, &opts),
                    });
                }
            }
            v
        }
        other => {
            return Err(FormatError::WrongKind {
                expected: "matrix or analysis".to_string(),
                found: other.to_string(),
            }
            .into())
        }
    };

    let mut out = Document::new("localized");
    out.set_text("source", a.input.display().to_string());
    out.set_text("tool_version", crate::VERSION);
    out.set_real("tol.localize_conv", a.conv_tol);
    out.set_int("tol.localize_max_sweeps", a.max_sweeps as i64);
    out.set_real("tol.check", a.check_tol);
    out.set_int("count", items.len() as i64);
    let mut s = String::new();
    let mut refused = None;
    for (i, it) in items.iter().enumerate() {
        out.set_text(format!("item.{i}.label"), &it.label);
        out.set_text(format!("item.{i}.provenance"), &it.provenance);
        match &it.outcome {
            Ok(l) => {
                put_localized(&mut out, &format!("item.{i}"), l);
                let _ = writeln!(
                    s,
                    "{} ({}): {} orbitals, L = {:.10}, {} sweeps, {}",
                    it.label,
                    it.provenance,
                    l.occupations.len(),
                    l.functional_value,
                    l.sweeps_used,
                    if l.converged { "converged" } else { "NOT converged" }
                );
            }
            Err(e) => {
                out.set_text(format!("item.{i}.refused"), e.to_string());
                let _ = writeln!(s, "{} ({}): refused: {e}", it.label, it.provenance);
                refused.get_or_insert_with(|| e.clone());
            }
        }
    }
    write_doc(&out, a.out.as_deref())?;
    match refused {
        None => Ok((s, EXIT_OK)),
        Some(e) => {
            let f = Failure::from(e);
            print!("{s}");
            Err(f)
        }
    }
}

/// Reads back the orbitals of item `i` of a `localized` file.
pub fn read_localized_item(doc: &Document, i: usize) -> Result<Option<LocalizedOrbitals>, FormatError> {
    doc.expect_kind("localized")?;
    let p = format!("item.{i}");
    if doc.has(&format!("{p}.refused")) {
        return Ok(None);
    }
    get_localized(doc, &p).map(Some)
}
