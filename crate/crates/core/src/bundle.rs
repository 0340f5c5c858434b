//! Typed files on top of [`crate::format`]: system files (1-RDM, optional
//! 2-RDM, model metadata), domain files, single matrices, and analysis
//! bundles. Every embedded RDM, domain set and domain matrix is passed back
//! through its validator on load.

use nalgebra::DMatrix;

use crate::diagnostics::{CommutatorTable, NeglectImpact};
use crate::format::{Document, FormatError, Value};
use crate::localization::LocalizedOrbitals;
use crate::oracle::{Boundary, HubbardResult, HubbardSpec};
use crate::rdm::{
    validate_domain_set, validate_one_rdm, validate_two_rdm, DomainOverlapSet, DomainRestrictedRdm, OneRdm, Provenance, TwoRdm,
};
use crate::representability::{Finding, FindingCode, RepresentabilityReport, Verdict};
use crate::SymMatrix;

pub const TWO_RDM_INDEX_ORDER: &str = "i,k,j,l";

type Res<T> = std::result::Result<T, FormatError>;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelInfo {
    pub spec: HubbardSpec,
    pub ground_energy: f64,
    pub gap: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemFile {
    pub source: String,
    pub tool_version: String,
    pub one_rdm: OneRdm,
    pub two_rdm: Option<TwoRdm>,
    pub model: Option<ModelInfo>,
}

impl SystemFile {
    pub fn from_hubbard(r: &HubbardResult) -> Self {
        let s = &r.spec;
        SystemFile {
            source: format!(
                "hubbard-fci sites={} electrons={} t={} u={} boundary={}",
                s.n_sites,
                s.n_electrons,
                s.hopping,
                s.interaction,
                boundary_str(s.boundary)
            ),
            tool_version: crate::VERSION.to_string(),
            one_rdm: r.one_rdm.clone(),
            two_rdm: Some(r.two_rdm.clone()),
            model: Some(ModelInfo {
                spec: *s,
                ground_energy: r.ground_energy,
                gap: r.gap,
                degenerate: r.degenerate,
            }),
        }
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::new("system");
        doc.set_text("source", &self.source);
        doc.set_text("tool_version", &self.tool_version);
        put_rdms(&mut doc, &self.one_rdm, self.two_rdm.as_ref());
        if let Some(m) = &self.model {
            doc.set_text("model.kind", "hubbard");
            doc.set_int("model.sites", m.spec.n_sites as i64);
            doc.set_int("model.electrons", m.spec.n_electrons as i64);
            doc.set_real("model.t", m.spec.hopping);
            doc.set_real("model.u", m.spec.interaction);
            doc.set_text("model.boundary", boundary_str(m.spec.boundary));
            doc.set_real("model.ground_energy", m.ground_energy);
            doc.set_real("model.gap", m.gap);
            doc.set_int("model.degenerate", m.degenerate as i64);
        }
        doc
    }

    pub fn from_document(doc: &Document) -> Res<Self> {
        doc.expect_kind("system")?;
        let (one_rdm, two_rdm) = get_rdms(doc)?;
        let model = if doc.has("model.kind") {
            let boundary = match doc.text("model.boundary")? {
                "open" => Boundary::Open,
                "periodic" => Boundary::Periodic,
                _ => return Err(wrong("model.boundary", "boundary (open|periodic)")),
            };
            Some(ModelInfo {
                spec: HubbardSpec {
                    n_sites: as_count(doc, "model.sites")?,
                    n_electrons: as_count(doc, "model.electrons")?,
                    hopping: doc.real("model.t")?,
                    interaction: doc.real("model.u")?,
                    boundary,
                },
                ground_energy: doc.real("model.ground_energy")?,
                gap: doc.real("model.gap")?,
                degenerate: doc.int("model.degenerate")? != 0,
            })
        } else {
            None
        };
        Ok(SystemFile {
            source: doc.text("source")?.to_string(),
            tool_version: doc.text("tool_version")?.to_string(),
            one_rdm,
            two_rdm,
            model,
        })
    }
}

fn boundary_str(b: Boundary) -> &'static str {
    match b {
        Boundary::Open => "open",
        Boundary::Periodic => "periodic",
    }
}

fn wrong(key: &str, expected: &'static str) -> FormatError {
    FormatError::WrongType {
        key: key.to_string(),
        expected,
    }
}

fn as_count(doc: &Document, key: &str) -> Res<usize> {
    usize::try_from(doc.int(key)?).map_err(|_| wrong(key, "non-negative int"))
}

fn put_rdms(doc: &mut Document, d: &OneRdm, d2: Option<&TwoRdm>) {
    doc.set_int("n_electrons", d.n_electrons() as i64);
    doc.set_matrix("one_rdm", d.matrix().as_matrix());
    if let Some(t) = d2 {
        let m = t.dim();
        doc.set_text("two_rdm.index_order", TWO_RDM_INDEX_ORDER);
        doc.set(
            "two_rdm",
            Value::Tensor4 {
                shape: [m; 4],
                data: t.as_slice().to_vec(),
            },
        );
    }
}

fn get_rdms(doc: &Document) -> Res<(OneRdm, Option<TwoRdm>)> {
    let n = as_count(doc, "n_electrons")?;
    let one = validate_one_rdm(doc.matrix("one_rdm")?, n)?;
    let two = if doc.has("two_rdm") {
        let order = doc.text("two_rdm.index_order")?;
        if order != TWO_RDM_INDEX_ORDER {
            return Err(wrong("two_rdm.index_order", "index order 'i,k,j,l'"));
        }
        let (shape, data) = doc.tensor4("two_rdm")?;
        if shape.iter().any(|&x| x != one.dim()) {
            return Err(crate::Error::DimensionMismatch {
                expected: one.dim(),
                found: shape.into_iter().find(|&x| x != one.dim()).unwrap_or(0),
            }
            .into());
        }
        Some(validate_two_rdm(data.to_vec(), &one)?)
    } else {
        None
    };
    Ok((one, two))
}

fn put_domains(doc: &mut Document, set: &DomainOverlapSet) {
    doc.set_int("domain.count", set.len() as i64);
    for (i, (label, s)) in set.iter().enumerate() {
        doc.set_text(format!("domain.{i}.label"), label);
        doc.set_matrix(format!("domain.{i}.overlap"), s.as_matrix());
    }
}

fn get_domains(doc: &Document) -> Res<DomainOverlapSet> {
    let n = as_count(doc, "domain.count")?;
    let mut labels = Vec::with_capacity(n);
    let mut mats = Vec::with_capacity(n);
    for i in 0..n {
        labels.push(doc.text(&format!("domain.{i}.label"))?.to_string());
        mats.push(doc.matrix(&format!("domain.{i}.overlap"))?);
    }
    Ok(validate_domain_set(mats, labels)?)
}

pub fn domains_to_document(set: &DomainOverlapSet) -> Document {
    let mut doc = Document::new("domains");
    put_domains(&mut doc, set);
    doc
}

pub fn domains_from_document(doc: &Document) -> Res<DomainOverlapSet> {
    doc.expect_kind("domains")?;
    get_domains(doc)
}

/// A single (possibly malformed) square matrix, as consumed by `check`.
pub fn matrix_to_document(m: &DMatrix<f64>, label: Option<&str>) -> Document {
    let mut doc = Document::new("matrix");
    if let Some(l) = label {
        doc.set_text("label", l);
    }
    doc.set_matrix("matrix", m);
    doc
}

pub fn matrix_from_document(doc: &Document) -> Res<DMatrix<f64>> {
    doc.expect_kind("matrix")?;
    doc.matrix("matrix")
}

fn put_report(doc: &mut Document, p: &str, r: &RepresentabilityReport) {
    doc.set_text(format!("{p}.verdict"), r.verdict.as_str());
    doc.set_real(format!("{p}.hermiticity_deviation"), r.hermiticity_deviation);
    doc.set_vector(format!("{p}.eigenvalues"), &r.eigenvalues);
    doc.set_real(format!("{p}.min_eigenvalue"), r.min_eigenvalue);
    doc.set_real(format!("{p}.max_eigenvalue"), r.max_eigenvalue);
    doc.set_real(format!("{p}.trace"), r.trace);
    if let Some(e) = r.expected_trace {
        doc.set_real(format!("{p}.expected_trace"), e);
    }
    doc.set_int(format!("{p}.finding.count"), r.findings.len() as i64);
    for (k, f) in r.findings.iter().enumerate() {
        doc.set_text(format!("{p}.finding.{k}.code"), f.code.as_str());
        doc.set_real(format!("{p}.finding.{k}.magnitude"), f.magnitude);
    }
}

fn get_report(doc: &Document, p: &str) -> Res<RepresentabilityReport> {
    let key = format!("{p}.verdict");
    let verdict = Verdict::parse(doc.text(&key)?).ok_or_else(|| wrong(&key, "verdict"))?;
    let mut findings = Vec::new();
    for k in 0..as_count(doc, &format!("{p}.finding.count"))? {
        let key = format!("{p}.finding.{k}.code");
        findings.push(Finding {
            code: FindingCode::parse(doc.text(&key)?).ok_or_else(|| wrong(&key, "finding code"))?,
            magnitude: doc.real(&format!("{p}.finding.{k}.magnitude"))?,
        });
    }
    Ok(RepresentabilityReport {
        hermiticity_deviation: doc.real(&format!("{p}.hermiticity_deviation"))?,
        eigenvalues: doc.vector(&format!("{p}.eigenvalues"))?.to_vec(),
        min_eigenvalue: doc.real(&format!("{p}.min_eigenvalue"))?,
        max_eigenvalue: doc.real(&format!("{p}.max_eigenvalue"))?,
        trace: doc.real(&format!("{p}.trace"))?,
        expected_trace: doc.opt_real(&format!("{p}.expected_trace"))?,
        findings,
        verdict,
    })
}

pub fn put_localized(doc: &mut Document, p: &str, l: &LocalizedOrbitals) {
    doc.set_matrix(format!("{p}.orbitals"), &l.orbitals);
    doc.set_vector(format!("{p}.occupations"), &l.occupations);
    doc.set_real(format!("{p}.functional"), l.functional_value);
    doc.set_int(format!("{p}.sweeps"), l.sweeps_used as i64);
    doc.set_int(format!("{p}.converged"), l.converged as i64);
    doc.set_vector(format!("{p}.history"), &l.history);
}

pub fn get_localized(doc: &Document, p: &str) -> Res<LocalizedOrbitals> {
    Ok(LocalizedOrbitals {
        orbitals: doc.matrix(&format!("{p}.orbitals"))?,
        occupations: doc.vector(&format!("{p}.occupations"))?.to_vec(),
        functional_value: doc.real(&format!("{p}.functional"))?,
        sweeps_used: as_count(doc, &format!("{p}.sweeps"))?,
        converged: doc.int(&format!("{p}.converged"))? != 0,
        history: doc.vector(&format!("{p}.history"))?.to_vec(),
    })
}

/// One construction (symmetric restriction or hole) for one domain, with
/// everything derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub matrix: DomainRestrictedRdm,
    pub report: RepresentabilityReport,
    pub neglect: Option<NeglectImpact>,
    pub localized: Option<LocalizedOrbitals>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainResult {
    pub label: String,
    pub symmetric: Option<Construction>,
    pub dafh: Option<Construction>,
    pub difference_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBundle {
    pub command: String,
    pub source: String,
    pub tool_version: String,
    /// Tolerances in effect, by name.
    pub tolerances: Vec<(String, f64)>,
    pub one_rdm: OneRdm,
    pub two_rdm: Option<TwoRdm>,
    pub domains: DomainOverlapSet,
    pub results: Vec<DomainResult>,
    /// Largest elementwise deviation of `Σ_Ω G(Ω)` from the 1-RDM, per
    /// construction family.
    pub partition_deviation: Option<f64>,
    pub dafh_partition_deviation: Option<f64>,
    pub commutators: Option<CommutatorTable>,
}

fn put_construction(doc: &mut Document, p: &str, c: &Construction) {
    doc.set_text(format!("{p}.provenance"), c.matrix.provenance.as_str());
    doc.set_real(format!("{p}.population"), c.matrix.population);
    doc.set_matrix(format!("{p}.matrix"), c.matrix.matrix.as_matrix());
    put_report(doc, &format!("{p}.report"), &c.report);
    if let Some(n) = &c.neglect {
        doc.set_real(format!("{p}.neglect.trace_before"), n.trace_before);
        doc.set_real(format!("{p}.neglect.trace_after"), n.trace_after);
        doc.set_real(format!("{p}.neglect.population_leak"), n.population_leak);
    }
    if let Some(l) = &c.localized {
        put_localized(doc, &format!("{p}.localized"), l);
    }
}

fn get_construction(doc: &Document, p: &str, label: &str) -> Res<Option<Construction>> {
    let key = format!("{p}.provenance");
    if !doc.has(&key) {
        return Ok(None);
    }
    let provenance = Provenance::parse(doc.text(&key)?).ok_or_else(|| wrong(&key, "provenance"))?;
    let matrix = SymMatrix::new(doc.matrix(&format!("{p}.matrix"))?)?;
    let matrix = DomainRestrictedRdm::from_parts(label, matrix, provenance, doc.real(&format!("{p}.population"))?)?;
    let neglect = if doc.has(&format!("{p}.neglect.trace_before")) {
        Some(NeglectImpact {
            trace_before: doc.real(&format!("{p}.neglect.trace_before"))?,
            trace_after: doc.real(&format!("{p}.neglect.trace_after"))?,
            population_leak: doc.real(&format!("{p}.neglect.population_leak"))?,
        })
    } else {
        None
    };
    let localized = if doc.has(&format!("{p}.localized.orbitals")) {
        Some(get_localized(doc, &format!("{p}.localized"))?)
    } else {
        None
    };
    Ok(Some(Construction {
        matrix,
        report: get_report(doc, &format!("{p}.report"))?,
        neglect,
        localized,
    }))
}

impl AnalysisBundle {
    pub fn to_document(&self) -> Document {
        let mut doc = Document::new("analysis");
        doc.set_text("command", &self.command);
        doc.set_text("source", &self.source);
        doc.set_text("tool_version", &self.tool_version);
        for (name, v) in &self.tolerances {
            doc.set_real(format!("tol.{name}"), *v);
        }
        put_rdms(&mut doc, &self.one_rdm, self.two_rdm.as_ref());
        put_domains(&mut doc, &self.domains);
        if let Some(x) = self.partition_deviation {
            doc.set_real("partition.max_deviation", x);
        }
        if let Some(x) = self.dafh_partition_deviation {
            doc.set_real("dafh_partition.max_deviation", x);
        }
        doc.set_int("result.count", self.results.len() as i64);
        for (i, r) in self.results.iter().enumerate() {
            doc.set_text(format!("result.{i}.label"), &r.label);
            if let Some(c) = &r.symmetric {
                put_construction(&mut doc, &format!("result.{i}.symmetric"), c);
            }
            if let Some(c) = &r.dafh {
                put_construction(&mut doc, &format!("result.{i}.dafh"), c);
            }
            if let Some(x) = r.difference_norm {
                doc.set_real(format!("result.{i}.difference_norm"), x);
            }
        }
        if let Some(t) = &self.commutators {
            for (k, l) in t.labels.iter().enumerate() {
                doc.set_text(format!("commutators.label.{k}"), l);
            }
            doc.set_matrix("commutators.norms", &t.norms);
            doc.set_real("commutators.max", t.max);
            doc.set_int("commutators.commuting", t.commuting as i64);
        }
        doc
    }

    pub fn from_document(doc: &Document) -> Res<Self> {
        doc.expect_kind("analysis")?;
        let tolerances = doc
            .entries()
            .iter()
            .filter_map(|(k, v)| match (k.strip_prefix("tol."), v) {
                (Some(name), Value::Real(x)) => Some((name.to_string(), *x)),
                _ => None,
            })
            .collect();
        let (one_rdm, two_rdm) = get_rdms(doc)?;
        let domains = get_domains(doc)?;
        let mut results = Vec::new();
        for i in 0..as_count(doc, "result.count")? {
            let label = doc.text(&format!("result.{i}.label"))?.to_string();
            results.push(DomainResult {
                symmetric: get_construction(doc, &format!("result.{i}.symmetric"), &label)?,
                dafh: get_construction(doc, &format!("result.{i}.dafh"), &label)?,
                difference_norm: doc.opt_real(&format!("result.{i}.difference_norm"))?,
                label,
            });
        }
        let commutators = if doc.has("commutators.norms") {
            let norms = doc.matrix("commutators.norms")?;
            let labels = (0..norms.nrows())
                .map(|k| doc.text(&format!("commutators.label.{k}")).map(str::to_string))
                .collect::<Res<Vec<_>>>()?;
            Some(CommutatorTable {
                labels,
                norms,
                max: doc.real("commutators.max")?,
                commuting: doc.int("commutators.commuting")? != 0,
            })
        } else {
            None
        };
        Ok(AnalysisBundle {
            command: doc.text("command")?.to_string(),
            source: doc.text("source")?.to_string(),
            tool_version: doc.text("tool_version")?.to_string(),
            tolerances,
            one_rdm,
            two_rdm,
            domains,
            results,
            partition_deviation: doc.opt_real("partition.max_deviation")?,
            dafh_partition_deviation: doc.opt_real("dafh_partition.max_deviation")?,
            commutators,
        })
    }
}
