//! The three commands, producing serializable outcomes.

use bautlab_core::dgla::ValidationReport;
use bautlab_core::models::{
    comparison_morphism, full_model, rational_homotopy_report, simplified_model, twisting_check, AssembledModel,
    HomPart, ModelSpec,
};
use bautlab_core::Q;
use serde::Serialize;

use crate::document::{InputDocument, VariantSpec, DEFAULT_MAX_DEGREE};
use crate::error::{CliError, ExitStatus};

/// Command line overrides; `None` falls back to the document options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub max_degree: Option<i32>,
    pub variant: Option<VariantSpec>,
    pub reduced: bool,
    pub trust_margin: i32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { max_degree: None, variant: None, reduced: false, trust_margin: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resolved {
    pub max_degree: i32,
    pub variant: VariantSpec,
    pub reduced: bool,
    pub trust_margin: i32,
    /// Top degree of the free Lie algebra window.
    pub window: i32,
}

pub fn resolve(doc: &InputDocument, s: &Settings) -> Result<Resolved, CliError> {
    let max_degree = s.max_degree.or(doc.options.max_degree).unwrap_or(DEFAULT_MAX_DEGREE);
    if max_degree < 0 {
        return Err(CliError::Schema(format!("max degree {max_degree} is negative")));
    }
    if s.trust_margin < 0 {
        return Err(CliError::Schema(format!("trust margin {} is negative", s.trust_margin)));
    }
    let variant = s.variant.or(doc.options.variant).unwrap_or(VariantSpec::Full);
    let reduced = match (variant, s.reduced, doc.options.reduced) {
        (_, true, _) => true,
        (VariantSpec::Simplified, false, Some(false)) => {
            return Err(CliError::Schema("the simplified model is based; `reduced = false` contradicts it".into()))
        }
        (VariantSpec::Simplified, false, _) => true,
        (VariantSpec::Full, false, r) => r.unwrap_or(false),
    };
    let window = max_degree + s.trust_margin + doc.max_generator_degree();
    Ok(Resolved { max_degree, variant, reduced, trust_margin: s.trust_margin, window })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub word: String,
    pub target: String,
    pub coefficient: String,
}

fn terms(v: &[(String, String, Q)]) -> Vec<Term> {
    v.iter().map(|(w, t, c)| Term { word: w.clone(), target: t.clone(), coefficient: c.to_string() }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppliedSign {
    pub word: String,
    /// `0` when the word vanishes.
    pub sign: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub checks: usize,
    pub defects: Vec<String>,
    pub unchecked_degrees: Vec<i32>,
}

impl From<&ValidationReport> for Validation {
    fn from(r: &ValidationReport) -> Self {
        Validation {
            checks: r.checks,
            defects: r.defects.iter().map(ToString::to_string).collect(),
            unchecked_degrees: r.unchecked_degrees.iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub defects: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidateOutcome {
    pub model: String,
    pub settings: Resolved,
    pub checks: Vec<Check>,
    pub valid: bool,
}

pub fn validate(doc: &InputDocument, s: &Settings) -> Result<ValidateOutcome, CliError> {
    let r = resolve(doc, s)?;
    let spec = doc.spec(r.window, r.reduced)?;
    let mut checks = Vec::new();

    let report = spec.model.algebra().validate();
    checks.push(Check {
        name: "free Lie model".into(),
        passed: report.is_valid(),
        detail: format!("{} generators, {} checks", spec.model.generators().len(), report.checks),
        defects: Validation::from(&report).defects,
    });
    checks.push(Check {
        name: "minimality".into(),
        passed: spec.model.warnings().is_empty(),
        detail: "differential is decomposable".into(),
        defects: spec.model.warnings().to_vec(),
    });
    checks.push(Check {
        name: "structure algebra".into(),
        passed: true,
        detail: format!(
            "dimension {}, top degree {}, nilpotency class {}",
            spec.structure.algebra().total_dim(),
            spec.structure.top(),
            spec.structure.nilpotency()
        ),
        defects: Vec::new(),
    });
    let tw = twisting_check(&spec)?;
    checks.push(Check {
        name: "Maurer-Cartan".into(),
        passed: tw.is_mc(),
        detail: format!("{} terms", tw.tau.len()),
        defects: tw.defect.iter().map(|(w, t, c)| format!("hom({w},{t}): {c}")).collect(),
    });
    let valid = checks.iter().all(|c| c.passed);
    Ok(ValidateOutcome { model: doc.space.name.clone(), settings: r, checks, valid })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Row {
    pub degree: i32,
    pub homotopy_degree: i32,
    pub total: usize,
    pub fiber: usize,
    pub base: usize,
    pub trusted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportOutcome {
    pub model: String,
    pub settings: Resolved,
    pub convention: &'static str,
    pub twisting: Vec<Term>,
    pub applied_signs: Vec<AppliedSign>,
    pub rows: Vec<Row>,
    pub trusted_up_to: Option<i32>,
    pub exact: bool,
    pub euler_consistent: Option<bool>,
    pub twist_identity: bool,
    pub validation: Validation,
    /// Trust margin that would make every requested degree trusted.
    pub suggested_trust_margin: Option<i32>,
}

pub const CONVENTION: &str = "pi_{n+1}(Baut) (x) Q = H_n";

impl ReportOutcome {
    pub fn status(&self) -> ExitStatus {
        if !self.validation.defects.is_empty() || !self.exact || !self.twist_identity {
            ExitStatus::Validation
        } else if self.suggested_trust_margin.is_some() {
            ExitStatus::Window
        } else {
            ExitStatus::Ok
        }
    }
}

pub fn assemble(spec: &ModelSpec<Q>, variant: VariantSpec) -> Result<AssembledModel<Q>, CliError> {
    Ok(match variant {
        VariantSpec::Full => full_model(spec)?,
        VariantSpec::Simplified => simplified_model(spec)?,
    })
}

pub fn report(doc: &InputDocument, s: &Settings) -> Result<ReportOutcome, CliError> {
    let r = resolve(doc, s)?;
    let spec = doc.spec(r.window, r.reduced)?;
    let model = assemble(&spec, r.variant)?;
    let h = rational_homotopy_report(&model, r.max_degree)?;
    let rows: Vec<Row> = h
        .rows
        .iter()
        .map(|x| Row {
            degree: x.degree,
            homotopy_degree: x.homotopy_degree(),
            total: x.total,
            fiber: x.fiber,
            base: x.base,
            trusted: x.trusted,
        })
        .collect();
    let first_untrusted = rows.iter().find(|x| !x.trusted).map(|x| x.degree);
    let suggested_trust_margin = first_untrusted.map(|n| r.trust_margin + (r.max_degree - n) + 1);
    Ok(ReportOutcome {
        model: doc.space.name.clone(),
        settings: r,
        convention: CONVENTION,
        twisting: terms(&model.twisting_terms()),
        applied_signs: model.applied_signs.iter().map(|(w, s)| AppliedSign { word: w.clone(), sign: *s }).collect(),
        rows,
        trusted_up_to: h.trusted_up_to(),
        exact: h.exactness.is_exact(),
        euler_consistent: h.euler_consistent,
        twist_identity: model.twist_identity.holds(),
        validation: Validation::from(&h.validation),
        suggested_trust_margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompareRow {
    pub degree: i32,
    pub simplified: usize,
    pub full: usize,
    pub trusted: bool,
    pub isomorphic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompareOutcome {
    pub model: String,
    pub settings: Resolved,
    pub morphism: bool,
    pub quasi_isomorphism: bool,
    pub defects: Vec<String>,
    pub twist_identity: bool,
    pub rows: Vec<CompareRow>,
}

impl CompareOutcome {
    pub fn status(&self) -> ExitStatus {
        if !self.quasi_isomorphism || !self.twist_identity {
            ExitStatus::Validation
        } else if self.rows.iter().any(|r| !r.trusted) {
            ExitStatus::Window
        } else {
            ExitStatus::Ok
        }
    }
}

pub fn compare(doc: &InputDocument, s: &Settings) -> Result<CompareOutcome, CliError> {
    let settings = Settings { variant: Some(VariantSpec::Full), reduced: true, ..s.clone() };
    let r = resolve(doc, &settings)?;
    let spec = doc.spec(r.window, true)?;
    let full = full_model(&spec)?;
    let simplified = simplified_model(&spec)?;
    let c = comparison_morphism(&simplified, &full, HomPart::Indecomposables, r.max_degree)?;
    let rows = c
        .simplified
        .entries
        .iter()
        .zip(&c.full.entries)
        .map(|(a, b)| CompareRow {
            degree: a.degree,
            simplified: a.dim,
            full: b.dim,
            trusted: a.trusted && b.trusted,
            isomorphic: c.isomorphic_in.contains(&a.degree),
        })
        .collect();
    Ok(CompareOutcome {
        model: doc.space.name.clone(),
        settings: r,
        morphism: c.is_morphism(),
        quasi_isomorphism: c.is_quasi_isomorphism(),
        defects: Validation::from(&c.report).defects,
        twist_identity: full.twist_identity.holds() && simplified.twist_identity.holds(),
        rows,
    })
}
