//! JSON rendering of solver verdicts.

use quadra_core::polynomials::Degeneracy;
use quadra_core::prescribed::{CertificateStage, Evidence};
use quadra_core::tmp::PrgViolation;
use quadra_core::{Certificate, Measure, Polynomial, QuadratureVerdict, SolverOutcome, TmpVerdict};
use serde_json::{json, Map, Value};

use crate::format::{atom_json, scalar_json, scalars_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

/// Coefficients highest degree first, as a polynomial is usually written.
fn coeffs_json(p: Option<&Polynomial>) -> Value {
    match p {
        Some(p) => Value::Array(p.coeffs().iter().rev().map(scalar_json).collect()),
        None => Value::Array(Vec::new()),
    }
}

fn degeneracy_name(d: Degeneracy) -> &'static str {
    match d {
        Degeneracy::ComplexRoot => "ComplexRoot",
        Degeneracy::RepeatedRoot => "RepeatedRoot",
        Degeneracy::NoConvergence => "NoConvergence",
    }
}

fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::Matrix(m) => json!({
            "matrix": m
                .entries()
                .chunks(m.cols().max(1))
                .map(scalars_json)
                .collect::<Vec<_>>()
        }),
        Evidence::Values { expected, computed } => json!({
            "expected": scalar_json(expected),
            "computed": scalar_json(computed),
        }),
        Evidence::Scalar(s) => json!({ "value": scalar_json(s) }),
        Evidence::Roots(r) => json!({ "roots": r }),
        Evidence::Message(m) => json!({ "message": m }),
    }
}

pub fn certificate_json(c: &Certificate) -> Value {
    let mut obj = Map::new();
    let stage = match c.stage {
        CertificateStage::LocalizingSingular { order } => {
            obj.insert("order".into(), json!(order));
            "LocalizingSingular"
        }
        CertificateStage::ExtendedNotPd { minor_order } => {
            obj.insert("minor_order".into(), json!(minor_order));
            "ExtendedNotPD"
        }
        CertificateStage::TailMismatch { index } => {
            obj.insert("index".into(), json!(index));
            "TailMismatch"
        }
        CertificateStage::InfinityMassNonpositive => "InfinityMassNonpositive",
        CertificateStage::RootDegeneracy(d) => {
            obj.insert("reason".into(), json!(degeneracy_name(d)));
            "RootDegeneracy"
        }
        CertificateStage::VerificationFailed => "VerificationFailed",
    };
    obj.insert("stage".into(), json!(stage));
    obj.insert("evidence".into(), evidence_json(&c.evidence));
    Value::Object(obj)
}

fn measure_fields(obj: &mut Map<String, Value>, measure: Option<&Measure>) {
    let (nodes, weights): (Vec<Value>, Vec<Value>) = measure
        .map(|m| {
            m.atoms()
                .iter()
                .map(|(a, w)| (atom_json(a), scalar_json(w)))
                .unzip()
        })
        .unwrap_or_default();
    obj.insert("nodes".into(), Value::Array(nodes));
    obj.insert("weights".into(), Value::Array(weights));
}

pub fn solve_exit_code(verdict: &QuadratureVerdict) -> i32 {
    match verdict {
        QuadratureVerdict::Exists(_) => EXIT_OK,
        QuadratureVerdict::NotExists(_) => EXIT_NEGATIVE,
        QuadratureVerdict::Indeterminate(_) => EXIT_INDETERMINATE,
    }
}

/// Report of a prescribed-node solve. On a negative verdict the polynomials
/// and extension of the last attempted construction are still shown.
pub fn solve_report(outcome: &SolverOutcome, atom_count: Option<usize>) -> Value {
    let mut obj = Map::new();
    let status = match &outcome.verdict {
        QuadratureVerdict::Exists(_) => "Exists",
        QuadratureVerdict::NotExists(_) => "NotExists",
        QuadratureVerdict::Indeterminate(_) => "Indeterminate",
    };
    obj.insert("status".into(), json!(status));
    if let Some(c) = outcome.verdict.certificate() {
        obj.insert("certificate".into(), certificate_json(c));
    }
    if let Some(n) = atom_count {
        obj.insert("atom_count".into(), json!(n));
    }
    let q = outcome.verdict.quadrature();
    measure_fields(&mut obj, q.map(|q| &q.measure));

    let last = outcome.stages.iter().rev().find(|s| s.g.is_some());
    let (g, h, extended) = match q {
        Some(q) => (Some(&q.g), Some(&q.h), Some(&q.extended)),
        None => (
            last.and_then(|s| s.g.as_ref()),
            last.and_then(|s| s.h.as_ref()),
            last.and_then(|s| s.extended.as_ref()),
        ),
    };
    obj.insert("g_coeffs".into(), coeffs_json(g));
    obj.insert("h_coeffs".into(), coeffs_json(h));
    obj.insert(
        "extended_moments".into(),
        extended.map(|e| scalars_json(e.as_slice())).unwrap_or(json!([])),
    );
    obj.insert(
        "eigenvalue_report".into(),
        Value::Array(
            outcome
                .eigen_report()
                .map(|r| json!({ "matrix": r.label, "eigenvalues": r.eigenvalues }))
                .collect(),
        ),
    );
    Value::Object(obj)
}

pub fn tmp_exit_code(verdict: &TmpVerdict) -> i32 {
    match verdict {
        TmpVerdict::Unique(_) | TmpVerdict::InfinitelyMany { .. } => EXIT_OK,
        TmpVerdict::NotRepresentable(_) => EXIT_NEGATIVE,
    }
}

pub fn tmp_report(verdict: &TmpVerdict) -> Value {
    let mut obj = Map::new();
    match verdict {
        TmpVerdict::Unique(m) => {
            obj.insert("status".into(), json!("Unique"));
            obj.insert("rank".into(), json!(m.len()));
            measure_fields(&mut obj, Some(m));
        }
        TmpVerdict::InfinitelyMany { rank } => {
            obj.insert("status".into(), json!("InfinitelyMany"));
            obj.insert("rank".into(), json!(rank));
        }
        TmpVerdict::NotRepresentable(v) => {
            obj.insert("status".into(), json!("NotRepresentable"));
            obj.insert(
                "violation".into(),
                match v {
                    PrgViolation::MinorNotPositive { minor_order } => {
                        json!({ "kind": "MinorNotPositive", "minor_order": minor_order })
                    }
                    PrgViolation::RecursionFails { index } => {
                        json!({ "kind": "RecursionFails", "index": index })
                    }
                },
            );
        }
    }
    Value::Object(obj)
}
