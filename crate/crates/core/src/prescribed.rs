//! Minimal quadrature rules containing prescribed nodes.
//!
//! For `d₁` prescribed distinct nodes with `f = ∏(x − xᵢ)` and a sequence of
//! degree `D = d₁ + 2d₂ − 1` whose moment matrix `M_⌊D/2⌋` is positive
//! definite, a `(d₁+d₂)`-atomic representing measure containing the nodes
//! exists iff
//!
//! * the localizing matrix `H_f(d₂−1)` is invertible, and
//! * after solving `H_f(d₂−1) λ = Σ (−1)ⁱ eᵢ v_{d₁+d₂−i}` and extending `γ`
//!   by the recursion of `h = f·(x^{d₂} − Σ λᵢ xⁱ)`, the moment matrix
//!   `M_{d₁+d₂−1}` of the extension is positive definite.
//!
//! The remaining nodes are then the zeros of `g = x^{d₂} − Σ λᵢ xⁱ`. When the
//! evaluation at infinity may be used as an atom, the same construction one
//! order lower on `(γ₀, …, γ_{D−2})` must reproduce `γ_{D−1}` and fall short
//! of `γ_D` by a positive mass, which is given to the infinity atom.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::moments::{first_repeat, MomentSequence};
use crate::numerics::{
    decide_equal, decide_positive, determinant, is_positive_definite_with, solve_linear_with,
    symmetric_eigenvalues, Definiteness, Matrix, Mode, Scalar, Tolerances,
};
use crate::polynomials::{elementary_symmetric, Degeneracy, Polynomial, RootReport};
use crate::tmp::{
    assemble_measure, densities_from_nodes, flat_extension, generating_polynomial,
    realize_roots, solve_tmp, Atom, Measure, Node, TmpVerdict,
};
use crate::verify::moments_of;

/// A validated instance: `D = d₁ + 2d₂ − 1`, distinct prescribed nodes, and
/// `M_⌊D/2⌋` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct PrescribedProblem {
    gamma: MomentSequence,
    prescribed: Vec<Scalar>,
    d2: usize,
    allow_infinity: bool,
}

impl PrescribedProblem {
    pub fn new(
        gamma: MomentSequence,
        prescribed: Vec<Scalar>,
        d2: usize,
        allow_infinity: bool,
        tol: &Tolerances,
    ) -> Result<PrescribedProblem> {
        let d1 = prescribed.len();
        if d2 == 0 || gamma.degree() + 1 != d1 + 2 * d2 {
            return Err(Error::DegreeMismatch {
                degree: gamma.degree(),
                prescribed: d1,
                d2,
            });
        }
        validate_nodes_and_moments(&gamma, &prescribed, tol)?;
        Ok(PrescribedProblem {
            gamma,
            prescribed,
            d2,
            allow_infinity,
        })
    }

    /// Infers `d₂ = (D + 1 − d₁)/2`, rejecting non-integral or zero values.
    pub fn infer(
        gamma: MomentSequence,
        prescribed: Vec<Scalar>,
        allow_infinity: bool,
        tol: &Tolerances,
    ) -> Result<PrescribedProblem> {
        let len = gamma.len();
        let d1 = prescribed.len();
        if len <= d1 || (len - d1) % 2 != 0 {
            return Err(Error::DegreeMismatch {
                degree: gamma.degree(),
                prescribed: d1,
                d2: len.saturating_sub(d1) / 2,
            });
        }
        PrescribedProblem::new(gamma, prescribed, (len - d1) / 2, allow_infinity, tol)
    }

    pub fn gamma(&self) -> &MomentSequence {
        &self.gamma
    }

    pub fn prescribed(&self) -> &[Scalar] {
        &self.prescribed
    }

    pub fn d1(&self) -> usize {
        self.prescribed.len()
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn allow_infinity(&self) -> bool {
        self.allow_infinity
    }

    pub fn degree(&self) -> usize {
        self.gamma.degree()
    }

    pub fn with_allow_infinity(mut self, allow: bool) -> PrescribedProblem {
        self.allow_infinity = allow;
        self
    }
}

fn validate_nodes_and_moments(
    gamma: &MomentSequence,
    prescribed: &[Scalar],
    tol: &Tolerances,
) -> Result<()> {
    if let Some(index) = first_repeat(prescribed) {
        return Err(Error::RepeatedPoint { index });
    }
    let m = gamma.moment_matrix(gamma.degree() / 2)?;
    if let Definiteness::No { minor_order } = is_positive_definite_with(&m, tol)? {
        return Err(Error::NotPositiveDefinite { minor_order });
    }
    Ok(())
}

/// Which condition decided a negative or indeterminate verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStage {
    /// `H_f(order)` is singular.
    LocalizingSingular { order: isize },
    /// The extended moment matrix has a non-positive leading minor.
    ExtendedNotPd { minor_order: usize },
    /// The recursion-generated moment at `index` differs from the input.
    TailMismatch { index: usize },
    /// `γ_D` minus the real part's top moment is not positive.
    InfinityMassNonpositive,
    /// Float root extraction of `g` was degenerate, or a root of `g`
    /// coincides with a prescribed node.
    RootDegeneracy(Degeneracy),
    /// Densities or moment reproduction failed numerically although every
    /// exact condition passed.
    VerificationFailed,
}

/// What witnesses a [`CertificateStage`].
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Matrix(Matrix),
    Values { expected: Scalar, computed: Scalar },
    Scalar(Scalar),
    Roots(Vec<f64>),
    Message(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub stage: CertificateStage,
    pub evidence: Evidence,
}

/// A constructed rule together with the polynomials that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub measure: Measure,
    /// Monic polynomial whose zeros are the non-prescribed real nodes.
    pub g: Polynomial,
    /// `f·g`, vanishing on every real node.
    pub h: Polynomial,
    /// The input moments extended by the recursion of `h`.
    pub extended: MomentSequence,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureVerdict {
    Exists(Quadrature),
    NotExists(Certificate),
    Indeterminate(Certificate),
}

impl QuadratureVerdict {
    pub fn is_exists(&self) -> bool {
        matches!(self, QuadratureVerdict::Exists(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            QuadratureVerdict::Exists(_) => None,
            QuadratureVerdict::NotExists(c) | QuadratureVerdict::Indeterminate(c) => Some(c),
        }
    }

    pub fn quadrature(&self) -> Option<&Quadrature> {
        match self {
            QuadratureVerdict::Exists(q) => Some(q),
            _ => None,
        }
    }
}

/// Float eigenvalues of a matrix met along the way, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub label: String,
    pub eigenvalues: Vec<f64>,
}

/// Which construction a [`StageTrace`] records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Real atoms only.
    Real,
    /// One atom at infinity, real part built on `(γ₀, …, γ_{D−2})`.
    Infinity,
    /// No prescribed nodes: flat extension of the classical problem.
    FlatExtension,
    /// A measure found on a lower-degree truncation.
    Truncation { degree: usize },
}

/// Intermediate objects of one construction attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    pub route: Route,
    pub localizing: Option<Matrix>,
    pub lambda: Vec<Scalar>,
    pub g: Option<Polynomial>,
    pub h: Option<Polynomial>,
    pub extended: Option<MomentSequence>,
    pub extended_matrix: Option<Matrix>,
    pub eigen_report: Vec<EigenReport>,
}

impl StageTrace {
    fn new(route: Route) -> StageTrace {
        StageTrace {
            route,
            localizing: None,
            lambda: Vec::new(),
            g: None,
            h: None,
            extended: None,
            extended_matrix: None,
            eigen_report: Vec::new(),
        }
    }

    fn report(&mut self, label: String, m: &Matrix) {
        if m.rows() == 0 {
            return;
        }
        if let Ok(eigenvalues) = symmetric_eigenvalues(m) {
            self.eigen_report.push(EigenReport { label, eigenvalues });
        }
    }
}

/// Verdict plus the trace of every construction attempted, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub verdict: QuadratureVerdict,
    pub stages: Vec<StageTrace>,
}

impl SolverOutcome {
    pub fn eigen_report(&self) -> impl Iterator<Item = &EigenReport> {
        self.stages.iter().flat_map(|s| s.eigen_report.iter())
    }

    pub fn stage(&self, route: Route) -> Option<&StageTrace> {
        self.stages.iter().find(|s| s.route == route)
    }
}

fn not_exists(stage: CertificateStage, evidence: Evidence) -> QuadratureVerdict {
    QuadratureVerdict::NotExists(Certificate { stage, evidence })
}

fn indeterminate(stage: CertificateStage, evidence: Evidence) -> QuadratureVerdict {
    QuadratureVerdict::Indeterminate(Certificate { stage, evidence })
}

/// `Σᵢ (−1)ⁱ eᵢ v^{(order)}_{start−i}`, the right-hand side of the system for
/// `λ`. Each entry equals a moment of the localized sequence `f·γ`.
fn lambda_rhs(
    gamma: &MomentSequence,
    e: &[Scalar],
    start: usize,
    order: usize,
) -> Result<Vec<Scalar>> {
    let mode = gamma.mode().join(e[0].mode());
    let mut acc = alloc::vec![Scalar::zero(mode); order + 1];
    for (i, ei) in e.iter().enumerate() {
        let v = gamma.moment_vector(start - i, order)?;
        let signed = if i % 2 == 0 { ei.clone() } else { -ei };
        for (a, vi) in acc.iter_mut().zip(&v) {
            *a = &*a + &signed * vi;
        }
    }
    Ok(acc)
}

/// Solves `H λ = rhs`, returning `None` when `H` is singular (exactly, or
/// below the pivot threshold in float mode).
fn solve_or_singular(h: &Matrix, rhs: &[Scalar], tol: &Tolerances) -> Result<Option<Vec<Scalar>>> {
    if h.rows() == 0 {
        return Ok(Some(Vec::new()));
    }
    if h.mode() == Mode::Exact && determinant(h)?.is_zero() {
        return Ok(None);
    }
    match solve_linear_with(h, rhs, tol) {
        Ok(x) => Ok(Some(x)),
        Err(Error::SingularMatrix) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Float roots of `g`, checked to be real, distinct, and away from the
/// prescribed nodes.
fn remaining_roots(
    g: &Polynomial,
    prescribed: &[Scalar],
    tol: &Tolerances,
) -> Result<core::result::Result<Vec<f64>, Certificate>> {
    let roots = match g.real_roots_with(tol)? {
        RootReport::AllRealDistinct(r) => r,
        RootReport::Degenerate(why) => {
            return Ok(Err(Certificate {
                stage: CertificateStage::RootDegeneracy(why),
                evidence: Evidence::Message(format!(
                    "roots of g are {why:?} in float; retry with tightened root tolerances"
                )),
            }))
        }
    };
    for &r in &roots {
        for x in prescribed {
            let x = x.to_f64();
            if (r - x).abs() <= tol.root_separation * x.abs().max(1.0) {
                return Ok(Err(Certificate {
                    stage: CertificateStage::RootDegeneracy(Degeneracy::RepeatedRoot),
                    evidence: Evidence::Roots(roots.clone()),
                }));
            }
        }
    }
    Ok(Ok(roots))
}

/// Real-atom construction on `gamma` with `order_d2` remaining nodes.
fn real_route(
    gamma: &MomentSequence,
    prescribed: &[Scalar],
    d2: usize,
    tol: &Tolerances,
) -> Result<(QuadratureVerdict, StageTrace)> {
    let d1 = prescribed.len();
    let mut trace = StageTrace::new(Route::Real);
    let f = Polynomial::from_roots(prescribed);
    let e = elementary_symmetric(prescribed);

    let order = d2 as isize - 1;
    let hf = gamma.localizing_matrix(&f, order)?;
    trace.report(format!("H_f({order})"), &hf);
    trace.localizing = Some(hf.clone());
    let rhs = lambda_rhs(gamma, &e, d1 + d2, d2 - 1)?;
    let Some(lambda) = solve_or_singular(&hf, &rhs, tol)? else {
        let verdict = not_exists(
            CertificateStage::LocalizingSingular { order },
            Evidence::Matrix(hf),
        );
        return Ok((verdict, trace));
    };
    let g = Polynomial::from_recursion(&lambda);
    let h = f.mul(&g);
    trace.lambda = lambda;
    trace.g = Some(g.clone());
    trace.h = Some(h.clone());

    // d₁−1 steps fill M_{d₁+d₂−1}; two more complete M_{d₁+d₂}.
    let extended = gamma.recursive_extend(&h, d1 + 1)?;
    let top = d1 + d2 - 1;
    let m = extended.moment_matrix(top)?;
    trace.report(format!("M_{top}"), &m);
    trace.extended = Some(extended.clone());
    trace.extended_matrix = Some(m.clone());
    if let Definiteness::No { minor_order } = is_positive_definite_with(&m, tol)? {
        let verdict = not_exists(
            CertificateStage::ExtendedNotPd { minor_order },
            Evidence::Matrix(m),
        );
        return Ok((verdict, trace));
    }

    let roots = match remaining_roots(&g, prescribed, tol)? {
        Ok(r) => r,
        Err(cert) => return Ok((QuadratureVerdict::Indeterminate(cert), trace)),
    };
    let mut nodes: Vec<Node> = prescribed.iter().map(Node::given).collect();
    nodes.extend(realize_roots(&g, &roots));
    let verdict = match assemble_measure(gamma, gamma, &nodes, None, tol) {
        Ok(measure) => QuadratureVerdict::Exists(crate::prescribed::Quadrature {
            measure,
            g,
            h,
            extended,
        }),
        Err(msg) => indeterminate(CertificateStage::VerificationFailed, Evidence::Message(msg)),
    };
    Ok((verdict, trace))
}

/// Construction with one atom at infinity: a `(d₁+d₂−1)`-atomic real part on
/// `(γ₀, …, γ_{D−2})` that reproduces `γ_{D−1}` and leaves a positive mass at
/// degree `D`.
fn infinity_route(
    gamma: &MomentSequence,
    prescribed: &[Scalar],
    d2: usize,
    tol: &Tolerances,
) -> Result<(QuadratureVerdict, StageTrace)> {
    let d1 = prescribed.len();
    let degree = gamma.degree();
    let mut trace = StageTrace::new(Route::Infinity);
    let f = Polynomial::from_roots(prescribed);
    let e = elementary_symmetric(prescribed);

    let order = d2 as isize - 2;
    let hf = gamma.localizing_matrix(&f, order)?;
    trace.report(format!("H_f({order})"), &hf);
    trace.localizing = Some(hf.clone());
    let rhs = if d2 >= 2 {
        lambda_rhs(gamma, &e, d1 + d2 - 1, d2 - 2)?
    } else {
        Vec::new()
    };
    let Some(lambda) = solve_or_singular(&hf, &rhs, tol)? else {
        let verdict = not_exists(
            CertificateStage::LocalizingSingular { order },
            Evidence::Matrix(hf),
        );
        return Ok((verdict, trace));
    };
    let g = Polynomial::from_recursion(&lambda);
    let h = f.mul(&g);
    trace.lambda = lambda;
    trace.g = Some(g.clone());
    trace.h = Some(h.clone());

    let head = gamma.truncate(degree - 2)?;
    let steps = core::cmp::max(2, d1.saturating_sub(1));
    let extended = head.recursive_extend(&h, steps)?;
    let top = d1 + d2 - 2;
    let m = extended.moment_matrix(top)?;
    trace.report(format!("M_{top}"), &m);
    trace.extended = Some(extended.clone());
    trace.extended_matrix = Some(m.clone());

    let ext = extended.as_slice();
    let g_in = gamma.as_slice();
    if !decide_equal(&ext[degree - 1], &g_in[degree - 1], tol) {
        let verdict = not_exists(
            CertificateStage::TailMismatch { index: degree - 1 },
            Evidence::Values {
                expected: g_in[degree - 1].clone(),
                computed: ext[degree - 1].clone(),
            },
        );
        return Ok((verdict, trace));
    }
    if let Definiteness::No { minor_order } = is_positive_definite_with(&m, tol)? {
        let verdict = not_exists(
            CertificateStage::ExtendedNotPd { minor_order },
            Evidence::Matrix(m),
        );
        return Ok((verdict, trace));
    }
    let alpha = &g_in[degree] - &ext[degree];
    if !decide_positive(&alpha, g_in[degree].to_f64(), tol) {
        let verdict = not_exists(
            CertificateStage::InfinityMassNonpositive,
            Evidence::Scalar(alpha),
        );
        return Ok((verdict, trace));
    }

    let roots = match remaining_roots(&g, prescribed, tol)? {
        Ok(r) => r,
        Err(cert) => return Ok((QuadratureVerdict::Indeterminate(cert), trace)),
    };
    let mut nodes: Vec<Node> = prescribed.iter().map(Node::given).collect();
    nodes.extend(realize_roots(&g, &roots));
    let verdict = match assemble_measure(gamma, &head, &nodes, Some(alpha), tol) {
        Ok(measure) => QuadratureVerdict::Exists(Quadrature {
            measure,
            g,
            h,
            extended,
        }),
        Err(msg) => indeterminate(CertificateStage::VerificationFailed, Evidence::Message(msg)),
    };
    Ok((verdict, trace))
}

/// No prescribed nodes: extend `(γ₀, …, γ_{D−1})` flatly with `γ_D` as the
/// free odd moment and solve the classical problem.
fn flat_route(gamma: &MomentSequence, tol: &Tolerances) -> Result<(QuadratureVerdict, StageTrace)> {
    let degree = gamma.degree();
    let mut trace = StageTrace::new(Route::FlatExtension);
    let head = gamma.truncate(degree - 1)?;
    let extended = flat_extension(&head, &gamma.as_slice()[degree], tol)?;
    trace.extended = Some(extended.clone());
    let verdict = match solve_tmp(&extended, tol) {
        Ok(TmpVerdict::Unique(measure)) => {
            let g = generating_polynomial(&extended, tol)?;
            trace.g = Some(g.clone());
            trace.h = Some(g.clone());
            QuadratureVerdict::Exists(Quadrature {
                measure,
                h: g.clone(),
                g,
                extended,
            })
        }
        Ok(other) => indeterminate(
            CertificateStage::VerificationFailed,
            Evidence::Message(format!("flat extension did not yield a unique measure: {other:?}")),
        ),
        Err(Error::Indeterminate(msg)) => {
            indeterminate(CertificateStage::VerificationFailed, Evidence::Message(msg))
        }
        Err(e) => return Err(e),
    };
    Ok((verdict, trace))
}

/// Real atoms only: decides existence of a `(d₁+d₂)`-atomic representing
/// measure containing the prescribed nodes and constructs it.
pub fn solve_prescribed_real(problem: &PrescribedProblem, tol: &Tolerances) -> Result<SolverOutcome> {
    let (verdict, trace) = if problem.d1() == 0 {
        flat_route(&problem.gamma, tol)?
    } else {
        real_route(&problem.gamma, &problem.prescribed, problem.d2, tol)?
    };
    Ok(SolverOutcome {
        verdict,
        stages: alloc::vec![trace],
    })
}

/// Real atoms first; if that is impossible, tries the construction with the
/// evaluation at infinity as one atom.
pub fn solve_prescribed_generalized(
    problem: &PrescribedProblem,
    tol: &Tolerances,
) -> Result<SolverOutcome> {
    let mut outcome = solve_prescribed_real(problem, tol)?;
    if !matches!(outcome.verdict, QuadratureVerdict::NotExists(_)) {
        return Ok(outcome);
    }
    let (verdict, trace) = infinity_route(&problem.gamma, &problem.prescribed, problem.d2, tol)?;
    outcome.verdict = verdict;
    outcome.stages.push(trace);
    Ok(outcome)
}

/// Dispatches on the problem's `allow_infinity` flag.
pub fn solve(problem: &PrescribedProblem, tol: &Tolerances) -> Result<SolverOutcome> {
    if problem.allow_infinity {
        solve_prescribed_generalized(problem, tol)
    } else {
        solve_prescribed_real(problem, tol)
    }
}

/// Checks whether `measure` (found on a truncation) also represents the
/// moments above `from_index`, up to an infinity mass `α ≥ 0` at the top.
/// Returns the measure extended by the infinity atom when needed and
/// allowed, or the first mismatching index.
fn extend_to_full(
    gamma: &MomentSequence,
    measure: &Measure,
    from_index: usize,
    allow_infinity: bool,
    tol: &Tolerances,
) -> core::result::Result<Measure, Certificate> {
    let degree = gamma.degree();
    let moments = moments_of(measure, degree);
    let (target, got) = (gamma.as_slice(), moments.as_slice());
    for i in from_index..degree {
        if !decide_equal(&target[i], &got[i], tol) {
            return Err(Certificate {
                stage: CertificateStage::TailMismatch { index: i },
                evidence: Evidence::Values {
                    expected: target[i].clone(),
                    computed: got[i].clone(),
                },
            });
        }
    }
    let alpha = &target[degree] - &got[degree];
    if decide_equal(&target[degree], &got[degree], tol) {
        return Ok(measure.clone());
    }
    if allow_infinity && decide_positive(&alpha, target[degree].to_f64(), tol) {
        return measure.with_atom(Atom::Infinity, alpha.clone()).map_err(|e| Certificate {
            stage: CertificateStage::VerificationFailed,
            evidence: Evidence::Message(format!("{e}")),
        });
    }
    Err(Certificate {
        stage: if alpha.is_positive() {
            CertificateStage::TailMismatch { index: degree }
        } else {
            CertificateStage::InfinityMassNonpositive
        },
        evidence: Evidence::Values {
            expected: target[degree].clone(),
            computed: got[degree].clone(),
        },
    })
}

/// Finds the least number of atoms of a representing measure containing the
/// prescribed nodes by solving successively larger truncations
/// `(γ₀, …, γ_{d₁+2i−1})`, `i = 0, 1, …`, and keeping the first measure that
/// also represents the remaining moments (up to an infinity mass at the top
/// degree when `allow_infinity`). The truncation of full degree is answered
/// by the regular solver. Returns the atom count with the outcome.
pub fn search_minimal(
    gamma: &MomentSequence,
    prescribed: &[Scalar],
    allow_infinity: bool,
    tol: &Tolerances,
) -> Result<(usize, SolverOutcome)> {
    let d1 = prescribed.len();
    let degree = gamma.degree();
    if degree < d1 + 1 {
        return Err(Error::DegreeTooHigh {
            degree: d1 + 1,
            max: degree,
        });
    }
    if let Some(index) = first_repeat(prescribed) {
        return Err(Error::RepeatedPoint { index });
    }

    let mut last: Option<(usize, SolverOutcome)> = None;

    // i = 0: the prescribed nodes alone
    if d1 > 0 {
        let mut trace = StageTrace::new(Route::Truncation { degree: d1 - 1 });
        let head = gamma.truncate(d1 - 1)?;
        let verdict = match densities_from_nodes(&head, prescribed) {
            Ok(rho) if rho.iter().all(Scalar::is_positive) => {
                let atoms = prescribed.iter().cloned().map(Atom::Real).zip(rho).collect();
                let measure = Measure::new(atoms)?;
                match extend_to_full(gamma, &measure, d1, allow_infinity, tol) {
                    Ok(full) => {
                        let f = Polynomial::from_roots(prescribed);
                        trace.h = Some(f.clone());
                        let count = full.len();
                        let outcome = SolverOutcome {
                            verdict: QuadratureVerdict::Exists(Quadrature {
                                measure: full,
                                g: Polynomial::one(Mode::Exact),
                                h: f,
                                extended: gamma.clone(),
                            }),
                            stages: alloc::vec![trace],
                        };
                        return Ok((count, outcome));
                    }
                    Err(cert) => QuadratureVerdict::NotExists(cert),
                }
            }
            Ok(rho) => not_exists(
                CertificateStage::VerificationFailed,
                Evidence::Message(format!("non-positive density on prescribed nodes: {rho:?}")),
            ),
            Err(e) => return Err(e),
        };
        last = Some((
            d1,
            SolverOutcome {
                verdict,
                stages: alloc::vec![trace],
            },
        ));
    }

    let mut i = 1;
    while d1 + 2 * i - 1 <= degree {
        let trunc_degree = d1 + 2 * i - 1;
        if trunc_degree == degree {
            let problem =
                PrescribedProblem::new(gamma.clone(), prescribed.to_vec(), i, allow_infinity, tol)?;
            let outcome = solve(&problem, tol)?;
            let count = outcome
                .verdict
                .quadrature()
                .map_or(d1 + i, |q| q.measure.len());
            return Ok((count, outcome));
        }
        let truncated = gamma.truncate(trunc_degree)?;
        // A truncation whose moment matrix is not positive definite has no
        // representing measure, and neither has any longer one.
        let problem = match PrescribedProblem::new(truncated, prescribed.to_vec(), i, false, tol) {
            Ok(p) => p,
            Err(Error::NotPositiveDefinite { .. }) if last.is_some() => break,
            Err(e) => return Err(e),
        };
        let mut outcome = solve_prescribed_real(&problem, tol)?;
        for stage in &mut outcome.stages {
            stage.route = Route::Truncation {
                degree: trunc_degree,
            };
        }
        match &outcome.verdict {
            QuadratureVerdict::Exists(q) => {
                match extend_to_full(gamma, &q.measure, trunc_degree + 1, allow_infinity, tol) {
                    Ok(full) => {
                        let count = full.len();
                        let mut quadrature = q.clone();
                        quadrature.measure = full;
                        outcome.verdict = QuadratureVerdict::Exists(quadrature);
                        return Ok((count, outcome));
                    }
                    Err(cert) => outcome.verdict = QuadratureVerdict::NotExists(cert),
                }
            }
            QuadratureVerdict::Indeterminate(_) => return Ok((d1 + i, outcome)),
            QuadratureVerdict::NotExists(_) => {}
        }
        last = Some((d1 + i, outcome));
        i += 1;
    }
    last.ok_or(Error::DegreeTooHigh {
        degree: d1 + 1,
        max: degree,
    })
}

/// For a single prescribed node `x₁`: the real roots in `y` of
/// `F(x₁, y) = det H_{(x−x₁)(x−y)}(d₂−1)`, found by sampling `F(x₁, ·)` at
/// `d₂+1` integer points, interpolating exactly, and extracting roots.
pub fn determinantal_cross_check(
    gamma: &MomentSequence,
    x1: &Scalar,
    d2: usize,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    if d2 == 0 || 2 * d2 > gamma.degree() {
        return Err(Error::OrderTooHigh {
            order: d2 as isize - 1,
            max: (gamma.degree() as isize - 2).div_euclid(2),
        });
    }
    let mode = gamma.mode().join(x1.mode());
    let f = Polynomial::from_roots(core::slice::from_ref(x1));
    let hf = gamma.localizing_matrix(&f, d2 as isize - 1)?;
    if determinant(&hf)?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let samples: Vec<Scalar> = (0..=d2).map(|k| Scalar::from_int(k as i64, mode)).collect();
    let values = samples
        .iter()
        .map(|y| {
            let fy = Polynomial::from_roots(&[x1.clone(), y.clone()]);
            determinant(&gamma.localizing_matrix(&fy, d2 as isize - 1)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let v = Matrix::from_fn(d2 + 1, d2 + 1, |i, j| samples[i].pow(j as u32));
    let coeffs = solve_linear_with(&v, &values, tol)?;
    let lead = coeffs[d2].clone();
    if lead.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let monic = Polynomial::new(coeffs.iter().map(|c| c / &lead).collect());
    match monic.real_roots_with(tol)? {
        RootReport::AllRealDistinct(r) => Ok(r),
        RootReport::Degenerate(why) => Err(Error::Indeterminate(format!(
            "roots of F(x1, y) are {why:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn int(n: i64) -> Scalar {
        Scalar::from(n)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn factorials(n: usize) -> MomentSequence {
        let mut v = Vec::new();
        let mut acc = 1i64;
        for i in 0..n {
            if i > 0 {
                acc *= i as i64;
            }
            v.push(acc);
        }
        MomentSequence::from_ints(&v).unwrap()
    }

    #[test]
    fn problem_validation() {
        let g = factorials(10);
        assert!(matches!(
            PrescribedProblem::new(g.clone(), alloc::vec![int(1), int(11)], 3, false, &tol()),
            Err(Error::DegreeMismatch { .. })
        ));
        assert_eq!(
            PrescribedProblem::new(g.clone(), alloc::vec![int(1), int(1)], 4, false, &tol()),
            Err(Error::RepeatedPoint { index: 1 })
        );
        let p = PrescribedProblem::infer(g.clone(), alloc::vec![int(1), int(11)], false, &tol())
            .unwrap();
        assert_eq!(p.d2(), 4);
        assert!(PrescribedProblem::infer(g, alloc::vec![int(1)], false, &tol()).is_err());
        let bad = MomentSequence::from_ints(&[1, 0, 0, 0]).unwrap();
        assert!(matches!(
            PrescribedProblem::new(bad, alloc::vec![int(1), int(2)], 1, false, &tol()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn rhs_equals_localized_tail() {
        let g = factorials(10);
        let pts = [q(1, 3), int(11)];
        let f = Polynomial::from_roots(&pts);
        let loc = g.localize(&f).unwrap();
        let rhs = lambda_rhs(&g, &elementary_symmetric(&pts), 6, 3).unwrap();
        assert_eq!(rhs, loc.values[4..8]);
        assert_eq!(rhs, [int(-552), int(-2680), int(-14160), int(-75600)]);
    }

    #[test]
    fn nonexistence_example() {
        let p = PrescribedProblem::new(factorials(10), alloc::vec![q(1, 3), int(11)], 4, false, &tol())
            .unwrap();
        let out = solve_prescribed_real(&p, &tol()).unwrap();
        let cert = out.verdict.certificate().unwrap();
        assert_eq!(cert.stage, CertificateStage::ExtendedNotPd { minor_order: 6 });
        let trace = out.stage(Route::Real).unwrap();
        assert_eq!(
            trace.extended.as_ref().unwrap().as_slice()[10],
            q(492324551232, 137503)
        );
    }

    #[test]
    fn generalized_nonexistence_example() {
        let p = PrescribedProblem::new(factorials(10), alloc::vec![q(1, 3), int(11)], 4, true, &tol())
            .unwrap();
        let out = solve_prescribed_generalized(&p, &tol()).unwrap();
        let cert = out.verdict.certificate().unwrap();
        assert_eq!(cert.stage, CertificateStage::TailMismatch { index: 8 });
        assert_eq!(
            cert.evidence,
            Evidence::Values {
                expected: int(40320),
                computed: q(73385484, 1861)
            }
        );
    }

    #[test]
    fn existence_example() {
        let p = PrescribedProblem::new(factorials(10), alloc::vec![int(1), int(11)], 4, false, &tol())
            .unwrap();
        let out = solve_prescribed_real(&p, &tol()).unwrap();
        let quad = out.verdict.quadrature().unwrap_or_else(|| panic!("{:?}", out.verdict));
        assert_eq!(
            quad.g.coeffs(),
            [
                q(220344, 1601),
                q(-1476768, 1601),
                q(753912, 1601),
                q(-95824, 1601),
                int(1)
            ]
        );
        assert_eq!(quad.measure.len(), 6);
        assert!(quad.measure.contains_node(&int(1)));
        assert!(quad.measure.contains_node(&int(11)));
    }

    #[test]
    fn generalized_small_example() {
        // δ₀ + δ₁ + ev_∞ in degree 4
        let g = MomentSequence::from_ints(&[2, 1, 1, 1, 2]).unwrap();
        let p = PrescribedProblem::new(g, alloc::vec![int(0)], 2, true, &tol()).unwrap();
        let real = solve_prescribed_real(&p, &tol()).unwrap();
        assert_eq!(
            real.verdict.certificate().unwrap().stage,
            CertificateStage::LocalizingSingular { order: 1 }
        );
        let out = solve_prescribed_generalized(&p, &tol()).unwrap();
        let quad = out.verdict.quadrature().expect("generalized measure exists");
        assert_eq!(
            quad.measure.atoms(),
            [
                (Atom::Real(int(0)), int(1)),
                (Atom::Real(int(1)), int(1)),
                (Atom::Infinity, int(1))
            ]
        );
    }

    #[test]
    fn no_prescribed_nodes_uses_flat_extension() {
        // δ₋₁ + δ₂ through degree 3
        let g = MomentSequence::from_ints(&[2, 1, 5, 7]).unwrap();
        let p = PrescribedProblem::new(g, alloc::vec![], 2, false, &tol()).unwrap();
        let out = solve_prescribed_real(&p, &tol()).unwrap();
        let quad = out.verdict.quadrature().unwrap();
        assert_eq!(
            quad.measure.atoms(),
            [(Atom::Real(int(-1)), int(1)), (Atom::Real(int(2)), int(1))]
        );
    }

    #[test]
    fn search_minimal_small_support() {
        // δ₁ + δ₂ padded to degree 5, node 1 prescribed
        let g = MomentSequence::from_ints(&[2, 3, 5, 9, 17, 33]).unwrap();
        let (count, out) = search_minimal(&g, &[int(1)], false, &tol()).unwrap();
        assert_eq!(count, 2);
        let m = &out.verdict.quadrature().unwrap().measure;
        assert_eq!(
            m.atoms(),
            [(Atom::Real(int(1)), int(1)), (Atom::Real(int(2)), int(1))]
        );
    }

    #[test]
    fn cross_check_single_atom_toy() {
        // γ from 2δ₃ plus δ₋₁ so that M₁ is positive definite
        let g = MomentSequence::new((0..3).map(|i| int(2 * 3i64.pow(i) + (-1i64).pow(i))).collect())
            .unwrap();
        let roots = determinantal_cross_check(&g, &int(3), 1, &tol()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn search_minimal_factorials_needs_full_support() {
        let (count, out) = search_minimal(&factorials(10), &[int(1), int(11)], false, &tol()).unwrap();
        assert_eq!(count, 6);
        assert!(out.verdict.is_exists());
        assert_eq!(out.stages[0].route, Route::Real);
    }

    #[test]
    fn cross_check_matches_g() {
        let g9 = factorials(9);
        let p = PrescribedProblem::new(factorials(10), alloc::vec![int(1)], 4, false, &tol());
        assert!(p.is_err());
        let p = PrescribedProblem::new(g9.clone(), alloc::vec![int(1)], 4, false, &tol()).unwrap();
        let out = solve_prescribed_real(&p, &tol()).unwrap();
        let g = out.stages[0].g.clone().unwrap();
        let RootReport::AllRealDistinct(expected) = g.real_roots().unwrap() else {
            panic!("g has degenerate roots");
        };
        let got = determinantal_cross_check(&g9, &int(1), 4, &tol()).unwrap();
        assert_eq!(got.len(), expected.len());
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}
