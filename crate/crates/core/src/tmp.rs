//! The truncated Hamburger moment problem on ℝ: rank, positive recursive
//! generation, the generating polynomial, and construction of the unique
//! minimal measure (or a flat extension when the moment matrix is
//! nonsingular).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::moments::{first_repeat, MomentSequence};
use crate::numerics::{
    decide_equal, is_positive_definite_with, solve_linear_with, Definiteness, Matrix, Mode,
    Scalar, Tolerances,
};
use crate::polynomials::{exact_root_near, refine_root, Polynomial, RootReport};
use crate::verify::{compare, moments_of, Comparison};

/// Largest denominator tried when identifying a float root with an exact
/// rational zero.
pub const ROOT_RECOVERY_MAX_DENOMINATOR: u64 = 1_000_000_000;

/// Support point of a (generalized) atomic measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Real(Scalar),
    /// Evaluation at infinity: contributes only to the top-degree moment.
    Infinity,
}

impl Atom {
    pub fn position(&self) -> Option<&Scalar> {
        match self {
            Atom::Real(x) => Some(x),
            Atom::Infinity => None,
        }
    }
}

/// Finitely atomic positive measure, possibly with one infinity atom.
/// Atoms are sorted ascending with infinity last.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    atoms: Vec<(Atom, Scalar)>,
}

impl Measure {
    pub fn new(mut atoms: Vec<(Atom, Scalar)>) -> Result<Measure> {
        if atoms.iter().any(|(_, rho)| !rho.is_positive()) {
            return Err(Error::InvalidMeasure("densities must be positive"));
        }
        if atoms.iter().filter(|(a, _)| *a == Atom::Infinity).count() > 1 {
            return Err(Error::InvalidMeasure("at most one infinity atom"));
        }
        atoms.sort_by(|(a, _), (b, _)| match (a, b) {
            (Atom::Real(x), Atom::Real(y)) => x.partial_cmp(y).unwrap_or(Ordering::Equal),
            (Atom::Real(_), Atom::Infinity) => Ordering::Less,
            (Atom::Infinity, Atom::Real(_)) => Ordering::Greater,
            (Atom::Infinity, Atom::Infinity) => Ordering::Equal,
        });
        let reals: Vec<Scalar> = atoms.iter().filter_map(|(a, _)| a.position().cloned()).collect();
        if first_repeat(&reals).is_some() {
            return Err(Error::InvalidMeasure("real atoms must be distinct"));
        }
        Ok(Measure { atoms })
    }

    pub fn atoms(&self) -> &[(Atom, Scalar)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn real_nodes(&self) -> Vec<Scalar> {
        self.atoms.iter().filter_map(|(a, _)| a.position().cloned()).collect()
    }

    pub fn densities(&self) -> Vec<Scalar> {
        self.atoms.iter().map(|(_, r)| r.clone()).collect()
    }

    pub fn infinity_mass(&self) -> Option<&Scalar> {
        self.atoms
            .iter()
            .find(|(a, _)| *a == Atom::Infinity)
            .map(|(_, r)| r)
    }

    /// True when every position and density is exact.
    pub fn is_exact(&self) -> bool {
        self.atoms
            .iter()
            .all(|(a, r)| r.is_exact() && a.position().is_none_or(Scalar::is_exact))
    }

    /// The same measure with an extra atom.
    pub fn with_atom(&self, atom: Atom, density: Scalar) -> Result<Measure> {
        let mut atoms = self.atoms.clone();
        atoms.push((atom, density));
        Measure::new(atoms)
    }

    pub fn contains_node(&self, x: &Scalar) -> bool {
        self.atoms.iter().any(|(a, _)| a.position() == Some(x))
    }
}

/// Why a sequence fails to be positively recursively generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrgViolation {
    /// `M_{r−1}` is not positive definite; the 1-based order of the first
    /// non-positive leading minor.
    MinorNotPositive { minor_order: usize },
    /// The generating recursion fails at moment index `index`.
    RecursionFails { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrgStatus {
    Yes,
    No(PrgViolation),
}

/// Solution of the truncated Hamburger problem.
#[derive(Debug, Clone, PartialEq)]
pub enum TmpVerdict {
    Unique(Measure),
    InfinitelyMany { rank: usize },
    NotRepresentable(PrgViolation),
}

fn require_even_positive(gamma: &MomentSequence) -> Result<usize> {
    let degree = gamma.degree();
    if degree % 2 != 0 {
        return Err(Error::OddDegree { degree });
    }
    if !gamma.as_slice()[0].is_positive() {
        return Err(Error::NonpositiveMass);
    }
    Ok(degree / 2)
}

/// `d+1` if `M_d` is nonsingular, otherwise the least `i` with
/// `v_i ∈ span(v_0, …, v_{i−1})` among the columns of `M_d`.
pub fn rank_of_sequence(gamma: &MomentSequence, tol: &Tolerances) -> Result<usize> {
    let d = require_even_positive(gamma)?;
    let m = gamma.moment_matrix(d)?;
    if m.rank(tol) == d + 1 {
        return Ok(d + 1);
    }
    for i in 1..=d {
        let cols = Matrix::from_fn(d + 1, i + 1, |r, c| m[(r, c)].clone());
        if cols.rank(tol) <= i {
            return Ok(i);
        }
    }
    Ok(d + 1)
}

/// `(φ₀, …, φ_{r−1}) = M_{r−1}⁻¹ v_r^{(r−1)}`.
fn recursion_coefficients(gamma: &MomentSequence, r: usize, tol: &Tolerances) -> Result<Vec<Scalar>> {
    let m = gamma.moment_matrix(r - 1)?;
    let v = gamma.moment_vector(r, r - 1)?;
    solve_linear_with(&m, &v, tol)
}

pub fn check_prg(gamma: &MomentSequence, tol: &Tolerances) -> Result<PrgStatus> {
    let d = require_even_positive(gamma)?;
    let r = rank_of_sequence(gamma, tol)?;
    if let Definiteness::No { minor_order } =
        is_positive_definite_with(&gamma.moment_matrix(r - 1)?, tol)?
    {
        return Ok(PrgStatus::No(PrgViolation::MinorNotPositive { minor_order }));
    }
    if r == d + 1 {
        return Ok(PrgStatus::Yes);
    }
    let phi = recursion_coefficients(gamma, r, tol)?;
    let g = gamma.as_slice();
    for j in r..=2 * d {
        let predicted = phi
            .iter()
            .enumerate()
            .fold(Scalar::zero(gamma.mode()), |acc, (i, p)| acc + p * &g[j - r + i]);
        if !decide_equal(&predicted, &g[j], tol) {
            return Ok(PrgStatus::No(PrgViolation::RecursionFails { index: j }));
        }
    }
    Ok(PrgStatus::Yes)
}

/// The generating polynomial `x^r − Σ φᵢ xⁱ` of a singular prg sequence.
pub fn generating_polynomial(gamma: &MomentSequence, tol: &Tolerances) -> Result<Polynomial> {
    let d = require_even_positive(gamma)?;
    let r = rank_of_sequence(gamma, tol)?;
    if r == d + 1 {
        return Err(Error::NotSingular);
    }
    if check_prg(gamma, tol)? != PrgStatus::Yes {
        return Err(Error::NotPrg);
    }
    Ok(Polynomial::from_recursion(&recursion_coefficients(gamma, r, tol)?))
}

/// Solves the Vandermonde system `V ρ = (γ₀, …, γ_{r−1})` for the given
/// nodes. With float nodes or moments the system is solved exactly over
/// their binary values and the densities are returned as floats.
pub fn densities_from_nodes(gamma: &MomentSequence, nodes: &[Scalar]) -> Result<Vec<Scalar>> {
    let r = nodes.len();
    if r > gamma.len() {
        return Err(Error::IndexOutOfRange {
            index: r,
            len: gamma.len(),
        });
    }
    let mode = nodes.iter().fold(gamma.mode(), |m, s| m.join(s.mode()));
    let exact_nodes: Vec<Scalar> = nodes.iter().map(|x| x.to_mode(Mode::Exact)).collect();
    let rhs: Vec<Scalar> = gamma.as_slice()[..r]
        .iter()
        .map(|g| g.to_mode(Mode::Exact))
        .collect();
    let v = Matrix::from_fn(r, r, |i, j| exact_nodes[j].pow(i as u32));
    let rho = solve_linear_with(&v, &rhs, &Tolerances::default())?;
    Ok(rho.into_iter().map(|x| x.to_mode(mode)).collect())
}

/// Bits kept by the Newton polish of irrational roots.
const ROOT_POLISH_BITS: u32 = 320;

/// A node as reported (`shown`) and the exact value used for densities and
/// verification (`precise`): the node itself when exact, otherwise a
/// polished dyadic approximation of the root.
#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub shown: Scalar,
    pub precise: Scalar,
}

impl Node {
    pub fn given(x: &Scalar) -> Node {
        Node {
            shown: x.clone(),
            precise: x.to_mode(Mode::Exact),
        }
    }
}

/// Turns float roots of `p` into nodes, replacing each by an exact rational
/// when one is an exact zero of `p` nearby.
pub(crate) fn realize_roots(p: &Polynomial, roots: &[f64]) -> Vec<Node> {
    let mut nodes: Vec<Node> = roots
        .iter()
        .map(|&x| match exact_root_near(p, x, ROOT_RECOVERY_MAX_DENOMINATOR) {
            Some(q) => Node::given(&Scalar::Exact(q)),
            None => {
                let precise = refine_root(p, x, ROOT_POLISH_BITS)
                    .map_or(Scalar::Float(x), Scalar::Exact);
                Node {
                    shown: Scalar::Float(precise.to_f64()),
                    precise,
                }
            }
        })
        .collect();
    // Two estimates drawn to the same root: keep the unrefined values.
    let collides: Vec<bool> = (0..nodes.len())
        .map(|i| (0..nodes.len()).any(|j| j != i && nodes[j].precise == nodes[i].precise))
        .collect();
    for (i, node) in nodes.iter_mut().enumerate() {
        if collides[i] {
            *node = Node {
                shown: Scalar::Float(roots[i]),
                precise: BigRational::from_float(roots[i]).map_or(Scalar::Float(roots[i]), Scalar::Exact),
            };
        }
    }
    nodes
}

/// Computes densities on `nodes` from `density_moments`, checks their
/// positivity, adds the optional infinity mass, and verifies the result
/// reproduces `target` through degree `target.degree()`.
pub(crate) fn assemble_measure(
    target: &MomentSequence,
    density_moments: &MomentSequence,
    nodes: &[Node],
    infinity: Option<Scalar>,
    tol: &Tolerances,
) -> core::result::Result<Measure, String> {
    let precise: Vec<Scalar> = nodes.iter().map(|n| n.precise.clone()).collect();
    let rho = densities_from_nodes(&density_moments.to_mode(Mode::Exact), &precise)
        .map_err(|e| format!("{e}"))?;
    let mass_scale = target.as_slice()[0].to_f64().abs();
    for (i, r) in rho.iter().enumerate() {
        if !(r.is_positive() && r.to_f64() >= tol.density * mass_scale) {
            return Err(format!("density {i} is not positive ({r})"));
        }
    }

    let mut exact_atoms: Vec<(Atom, Scalar)> = precise
        .into_iter()
        .map(Atom::Real)
        .zip(rho.iter().cloned())
        .collect();
    if let Some(alpha) = &infinity {
        exact_atoms.push((Atom::Infinity, alpha.to_mode(Mode::Exact)));
    }
    let reproduced = moments_of(
        &Measure::new(exact_atoms).map_err(|e| format!("{e}"))?,
        target.degree(),
    );
    let mode = nodes
        .iter()
        .fold(density_moments.mode(), |m, n| m.join(n.shown.mode()));
    let verdict = if mode == Mode::Exact && target.mode() == Mode::Exact {
        compare(target, &reproduced, tol.moment_match)
    } else {
        compare(
            &target.to_mode(Mode::Float),
            &reproduced.to_mode(Mode::Float),
            tol.moment_match,
        )
    };
    if let Comparison::Mismatch { index, .. } = verdict.map_err(|e| format!("{e}"))? {
        return Err(format!("measure does not reproduce moment {index}"));
    }

    let mut atoms: Vec<(Atom, Scalar)> = nodes
        .iter()
        .map(|n| Atom::Real(n.shown.clone()))
        .zip(rho.into_iter().map(|r| r.to_mode(mode)))
        .collect();
    if let Some(alpha) = infinity {
        atoms.push((Atom::Infinity, alpha));
    }
    Measure::new(atoms).map_err(|e| format!("{e}"))
}

pub fn solve_tmp(gamma: &MomentSequence, tol: &Tolerances) -> Result<TmpVerdict> {
    let d = require_even_positive(gamma)?;
    let r = rank_of_sequence(gamma, tol)?;
    if let PrgStatus::No(violation) = check_prg(gamma, tol)? {
        return Ok(TmpVerdict::NotRepresentable(violation));
    }
    if r == d + 1 {
        return Ok(TmpVerdict::InfinitelyMany { rank: r });
    }
    let p = Polynomial::from_recursion(&recursion_coefficients(gamma, r, tol)?);
    let roots = match p.real_roots_with(tol)? {
        RootReport::AllRealDistinct(roots) => roots,
        RootReport::Degenerate(why) => {
            return Err(Error::Indeterminate(format!(
                "roots of the generating polynomial are degenerate in float ({why:?})"
            )))
        }
    };
    let nodes = realize_roots(&p, &roots);
    assemble_measure(gamma, gamma, &nodes, None, tol)
        .map(TmpVerdict::Unique)
        .map_err(Error::Indeterminate)
}

/// Appends `γ_{2d+1} = next_odd` and `γ_{2d+2} = vᵀ M_d⁻¹ v` with
/// `v = (γ_{d+1}, …, γ_{2d+1})`, producing a sequence of rank `d+1`.
pub fn flat_extension(
    gamma: &MomentSequence,
    next_odd: &Scalar,
    tol: &Tolerances,
) -> Result<MomentSequence> {
    let d = require_even_positive(gamma)?;
    let m = gamma.moment_matrix(d)?;
    if let Definiteness::No { minor_order } = is_positive_definite_with(&m, tol)? {
        return Err(Error::NotPositiveDefinite { minor_order });
    }
    let mut values = gamma.as_slice().to_vec();
    values.push(next_odd.clone());
    let v: Vec<Scalar> = values[d + 1..=2 * d + 1].to_vec();
    let w = solve_linear_with(&m, &v, tol)?;
    let mode = values.iter().fold(Mode::Exact, |md, s| md.join(s.mode()));
    let top = v
        .iter()
        .zip(&w)
        .fold(Scalar::zero(mode), |acc, (a, b)| acc + a * b);
    values.push(top);
    MomentSequence::new(values)
}
