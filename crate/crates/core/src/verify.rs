//! Moments of measures, sequence comparison, and random test instances.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::numerics::{Mode, Scalar, Tolerances};
use crate::prescribed::PrescribedProblem;
use crate::tmp::{Atom, Measure};

/// Denominator of randomly drawn atoms and densities.
pub const GRID: i64 = 1000;

/// `γᵢ = Σ ρⱼ yⱼⁱ` for `i = 0..=degree`; an infinity atom contributes only to
/// `γ_degree`.
pub fn moments_of(measure: &Measure, degree: usize) -> MomentSequence {
    let mode = if measure.is_exact() { Mode::Exact } else { Mode::Float };
    let mut gamma = alloc::vec![Scalar::zero(mode); degree + 1];
    for (atom, rho) in measure.atoms() {
        match atom {
            Atom::Real(y) => {
                let mut term = rho.clone();
                for g in gamma.iter_mut() {
                    *g = &*g + &term;
                    term = &term * y;
                }
            }
            Atom::Infinity => gamma[degree] = &gamma[degree] + rho,
        }
    }
    MomentSequence::new(gamma).expect("degree + 1 entries")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    Match,
    /// First differing index and `actual − expected` there.
    Mismatch { index: usize, delta: Scalar },
}

/// Entrywise comparison. Exact pairs must be equal; any float pair must
/// agree within `tol` relative to `max(1, |expectedᵢ|)`.
pub fn compare(expected: &MomentSequence, actual: &MomentSequence, tol: f64) -> Result<Comparison> {
    if expected.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: expected.len(),
            right: actual.len(),
        });
    }
    for (index, (e, a)) in expected.as_slice().iter().zip(actual.as_slice()).enumerate() {
        let equal = match (e, a) {
            (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
            _ => {
                let (x, y) = (e.to_f64(), a.to_f64());
                (x - y).abs() <= tol * x.abs().max(1.0)
            }
        };
        if !equal {
            return Ok(Comparison::Mismatch {
                index,
                delta: a - e,
            });
        }
    }
    Ok(Comparison::Match)
}

/// Parameters of a random instance. Atoms are drawn from `atom_range` and
/// densities from `density_range` on the grid `k/1000`; the first
/// `prescribe` atoms become prescribed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub atom_count: usize,
    pub atom_range: (f64, f64),
    pub density_range: (f64, f64),
    pub prescribe: usize,
    pub include_infinity: bool,
    pub seed: u64,
}

impl Default for InstanceSpec {
    fn default() -> InstanceSpec {
        InstanceSpec {
            atom_count: 4,
            atom_range: (-5.0, 5.0),
            density_range: (0.1, 2.0),
            prescribe: 1,
            include_infinity: false,
            seed: 0,
        }
    }
}

fn grid_bounds(range: (f64, f64)) -> (i64, i64) {
    let lo = Float::ceil(range.0 * GRID as f64) as i64;
    let hi = Float::floor(range.1 * GRID as f64) as i64;
    (lo, hi)
}

impl InstanceSpec {
    fn validate(&self) -> Result<()> {
        let infeasible = |msg: &str| Err(Error::InfeasibleSpec(msg.into()));
        if self.atom_count == 0 {
            return infeasible("atom_count must be positive");
        }
        if self.prescribe > self.atom_count {
            return infeasible("prescribe exceeds atom_count");
        }
        if !(self.atom_range.0 < self.atom_range.1) {
            return infeasible("atom_range is empty");
        }
        if !(0.0 < self.density_range.0 && self.density_range.0 <= self.density_range.1) {
            return infeasible("density_range must be a positive interval");
        }
        if self.include_infinity && self.prescribe == 0 {
            return infeasible("an infinity atom needs at least one prescribed node");
        }
        let (lo, hi) = grid_bounds(self.density_range);
        if lo > hi {
            return infeasible("density_range contains no grid point");
        }
        Ok(())
    }

    /// `(d₂, D)` implied by the spec: the atoms beyond the prescribed ones
    /// (the infinity atom included) number `d₂`, padded to 1 when every atom
    /// is prescribed, and `D = d₁ + 2d₂ − 1`.
    pub fn implied_degree(&self) -> (usize, usize) {
        let total = self.atom_count + usize::from(self.include_infinity);
        let d2 = (total - self.prescribe).max(1);
        (d2, self.prescribe + 2 * d2 - 1)
    }
}

/// Draws a measure per `spec`, its exact moments through the implied degree,
/// and the matching prescribed problem. Deterministic in `spec.seed`.
pub fn random_instance(spec: &InstanceSpec) -> Result<(Measure, MomentSequence, PrescribedProblem)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = grid_bounds(spec.atom_range);
    let width = spec.atom_range.1 - spec.atom_range.0;
    let min_gap = (Float::ceil(width * 1e-3 * GRID as f64) as i64).max(1);
    if lo > hi || (hi - lo) / min_gap + 1 < spec.atom_count as i64 {
        return Err(Error::InfeasibleSpec(format!(
            "cannot place {} separated atoms in {:?}",
            spec.atom_count, spec.atom_range
        )));
    }

    let mut ks: Vec<i64> = Vec::with_capacity(spec.atom_count);
    let mut attempts = 0usize;
    while ks.len() < spec.atom_count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InfeasibleSpec("atom placement did not terminate".into()));
        }
        let k = rng.gen_range(lo..=hi);
        if ks.iter().all(|&other| (other - k).abs() >= min_gap) {
            ks.push(k);
        }
    }
    let (dlo, dhi) = grid_bounds(spec.density_range);
    let mut density = || Scalar::ratio(rng.gen_range(dlo..=dhi), GRID);

    let nodes: Vec<Scalar> = ks.iter().map(|&k| Scalar::ratio(k, GRID)).collect();
    let mut atoms: Vec<(Atom, Scalar)> = nodes
        .iter()
        .cloned()
        .map(|x| (Atom::Real(x), density()))
        .collect();
    if spec.include_infinity {
        atoms.push((Atom::Infinity, density()));
    }
    let measure = Measure::new(atoms)?;

    let (d2, degree) = spec.implied_degree();
    let gamma = moments_of(&measure, degree);
    let prescribed = nodes[..spec.prescribe].to_vec();
    let problem = PrescribedProblem::new(
        gamma.clone(),
        prescribed,
        d2,
        spec.include_infinity,
        &Tolerances::default(),
    )
    .map_err(|e| Error::InfeasibleSpec(format!("generated moments are not admissible: {e}")))?;
    Ok((measure, gamma, problem))
}
