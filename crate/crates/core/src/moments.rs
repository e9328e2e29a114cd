//! Moment sequences, their Riesz functional, Hankel moment and localizing
//! matrices, the banded elimination matrices `B_k`, and extension of a
//! sequence by a linear recursion.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Mode, Scalar};
use crate::polynomials::{elementary_symmetric, Polynomial};

/// A truncated moment sequence `(γ₀, …, γ_D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    gamma: Vec<Scalar>,
}

/// `f·γ`: the sequence `i ↦ L(f·xⁱ)` for `0 ≤ i ≤ D − deg f`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedSequence {
    pub base: MomentSequence,
    pub f: Polynomial,
    pub values: Vec<Scalar>,
}

impl LocalizedSequence {
    pub fn as_sequence(&self) -> MomentSequence {
        MomentSequence {
            gamma: self.values.clone(),
        }
    }
}

impl MomentSequence {
    pub fn new(gamma: Vec<Scalar>) -> Result<MomentSequence> {
        if gamma.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(MomentSequence { gamma })
    }

    pub fn from_ints(values: &[i64]) -> Result<MomentSequence> {
        MomentSequence::new(values.iter().map(|&v| Scalar::from(v)).collect())
    }

    pub fn degree(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    /// Always false; a moment sequence has at least `γ₀`.
    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn as_slice(&self) -> &[Scalar] {
        &self.gamma
    }

    pub fn into_vec(self) -> Vec<Scalar> {
        self.gamma
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.gamma.get(i)
    }

    pub fn mode(&self) -> Mode {
        self.gamma.iter().fold(Mode::Exact, |m, s| m.join(s.mode()))
    }

    pub fn to_mode(&self, mode: Mode) -> MomentSequence {
        MomentSequence {
            gamma: self.gamma.iter().map(|s| s.to_mode(mode)).collect(),
        }
    }

    /// `(γ₀, …, γ_degree)`.
    pub fn truncate(&self, degree: usize) -> Result<MomentSequence> {
        if degree > self.degree() {
            return Err(Error::IndexOutOfRange {
                index: degree,
                len: self.len(),
            });
        }
        Ok(MomentSequence {
            gamma: self.gamma[..=degree].to_vec(),
        })
    }

    /// The same sequence with `c` added to `γ_i`.
    pub fn with_added(&self, i: usize, c: &Scalar) -> Result<MomentSequence> {
        let mut gamma = self.gamma.clone();
        let slot = gamma.get_mut(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.len(),
        })?;
        *slot = &*slot + c;
        Ok(MomentSequence { gamma })
    }

    /// Riesz functional `L(p) = Σ pᵢ γᵢ`.
    pub fn riesz_eval(&self, p: &Polynomial) -> Result<Scalar> {
        if !p.is_zero() && p.degree() > self.degree() {
            return Err(Error::DegreeTooHigh {
                degree: p.degree(),
                max: self.degree(),
            });
        }
        let mode = self.mode().join(p.mode());
        Ok(p.coeffs()
            .iter()
            .zip(&self.gamma)
            .fold(Scalar::zero(mode), |acc, (c, g)| acc + c * g))
    }

    /// `(γᵢ, …, γ_{i+j})`, the `(j+1)`-vector starting at index `i`.
    pub fn moment_vector(&self, i: usize, j: usize) -> Result<Vec<Scalar>> {
        if i + j > self.degree() {
            return Err(Error::IndexOutOfRange {
                index: i + j,
                len: self.len(),
            });
        }
        Ok(self.gamma[i..=i + j].to_vec())
    }

    /// Hankel matrix `M_ℓ = (γ_{i+j})_{0 ≤ i,j ≤ ℓ}`.
    pub fn moment_matrix(&self, ell: usize) -> Result<Matrix> {
        if 2 * ell > self.degree() {
            return Err(Error::OrderTooHigh {
                order: ell as isize,
                max: (self.degree() / 2) as isize,
            });
        }
        Ok(Matrix::from_fn(ell + 1, ell + 1, |i, j| {
            self.gamma[i + j].clone()
        }))
    }

    pub fn localize(&self, f: &Polynomial) -> Result<LocalizedSequence> {
        let deg = f.degree();
        if deg > self.degree() {
            return Err(Error::DegreeTooHigh {
                degree: deg,
                max: self.degree(),
            });
        }
        let mode = self.mode().join(f.mode());
        let values = (0..=self.degree() - deg)
            .map(|i| self.riesz_eval(&f.mul(&Polynomial::monomial(i, mode))))
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalizedSequence {
            base: self.clone(),
            f: f.clone(),
            values,
        })
    }

    /// `H_f(ℓ)`, the `ℓ`-th moment matrix of `f·γ`. `ℓ = −1` yields the 0×0
    /// matrix.
    pub fn localizing_matrix(&self, f: &Polynomial, ell: isize) -> Result<Matrix> {
        let max = (self.degree() as isize - f.degree() as isize).div_euclid(2);
        if ell < -1 || ell > max {
            return Err(Error::OrderTooHigh { order: ell, max });
        }
        if ell == -1 {
            return Ok(Matrix::zeros(0, 0, self.mode().join(f.mode())));
        }
        self.localize(f)?.as_sequence().moment_matrix(ell as usize)
    }

    /// Appends `count` entries generated by the monic `h = x^r − Σ φᵢ xⁱ`:
    /// `γ_m = Σᵢ φᵢ γ_{m−r+i}`.
    pub fn recursive_extend(&self, h: &Polynomial, count: usize) -> Result<MomentSequence> {
        let phi = h.recursion_coefficients()?;
        let r = phi.len();
        if r > self.len() {
            return Err(Error::DegreeTooHigh {
                degree: r,
                max: self.len(),
            });
        }
        let mode = self.mode().join(h.mode());
        let mut gamma = self.gamma.clone();
        for _ in 0..count {
            let m = gamma.len();
            let next = phi
                .iter()
                .enumerate()
                .fold(Scalar::zero(mode), |acc, (i, p)| acc + p * &gamma[m - r + i]);
            gamma.push(next);
        }
        Ok(MomentSequence { gamma })
    }
}

/// `B_k ∈ ℝ^{(d−k+1)×(d+1)}` for `k` distinct points, with entries
/// `(−1)^{k+i−j} e_{k+i−j}` on the band `i ≤ j ≤ i+k` and zero elsewhere.
pub fn band_matrix(points: &[Scalar], d: usize) -> Result<Matrix> {
    let k = points.len();
    if k >= d {
        return Err(Error::TooManyPoints { points: k, order: d });
    }
    if let Some(index) = first_repeat(points) {
        return Err(Error::RepeatedPoint { index });
    }
    let e = elementary_symmetric(points);
    let mode = e[0].mode();
    Ok(Matrix::from_fn(d - k + 1, d + 1, |i, j| {
        if j < i || j > i + k {
            return Scalar::zero(mode);
        }
        let s = k + i - j;
        if s % 2 == 0 {
            e[s].clone()
        } else {
            -&e[s]
        }
    }))
}

/// Index of the first entry equal to an earlier one.
pub(crate) fn first_repeat(points: &[Scalar]) -> Option<usize> {
    (1..points.len()).find(|&i| points[..i].iter().any(|p| p == &points[i]))
}
