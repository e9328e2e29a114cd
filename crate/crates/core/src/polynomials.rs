//! Univariate polynomials with [`Scalar`] coefficients, stored lowest degree
//! first.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{hessenberg_eigenvalues, Matrix, Mode, Scalar, Tolerances};

/// Dense polynomial; `coeffs[i]` multiplies `xⁱ`. Trailing exact or float
/// zeros are stripped, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

/// Result of real-root extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum RootReport {
    /// All roots real and pairwise distinct, ascending.
    AllRealDistinct(Vec<f64>),
    Degenerate(Degeneracy),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    ComplexRoot,
    RepeatedRoot,
    NoConvergence,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Scalar>) -> Polynomial {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Polynomial {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Polynomial {
        Polynomial::new(vec![c])
    }

    pub fn one(mode: Mode) -> Polynomial {
        Polynomial::constant(Scalar::one(mode))
    }

    /// `xᵏ`.
    pub fn monomial(k: usize, mode: Mode) -> Polynomial {
        let mut coeffs = vec![Scalar::zero(mode); k + 1];
        coeffs[k] = Scalar::one(mode);
        Polynomial { coeffs }
    }

    /// Monic `x^r − Σ φᵢ xⁱ` from the recursion coefficients `φ`.
    pub fn from_recursion(phi: &[Scalar]) -> Polynomial {
        let mode = phi.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
        let mut coeffs: Vec<Scalar> = phi.iter().map(|p| -p).collect();
        coeffs.push(Scalar::one(mode));
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `xⁱ` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.mode()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn mode(&self) -> Mode {
        self.coeffs.iter().fold(Mode::Exact, |m, s| m.join(s.mode()))
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| match c {
            Scalar::Exact(q) => q.is_one(),
            Scalar::Float(x) => *x == 1.0,
        })
    }

    /// Recursion coefficients `φ` of a monic `x^r − Σ φᵢ xⁱ`.
    pub fn recursion_coefficients(&self) -> Result<Vec<Scalar>> {
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        Ok(self.coeffs[..self.degree()].iter().map(|c| -c).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mode = self.mode().join(x.mode());
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(mode), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Scalar::from_int(i as i64, c.mode()))
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mode = self.mode().join(rhs.mode());
        let mut out = vec![Scalar::zero(mode); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Monic polynomial `∏ (x − rᵢ)`; the coefficient of `x^{n−i}` is `(−1)ⁱ eᵢ`.
    pub fn from_roots(roots: &[Scalar]) -> Polynomial {
        let e = elementary_symmetric(roots);
        let n = roots.len();
        Polynomial::new(
            (0..=n)
                .map(|k| {
                    let i = n - k;
                    if i % 2 == 0 {
                        e[i].clone()
                    } else {
                        -&e[i]
                    }
                })
                .collect(),
        )
    }

    /// Companion matrix with ones on the subdiagonal and the recursion
    /// coefficients `(λ₀, …, λ_{k−1})` in the last column, so that
    /// `p(x) = det(x·I − C)`.
    pub fn companion_matrix(&self) -> Result<Matrix> {
        let lambda = self.recursion_coefficients()?;
        let k = lambda.len();
        let mode = self.mode();
        Ok(Matrix::from_fn(k, k, |i, j| {
            if j == k - 1 {
                lambda[i].clone()
            } else {
                Scalar::from_int((i == j + 1) as i64, mode)
            }
        }))
    }

    pub fn real_roots(&self) -> Result<RootReport> {
        self.real_roots_with(&Tolerances::default())
    }

    /// Roots as eigenvalues of the balanced companion matrix, each followed by
    /// one Newton step, then classified as real/distinct.
    pub fn real_roots_with(&self, tol: &Tolerances) -> Result<RootReport> {
        let companion = self.companion_matrix()?;
        if companion.rows() == 0 {
            return Ok(RootReport::AllRealDistinct(Vec::new()));
        }
        let Some(eig) = hessenberg_eigenvalues(&companion.to_f64_rows()) else {
            return Ok(RootReport::Degenerate(Degeneracy::NoConvergence));
        };
        let dp = self.derivative();
        let mut roots = Vec::with_capacity(eig.len());
        for (re, im) in eig {
            if Float::abs(im) > tol.root_imag * Float::abs(re).max(1.0) {
                return Ok(RootReport::Degenerate(Degeneracy::ComplexRoot));
            }
            roots.push(self.newton_step(&dp, re));
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let repeated = roots
            .windows(2)
            .any(|w| w[1] - w[0] <= tol.root_separation * Float::abs(w[0]).max(1.0));
        if repeated {
            return Ok(RootReport::Degenerate(Degeneracy::RepeatedRoot));
        }
        Ok(RootReport::AllRealDistinct(roots))
    }

    fn newton_step(&self, dp: &Polynomial, x: f64) -> f64 {
        let px = self.eval_f64(x);
        let dpx = dp.eval_f64(x);
        if dpx == 0.0 || !dpx.is_finite() {
            return x;
        }
        let next = x - px / dpx;
        if next.is_finite() && Float::abs(self.eval_f64(next)) <= Float::abs(px) {
            next
        } else {
            x
        }
    }
}

/// `(e₀, …, e_n)` of the given points, `e₀ = 1`, by iterated convolution
/// with `(1 + pᵢ t)`.
pub fn elementary_symmetric(points: &[Scalar]) -> Vec<Scalar> {
    let mode = points.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
    let mut e = vec![Scalar::one(mode)];
    for p in points {
        e.push(Scalar::zero(mode));
        for i in (1..e.len()).rev() {
            e[i] = &e[i] + p * &e[i - 1];
        }
    }
    e
}

/// Relative distance from `x` within which [`exact_root_near`] accepts a
/// rational zero. Early convergents can hit a neighbouring root.
pub const ROOT_RECOVERY_RADIUS: f64 = 1e-6;

/// Tries to identify a float root of an exact polynomial with an exact
/// rational: walks the continued-fraction convergents of `x` with
/// denominators up to `max_denominator` and returns the first one that is an
/// exact zero within [`ROOT_RECOVERY_RADIUS`] of `x`.
pub fn exact_root_near(p: &Polynomial, x: f64, max_denominator: u64) -> Option<BigRational> {
    if p.mode() != Mode::Exact || !x.is_finite() {
        return None;
    }
    let c = integer_coefficients(p)?;
    let max_den = BigInt::from(max_denominator);
    let target = BigRational::from_float(x)?;
    let radius = BigRational::from_float(ROOT_RECOVERY_RADIUS * x.abs().max(1.0))?;
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            break;
        }
        if eval_homogeneous(&c, &h_next, &k_next).is_zero() {
            let q = BigRational::new(h_next.clone(), k_next.clone());
            if (&q - &target).abs() <= radius {
                return Some(q);
            }
        }
        h_prev = core::mem::replace(&mut h, h_next);
        k_prev = core::mem::replace(&mut k, k_next);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    None
}

/// `p` scaled by the lcm of its denominators, as integers (exact mode only).
fn integer_coefficients(p: &Polynomial) -> Option<Vec<BigInt>> {
    let exact: Vec<BigRational> = p
        .coeffs
        .iter()
        .map(|c| c.to_mode(Mode::Exact).as_exact().cloned())
        .collect::<Option<_>>()?;
    let den = exact.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    Some(exact.iter().map(|c| c.numer() * (&den / c.denom())).collect())
}

/// `Σ cᵢ hⁱ k^{n−i}`, i.e. `kⁿ·p(h/k)` for integer coefficients `c`.
fn eval_homogeneous(c: &[BigInt], h: &BigInt, k: &BigInt) -> BigInt {
    let Some((last, rest)) = c.split_last() else {
        return BigInt::zero();
    };
    let mut acc = last.clone();
    let mut kp = BigInt::one();
    for ci in rest.iter().rev() {
        kp *= k;
        acc = acc * h + ci * &kp;
    }
    acc
}

/// Polishes a simple float root of `p` by Newton steps on the dyadic grid
/// `2^-bits`, in integer arithmetic. Falls back to the binary value of `x`
/// when the iteration wanders off.
pub fn refine_root(p: &Polynomial, x: f64, bits: u32) -> Option<BigRational> {
    let start = BigRational::from_float(x)?;
    let c = integer_coefficients(p)?;
    let dc: Vec<BigInt> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, ci)| ci * BigInt::from(i))
        .collect();
    let scale = BigInt::one() << bits as usize;
    let settle = BigInt::one() << 8usize;
    let mut cur = (&start * BigRational::from_integer(scale.clone())).round().to_integer();
    for _ in 0..12 {
        let value = eval_homogeneous(&c, &cur, &scale);
        let slope = eval_homogeneous(&dc, &cur, &scale);
        if slope.is_zero() {
            break;
        }
        let step = BigRational::new(value, slope).round().to_integer();
        cur -= &step;
        if step.abs() <= settle {
            break;
        }
    }
    let refined = BigRational::new(cur, scale);
    let drift = (&refined - &start).abs().to_f64().unwrap_or(f64::INFINITY);
    if drift <= 1e-6 * Float::abs(x).max(1.0) {
        Some(refined)
    } else {
        Some(start)
    }
}

impl fmt::Display for Polynomial {
    /// Highest degree first, e.g. `x^2 - 34/3 x + 11/3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.sign() == Ordering::Less;
            let mag = c.abs();
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            first = false;
            let unit = match &mag {
                Scalar::Exact(q) => q.is_one(),
                Scalar::Float(x) => *x == 1.0,
            };
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag} x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag} x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::determinant;
    use alloc::string::ToString;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn int(n: i64) -> Scalar {
        Scalar::from(n)
    }

    fn poly(c: &[Scalar]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn elementary_symmetric_examples() {
        assert_eq!(elementary_symmetric(&[]), [int(1)]);
        assert_eq!(elementary_symmetric(&[int(1), int(11)]), [int(1), int(12), int(11)]);
        assert_eq!(
            elementary_symmetric(&[q(1, 3), int(11)]),
            [int(1), q(34, 3), q(11, 3)]
        );
    }

    #[test]
    fn from_roots_examples() {
        assert_eq!(Polynomial::from_roots(&[]), poly(&[int(1)]));
        assert_eq!(
            Polynomial::from_roots(&[int(1), int(11)]),
            poly(&[int(11), int(-12), int(1)])
        );
        assert_eq!(
            Polynomial::from_roots(&[q(1, 3), int(11)]),
            poly(&[q(11, 3), q(-34, 3), int(1)])
        );
        assert_eq!(
            Polynomial::from_roots(&[q(1, 3), int(11)]).to_string(),
            "x^2 - 34/3 x + 11/3"
        );
    }

    #[test]
    fn multiplication_by_one_is_identity() {
        let g = poly(&[q(3, 7), int(-2), int(0), int(1)]);
        assert_eq!(Polynomial::one(Mode::Exact).mul(&g), g);
    }

    #[test]
    fn sextic_of_the_existence_example() {
        let f = Polynomial::from_roots(&[int(1), int(11)]);
        let g = poly(&[
            q(220344, 1601),
            q(-1476768, 1601),
            q(753912, 1601),
            q(-95824, 1601),
            int(1),
        ]);
        let h = f.mul(&g);
        assert_eq!(
            h.coeffs(),
            [
                q(2423784, 1601),
                q(-18888576, 1601),
                q(26234592, 1601),
                q(-11577776, 1601),
                q(1921411, 1601),
                q(-115036, 1601),
                int(1)
            ]
        );
    }

    #[test]
    fn sextic_of_the_nonexistence_example() {
        let f = Polynomial::from_roots(&[q(1, 3), int(11)]);
        let g = poly(&[
            q(46998216, 137503),
            q(-41197920, 137503),
            q(11282760, 137503),
            q(-1695024, 137503),
            int(1),
        ]);
        let h = f.mul(&g);
        assert_eq!(
            h.coeffs(),
            [
                q(172326792, 137503),
                q(-683705488, 137503),
                q(555278096, 137503),
                q(-175284288, 137503),
                q(92991629, 412509),
                q(-9760174, 412509),
                int(1)
            ]
        );
    }

    #[test]
    fn companion_examples() {
        let c = poly(&[int(-5), int(1)]).companion_matrix().unwrap();
        assert_eq!(c.entries(), [int(5)]);
        let c = poly(&[int(2), int(-3), int(1)]).companion_matrix().unwrap();
        assert_eq!(c.entries(), [int(0), int(-2), int(1), int(3)]);
        assert_eq!(
            poly(&[int(2), int(2)]).companion_matrix(),
            Err(Error::NotMonic)
        );
    }

    #[test]
    fn characteristic_polynomial_of_companion() {
        // deterministic spread of monic cubics
        for seed in 0..100i64 {
            let a0 = q((seed * 37) % 23 - 11, 1 + seed % 5);
            let a1 = q((seed * 11) % 17 - 8, 1 + seed % 3);
            let a2 = q((seed * 5) % 13 - 6, 1 + seed % 7);
            let p = poly(&[a0, a1, a2, int(1)]);
            let c = p.companion_matrix().unwrap();
            for x in [int(0), int(1), int(-1)] {
                let shifted = Matrix::identity(3, Mode::Exact).scale(&x).sub(&c).unwrap();
                assert_eq!(determinant(&shifted).unwrap(), p.eval(&x));
            }
        }
    }

    #[test]
    fn real_roots_examples() {
        assert_eq!(
            poly(&[int(2), int(-3), int(1)]).real_roots().unwrap(),
            RootReport::AllRealDistinct(vec![1.0, 2.0])
        );
        assert_eq!(
            poly(&[int(1), int(0), int(1)]).real_roots().unwrap(),
            RootReport::Degenerate(Degeneracy::ComplexRoot)
        );
        let double = Polynomial::from_roots(&[int(3), int(3)]);
        assert!(matches!(
            double.real_roots().unwrap(),
            RootReport::Degenerate(_)
        ));
        let g = poly(&[
            q(220344, 1601),
            q(-1476768, 1601),
            q(753912, 1601),
            q(-95824, 1601),
            int(1),
        ]);
        let RootReport::AllRealDistinct(r) = g.real_roots().unwrap() else {
            panic!("expected real roots");
        };
        for (got, want) in r.iter().zip([0.16, 2.81, 5.91, 50.97]) {
            assert!((got - want).abs() < 5e-3, "{got} vs {want}");
        }
    }

    #[test]
    fn exact_root_recovery() {
        let p = Polynomial::from_roots(&[q(-4321, 1000), q(7, 3)]);
        let root = exact_root_near(&p, -4.321, 1_000_000).unwrap();
        assert_eq!(Scalar::Exact(root), q(-4321, 1000));
        assert!(exact_root_near(&poly(&[int(-2), int(0), int(1)]), 2f64.sqrt(), 1_000_000).is_none());
    }

    #[test]
    fn recovery_ignores_neighbouring_roots() {
        // -39/5 is a convergent of -7.778
        let p = Polynomial::from_roots(&[q(-39, 5), q(-3889, 500)]);
        let root = exact_root_near(&p, -7.777999999999998, 1_000_000_000).unwrap();
        assert_eq!(Scalar::Exact(root), q(-3889, 500));
    }
}
