//! Exact polynomial arithmetic, harmonic (Appell) sequences, and the special
//! functions (log-Gamma, Beta) that appear in the error-bound constants.
//!
//! Polynomials are dense coefficient vectors in ascending degree. All
//! coefficient operations (evaluation, differentiation, antidifferentiation,
//! products) are exact up to floating-point rounding; no quadrature is
//! involved anywhere in this module.

use crate::error::{Error, Result};

/// Leading coefficients below this absolute threshold are trimmed so that
/// `degree` stays well-defined after arithmetic.
pub const TRIM_EPS: f64 = 1e-14;

/// Relative tolerance for the Appell-chain check `Q_k' == Q_{k-1}`.
const APPELL_TOL: f64 = 1e-12;

pub(crate) fn neg_one_pow(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    let mut acc = 1.0;
    for i in 2..=n {
        acc *= i as f64;
    }
    acc
}

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending-degree coefficients, trimming
    /// leading (highest-degree) entries below [`TRIM_EPS`].
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 {
            let last = *self.coeffs.last().unwrap();
            if last.abs() <= TRIM_EPS {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= TRIM_EPS)
    }

    /// Horner evaluation at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Exact coefficient-wise derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    /// Exact antiderivative with constant term `c`. `poly_diff` of the result
    /// recovers `self` exactly.
    pub fn antiderivative(&self, c: f64) -> Polynomial {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c);
        for (k, ck) in self.coeffs.iter().enumerate() {
            coeffs.push(ck / (k + 1) as f64);
        }
        Polynomial::new(coeffs)
    }

    /// Definite integral over `[a, b]` via the exact antiderivative.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative(0.0);
        anti.eval(b) - anti.eval(a)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        Polynomial::new(coeffs)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }

    /// The shifted monomial `(t - alpha)^k / k!`, expanded binomially.
    pub fn shifted_monomial(alpha: f64, k: usize) -> Polynomial {
        // binomial expansion of (t - alpha)^k, then divide by k!
        let mut coeffs = vec![0.0; k + 1];
        let mut binom = 1.0;
        for (j, slot) in coeffs.iter_mut().enumerate() {
            // C(k, j) * (-alpha)^(k - j) for the t^j coefficient
            *slot = binom * (-alpha).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        let kf = factorial(k);
        Polynomial::new(coeffs.into_iter().map(|c| c / kf).collect())
    }
}

/// A finite harmonic (Appell) sequence `[Q_0, Q_1, ..., Q_m]` with
/// `Q_0 == 1` and `Q_k' == Q_{k-1}` for every `k >= 1`.
#[derive(Debug, Clone)]
pub struct HarmonicSequence {
    polys: Vec<Polynomial>,
}

impl HarmonicSequence {
    /// Validates the Appell chain coefficient-wise at construction.
    pub fn new(polys: Vec<Polynomial>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::SequenceTooShort { len: 0, need: 1 });
        }
        let q0 = &polys[0];
        if q0.degree() != 0 || (q0.coeffs()[0] - 1.0).abs() > APPELL_TOL {
            return Err(Error::NotHarmonic("Q_0 must be the constant 1".into()));
        }
        for k in 1..polys.len() {
            let d = polys[k].derivative();
            let want = &polys[k - 1];
            let n = d.coeffs().len().max(want.coeffs().len());
            for j in 0..n {
                let a = d.coeffs().get(j).copied().unwrap_or(0.0);
                let b = want.coeffs().get(j).copied().unwrap_or(0.0);
                if (a - b).abs() > APPELL_TOL * b.abs().max(1.0) {
                    return Err(Error::NotHarmonic(format!(
                        "Q_{k}' differs from Q_{} in the t^{j} coefficient",
                        k - 1
                    )));
                }
            }
        }
        Ok(HarmonicSequence { polys })
    }

    /// The Taylor-type sequence `Q_k(t) = (t - alpha)^k / k!`, `k = 0..=m`.
    pub fn shifted_monomials(alpha: f64, m: usize) -> Self {
        let polys = (0..=m)
            .map(|k| Polynomial::shifted_monomial(alpha, k))
            .collect();
        HarmonicSequence { polys }
    }

    /// Repeated antidifferentiation of 1 with the given constant term at
    /// each step. `constants[k]` becomes the constant term of `Q_{k+1}`.
    pub fn from_constants(constants: &[f64]) -> Self {
        let mut polys = vec![Polynomial::constant(1.0)];
        for &c in constants {
            let next = polys.last().unwrap().antiderivative(c);
            polys.push(next);
        }
        HarmonicSequence { polys }
    }

    /// A non-monomial Appell sequence used to exercise the general identity:
    /// integration constants fixed to `1/(k+3)` at the step producing `Q_k`.
    pub fn nonmonomial(m: usize) -> Self {
        let constants: Vec<f64> = (1..=m).map(|k| 1.0 / (k + 3) as f64).collect();
        Self::from_constants(&constants)
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `Q_k`. Panics if `k` is out of range; callers validate lengths at
    /// context construction.
    pub fn get(&self, k: usize) -> &Polynomial {
        &self.polys[k]
    }

    pub fn require_len(&self, need: usize) -> Result<()> {
        if self.polys.len() < need {
            return Err(Error::SequenceTooShort {
                len: self.polys.len(),
                need,
            });
        }
        Ok(())
    }
}

// Lanczos approximation, g = 7, 9 coefficients. Relative accuracy is around
// 1e-14 over the arguments used here, comfortably inside the 1e-12 target.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return Ok((pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let half_ln_two_pi = 0.918_938_533_204_672_7;
    Ok(half_ln_two_pi + (z + 0.5) * t.ln() - t + a.ln())
}

/// Euler Beta function `B(p, q)` for positive arguments, computed as
/// `exp(lnG(p) + lnG(q) - lnG(p + q))`.
pub fn beta(p: f64, q: f64) -> Result<f64> {
    if !p.is_finite() || p <= 0.0 || !q.is_finite() || q <= 0.0 {
        return Err(Error::Domain(format!(
            "beta requires positive arguments, got ({p}, {q})"
        )));
    }
    Ok((ln_gamma(p)? + ln_gamma(q)? - ln_gamma(p + q)?).exp())
}

/// The factor `Gamma(1 + r) / Gamma(1 + n + r)` from the Hoelder-remainder
/// bound at collapsed nodes, for `r` in `(0, 1]` and `n >= 1`.
pub fn gamma_ratio(r: f64, n: usize) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!(
            "gamma_ratio requires r in (0, 1], got {r}"
        )));
    }
    if n < 1 {
        return Err(Error::Domain("gamma_ratio requires n >= 1".into()));
    }
    Ok((ln_gamma(1.0 + r)? - ln_gamma(1.0 + n as f64 + r)?).exp())
}
