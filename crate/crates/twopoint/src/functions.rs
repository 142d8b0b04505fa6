//! Registry of analytic test functions with closed-form derivatives, plus
//! the norm / variation / envelope machinery the error bounds consume.

use crate::error::{Error, Result};
use crate::kernels::Interval;
use crate::oracle;
use crate::rng::SplitMix64;
use std::fmt;
use std::sync::Arc;

type EvalFn = dyn Fn(usize, f64) -> f64 + Send + Sync;
type ExactFn = dyn Fn(Interval) -> f64 + Send + Sync;

/// A function together with analytic derivatives up to `max_order` and an
/// optional exact integral. Immutable and cheap to clone.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    max_order: usize,
    eval: Arc<EvalFn>,
    exact: Option<Arc<ExactFn>>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl TestFunction {
    pub fn new<E>(name: impl Into<String>, max_order: usize, eval: E) -> Self
    where
        E: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        TestFunction {
            name: name.into(),
            max_order,
            eval: Arc::new(eval),
            exact: None,
        }
    }

    pub fn with_exact<X>(mut self, exact: X) -> Self
    where
        X: Fn(Interval) -> f64 + Send + Sync + 'static,
    {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// The `k`-th derivative at `t` (`k = 0` is the function itself).
    pub fn value_at(&self, k: usize, t: f64) -> Result<f64> {
        if k > self.max_order {
            return Err(Error::DerivativeOrder {
                name: self.name.clone(),
                requested: k,
                available: self.max_order,
            });
        }
        Ok((self.eval)(k, t))
    }

    /// Closed-form integral over `iv`, when available.
    pub fn exact_integral(&self, iv: Interval) -> Option<f64> {
        self.exact.as_ref().map(|f| f(iv))
    }

    /// Closure view of the `k`-th derivative; panics on out-of-range `k`, so
    /// callers check `max_order` first.
    pub fn derivative_fn(&self, k: usize) -> impl Fn(f64) -> f64 + Send + Sync + '_ {
        let eval = Arc::clone(&self.eval);
        move |t| eval(k, t)
    }

    /// Polynomial with the given ascending coefficients; derivatives and the
    /// integral are exact coefficient operations.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        use crate::algebra::Polynomial;
        let name = format!(
            "poly:{}",
            coeffs
                .iter()
                .map(|c| format_coeff(*c))
                .collect::<Vec<_>>()
                .join(",")
        );
        let base = Polynomial::new(coeffs.to_vec());
        // precompute every derivative down to zero
        let mut derivs = vec![base.clone()];
        while !derivs.last().unwrap().is_zero() {
            derivs.push(derivs.last().unwrap().derivative());
        }
        let derivs = Arc::new(derivs);
        let d2 = Arc::clone(&derivs);
        let f = TestFunction::new(name, usize::MAX, move |k, t| {
            if k < d2.len() {
                d2[k].eval(t)
            } else {
                0.0
            }
        });
        f.with_exact(move |iv: Interval| derivs[0].integral(iv.a(), iv.b()))
    }

    pub fn exp() -> Self {
        TestFunction::new("exp", 8, |_, t| t.exp())
            .with_exact(|iv: Interval| iv.b().exp() - iv.a().exp())
    }

    pub fn sin() -> Self {
        TestFunction::new("sin", 8, |k, t| match k % 4 {
            0 => t.sin(),
            1 => t.cos(),
            2 => -t.sin(),
            _ => -t.cos(),
        })
        .with_exact(|iv: Interval| iv.a().cos() - iv.b().cos())
    }

    pub fn cos() -> Self {
        TestFunction::new("cos", 8, |k, t| match k % 4 {
            0 => t.cos(),
            1 => -t.sin(),
            2 => -t.cos(),
            _ => t.sin(),
        })
        .with_exact(|iv: Interval| iv.b().sin() - iv.a().sin())
    }

    /// `1 / (1 + t^2)`, derivatives through the complex pole representation
    /// `f^(k)(t) = Im[(-1)^k k! (t - i)^(-k-1)]`.
    pub fn runge() -> Self {
        TestFunction::new("runge", 8, runge_derivative)
            .with_exact(|iv: Interval| iv.b().atan() - iv.a().atan())
    }

    /// Parses a CLI function spec: `exp`, `sin`, `cos`, `runge`, or
    /// `poly:c0,c1,...` (ascending coefficients).
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim().replace('\u{2212}', "-");
        match spec.as_str() {
            "exp" => Ok(Self::exp()),
            "sin" => Ok(Self::sin()),
            "cos" => Ok(Self::cos()),
            "runge" => Ok(Self::runge()),
            s if s.starts_with("poly:") => {
                let coeffs: Result<Vec<f64>> = s["poly:".len()..]
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Invalid(format!("bad coefficient `{c}` in `{s}`")))
                    })
                    .collect();
                let coeffs = coeffs?;
                if coeffs.is_empty() {
                    return Err(Error::Invalid(
                        "poly: needs at least one coefficient".into(),
                    ));
                }
                Ok(Self::polynomial(&coeffs))
            }
            other => Err(Error::Invalid(format!(
                "unknown function `{other}` (expected exp, sin, cos, runge, or poly:c0,c1,...)"
            ))),
        }
    }

    /// The standard sweep set: one polynomial per degree 0..=8, plus exp,
    /// sin, cos, and the rational bump.
    pub fn registry() -> Vec<TestFunction> {
        vec![
            Self::polynomial(&[2.0]),
            Self::polynomial(&[-1.0, 2.0]),
            Self::polynomial(&[0.0, 0.0, 1.0]),
            Self::polynomial(&[1.0, 0.0, -3.0, 2.0]),
            Self::polynomial(&[0.0, 1.0, 0.0, 0.0, 1.0]),
            Self::polynomial(&[1.0, -1.0, 0.0, 2.0, 0.0, 1.0]),
            Self::polynomial(&[0.0, 0.0, -2.0, 0.0, 1.0, 0.0, 1.0]),
            Self::polynomial(&[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            Self::polynomial(&[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            Self::exp(),
            Self::sin(),
            Self::cos(),
            Self::runge(),
        ]
    }
}

fn format_coeff(c: f64) -> String {
    if c == c.trunc() && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

fn runge_derivative(k: usize, t: f64) -> f64 {
    // w = 1 / (t - i); f^(k)(t) = Im[(-1)^k k! w^(k+1)]
    let den = t * t + 1.0;
    let (mut re, mut im) = (t / den, 1.0 / den);
    let (w_re, w_im) = (re, im);
    for _ in 0..k {
        let nre = re * w_re - im * w_im;
        let nim = re * w_im + im * w_re;
        re = nre;
        im = nim;
    }
    crate::algebra::neg_one_pow(k) * crate::algebra::factorial(k) * im
}

/// Lebesgue norm selector: finite `p >= 1` or the essential sup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    P(f64),
    Inf,
}

impl NormSpec {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(NormSpec::Inf);
        }
        if p.is_finite() && p >= 1.0 {
            return Ok(NormSpec::P(p));
        }
        Err(Error::Domain(format!(
            "norm exponent must be in [1, inf], got {p}"
        )))
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "INF" => Ok(NormSpec::Inf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad norm exponent `{other}`")))?;
                Self::new(p)
            }
        }
    }

    /// Conjugate exponent: `1 <-> inf`, `p <-> p/(p-1)`.
    pub fn conjugate(self) -> NormSpec {
        match self {
            NormSpec::Inf => NormSpec::P(1.0),
            NormSpec::P(1.0) => NormSpec::Inf,
            NormSpec::P(p) => NormSpec::P(p / (p - 1.0)),
        }
    }

    pub fn is_inf(self) -> bool {
        matches!(self, NormSpec::Inf)
    }

    /// Wire spelling: `"inf"` or the shortest numeric form.
    pub fn wire(&self) -> String {
        match self {
            NormSpec::Inf => "inf".to_string(),
            NormSpec::P(p) if *p == p.trunc() => format!("{}", *p as i64),
            NormSpec::P(p) => format!("{p}"),
        }
    }
}

/// Hoelder data: exponent `r` in `(0, 1]` and constant `H >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderSpec {
    pub r: f64,
    pub h: f64,
}

impl HolderSpec {
    pub fn new(r: f64, h: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Domain(format!(
                "Hoelder exponent must be in (0, 1], got {r}"
            )));
        }
        if !h.is_finite() || h < 0.0 {
            return Err(Error::Domain(format!(
                "Hoelder constant must be >= 0, got {h}"
            )));
        }
        Ok(HolderSpec { r, h })
    }
}

/// `(int_a^b |f^(k)|^p)^(1/p)` for finite `p`; grid supremum for `p = inf`.
pub fn lp_norm(f: &TestFunction, k: usize, p: NormSpec, iv: Interval) -> Result<f64> {
    if k > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: k,
            available: f.max_order(),
        });
    }
    match p {
        NormSpec::Inf => oracle::grid_sup(|t| (f.eval)(k, t), iv, 4096),
        NormSpec::P(p) => {
            let eval = Arc::clone(&f.eval);
            let q = oracle::integrate(
                move |t| eval(k, t).abs().powf(p),
                iv,
                &[],
                oracle::default_tol(iv),
            )?;
            Ok(q.value.max(0.0).powf(1.0 / p))
        }
    }
}

/// Total p-variation of `f^(k)` in the differentiable case: `||f^(k+1)||_p`
/// for finite `p`, and the oscillation `sup - inf` of `f^(k)` for `p = inf`.
pub fn p_variation(f: &TestFunction, k: usize, p: NormSpec, iv: Interval) -> Result<f64> {
    match p {
        NormSpec::Inf => {
            let (m, max) = extrema(f, k, iv)?;
            Ok(max - m)
        }
        NormSpec::P(_) => {
            if k + 1 > f.max_order() {
                return Err(Error::DerivativeOrder {
                    name: f.name().to_string(),
                    requested: k + 1,
                    available: f.max_order(),
                });
            }
            lp_norm(f, k + 1, p, iv)
        }
    }
}

/// `(min, max)` of `f^(k)` over the interval (grid + local refinement).
pub fn extrema(f: &TestFunction, k: usize, iv: Interval) -> Result<(f64, f64)> {
    if k > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: k,
            available: f.max_order(),
        });
    }
    oracle::grid_extrema(|t| (f.eval)(k, t), iv, 4096)
}

/// Sampled estimate of the Hoelder-`r` constant of `f^(k)`: the maximum of
/// `|f^(k)(s) - f^(k)(t)| / |s - t|^r` over 10^4 deterministic random pairs,
/// times a 1.05 safety factor. This is an estimate, not a certificate.
pub fn holder_estimate(f: &TestFunction, k: usize, r: f64, iv: Interval) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!(
            "Hoelder exponent must be in (0, 1], got {r}"
        )));
    }
    if k > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: k,
            available: f.max_order(),
        });
    }
    let mut rng = SplitMix64::new(0x9E37_79B9);
    let mut best: f64 = 0.0;
    for _ in 0..10_000 {
        let s = rng.in_range(iv.a(), iv.b());
        let t = rng.in_range(iv.a(), iv.b());
        let d = (s - t).abs();
        if d < 1e-12 {
            continue;
        }
        let ratio = (f.value_at(k, s)? - f.value_at(k, t)?).abs() / d.powf(r);
        best = best.max(ratio);
    }
    Ok(1.05 * best)
}

/// Worst relative error of `f^(k)` against central differences of
/// `f^(k-1)` at `samples` points (step 1e-5).
pub fn fd_derivative_check(f: &TestFunction, k: usize, samples: usize) -> Result<f64> {
    if k == 0 || k > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: k,
            available: f.max_order(),
        });
    }
    let iv = Interval::new(0.0, 1.0)?;
    let lower = Arc::clone(&f.eval);
    let upper = Arc::clone(&f.eval);
    oracle::fd_check(
        move |t| lower(k - 1, t),
        move |t| upper(k, t),
        iv,
        samples,
        1e-5,
    )
}
