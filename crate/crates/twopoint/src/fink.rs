//! Harmonic-sequence representation of the two-point rule: the general
//! identity with arbitrary Appell sequences, the quadrature rule it induces,
//! and the symmetric (mirrored-node) specialization.
//!
//! The general identity reads
//!
//! ```text
//! (1/n) [ ((x-a) f(y) + (b-x) f(z)) / (b-a) + sum_{k=1}^{n-1} (T_k + F_k) ]
//!   - (1/(b-a)) int_a^b f
//!   = ((-1)^(n-1) / (n (b-a))) int_a^b Q_{n-1}(t) K(t; y, x, z) f^(n)(t) dt
//! ```
//!
//! with `T_k` carrying node data and `F_k` endpoint data. Specializing
//! `Q_k(t) = (t - alpha)^k / k!` gives the Taylor-type form; collapsing
//! `y = x = z = alpha` recovers the classical one-point representation.

use crate::algebra::{factorial, neg_one_pow, HarmonicSequence, Polynomial};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::kernels::{s_at, Interval, KernelMode, NodeTriple};
use crate::oracle;
use crate::quadrature::reference;

/// Everything the harmonic-sequence identity needs: the sequence, the
/// expansion order, the nodes, and the interval.
#[derive(Debug, Clone)]
pub struct FinkContext {
    seq: HarmonicSequence,
    n: usize,
    nodes: NodeTriple,
    iv: Interval,
}

impl FinkContext {
    /// Validates eagerly: the sequence must provide `Q_0 ..= Q_{n-1}`.
    pub fn new(seq: HarmonicSequence, n: usize, nodes: NodeTriple, iv: Interval) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("representation order must be >= 1".into()));
        }
        seq.require_len(n)?;
        Ok(FinkContext { seq, n, nodes, iv })
    }

    pub fn seq(&self) -> &HarmonicSequence {
        &self.seq
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> NodeTriple {
        self.nodes
    }

    pub fn iv(&self) -> Interval {
        self.iv
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n - 1 {
            return Err(Error::Invalid(format!(
                "term index k = {k} outside 1..={} for order {}",
                self.n.saturating_sub(1),
                self.n
            )));
        }
        Ok(())
    }
}

/// Node term `T_k = ((-1)^k/(b-a)) [ (x-a) Q_k(y) f^(k)(y) + (b-x) Q_k(z) f^(k)(z) ]`.
pub fn t_term(ctx: &FinkContext, f: &TestFunction, k: usize) -> Result<f64> {
    ctx.check_k(k)?;
    let (nodes, iv) = (ctx.nodes, ctx.iv);
    let qk = ctx.seq.get(k);
    Ok(neg_one_pow(k) / iv.length()
        * ((nodes.x() - iv.a()) * qk.eval(nodes.y()) * f.value_at(k, nodes.y())?
            + (iv.b() - nodes.x()) * qk.eval(nodes.z()) * f.value_at(k, nodes.z())?))
}

/// Endpoint term `F_k = ((-1)^k (n-k)/(b-a)) [ Q_k(a) f^(k-1)(a) - Q_k(b) f^(k-1)(b) ]`.
pub fn f_term(ctx: &FinkContext, f: &TestFunction, k: usize) -> Result<f64> {
    ctx.check_k(k)?;
    f_term_on(ctx.seq.get(k), f, k, ctx.n, ctx.iv.a(), ctx.iv.b())
}

/// `F_k` over an arbitrary subinterval `[c, d]`; the weight identity
/// `(x-a) F_k(a,x) + (b-x) F_k(x,b) = (b-a) F_k(a,b)` holds exactly.
pub fn f_term_on(
    qk: &Polynomial,
    f: &TestFunction,
    k: usize,
    n: usize,
    c: f64,
    d: f64,
) -> Result<f64> {
    Ok(neg_one_pow(k) * (n - k) as f64 / (d - c)
        * (qk.eval(c) * f.value_at(k - 1, c)? - qk.eval(d) * f.value_at(k - 1, d)?))
}

fn correction_terms(ctx: &FinkContext, f: &TestFunction) -> Result<f64> {
    let mut sum = 0.0;
    for k in 1..ctx.n {
        sum += t_term(ctx, f, k)? + f_term(ctx, f, k)?;
    }
    Ok(sum)
}

/// Left side of the representation: weighted rule plus correction terms,
/// minus the mean of `f`.
pub fn fink_lhs(ctx: &FinkContext, f: &TestFunction) -> Result<f64> {
    let (nodes, iv, n) = (ctx.nodes, ctx.iv, ctx.n);
    let rule = (nodes.x() - iv.a()) * f.value_at(0, nodes.y())?
        + (iv.b() - nodes.x()) * f.value_at(0, nodes.z())?;
    let mean = reference(f, iv)? / iv.length();
    Ok((rule / iv.length() + correction_terms(ctx, f)?) / n as f64 - mean)
}

pub(crate) fn fink_rhs_with(mode: KernelMode, ctx: &FinkContext, f: &TestFunction) -> Result<f64> {
    let (nodes, iv, n) = (ctx.nodes, ctx.iv, ctx.n);
    if n > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: n,
            available: f.max_order(),
        });
    }
    let q = ctx.seq.get(n - 1).clone();
    let fc = f.clone();
    let integrand = move |t: f64| {
        q.eval(t) * s_at(mode, 1, t, nodes, iv) * fc.value_at(n, t).unwrap_or(f64::NAN)
    };
    let val = oracle::integrate(
        integrand,
        iv,
        &[nodes.y(), nodes.x(), nodes.z()],
        oracle::default_tol(iv),
    )?
    .value;
    Ok(neg_one_pow(n - 1) / (n as f64 * iv.length()) * val)
}

/// Right side of the representation:
/// `((-1)^(n-1)/(n (b-a))) int Q_{n-1} K f^(n) dt`, split at the kernel
/// breakpoints.
pub fn fink_rhs(ctx: &FinkContext, f: &TestFunction) -> Result<f64> {
    fink_rhs_with(KernelMode::Standard, ctx, f)
}

pub(crate) fn fink_quadrature_with(
    mode: KernelMode,
    ctx: &FinkContext,
    f: &TestFunction,
) -> Result<(f64, f64)> {
    let (nodes, iv, n) = (ctx.nodes, ctx.iv, ctx.n);
    let rule = (nodes.x() - iv.a()) * f.value_at(0, nodes.y())?
        + (iv.b() - nodes.x()) * f.value_at(0, nodes.z())?;
    let g = iv.length() / n as f64 * (rule / iv.length() + correction_terms(ctx, f)?);
    let e = -iv.length() * fink_rhs_with(mode, ctx, f)?;
    Ok((g, e))
}

/// The quadrature rule `int f = G + E`: the weighted correction form `G`
/// and the error integral `E`.
pub fn fink_quadrature(ctx: &FinkContext, f: &TestFunction) -> Result<(f64, f64)> {
    fink_quadrature_with(KernelMode::Standard, ctx, f)
}

/// Symmetric-rule correction term written with midpoint data:
/// `G_k(x) = ((n-k)/(k! (b-a))) { (x-a)^k [f^(k-1)(a) + (-1)^(k+1) f^(k-1)(b)]
///   + (1 + (-1)^(k+1)) ((a+b)/2 - x)^k f^(k-1)((a+b)/2) }`.
///
/// This closed form agrees with [`gs_term`] at `x = (a+b)/2` (and for every
/// `x` when `n = 1`, where the sum is empty); for interior `x` the general
/// identity requires [`gs_term`] instead. See [`gs_midpoint_gap`].
pub fn gs_g_k(x: f64, k: usize, n: usize, f: &TestFunction, iv: Interval) -> Result<f64> {
    check_symmetric_x(x, iv)?;
    if k == 0 || k >= n {
        return Err(Error::Invalid(format!(
            "term index k = {k} outside 1..={}",
            n - 1
        )));
    }
    let mid = iv.midpoint();
    let sign = neg_one_pow(k + 1);
    Ok((n - k) as f64 / (factorial(k) * iv.length())
        * ((x - iv.a()).powi(k as i32)
            * (f.value_at(k - 1, iv.a())? + sign * f.value_at(k - 1, iv.b())?)
            + (1.0 + sign) * (mid - x).powi(k as i32) * f.value_at(k - 1, mid)?))
}

/// Correction term of the symmetric rule obtained mechanically from the
/// general representation with `Q_k(t) = (t - x)^k / k!` at nodes
/// `(x, (a+b)/2, a+b-x)`:
///
/// ```text
/// T_k = ((-1)^k / (2 k!)) (a+b-2x)^k f^(k)(a+b-x)
/// F_k = ((n-k)/((b-a) k!)) [ (x-a)^k f^(k-1)(a) - (-1)^k (b-x)^k f^(k-1)(b) ]
/// ```
pub fn gs_term(x: f64, k: usize, n: usize, f: &TestFunction, iv: Interval) -> Result<f64> {
    check_symmetric_x(x, iv)?;
    if k == 0 || k >= n {
        return Err(Error::Invalid(format!(
            "term index k = {k} outside 1..={}",
            n - 1
        )));
    }
    let mirrored = iv.a() + iv.b() - x;
    let t_k = neg_one_pow(k) / (2.0 * factorial(k))
        * (iv.a() + iv.b() - 2.0 * x).powi(k as i32)
        * f.value_at(k, mirrored)?;
    let f_k = (n - k) as f64 / (iv.length() * factorial(k))
        * ((x - iv.a()).powi(k as i32) * f.value_at(k - 1, iv.a())?
            - neg_one_pow(k) * (iv.b() - x).powi(k as i32) * f.value_at(k - 1, iv.b())?);
    Ok(t_k + f_k)
}

/// Difference `gs_term - gs_g_k`, zero at the midpoint and generally
/// nonzero for interior `x` when `n >= 2`.
pub fn gs_midpoint_gap(x: f64, k: usize, n: usize, f: &TestFunction, iv: Interval) -> Result<f64> {
    Ok(gs_term(x, k, n, f, iv)? - gs_g_k(x, k, n, f, iv)?)
}

fn check_symmetric_x(x: f64, iv: Interval) -> Result<()> {
    if !(iv.a() <= x && x <= iv.midpoint()) {
        return Err(Error::Domain(format!(
            "symmetric rule needs x in [{}, {}], got {x}",
            iv.a(),
            iv.midpoint()
        )));
    }
    Ok(())
}

/// Left side of the symmetric-rule representation:
/// `(1/n) [ (f(x) + f(a+b-x))/2 + sum_k gs_term ] - mean(f)`.
pub fn gs_lhs(x: f64, n: usize, f: &TestFunction, iv: Interval) -> Result<f64> {
    check_symmetric_x(x, iv)?;
    if n == 0 {
        return Err(Error::Domain("representation order must be >= 1".into()));
    }
    let mirrored = iv.a() + iv.b() - x;
    let mut bracket = 0.5 * (f.value_at(0, x)? + f.value_at(0, mirrored)?);
    for k in 1..n {
        bracket += gs_term(x, k, n, f, iv)?;
    }
    Ok(bracket / n as f64 - reference(f, iv)? / iv.length())
}

pub(crate) fn gs_rhs_with(
    mode: KernelMode,
    x: f64,
    n: usize,
    f: &TestFunction,
    iv: Interval,
) -> Result<f64> {
    check_symmetric_x(x, iv)?;
    if n > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: n,
            available: f.max_order(),
        });
    }
    let nodes = NodeTriple::symmetric(x, iv)?;
    let fc = f.clone();
    let integrand = move |t: f64| {
        (x - t).powi((n - 1) as i32)
            * s_at(mode, 1, t, nodes, iv)
            * fc.value_at(n, t).unwrap_or(f64::NAN)
    };
    let val = oracle::integrate(
        integrand,
        iv,
        &[nodes.y(), nodes.x(), nodes.z()],
        oracle::default_tol(iv),
    )?
    .value;
    Ok(val / (factorial(n) * iv.length()))
}

/// Right side of the symmetric-rule representation:
/// `(1/(n! (b-a))) int (x-t)^(n-1) S(t, x) f^(n)(t) dt`.
pub fn gs_rhs(x: f64, n: usize, f: &TestFunction, iv: Interval) -> Result<f64> {
    gs_rhs_with(KernelMode::Standard, x, n, f, iv)
}

pub(crate) fn gs_identity_residual_with(
    mode: KernelMode,
    x: f64,
    n: usize,
    f: &TestFunction,
    iv: Interval,
) -> Result<f64> {
    Ok((gs_lhs(x, n, f, iv)? - gs_rhs_with(mode, x, n, f, iv)?).abs())
}

/// `|gs_lhs - gs_rhs|`; at most `1e-8 (1 + |mean|)` for smooth functions.
pub fn gs_identity_residual(x: f64, n: usize, f: &TestFunction, iv: Interval) -> Result<f64> {
    gs_identity_residual_with(KernelMode::Standard, x, n, f, iv)
}

/// Residual of the one-point (collapsed) representation at `y = x = z`:
/// `(1/n)[f(x) + sum_k F_k] - mean` against the kernel integral with the
/// Fink kernel `K(t; x, x, x)`.
pub fn milovanovic_pecaric_residual(
    x: f64,
    n: usize,
    f: &TestFunction,
    iv: Interval,
) -> Result<f64> {
    iv.check_contains(x)?;
    if n == 0 {
        return Err(Error::Domain("representation order must be >= 1".into()));
    }
    if n > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: n,
            available: f.max_order(),
        });
    }
    let mut bracket = f.value_at(0, x)?;
    for k in 1..n {
        // F-part of the shifted-monomial terms; the node parts vanish since
        // Q_k(x) = 0 and the middle branch is empty.
        bracket += (n - k) as f64 / (iv.length() * factorial(k))
            * ((x - iv.a()).powi(k as i32) * f.value_at(k - 1, iv.a())?
                - neg_one_pow(k) * (iv.b() - x).powi(k as i32) * f.value_at(k - 1, iv.b())?);
    }
    let lhs = bracket / n as f64 - reference(f, iv)? / iv.length();

    let nodes = NodeTriple::new(x, x, x, iv)?;
    let fc = f.clone();
    let integrand = move |t: f64| {
        (x - t).powi((n - 1) as i32)
            * s_at(KernelMode::Standard, 1, t, nodes, iv)
            * fc.value_at(n, t).unwrap_or(f64::NAN)
    };
    let rhs = oracle::integrate(integrand, iv, &[x], oracle::default_tol(iv))?.value
        / (factorial(n) * iv.length());
    Ok((lhs - rhs).abs())
}
