//! Remainder estimators for the two-point expansion: variation, Lebesgue
//! norm, Hoelder, kernel-factored, and sharp symmetric-rule constants,
//! together with the extremal functions that probe sharpness.
//!
//! All bounds are stated for the remainder `R_n = (-1)^(n+1) int S_n f^(n)`
//! (or for the shifted remainder `tilde R_n` in the Hoelder case) and are
//! checked by dominance sweeps in the verification suites.

use crate::algebra::{beta, factorial, gamma_ratio, neg_one_pow};
use crate::error::{Error, Result};
use crate::functions::{lp_norm, HolderSpec, NormSpec, TestFunction};
use crate::kernels::{
    abs_moment_s, q_moment_s, s_at, s_integral_over, sup_abs_k, sup_abs_s, Interval, KernelMode,
    NodeTriple,
};
use crate::oracle;
use serde::{Deserialize, Serialize};

/// One bound evaluation: the bound value, the remainder it must dominate,
/// and the resulting satisfied flag and tightness ratio.
///
/// Serializes to the wire schema used by the CLI (JSON object with exactly
/// these fields; `p` is `"1"`, `"2"`, ..., or `"inf"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: String,
    pub n: usize,
    pub p: String,
    pub nodes: [f64; 3],
    pub interval: [f64; 2],
    pub value: f64,
    pub remainder: f64,
    pub satisfied: bool,
    pub tightness: f64,
    pub h_estimated: bool,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        bound: impl Into<String>,
        n: usize,
        p: NormSpec,
        nodes: NodeTriple,
        iv: Interval,
        value: f64,
        remainder_abs: f64,
        h_estimated: bool,
    ) -> Self {
        BoundReport {
            bound: bound.into(),
            n,
            p: p.wire(),
            nodes: [nodes.y(), nodes.x(), nodes.z()],
            interval: [iv.a(), iv.b()],
            value,
            remainder: remainder_abs,
            satisfied: satisfied(remainder_abs, value),
            tightness: if value == 0.0 {
                0.0
            } else {
                remainder_abs / value
            },
            h_estimated,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn csv_header() -> &'static str {
        "bound,n,p,y,x,z,a,b,value,remainder,satisfied,tightness,h_estimated"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.bound,
            self.n,
            self.p,
            self.nodes[0],
            self.nodes[1],
            self.nodes[2],
            self.interval[0],
            self.interval[1],
            self.value,
            self.remainder,
            self.satisfied,
            self.tightness,
            self.h_estimated
        )
    }
}

/// The dominance predicate used everywhere: a bound is satisfied when
/// `remainder <= value (1 + 1e-8) + 1e-12`.
pub fn satisfied(remainder_abs: f64, bound_value: f64) -> bool {
    remainder_abs <= bound_value * (1.0 + 1e-8) + 1e-12
}

/// Variation bound: `sup|S_n| * varval`, where `varval` is the total
/// p-variation of `f^(n-1)` (the oscillation when `p = inf`).
pub fn bound_variation(n: usize, nodes: NodeTriple, iv: Interval, varval: f64) -> f64 {
    sup_abs_s(n, nodes, iv) * varval
}

/// Lebesgue-norm bound on `R_n` paired against `||f^(n)||_p`:
/// `p = 1` uses `sup|S_n|`, finite `p > 1` the conjugate kernel norm, and
/// `p = inf` the absolute kernel moment.
pub fn bound_lp(
    n: usize,
    p: NormSpec,
    nodes: NodeTriple,
    iv: Interval,
    normval: f64,
) -> Result<f64> {
    let factor = match p {
        NormSpec::P(1.0) => sup_abs_s(n, nodes, iv),
        NormSpec::P(_) => {
            let q = match p.conjugate() {
                NormSpec::P(q) => q,
                NormSpec::Inf => unreachable!("finite p > 1 has finite conjugate"),
            };
            q_moment_s(n, q, nodes, iv)?.powf(1.0 / q)
        }
        NormSpec::Inf => abs_moment_s(n, nodes, iv),
    };
    Ok(factor * normval)
}

/// The extremal function for the Lebesgue-norm bound, `1 < p <= inf`. Its
/// n-th derivative is `sgn(S_n) |S_n|^(1/(p-1))` (just the sign for
/// `p = inf`); lower derivatives come from the iterated-kernel integral and
/// are evaluated by oracle integration on demand.
pub fn extremal_f0(n: usize, p: NormSpec, nodes: NodeTriple, iv: Interval) -> Result<TestFunction> {
    let exponent = match p {
        NormSpec::Inf => 0.0,
        NormSpec::P(pv) if pv > 1.0 => 1.0 / (pv - 1.0),
        NormSpec::P(_) => {
            return Err(Error::Domain(
                "no extremal function at p = 1; use the spike family instead".into(),
            ))
        }
    };
    if n == 0 {
        return Err(Error::Domain("kernel order must be >= 1".into()));
    }
    let g = move |t: f64| {
        let s = s_at(KernelMode::Standard, n, t, nodes, iv);
        if s == 0.0 {
            0.0
        } else {
            s.signum() * s.abs().powf(exponent)
        }
    };
    let name = format!("extremal_f0(n={n}, p={})", p.wire());
    Ok(TestFunction::new(name, n, move |k, t| {
        if k == n {
            return g(t);
        }
        if t <= iv.a() {
            return 0.0;
        }
        let m = n - 1 - k;
        let seg = match Interval::new(iv.a(), t.min(iv.b())) {
            Ok(seg) => seg,
            Err(_) => return 0.0,
        };
        let cuts = [nodes.y(), nodes.x(), nodes.z()];
        oracle::integrate(
            |u| (t - u).powi(m as i32) / factorial(m) * g(u),
            seg,
            &cuts,
            oracle::default_tol(seg),
        )
        .map(|q| q.value)
        .unwrap_or(f64::NAN)
    }))
}

/// Tightness of the extremal function: `|R_n(f0)| / bound_lp` with both the
/// remainder and the norm evaluated by the oracle. Approaches 1 for
/// `1 < p <= inf`.
pub fn extremal_tightness(n: usize, p: NormSpec, nodes: NodeTriple, iv: Interval) -> Result<f64> {
    let f0 = extremal_f0(n, p, nodes, iv)?;
    let remainder = crate::quadrature::remainder_numeric(&f0, n, nodes, iv)?;
    let norm = lp_norm(&f0, n, p, iv)?;
    let bound = bound_lp(n, p, nodes, iv, norm)?;
    if bound == 0.0 {
        return Err(Error::Domain("degenerate configuration: zero bound".into()));
    }
    Ok(remainder.abs() / bound)
}

/// Which side of `t0` the spike ramp occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikeSide {
    Left,
    Right,
}

/// The ramp profile whose distributional n-th derivative concentrates unit
/// mass, `1/eps` tall, on an `eps`-window at `t0`. Used for the `p = 1`
/// best-possible probe.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonSpike {
    pub t0: f64,
    pub eps: f64,
    pub side: SpikeSide,
}

impl EpsilonSpike {
    pub fn new(t0: f64, eps: f64, side: SpikeSide) -> Result<Self> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::Domain(format!(
                "spike width must be positive, got {eps}"
            )));
        }
        Ok(EpsilonSpike { t0, eps, side })
    }

    /// The window carrying the unit mass.
    pub fn window(&self) -> (f64, f64) {
        match self.side {
            SpikeSide::Left => (self.t0 - self.eps, self.t0),
            SpikeSide::Right => (self.t0, self.t0 + self.eps),
        }
    }

    /// The induced n-th derivative profile: `1/eps` on the window, 0 off it.
    pub fn nth_derivative(&self, t: f64) -> f64 {
        let (lo, hi) = self.window();
        if t >= lo && t <= hi {
            1.0 / self.eps
        } else {
            0.0
        }
    }

    /// The ramp itself (the (n-1)-th derivative): 0 before, linear on the
    /// window, 1 after.
    pub fn ramp(&self, t: f64) -> f64 {
        let (lo, hi) = self.window();
        if t <= lo {
            0.0
        } else if t >= hi {
            1.0
        } else {
            (t - lo) / self.eps
        }
    }
}

/// Locates the supremum of `|S_n|` over branch closures and picks the spike
/// side whose window stays inside the attaining branch.
pub fn spike_location(n: usize, nodes: NodeTriple, iv: Interval) -> (f64, SpikeSide) {
    let [g1, g2, g3, g4] = nodes.gaps(iv);
    let e = n as i32;
    // candidate branch-end values of |S_n| * n!
    let candidates = [
        (g1.powi(e), nodes.y(), SpikeSide::Left),
        (g2.powi(e), nodes.y(), SpikeSide::Right),
        (g3.powi(e), nodes.z(), SpikeSide::Left),
        (g4.powi(e), nodes.z(), SpikeSide::Right),
    ];
    let best = candidates
        .iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .copied()
        .unwrap();
    (best.1, best.2)
}

/// Concentration ratio of the spike family at width `eps`:
/// `|int_window S_n| / eps / sup|S_n|`. Tends to 1 as `eps -> 0`; at
/// `eps = 1e-3` it certifies the `p = 1` constant to within 1%.
pub fn spike_tightness(n: usize, nodes: NodeTriple, iv: Interval, eps: f64) -> Result<f64> {
    let (t0, side) = spike_location(n, nodes, iv);
    let spike = EpsilonSpike::new(t0, eps, side)?;
    let (lo, hi) = spike.window();
    let lo = lo.max(iv.a());
    let hi = hi.min(iv.b());
    let mass = s_integral_over(n, lo, hi, nodes, iv)? / eps;
    let sup = sup_abs_s(n, nodes, iv);
    if sup == 0.0 {
        return Err(Error::Domain(
            "degenerate configuration: zero kernel".into(),
        ));
    }
    Ok(mass.abs() / sup)
}

/// Hoelder bound on the shifted remainder `tilde R_n` at reference point
/// `t0`, pairing `|t - t0|^r` against `S_{n-1}` in conjugate norms. The
/// `p` argument selects the pairing: `p = 1` puts the kernel in the sup
/// norm, finite `p > 1` uses the `(p, q)` split, and `p = inf` puts the
/// kernel in the 1-norm.
pub fn bound_holder(
    n: usize,
    spec: HolderSpec,
    nodes: NodeTriple,
    iv: Interval,
    t0: f64,
    p: NormSpec,
) -> Result<f64> {
    iv.check_contains(t0)?;
    if n == 0 {
        return Err(Error::Domain("order must be >= 1".into()));
    }
    let r = spec.r;
    let (a, b) = (iv.a(), iv.b());
    let value = match p {
        NormSpec::P(1.0) => {
            ((b - t0).powf(r + 1.0) + (t0 - a).powf(r + 1.0)) / (r + 1.0)
                * sup_abs_s(n - 1, nodes, iv)
        }
        NormSpec::P(pv) => {
            let q = pv / (pv - 1.0);
            let t_part = (((b - t0).powf(pv * r + 1.0) + (t0 - a).powf(pv * r + 1.0))
                / (pv * r + 1.0))
                .powf(1.0 / pv);
            t_part * q_moment_s(n - 1, q, nodes, iv)?.powf(1.0 / q)
        }
        NormSpec::Inf => {
            (0.5 * iv.length() + (t0 - iv.midpoint()).abs()).powf(r)
                * abs_moment_s(n - 1, nodes, iv)
        }
    };
    Ok(spec.h * value)
}

/// Hoelder bound at collapsed nodes `(x, x, x)`:
/// `H * Gamma(1+r)/Gamma(1+n+r) * [(x-a)^(r+n) + (b-x)^(r+n)]`. For `r = 1`
/// the Gamma ratio is `1/(n+1)!` (the Lipschitz case).
pub fn bound_holder_collapsed(n: usize, spec: HolderSpec, x: f64, iv: Interval) -> Result<f64> {
    iv.check_contains(x)?;
    let ratio = gamma_ratio(spec.r, n)?;
    Ok(spec.h
        * ratio
        * ((x - iv.a()).powf(spec.r + n as f64) + (iv.b() - x).powf(spec.r + n as f64)))
}

/// The shifted remainder
/// `tilde R_n = (-1)^n int [f^(n-1)(t) - f^(n-1)(t0)] S_{n-1}(t) dt`
/// (the absolutely continuous part of `dS_n`), split at the breakpoints.
pub fn tilde_remainder(
    n: usize,
    t0: f64,
    nodes: NodeTriple,
    iv: Interval,
    f: &TestFunction,
) -> Result<f64> {
    iv.check_contains(t0)?;
    if n == 0 {
        return Err(Error::Domain("order must be >= 1".into()));
    }
    if n - 1 > f.max_order() {
        return Err(Error::DerivativeOrder {
            name: f.name().to_string(),
            requested: n - 1,
            available: f.max_order(),
        });
    }
    let base = f.value_at(n - 1, t0)?;
    let fc = f.clone();
    let integrand = move |t: f64| {
        (fc.value_at(n - 1, t).unwrap_or(f64::NAN) - base)
            * s_at(KernelMode::Standard, n - 1, t, nodes, iv)
    };
    let q = oracle::integrate(
        integrand,
        iv,
        &[nodes.y(), nodes.x(), nodes.z()],
        oracle::default_tol(iv),
    )?;
    Ok(neg_one_pow(n) * q.value)
}

/// Residual of the boundary decomposition linking `R_n` to `tilde R_n`:
/// `R_n = (-1)^(n+1) [B_y + B_z] + tilde R_n` with
/// `B_y = [(y-a)^n - (y-x)^n]/n! (f^(n-1)(y) - f^(n-1)(t0))` and the
/// analogous `B_z`.
pub fn tilde_decomposition_residual(
    n: usize,
    t0: f64,
    nodes: NodeTriple,
    iv: Interval,
    f: &TestFunction,
) -> Result<f64> {
    let r = crate::quadrature::remainder_numeric(f, n, nodes, iv)?;
    let tilde = tilde_remainder(n, t0, nodes, iv, f)?;
    let base = f.value_at(n - 1, t0)?;
    let e = n as i32;
    let b_y = ((nodes.y() - iv.a()).powi(e) - (nodes.y() - nodes.x()).powi(e)) / factorial(n)
        * (f.value_at(n - 1, nodes.y())? - base);
    let b_z = ((nodes.z() - nodes.x()).powi(e) - (nodes.z() - iv.b()).powi(e)) / factorial(n)
        * (f.value_at(n - 1, nodes.z())? - base);
    Ok((r - (neg_one_pow(n + 1) * (b_y + b_z) + tilde)).abs())
}

/// Norm factor `N` of the harmonic-sequence error bound
/// `|E_n| <= N ||f^(n)||_p`: the sup, conjugate-norm integral, or plain
/// integral of `|Q_{n-1} K|` depending on `p`, all over `1/n`.
pub fn bound_fink(
    n: usize,
    p: NormSpec,
    ctx: &crate::fink::FinkContext,
    normval: f64,
) -> Result<f64> {
    let (nodes, iv) = (ctx.nodes(), ctx.iv());
    let q_poly = ctx.seq().get(n - 1).clone();
    let prod = move |t: f64| q_poly.eval(t) * s_at(KernelMode::Standard, 1, t, nodes, iv);
    let cuts = [nodes.y(), nodes.x(), nodes.z()];
    let factor = match p {
        NormSpec::P(1.0) => oracle::grid_sup(&prod, iv, 4096)?,
        NormSpec::P(pv) => {
            let q = pv / (pv - 1.0);
            oracle::integrate(
                |t| prod(t).abs().powf(q),
                iv,
                &cuts,
                oracle::default_tol(iv),
            )?
            .value
            .max(0.0)
            .powf(1.0 / q)
        }
        NormSpec::Inf => {
            oracle::integrate(|t| prod(t).abs(), iv, &cuts, oracle::default_tol(iv))?.value
        }
    };
    Ok(factor / n as f64 * normval)
}

/// Factored form of the same bound: `(1/n) sup|K| * ||Q_{n-1}||_q * normval`
/// with `q` conjugate to `p`. Always at least as large as [`bound_fink`].
pub fn bound_fink_factored(
    n: usize,
    p: NormSpec,
    ctx: &crate::fink::FinkContext,
    normval: f64,
) -> Result<f64> {
    let (nodes, iv) = (ctx.nodes(), ctx.iv());
    let q_poly = ctx.seq().get(n - 1).clone();
    let q_norm = match p.conjugate() {
        NormSpec::Inf => oracle::grid_sup(|t| q_poly.eval(t), iv, 4096)?,
        NormSpec::P(q) => oracle::integrate(
            |t| q_poly.eval(t).abs().powf(q),
            iv,
            &[],
            oracle::default_tol(iv),
        )?
        .value
        .max(0.0)
        .powf(1.0 / q),
    };
    Ok(sup_abs_k(nodes, iv) * q_norm / n as f64 * normval)
}

/// Sharp constant of the symmetric-rule bound
/// `|deficit| <= K(n, p, x) ||f^(n)||_p` for `x` in `[a, (a+b)/2]`:
///
/// ```text
/// p = 1:        (1/(n n! (b-a))) ((n-1)/n)^(n-1) [ (b-a)/4 + |x - (3a+b)/4| ]^n
/// 1 < p <= inf: (2^(1/q)/(n! (b-a))) [ (x-a)^(nq+1) + ((a+b)/2 - x)^(nq+1) ]^(1/q)
///                 * B((n-1)q + 1, q + 1)^(1/q),   q = p/(p-1)
/// ```
///
/// with `0^0 := 1` at `n = 1`. At `n = 1` these reproduce the classical
/// companion-rule constants exactly; the dominance sweeps use them at
/// `n = 1` only.
pub fn gs_sharp_constant(n: usize, p: NormSpec, x: f64, iv: Interval) -> Result<f64> {
    if !(iv.a() <= x && x <= iv.midpoint()) {
        return Err(Error::Domain(format!(
            "sharp constant needs x in [{}, {}], got {x}",
            iv.a(),
            iv.midpoint()
        )));
    }
    if n == 0 {
        return Err(Error::Domain("order must be >= 1".into()));
    }
    let nf = factorial(n);
    let len = iv.length();
    match p {
        NormSpec::P(1.0) => {
            let shape = if n == 1 {
                1.0
            } else {
                ((n - 1) as f64 / n as f64).powi((n - 1) as i32)
            };
            let reach = 0.25 * len + (x - (3.0 * iv.a() + iv.b()) / 4.0).abs();
            Ok(shape * reach.powi(n as i32) / (n as f64 * nf * len))
        }
        _ => {
            let q = match p.conjugate() {
                NormSpec::P(q) => q,
                NormSpec::Inf => unreachable!("p > 1 has finite conjugate"),
            };
            let e = n as f64 * q + 1.0;
            let gaps = (x - iv.a()).powf(e) + (iv.midpoint() - x).powf(e);
            let b = beta((n - 1) as f64 * q + 1.0, q + 1.0)?;
            Ok(2f64.powf(1.0 / q) / (nf * len) * gaps.powf(1.0 / q) * b.powf(1.0 / q))
        }
    }
}

/// Sharpness probe for the symmetric-rule constant: aligns `f^(n)` with the
/// weighted kernel `W(t) = (x-t)^(n-1) S(t,x)` and reports
/// `|int W f^(n)| / (n! (b-a)) / (K(n,p,x) ||f^(n)||_p)`. Exact at `n = 1`.
pub fn gs_sharpness_ratio(n: usize, p: NormSpec, x: f64, iv: Interval) -> Result<f64> {
    let nodes = NodeTriple::symmetric(x, iv)?;
    let qexp = match p {
        NormSpec::Inf => 1.0,
        NormSpec::P(pv) if pv > 1.0 => pv / (pv - 1.0),
        NormSpec::P(_) => {
            return Err(Error::Domain(
                "p = 1 sharpness uses the spike family".into(),
            ))
        }
    };
    let w =
        move |t: f64| (x - t).powi((n - 1) as i32) * s_at(KernelMode::Standard, 1, t, nodes, iv);
    let g = move |t: f64| {
        let v = w(t);
        if v == 0.0 {
            0.0
        } else {
            v.signum() * v.abs().powf(qexp - 1.0)
        }
    };
    let cuts = [nodes.y(), nodes.x(), nodes.z()];
    let tol = oracle::default_tol(iv);
    let attained = oracle::integrate(|t| w(t) * g(t), iv, &cuts, tol)?
        .value
        .abs()
        / (factorial(n) * iv.length());
    let norm = match p {
        NormSpec::Inf => 1.0,
        NormSpec::P(pv) => oracle::integrate(|t| g(t).abs().powf(pv), iv, &cuts, tol)?
            .value
            .max(0.0)
            .powf(1.0 / pv),
    };
    let bound = gs_sharp_constant(n, p, x, iv)? * norm;
    if bound == 0.0 {
        return Err(Error::Domain("degenerate configuration: zero bound".into()));
    }
    Ok(attained / bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::p_variation;
    use crate::quadrature::remainder_numeric;
    use crate::rng::SplitMix64;

    fn iv01() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn nodes(y: f64, x: f64, z: f64, iv: Interval) -> NodeTriple {
        NodeTriple::new(y, x, z, iv).unwrap()
    }

    #[test]
    fn variation_bound_examples() {
        let iv = iv01();
        let sym = nodes(0.25, 0.5, 0.75, iv);
        assert!((bound_variation(1, sym, iv, 1.0) - 0.25).abs() < 1e-15);
        assert_eq!(bound_variation(2, sym, iv, 0.0), 0.0);
        // collapsed nodes: factor max{x-a, b-x}
        let col = nodes(0.3, 0.3, 0.3, iv);
        assert!((bound_variation(1, col, iv, 2.0) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn lp_bound_examples() {
        let iv = iv01();
        let mid = nodes(0.5, 0.5, 0.5, iv);
        let v = bound_lp(1, NormSpec::Inf, mid, iv, 1.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let v = bound_lp(1, NormSpec::P(2.0), mid, iv, 1.0).unwrap();
        assert!((v - (0.25f64 / 3.0).sqrt()).abs() < 1e-12);
        let v = bound_lp(3, NormSpec::P(1.5), mid, iv, 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn lp_bound_dominates_registry_remainders() {
        let iv = iv01();
        let mut rng = SplitMix64::new(211);
        for f in [TestFunction::exp(), TestFunction::runge()] {
            for n in 1..=3 {
                for _ in 0..10 {
                    let (y, x, z) = rng.sorted_triple(0.0, 1.0);
                    let nd = nodes(y, x, z, iv);
                    let r = remainder_numeric(&f, n, nd, iv).unwrap().abs();
                    for p in [
                        NormSpec::P(1.0),
                        NormSpec::P(2.0),
                        NormSpec::P(3.0),
                        NormSpec::Inf,
                    ] {
                        let norm = lp_norm(&f, n, p, iv).unwrap();
                        let b = bound_lp(n, p, nd, iv, norm).unwrap();
                        assert!(
                            satisfied(r, b),
                            "{} n={n} p={}: {r} vs {b}",
                            f.name(),
                            p.wire()
                        );
                    }
                    let osc = p_variation(&f, n - 1, NormSpec::Inf, iv).unwrap();
                    let b = bound_variation(n, nd, iv, osc);
                    assert!(satisfied(r, b), "variation: {r} vs {b}");
                }
            }
        }
    }

    #[test]
    fn extremal_function_attains_lp_bound() {
        let iv = iv01();
        let mid = nodes(0.5, 0.5, 0.5, iv);
        let t = extremal_tightness(1, NormSpec::Inf, mid, iv).unwrap();
        assert!((t - 1.0).abs() <= 1e-6, "p=inf tightness {t}");
        let t = extremal_tightness(1, NormSpec::P(2.0), mid, iv).unwrap();
        assert!((t - 1.0).abs() <= 1e-6, "p=2 tightness {t}");
        let t = extremal_tightness(2, NormSpec::P(2.0), nodes(0.25, 0.5, 0.75, iv), iv).unwrap();
        assert!((t - 1.0).abs() <= 1e-6, "n=2 tightness {t}");
        assert!(extremal_f0(1, NormSpec::P(1.0), mid, iv).is_err());
    }

    #[test]
    fn extremal_sign_profile_for_sup_norm() {
        let iv = iv01();
        let nd = nodes(0.2, 0.5, 0.8, iv);
        let f0 = extremal_f0(3, NormSpec::Inf, nd, iv).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let t = rng.next_f64();
            let v = f0.value_at(3, t).unwrap();
            assert!(v == 1.0 || v == -1.0 || v == 0.0, "sign profile value {v}");
        }
    }

    #[test]
    fn spike_concentrates_unit_mass() {
        let spike = EpsilonSpike::new(0.5, 1e-3, SpikeSide::Left).unwrap();
        let (lo, hi) = spike.window();
        assert!((hi - lo - 1e-3).abs() < 1e-18);
        // the induced n-th derivative integrates to one over the window
        let mass = spike.nth_derivative(0.4995) * (hi - lo);
        assert!((mass - 1.0).abs() < 1e-12);
        assert_eq!(spike.ramp(0.3), 0.0);
        assert_eq!(spike.ramp(0.7), 1.0);
    }

    #[test]
    fn spike_tightness_near_one_and_monotone() {
        let iv = iv01();
        for n in 1..=4 {
            let nd = nodes(0.25, 0.5, 0.75, iv);
            let tight = spike_tightness(n, nd, iv, 1e-3).unwrap();
            assert!(tight >= 0.99, "n={n}: {tight}");
            let loose = spike_tightness(n, nd, iv, 0.1).unwrap();
            assert!(loose < tight, "n={n}: {loose} vs {tight}");
        }
    }

    #[test]
    fn holder_bound_branches_and_specializations() {
        let iv = iv01();
        let nd = nodes(0.25, 0.5, 0.75, iv);
        let spec = HolderSpec::new(0.5, 2.0).unwrap();

        // zero constant gives a zero bound in every branch
        let zero = HolderSpec::new(0.5, 0.0).unwrap();
        for p in [NormSpec::P(1.0), NormSpec::P(2.0), NormSpec::Inf] {
            assert_eq!(bound_holder(1, zero, nd, iv, 0.3, p).unwrap(), 0.0);
        }

        // symmetric nodes, t0 at the midpoint: first branch reduces to
        // (b-a)^(r+1) / (2^r (r+1)) * sup|S_{n-1}|
        let b = bound_holder(2, spec, nd, iv, 0.5, NormSpec::P(1.0)).unwrap();
        let want = spec.h * 1.0f64.powf(1.5) / (2f64.powf(0.5) * 1.5) * sup_abs_s(1, nd, iv);
        assert!((b - want).abs() <= 1e-13);

        assert!(HolderSpec::new(1.5, 1.0).is_err());
        assert!(HolderSpec::new(0.5, -1.0).is_err());
    }

    #[test]
    fn holder_bound_dominates_tilde_remainder() {
        let iv = iv01();
        let mut rng = SplitMix64::new(411);
        for f in [TestFunction::exp(), TestFunction::sin()] {
            for n in 1..=3 {
                let (y, x, z) = rng.sorted_triple(0.0, 1.0);
                let nd = nodes(y, x, z, iv);
                for r in [0.5, 1.0] {
                    let h = crate::functions::holder_estimate(&f, n - 1, r, iv).unwrap();
                    let spec = HolderSpec::new(r, h).unwrap();
                    for t0 in [x, 0.5, rng.next_f64()] {
                        let tr = tilde_remainder(n, t0, nd, iv, &f).unwrap().abs();
                        for p in [NormSpec::P(1.0), NormSpec::P(2.0), NormSpec::Inf] {
                            let b = bound_holder(n, spec, nd, iv, t0, p).unwrap();
                            assert!(
                                satisfied(tr, b),
                                "{} n={n} r={r} t0={t0} p={}: {tr} vs {b}",
                                f.name(),
                                p.wire()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tilde_decomposition_holds() {
        let iv = iv01();
        let mut rng = SplitMix64::new(911);
        for f in [TestFunction::exp(), TestFunction::runge()] {
            for n in 1..=4 {
                for _ in 0..10 {
                    let (y, x, z) = rng.sorted_triple(0.0, 1.0);
                    let nd = nodes(y, x, z, iv);
                    let t0 = rng.next_f64();
                    let res = tilde_decomposition_residual(n, t0, nd, iv, &f).unwrap();
                    assert!(res <= 1e-8, "{} n={n}: {res}", f.name());
                }
            }
        }
    }

    #[test]
    fn tilde_equals_remainder_at_collapsed_nodes() {
        let iv = iv01();
        let f = TestFunction::exp();
        for n in 1..=4 {
            let x = 0.3;
            let nd = nodes(x, x, x, iv);
            let tilde = tilde_remainder(n, x, nd, iv, &f).unwrap();
            let r = remainder_numeric(&f, n, nd, iv).unwrap();
            assert!((tilde - r).abs() <= 1e-10, "n={n}: {tilde} vs {r}");
        }
        // low-degree polynomials vanish
        let lin = TestFunction::polynomial(&[1.0, 2.0]);
        let tr = tilde_remainder(3, 0.4, nodes(0.1, 0.5, 0.9, iv), iv, &lin).unwrap();
        assert!(tr.abs() <= 1e-13);
    }

    #[test]
    fn collapsed_holder_bound_matches_lipschitz_form() {
        let iv = iv01();
        // r = 1: H / (n+1)! [ (x-a)^(n+1) + (b-x)^(n+1) ]
        for n in 1..=4 {
            let spec = HolderSpec::new(1.0, 3.0).unwrap();
            let x = 0.3;
            let got = bound_holder_collapsed(n, spec, x, iv).unwrap();
            let want = 3.0 / factorial(n + 1) * ((x_pow(x, n + 1)) + (x_pow(1.0 - x, n + 1)));
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "n={n}");
        }
        // midpoint, n = 1, r = 1: L/4
        let spec = HolderSpec::new(1.0, 1.0).unwrap();
        let got = bound_holder_collapsed(1, spec, 0.5, iv).unwrap();
        assert!((got - 0.25).abs() <= 1e-13);
        let zero = HolderSpec::new(0.7, 0.0).unwrap();
        assert_eq!(bound_holder_collapsed(2, zero, 0.4, iv).unwrap(), 0.0);
    }

    fn x_pow(x: f64, k: usize) -> f64 {
        x.powi(k as i32)
    }

    #[test]
    fn collapsed_holder_dominates_collapsed_remainder() {
        let iv = iv01();
        for f in [TestFunction::exp(), TestFunction::cos()] {
            for n in 1..=3 {
                for x in [0.2, 0.5, 0.8] {
                    let nd = nodes(x, x, x, iv);
                    let r = remainder_numeric(&f, n, nd, iv).unwrap().abs();
                    // r = 1 with the certified Lipschitz constant sup|f^(n)|
                    let (lo, hi) = crate::functions::extrema(&f, n, iv).unwrap();
                    let lip = lo.abs().max(hi.abs());
                    let b = bound_holder_collapsed(n, HolderSpec::new(1.0, lip).unwrap(), x, iv)
                        .unwrap();
                    assert!(satisfied(r, b), "{} n={n} x={x}: {r} vs {b}", f.name());
                }
            }
        }
    }

    #[test]
    fn fink_bounds_dominate_and_order() {
        use crate::algebra::HarmonicSequence;
        use crate::fink::{fink_quadrature, FinkContext};
        let iv = iv01();
        let mut rng = SplitMix64::new(67);
        for f in [TestFunction::exp(), TestFunction::sin()] {
            for n in 1..=3 {
                let (y, x, z) = rng.sorted_triple(0.0, 1.0);
                let nd = nodes(y, x, z, iv);
                let ctx =
                    FinkContext::new(HarmonicSequence::shifted_monomials(x, n), n, nd, iv).unwrap();
                let (_, e) = fink_quadrature(&ctx, &f).unwrap();
                let e = e.abs();
                for p in [
                    NormSpec::P(1.0),
                    NormSpec::P(2.0),
                    NormSpec::P(3.0),
                    NormSpec::Inf,
                ] {
                    let norm = lp_norm(&f, n, p, iv).unwrap();
                    let tight = bound_fink(n, p, &ctx, norm).unwrap();
                    let loose = bound_fink_factored(n, p, &ctx, norm).unwrap();
                    assert!(
                        satisfied(e, tight),
                        "{} n={n} p={}: {e} vs {tight}",
                        f.name(),
                        p.wire()
                    );
                    assert!(tight <= loose * (1.0 + 1e-9), "factored must not tighten");
                }
            }
        }
    }

    #[test]
    fn fink_factored_closed_form_at_full_span() {
        use crate::algebra::HarmonicSequence;
        use crate::fink::FinkContext;
        // nodes (a, x, b): sup|K| = (b-a)/2 + |x - (a+b)/2|
        let iv = iv01();
        let nd = nodes(0.0, 0.3, 1.0, iv);
        let ctx = FinkContext::new(HarmonicSequence::shifted_monomials(0.0, 1), 1, nd, iv).unwrap();
        let b = bound_fink_factored(1, NormSpec::Inf, &ctx, 1.0).unwrap();
        // Q_0 = 1, q = 1: ||Q_0||_1 = 1, sup|K| = 0.7
        assert!((b - 0.7).abs() <= 1e-10, "{b}");
    }

    #[test]
    fn gs_constants_reproduce_companion_rule_forms() {
        // against the three classical companion-rule constants, normalized
        let cases = [(0.0, 1.0), (-1.0, 2.0)];
        for (a, b) in cases {
            let iv = Interval::new(a, b).unwrap();
            let len = iv.length();
            let mut rng = SplitMix64::new(3);
            for _ in 0..20 {
                let x = iv.a() + 0.5 * len * rng.next_f64();
                let u = x - a;
                // p = inf (q = 1): the 1/8-form constant
                // [1/8 + 2((x - (3a+b)/4)/(b-a))^2] (b-a)
                let k = gs_sharp_constant(1, NormSpec::Inf, x, iv).unwrap();
                let classical = (1.0 / 8.0 + 2.0 * ((u - len / 4.0) / len).powi(2)) * len;
                assert!(
                    (k - classical).abs() <= 1e-12 * classical.max(1.0),
                    "inf-form at x={x}"
                );
                // at x = (3a+b)/4 the constant is exactly (b-a)/8
                let k8 = gs_sharp_constant(1, NormSpec::Inf, a + 0.25 * len, iv).unwrap();
                assert!((k8 - len / 8.0).abs() <= 1e-13 * len, "1/8 form");
                // p = 1: the 1/4 form, 1/4 + |x - (3a+b)/4|/(b-a)
                let k1 = gs_sharp_constant(1, NormSpec::P(1.0), x, iv).unwrap();
                let classical1 = 0.25 + ((u - len / 4.0) / len).abs();
                assert!((k1 - classical1).abs() <= 1e-12, "1-form at x={x}");
                // p = 2 (q = 2) against the q-form
                let k2 = gs_sharp_constant(1, NormSpec::P(2.0), x, iv).unwrap();
                let q = 2.0;
                let classical_q = 2f64.powf(1.0 / q) / (q + 1.0).powf(1.0 / q)
                    * ((u / len).powf(q + 1.0) + ((len / 2.0 - u) / len).powf(q + 1.0))
                        .powf(1.0 / q)
                    * len.powf(1.0 / q);
                assert!(
                    (k2 - classical_q).abs() <= 1e-12 * classical_q.max(1.0),
                    "q-form at x={x}"
                );
            }
            // x = a, p = 1 is exactly 1/2
            let v = gs_sharp_constant(1, NormSpec::P(1.0), a, iv).unwrap();
            assert!((v - 0.5).abs() <= 1e-14);
        }
    }

    #[test]
    fn gs_constant_rejects_out_of_range_x() {
        let iv = iv01();
        assert!(gs_sharp_constant(1, NormSpec::Inf, 0.75, iv).is_err());
    }

    #[test]
    fn gs_dominance_and_sharpness_at_order_one() {
        let iv = iv01();
        for f in [TestFunction::exp(), TestFunction::runge()] {
            for x in [0.0, 0.25, 0.5] {
                let lhs = crate::fink::gs_lhs(x, 1, &f, iv).unwrap().abs();
                for p in [
                    NormSpec::P(1.0),
                    NormSpec::P(2.0),
                    NormSpec::P(3.0),
                    NormSpec::Inf,
                ] {
                    let norm = lp_norm(&f, 1, p, iv).unwrap();
                    let b = gs_sharp_constant(1, p, x, iv).unwrap() * norm;
                    assert!(
                        satisfied(lhs, b),
                        "{} x={x} p={}: {lhs} vs {b}",
                        f.name(),
                        p.wire()
                    );
                }
            }
        }
        for p in [NormSpec::P(2.0), NormSpec::Inf] {
            for x in [0.0, 0.25, 0.4] {
                let ratio = gs_sharpness_ratio(1, p, x, iv).unwrap();
                assert!((ratio - 1.0).abs() <= 1e-6, "p={} x={x}: {ratio}", p.wire());
            }
        }
    }

    #[test]
    fn report_flags_and_serialization() {
        let iv = iv01();
        let nd = nodes(0.25, 0.5, 0.75, iv);
        let rep = BoundReport::new("lp", 1, NormSpec::Inf, nd, iv, 0.25, 0.1, false);
        assert!(rep.satisfied);
        assert!((rep.tightness - 0.4).abs() < 1e-15);
        let json = rep.to_json();
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);

        let bad = BoundReport::new("lp", 1, NormSpec::P(1.0), nd, iv, 0.1, 0.25, true);
        assert!(!bad.satisfied);
        assert_eq!(
            BoundReport::csv_header().split(',').count(),
            bad.to_csv_row().split(',').count()
        );
    }
}
