//! Piecewise Peano kernels for the two-point rule, together with their
//! closed-form moments and suprema.
//!
//! The order-`n` kernel on `[a, b]` with nodes `a <= y <= x <= z <= b` is
//!
//! ```text
//!           (t - a)^n / n!   on [a, y]
//! S_n(t) =  (t - x)^n / n!   on (y, z)
//!           (t - b)^n / n!   on [z, b]
//! ```
//!
//! `K(t) = S_1(t)` is the first-order kernel. At the breakpoints `t = y` and
//! `t = z` the closed outer branches take precedence; the choice is
//! measure-zero for every integral and the suprema below are computed from
//! the closed forms over branch closures, so it never affects results.

use crate::algebra::factorial;
use crate::error::{Error, Result};

/// The integration domain `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }

    pub(crate) fn check_contains(&self, t: f64) -> Result<()> {
        if !self.contains(t) {
            return Err(Error::OutOfInterval {
                t,
                a: self.a,
                b: self.b,
            });
        }
        Ok(())
    }
}

/// Evaluation/weight nodes `(y, x, z)` with `a <= y <= x <= z <= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeTriple {
    y: f64,
    x: f64,
    z: f64,
}

impl NodeTriple {
    pub fn new(y: f64, x: f64, z: f64, iv: Interval) -> Result<Self> {
        if !(iv.a() <= y && y <= x && x <= z && z <= iv.b()) {
            return Err(Error::InvalidNodes {
                y,
                x,
                z,
                a: iv.a(),
                b: iv.b(),
            });
        }
        Ok(NodeTriple { y, x, z })
    }

    /// All three nodes at the same point `x`.
    pub fn collapsed(x: f64, iv: Interval) -> Result<Self> {
        Self::new(x, x, x, iv)
    }

    /// The symmetric triple `(x, (a+b)/2, a+b-x)` for `x` in `[a, (a+b)/2]`.
    pub fn symmetric(x: f64, iv: Interval) -> Result<Self> {
        if !(iv.a() <= x && x <= iv.midpoint()) {
            return Err(Error::Domain(format!(
                "symmetric nodes need x in [{}, {}], got {x}",
                iv.a(),
                iv.midpoint()
            )));
        }
        Self::new(x, iv.midpoint(), iv.a() + iv.b() - x, iv)
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// The four gap widths `(y - a, x - y, z - x, b - z)`.
    pub fn gaps(&self, iv: Interval) -> [f64; 4] {
        [
            self.y - iv.a(),
            self.x - self.y,
            self.z - self.x,
            iv.b() - self.z,
        ]
    }

    /// True when `(y, x, z)` is `(x0, (a+b)/2, a+b-x0)` up to `tol`.
    pub fn is_symmetric(&self, iv: Interval, tol: f64) -> bool {
        (self.x - iv.midpoint()).abs() <= tol && (self.y + self.z - iv.a() - iv.b()).abs() <= tol
    }
}

/// Kernel evaluation mode. `SignFlipped` is a verification hook used by the
/// negative-control suite: it negates the kernel so that every identity that
/// genuinely exercises the kernel must fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMode {
    #[default]
    Standard,
    SignFlipped,
}

impl KernelMode {
    fn sign(self) -> f64 {
        match self {
            KernelMode::Standard => 1.0,
            KernelMode::SignFlipped => -1.0,
        }
    }
}

/// Unchecked kernel value; assumes `t` is inside the interval.
pub(crate) fn s_at(mode: KernelMode, n: usize, t: f64, nodes: NodeTriple, iv: Interval) -> f64 {
    let shift = if t <= nodes.y() {
        iv.a()
    } else if t < nodes.z() {
        nodes.x()
    } else {
        iv.b()
    };
    mode.sign() * (t - shift).powi(n as i32) / factorial(n)
}

/// The kernel `S_n(t; y, x, z)`. Rejects `t` outside `[a, b]`.
pub fn eval_s(n: usize, t: f64, nodes: NodeTriple, iv: Interval) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("kernel order must be >= 1".into()));
    }
    iv.check_contains(t)?;
    Ok(s_at(KernelMode::Standard, n, t, nodes, iv))
}

/// The first-order kernel `K(t; y, x, z) = S_1(t; y, x, z)`.
pub fn eval_k(t: f64, nodes: NodeTriple, iv: Interval) -> Result<f64> {
    iv.check_contains(t)?;
    Ok(s_at(KernelMode::Standard, 1, t, nodes, iv))
}

/// The symmetric-rule kernel `S(t, x) = K(t; x, (a+b)/2, a+b-x)` for
/// `x` in `[a, (a+b)/2]`.
pub fn eval_gs(t: f64, x: f64, iv: Interval) -> Result<f64> {
    let nodes = NodeTriple::symmetric(x, iv)?;
    eval_k(t, nodes, iv)
}

/// Closed form of `int_a^b S_n dt`:
/// `[(y-a)^{n+1} + (z-x)^{n+1} + (-1)^n (x-y)^{n+1} + (-1)^n (b-z)^{n+1}] / (n+1)!`.
pub fn moment_s(n: usize, nodes: NodeTriple, iv: Interval) -> f64 {
    let [g1, g2, g3, g4] = nodes.gaps(iv);
    let e = (n + 1) as i32;
    let sign = crate::algebra::neg_one_pow(n);
    (g1.powi(e) + g3.powi(e) + sign * (g2.powi(e) + g4.powi(e))) / factorial(n + 1)
}

/// Closed form of `int_a^b |S_n| dt`: all four gap powers with plus signs.
pub fn abs_moment_s(n: usize, nodes: NodeTriple, iv: Interval) -> f64 {
    let [g1, g2, g3, g4] = nodes.gaps(iv);
    let e = (n + 1) as i32;
    (g1.powi(e) + g2.powi(e) + g3.powi(e) + g4.powi(e)) / factorial(n + 1)
}

/// Closed form of `int_a^b |S_n|^q dt` for `q >= 1`:
/// `[sum of gap^{nq+1}] / ((nq + 1) (n!)^q)`.
pub fn q_moment_s(n: usize, q: f64, nodes: NodeTriple, iv: Interval) -> Result<f64> {
    if !q.is_finite() || q < 1.0 {
        return Err(Error::Domain(format!(
            "q_moment_s requires q >= 1, got {q}"
        )));
    }
    let [g1, g2, g3, g4] = nodes.gaps(iv);
    let e = n as f64 * q + 1.0;
    let num = g1.powf(e) + g2.powf(e) + g3.powf(e) + g4.powf(e);
    Ok(num / (e * factorial(n).powf(q)))
}

/// Closed form of `sup |S_n|`:
/// `(1/n!) [max{(y-a), (z-y)/2 + |(y+z)/2 - x|, (b-z)}]^n`.
pub fn sup_abs_s(n: usize, nodes: NodeTriple, iv: Interval) -> f64 {
    sup_abs_k(nodes, iv).powi(n as i32) / factorial(n)
}

/// Closed form of `sup |K| = max{(y-a), (z-y)/2 + |(y+z)/2 - x|, (b-z)}`.
pub fn sup_abs_k(nodes: NodeTriple, iv: Interval) -> f64 {
    let mid_reach =
        0.5 * (nodes.z() - nodes.y()) + (0.5 * (nodes.y() + nodes.z()) - nodes.x()).abs();
    (nodes.y() - iv.a()).max(mid_reach).max(iv.b() - nodes.z())
}

/// Exact integral of `S_n` over `[lo, hi]` (a subrange of `[a, b]`),
/// splitting at the branch boundaries. Used by the concentration probes.
pub fn s_integral_over(n: usize, lo: f64, hi: f64, nodes: NodeTriple, iv: Interval) -> Result<f64> {
    iv.check_contains(lo)?;
    iv.check_contains(hi)?;
    if lo > hi {
        return Err(Error::Invalid(format!("empty window [{lo}, {hi}]")));
    }
    // antiderivative of (t - c)^n / n! is (t - c)^{n+1} / (n+1)!
    let piece = |u: f64, v: f64, c: f64| -> f64 {
        let e = (n + 1) as i32;
        ((v - c).powi(e) - (u - c).powi(e)) / factorial(n + 1)
    };
    let mut total = 0.0;
    let cuts = [
        (iv.a(), nodes.y(), iv.a()),
        (nodes.y(), nodes.z(), nodes.x()),
        (nodes.z(), iv.b(), iv.b()),
    ];
    for (ba, bb, c) in cuts {
        let u = lo.max(ba);
        let v = hi.min(bb);
        if v > u {
            total += piece(u, v, c);
        }
    }
    Ok(total)
}
