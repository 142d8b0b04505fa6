//! Seeded identity-residual suites: random spot checks of the expansion,
//! the harmonic-sequence representation, the symmetric rule, and the
//! Chebyshev-functional pairings.
//!
//! Each trial draws one configuration (function, order, nodes, interval,
//! sequence) from a deterministic stream and reports the worst normalized
//! residual of the identities that configuration exercises. The
//! `KernelMode` hook threads through to the kernel evaluations so the
//! negative-control run can demonstrate that a sign-flipped kernel makes
//! the expansion and representation suites fail.

use crate::algebra::HarmonicSequence;
use crate::error::Result;
use crate::fink::{
    fink_lhs, fink_quadrature_with, fink_rhs_with, gs_identity_residual_with,
    milovanovic_pecaric_residual, FinkContext,
};
use crate::functions::TestFunction;
use crate::gruss::{chebyshev_t, l_functional, l_pair, p_functional, p_pair, q_functional, q_pair};
use crate::kernels::{Interval, KernelMode, NodeTriple};
use crate::quadrature::{expansion_with, reference};
use crate::rng::SplitMix64;

/// Residual tolerance shared by every identity: `1e-8` times the case scale.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    Expansion,
    Fink,
    Gs,
    Gruss,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Expansion => "expansion",
            SuiteKind::Fink => "fink",
            SuiteKind::Gs => "gs",
            SuiteKind::Gruss => "gruss",
        }
    }

    pub fn parse(s: &str) -> Option<Vec<SuiteKind>> {
        match s {
            "expansion" => Some(vec![SuiteKind::Expansion]),
            "fink" => Some(vec![SuiteKind::Fink]),
            "gs" => Some(vec![SuiteKind::Gs]),
            "gruss" => Some(vec![SuiteKind::Gruss]),
            "all" => Some(vec![
                SuiteKind::Expansion,
                SuiteKind::Fink,
                SuiteKind::Gs,
                SuiteKind::Gruss,
            ]),
            _ => None,
        }
    }
}

/// One trial: the configuration label and its worst normalized residual.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub label: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.cases.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }
}

fn intervals() -> [Interval; 2] {
    [
        Interval::new(0.0, 1.0).unwrap(),
        Interval::new(-1.0, 2.0).unwrap(),
    ]
}

struct Draw {
    f: TestFunction,
    iv: Interval,
    nodes: NodeTriple,
}

fn draw_config(rng: &mut SplitMix64, registry: &[TestFunction]) -> Draw {
    let f = registry[(rng.next_u64() % registry.len() as u64) as usize].clone();
    let iv = intervals()[(rng.next_u64() % 2) as usize];
    let (y, x, z) = rng.sorted_triple(iv.a(), iv.b());
    let nodes = NodeTriple::new(y, x, z, iv).expect("sorted triple is admissible");
    Draw { f, iv, nodes }
}

fn case(label: String, residual: f64) -> CaseResult {
    CaseResult {
        label,
        residual,
        pass: residual <= IDENTITY_TOL,
    }
}

fn expansion_trial(
    rng: &mut SplitMix64,
    registry: &[TestFunction],
    mode: KernelMode,
) -> Result<CaseResult> {
    let d = draw_config(rng, registry);
    let n = 1 + (rng.next_u64() % 5) as usize;
    let res = expansion_with(mode, &d.f, n, d.nodes, d.iv)?;
    let normalized = res.identity_residual / res.residual_scale();
    Ok(case(
        format!(
            "expansion f={} n={n} iv=[{}, {}] nodes=({:.4}, {:.4}, {:.4})",
            d.f.name(),
            d.iv.a(),
            d.iv.b(),
            d.nodes.y(),
            d.nodes.x(),
            d.nodes.z()
        ),
        normalized,
    ))
}

fn fink_trial(
    rng: &mut SplitMix64,
    registry: &[TestFunction],
    mode: KernelMode,
) -> Result<CaseResult> {
    let d = draw_config(rng, registry);
    let n = 1 + (rng.next_u64() % 5) as usize;
    let (seq, seq_label) = match rng.next_u64() % 5 {
        0 => (
            HarmonicSequence::shifted_monomials(d.iv.a(), n),
            "alpha=a".to_string(),
        ),
        1 => (
            HarmonicSequence::shifted_monomials(d.nodes.x(), n),
            "alpha=x".to_string(),
        ),
        2 => (
            HarmonicSequence::shifted_monomials(d.iv.midpoint(), n),
            "alpha=mid".to_string(),
        ),
        3 => (
            HarmonicSequence::shifted_monomials(d.iv.b(), n),
            "alpha=b".to_string(),
        ),
        _ => (HarmonicSequence::nonmonomial(n), "nonmonomial".to_string()),
    };
    let ctx = FinkContext::new(seq, n, d.nodes, d.iv)?;
    let mean = reference(&d.f, d.iv)? / d.iv.length();
    let identity =
        (fink_lhs(&ctx, &d.f)? - fink_rhs_with(mode, &ctx, &d.f)?).abs() / (1.0 + mean.abs());
    let (g, e) = fink_quadrature_with(mode, &ctx, &d.f)?;
    let refv = reference(&d.f, d.iv)?;
    let split = (refv - (g + e)).abs() / (1.0 + refv.abs());
    Ok(case(
        format!(
            "fink f={} n={n} seq={seq_label} iv=[{}, {}]",
            d.f.name(),
            d.iv.a(),
            d.iv.b()
        ),
        identity.max(split),
    ))
}

fn gs_trial(
    rng: &mut SplitMix64,
    registry: &[TestFunction],
    mode: KernelMode,
) -> Result<CaseResult> {
    let f = registry[(rng.next_u64() % registry.len() as u64) as usize].clone();
    let iv = intervals()[(rng.next_u64() % 2) as usize];
    let n = 1 + (rng.next_u64() % 4) as usize;
    let x = match rng.next_u64() % 3 {
        0 => iv.a(),
        1 => 0.75 * iv.a() + 0.25 * iv.b(),
        _ => iv.midpoint(),
    };
    let mean = reference(&f, iv)? / iv.length();
    let scale = 1.0 + mean.abs();
    let symmetric = gs_identity_residual_with(mode, x, n, &f, iv)? / scale;
    let collapsed = milovanovic_pecaric_residual(x, n, &f, iv)? / scale;
    Ok(case(
        format!(
            "gs f={} n={n} x={x:.4} iv=[{}, {}]",
            f.name(),
            iv.a(),
            iv.b()
        ),
        symmetric.max(collapsed),
    ))
}

fn gruss_trial(rng: &mut SplitMix64, registry: &[TestFunction]) -> Result<CaseResult> {
    let f = registry[(rng.next_u64() % registry.len() as u64) as usize].clone();
    let iv = intervals()[(rng.next_u64() % 2) as usize];
    let n = 1 + (rng.next_u64() % 3) as usize;
    let x = match rng.next_u64() % 3 {
        0 => iv.a(),
        1 => 0.75 * iv.a() + 0.25 * iv.b(),
        _ => iv.midpoint(),
    };
    let p = p_functional(&f, x, n, iv)?;
    let tp = chebyshev_t(&p_pair(&f, x, n, iv)?, iv)?;
    let q = q_functional(&f, x, n, iv)?;
    let tq = chebyshev_t(&q_pair(&f, x, n, iv)?, iv)?;
    let seq = if rng.next_u64().is_multiple_of(2) {
        HarmonicSequence::shifted_monomials(x, n + 2)
    } else {
        HarmonicSequence::nonmonomial(n + 2)
    };
    let ctx = FinkContext::new(seq, n, NodeTriple::symmetric(x, iv)?, iv)?;
    let l = l_functional(&ctx, &f, x)?;
    let tl = chebyshev_t(&l_pair(&ctx, &f, x)?, iv)?;
    let worst = [(p, tp), (q, tq), (l, tl)]
        .iter()
        .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
        .fold(0.0, f64::max);
    Ok(case(
        format!(
            "gruss f={} n={n} x={x:.4} iv=[{}, {}]",
            f.name(),
            iv.a(),
            iv.b()
        ),
        worst,
    ))
}

/// Runs `trials` random configurations of one suite.
pub fn run_suite(
    kind: SuiteKind,
    seed: u64,
    trials: usize,
    mode: KernelMode,
) -> Result<SuiteReport> {
    // suite-specific stream so `--suite all` matches individual runs
    let tag = match kind {
        SuiteKind::Expansion => 1,
        SuiteKind::Fink => 2,
        SuiteKind::Gs => 3,
        SuiteKind::Gruss => 4,
    };
    let mut rng = SplitMix64::new(seed.wrapping_mul(0x100).wrapping_add(tag));
    let registry = TestFunction::registry();
    let mut cases = Vec::with_capacity(trials);
    for _ in 0..trials {
        let c = match kind {
            SuiteKind::Expansion => expansion_trial(&mut rng, &registry, mode)?,
            SuiteKind::Fink => fink_trial(&mut rng, &registry, mode)?,
            SuiteKind::Gs => gs_trial(&mut rng, &registry, mode)?,
            SuiteKind::Gruss => gruss_trial(&mut rng, &registry)?,
        };
        cases.push(c);
    }
    Ok(SuiteReport {
        suite: kind.name(),
        cases,
    })
}

/// Runs every suite with a shared seed.
pub fn run_all(seed: u64, trials: usize, mode: KernelMode) -> Result<Vec<SuiteReport>> {
    SuiteKind::parse("all")
        .unwrap()
        .into_iter()
        .map(|k| run_suite(k, seed, trials, mode))
        .collect()
}
