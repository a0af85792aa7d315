//! Randomized verification sweeps: the certificate suites behind
//! `nlsg verify` and the acceptance gate.
//!
//! Each suite draws a pinned-seed batch of instances, checks one of the
//! library's inequalities on every instance, and reports a pass/fail
//! verdict together with a short account of what was measured. All
//! instance counts, size ranges, seeds, and tolerances are constants in
//! this module, so a suite's verdict is reproducible run to run.
//!
//! The suites never relax a failing comparison: a breached inequality is
//! reported as a failure with the witnessing instance in the detail text.

use std::fmt::Write as _;

use crate::basegraph::{build_base, sandwich_ratio, truncate, TruncationSpec};
use crate::codes::{cosets, good_code};
use crate::construction::{
    classical_base_search, classical_threshold, finish_degree9, rvw_iterate, BaseSpec,
    ConstructionPlan, PlanMode,
};
use crate::cotype::{
    cotype_check, decay_from_spectrum, martingale_chain, random_cotype_instance,
    COTYPE_C2_FROZEN,
};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::graph_ops::{cesaro_matrix, cycle_with_loops, power, zigzag};
use crate::hypercube::{wht, CubeFunction};
use crate::multigraph::{complete, cycle, Multigraph};
use crate::poincare::{
    euclidean_squared, gamma_exact, gamma_plus_exact, growth_experiment, uniform_kernel,
};
use crate::rng::SplitMix64;
use crate::spectral::spectrum;

/// Relative slack for all floating-point inequality comparisons.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Tolerance for the martingale orthogonality identity, applied relative
/// to `max(1, E‖M_m − M_0‖²)` so large chains are judged at their own
/// scale.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Absolute ceiling for Walsh–Hadamard coefficients that must vanish.
pub const WHT_TAIL_TOL: f64 = 1e-12;

/// Outcome of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    /// One-line account: instance counts, extremal ratios, or the first
    /// breach.
    pub detail: String,
}

/// Suite names, in the order [`run_matching`] executes them.
pub const SUITE_NAMES: [&str; 10] = [
    "zigzag-spectral",
    "zigzag-gamma-plus",
    "doubling-sandwich",
    "cesaro-decay",
    "markov-cotype",
    "basegraph-pipeline",
    "real-line-transfer",
    "rvw-iteration",
    "degree9-finisher",
    "growth-experiment",
];

/// Runs the named suite.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "zigzag-spectral" => zigzag_spectral(),
        "zigzag-gamma-plus" => zigzag_gamma_plus(),
        "doubling-sandwich" => doubling_sandwich(),
        "cesaro-decay" => cesaro_decay(),
        "markov-cotype" => markov_cotype(),
        "basegraph-pipeline" => basegraph_pipeline(),
        "real-line-transfer" => real_line_transfer(),
        "rvw-iteration" => rvw_iteration(),
        "degree9-finisher" => degree9_finisher(),
        "growth-experiment" => growth_suite(),
        other => Err(Error::InvalidInput(format!("unknown suite `{other}`"))),
    }
}

/// Runs every suite whose name contains `filter` (all suites when `None`),
/// in registry order. An empty selection is an error.
pub fn run_matching(filter: Option<&str>) -> Result<Vec<SuiteReport>> {
    let selected: Vec<&str> = SUITE_NAMES
        .iter()
        .copied()
        .filter(|n| filter.is_none_or(|f| n.contains(f)))
        .collect();
    if selected.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no suite matches `{}` (available: {})",
            filter.unwrap_or(""),
            SUITE_NAMES.join(", ")
        )));
    }
    selected.into_iter().map(run_suite).collect()
}

/// `a ≤ b` with relative slack, treating ∞ as the top element.
fn le_slack(a: ExtReal, b: ExtReal) -> bool {
    match (a, b) {
        (_, ExtReal::Infinite) => true,
        (ExtReal::Infinite, ExtReal::Finite(_)) => false,
        (ExtReal::Finite(x), ExtReal::Finite(y)) => {
            x <= y * (1.0 + INEQUALITY_SLACK) + INEQUALITY_SLACK
        }
    }
}

/// `value/bound` when both are finite (for "tightest instance" reporting).
fn finite_ratio(value: ExtReal, bound: ExtReal) -> Option<f64> {
    match (value, bound) {
        (ExtReal::Finite(v), ExtReal::Finite(b)) if b > 0.0 => Some(v / b),
        _ => None,
    }
}

// =========================================================================
// 1. Spectral zigzag chain
// =========================================================================

const ZZ_SPECTRAL_INSTANCES: usize = 200;
const ZZ_SPECTRAL_SEED: u64 = 0x5147A6;

/// 200 random products `G₁ Ⓩ G₂` (`n₁ ≤ 64`, `d₁ ≤ 8`, `d₂ ≤ 4`):
/// the Euclidean chain `γ₊(Z) ≤ γ₊(G₁)·γ₊(G₂)²` on exact dense spectra.
fn zigzag_spectral() -> Result<SuiteReport> {
    let mut rng = SplitMix64::new(ZZ_SPECTRAL_SEED);
    let mut checked = 0usize;
    let mut tightest = 0.0f64;
    let mut largest = 0usize;
    while checked < ZZ_SPECTRAL_INSTANCES {
        let n1 = rng.range(3, 65);
        let d1 = rng.range(2, 9);
        let d2 = rng.range(2, 5);
        if (n1 * d1) % 2 != 0 || (d1 * d2) % 2 != 0 {
            continue;
        }
        let g1 = Multigraph::random_regular(n1, d1, &mut rng)?;
        let g2 = Multigraph::random_regular(d1, d2, &mut rng)?;
        let z = zigzag(&g1, &g2)?;
        let gz = spectrum(&z.normalized_adjacency()).gamma_plus;
        let b1 = spectrum(&g1.normalized_adjacency()).gamma_plus;
        let b2 = spectrum(&g2.normalized_adjacency()).gamma_plus;
        let bound = b1.mul(b2).mul(b2);
        if !le_slack(gz, bound) {
            return Ok(SuiteReport {
                name: "zigzag-spectral",
                passed: false,
                detail: format!(
                    "breach at n₁={n1}, d₁={d1}, d₂={d2}: γ₊(Z)={gz} > {bound}"
                ),
            });
        }
        if let Some(r) = finite_ratio(gz, bound) {
            tightest = tightest.max(r);
        }
        largest = largest.max(z.n());
        checked += 1;
    }
    Ok(SuiteReport {
        name: "zigzag-spectral",
        passed: true,
        detail: format!(
            "{checked} random products up to {largest} vertices; tightest value/bound {tightest:.4}"
        ),
    })
}

// =========================================================================
// 2. Exact non-linear sub-multiplicativity
// =========================================================================

const ZZ_EXACT_SEED: u64 = 0x5147B3;
const ZZ_EXACT_DRAWS: usize = 2;

/// Exhaustive `γ₊` on every product shape with at most 10 vertices, under
/// two-point kernels: `γ₊(G₁ⓏG₂,K) ≤ γ₊(G₁,K)·γ₊(G₂,K)²`, ∞-aware.
fn zigzag_gamma_plus() -> Result<SuiteReport> {
    let mut rng = SplitMix64::new(ZZ_EXACT_SEED);
    let kernels = [uniform_kernel(2, 1.0), uniform_kernel(2, 2.5)];
    let mut shapes = Vec::new();
    for n1 in 2..=5usize {
        for d1 in 2..=5usize {
            if n1 * d1 > 10 || (n1 * d1) % 2 != 0 {
                continue;
            }
            for d2 in 2..=4usize {
                if (d1 * d2) % 2 == 0 {
                    shapes.push((n1, d1, d2));
                }
            }
        }
    }
    let mut checked = 0usize;
    let mut tightest = 0.0f64;
    for &(n1, d1, d2) in &shapes {
        for _ in 0..ZZ_EXACT_DRAWS {
            let g1 = Multigraph::random_regular(n1, d1, &mut rng)?;
            let g2 = Multigraph::random_regular(d1, d2, &mut rng)?;
            let z = zigzag(&g1, &g2)?;
            let az = z.normalized_adjacency();
            let a1 = g1.normalized_adjacency();
            let a2 = g2.normalized_adjacency();
            for k in &kernels {
                let gz = gamma_plus_exact(&az, k)?.value;
                let b1 = gamma_plus_exact(&a1, k)?.value;
                let b2 = gamma_plus_exact(&a2, k)?.value;
                let bound = b1.mul(b2).mul(b2);
                if !le_slack(gz, bound) {
                    return Ok(SuiteReport {
                        name: "zigzag-gamma-plus",
                        passed: false,
                        detail: format!(
                            "breach at shape ({n1},{d1},{d2}), kernel {}: {gz} > {bound}",
                            k.label()
                        ),
                    });
                }
                if let Some(r) = finite_ratio(gz, bound) {
                    tightest = tightest.max(r);
                }
                checked += 1;
            }
        }
    }
    Ok(SuiteReport {
        name: "zigzag-gamma-plus",
        passed: true,
        detail: format!(
            "{checked} exact instances over {} shapes (≤ 10 product vertices); tightest value/bound {tightest:.4}",
            shapes.len()
        ),
    })
}

// =========================================================================
// 3. Doubling sandwiches
// =========================================================================

const DOUBLING_SEED: u64 = 0x5147C1;
const DOUBLING_GRAPHS: usize = 18;

/// Two exact sandwiches on small instances and two-point kernels:
/// `(2/5)·γ(double(A),K) ≤ γ₊(A,K) ≤ 2·γ(double(A),K)`, and doubling
/// commutes with Cesàro averaging up to a factor 9.
fn doubling_sandwich() -> Result<SuiteReport> {
    let mut rng = SplitMix64::new(DOUBLING_SEED);
    let kernels = [
        uniform_kernel(2, 1.0),
        uniform_kernel(2, 2.0),
        uniform_kernel(2, 3.5),
    ];
    let mut graphs = Vec::with_capacity(DOUBLING_GRAPHS);
    for _ in 0..DOUBLING_GRAPHS {
        let n = rng.range(2, 6);
        let d = if rng.below(2) == 0 { 2 } else { 4 };
        graphs.push(Multigraph::random_regular(n, d, &mut rng)?);
    }
    let mut sandwich_checked = 0usize;
    let mut commute_checked = 0usize;
    for (i, g) in graphs.iter().enumerate() {
        let a = g.normalized_adjacency();
        let d = a.double();
        let m = 1 + i % 3;
        let avg_then_double = cesaro_matrix(&a, m).double();
        let double_then_avg = cesaro_matrix(&a.double(), m);
        for k in &kernels {
            let gp = gamma_plus_exact(&a, k)?.value;
            let gd = gamma_exact(&d, k)?.value;
            if !le_slack(gd.scale(0.4), gp) || !le_slack(gp, gd.scale(2.0)) {
                return Ok(SuiteReport {
                    name: "doubling-sandwich",
                    passed: false,
                    detail: format!(
                        "sandwich breach on n={}, kernel {}: γ₊={gp}, γ(double)={gd}",
                        g.n(),
                        k.label()
                    ),
                });
            }
            sandwich_checked += 1;

            let lhs = gamma_exact(&avg_then_double, k)?.value;
            let rhs = gamma_exact(&double_then_avg, k)?.value;
            if !le_slack(lhs, rhs.scale(9.0)) {
                return Ok(SuiteReport {
                    name: "doubling-sandwich",
                    passed: false,
                    detail: format!(
                        "commute breach on n={}, m={m}, kernel {}: {lhs} > 9·{rhs}",
                        g.n(),
                        k.label()
                    ),
                });
            }
            commute_checked += 1;
        }
    }
    Ok(SuiteReport {
        name: "doubling-sandwich",
        passed: true,
        detail: format!(
            "(2/5, 2) sandwich on {sandwich_checked} instances; averaging commute ×9 on {commute_checked}"
        ),
    })
}

// =========================================================================
// 4. Cesàro decay with the frozen constant
// =========================================================================

const DECAY_SEED: u64 = 0x5147D9;
const DECAY_GRAPHS: usize = 250;
const DECAY_DEPTHS_PER_GRAPH: usize = 4;

/// `γ(𝒜_m(A), |·|²) ≤ 12·C²·max{1, γ(A)/m}` with the frozen `C²`, over a
/// 1000-instance sweep (`n ≤ 128`, `2 ≤ m ≤ 64` — the `t = 0..m−1`
/// averaging convention makes `𝒜₁` the identity, so depth 1 is vacuous;
/// see `decay_check`).
fn cesaro_decay() -> Result<SuiteReport> {
    let mut rng = SplitMix64::new(DECAY_SEED);
    let mut checked = 0usize;
    let mut max_binding = 0.0f64;
    for _ in 0..DECAY_GRAPHS {
        let n = rng.range(2, 129);
        let d = if rng.below(2) == 0 { 2 } else { 4 };
        let g = Multigraph::random_regular(n, d, &mut rng)?;
        let s = spectrum(&g.normalized_adjacency());
        for _ in 0..DECAY_DEPTHS_PER_GRAPH {
            let m = rng.range(2, 65);
            let rep = decay_from_spectrum(&s, m, COTYPE_C2_FROZEN);
            if !rep.holds {
                return Ok(SuiteReport {
                    name: "cesaro-decay",
                    passed: false,
                    detail: format!(
                        "breach at n={n}, d={d}, m={m}: γ(avg)={} > {}",
                        rep.gamma_avg, rep.bound
                    ),
                });
            }
            if let Some(r) = rep.binding_ratio {
                max_binding = max_binding.max(r);
            }
            checked += 1;
        }
    }
    Ok(SuiteReport {
        name: "cesaro-decay",
        passed: true,
        detail: format!(
            "{checked} (graph, depth) instances, zero violations; max γ(avg)/bound {max_binding:.4}"
        ),
    })
}

// =========================================================================
// 5. Metric Markov cotype pipeline
// =========================================================================

/// Fresh-seed validation sweep (the frozen constant was swept under seed
/// `0xC0717E`; this must differ).
const COTYPE_FRESH_SEED: u64 = 0xACCE55;
const COTYPE_INSTANCES: usize = 1000;

/// On every instance of a fresh 1000-instance sweep: the displacement
/// bound holds (convexity), the recomputed ratio is self-consistent, the
/// Doob martingale increments satisfy the Hilbert orthogonality identity,
/// and the certified `C²` stays below the frozen bound.
fn markov_cotype() -> Result<SuiteReport> {
    let mut rng = SplitMix64::new(COTYPE_FRESH_SEED);
    let mut max_c2 = 0.0f64;
    let mut max_defect = 0.0f64;
    for i in 0..COTYPE_INSTANCES {
        let inst = random_cotype_instance(&mut rng, 128, 64, 8);
        let w = cotype_check(&inst)?;
        let displacement_ok =
            w.displacement_term <= w.rhs_base * (1.0 + INEQUALITY_SLACK) + 1e-12;
        if !displacement_ok || !w.consistent() {
            return Ok(SuiteReport {
                name: "markov-cotype",
                passed: false,
                detail: format!(
                    "instance {i}: displacement {} vs base {} (consistent: {})",
                    w.displacement_term,
                    w.rhs_base,
                    w.consistent()
                ),
            });
        }
        if !w.satisfies(COTYPE_C2_FROZEN.sqrt()) {
            return Ok(SuiteReport {
                name: "markov-cotype",
                passed: false,
                detail: format!(
                    "instance {i} exceeds the frozen bound: minimal C² = {} > {COTYPE_C2_FROZEN}",
                    w.minimal_c2
                ),
            });
        }
        if let ExtReal::Finite(v) = w.minimal_c2 {
            max_c2 = max_c2.max(v);
        }
        let chain = martingale_chain(&inst.a, inst.m, &inst.x, None)?;
        let defect = chain.orthogonality_defect();
        let scale = chain.total.max(1.0);
        if defect > ORTHOGONALITY_TOL * scale {
            return Ok(SuiteReport {
                name: "markov-cotype",
                passed: false,
                detail: format!(
                    "instance {i}: orthogonality defect {defect:.3e} at scale {scale:.3e}"
                ),
            });
        }
        max_defect = max_defect.max(defect / scale);
    }
    Ok(SuiteReport {
        name: "markov-cotype",
        passed: true,
        detail: format!(
            "{COTYPE_INSTANCES} fresh instances; max minimal C² {max_c2:.4} ≤ {COTYPE_C2_FROZEN}; max orthogonality defect {max_defect:.2e}"
        ),
    })
}

// =========================================================================
// 6. Base-graph pipeline
// =========================================================================

const BASEGRAPH_CASES: [(usize, f64, u64); 2] = [(10, 0.1, 42), (12, 0.1, 42)];
const SANDWICH_PAIRS: usize = 100;

/// For the two pinned pipeline cases: the build completes, 100 random
/// sandwich ratios stay in `[1/3, 3]`, the quotient preserves the cube
/// degree, and every below-distance Walsh coefficient of a coset-constant
/// function vanishes.
fn basegraph_pipeline() -> Result<SuiteReport> {
    let mut detail = String::new();
    for (case, &(n, t, seed)) in BASEGRAPH_CASES.iter().enumerate() {
        let (quot, report) = build_base(n, t, seed)?;
        let spec = TruncationSpec::new(n, t, 2.0)?;
        let cube = truncate(&spec)?;
        if quot.degree() != cube.degree() {
            return Ok(SuiteReport {
                name: "basegraph-pipeline",
                passed: false,
                detail: format!(
                    "n={n}: quotient degree {} ≠ cube degree {}",
                    quot.degree(),
                    cube.degree()
                ),
            });
        }

        let mut rng = SplitMix64::new(seed ^ 0x5A11D);
        let size = 1usize << n;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for _ in 0..SANDWICH_PAIRS {
            let f: Vec<f64> = (0..size).map(|_| rng.gauss()).collect();
            let g: Vec<f64> = (0..size).map(|_| rng.gauss()).collect();
            let r = sandwich_ratio(&spec, &f, &g, 2.0)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if lo < 1.0 / 3.0 || hi > 3.0 {
            return Ok(SuiteReport {
                name: "basegraph-pipeline",
                passed: false,
                detail: format!("n={n}: sandwich ratios [{lo:.4}, {hi:.4}] leave [1/3, 3]"),
            });
        }

        // Fourier-tail vanishing: a function constant on cosets of the
        // dual code has zero Walsh coefficients below the code's minimum
        // distance.
        let code = good_code(n, seed)?;
        let dist = code
            .min_distance()?
            .expect("good codes have positive dimension");
        let part = cosets(&code.dual())?;
        let class_vals: Vec<f64> = (0..part.classes()).map(|_| rng.gauss()).collect();
        let vals: Vec<f64> = (0..size)
            .map(|x| class_vals[part.class_of[x] as usize])
            .collect();
        let coeffs = wht(&CubeFunction::from_scalar(n, &vals)?);
        for a in 1..size {
            if (a.count_ones() as usize) < dist && coeffs.get(a)[0].abs() >= WHT_TAIL_TOL {
                return Ok(SuiteReport {
                    name: "basegraph-pipeline",
                    passed: false,
                    detail: format!(
                        "n={n}: Walsh coefficient {:.3e} at weight {} < distance {dist}",
                        coeffs.get(a)[0],
                        a.count_ones()
                    ),
                });
            }
        }

        if case > 0 {
            detail.push_str("; ");
        }
        let _ = write!(
            detail,
            "n={n}: λ={:.6}, sandwich [{lo:.3}, {hi:.3}], distance {dist}",
            report.lambda
        );
    }
    Ok(SuiteReport {
        name: "basegraph-pipeline",
        passed: true,
        detail,
    })
}

// =========================================================================
// 7. Linear-to-nonlinear transfer on the real line
// =========================================================================

const TRANSFER_SEED: u64 = 0x5147E5;
const TRANSFER_INSTANCES: usize = 100;

/// Exact `γ₊` over three-point real configurations under `|·|²` is at most
/// `64·(1−λ)⁻²`, on 100 random regular adjacency matrices with `n ≤ 5`.
fn real_line_transfer() -> Result<SuiteReport> {
    let mut rng = SplitMix64::new(TRANSFER_SEED);
    let mut checked = 0usize;
    let mut tightest = 0.0f64;
    while checked < TRANSFER_INSTANCES {
        let n = rng.range(2, 6);
        let d = rng.range(2, 5);
        if (n * d) % 2 != 0 {
            continue;
        }
        let g = Multigraph::random_regular(n, d, &mut rng)?;
        let a = g.normalized_adjacency();
        let s = spectrum(&a);
        let points: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.gauss()]).collect();
        let kernel = euclidean_squared(&points)?;
        let gp = gamma_plus_exact(&a, &kernel)?.value;
        let bound = s.gamma_plus.mul(s.gamma_plus).scale(64.0);
        if !le_slack(gp, bound) {
            return Ok(SuiteReport {
                name: "real-line-transfer",
                passed: false,
                detail: format!("breach at n={n}, d={d}, λ={}: {gp} > {bound}", s.lambda_abs),
            });
        }
        if let Some(r) = finite_ratio(gp, bound) {
            tightest = tightest.max(r);
        }
        checked += 1;
    }
    Ok(SuiteReport {
        name: "real-line-transfer",
        passed: true,
        detail: format!(
            "{checked} matrices × three-point real configurations; tightest value/bound {tightest:.4}"
        ),
    })
}

// =========================================================================
// 8. Classical zigzag iteration
// =========================================================================

const RVW_SEED: u64 = 0x5147F0;
const RVW_T0: usize = 2;
const RVW_DEPTH: usize = 3;

/// Searches small bases for one meeting the self-sustaining threshold at
/// `t₀ = 2`, then iterates three levels: every level keeps `λ ≤ 1/2` and
/// the vertex/degree counts are exactly `n₀^i` and `d₀²`.
fn rvw_iteration() -> Result<SuiteReport> {
    let threshold = classical_threshold(RVW_T0);
    let candidates = classical_base_search(RVW_T0, 64, 4, RVW_SEED)?;
    let base = candidates
        .iter()
        .find(|c| c.meets_threshold && BaseSpec::parse(&c.label).is_ok());
    let Some(base) = base else {
        return Ok(SuiteReport {
            name: "rvw-iteration",
            passed: false,
            detail: format!(
                "no scanned base meets λ ≤ {threshold:.4} (best: {})",
                candidates
                    .first()
                    .map_or("none".to_string(), |c| format!("{} at λ={:.4}", c.label, c.lambda))
            ),
        });
    };
    let plan = ConstructionPlan {
        mode: PlanMode::ClassicalPower,
        t0: RVW_T0,
        depth: RVW_DEPTH,
        base: BaseSpec::parse(&base.label)?,
        finish: false,
    };
    let levels = rvw_iterate(&plan)?;
    let (n0, d0) = (base.n0, base.d0);
    let mut lambda_max = 0.0f64;
    for (i, (g, rep)) in levels.iter().enumerate() {
        let (want_n, want_d) = if i == 0 {
            (n0, d0)
        } else {
            (n0.pow(i as u32), d0 * d0)
        };
        if g.n() != want_n || g.degree() != want_d {
            return Ok(SuiteReport {
                name: "rvw-iteration",
                passed: false,
                detail: format!(
                    "level {i}: counts ({}, {}) ≠ expected ({want_n}, {want_d})",
                    g.n(),
                    g.degree()
                ),
            });
        }
        if i >= 1 {
            if rep.lambda > 0.5 + INEQUALITY_SLACK {
                return Ok(SuiteReport {
                    name: "rvw-iteration",
                    passed: false,
                    detail: format!("level {i}: λ = {} > 1/2", rep.lambda),
                });
            }
            lambda_max = lambda_max.max(rep.lambda);
        }
    }
    Ok(SuiteReport {
        name: "rvw-iteration",
        passed: true,
        detail: format!(
            "base {} (λ={:.4} ≤ threshold {threshold:.4}); {RVW_DEPTH} levels, max level λ {lambda_max:.4}, counts exact",
            base.label, base.lambda
        ),
    })
}

// =========================================================================
// 9. Degree-9 finisher
// =========================================================================

const FINISHER_SEED: u64 = 0x514801;

/// The finisher on a corpus of inputs of varied degree: output 9-regular
/// on `n·d` vertices with `γ₊(out) ≤ 16d⁴·γ₊(in)`, plus the cloud's own
/// `4d²` certificate.
fn degree9_finisher() -> Result<SuiteReport> {
    let mut rng = SplitMix64::new(FINISHER_SEED);
    let inputs: Vec<(String, Multigraph)> = vec![
        ("cycle:5".into(), cycle(5)),
        ("cycle_loops:6".into(), cycle_with_loops(6)?),
        ("complete:6".into(), complete(6)),
        ("cycle:6 squared".into(), power(&cycle(6), 2)?),
        (
            "random:12:4".into(),
            Multigraph::random_regular_connected(12, 4, &mut rng, 200)?,
        ),
        (
            "random:10:3".into(),
            Multigraph::random_regular_connected(10, 3, &mut rng, 200)?,
        ),
    ];
    let mut degrees = Vec::with_capacity(inputs.len());
    for (label, g) in &inputs {
        let (out, rep) = finish_degree9(g)?;
        let ok = out.degree() == 9
            && out.n() == g.n() * g.degree()
            && rep.cycle_holds
            && rep.holds;
        if !ok {
            return Ok(SuiteReport {
                name: "degree9-finisher",
                passed: false,
                detail: format!(
                    "input {label}: degree {}, n {}, cloud holds {}, chain holds {} (γ₊(out)={} vs {})",
                    out.degree(),
                    out.n(),
                    rep.cycle_holds,
                    rep.holds,
                    rep.output_gamma_plus,
                    rep.chained_bound
                ),
            });
        }
        degrees.push(g.degree());
    }
    Ok(SuiteReport {
        name: "degree9-finisher",
        passed: true,
        detail: format!(
            "{} inputs with degrees {degrees:?}: all outputs 9-regular on n·d vertices within 16d⁴·γ₊(in)",
            inputs.len()
        ),
    })
}

// =========================================================================
// 10. Growth experiment
// =========================================================================

const GROWTH_SEED: u64 = 0x514812;
const GROWTH_SIZES: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];
const GROWTH_TIMES: [usize; 4] = [1, 2, 4, 8];
const GROWTH_DEGREE: usize = 4;
const GROWTH_P: f64 = 2.0;

/// The averaged-kernel growth sweep: asserts that the Cesàro–Fréchet lower
/// bound is non-decreasing in `n` at every fixed depth; the fitted slope
/// against `(log(1+log n/t))²` and the spectral ceiling are report-only.
fn growth_suite() -> Result<SuiteReport> {
    let table = growth_experiment(&GROWTH_SIZES, &GROWTH_TIMES, GROWTH_DEGREE, GROWTH_P, GROWTH_SEED)?;
    let spectral_max = table
        .rows
        .iter()
        .filter_map(|r| match r.spectral_gamma_plus {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        })
        .fold(0.0f64, f64::max);
    let spectral_all_finite = table
        .rows
        .iter()
        .all(|r| r.spectral_gamma_plus.is_finite());
    let slope = table
        .fit_slope
        .map_or("-".to_string(), |s| format!("{s:.4}"));
    let detail = format!(
        "{} rows over n ∈ {:?}, t ∈ {:?}; fit slope {slope}; spectral γ₊ ≤ {spectral_max:.3} (all finite: {spectral_all_finite})",
        table.rows.len(),
        GROWTH_SIZES,
        GROWTH_TIMES
    );
    Ok(SuiteReport {
        name: "growth-experiment",
        passed: table.monotone_in_n,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_consistent() {
        assert_eq!(SUITE_NAMES.len(), 10);
        // Every registered name dispatches; unknown names are rejected.
        assert!(matches!(
            run_suite("not-a-suite"),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(run_matching(Some("zzz")), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn filter_selects_by_substring() {
        let picked = run_matching(Some("degree9")).unwrap();
        assert_eq!(picked.len(), 1);
        assert_eq!(picked[0].name, "degree9-finisher");
        assert!(picked[0].passed, "{}", picked[0].detail);
    }

    #[test]
    fn small_suites_pass() {
        for name in ["doubling-sandwich", "real-line-transfer", "rvw-iteration"] {
            let rep = run_suite(name).unwrap();
            assert!(rep.passed, "{name}: {}", rep.detail);
            assert_eq!(rep.name, name);
        }
    }
}
