//! Non-linear Poincaré constants of symmetric stochastic matrices.
//!
//! For an `n × n` symmetric stochastic matrix `A` and a kernel
//! `K : X × X → [0,∞)` on a finite point set `X`, the two-sided constant
//! `γ₊(A,K)` is the supremum over all assignments `f, g : V → X` of
//!
//! ```text
//!        (1/n²) Σ_{i,j} K(f_i, g_j)
//!   ─────────────────────────────────────
//!        (1/n)  Σ_{i,j} a_{ij} K(f_i, g_j)
//! ```
//!
//! and `γ(A,K)` is the same supremum restricted to `g = f`. Ratios with
//! zero numerator and denominator are skipped; a positive numerator over a
//! zero denominator is `∞`. If every pair is skipped (e.g. a one-point
//! kernel space) the supremum is empty and both constants are `1` by
//! convention — the defining inequality is vacuous.
//!
//! This module provides:
//!
//! * exact brute-force evaluation ([`gamma_plus_exact`], [`gamma_exact`])
//!   over all assignments, with symmetry pruning for uniform kernels and a
//!   hard cap on enumerated pairs;
//! * a coordinate-ascent lower bound ([`gamma_plus_search`]) for instances
//!   beyond the cap;
//! * the Fréchet-embedding lower bound ([`frechet_lower_bound`]): embed the
//!   shortest-path metric isometrically into `ℓ∞` via distance vectors and
//!   evaluate the ratio under `(log(1+‖·‖∞))^p` at the identity assignment;
//! * a coarse-embedding obstruction report
//!   ([`coarse_obstruction_report`]): any bi-Lipschitz embedding of a graph
//!   with finite `γ₊` must distort some pair by at least
//!   `median-distance / (2γ₊)^{1/p}`.
//!
//! Zero detection in the enumeration engine is exact: IEEE sums of exact
//! zeros are zero, so skipped `0/0` pairs and `∞` ratios are recognized
//! without tolerances. Kernel entries should be exactly `0` or not tiny
//! relative to the largest entry (all constructors here guarantee this).

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::matrix::{FloatMatrix, StochasticMatrix};
use crate::multigraph::Multigraph;
use crate::rng::{fnv1a64, SplitMix64};
use crate::spectral::adjacency_matvec;
use rayon::prelude::*;

/// Default cap on evaluated `(f,g)` pairs for exact enumeration (after
/// symmetry pruning).
pub const DEFAULT_ENUM_CAP: u128 = 1 << 34;

/// Relative slack for the cheap-filter step of the enumeration engine: any
/// pair whose table-evaluated ratio comes within this factor of the current
/// best is re-evaluated freshly (in a fixed summation order) before being
/// compared. The filter error is bounded by a few ulps per term, many
/// orders of magnitude below this slack.
const FILTER_SLACK: f64 = 1e-6;

// =========================================================================
// Kernel spaces
// =========================================================================

/// A finite kernel space: points `0..size` and a symmetric non-negative
/// kernel matrix. Metric structure is optional (the constructors that
/// build kernels from metrics validate the triangle inequality; general
/// kernels skip that check).
#[derive(Debug, Clone)]
pub struct KernelSpace {
    label: String,
    size: usize,
    k: Vec<f64>, // row-major size × size
    uniform: bool,
}

impl KernelSpace {
    /// Builds a kernel space from an explicit matrix without metric
    /// validation (general kernels are allowed; only symmetry and
    /// non-negativity are required).
    pub fn general(label: impl Into<String>, entries: &[Vec<f64>]) -> Result<KernelSpace> {
        let size = entries.len();
        for row in entries {
            if row.len() != size {
                return Err(Error::InvalidInput("kernel matrix must be square".into()));
            }
        }
        let mut k = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                let v = entries[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "kernel entry ({i},{j}) = {v} is not a finite non-negative real"
                    )));
                }
                if entries[j][i] != v {
                    return Err(Error::InvalidInput(format!(
                        "kernel not symmetric at ({i},{j})"
                    )));
                }
                k[i * size + j] = v;
            }
        }
        let uniform = detect_uniform(size, &k);
        Ok(KernelSpace {
            label: label.into(),
            size,
            k,
            uniform,
        })
    }

    /// Replaces the human-readable label.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Number of points.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Human-readable description (used in CSV reports).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Kernel value between points `x` and `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.k[x * self.size + y]
    }

    /// Whether the kernel is uniform (zero diagonal, one common positive
    /// off-diagonal value). Uniform kernels admit symmetry pruning: every
    /// permutation of the points preserves the ratio, so `f(0)` can be
    /// fixed to point `0` during enumeration.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Largest kernel entry.
    pub fn max_entry(&self) -> f64 {
        self.k.iter().cloned().fold(0.0, f64::max)
    }
}

fn detect_uniform(size: usize, k: &[f64]) -> bool {
    if size < 2 {
        return false;
    }
    let c = k[1]; // entry (0,1)
    if c <= 0.0 {
        return false;
    }
    for i in 0..size {
        for j in 0..size {
            let want = if i == j { 0.0 } else { c };
            if k[i * size + j] != want {
                return false;
            }
        }
    }
    true
}

/// Builds the kernel `K = d^p` from a finite metric `d`, validating
/// symmetry, zero diagonal, non-negativity, and the triangle inequality
/// (`O(|X|³)`, with a tiny relative tolerance for rounded metrics).
pub fn kernel_metric_power(d: &[Vec<f64>], p: f64) -> Result<KernelSpace> {
    let size = d.len();
    if p <= 0.0 {
        return Err(Error::InvalidInput("metric power needs p > 0".into()));
    }
    let mut dmax: f64 = 0.0;
    for (i, row) in d.iter().enumerate() {
        if row.len() != size {
            return Err(Error::InvalidInput("metric matrix must be square".into()));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "metric entry ({i},{j}) = {v} is not a finite non-negative real"
                )));
            }
            if d[j][i] != v {
                return Err(Error::InvalidInput(format!(
                    "metric not symmetric at ({i},{j})"
                )));
            }
            if i == j && v != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "metric diagonal entry ({i},{i}) = {v} must be zero"
                )));
            }
            dmax = dmax.max(v);
        }
    }
    let tol = 1e-9 * (1.0 + dmax);
    for i in 0..size {
        for j in 0..size {
            for l in 0..size {
                if d[i][l] > d[i][j] + d[j][l] + tol {
                    return Err(Error::TriangleViolation { i, j, k: l });
                }
            }
        }
    }
    let entries: Vec<Vec<f64>> = d
        .iter()
        .map(|row| row.iter().map(|&v| v.powf(p)).collect())
        .collect();
    Ok(KernelSpace::general(format!("metric^{p}"), &entries)?)
}

/// The uniform kernel on `size` points: `K(x,y) = 1` for `x ≠ y`, raised
/// to nothing (the uniform metric to the power `p` is itself).
pub fn uniform_kernel(size: usize, p: f64) -> KernelSpace {
    let d: Vec<Vec<f64>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect();
    kernel_metric_power(&d, p)
        .expect("uniform metric is a metric")
        .with_label(format!("{size}-point uniform^{p}"))
}

/// Squared Euclidean kernel on an explicit finite point set in `ℝ^k`.
pub fn euclidean_squared(points: &[Vec<f64>]) -> Result<KernelSpace> {
    let size = points.len();
    if size == 0 {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|pt| pt.len() != dim) {
        return Err(Error::InvalidInput("points must share a dimension".into()));
    }
    let mut entries = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in 0..size {
            let d2: f64 = (0..dim)
                .map(|t| (points[i][t] - points[j][t]).powi(2))
                .sum();
            entries[i][j] = d2;
        }
    }
    KernelSpace::general(format!("euclidean² on {size} points"), &entries)
}

/// The kernel `K(x,y) = (log(1+‖x−y‖∞))^p` on integer vectors (natural
/// logarithm). `log(1+·)` is a concave increasing transform vanishing at
/// zero, so it maps metrics to metrics; the debug assertion below spells
/// that check out.
pub fn kernel_log_linf(points: &[Vec<i64>], p: f64) -> Result<KernelSpace> {
    if p <= 0.0 {
        return Err(Error::InvalidInput("log-ℓ∞ kernel needs p > 0".into()));
    }
    let size = points.len();
    if size == 0 {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|pt| pt.len() != dim) {
        return Err(Error::InvalidInput("points must share a dimension".into()));
    }
    // Metric-transform validity: T(0)=0, T increasing, T concave.
    let t = |x: f64| (1.0 + x).ln();
    debug_assert!(t(0.0) == 0.0 && t(1.0) < t(2.0) && t(2.0) - t(1.0) <= t(1.0) - t(0.0));
    let mut entries = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in 0..size {
            let linf = (0..dim)
                .map(|c| (points[i][c] - points[j][c]).unsigned_abs())
                .max()
                .unwrap_or(0);
            entries[i][j] = t(linf as f64).powf(p);
        }
    }
    KernelSpace::general(format!("log-ℓ∞^{p} on {size} points"), &entries)
}

// =========================================================================
// Estimates and witnesses
// =========================================================================

/// Whether an estimate is the exact supremum or only a certified lower
/// bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Exact,
    LowerBound,
}

impl std::fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimateKind::Exact => write!(f, "exact"),
            EstimateKind::LowerBound => write!(f, "lower_bound"),
        }
    }
}

/// A maximizing assignment: `f` always, `g` only for the two-sided
/// constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub f: Vec<usize>,
    pub g: Option<Vec<usize>>,
}

impl Witness {
    /// Stable 64-bit fingerprint of the assignment (FNV-1a over the point
    /// ids), for compact CSV reporting.
    pub fn hash(&self) -> u64 {
        let mut bytes = Vec::with_capacity(8 * (self.f.len() + 2));
        for &x in &self.f {
            bytes.extend_from_slice(&(x as u64).to_le_bytes());
        }
        bytes.push(0xFF);
        if let Some(g) = &self.g {
            for &x in g {
                bytes.extend_from_slice(&(x as u64).to_le_bytes());
            }
        }
        fnv1a64(&bytes)
    }
}

/// A Poincaré-constant estimate with provenance and witness.
#[derive(Debug, Clone)]
pub struct PoincareEstimate {
    pub value: ExtReal,
    pub kind: EstimateKind,
    pub witness: Option<Witness>,
}

/// Header for [`PoincareEstimate::csv_row`].
pub fn poincare_csv_header() -> &'static str {
    "graph,kernel,kind,value,seconds,witness"
}

impl PoincareEstimate {
    /// One CSV row: graph id, kernel label, estimate kind, value, wall
    /// seconds, witness hash (hex; `-` when absent).
    pub fn csv_row(&self, graph_id: &str, kernel_label: &str, seconds: f64) -> String {
        let witness = match &self.witness {
            Some(w) => format!("{:016x}", w.hash()),
            None => "-".to_string(),
        };
        format!(
            "{},{},{},{},{:.3},{}",
            graph_id, kernel_label, self.kind, self.value, seconds, witness
        )
    }
}

/// Canonical ratio from raw sums: `num_raw = Σ_{i,j} K(f_i,g_j)` and
/// `den_raw = Σ_{i,j} a_{ij} K(f_i,g_j)`. The normalized ratio is
/// `(num_raw/n²) / (den_raw/n) = num_raw / (n·den_raw)`. Returns `None`
/// for the skipped `0/0` case.
#[inline]
pub fn ratio_value(n: usize, num_raw: f64, den_raw: f64) -> Option<ExtReal> {
    if num_raw == 0.0 && den_raw == 0.0 {
        return None;
    }
    Some(if den_raw == 0.0 {
        ExtReal::Infinite
    } else {
        ExtReal::finite(num_raw / (n as f64 * den_raw))
    })
}

/// Fresh evaluation of a pair ratio in the fixed `i`-major summation
/// order; this is the order every reported value is computed in, so
/// re-evaluating a witness reproduces the estimate bit-for-bit.
pub fn pair_ratio(a: &FloatMatrix, k: &KernelSpace, f: &[usize], g: &[usize]) -> Option<ExtReal> {
    let n = a.n();
    debug_assert!(f.len() == n && g.len() == n);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let row = a.row(i);
        for j in 0..n {
            let kv = k.get(f[i], g[j]);
            num += kv;
            den += row[j] * kv;
        }
    }
    ratio_value(n, num, den)
}

/// Re-evaluates a witness against an instance (for audit: the result must
/// equal the reported value).
pub fn witness_ratio(a: &StochasticMatrix, k: &KernelSpace, w: &Witness) -> Option<ExtReal> {
    let af = a.to_float();
    match &w.g {
        Some(g) => pair_ratio(&af, k, &w.f, g),
        None => pair_ratio(&af, k, &w.f, &w.f),
    }
}

// =========================================================================
// Exact enumeration
// =========================================================================

#[derive(Debug, Clone)]
struct Candidate {
    value: ExtReal,
    f_idx: u128,
    g_idx: u128,
    f: Vec<usize>,
    g: Vec<usize>,
}

impl Candidate {
    /// Total order used to merge per-worker results: larger value first,
    /// ties to the earlier enumeration index. This reproduces exactly the
    /// first-found-maximum semantics of a sequential scan.
    fn beats(&self, other: &Candidate) -> bool {
        match self
            .value
            .partial_cmp(&other.value)
            .expect("ratios are never NaN")
        {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                (self.f_idx, self.g_idx) < (other.f_idx, other.g_idx)
            }
        }
    }
}

fn merge(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(if x.beats(&y) { x } else { y }),
    }
}

fn decode_mixed_radix(mut idx: u128, base: usize, digits: &mut [usize]) {
    // Digit 0 is the most significant: the last digit cycles fastest.
    for d in digits.iter_mut().rev() {
        *d = (idx % base as u128) as usize;
        idx /= base as u128;
    }
}

/// Advances a mixed-radix counter whose last digit cycles fastest.
/// Returns `false` on wrap-around.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn space_size(base: usize, digits: u32) -> Option<u128> {
    (base as u128).checked_pow(digits)
}

fn check_cap(pairs: Option<u128>, cap: u128) -> Result<()> {
    match pairs {
        Some(p) if p <= cap => Ok(()),
        Some(p) => Err(Error::EnumerationTooLarge { needed: p, cap }),
        None => Err(Error::EnumerationTooLarge {
            needed: u128::MAX,
            cap,
        }),
    }
}

/// Scans all `g` for every `f` in `[f_lo, f_hi)`, returning the best
/// candidate. `f[0]` is pinned to point `0` when `pinned` is set (symmetry
/// pruning for uniform kernels); the remaining digits enumerate `f_idx`.
fn scan_f_range(
    af: &FloatMatrix,
    k: &KernelSpace,
    pinned: bool,
    f_lo: u128,
    f_hi: u128,
) -> Option<Candidate> {
    let n = af.n();
    let xs = k.size();
    let free = if pinned { n - 1 } else { n };
    let mut best: Option<Candidate> = None;
    let mut f = vec![0usize; n];
    let mut g = vec![0usize; n];
    // Per-f tables: colk[x] = Σ_i K(f_i, x); w[j·xs + x] = Σ_i a_ij K(f_i, x).
    let mut colk = vec![0.0f64; xs];
    let mut w = vec![0.0f64; n * xs];
    for f_idx in f_lo..f_hi {
        decode_mixed_radix(f_idx, xs, &mut f[n - free..]);
        colk.fill(0.0);
        w.fill(0.0);
        for x in 0..xs {
            for i in 0..n {
                let kv = k.get(f[i], x);
                colk[x] += kv;
                let row = af.row(i);
                for j in 0..n {
                    w[j * xs + x] += row[j] * kv;
                }
            }
        }
        g.fill(0);
        let mut g_idx: u128 = 0;
        loop {
            // Cheap table evaluation; exact zeros stay exact (sums of
            // zeros), so skip/∞ classification needs no tolerance.
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..n {
                num += colk[g[j]];
                den += w[j * xs + g[j]];
            }
            let promising = if num == 0.0 && den == 0.0 {
                false // skipped pair
            } else if den == 0.0 {
                // ∞ ratio: only interesting if the best is not already ∞.
                !matches!(best.as_ref().map(|b| b.value), Some(ExtReal::Infinite))
            } else {
                match best.as_ref().map(|b| b.value) {
                    None => true,
                    Some(ExtReal::Infinite) => false,
                    Some(ExtReal::Finite(v)) => num / (n as f64 * den) >= v * (1.0 - FILTER_SLACK),
                }
            };
            if promising {
                // Confirm in the canonical summation order before comparing.
                if let Some(value) = pair_ratio(af, k, &f, &g) {
                    let cand = Candidate {
                        value,
                        f_idx,
                        g_idx,
                        f: f.clone(),
                        g: g.clone(),
                    };
                    if best.as_ref().map_or(true, |b| cand.beats(b)) {
                        best = Some(cand);
                    }
                }
            }
            if !advance(&mut g, xs) {
                break;
            }
            g_idx += 1;
        }
        // Nothing in this range can precede an ∞ already found here.
        if matches!(best.as_ref().map(|b| b.value), Some(ExtReal::Infinite)) {
            break;
        }
    }
    best
}

fn enumeration_ranges(space: u128) -> Vec<(u128, u128)> {
    let workers = rayon::current_num_threads().max(1) as u128;
    let chunks = (workers * 8).min(space).max(1);
    let step = space.div_ceil(chunks);
    let mut ranges = Vec::new();
    let mut lo = 0u128;
    while lo < space {
        let hi = (lo + step).min(space);
        ranges.push((lo, hi));
        lo = hi;
    }
    ranges
}

/// Exact `γ₊(A,K)` with the default enumeration cap.
pub fn gamma_plus_exact(a: &StochasticMatrix, k: &KernelSpace) -> Result<PoincareEstimate> {
    gamma_plus_exact_capped(a, k, DEFAULT_ENUM_CAP)
}

/// Exact `γ₊(A,K)`: supremum of the pair ratio over all `|X|^{2n}`
/// assignments (`|X|^{2n−1}` after pruning for uniform kernels).
///
/// The scan is split across workers over ranges of `f`; each worker uses
/// per-`f` tables for an `O(n)` ratio evaluation per pair and confirms
/// candidate maxima in the canonical summation order, so the result is
/// identical to a naive sequential enumeration regardless of worker count.
pub fn gamma_plus_exact_capped(
    a: &StochasticMatrix,
    k: &KernelSpace,
    cap: u128,
) -> Result<PoincareEstimate> {
    let n = a.n();
    let xs = k.size();
    if xs == 0 {
        return Err(Error::InvalidInput("kernel space has no points".into()));
    }
    let pinned = k.is_uniform();
    let free = if pinned { n - 1 } else { n };
    let f_space = space_size(xs, free as u32);
    let pairs = f_space.and_then(|fs| space_size(xs, n as u32).and_then(|gs| fs.checked_mul(gs)));
    check_cap(pairs, cap)?;
    let f_space = f_space.unwrap();
    let af = a.to_float();
    let best = enumeration_ranges(f_space)
        .into_par_iter()
        .map(|(lo, hi)| scan_f_range(&af, k, pinned, lo, hi))
        .reduce(|| None, merge);
    Ok(finish_estimate(best, EstimateKind::Exact, true))
}

/// Exact `γ(A,K)` with the default enumeration cap.
pub fn gamma_exact(a: &StochasticMatrix, k: &KernelSpace) -> Result<PoincareEstimate> {
    gamma_exact_capped(a, k, DEFAULT_ENUM_CAP)
}

/// Exact `γ(A,K)`: supremum of the single-assignment ratio (`g = f`) over
/// all `|X|^n` assignments (pruned to `|X|^{n−1}` for uniform kernels).
pub fn gamma_exact_capped(
    a: &StochasticMatrix,
    k: &KernelSpace,
    cap: u128,
) -> Result<PoincareEstimate> {
    let n = a.n();
    let xs = k.size();
    if xs == 0 {
        return Err(Error::InvalidInput("kernel space has no points".into()));
    }
    let pinned = k.is_uniform();
    let free = if pinned { n - 1 } else { n };
    let f_space = space_size(xs, free as u32);
    check_cap(f_space, cap)?;
    let f_space = f_space.unwrap();
    let af = a.to_float();
    let best = enumeration_ranges(f_space)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut best: Option<Candidate> = None;
            let mut f = vec![0usize; n];
            for f_idx in lo..hi {
                decode_mixed_radix(f_idx, xs, &mut f[n - free..]);
                if let Some(value) = pair_ratio(&af, k, &f, &f) {
                    let cand = Candidate {
                        value,
                        f_idx,
                        g_idx: 0,
                        f: f.clone(),
                        g: Vec::new(),
                    };
                    if best.as_ref().map_or(true, |b| cand.beats(b)) {
                        best = Some(cand);
                    }
                }
            }
            best
        })
        .reduce(|| None, merge);
    Ok(finish_estimate(best, EstimateKind::Exact, false))
}

fn finish_estimate(best: Option<Candidate>, kind: EstimateKind, two_sided: bool) -> PoincareEstimate {
    match best {
        Some(c) => PoincareEstimate {
            value: c.value,
            kind,
            witness: Some(Witness {
                f: c.f,
                g: if two_sided { Some(c.g) } else { None },
            }),
        },
        // Empty supremum (every pair skipped): γ = γ₊ = 1 by convention.
        None => PoincareEstimate {
            value: ExtReal::finite(1.0),
            kind,
            witness: None,
        },
    }
}

// =========================================================================
// Coordinate-ascent lower bound
// =========================================================================

const MAX_SWEEPS: usize = 200;

/// Heuristic lower bound on `γ₊(A,K)` by alternating coordinate ascent.
///
/// From a random assignment, each vertex of `f` and then of `g` is
/// reassigned to the ratio-maximizing point (strict improvements only;
/// ties among improving points break to the smallest point id) until a
/// full sweep changes nothing. Restart seeds derive from the root seed via
/// a fixed splitmix sequence, so results are reproducible and monotone
/// non-decreasing in `restarts`; restarts run in parallel with a
/// deterministic merge.
pub fn gamma_plus_search(
    a: &StochasticMatrix,
    k: &KernelSpace,
    restarts: usize,
    seed: u64,
) -> Result<PoincareEstimate> {
    if restarts == 0 {
        return Err(Error::InvalidInput("search needs at least one restart".into()));
    }
    let xs = k.size();
    if xs == 0 {
        return Err(Error::InvalidInput("kernel space has no points".into()));
    }
    let af = a.to_float();
    let mut root = SplitMix64::new(seed);
    let seeds: Vec<u64> = (0..restarts).map(|_| root.next_u64()).collect();
    let best = seeds
        .into_par_iter()
        .enumerate()
        .map(|(idx, s)| {
            let (value, f, g) = ascend(&af, k, s);
            (idx, value, f, g)
        })
        .reduce_with(|a, b| {
            // Higher value wins; ties to the earlier restart.
            let a_better = match (a.1, b.1) {
                (None, None) => a.0 < b.0,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (Some(x), Some(y)) => x > y || (x == y && a.0 < b.0),
            };
            if a_better {
                a
            } else {
                b
            }
        })
        .expect("at least one restart");
    Ok(match best.1 {
        Some(value) => PoincareEstimate {
            value,
            kind: EstimateKind::LowerBound,
            witness: Some(Witness {
                f: best.2,
                g: Some(best.3),
            }),
        },
        None => PoincareEstimate {
            value: ExtReal::finite(1.0),
            kind: EstimateKind::LowerBound,
            witness: None,
        },
    })
}

/// One ascent run. Returns the final freshly-evaluated ratio (so witness
/// re-evaluation reproduces it exactly) plus the assignment.
fn ascend(af: &FloatMatrix, k: &KernelSpace, seed: u64) -> (Option<ExtReal>, Vec<usize>, Vec<usize>) {
    let n = af.n();
    let xs = k.size();
    let mut rng = SplitMix64::new(seed);
    let mut f: Vec<usize> = (0..n).map(|_| rng.below(xs as u64) as usize).collect();
    let mut g: Vec<usize> = (0..n).map(|_| rng.below(xs as u64) as usize).collect();
    // Raw sums maintained incrementally; candidate moves are evaluated
    // from per-vertex partial sums in O(|X|·n) per vertex.
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let row = af.row(i);
        for j in 0..n {
            let kv = k.get(f[i], g[j]);
            num += kv;
            den += row[j] * kv;
        }
    }
    let mut cand_num = vec![0.0f64; xs];
    let mut cand_den = vec![0.0f64; xs];
    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        // f-coordinates: row i of the double sum depends on f[i].
        for v in 0..n {
            let row = af.row(v);
            for x in 0..xs {
                let mut rn = 0.0;
                let mut rd = 0.0;
                for j in 0..n {
                    let kv = k.get(x, g[j]);
                    rn += kv;
                    rd += row[j] * kv;
                }
                cand_num[x] = rn;
                cand_den[x] = rd;
            }
            let cur = ratio_value(n, num, den);
            let base_num = num - cand_num[f[v]];
            let base_den = den - cand_den[f[v]];
            let mut best_x = f[v];
            let mut best_ratio = cur;
            for x in 0..xs {
                let r = ratio_value(n, base_num + cand_num[x], base_den + cand_den[x]);
                if r > best_ratio {
                    best_ratio = r;
                    best_x = x;
                }
            }
            if best_x != f[v] {
                num = base_num + cand_num[best_x];
                den = base_den + cand_den[best_x];
                f[v] = best_x;
                changed = true;
            }
        }
        // g-coordinates: column j depends on g[j].
        for vtx in 0..n {
            for x in 0..xs {
                let mut cn = 0.0;
                let mut cd = 0.0;
                for i in 0..n {
                    let kv = k.get(f[i], x);
                    cn += kv;
                    cd += af.get(i, vtx) * kv;
                }
                cand_num[x] = cn;
                cand_den[x] = cd;
            }
            let cur = ratio_value(n, num, den);
            let base_num = num - cand_num[g[vtx]];
            let base_den = den - cand_den[g[vtx]];
            let mut best_x = g[vtx];
            let mut best_ratio = cur;
            for x in 0..xs {
                let r = ratio_value(n, base_num + cand_num[x], base_den + cand_den[x]);
                if r > best_ratio {
                    best_ratio = r;
                    best_x = x;
                }
            }
            if best_x != g[vtx] {
                num = base_num + cand_num[best_x];
                den = base_den + cand_den[best_x];
                g[vtx] = best_x;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (pair_ratio(af, k, &f, &g), f, g)
}

// =========================================================================
// Fréchet lower bound and the coarse obstruction report
// =========================================================================

/// The Fréchet embedding of a connected graph: vertex `v` maps to its
/// vector of shortest-path distances `(d(v,u))_{u∈V}`, an isometric
/// embedding of the path metric into `ℓ∞`.
pub fn frechet_embedding(g: &Multigraph) -> Result<Vec<Vec<i64>>> {
    let n = g.n();
    let dist = g.all_pairs_distances();
    if dist.iter().any(|&d| d == u16::MAX) {
        return Err(Error::Disconnected);
    }
    Ok((0..n)
        .map(|v| (0..n).map(|u| dist[v * n + u] as i64).collect())
        .collect())
}

/// Lower bound on `γ₊(G, (log(1+‖·‖∞))^p)` from the Fréchet embedding:
/// the pair ratio at `f = g = identity`.
///
/// Because the embedding is isometric, `‖emb(u) − emb(v)‖∞ = d_G(u,v)`, so
/// the ratio only needs the distance histogram and the edge distances —
/// the `|V|²` kernel matrix is never materialized (checked against the
/// literal kernel on small graphs in the tests).
pub fn frechet_lower_bound(g: &Multigraph, p: f64) -> Result<PoincareEstimate> {
    if p <= 0.0 {
        return Err(Error::InvalidInput("Fréchet bound needs p > 0".into()));
    }
    let n = g.n();
    let d = g.degree();
    let dist = g.all_pairs_distances();
    if dist.iter().any(|&x| x == u16::MAX) {
        return Err(Error::Disconnected);
    }
    let diameter = dist.iter().copied().max().unwrap_or(0) as usize;
    let rho: Vec<f64> = (0..=diameter)
        .map(|t| (1.0 + t as f64).ln().powf(p))
        .collect();
    let mut hist = vec![0u64; diameter + 1];
    for &x in &dist {
        hist[x as usize] += 1;
    }
    let num: f64 = hist
        .iter()
        .zip(&rho)
        .map(|(&c, &r)| c as f64 * r)
        .sum();
    let mut den = 0.0;
    for u in 0..n {
        for pt in 0..d {
            let (v, _) = g.rot(u, pt);
            den += rho[dist[u * n + v] as usize] / d as f64;
        }
    }
    let value = match ratio_value(n, num, den) {
        Some(v) => v,
        None => ExtReal::finite(1.0), // single-vertex graph: vacuous
    };
    Ok(PoincareEstimate {
        value,
        kind: EstimateKind::LowerBound,
        witness: Some(Witness {
            f: (0..n).collect(),
            g: Some((0..n).collect()),
        }),
    })
}

/// Obstruction report: consequences of a finite Poincaré constant for
/// coarse/bi-Lipschitz embeddings of the graph's path metric.
#[derive(Debug, Clone)]
pub struct CoarseObstructionReport {
    pub n: usize,
    /// Median shortest-path distance over ordered pairs `u ≠ v`.
    pub median_distance: f64,
    /// Certified constant `c = median / log n` (so `median ≥ c·log n` by
    /// construction, with BFS distances as the certificate).
    pub c: f64,
    pub gamma_plus: f64,
    pub p: f64,
    /// Any embedding with this kernel's modulus must distort some pair by
    /// at least `median / (2γ₊)^{1/p}` (clamped below at the trivial 1).
    pub distortion_bound: f64,
}

impl std::fmt::Display for CoarseObstructionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "n={} median_distance={} c={:.6} gamma_plus={} p={} distortion>={:.6}",
            self.n, self.median_distance, self.c, self.gamma_plus, self.p, self.distortion_bound
        )
    }
}

/// Builds the coarse-obstruction report for a connected graph with a known
/// finite `γ₊` under the `p`-th metric power: at least half of the vertex
/// pairs sit at distance ≥ median, while the Poincaré inequality caps the
/// average embedded distance, forcing distortion `≥ median/(2γ₊)^{1/p}`.
pub fn coarse_obstruction_report(
    g: &Multigraph,
    gamma_plus: f64,
    p: f64,
) -> Result<CoarseObstructionReport> {
    if !(gamma_plus.is_finite() && gamma_plus > 0.0) {
        return Err(Error::InvalidInput(
            "coarse obstruction needs a finite positive γ₊".into(),
        ));
    }
    if p <= 0.0 {
        return Err(Error::InvalidInput("coarse obstruction needs p > 0".into()));
    }
    let n = g.n();
    let dist = g.all_pairs_distances();
    if dist.iter().any(|&x| x == u16::MAX) {
        return Err(Error::Disconnected);
    }
    let mut off: Vec<u16> = Vec::with_capacity(n * (n - 1));
    for u in 0..n {
        for v in 0..n {
            if v != u {
                off.push(dist[u * n + v]);
            }
        }
    }
    off.sort_unstable();
    let median_distance = if off.is_empty() {
        0.0
    } else {
        off[off.len() / 2] as f64
    };
    let c = if n >= 2 {
        median_distance / (n as f64).ln()
    } else {
        0.0
    };
    let distortion_bound = (median_distance / (2.0 * gamma_plus).powf(1.0 / p)).max(1.0);
    Ok(CoarseObstructionReport {
        n,
        median_distance,
        c,
        gamma_plus,
        p,
        distortion_bound,
    })
}

// =========================================================================
// Growth table over Cesàro averages
// =========================================================================

/// Lower bounds on `γ₊(𝒜_t(A_G), K)` at the identity assignments, for every
/// `t` in `times`, where `K(u,v) = (log(1+d_G(u,v)))^p` is the Fréchet
/// kernel of `G`'s own path metric.
///
/// The averaged matrix is never materialized (its multigraph realization
/// has degree `t·d^{t−1}`, hopeless beyond tiny `t`): the denominator
/// `Σ_{u,v} 𝒜_t(A)_{uv} K(u,v)` is accumulated from walk sums, running
/// `max(times)−1` adjacency applications per start vertex. Work is
/// `O(max t · n · ports)`; per-vertex walks run in parallel but totals are
/// reduced in vertex order, so results do not depend on the worker count.
///
/// Under the `s = 0..t−1` averaging convention `𝒜₁(A) = I`, whose
/// denominator vanishes on the zero-diagonal kernel: `t = 1` honestly
/// reports `∞`.
pub fn cesaro_frechet_lower_bounds(
    g: &Multigraph,
    times: &[usize],
    p: f64,
) -> Result<Vec<PoincareEstimate>> {
    if p <= 0.0 {
        return Err(Error::InvalidInput("Fréchet bound needs p > 0".into()));
    }
    if times.is_empty() || times.iter().any(|&t| t == 0) {
        return Err(Error::InvalidInput("averaging depths must be ≥ 1".into()));
    }
    let n = g.n();
    let dist = g.all_pairs_distances();
    if dist.iter().any(|&x| x == u16::MAX) {
        return Err(Error::Disconnected);
    }
    let diameter = dist.iter().copied().max().unwrap_or(0) as usize;
    let rho: Vec<f64> = (0..=diameter)
        .map(|k| (1.0 + k as f64).ln().powf(p))
        .collect();
    let max_t = *times.iter().max().unwrap();

    // Per start vertex u: the kernel-weighted walk mass
    // dots[s] = Σ_v (A^s)_{uv}·ρ(d(u,v))^p for s < max_t, plus the row's
    // share of the numerator Σ_v ρ(d(u,v))^p.
    let per_vertex: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let row = &dist[u * n..(u + 1) * n];
            let mut y = vec![0.0; n];
            let mut z = vec![0.0; n];
            y[u] = 1.0;
            let mut dots = Vec::with_capacity(max_t);
            for s in 0..max_t {
                if s > 0 {
                    adjacency_matvec(g, &y, &mut z);
                    std::mem::swap(&mut y, &mut z);
                }
                dots.push(
                    y.iter()
                        .zip(row)
                        .map(|(&w, &d)| w * rho[d as usize])
                        .sum(),
                );
            }
            let num_u = row.iter().map(|&d| rho[d as usize]).sum();
            (dots, num_u)
        })
        .collect();

    // Reduce in vertex order (fixed summation order regardless of the
    // rayon pool size).
    let mut totals = vec![0.0; max_t];
    let mut num = 0.0;
    for (dots, num_u) in &per_vertex {
        for (acc, &d) in totals.iter_mut().zip(dots) {
            *acc += d;
        }
        num += num_u;
    }

    let witness = Witness {
        f: (0..n).collect(),
        g: Some((0..n).collect()),
    };
    Ok(times
        .iter()
        .map(|&t| {
            let den: f64 = totals[..t].iter().sum::<f64>() / t as f64;
            let value = match ratio_value(n, num, den) {
                Some(v) => v,
                None => ExtReal::finite(1.0), // single vertex: vacuous
            };
            PoincareEstimate {
                value,
                kind: EstimateKind::LowerBound,
                witness: Some(witness.clone()),
            }
        })
        .collect())
}

/// Single-depth convenience form of [`cesaro_frechet_lower_bounds`].
pub fn cesaro_frechet_lower_bound(
    g: &Multigraph,
    t: usize,
    p: f64,
) -> Result<PoincareEstimate> {
    Ok(cesaro_frechet_lower_bounds(g, &[t], p)?.pop().unwrap())
}

/// One grid point of [`growth_experiment`].
#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub n: usize,
    pub t: usize,
    /// The comparison abscissa `(log(1 + log n / t))^p`.
    pub x: f64,
    /// Fréchet lower bound on `γ₊(𝒜_t(A_G), ρ^p)`.
    pub cesaro_frechet: ExtReal,
    /// Fréchet lower bound on `γ₊(A_G, ρ^p)` (depth-independent).
    pub frechet: ExtReal,
    /// Spectral `γ₊(A_G, |·|²)` (depth-independent).
    pub spectral_gamma_plus: ExtReal,
}

/// Header for [`GrowthRow::csv_row`].
pub fn growth_csv_header() -> &'static str {
    "n,t,x,gamma_plus_cesaro_frechet,gamma_plus_frechet,gamma_plus_spectral"
}

impl GrowthRow {
    /// One CSV row matching [`growth_csv_header`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.12},{},{},{}",
            self.n, self.t, self.x, self.cesaro_frechet, self.frechet, self.spectral_gamma_plus
        )
    }
}

/// Outcome of [`growth_experiment`].
#[derive(Debug, Clone)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    /// Whether, at every fixed `t`, the Cesàro–Fréchet bound is
    /// non-decreasing in `n` (tiny relative slack).
    pub monotone_in_n: bool,
    /// Least-squares slope of the finite Cesàro–Fréchet bounds against the
    /// abscissa `x`; `None` with fewer than two distinct finite points.
    pub fit_slope: Option<f64>,
}

/// Dense below this size, power iteration above (mirrors the construction
/// pipeline's split).
const GROWTH_DENSE_MAX: usize = 600;
const GROWTH_POWER_ITERS: usize = 700;

/// Sweeps random `degree`-regular graphs over `sizes`, evaluating for each
/// depth in `times` the Fréchet lower bound on `γ₊(𝒜_t(A_G), ρ^p)` with
/// `ρ = log(1+d_G)`, alongside the depth-free Fréchet bound and the
/// spectral (Euclidean) `γ₊`. Deterministic in `seed`.
///
/// The returned table records whether the Cesàro–Fréchet bound is
/// non-decreasing in `n` at every fixed `t`, and the least-squares slope of
/// its finite values against `x = (log(1+log n/t))^p` — the shape the
/// bounds are expected to track while the spectral column stays bounded.
/// Rows with an infinite bound (the degenerate `t = 1` average) are
/// excluded from the fit.
pub fn growth_experiment(
    sizes: &[usize],
    times: &[usize],
    degree: usize,
    p: f64,
    seed: u64,
) -> Result<GrowthTable> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "sizes must be non-empty and strictly increasing".into(),
        ));
    }
    if degree < 2 {
        return Err(Error::InvalidInput("growth experiment needs degree ≥ 2".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(sizes.len() * times.len());
    for &n in sizes {
        let mut draw = rng.split();
        let g = Multigraph::random_regular_connected(n, degree, &mut draw, 500)?;
        let bounds = cesaro_frechet_lower_bounds(&g, times, p)?;
        let plain = frechet_lower_bound(&g, p)?;
        let spectral_gamma_plus = if n <= GROWTH_DENSE_MAX {
            crate::spectral::spectrum(&g.normalized_adjacency()).gamma_plus
        } else {
            let mut power_rng = rng.split();
            crate::spectral::gap_to_gamma(crate::spectral::lambda_abs_power(
                &g,
                GROWTH_POWER_ITERS,
                &mut power_rng,
            ))
        };
        for (&t, est) in times.iter().zip(&bounds) {
            let x = (1.0 + (n as f64).ln() / t as f64).ln().powf(p);
            rows.push(GrowthRow {
                n,
                t,
                x,
                cesaro_frechet: est.value,
                frechet: plain.value,
                spectral_gamma_plus,
            });
        }
    }

    // Monotone in n at fixed t (∞ dominates everything, including ∞).
    let mut monotone_in_n = true;
    for &t in times {
        let col: Vec<ExtReal> = rows
            .iter()
            .filter(|r| r.t == t)
            .map(|r| r.cesaro_frechet)
            .collect();
        for w in col.windows(2) {
            let ok = match (w[0], w[1]) {
                (_, ExtReal::Infinite) => true,
                (ExtReal::Infinite, ExtReal::Finite(_)) => false,
                (ExtReal::Finite(a), ExtReal::Finite(b)) => b >= a * (1.0 - 1e-9),
            };
            if !ok {
                monotone_in_n = false;
            }
        }
    }

    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| match r.cesaro_frechet {
            ExtReal::Finite(v) => Some((r.x, v)),
            ExtReal::Infinite => None,
        })
        .collect();
    let fit_slope = least_squares_slope(&pts);

    Ok(GrowthTable {
        rows,
        monotone_in_n,
        fit_slope,
    })
}

/// Ordinary least-squares slope; `None` without two distinct abscissae.
fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

// =========================================================================
// Tests
// =========================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_ops::{cesaro_matrix, zigzag};
    use crate::multigraph::{cycle, Multigraph};
    use crate::spectral::spectrum;

    // ------------------------------------------------------------------
    // Independent exhaustive enumerator (the oracle): plain nested loops
    // over the full assignment space, no tables, no pruning.
    // ------------------------------------------------------------------

    fn oracle_ratio(af: &FloatMatrix, k: &KernelSpace, f: &[usize], g: &[usize]) -> Option<ExtReal> {
        let n = af.n();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in 0..n {
                let kv = k.get(f[i], g[j]);
                num += kv;
                den += af.get(i, j) * kv;
            }
        }
        ratio_value(n, num, den)
    }

    fn oracle_gamma_plus(a: &StochasticMatrix, k: &KernelSpace) -> (ExtReal, Option<(Vec<usize>, Vec<usize>)>) {
        let af = a.to_float();
        let n = a.n();
        let xs = k.size();
        let mut f = vec![0usize; n];
        let mut best: Option<(ExtReal, Vec<usize>, Vec<usize>)> = None;
        loop {
            let mut g = vec![0usize; n];
            loop {
                if let Some(v) = oracle_ratio(&af, k, &f, &g) {
                    if best.as_ref().map_or(true, |(bv, _, _)| v > *bv) {
                        best = Some((v, f.clone(), g.clone()));
                    }
                }
                if !advance(&mut g, xs) {
                    break;
                }
            }
            if !advance(&mut f, xs) {
                break;
            }
        }
        match best {
            Some((v, f, g)) => (v, Some((f, g))),
            None => (ExtReal::finite(1.0), None),
        }
    }

    fn oracle_gamma(a: &StochasticMatrix, k: &KernelSpace) -> ExtReal {
        let af = a.to_float();
        let n = a.n();
        let xs = k.size();
        let mut f = vec![0usize; n];
        let mut best: Option<ExtReal> = None;
        loop {
            if let Some(v) = oracle_ratio(&af, k, &f, &f) {
                if best.map_or(true, |bv| v > bv) {
                    best = Some(v);
                }
            }
            if !advance(&mut f, xs) {
                break;
            }
        }
        best.unwrap_or(ExtReal::finite(1.0))
    }

    fn double_edge_2() -> Multigraph {
        Multigraph::from_edge_list(2, &[(0, 1), (0, 1)], &[]).unwrap()
    }

    // ------------------------------------------------------------------
    // Kernel constructors
    // ------------------------------------------------------------------

    #[test]
    fn metric_power_examples() {
        let two = kernel_metric_power(&[vec![0.0, 1.0], vec![1.0, 0.0]], 2.0).unwrap();
        assert_eq!(two.get(0, 1), 1.0);
        assert!(two.is_uniform());

        // Path metric on three points, squared: K(0,2) = 4.
        let d = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        let path = kernel_metric_power(&d, 2.0).unwrap();
        assert_eq!(path.get(0, 2), 4.0);
        assert!(!path.is_uniform());

        // ℓ₁ metric on {0,1}², squared: the largest entry is 2² = 4.
        let pts: [[f64; 2]; 4] = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let l1: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| {
                pts.iter()
                    .map(|b| (a[0] - b[0]).abs() + (a[1] - b[1]).abs())
                    .collect()
            })
            .collect();
        let k = kernel_metric_power(&l1, 2.0).unwrap();
        assert_eq!(k.max_entry(), 4.0);
    }

    #[test]
    fn metric_power_rejects_triangle_violation() {
        let d = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        match kernel_metric_power(&d, 1.0) {
            Err(Error::TriangleViolation { i, j, k }) => {
                // The witnessing triple really violates the inequality.
                assert!(d[i][k] > d[i][j] + d[j][k]);
            }
            other => panic!("expected TriangleViolation, got {other:?}"),
        }
    }

    #[test]
    fn log_linf_examples() {
        let k = kernel_log_linf(&[vec![0, 0], vec![0, 1], vec![2, 0]], 2.0).unwrap();
        assert_eq!(k.get(0, 0), 0.0);
        assert!((k.get(0, 1) - 2f64.ln().powi(2)).abs() < 1e-15);
        let k1 = kernel_log_linf(&[vec![0], vec![2]], 1.0).unwrap();
        assert!((k1.get(0, 1) - 3f64.ln()).abs() < 1e-15);
    }

    // ------------------------------------------------------------------
    // Exact enumeration
    // ------------------------------------------------------------------

    #[test]
    fn bipartite_double_edge_is_infinite() {
        let a = double_edge_2().normalized_adjacency();
        let k = uniform_kernel(2, 2.0);
        let est = gamma_plus_exact(&a, &k).unwrap();
        assert!(est.value.is_infinite());
        // The classic obstruction witness: f = (a,b), g = (b,a).
        let w = est.witness.unwrap();
        assert_eq!(w.f, vec![0, 1]);
        assert_eq!(w.g, Some(vec![1, 0]));
        assert_eq!(witness_ratio(&a, &k, &w), Some(ExtReal::Infinite));
    }

    #[test]
    fn engine_matches_oracle_on_uniform_kernel() {
        let a = cycle(3).normalized_adjacency();
        let k = uniform_kernel(2, 2.0);
        let est = gamma_plus_exact(&a, &k).unwrap();
        let (oracle_v, oracle_w) = oracle_gamma_plus(&a, &k);
        assert_eq!(est.value, oracle_v); // bit-exact agreement
        let w = est.witness.unwrap();
        let (of, og) = oracle_w.unwrap();
        assert_eq!(w.f, of);
        assert_eq!(w.g, Some(og));
        // Finite subsets of ℝ can't beat the full Euclidean constant:
        // the two-point metric {0,1} is a subset of the line.
        let spectral = spectrum(&a).gamma_plus.as_f64();
        assert!(est.value.as_f64() <= spectral + 1e-9);
    }

    #[test]
    fn engine_matches_oracle_on_random_instances() {
        let mut rng = SplitMix64::new(0xBEEF);
        let shapes = [(2, 2), (3, 2), (4, 3), (4, 2), (5, 2), (3, 4), (4, 1), (5, 4), (2, 3), (3, 2)];
        for &(n, d) in &shapes {
            let g = Multigraph::random_regular(n, d, &mut rng).unwrap();
            let a = g.normalized_adjacency();
            // Non-uniform kernel: no pruning path; engine and oracle scan
            // the identical full space.
            let mut entries = vec![vec![0.0; 3]; 3];
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let v = (1 + rng.below(8)) as f64 / 4.0;
                    entries[i][j] = v;
                    entries[j][i] = v;
                }
            }
            let k = KernelSpace::general("random", &entries).unwrap();
            let est = gamma_plus_exact(&a, &k).unwrap();
            let (oracle_v, oracle_w) = oracle_gamma_plus(&a, &k);
            assert_eq!(est.value, oracle_v);
            let w = est.witness.unwrap();
            let (of, og) = oracle_w.unwrap();
            assert_eq!((w.f, w.g), (of, Some(og)));
        }
    }

    #[test]
    fn one_point_kernel_convention() {
        let a = cycle(4).normalized_adjacency();
        let k = KernelSpace::general("1-point", &[vec![0.0]]).unwrap();
        let est = gamma_plus_exact(&a, &k).unwrap();
        assert_eq!(est.value, ExtReal::finite(1.0));
        assert!(est.witness.is_none());
        let est = gamma_exact(&a, &k).unwrap();
        assert_eq!(est.value, ExtReal::finite(1.0));
    }

    #[test]
    fn identity_matrix_gamma_is_infinite() {
        let a = StochasticMatrix::identity(3);
        let k = uniform_kernel(2, 2.0);
        let est = gamma_exact(&a, &k).unwrap();
        assert!(est.value.is_infinite());
        let w = est.witness.unwrap();
        assert!(w.g.is_none());
        assert_eq!(witness_ratio(&a, &k, &w), Some(ExtReal::Infinite));
    }

    #[test]
    fn gamma_at_most_gamma_plus() {
        let mut rng = SplitMix64::new(0x5151);
        for _ in 0..8 {
            let g = Multigraph::random_regular_connected(4, 3, &mut rng, 50).unwrap();
            let a = g.normalized_adjacency();
            for k in [uniform_kernel(2, 2.0), uniform_kernel(3, 1.0)] {
                let lo = gamma_exact(&a, &k).unwrap().value;
                let hi = gamma_plus_exact(&a, &k).unwrap().value;
                assert!(lo <= hi, "γ = {lo} > γ₊ = {hi}");
                assert_eq!(lo, oracle_gamma(&a, &k));
            }
        }
    }

    #[test]
    fn enumeration_cap_enforced() {
        let a = cycle(20).normalized_adjacency();
        let k = uniform_kernel(4, 2.0);
        match gamma_plus_exact(&a, &k) {
            Err(Error::EnumerationTooLarge { needed, cap }) => {
                assert!(needed > cap);
            }
            other => panic!("expected EnumerationTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn csv_row_format() {
        let a = cycle(3).normalized_adjacency();
        let k = uniform_kernel(2, 2.0);
        let est = gamma_plus_exact(&a, &k).unwrap();
        let row = est.csv_row("C3", k.label(), 0.012);
        assert_eq!(poincare_csv_header().split(',').count(), row.split(',').count());
        assert!(row.starts_with("C3,2-point uniform^2,exact,"));
    }

    // ------------------------------------------------------------------
    // Search
    // ------------------------------------------------------------------

    #[test]
    fn search_never_exceeds_exact() {
        let mut rng = SplitMix64::new(0xACE);
        for trial in 0..6 {
            let n = 3 + trial % 3;
            let g = Multigraph::random_regular_connected(n, 2, &mut rng, 50).unwrap();
            let a = g.normalized_adjacency();
            let k = uniform_kernel(2 + trial % 2, 2.0);
            let exact = gamma_plus_exact(&a, &k).unwrap();
            let search = gamma_plus_search(&a, &k, 8, 42).unwrap();
            assert_eq!(search.kind, EstimateKind::LowerBound);
            assert!(search.value <= exact.value);
            // Witness re-evaluation reproduces the reported value.
            if let Some(w) = &search.witness {
                let again = witness_ratio(&a, &k, w).unwrap();
                match (search.value, again) {
                    (ExtReal::Finite(x), ExtReal::Finite(y)) => assert!((x - y).abs() < 1e-12),
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }

    #[test]
    fn search_monotone_in_restarts() {
        let a = cycle(5).normalized_adjacency();
        let k = uniform_kernel(3, 2.0);
        let mut prev = ExtReal::finite(0.0);
        for r in [1usize, 2, 4, 8] {
            let est = gamma_plus_search(&a, &k, r, 7).unwrap();
            assert!(est.value >= prev, "restarts={r}: {} < {prev}", est.value);
            prev = est.value;
        }
    }

    #[test]
    fn search_on_euclidean_subset_respects_spectral_constant() {
        // Finite subsets of ℝ under |·|² can't exceed the Hilbert-space
        // constant 1/(1−λ).
        let mut rng = SplitMix64::new(0xE0C1);
        for _ in 0..5 {
            let g = Multigraph::random_regular_connected(6, 4, &mut rng, 50).unwrap();
            let a = g.normalized_adjacency();
            let pts: Vec<Vec<f64>> = (0..4).map(|_| vec![rng.f64() * 3.0]).collect();
            let k = euclidean_squared(&pts).unwrap();
            let s = spectrum(&a);
            if s.gamma_plus.is_infinite() {
                continue;
            }
            let est = gamma_plus_search(&a, &k, 16, 99).unwrap();
            assert!(
                est.value.as_f64() <= s.gamma_plus.as_f64() + 1e-6,
                "search {} exceeds spectral {}",
                est.value,
                s.gamma_plus
            );
        }
    }

    // ------------------------------------------------------------------
    // Fréchet bound and coarse obstruction
    // ------------------------------------------------------------------

    #[test]
    fn frechet_embedding_is_isometric_and_edges_map_to_log2() {
        let g = cycle(5);
        let emb = frechet_embedding(&g).unwrap();
        let dist = g.all_pairs_distances();
        for u in 0..5 {
            for v in 0..5 {
                let linf = (0..5).map(|w| (emb[u][w] - emb[v][w]).abs()).max().unwrap();
                assert_eq!(linf, dist[u * 5 + v] as i64);
            }
        }
        // Adjacent vertices sit at ρ-distance log 2 (p = 1).
        let k = kernel_log_linf(&emb, 1.0).unwrap();
        for u in 0..5 {
            let (v, _) = g.rot(u, 0);
            assert!((k.get(u, v) - 2f64.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn frechet_bound_matches_literal_kernel_evaluation() {
        let mut rng = SplitMix64::new(0xF2EC);
        for _ in 0..5 {
            let g = Multigraph::random_regular_connected(10, 3, &mut rng, 50).unwrap();
            for p in [1.0, 2.0] {
                let est = frechet_lower_bound(&g, p).unwrap();
                // Literal route: build the kernel on the embedding and
                // evaluate the identity assignment.
                let emb = frechet_embedding(&g).unwrap();
                let k = kernel_log_linf(&emb, p).unwrap();
                let idv: Vec<usize> = (0..g.n()).collect();
                let literal = pair_ratio(&g.normalized_adjacency().to_float(), &k, &idv, &idv)
                    .unwrap()
                    .as_f64();
                assert!(
                    (est.value.as_f64() - literal).abs() <= 1e-12 * literal.max(1.0),
                    "histogram {} vs literal {}",
                    est.value.as_f64(),
                    literal
                );
            }
        }
    }

    #[test]
    fn frechet_single_edge_is_finite() {
        let est = frechet_lower_bound(&double_edge_2(), 2.0).unwrap();
        assert!(est.value.is_finite());
        assert!(est.value.as_f64() > 0.0);
    }

    #[test]
    fn frechet_rejects_disconnected() {
        // Two disjoint double edges.
        let g = Multigraph::from_edge_list(4, &[(0, 1), (0, 1), (2, 3), (2, 3)], &[]).unwrap();
        assert!(matches!(frechet_lower_bound(&g, 1.0), Err(Error::Disconnected)));
    }

    #[test]
    fn coarse_obstruction_trivial_and_monotone() {
        let g = cycle(8);
        let r1 = coarse_obstruction_report(&g, 2.0, 2.0).unwrap();
        let r2 = coarse_obstruction_report(&g, 8.0, 2.0).unwrap();
        assert!(r1.distortion_bound >= r2.distortion_bound);
        assert!(r2.distortion_bound >= 1.0);
        // Two vertices joined by a double edge: median distance 1, bound
        // clamps to the trivial 1.
        let tiny = coarse_obstruction_report(&double_edge_2(), 1.0, 2.0).unwrap();
        assert_eq!(tiny.distortion_bound, 1.0);
    }

    #[test]
    fn coarse_obstruction_scales_like_log_n_on_expanders() {
        // Random 4-regular graphs have median distance ≈ log₃ n and a
        // bounded spectral γ₊, so the bound grows like log n.
        let mut rng = SplitMix64::new(0x0B57);
        let g = Multigraph::random_regular_connected(256, 4, &mut rng, 50).unwrap();
        let s = spectrum(&g.normalized_adjacency());
        let gp = s.gamma_plus.as_f64();
        let rep = coarse_obstruction_report(&g, gp, 2.0).unwrap();
        let logn = (256f64).ln();
        assert!(
            rep.distortion_bound >= 0.2 * logn,
            "bound {} too small vs log n = {}",
            rep.distortion_bound,
            logn
        );
        // BFS median really certifies median ≥ c·log n.
        assert!(rep.median_distance >= rep.c * logn - 1e-9);
    }

    // ------------------------------------------------------------------
    // Cesàro–Fréchet bounds and the growth table
    // ------------------------------------------------------------------

    #[test]
    fn cesaro_frechet_matches_dense_matrix_oracle() {
        // The walk-sum route must agree with the literal computation:
        // exact Cesàro matrix, materialized log-ℓ∞ kernel on the Fréchet
        // embedding, ratio at the identity assignments.
        let mut rng = SplitMix64::new(0xCE5A| 0x20);
        let graphs = vec![
            cycle(5),
            cycle(6),
            Multigraph::random_regular_connected(10, 4, &mut rng, 100).unwrap(),
        ];
        for g in &graphs {
            let n = g.n();
            let id: Vec<usize> = (0..n).collect();
            let emb = frechet_embedding(g).unwrap();
            for p in [1.0, 2.0] {
                let kernel = kernel_log_linf(&emb, p).unwrap();
                let bounds = cesaro_frechet_lower_bounds(g, &[1, 2, 3, 4], p).unwrap();
                for (t, est) in (1..=4).zip(&bounds) {
                    let a_t = cesaro_matrix(&g.normalized_adjacency(), t).to_float();
                    let want = pair_ratio(&a_t, &kernel, &id, &id).unwrap();
                    match (est.value, want) {
                        (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                            assert!(
                                (a - b).abs() <= 1e-9 * b.max(1.0),
                                "n={n} t={t} p={p}: {a} vs {b}"
                            );
                        }
                        (a, b) => assert_eq!(a, b, "n={n} t={t} p={p}"),
                    }
                }
            }
        }
    }

    #[test]
    fn cesaro_frechet_depth_one_is_infinite() {
        // 𝒜₁ = I averages only the identity term; the kernel diagonal is
        // zero, so the ratio is honestly ∞.
        let est = cesaro_frechet_lower_bound(&cycle(7), 1, 2.0).unwrap();
        assert!(est.value.is_infinite());
        assert_eq!(est.kind, EstimateKind::LowerBound);
    }

    #[test]
    fn cesaro_frechet_rejects_bad_inputs() {
        let g = cycle(5);
        assert!(matches!(
            cesaro_frechet_lower_bounds(&g, &[], 2.0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cesaro_frechet_lower_bounds(&g, &[0], 2.0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cesaro_frechet_lower_bounds(&g, &[2], 0.0),
            Err(Error::InvalidInput(_))
        ));
        let disc = Multigraph::from_edge_list(4, &[(0, 1), (0, 1), (2, 3), (2, 3)], &[]).unwrap();
        assert!(matches!(
            cesaro_frechet_lower_bounds(&disc, &[2], 2.0),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn growth_table_shape_and_degenerate_depth() {
        let table = growth_experiment(&[16, 32, 64], &[1, 2], 4, 2.0, 0x64).unwrap();
        assert_eq!(table.rows.len(), 6);
        let cols = growth_csv_header().split(',').count();
        for r in &table.rows {
            assert_eq!(r.csv_row().split(',').count(), cols);
            assert!(r.x > 0.0);
            match r.t {
                1 => assert!(r.cesaro_frechet.is_infinite()),
                _ => assert!(r.cesaro_frechet.is_finite()),
            }
            assert!(r.frechet.is_finite());
            assert!(r.spectral_gamma_plus.is_finite());
        }
        // The fit uses only the finite (t = 2) points.
        assert!(table.fit_slope.is_some());
        // Identical (config, seed) → identical table.
        let again = growth_experiment(&[16, 32, 64], &[1, 2], 4, 2.0, 0x64).unwrap();
        for (a, b) in table.rows.iter().zip(&again.rows) {
            assert_eq!(a.csv_row(), b.csv_row());
        }
        assert!(matches!(
            growth_experiment(&[32, 16], &[2], 4, 2.0, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    // ------------------------------------------------------------------
    // Kernel-level product and doubling inequalities
    // ------------------------------------------------------------------

    /// Two vertices joined by an edge, one loop each: the smallest
    /// non-bipartite regular cloud (degree 2, positive diagonal), so both
    /// zigzag factors can have finite γ₊.
    fn loop_edge_2() -> Multigraph {
        Multigraph::from_edge_list(2, &[(0, 1)], &[1, 1]).unwrap()
    }

    fn le(a: ExtReal, b: ExtReal) -> bool {
        match (a, b) {
            (_, ExtReal::Infinite) => true,
            (ExtReal::Infinite, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(x), ExtReal::Finite(y)) => x <= y * (1.0 + 1e-9) + 1e-9,
        }
    }

    #[test]
    fn zigzag_gamma_plus_is_submultiplicative_exhaustively() {
        // γ₊(G₁ⓏG₂, K) ≤ γ₊(G₁,K)·γ₊(G₂,K)², exact values on products
        // small enough to enumerate. Includes a bipartite factor (∞-aware
        // case) and fully finite instances.
        let three_point = kernel_metric_power(
            &[
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 1.0],
                vec![2.0, 1.0, 0.0],
            ],
            2.0,
        )
        .unwrap();
        let cases: Vec<(Multigraph, Multigraph, KernelSpace)> = vec![
            (cycle(3), loop_edge_2(), uniform_kernel(2, 2.0)),
            (cycle(5), loop_edge_2(), uniform_kernel(2, 2.0)),
            (cycle(3), loop_edge_2(), three_point),
            (cycle(4), double_edge_2(), uniform_kernel(2, 2.0)),
        ];
        for (g1, g2, k) in &cases {
            let z = zigzag(g1, g2).unwrap();
            let gp_z = gamma_plus_exact(&z.normalized_adjacency(), k).unwrap().value;
            let gp_1 = gamma_plus_exact(&g1.normalized_adjacency(), k).unwrap().value;
            let gp_2 = gamma_plus_exact(&g2.normalized_adjacency(), k).unwrap().value;
            let bound = gp_1.mul(gp_2).mul(gp_2);
            assert!(
                le(gp_z, bound),
                "γ₊(Z) = {gp_z} exceeds {gp_1}·{gp_2}² on n₁ = {}, kernel {}",
                g1.n(),
                k.label()
            );
        }
    }

    #[test]
    fn doubling_sandwich_on_small_instances() {
        // (2/5)·γ(double(A), K) ≤ γ₊(A, K) ≤ 2·γ(double(A), K).
        let mut rng = SplitMix64::new(0x2D0B);
        let mut graphs = vec![cycle(3), cycle(4), cycle(5), loop_edge_2()];
        for _ in 0..4 {
            let n = rng.range(2, 6);
            graphs.push(Multigraph::random_regular(n, 2, &mut rng).unwrap());
        }
        let kernels = [
            uniform_kernel(2, 2.0),
            uniform_kernel(3, 1.0),
            euclidean_squared(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap(),
        ];
        for g in &graphs {
            let a = g.normalized_adjacency();
            let d = a.double();
            for k in &kernels {
                let gp = gamma_plus_exact(&a, k).unwrap().value;
                let gd = gamma_exact(&d, k).unwrap().value;
                assert!(
                    le(gd.scale(0.4), gp) && le(gp, gd.scale(2.0)),
                    "n = {}, kernel {}: γ₊ = {gp}, γ(double) = {gd}",
                    g.n(),
                    k.label()
                );
            }
        }
    }

    #[test]
    fn doubling_commutes_with_averaging_up_to_factor_9() {
        // γ(double(𝒜_m(A)), K) ≤ 9·γ(𝒜_m(double(A)), K) for m ≤ 3.
        let mut rng = SplitMix64::new(0x9C0);
        let mut graphs = vec![cycle(3), cycle(4), loop_edge_2()];
        for _ in 0..3 {
            let n = rng.range(2, 5);
            graphs.push(Multigraph::random_regular(n, 2, &mut rng).unwrap());
        }
        let kernels = [uniform_kernel(2, 2.0), uniform_kernel(3, 2.0)];
        for g in &graphs {
            let a = g.normalized_adjacency();
            for m in 1..=3 {
                let avg_then_double = cesaro_matrix(&a, m).double();
                let double_then_avg = cesaro_matrix(&a.double(), m);
                for k in &kernels {
                    let lhs = gamma_exact(&avg_then_double, k).unwrap().value;
                    let rhs = gamma_exact(&double_then_avg, k).unwrap().value;
                    assert!(
                        le(lhs, rhs.scale(9.0)),
                        "n = {}, m = {m}, kernel {}: {lhs} vs 9·{rhs}",
                        g.n(),
                        k.label()
                    );
                }
            }
        }
    }

    #[test]
    fn real_line_gamma_plus_respects_spectral_transfer() {
        // For 3-point subsets of ℝ under |·|², exact γ₊ is at most
        // 64·(1−λ)⁻².
        let mut rng = SplitMix64::new(0x3CF6);
        let mut checked = 0;
        while checked < 12 {
            let n = rng.range(2, 6);
            let d = if rng.below(2) == 0 { 3 } else { 4 };
            if (n * d) % 2 == 1 {
                continue;
            }
            let Ok(g) = Multigraph::random_regular_connected(n, d, &mut rng, 50) else {
                continue;
            };
            let s = spectrum(&g.normalized_adjacency());
            if s.lambda_abs >= 1.0 {
                continue;
            }
            let pts: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.gauss()]).collect();
            let k = euclidean_squared(&pts).unwrap();
            let gp = gamma_plus_exact(&g.normalized_adjacency(), &k).unwrap().value;
            let bound = 64.0 * (1.0 - s.lambda_abs).powi(-2);
            assert!(
                le(gp, ExtReal::finite(bound)),
                "n = {n}, d = {d}: γ₊ = {gp} over 64(1−λ)⁻² = {bound}"
            );
            checked += 1;
        }
    }
}
