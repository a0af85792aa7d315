//! Iterative expander constructions.
//!
//! Three pipelines grow large graphs of fixed degree from a small base,
//! each certified level by level with its own spectral report:
//!
//! * [`rvw_iterate`] — the classical power/zigzag iteration `G₁ = H²`,
//!   `G_{i+1} = G_i^{t₀} Ⓩ H`, which needs `n₀ = d₀^{2t₀}` so the sizes
//!   line up, and keeps `n₀^i` vertices at degree `d₀²`. Every level is
//!   checked against the unconditional recursion
//!   `λ(G_{i+1}) ≤ 1 − (1−λ(G_i)^{t₀})(1−λ(H))²`.
//! * [`super_iterate`] — the Cesàro variant `F₁ = 𝒞_{d₀²}(F₀)`,
//!   `F_{j+1} = (𝒞_{n₀}(𝒜_{t₀}(F_j))) Ⓩ F₀`, which replaces powering by
//!   Cesàro averaging. Each level is checked against the
//!   submultiplicativity chain
//!   `γ₊(F_{j+1}) ≤ 2·γ₊(𝒜_{t₀}(F_j))·γ₊(F₀)²`, and can additionally
//!   carry heuristic `γ₊` lower bounds under configured kernels.
//! * [`diagonalize`] — the degree-unification schedule that folds a
//!   two-parameter family into a single sequence of common degree by
//!   complete–zigzag–average steps against smaller family members,
//!   emitting an audit trail of every index decision.
//!
//! [`finish_degree9`] converts any regular graph into a 9-regular one by a
//! zigzag with a self-looped cycle, with the certified factor `16d⁴`;
//! [`classical_base_search`] scans small graphs for bases meeting the
//! threshold that makes the classical recursion self-sustaining.
//!
//! Plans are plain `key = value` text ([`ConstructionPlan`]). Levels too
//! large for the dense eigensolver fall back to the rotation-map power
//! iteration and are flagged as estimates in their reports.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::graph_ops::{
    cesaro, cycle_with_loops, edge_complete, power, replacement, zigzag, DEFAULT_PORT_CAP,
};
use crate::multigraph::{self, Multigraph};
use crate::poincare::{gamma_plus_search, KernelSpace};
use crate::rng::SplitMix64;
use crate::spectral::{gap_to_gamma, lambda_abs_power, spectrum};
use std::fmt;

/// Largest vertex count sent to the dense eigensolver; bigger levels use
/// the rotation-map power iteration.
pub const DENSE_SPECTRUM_MAX: usize = 600;

/// Largest vertex count any pipeline is allowed to construct.
pub const VERTEX_CAP: usize = 1 << 18;

/// Power-iteration ceiling for levels above [`DENSE_SPECTRUM_MAX`].
const POWER_ITERS: usize = 900;

/// Work budget (ports × iterations) for one power-iteration estimate; on
/// very large graphs the iteration count is scaled down to keep a level
/// report affordable, never below [`POWER_ITERS_MIN`].
const POWER_ITER_BUDGET: usize = 150_000_000;

/// Floor for the scaled power-iteration count.
const POWER_ITERS_MIN: usize = 200;

/// Absolute slack for per-level `λ` comparisons.
const LAMBDA_TOL: f64 = 1e-9;

/// `value ≤ bound` for `γ₊` comparisons, with relative slack.
fn gamma_le(value: ExtReal, bound: ExtReal) -> bool {
    match (value, bound) {
        (_, ExtReal::Infinite) => true,
        (ExtReal::Infinite, ExtReal::Finite(_)) => false,
        (ExtReal::Finite(v), ExtReal::Finite(b)) => v <= b * (1.0 + 1e-9) + 1e-9,
    }
}

// =========================================================================
// Plans
// =========================================================================

/// Which recursion a plan runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    /// `G_{i+1} = G_i^{t₀} Ⓩ H` (requires `n₀ = d₀^{2t₀}`).
    ClassicalPower,
    /// `F_{j+1} = (𝒞_{n₀}(𝒜_{t₀}(F_j))) Ⓩ F₀` (requires
    /// `t₀·d₀^{2(t₀−1)} ≤ n₀`).
    Cesaro,
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanMode::ClassicalPower => write!(f, "classical_power"),
            PlanMode::Cesaro => write!(f, "cesaro"),
        }
    }
}

/// A named base-graph generator, so plans stay plain text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseSpec {
    /// Plain cycle `C_n` (2-regular), `n ≥ 3`.
    Cycle(usize),
    /// Self-looped cycle `C_n°` (3-regular), `n ≥ 2`.
    CycleLoops(usize),
    /// Complete graph `K_n` (`n−1`-regular), `n ≥ 2`.
    Complete(usize),
    /// One vertex with `d` loops (`d`-regular).
    PointLoops(usize),
    /// Connected random `d`-regular multigraph drawn from the given seed.
    Random { n: usize, d: usize, seed: u64 },
}

impl BaseSpec {
    /// Builds the named graph.
    pub fn build(&self) -> Result<Multigraph> {
        match *self {
            BaseSpec::Cycle(n) => {
                if n < 3 {
                    return Err(Error::InvalidInput(format!(
                        "cycle base needs at least 3 vertices, got {n}"
                    )));
                }
                Ok(multigraph::cycle(n))
            }
            BaseSpec::CycleLoops(n) => cycle_with_loops(n),
            BaseSpec::Complete(n) => {
                if n < 2 {
                    return Err(Error::InvalidInput(format!(
                        "complete base needs at least 2 vertices, got {n}"
                    )));
                }
                Ok(multigraph::complete(n))
            }
            BaseSpec::PointLoops(d) => {
                if d == 0 {
                    return Err(Error::InvalidInput("loop count must be positive".into()));
                }
                Ok(multigraph::point_with_loops(d))
            }
            BaseSpec::Random { n, d, seed } => {
                let mut rng = SplitMix64::new(seed);
                Multigraph::random_regular_connected(n, d, &mut rng, 500)
            }
        }
    }

    /// Parses `cycle:N`, `cycle_loops:N`, `complete:N`, `point_loops:D`,
    /// or `random:N:D:SEED`.
    pub fn parse(s: &str) -> Result<BaseSpec> {
        let mut parts = s.split(':').map(str::trim);
        let name = parts.next().unwrap_or_default();
        let mut next_num = |what: &str| -> Result<usize> {
            parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::InvalidInput(format!("base spec `{s}`: bad or missing {what}")))
        };
        let spec = match name {
            "cycle" => BaseSpec::Cycle(next_num("size")?),
            "cycle_loops" => BaseSpec::CycleLoops(next_num("size")?),
            "complete" => BaseSpec::Complete(next_num("size")?),
            "point_loops" => BaseSpec::PointLoops(next_num("loop count")?),
            "random" => BaseSpec::Random {
                n: next_num("size")?,
                d: next_num("degree")?,
                seed: next_num("seed")? as u64,
            },
            other => {
                return Err(Error::InvalidInput(format!("unknown base generator `{other}`")));
            }
        };
        if parts.next().is_some() {
            return Err(Error::InvalidInput(format!("base spec `{s}` has trailing fields")));
        }
        Ok(spec)
    }
}

impl fmt::Display for BaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BaseSpec::Cycle(n) => write!(f, "cycle:{n}"),
            BaseSpec::CycleLoops(n) => write!(f, "cycle_loops:{n}"),
            BaseSpec::Complete(n) => write!(f, "complete:{n}"),
            BaseSpec::PointLoops(d) => write!(f, "point_loops:{d}"),
            BaseSpec::Random { n, d, seed } => write!(f, "random:{n}:{d}:{seed}"),
        }
    }
}

/// A construction plan: mode, power/averaging depth `t₀`, recursion depth,
/// base graph, and whether to append the degree-9 finisher.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub mode: PlanMode,
    pub t0: usize,
    pub depth: usize,
    pub base: BaseSpec,
    pub finish: bool,
}

impl ConstructionPlan {
    /// Parses `key = value` lines (`#` comments and blanks ignored).
    /// Required keys: `mode`, `t0`, `depth`, `base`; optional `finish`.
    pub fn parse(text: &str) -> Result<ConstructionPlan> {
        let mut mode = None;
        let mut t0 = None;
        let mut depth = None;
        let mut base = None;
        let mut finish = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: idx + 1, msg };
            let (key, value) = match line.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => return Err(bad(format!("expected `key = value`, got `{line}`"))),
            };
            match key {
                "mode" => {
                    mode = Some(match value {
                        "classical_power" => PlanMode::ClassicalPower,
                        "cesaro" => PlanMode::Cesaro,
                        other => return Err(bad(format!("unknown mode `{other}`"))),
                    })
                }
                "t0" => {
                    t0 = Some(value.parse::<usize>().map_err(|_| {
                        bad(format!("t0 must be a positive integer, got `{value}`"))
                    })?)
                }
                "depth" => {
                    depth = Some(value.parse::<usize>().map_err(|_| {
                        bad(format!("depth must be an integer, got `{value}`"))
                    })?)
                }
                "base" => base = Some(BaseSpec::parse(value).map_err(|e| bad(e.to_string()))?),
                "finish" => {
                    finish = match value {
                        "true" => true,
                        "false" => false,
                        other => return Err(bad(format!("finish must be true/false, got `{other}`"))),
                    }
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let missing = |what: &str| Error::InvalidInput(format!("plan is missing `{what}`"));
        let plan = ConstructionPlan {
            mode: mode.ok_or_else(|| missing("mode"))?,
            t0: t0.ok_or_else(|| missing("t0"))?,
            depth: depth.ok_or_else(|| missing("depth"))?,
            base: base.ok_or_else(|| missing("base"))?,
            finish,
        };
        if plan.t0 == 0 {
            return Err(Error::InvalidInput("t0 must be at least 1".into()));
        }
        Ok(plan)
    }

    /// Serializes back to the `key = value` format accepted by
    /// [`ConstructionPlan::parse`].
    pub fn to_text(&self) -> String {
        format!(
            "mode = {}\nt0 = {}\ndepth = {}\nbase = {}\nfinish = {}\n",
            self.mode, self.t0, self.depth, self.base, self.finish
        )
    }
}

// =========================================================================
// Level reports
// =========================================================================

/// The per-level inequality a constructed level was checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelBound {
    /// Base level: nothing to check.
    Base,
    /// Classical recursion: `λ(level) ≤ bound`.
    Lambda(f64),
    /// Cesàro chain: `γ₊(level) ≤ bound`.
    GammaPlus(ExtReal),
}

/// Spectral certificate for one constructed level.
#[derive(Debug, Clone)]
pub struct LevelReport {
    /// Level index (0 = base).
    pub level: usize,
    pub vertices: usize,
    pub degree: usize,
    /// `λ(A)`: exact below [`DENSE_SPECTRUM_MAX`] vertices, power-iteration
    /// estimate above (see `dense`).
    pub lambda: f64,
    /// Whether `lambda` came from the dense eigensolver.
    pub dense: bool,
    /// Euclidean `γ₊ = 1/(1−λ)`.
    pub gamma_plus: ExtReal,
    /// The recursion bound this level was checked against.
    pub bound: LevelBound,
    /// Whether the checked quantity stayed within the bound (base: true).
    pub holds: bool,
    /// Heuristic `γ₊` lower bounds under configured kernels
    /// (label, value); empty when tracking is off or the level is too big.
    pub search_bounds: Vec<(String, ExtReal)>,
}

/// CSV header matching [`LevelReport::csv_row`].
pub fn level_csv_header() -> &'static str {
    "level,vertices,degree,lambda,route,gamma_plus,bound_kind,bound,holds,search_bounds"
}

impl LevelReport {
    pub fn csv_row(&self) -> String {
        let (kind, bound) = match self.bound {
            LevelBound::Base => ("base", "-".to_string()),
            LevelBound::Lambda(b) => ("lambda", format!("{b:.12}")),
            LevelBound::GammaPlus(b) => ("gamma_plus", b.to_string()),
        };
        let search = self
            .search_bounds
            .iter()
            .map(|(label, v)| format!("{label}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{:.12},{},{},{},{},{},{}",
            self.level,
            self.vertices,
            self.degree,
            self.lambda,
            if self.dense { "dense" } else { "power" },
            self.gamma_plus,
            kind,
            bound,
            self.holds,
            search,
        )
    }
}

/// `λ(A_G)` by the route appropriate for the graph's size: the dense
/// eigensolver up to [`DENSE_SPECTRUM_MAX`] vertices (`true` in the second
/// slot), the rotation-map power iteration above it (`false`). The
/// iteration count is scaled down on very large graphs (fixed work budget,
/// floor [`POWER_ITERS_MIN`]), so the power route is a lower estimate whose
/// resolution degrades gracefully with size.
pub fn lambda_estimate(g: &Multigraph, seed: u64) -> (f64, bool) {
    if g.n() <= DENSE_SPECTRUM_MAX {
        (spectrum(&g.normalized_adjacency()).lambda_abs, true)
    } else {
        let ports = (g.n() * g.degree()).max(1);
        let iters = (POWER_ITER_BUDGET / ports).clamp(POWER_ITERS_MIN, POWER_ITERS);
        let mut rng = SplitMix64::new(seed);
        (lambda_abs_power(g, iters, &mut rng), false)
    }
}

/// Deterministic per-level seed for the power-iteration fallback.
fn level_seed(level: usize) -> u64 {
    0x1E5E1C0DE ^ ((level as u64) << 32)
}

/// Optional kernel tracking for [`super_iterate`]: on every level with at
/// most `size_cap` vertices, run the `γ₊` coordinate-ascent search under
/// each kernel and attach the lower bounds to the level report.
#[derive(Debug, Clone)]
pub struct KernelTracking<'a> {
    pub kernels: &'a [KernelSpace],
    pub restarts: usize,
    pub seed: u64,
    pub size_cap: usize,
}

fn tracked_bounds(
    g: &Multigraph,
    level: usize,
    tracking: Option<&KernelTracking>,
) -> Result<Vec<(String, ExtReal)>> {
    let Some(t) = tracking else {
        return Ok(Vec::new());
    };
    if g.n() > t.size_cap {
        return Ok(Vec::new());
    }
    let a = g.normalized_adjacency();
    let mut out = Vec::with_capacity(t.kernels.len());
    for (i, kernel) in t.kernels.iter().enumerate() {
        let seed = t.seed ^ ((level as u64) << 20) ^ (i as u64);
        let est = gamma_plus_search(&a, kernel, t.restarts, seed)?;
        out.push((kernel.label().to_string(), est.value));
    }
    Ok(out)
}

// =========================================================================
// Base search for the classical iteration
// =========================================================================

/// The largest `λ(H)` for which the classical recursion is self-sustaining
/// at power `t₀`: `1 − (2 − 2^{1−t₀})^{−1/2}`. A base below this threshold
/// keeps every level's `λ` at most 1/2.
pub fn classical_threshold(t0: usize) -> f64 {
    assert!(t0 >= 1, "threshold needs t₀ ≥ 1");
    1.0 - (2.0 - 2f64.powi(1 - t0 as i32)).powf(-0.5)
}

/// One scanned base candidate for the classical iteration.
#[derive(Debug, Clone)]
pub struct BaseCandidate {
    /// How the graph was generated.
    pub label: String,
    pub graph: Multigraph,
    pub n0: usize,
    pub d0: usize,
    pub lambda: f64,
    pub meets_threshold: bool,
}

/// Scans small graphs satisfying the classical size constraint
/// `n₀ = d₀^{2t₀}` for bases meeting [`classical_threshold`]: for each
/// feasible degree `d₀` with `n₀ ≤ max_vertices`, the deterministic shapes
/// (one looped point, the cycle, the self-looped cycle when 3-regular)
/// plus `draws` random connected `d₀`-regular samples wherever the port
/// count allows pairing. Results are sorted by `λ` ascending.
pub fn classical_base_search(
    t0: usize,
    max_vertices: usize,
    draws: usize,
    seed: u64,
) -> Result<Vec<BaseCandidate>> {
    if t0 == 0 {
        return Err(Error::InvalidInput("base search needs t₀ ≥ 1".into()));
    }
    let threshold = classical_threshold(t0);
    let mut rng = SplitMix64::new(seed);
    let mut out: Vec<BaseCandidate> = Vec::new();
    let push = |label: String, graph: Multigraph, out: &mut Vec<BaseCandidate>| {
        let (lambda, _) = lambda_estimate(&graph, 0x5EA2C4);
        out.push(BaseCandidate {
            label,
            n0: graph.n(),
            d0: graph.degree(),
            lambda,
            meets_threshold: lambda <= threshold,
            graph,
        });
    };
    for d0 in 1usize.. {
        let n0 = match (d0 as u128).checked_pow(2 * t0 as u32) {
            Some(v) if v <= max_vertices as u128 => v as usize,
            _ => break,
        };
        match d0 {
            1 => push("point_loops:1".into(), multigraph::point_with_loops(1), &mut out),
            2 => push(format!("cycle:{n0}"), multigraph::cycle(n0), &mut out),
            3 => push(format!("cycle_loops:{n0}"), cycle_with_loops(n0)?, &mut out),
            _ => {}
        }
        if d0 >= 2 && (n0 * d0) % 2 == 0 {
            for i in 0..draws {
                let g = Multigraph::random_regular_connected(n0, d0, &mut rng, 200)?;
                push(format!("random:{n0}:{d0} draw {i}"), g, &mut out);
            }
        }
    }
    out.sort_by(|a, b| {
        a.lambda
            .partial_cmp(&b.lambda)
            .unwrap()
            .then_with(|| a.label.cmp(&b.label))
    });
    Ok(out)
}

// =========================================================================
// Classical power/zigzag iteration
// =========================================================================

fn check_final_size(n0: usize, depth: usize) -> Result<()> {
    match (n0 as u128).checked_pow(depth as u32) {
        Some(v) if v <= VERTEX_CAP as u128 => Ok(()),
        _ => Err(Error::PlanInfeasible(format!(
            "depth {depth} over a {n0}-vertex base exceeds the {VERTEX_CAP}-vertex cap"
        ))),
    }
}

/// Runs `G₁ = H²`, `G_{i+1} = G_i^{t₀} Ⓩ H` for `depth` levels.
///
/// The base must satisfy `n₀ = d₀^{2t₀}` (else the power's degree would
/// not match the cloud size); every level is then `d₀²`-regular on `n₀^i`
/// vertices — both asserted — and is checked against the unconditional
/// recursion `λ(G_{i+1}) ≤ 1 − (1−λ(G_i)^{t₀})(1−λ(H))²` (level 1 against
/// the exact identity `λ(G₁) = λ(H)²`).
///
/// Returns `(graph, report)` per level, the base at index 0.
pub fn rvw_iterate(plan: &ConstructionPlan) -> Result<Vec<(Multigraph, LevelReport)>> {
    if plan.mode != PlanMode::ClassicalPower {
        return Err(Error::InvalidInput(format!(
            "rvw_iterate needs a classical_power plan, got mode {}",
            plan.mode
        )));
    }
    let h = plan.base.build()?;
    let (n0, d0, t0) = (h.n(), h.degree(), plan.t0);
    if (d0 as u128).checked_pow(2 * t0 as u32) != Some(n0 as u128) {
        return Err(Error::PlanInfeasible(format!(
            "classical iteration needs n₀ = d₀^(2t₀); base has n₀ = {n0}, d₀ = {d0}, t₀ = {t0}"
        )));
    }
    check_final_size(n0, plan.depth)?;

    let (lambda_h, dense_h) = lambda_estimate(&h, level_seed(0));
    let mut out = Vec::with_capacity(plan.depth + 1);
    out.push((
        h.clone(),
        LevelReport {
            level: 0,
            vertices: n0,
            degree: d0,
            lambda: lambda_h,
            dense: dense_h,
            gamma_plus: gap_to_gamma(lambda_h),
            bound: LevelBound::Base,
            holds: true,
            search_bounds: Vec::new(),
        },
    ));
    if plan.depth == 0 {
        return Ok(out);
    }

    let mut g = power(&h, 2)?;
    let mut lambda_prev = lambda_h;
    for level in 1..=plan.depth {
        let bound = if level == 1 {
            lambda_h * lambda_h
        } else {
            1.0 - (1.0 - lambda_prev.powi(t0 as i32)) * (1.0 - lambda_h).powi(2)
        };
        assert_eq!(
            g.n() as u128,
            (n0 as u128).pow(level as u32),
            "classical level {level} vertex count drifted"
        );
        assert_eq!(g.degree(), d0 * d0, "classical level {level} degree drifted");
        let (lambda, dense) = lambda_estimate(&g, level_seed(level));
        let report = LevelReport {
            level,
            vertices: g.n(),
            degree: g.degree(),
            lambda,
            dense,
            gamma_plus: gap_to_gamma(lambda),
            bound: LevelBound::Lambda(bound),
            holds: lambda <= bound + LAMBDA_TOL,
            search_bounds: Vec::new(),
        };
        lambda_prev = lambda;
        if level < plan.depth {
            let next = zigzag(&power(&g, t0)?, &h)?;
            out.push((g, report));
            g = next;
        } else {
            out.push((g, report));
            break;
        }
    }
    Ok(out)
}

// =========================================================================
// Cesàro super-iteration
// =========================================================================

/// Runs `F₁ = 𝒞_{d₀²}(F₀)`, `F_{j+1} = (𝒞_{n₀}(𝒜_{t₀}(F_j))) Ⓩ F₀` for
/// `depth` levels.
///
/// Feasibility requires the Cesàro degree to fit the completion target:
/// `t₀·d₀^{2(t₀−1)} ≤ n₀`. Every level is `d₀²`-regular on `n₀^j`
/// vertices (asserted); level 1 is checked against the edge-completion
/// doubling `γ₊(F₁) ≤ 2·γ₊(F₀)` and each later level against the chain
/// `γ₊(F_{j+1}) ≤ 2·γ₊(𝒜_{t₀}(F_j))·γ₊(F₀)²`, where the averaged graph's
/// `γ₊` is computed on the intermediate actually used to build the level.
/// All `γ₊` here are the spectral (Euclidean) constants; `tracking`
/// attaches searched kernel lower bounds to the reports.
pub fn super_iterate(
    plan: &ConstructionPlan,
    tracking: Option<&KernelTracking>,
) -> Result<Vec<(Multigraph, LevelReport)>> {
    if plan.mode != PlanMode::Cesaro {
        return Err(Error::InvalidInput(format!(
            "super_iterate needs a cesaro plan, got mode {}",
            plan.mode
        )));
    }
    let f0 = plan.base.build()?;
    let (n0, d0, t0) = (f0.n(), f0.degree(), plan.t0);
    let cesaro_degree = (t0 as u128) * (d0 as u128 * d0 as u128).pow(t0 as u32 - 1);
    if cesaro_degree > n0 as u128 {
        return Err(Error::PlanInfeasible(format!(
            "cesaro iteration needs t₀·d₀^(2(t₀−1)) ≤ n₀; got {cesaro_degree} > {n0}"
        )));
    }
    check_final_size(n0, plan.depth)?;

    let (lambda0, dense0) = lambda_estimate(&f0, level_seed(0));
    let gamma0 = gap_to_gamma(lambda0);
    let mut out = Vec::with_capacity(plan.depth + 1);
    out.push((
        f0.clone(),
        LevelReport {
            level: 0,
            vertices: n0,
            degree: d0,
            lambda: lambda0,
            dense: dense0,
            gamma_plus: gamma0,
            bound: LevelBound::Base,
            holds: true,
            search_bounds: tracked_bounds(&f0, 0, tracking)?,
        },
    ));
    if plan.depth == 0 {
        return Ok(out);
    }

    // Level 1: edge completion to degree d₀², bounded by the doubling rule.
    let mut g = edge_complete(&f0, d0 * d0)?;
    assert_eq!(g.n(), n0, "edge completion must preserve the vertex count");
    assert_eq!(g.degree(), d0 * d0);
    {
        let bound = gamma0.scale(2.0);
        let (lambda, dense) = lambda_estimate(&g, level_seed(1));
        let gamma_plus = gap_to_gamma(lambda);
        out.push((
            g.clone(),
            LevelReport {
                level: 1,
                vertices: g.n(),
                degree: g.degree(),
                lambda,
                dense,
                gamma_plus,
                bound: LevelBound::GammaPlus(bound),
                holds: gamma_le(gamma_plus, bound),
                search_bounds: tracked_bounds(&g, 1, tracking)?,
            },
        ));
    }

    // Levels ≥ 2: average, complete to the cloud size, zigzag; the chain
    // bound uses the averaged intermediate actually built here.
    for level in 2..=plan.depth {
        let averaged = cesaro(&g, t0)?;
        let (lambda_avg, _) = lambda_estimate(&averaged, level_seed(level) ^ 0xAE5A);
        let bound = gap_to_gamma(lambda_avg).scale(2.0).mul(gamma0.mul(gamma0));
        let next = zigzag(&edge_complete(&averaged, n0)?, &f0)?;
        assert_eq!(
            next.n() as u128,
            (n0 as u128).pow(level as u32),
            "cesaro level {level} vertex count drifted"
        );
        assert_eq!(next.degree(), d0 * d0, "cesaro level {level} degree drifted");
        let (lambda, dense) = lambda_estimate(&next, level_seed(level));
        let gamma_plus = gap_to_gamma(lambda);
        out.push((
            next.clone(),
            LevelReport {
                level,
                vertices: next.n(),
                degree: next.degree(),
                lambda,
                dense,
                gamma_plus,
                bound: LevelBound::GammaPlus(bound),
                holds: gamma_le(gamma_plus, bound),
                search_bounds: tracked_bounds(&next, level, tracking)?,
            },
        ));
        g = next;
    }
    Ok(out)
}

// =========================================================================
// Diagonalization schedule
// =========================================================================

/// Per-`k` constants for [`diagonalize`]: the kernel-class constant `C_k`
/// (≥ 1), the averaging gain exponent `ε_k` (in `(0,1]`), and the family
/// degree `d_k` (≥ 3 — the family's loop-cycle cores are 3-regular).
#[derive(Debug, Clone, Copy)]
pub struct DiagonalEntry {
    pub c: f64,
    pub eps: f64,
    pub degree: usize,
}

/// `m_k = ⌈(2C_k³)^{1/ε_k}⌉` — the averaging depth that turns the
/// family-`k` constant into a strict contraction.
pub fn averaging_depth(entry: &DiagonalEntry) -> usize {
    (2.0 * entry.c.powi(3)).powf(1.0 / entry.eps).ceil() as usize
}

/// Largest family index: members are loop-cycles on `3·2^j` vertices.
const FAMILY_J_MAX: usize = 17;

/// Vertex count `n_j` of the `j`-th family member.
pub fn family_size(j: usize) -> usize {
    3 << j
}

/// The desk-scale stand-in family: member `j` of family `k` is the
/// loop-cycle `C°` on `3·2^j` vertices edge-completed to degree `d_k`, so
/// sizes are strictly increasing in `j` and every member is `d_k`-regular.
/// Loop-cycles rather than plain cycles: zigzag against a bipartite cloud
/// disconnects (the rotation map of an evenly edge-completed graph
/// preserves port-index parity), while the loop port breaks every
/// two-coloring, so products against these clouds stay connected.
pub fn family_member(entry: &DiagonalEntry, j: usize) -> Result<Multigraph> {
    if j > FAMILY_J_MAX {
        return Err(Error::PlanInfeasible(format!(
            "family index {j} exceeds the supported range (≤ {FAMILY_J_MAX})"
        )));
    }
    edge_complete(&cycle_with_loops(family_size(j))?, entry.degree)
}

/// Smallest `j` with `n_j > threshold`.
fn minimal_j(threshold: u128) -> Result<usize> {
    (0..=FAMILY_J_MAX)
        .find(|&j| family_size(j) as u128 > threshold)
        .ok_or_else(|| {
            Error::PlanInfeasible(format!(
                "family exhausted: no member exceeds the threshold {threshold}"
            ))
        })
}

/// The start-rule threshold contribution `m_k·d_k^{2m_k}` of one entry.
fn start_label(entry: &DiagonalEntry) -> Result<u128> {
    let m = averaging_depth(entry);
    (entry.degree as u128)
        .checked_pow(2 * m as u32)
        .and_then(|p| p.checked_mul(m as u128))
        .ok_or_else(|| {
            Error::PlanInfeasible("diagonalization threshold m·d^(2m) overflows".into())
        })
}

/// One step of the diagonalization audit trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalStep {
    /// Step index `i ≥ 1`.
    pub i: usize,
    /// The chosen family index `h_i` (strictly decreasing in `i`).
    pub h: usize,
    /// Averaging depth `m_{h_i}` applied at this step.
    pub m: usize,
    /// Edge-completion target = cloud size `n_{j(h_i)}`.
    pub completion: usize,
    /// Vertices and degree after the step.
    pub vertices: usize,
    pub degree: usize,
}

/// Full audit of one diagonalized graph `H_k`.
#[derive(Debug, Clone)]
pub struct DiagonalReport {
    pub k: usize,
    /// Chosen start index `j(k)` and the start graph's size.
    pub j_k: usize,
    pub start_vertices: usize,
    pub steps: Vec<DiagonalStep>,
    /// Final degree — identical across all `k` by construction.
    pub final_degree: usize,
    pub lambda: f64,
    pub gamma_plus: ExtReal,
}

/// Runs the degree-unification schedule for `k = 1..=kmax`.
///
/// `table[k−1]` holds the constants of family `k`; one look-ahead entry
/// (`k = kmax+1`) must be present because the start rule for family `k`
/// inspects family `k+1`. The schedule, per `k`:
///
/// * start at `L_k`, the first family-`k` member larger than
///   `max{k, m_{k+1}·d_{k+1}^{2m_{k+1}}}`;
/// * repeatedly pick `h_i` = the smallest family index whose start graph
///   exceeds the running threshold (`d_k` for the first step, then
///   `m_h²·d_h^{2m_h}` of the previous step's `h`), and set
///   `L_{k,i} = 𝒜_{m_{h_i}}(𝒞_{n_{j(h_i)}}(L_{k,i−1}) Ⓩ L_{h_i})`;
/// * the `h_i` must strictly decrease (`k = 1` degenerates to a single
///   self-step, the one exception); stop after the step with `h = 1`.
///
/// Every index decision is recorded in the audit trail; the final degree
/// is a constant independent of `k` and is asserted to match across runs.
pub fn diagonalize(
    table: &[DiagonalEntry],
    kmax: usize,
) -> Result<Vec<(Multigraph, DiagonalReport)>> {
    if kmax == 0 || kmax > 3 {
        return Err(Error::InvalidInput(format!(
            "diagonalization is desk-scale: kmax must be in 1..=3, got {kmax}"
        )));
    }
    if table.len() < kmax + 1 {
        return Err(Error::InvalidInput(format!(
            "need {} table entries (k = 1..={} plus one look-ahead), got {}",
            kmax + 1,
            kmax,
            table.len()
        )));
    }
    for (idx, e) in table.iter().enumerate() {
        if !(e.c >= 1.0 && e.c.is_finite() && e.eps > 0.0 && e.eps <= 1.0 && e.degree >= 3) {
            return Err(Error::InvalidInput(format!(
                "table entry {}: need C ≥ 1, ε ∈ (0,1], degree ≥ 3 (the family core is 3-regular)",
                idx + 1
            )));
        }
    }
    let entry = |k: usize| &table[k - 1];
    let j_of = |k: usize| -> Result<usize> {
        minimal_j((k as u128).max(start_label(entry(k + 1))?))
    };

    let mut out: Vec<(Multigraph, DiagonalReport)> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let j_k = j_of(k)?;
        let mut current = family_member(entry(k), j_k)?;
        let start_vertices = current.n();
        let mut steps: Vec<DiagonalStep> = Vec::new();
        let mut h_prev = k;
        let mut threshold = entry(k).degree as u128;
        loop {
            let mut chosen = None;
            for h in 1..=kmax {
                if family_size(j_of(h)?) as u128 > threshold {
                    chosen = Some(h);
                    break;
                }
            }
            let h = chosen.ok_or_else(|| {
                Error::PlanInfeasible(format!(
                    "no family's start graph exceeds the step threshold {threshold} (k = {k})"
                ))
            })?;
            let degenerate_self_step = k == 1 && steps.is_empty() && h == 1;
            if h >= h_prev && !degenerate_self_step {
                return Err(Error::PlanInfeasible(format!(
                    "h must strictly decrease: step {} for k = {k} chose h = {h} after {h_prev}",
                    steps.len() + 1
                )));
            }
            let j_h = j_of(h)?;
            let cloud = family_member(entry(h), j_h)?;
            let completion = family_size(j_h);
            let vertices_after = (current.n() as u128) * (completion as u128);
            if vertices_after > VERTEX_CAP as u128 {
                return Err(Error::PlanInfeasible(format!(
                    "step {} for k = {k} would exceed the {VERTEX_CAP}-vertex cap",
                    steps.len() + 1
                )));
            }
            let m = averaging_depth(entry(h));
            // Degree after the step: zigzag gives d_h², averaging m-fold
            // gives m·(d_h²)^{m−1}; guard the port table in advance.
            let degree_after = (entry(h).degree as u128)
                .checked_pow(2 * (m as u32 - 1))
                .and_then(|p| p.checked_mul(m as u128));
            match degree_after.and_then(|d| d.checked_mul(vertices_after)) {
                Some(ports) if ports <= DEFAULT_PORT_CAP as u128 => {}
                _ => {
                    return Err(Error::PlanInfeasible(format!(
                        "step {} for k = {k} would exceed the {DEFAULT_PORT_CAP}-port cap",
                        steps.len() + 1
                    )));
                }
            }
            current = cesaro(&zigzag(&edge_complete(&current, completion)?, &cloud)?, m)?;
            steps.push(DiagonalStep {
                i: steps.len() + 1,
                h,
                m,
                completion,
                vertices: current.n(),
                degree: current.degree(),
            });
            if h == 1 {
                break;
            }
            h_prev = h;
            // Next step's rule: exceed m_h²·d_h^{2m_h} of this step's h.
            threshold = start_label(entry(h))?
                .checked_mul(averaging_depth(entry(h)) as u128)
                .ok_or_else(|| {
                    Error::PlanInfeasible("diagonalization threshold m²·d^(2m) overflows".into())
                })?;
        }
        let (lambda, _) = lambda_estimate(&current, 0xD1A60 ^ ((k as u64) << 8));
        let report = DiagonalReport {
            k,
            j_k,
            start_vertices,
            steps,
            final_degree: current.degree(),
            lambda,
            gamma_plus: gap_to_gamma(lambda),
        };
        out.push((current, report));
    }
    let d_final = out[0].1.final_degree;
    assert!(
        out.iter().all(|(_, r)| r.final_degree == d_final),
        "the last step always zigzags against family 1, so the final degree cannot depend on k"
    );
    Ok(out)
}

// =========================================================================
// Degree-9 finisher
// =========================================================================

/// Certificate for the degree-9 finisher.
#[derive(Debug, Clone)]
pub struct FinisherReport {
    /// Input degree `d` (= cycle length of the cloud).
    pub input_degree: usize,
    /// Spectral `γ₊` of the input.
    pub input_gamma_plus: ExtReal,
    /// Spectral `γ₊` of the self-looped cycle cloud `C_d°`.
    pub cycle_gamma_plus: ExtReal,
    /// The universal bound `4d²` on the cloud's `γ₊`.
    pub cycle_bound: f64,
    /// Whether the cloud respected `4d²`.
    pub cycle_holds: bool,
    /// Spectral `γ₊` of the 9-regular output.
    pub output_gamma_plus: ExtReal,
    /// The chained bound `16d⁴·γ₊(input)`.
    pub chained_bound: ExtReal,
    /// Whether the output respected the chained bound.
    pub holds: bool,
}

/// Zigzags `H` with the self-looped cycle on `deg(H)` vertices, producing
/// a 9-regular graph on `n·d` vertices with
/// `γ₊(out) ≤ γ₊(H)·γ₊(C_d°)² ≤ 16d⁴·γ₊(H)`, checked spectrally.
pub fn finish_degree9(h: &Multigraph) -> Result<(Multigraph, FinisherReport)> {
    let d = h.degree();
    let cloud = cycle_with_loops(d)?;
    let out = zigzag(h, &cloud)?;
    assert_eq!(out.degree(), 9, "a 3-regular cloud must yield degree 9");
    assert_eq!(out.n(), h.n() * d, "zigzag vertex count must be n·d");

    let (lambda_h, _) = lambda_estimate(h, 0xF1417);
    let input_gamma_plus = gap_to_gamma(lambda_h);
    let (lambda_c, _) = lambda_estimate(&cloud, 0xF1418);
    let cycle_gamma_plus = gap_to_gamma(lambda_c);
    let (lambda_out, _) = lambda_estimate(&out, 0xF1419);
    let output_gamma_plus = gap_to_gamma(lambda_out);
    let cycle_bound = 4.0 * (d as f64).powi(2);
    let chained_bound = input_gamma_plus.scale(16.0 * (d as f64).powi(4));
    let report = FinisherReport {
        input_degree: d,
        input_gamma_plus,
        cycle_gamma_plus,
        cycle_bound,
        cycle_holds: gamma_le(cycle_gamma_plus, ExtReal::finite(cycle_bound)),
        output_gamma_plus,
        chained_bound,
        holds: gamma_le(output_gamma_plus, chained_bound),
    };
    Ok((out, report))
}

/// The 3-regular variant: the degree-9 finisher followed by a replacement
/// product with the 9-cycle. Only the structural guarantee (3-regularity,
/// 9× vertex count) is asserted; no spectral chain is claimed.
pub fn finish_degree3(h: &Multigraph) -> Result<Multigraph> {
    let (nine, _) = finish_degree9(h)?;
    let out = replacement(&nine, &multigraph::cycle(9))?;
    assert_eq!(out.degree(), 3, "replacement with a cycle must yield degree 3");
    assert_eq!(out.n(), nine.n() * 9);
    Ok(out)
}

// =========================================================================
// Plan runner
// =========================================================================

/// A full pipeline run: the levels and, when requested, the finisher.
#[derive(Debug, Clone)]
pub struct ConstructionRun {
    pub levels: Vec<(Multigraph, LevelReport)>,
    pub finisher: Option<(Multigraph, FinisherReport)>,
}

/// Dispatches a plan to [`rvw_iterate`] or [`super_iterate`] and applies
/// [`finish_degree9`] to the last level when the plan asks for it.
pub fn run_plan(
    plan: &ConstructionPlan,
    tracking: Option<&KernelTracking>,
) -> Result<ConstructionRun> {
    let levels = match plan.mode {
        PlanMode::ClassicalPower => rvw_iterate(plan)?,
        PlanMode::Cesaro => super_iterate(plan, tracking)?,
    };
    let finisher = if plan.finish {
        let last = &levels.last().expect("at least the base level").0;
        Some(finish_degree9(last)?)
    } else {
        None
    };
    Ok(ConstructionRun { levels, finisher })
}
