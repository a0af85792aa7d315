//! Classical (Euclidean) spectral gaps.
//!
//! For a symmetric doubly stochastic matrix `A` with eigenvalues
//! `1 = λ₁ ≥ λ₂ ≥ … ≥ λ_n ≥ −1`, this module computes
//!
//! * `λ₂(A)` — the second eigenvalue,
//! * `λ(A) = max_{2≤i≤n} |λ_i|` — the absolute spectral bound,
//! * `γ(A) = 1/(1−λ₂)` and `γ₊(A) = 1/(1−λ(A))` — the Euclidean Poincaré
//!   constants (extended reals; ∞ exactly when the gap closes),
//!
//! via a dense symmetric eigensolver implemented in-repo: Householder
//! tridiagonalization followed by the implicit-shift QL iteration (the
//! classical EISPACK `tred2`/`tql2` pair). Full spectra are cheap at desk
//! scale and make every product identity directly testable. For graphs too
//! large to densify there is a rotation-map power iteration
//! ([`lambda_abs_power`]) that estimates `λ(A)` without materializing `A`.

use crate::extreal::ExtReal;
use crate::matrix::{FloatMatrix, StochasticMatrix};
use crate::multigraph::Multigraph;
use crate::rng::SplitMix64;

/// Eigenvalues snap to ±1 when within this distance; the gap quantities are
/// then exactly infinite rather than astronomically large floats.
const SNAP_EPS: f64 = 1e-11;

/// Residual bound `‖Av − λv‖∞` asserted (debug) after eigensolving.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Frozen band for [`euclidean_decay_check`]: the ratio
/// `γ₊(A^t) / max{1, γ₊(A)/t}` over a seeded sweep of random regular graphs
/// (n ≤ 128, t ≤ 64, seed 0xDECA11, 4000 instances; see
/// `dev_decay_band_sweep`) stayed inside [1.000000, 1.552894]; the frozen
/// band widens both ends by 10%. Consistent with the closed form: the ratio
/// is always ≥ 1 and approaches 1/(1−1/e) ≈ 1.582 from below.
pub const DECAY_BAND: (f64, f64) = (0.9091, 1.7082);

// =========================================================================
// Dense symmetric eigensolver
// =========================================================================

/// Eigendecomposition of a symmetric matrix: `values[k]` ascending, with
/// orthonormal eigenvector `k` in column `k` of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: FloatMatrix,
}

/// Full eigendecomposition of a dense symmetric matrix.
///
/// Householder tridiagonalization (`tred2`) then implicit-shift QL
/// (`tql2`), both accumulating the orthogonal transformations so the
/// eigenvectors come out orthonormal.
pub fn symmetric_eigen(m: &FloatMatrix) -> Eigen {
    let n = m.n();
    let mut v = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);
    Eigen {
        values: d,
        vectors: v,
    }
}

/// Householder reduction to symmetric tridiagonal form, accumulating the
/// transformation in `v`. On exit `d` holds the diagonal and `e[1..]` the
/// subdiagonal.
fn tred2(v: &mut FloatMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = v.n();
    for j in 0..n {
        d[j] = v.get(n - 1, j);
    }

    for i in (1..n).rev() {
        // Scale to avoid under/overflow.
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            // Generate the Householder vector.
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            // Apply the similarity transformation to the remaining columns.
            for j in 0..i {
                f = d[j];
                v.set(j, i, f);
                g = e[j] + v.get(j, j) * f;
                for k in (j + 1)..i {
                    g += v.get(k, j) * d[k];
                    e[k] += v.get(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let val = v.get(k, j) - (f * e[k] + g * d[k]);
                    v.set(k, j, val);
                }
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n.saturating_sub(1) {
        v.set(n - 1, i, v.get(i, i));
        v.set(i, i, 1.0);
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.get(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.get(k, i + 1) * v.get(k, j);
                }
                for k in 0..=i {
                    let val = v.get(k, j) - g * d[k];
                    v.set(k, j, val);
                }
            }
        }
        for k in 0..=i {
            v.set(k, i + 1, 0.0);
        }
    }
    for j in 0..n {
        d[j] = v.get(n - 1, j);
        v.set(n - 1, j, 0.0);
    }
    v.set(n - 1, n - 1, 1.0);
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix,
/// accumulating eigenvectors into `v`. Eigenvalues exit in `d`, ascending.
fn tql2(v: &mut FloatMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = v.n();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = 2.0f64.powi(-52);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            loop {
                // Compute the implicit shift.
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // Implicit QL transformation.
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    // Accumulate the rotation into the eigenvector columns.
                    for k in 0..n {
                        h = v.get(k, i + 1);
                        v.set(k, i + 1, s * v.get(k, i) + c * h);
                        v.set(k, i, c * v.get(k, i) - s * h);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort eigenvalues ascending, carrying the eigenvectors along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d.swap(k, i);
            for r in 0..n {
                let tmp = v.get(r, i);
                v.set(r, i, v.get(r, k));
                v.set(r, k, tmp);
            }
        }
    }
}

// =========================================================================
// Gap quantities
// =========================================================================

/// Spectrum of a normalized adjacency matrix plus derived gap quantities.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Eigenvalues sorted descending; `eigenvalues[0]` is exactly 1.
    pub eigenvalues: Vec<f64>,
    /// λ₂(A): second eigenvalue (0 by convention for 1×1 matrices).
    pub lambda2: f64,
    /// λ(A) = max_{2≤i≤n} |λ_i| (0 by convention for 1×1 matrices).
    pub lambda_abs: f64,
    /// γ = 1/(1−λ₂).
    pub gamma: ExtReal,
    /// γ₊ = 1/(1−λ).
    pub gamma_plus: ExtReal,
}

impl SpectralReport {
    /// Derives the report from an eigenvalue list (any order, unclamped).
    pub fn from_eigenvalues(mut eigs: Vec<f64>) -> SpectralReport {
        assert!(!eigs.is_empty());
        // Clamp into [−1,1] and snap the endpoints so that exact gap
        // degeneracies (disconnected/bipartite graphs) report exactly ±1.
        for x in eigs.iter_mut() {
            if (*x - 1.0).abs() <= SNAP_EPS {
                *x = 1.0;
            }
            if (*x + 1.0).abs() <= SNAP_EPS {
                *x = -1.0;
            }
            *x = x.clamp(-1.0, 1.0);
        }
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eigs[0] = 1.0;
        let lambda2 = if eigs.len() > 1 { eigs[1] } else { 0.0 };
        let lambda_abs = eigs[1..]
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        let gamma = gap_to_gamma(lambda2);
        let gamma_plus = gap_to_gamma(lambda_abs);
        SpectralReport {
            eigenvalues: eigs,
            lambda2,
            lambda_abs,
            gamma,
            gamma_plus,
        }
    }

    /// CSV row `graph id, n, d, λ₂, λ, γ, γ₊` (header in [`csv_header`]).
    pub fn csv_row(&self, graph_id: &str, n: usize, d: usize) -> String {
        format!(
            "{graph_id},{n},{d},{:.12},{:.12},{},{}",
            self.lambda2, self.lambda_abs, self.gamma, self.gamma_plus
        )
    }
}

/// Header matching [`SpectralReport::csv_row`].
pub fn csv_header() -> &'static str {
    "graph,n,degree,lambda2,lambda_abs,gamma,gamma_plus"
}

/// `1/(1−λ)` as an extended real (∞ exactly at λ = 1).
pub fn gap_to_gamma(lambda: f64) -> ExtReal {
    if lambda >= 1.0 {
        ExtReal::Infinite
    } else {
        ExtReal::finite(1.0 / (1.0 - lambda))
    }
}

/// Full spectral report of an exact stochastic matrix.
pub fn spectrum(a: &StochasticMatrix) -> SpectralReport {
    spectrum_float(&a.to_float())
}

/// Spectral report from an already-densified symmetric stochastic matrix.
pub fn spectrum_float(m: &FloatMatrix) -> SpectralReport {
    let eig = symmetric_eigen(m);
    debug_assert!(max_residual(m, &eig) < RESIDUAL_TOL, "eigen residual too large");
    SpectralReport::from_eigenvalues(eig.values)
}

/// `max_k ‖A v_k − λ_k v_k‖∞` over all eigenpairs.
pub fn max_residual(m: &FloatMatrix, eig: &Eigen) -> f64 {
    let n = m.n();
    let mut worst = 0.0f64;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for k in 0..n {
        for i in 0..n {
            x[i] = eig.vectors.get(i, k);
        }
        m.matvec(&x, &mut y);
        for i in 0..n {
            worst = worst.max((y[i] - eig.values[k] * x[i]).abs());
        }
    }
    worst
}

// =========================================================================
// Decay of γ₊ under graph powers
// =========================================================================

/// Outcome of [`euclidean_decay_check`].
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub gamma_plus_t: ExtReal,
    /// `max{1, γ₊(A)/t}` — what powering is expected to achieve.
    pub reference: f64,
    pub ratio: f64,
    /// Whether the ratio lies in the frozen [`DECAY_BAND`].
    pub in_band: bool,
}

/// Checks how `γ₊` decays under matrix powers: computes `γ₊(A^t)` and the
/// reference `max{1, γ₊(A)/t}`, and tests their ratio against the frozen
/// universal band. Requires `γ₊(A)` finite.
pub fn euclidean_decay_check(a: &StochasticMatrix, t: usize) -> DecayReport {
    assert!(t >= 1);
    let base = spectrum(a);
    let gp = match base.gamma_plus {
        ExtReal::Finite(g) => g,
        ExtReal::Infinite => panic!("euclidean_decay_check requires γ₊(A) finite"),
    };
    // λ(A^t) = λ(A)^t, so γ₊(A^t) comes straight from the base spectrum.
    let lam_t = base.lambda_abs.powi(t as i32);
    let gamma_plus_t = gap_to_gamma(lam_t);
    let reference = (gp / t as f64).max(1.0);
    let ratio = gamma_plus_t.as_f64() / reference;
    DecayReport {
        gamma_plus_t,
        reference,
        ratio,
        in_band: (DECAY_BAND.0..=DECAY_BAND.1).contains(&ratio),
    }
}

// =========================================================================
// Rotation-map power iteration (large graphs)
// =========================================================================

/// `y = A_G x` evaluated through the rotation map (no dense matrix).
pub fn adjacency_matvec(g: &Multigraph, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), g.n());
    debug_assert_eq!(y.len(), g.n());
    let d = g.degree();
    for v in 0..g.n() {
        let mut acc = 0.0;
        for p in 0..d {
            let (u, _) = g.rot(v, p);
            acc += x[u];
        }
        y[v] = acc / d as f64;
    }
}

/// Estimates `λ(A_G)` by power iteration on `A²` restricted to the
/// complement of the constant vector. A lower-bound style estimate that
/// converges to `λ(A)` geometrically; adequate for graphs too large for
/// the dense solver.
pub fn lambda_abs_power(g: &Multigraph, iters: usize, rng: &mut SplitMix64) -> f64 {
    let n = g.n();
    if n == 1 {
        return 0.0;
    }
    let mut x: Vec<f64> = (0..n).map(|_| rng.f64() - 0.5).collect();
    let mut y = vec![0.0; n];
    let mut lambda_sq = 0.0f64;
    for _ in 0..iters {
        remove_mean(&mut x);
        normalize(&mut x);
        adjacency_matvec(g, &x, &mut y);
        adjacency_matvec(g, &y, &mut x);
        remove_mean(&mut x);
        // Rayleigh quotient of A² at the (pre-normalized) iterate.
        lambda_sq = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    lambda_sq.sqrt().min(1.0)
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::{complete, cycle, Multigraph};

    fn random_graph(n: usize, d: usize, rng: &mut SplitMix64) -> Multigraph {
        Multigraph::random_regular(n, d, rng).unwrap()
    }

    #[test]
    fn triangle_spectrum_closed_form() {
        // (1/2)(J−I): eigenvalues {1, −1/2, −1/2}.
        let rep = spectrum(&cycle(3).normalized_adjacency());
        assert!((rep.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((rep.eigenvalues[1] + 0.5).abs() < 1e-10);
        assert!((rep.eigenvalues[2] + 0.5).abs() < 1e-10);
        assert!((rep.lambda_abs - 0.5).abs() < 1e-10);
        assert_eq!(rep.gamma_plus, ExtReal::finite(1.0 / (1.0 - 0.5)));
    }

    #[test]
    fn double_edge_is_bipartite() {
        let g = crate::multigraph::Multigraph::from_edge_list(2, &[(0, 1), (0, 1)], &[]).unwrap();
        let rep = spectrum(&g.normalized_adjacency());
        assert_eq!(rep.lambda_abs, 1.0);
        assert!(rep.gamma_plus.is_infinite());
    }

    #[test]
    fn cycle_eigenvalues_match_cosines() {
        // C_n eigenvalues are cos(2πk/n).
        let n = 12;
        let rep = spectrum(&cycle(n).normalized_adjacency());
        let mut want: Vec<f64> = (0..n)
            .map(|k| (std::f64::consts::TAU * k as f64 / n as f64).cos())
            .collect();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (have, want) in rep.eigenvalues.iter().zip(&want) {
            assert!((have - want).abs() < 1e-10, "have {have}, want {want}");
        }
    }

    #[test]
    fn complete_graph_gap() {
        // K_6: eigenvalues {1} ∪ {−1/5 with multiplicity 5}; γ₊ = 1/(1−1/5) = 1.25.
        let rep = spectrum(&complete(6).normalized_adjacency());
        assert!((rep.lambda_abs - 0.2).abs() < 1e-10);
        assert!((rep.gamma_plus.as_f64() - 1.25).abs() < 1e-10);
    }

    #[test]
    fn hypercube_graph_spectrum() {
        // Q₃ (3-regular on 8 vertices): eigenvalues (3−2k)/3, k=0..3,
        // with binomial multiplicities 1,3,3,1.
        let edges: Vec<(usize, usize)> = (0..8usize)
            .flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b))))
            .filter(|&(u, v)| u < v)
            .collect();
        let g = crate::multigraph::Multigraph::from_edge_list(8, &edges, &[]).unwrap();
        let rep = spectrum(&g.normalized_adjacency());
        let mut want = vec![1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        want.extend(vec![-1.0 / 3.0; 3]);
        want.push(-1.0);
        for (have, want) in rep.eigenvalues.iter().zip(&want) {
            assert!((have - want).abs() < 1e-10);
        }
    }

    #[test]
    fn residuals_small_on_random_graphs() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..5 {
            let g = random_graph(64, 4, &mut rng);
            let m = g.normalized_adjacency().to_float();
            let eig = symmetric_eigen(&m);
            assert!(max_residual(&m, &eig) < RESIDUAL_TOL);
        }
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let mut rng = SplitMix64::new(7);
        let g = random_graph(32, 3, &mut rng);
        let m = g.normalized_adjacency().to_float();
        let eig = symmetric_eigen(&m);
        let n = m.n();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n)
                    .map(|k| eig.vectors.get(k, i) * eig.vectors.get(k, j))
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn power_iteration_matches_dense() {
        let mut rng = SplitMix64::new(55);
        let g = Multigraph::random_regular_connected(64, 4, &mut rng, 50).unwrap();
        let dense = spectrum(&g.normalized_adjacency()).lambda_abs;
        let mut prng = SplitMix64::new(1);
        let power = lambda_abs_power(&g, 600, &mut prng);
        assert!(
            (dense - power).abs() < 1e-6,
            "dense {dense} vs power {power}"
        );
    }

    #[test]
    fn one_by_one_convention() {
        let rep = spectrum(&StochasticMatrix::identity(1));
        assert_eq!(rep.lambda2, 0.0);
        assert_eq!(rep.lambda_abs, 0.0);
        assert_eq!(rep.gamma_plus, ExtReal::finite(1.0));
    }

    #[test]
    fn rayleigh_ascent_oracle_matches_gamma_plus() {
        // Independent check of γ₊ = 1/(1−λ): maximize the Rayleigh
        // quotient |⟨x, Ax⟩|/⟨x,x⟩ over mean-zero vectors by repeated
        // random-start ascent (power iteration is the ascent).
        let mut rng = SplitMix64::new(4242);
        let g = Multigraph::random_regular_connected(48, 4, &mut rng, 50).unwrap();
        let rep = spectrum(&g.normalized_adjacency());
        let mut best = 0.0f64;
        for seed in 0..5 {
            let mut prng = SplitMix64::new(seed);
            best = best.max(lambda_abs_power(&g, 800, &mut prng));
        }
        let gamma_plus_oracle = 1.0 / (1.0 - best);
        assert!((gamma_plus_oracle - rep.gamma_plus.as_f64()).abs() < 1e-6);
    }

    /// Freeze protocol for [`DECAY_BAND`]: run with `--ignored --nocapture`
    /// to regenerate the empirical ratio range; the committed band is that
    /// range widened by 10% on both ends. Seed fixed below.
    #[test]
    #[ignore]
    fn dev_decay_band_sweep() {
        let mut rng = SplitMix64::new(0xDECA11);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut count = 0;
        while count < 4000 {
            let n = rng.range(4, 129);
            let d = rng.range(2, 9);
            if (n * d) % 2 == 1 {
                continue;
            }
            let Ok(g) = Multigraph::random_regular(n, d, &mut rng) else {
                continue;
            };
            let a = g.normalized_adjacency();
            if spectrum(&a).gamma_plus.is_infinite() {
                continue;
            }
            let t = rng.range(1, 65);
            let decay = euclidean_decay_check(&a, t);
            lo = lo.min(decay.ratio);
            hi = hi.max(decay.ratio);
            count += 1;
        }
        println!("decay ratio range over {count} instances: [{lo:.6}, {hi:.6}]");
        println!("frozen band with 10% margin: [{:.4}, {:.4}]", lo / 1.1, hi * 1.1);
    }

    #[test]
    fn decay_check_identities() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..10 {
            let g = Multigraph::random_regular_connected(24, 4, &mut rng, 50).unwrap();
            let a = g.normalized_adjacency();
            let rep = spectrum(&a);
            if rep.gamma_plus.is_infinite() {
                continue;
            }
            for t in [1usize, 2, 5, 9] {
                // λ(A^t) = λ(A)^t exactly (same eigenvectors).
                let pow_rep = spectrum(&a.pow(t));
                assert!(
                    (pow_rep.lambda_abs - rep.lambda_abs.powi(t as i32)).abs() < 1e-9
                );
                let decay = euclidean_decay_check(&a, t);
                assert!(decay.in_band, "ratio {} outside band", decay.ratio);
            }
        }
    }
}
