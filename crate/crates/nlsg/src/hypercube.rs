//! Fourier analysis on the Hamming cube `𝔽₂ⁿ`.
//!
//! Functions `f : 𝔽₂ⁿ → ℝ^k` expand as `f = Σ_A f̂(A)·W_A` over the Walsh
//! characters `W_A(x) = (−1)^{|A∩x|}` (subsets `A ⊆ [n]` encoded as bit
//! masks). The fixed normalization is:
//!
//! * analysis by expectation: `f̂(A) = 2^{−n} Σ_x f(x) W_A(x)` ([`wht`]);
//! * synthesis by plain sum: `f(x) = Σ_A f̂(A) W_A(x)` ([`wht_inverse`]);
//! * `L₂` norms by expectation: `‖f‖² = 2^{−n} Σ_x ‖f(x)‖²`, under which
//!   Parseval reads `‖f‖² = Σ_A ‖f̂(A)‖²` exactly.
//!
//! On top of the transform sit the discrete derivatives
//! `∂_i f(x) = (f(x ⊕ e_i) − f(x))/2`, the Laplacian `Δ = Σ_i ∂_i`
//! (which multiplies `f̂(A)` by `|A|`), the heat semigroup `T_t` (which
//! multiplies by `e^{−t|A|}`, equivalently averages spatially with noise
//! rate `τ = (1 − e^{−t})/2`), and the tail projection onto spectrum
//! `|A| ≥ m`. Laplacian and heat each have independent spatial and
//! spectral routes; the tests hold them together.
//!
//! Dimensions are capped at `n = 20` (the tables hold `2ⁿ` vectors).

use crate::error::{Error, Result};

/// Hard cap on the cube dimension.
pub const MAX_DIMENSION: usize = 20;

/// A function `𝔽₂ⁿ → ℝ^k`, stored as a dense table of `2ⁿ` vectors (flat,
/// row per point). The same container holds coefficient tables `f̂`
/// (indexed by subset masks).
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFunction {
    n: usize,
    k: usize,
    vals: Vec<f64>, // 2ⁿ × k, row-major
}

impl CubeFunction {
    /// Builds a function from `2ⁿ` explicit vectors.
    pub fn new(n: usize, values: &[Vec<f64>]) -> Result<CubeFunction> {
        if n > MAX_DIMENSION {
            return Err(Error::TooLarge { k: n });
        }
        let size = 1usize << n;
        if values.len() != size {
            return Err(Error::IncompatibleSizes(format!(
                "dimension {n} needs {size} values, got {}",
                values.len()
            )));
        }
        let k = values.first().map_or(0, |v| v.len());
        if values.iter().any(|v| v.len() != k) {
            return Err(Error::InvalidInput("values must share a dimension".into()));
        }
        let mut vals = Vec::with_capacity(size * k);
        for v in values {
            vals.extend_from_slice(v);
        }
        Ok(CubeFunction { n, k, vals })
    }

    /// Builds a scalar function (`k = 1`).
    pub fn from_scalar(n: usize, values: &[f64]) -> Result<CubeFunction> {
        let wrapped: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        CubeFunction::new(n, &wrapped)
    }

    /// The zero function of the same shape.
    pub fn zeros_like(&self) -> CubeFunction {
        CubeFunction {
            n: self.n,
            k: self.k,
            vals: vec![0.0; self.vals.len()],
        }
    }

    /// Cube dimension `n`.
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Value dimension `k`.
    pub fn value_dim(&self) -> usize {
        self.k
    }

    /// Value at point (or coefficient at subset mask) `x`.
    pub fn get(&self, x: usize) -> &[f64] {
        &self.vals[x * self.k..(x + 1) * self.k]
    }

    fn get_mut(&mut self, x: usize) -> &mut [f64] {
        &mut self.vals[x * self.k..(x + 1) * self.k]
    }

    /// `L₂(𝔽₂ⁿ)` squared norm under the expectation convention:
    /// `2^{−n} Σ_x ‖f(x)‖²`.
    pub fn l2_norm_sq(&self) -> f64 {
        let size = 1usize << self.n;
        self.vals.iter().map(|v| v * v).sum::<f64>() / size as f64
    }

    /// Plain coefficient-table squared norm: `Σ_A ‖f̂(A)‖²`.
    pub fn coeff_norm_sq(&self) -> f64 {
        self.vals.iter().map(|v| v * v).sum::<f64>()
    }

    /// The mean `E f = f̂(∅)`.
    pub fn mean(&self) -> Vec<f64> {
        let size = 1usize << self.n;
        let mut m = vec![0.0; self.k];
        for x in 0..size {
            let row = self.get(x);
            for c in 0..self.k {
                m[c] += row[c];
            }
        }
        for v in &mut m {
            *v /= size as f64;
        }
        m
    }
}

/// The Walsh character `W_A` as a scalar cube function.
pub fn walsh(n: usize, a: usize) -> Result<CubeFunction> {
    if n > MAX_DIMENSION {
        return Err(Error::TooLarge { k: n });
    }
    if a >= (1usize << n) {
        return Err(Error::InvalidInput(format!(
            "subset mask {a} out of range for dimension {n}"
        )));
    }
    let vals: Vec<f64> = (0..1usize << n)
        .map(|x| if (x & a).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    CubeFunction::from_scalar(n, &vals)
}

// =========================================================================
// Walsh–Hadamard transform
// =========================================================================

/// In-place unnormalized butterfly: `g(A) = Σ_x f(x) W_A(x)`.
fn butterfly(f: &mut CubeFunction) {
    let (n, k) = (f.n, f.k);
    let size = 1usize << n;
    for layer in 0..n {
        let h = 1usize << layer;
        let mut block = 0;
        while block < size {
            for i in block..block + h {
                let (lo, hi) = (i * k, (i + h) * k);
                for c in 0..k {
                    let u = f.vals[lo + c];
                    let v = f.vals[hi + c];
                    f.vals[lo + c] = u + v;
                    f.vals[hi + c] = u - v;
                }
            }
            block += 2 * h;
        }
    }
}

/// Analysis transform: the coefficient table `f̂(A) = E[f(x) W_A(x)]`.
pub fn wht(f: &CubeFunction) -> CubeFunction {
    let mut out = f.clone();
    butterfly(&mut out);
    let scale = 1.0 / (1usize << f.n) as f64;
    for v in &mut out.vals {
        *v *= scale;
    }
    out
}

/// Synthesis transform: rebuilds `f(x) = Σ_A f̂(A) W_A(x)` from a
/// coefficient table (plain sum, no normalization), so
/// `wht_inverse(wht(f)) = f`.
pub fn wht_inverse(coeffs: &CubeFunction) -> CubeFunction {
    let mut out = coeffs.clone();
    butterfly(&mut out);
    out
}

// =========================================================================
// Derivatives, Laplacian, heat semigroup
// =========================================================================

/// Discrete partial derivative `∂_i f(x) = (f(x ⊕ e_i) − f(x))/2`.
pub fn partial(f: &CubeFunction, i: usize) -> Result<CubeFunction> {
    if i >= f.n {
        return Err(Error::InvalidInput(format!(
            "direction {i} out of range for dimension {}",
            f.n
        )));
    }
    let size = 1usize << f.n;
    let mut out = f.zeros_like();
    for x in 0..size {
        let y = x ^ (1usize << i);
        let fx = f.get(x);
        let fy = f.get(y);
        let row = out.get_mut(x);
        for c in 0..f.k {
            row[c] = (fy[c] - fx[c]) / 2.0;
        }
    }
    Ok(out)
}

/// The Laplacian `Δf = Σ_i ∂_i f`, evaluated spatially.
pub fn laplacian(f: &CubeFunction) -> CubeFunction {
    let size = 1usize << f.n;
    let mut out = f.zeros_like();
    for x in 0..size {
        let fx = f.get(x);
        for i in 0..f.n {
            let fy = f.get(x ^ (1usize << i));
            let row = out.get_mut(x);
            for c in 0..f.k {
                row[c] += (fy[c] - fx[c]) / 2.0;
            }
        }
    }
    // Δ has eigenvalue |A| on W_A with OUR sign convention? ∂_i W_A =
    // ((−1)^{⟨A,x+e_i⟩}−(−1)^{⟨A,x⟩})/2 = −W_A(x) when i ∈ A (else 0), so
    // Σ_i ∂_i W_A = −|A| W_A; the Laplacian is the negated sum.
    for v in &mut out.vals {
        *v = -*v;
    }
    out
}

/// The Laplacian through the spectral route: multiply `f̂(A)` by `|A|`.
pub fn laplacian_spectral(f: &CubeFunction) -> CubeFunction {
    let mut coeffs = wht(f);
    let size = 1usize << f.n;
    for a in 0..size {
        let w = a.count_ones() as f64;
        for v in coeffs.get_mut(a) {
            *v *= w;
        }
    }
    wht_inverse(&coeffs)
}

/// Heat semigroup `T_t` through the spectral route: multiply `f̂(A)` by
/// `e^{−t|A|}`.
pub fn heat(f: &CubeFunction, t: f64) -> Result<CubeFunction> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("heat time {t} must be ≥ 0")));
    }
    let mut coeffs = wht(f);
    let size = 1usize << f.n;
    for a in 0..size {
        let w = (-t * a.count_ones() as f64).exp();
        for v in coeffs.get_mut(a) {
            *v *= w;
        }
    }
    Ok(wht_inverse(&coeffs))
}

/// Heat semigroup through the spatial route: with noise rate
/// `τ = (1 − e^{−t})/2`, `T_t f(x) = Σ_y τ^{|y|}(1−τ)^{n−|y|} f(x ⊕ y)`
/// (each bit flips independently with probability `τ`). `O(4ⁿ)` — a
/// cross-check, not the production path.
pub fn heat_spatial(f: &CubeFunction, t: f64) -> Result<CubeFunction> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("heat time {t} must be ≥ 0")));
    }
    let tau = (1.0 - (-t).exp()) / 2.0;
    let n = f.n;
    let size = 1usize << n;
    // Weight by popcount, tabulated once.
    let weights: Vec<f64> = (0..=n)
        .map(|j| tau.powi(j as i32) * (1.0 - tau).powi((n - j) as i32))
        .collect();
    let mut out = f.zeros_like();
    for x in 0..size {
        let row = out.get_mut(x);
        for y in 0..size {
            let w = weights[y.count_ones() as usize];
            if w != 0.0 {
                let fv = f.get(x ^ y);
                for c in 0..f.k {
                    row[c] += w * fv[c];
                }
            }
        }
    }
    Ok(out)
}

/// Projection onto the `m`-tail space: zeroes every coefficient with
/// `|A| < m` and resynthesizes.
pub fn tail_project(f: &CubeFunction, m: usize) -> CubeFunction {
    let mut coeffs = wht(f);
    let size = 1usize << f.n;
    for a in 0..size {
        if (a.count_ones() as usize) < m {
            for v in coeffs.get_mut(a) {
                *v = 0.0;
            }
        }
    }
    wht_inverse(&coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_fn(n: usize, k: usize, rng: &mut SplitMix64) -> CubeFunction {
        let vals: Vec<Vec<f64>> = (0..1usize << n)
            .map(|_| (0..k).map(|_| rng.gauss()).collect())
            .collect();
        CubeFunction::new(n, &vals).unwrap()
    }

    fn max_abs_diff(a: &CubeFunction, b: &CubeFunction) -> f64 {
        a.vals
            .iter()
            .zip(&b.vals)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn walsh_characters_are_orthonormal() {
        // f = W_B ⇒ f̂ = indicator of B.
        let n = 6;
        for b in [0usize, 1, 0b101, 0b111111] {
            let coeffs = wht(&walsh(n, b).unwrap());
            for a in 0..1usize << n {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((coeffs.get(a)[0] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_function_concentrates_on_empty_set() {
        let f = CubeFunction::from_scalar(5, &[3.25; 32]).unwrap();
        let coeffs = wht(&f);
        assert!((coeffs.get(0)[0] - 3.25).abs() < 1e-12);
        for a in 1..32 {
            assert!(coeffs.get(a)[0].abs() < 1e-12);
        }
    }

    #[test]
    fn analysis_synthesis_roundtrip() {
        let mut rng = SplitMix64::new(42);
        let f = random_fn(8, 3, &mut rng);
        let back = wht_inverse(&wht(&f));
        assert!(max_abs_diff(&f, &back) < 1e-12);
    }

    #[test]
    fn parseval_under_expectation_convention() {
        let mut rng = SplitMix64::new(7);
        let f = random_fn(9, 2, &mut rng);
        let coeffs = wht(&f);
        assert!((f.l2_norm_sq() - coeffs.coeff_norm_sq()).abs() < 1e-12 * f.l2_norm_sq());
    }

    #[test]
    fn laplacian_eigenfunctions() {
        // ΔW_A = |A|·W_A, via the spatial route.
        let n = 7;
        for a in [0usize, 1, 0b1011, (1 << n) - 1] {
            let w = walsh(n, a).unwrap();
            let lw = laplacian(&w);
            let scale = a.count_ones() as f64;
            for x in 0..1usize << n {
                assert!((lw.get(x)[0] - scale * w.get(x)[0]).abs() < 1e-12);
            }
        }
        // Δ of a constant vanishes.
        let c = CubeFunction::from_scalar(4, &[2.0; 16]).unwrap();
        assert!(laplacian(&c).vals.iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn laplacian_dual_path() {
        let mut rng = SplitMix64::new(0x1A9);
        let f = random_fn(10, 2, &mut rng);
        let spatial = laplacian(&f);
        let spectral = laplacian_spectral(&f);
        assert!(max_abs_diff(&spatial, &spectral) < 1e-12);
    }

    #[test]
    fn heat_on_characters_and_identity_at_zero() {
        let n = 6;
        let t = 0.37;
        for a in [0usize, 0b11, 0b111000] {
            let w = walsh(n, a).unwrap();
            let hw = heat(&w, t).unwrap();
            let scale = (-t * a.count_ones() as f64).exp();
            for x in 0..1usize << n {
                assert!((hw.get(x)[0] - scale * w.get(x)[0]).abs() < 1e-12);
            }
        }
        let mut rng = SplitMix64::new(9);
        let f = random_fn(7, 2, &mut rng);
        assert!(max_abs_diff(&heat(&f, 0.0).unwrap(), &f) < 1e-12);
    }

    #[test]
    fn heat_dual_path() {
        let mut rng = SplitMix64::new(0xBEA7);
        for n in [6usize, 8, 12] {
            let f = random_fn(n, 1, &mut rng);
            for t in [0.1, 1.0, 3.0] {
                let spec = heat(&f, t).unwrap();
                let spat = heat_spatial(&f, t).unwrap();
                assert!(
                    max_abs_diff(&spec, &spat) < 1e-10,
                    "n={n} t={t}: {}",
                    max_abs_diff(&spec, &spat)
                );
            }
        }
    }

    #[test]
    fn tail_projection_edges() {
        let mut rng = SplitMix64::new(0x7A11);
        let f = random_fn(8, 2, &mut rng);
        assert!(max_abs_diff(&tail_project(&f, 0), &f) < 1e-12);
        let nothing = tail_project(&f, 9);
        assert!(nothing.vals.iter().all(|&v| v.abs() < 1e-12));
        // Projection is idempotent and kills low coefficients.
        let p = tail_project(&f, 3);
        let coeffs = wht(&p);
        for a in 0..256usize {
            if a.count_ones() < 3 {
                for &v in coeffs.get(a) {
                    assert!(v.abs() < 1e-12);
                }
            }
        }
        assert!(max_abs_diff(&tail_project(&p, 3), &p) < 1e-12);
    }

    #[test]
    fn tail_laplacian_lower_bound() {
        // On the m-tail space, ‖Δf‖ ≥ m‖f‖ (each surviving coefficient is
        // scaled by |A| ≥ m).
        let mut rng = SplitMix64::new(0x7A17);
        for m in [1usize, 2, 4] {
            let f = tail_project(&random_fn(10, 3, &mut rng), m);
            let lf = laplacian(&f);
            let lhs = lf.l2_norm_sq().sqrt();
            let rhs = m as f64 * f.l2_norm_sq().sqrt();
            assert!(lhs >= rhs - 1e-9, "m={m}: ‖Δf‖={lhs} < m‖f‖={rhs}");
        }
    }

    #[test]
    fn tail_heat_decay() {
        // ‖T_t f‖ ≤ e^{−tm}‖f‖ on the m-tail space, exactly by Parseval.
        let mut rng = SplitMix64::new(0x7EA7);
        for m in [1usize, 3] {
            let f = tail_project(&random_fn(9, 2, &mut rng), m);
            for t in [0.2, 1.0, 2.5] {
                let h = heat(&f, t).unwrap();
                let bound = (-t * m as f64).exp() * f.l2_norm_sq().sqrt();
                assert!(
                    h.l2_norm_sq().sqrt() <= bound + 1e-12,
                    "m={m} t={t}: {} > {bound}",
                    h.l2_norm_sq().sqrt()
                );
            }
        }
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            CubeFunction::from_scalar(21, &[0.0; 1]),
            Err(Error::TooLarge { k: 21 })
        ));
    }
}
