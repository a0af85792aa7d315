//! Exact and floating-point symmetric matrices.
//!
//! [`StochasticMatrix`] is the exact-rational form of a normalized
//! adjacency matrix: symmetric, entrywise non-negative, every row summing
//! to exactly 1. Keeping this bookkeeping in rational arithmetic makes
//! product identities (powers, Cesàro averages, doubling) checkable with
//! no rounding disputes; floating point enters only when a matrix is
//! handed to the eigensolver or to numeric sweeps via
//! [`StochasticMatrix::to_float`].

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Symmetric doubly stochastic matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix {
    n: usize,
    /// Row-major entries, length `n*n`.
    a: Vec<BigRational>,
}

impl StochasticMatrix {
    /// Validating constructor from row-major rational entries.
    pub fn from_entries(n: usize, a: Vec<BigRational>) -> Result<Self> {
        if n == 0 || a.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "matrix needs n>0 and n*n entries, got n={n} and {} entries",
                a.len()
            )));
        }
        let m = StochasticMatrix { n, a };
        for i in 0..n {
            let mut row = BigRational::zero();
            for j in 0..n {
                let e = m.get(i, j);
                if e.is_negative() {
                    return Err(Error::InvalidInput(format!("negative entry at ({i},{j})")));
                }
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidInput(format!("asymmetry at ({i},{j})")));
                }
                row += e;
            }
            if !row.is_one() {
                return Err(Error::InvalidInput(format!("row {i} sums to {row}, not 1")));
            }
        }
        Ok(m)
    }

    /// Constructor from integer counts over a common denominator:
    /// entry `(i,j) = counts[i*n+j] / denom`.
    pub fn from_counts(n: usize, counts: &[u64], denom: u64) -> Result<Self> {
        let den = BigInt::from(denom);
        let a = counts
            .iter()
            .map(|&c| BigRational::new(BigInt::from(c), den.clone()))
            .collect();
        StochasticMatrix::from_entries(n, a)
    }

    /// The identity matrix (the adjacency of the loops-only graph).
    pub fn identity(n: usize) -> Self {
        let mut a = vec![BigRational::zero(); n * n];
        for i in 0..n {
            a[i * n + i] = BigRational::one();
        }
        StochasticMatrix { n, a }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.a[i * self.n + j]
    }

    /// Raw symmetric product (not exposed: a product of two symmetric
    /// stochastic matrices need not be symmetric, so callers go through
    /// [`StochasticMatrix::pow`] / [`StochasticMatrix::cesaro`]).
    fn mul_raw(&self, other: &StochasticMatrix) -> Vec<BigRational> {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out[i * n + j] += aik * b;
                    }
                }
            }
        }
        out
    }

    /// Exact `A^t` (with `A^0 = I`). Powers of a symmetric matrix stay
    /// symmetric and doubly stochastic.
    pub fn pow(&self, t: usize) -> StochasticMatrix {
        let mut acc = StochasticMatrix::identity(self.n);
        for _ in 0..t {
            acc = StochasticMatrix {
                n: self.n,
                a: self.mul_raw(&acc),
            };
        }
        debug_assert!(acc.validate_ok());
        acc
    }

    /// Exact Cesàro average `(1/m) Σ_{t=0}^{m-1} A^t`.
    pub fn cesaro(&self, m: usize) -> StochasticMatrix {
        assert!(m >= 1, "Cesàro average needs m ≥ 1");
        let n = self.n;
        let mut power = StochasticMatrix::identity(n);
        let mut sum = power.a.clone();
        for _ in 1..m {
            power = StochasticMatrix {
                n,
                a: self.mul_raw(&power),
            };
            for (s, p) in sum.iter_mut().zip(power.a.iter()) {
                *s += p;
            }
        }
        let inv_m = BigRational::new(BigInt::one(), BigInt::from(m));
        for s in sum.iter_mut() {
            *s *= &inv_m;
        }
        let out = StochasticMatrix { n, a: sum };
        debug_assert!(out.validate_ok());
        out
    }

    /// The 2n×2n doubling `[[0, A], [A, 0]]`.
    pub fn double(&self) -> StochasticMatrix {
        let n = self.n;
        let m = 2 * n;
        let mut a = vec![BigRational::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                a[i * m + (n + j)] = self.get(i, j).clone();
                a[(n + i) * m + j] = self.get(i, j).clone();
            }
        }
        let out = StochasticMatrix { n: m, a };
        debug_assert!(out.validate_ok());
        out
    }

    /// Float image for eigensolving and numeric sweeps.
    pub fn to_float(&self) -> FloatMatrix {
        let a = self
            .a
            .iter()
            .map(|r| r.to_f64().expect("rational fits in f64"))
            .collect();
        FloatMatrix { n: self.n, a }
    }

    fn validate_ok(&self) -> bool {
        StochasticMatrix::from_entries(self.n, self.a.clone()).is_ok()
    }
}

/// Dense symmetric matrix of `f64` (row-major), the numeric workhorse.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMatrix {
    n: usize,
    a: Vec<f64>,
}

impl FloatMatrix {
    pub fn zeros(n: usize) -> Self {
        FloatMatrix {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FloatMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(f(i, j));
            }
        }
        FloatMatrix { n, a }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.a[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let row = self.row(i);
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Dense product `A·B`.
    pub fn matmul(&self, other: &FloatMatrix) -> FloatMatrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = FloatMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.a[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    /// Float Cesàro average `(1/m) Σ_{t<m} A^t`.
    pub fn cesaro(&self, m: usize) -> FloatMatrix {
        assert!(m >= 1);
        let n = self.n;
        let mut power = FloatMatrix::identity(n);
        let mut sum = power.clone();
        for _ in 1..m {
            power = self.matmul(&power);
            for (s, p) in sum.a.iter_mut().zip(power.a.iter()) {
                *s += p;
            }
        }
        for s in sum.a.iter_mut() {
            *s /= m as f64;
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn triangle() -> StochasticMatrix {
        // (1/2)(J − I) on 3 vertices.
        let h = rat(1, 2);
        let z = BigRational::zero();
        StochasticMatrix::from_entries(
            3,
            vec![
                z.clone(),
                h.clone(),
                h.clone(),
                h.clone(),
                z.clone(),
                h.clone(),
                h.clone(),
                h.clone(),
                z.clone(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_asymmetry_and_bad_rows() {
        let bad = StochasticMatrix::from_entries(
            2,
            vec![rat(1, 2), rat(1, 2), rat(1, 4), rat(3, 4)],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn pow_zero_is_identity() {
        let a = triangle();
        assert_eq!(a.pow(0), StochasticMatrix::identity(3));
        assert_eq!(a.pow(1), a);
    }

    #[test]
    fn triangle_square_exact() {
        // ((1/2)(J−I))² = (1/4)(J−I)² = (1/4)(3I + (J−I)·1) … computed directly:
        // entry (i,i) = 2·(1/4) = 1/2, entry (i,j) = 1/4 for i≠j.
        let sq = triangle().pow(2);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { rat(1, 2) } else { rat(1, 4) };
                assert_eq!(*sq.get(i, j), want);
            }
        }
    }

    #[test]
    fn cesaro_m1_is_identity() {
        assert_eq!(triangle().cesaro(1), StochasticMatrix::identity(3));
    }

    #[test]
    fn cesaro_two_of_triangle() {
        // (I + (1/2)(J−I)) / 2: diagonal 1/2, off-diagonal 1/4.
        let c = triangle().cesaro(2);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { rat(1, 2) } else { rat(1, 4) };
                assert_eq!(*c.get(i, j), want);
            }
        }
    }

    #[test]
    fn double_of_one_by_one() {
        let one = StochasticMatrix::identity(1);
        let d = one.double();
        assert_eq!(d.n(), 2);
        assert_eq!(*d.get(0, 1), BigRational::one());
        assert_eq!(*d.get(0, 0), BigRational::zero());
    }

    #[test]
    fn float_matvec_and_cesaro_agree_with_exact() {
        let a = triangle();
        let cf = a.to_float().cesaro(3);
        let ce = a.cesaro(3).to_float();
        for i in 0..3 {
            for j in 0..3 {
                assert!((cf.get(i, j) - ce.get(i, j)).abs() < 1e-12);
            }
        }
    }
}
