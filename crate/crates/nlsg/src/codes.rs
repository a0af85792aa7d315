//! Binary linear codes.
//!
//! A code is a linear subspace `C ⊆ 𝔽₂ⁿ`, held as a generator matrix in
//! reduced row-echelon form (RREF), which is the unique canonical basis of
//! the row space, so two codes are equal iff their generators are equal.
//! Codewords are bit masks with coordinate `i` at bit `i` — the same
//! convention as the cube-point masks of [`crate::hypercube`], so cosets
//! of a dual code index Cayley-graph vertices directly.
//!
//! Provided: duals, exhaustively certified minimum distance (Gray-code
//! sweep over all `2^k` codewords, parallelized over index ranges),
//! rejection sampling of "good" codes with dimension and distance at
//! least `⌈n/10⌉`, and coset partitions with canonical (numerically
//! minimal, i.e. lexicographically minimal under the fixed coordinate
//! order) representatives.
//!
//! Conventions: the zero-dimensional code has minimum distance ∞
//! (`None`); lengths are capped at 63 so codewords fit one machine word.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use rayon::prelude::*;

/// Minimum-distance sweeps are exhaustive; beyond this dimension they are
/// refused rather than approximated.
pub const MAX_DISTANCE_DIM: usize = 24;

/// Coset partitions materialize all `2ⁿ` points; capped here.
pub const MAX_COSET_LEN: usize = 20;

/// A binary linear code with a canonical (RREF) generator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCode {
    n: usize,
    rows: Vec<u64>, // RREF, pivots strictly increasing, no zero rows
}

/// Reduced row-echelon form over GF(2): pivots strictly increase, each
/// pivot column is cleared everywhere else, zero rows dropped.
fn rref(mut rows: Vec<u64>, n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for col in 0..n {
        let bit = 1u64 << col;
        if let Some(pos) = rows.iter().position(|&r| r & bit != 0) {
            let pivot = rows.swap_remove(pos);
            for r in rows.iter_mut() {
                if *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            for r in out.iter_mut() {
                if *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            out.push(pivot);
        }
    }
    out
}

impl BinaryCode {
    /// Builds the code spanned by the given rows (any spanning set; the
    /// generator is canonicalized and rank-deficient inputs just lose
    /// dimension).
    pub fn from_rows(n: usize, rows: &[u64]) -> Result<BinaryCode> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidInput(format!(
                "code length must be in 1..=63, got {n}"
            )));
        }
        let mask = (1u64 << n) - 1;
        if rows.iter().any(|&r| r & !mask != 0) {
            return Err(Error::InvalidInput(
                "generator row has bits beyond the code length".into(),
            ));
        }
        Ok(BinaryCode {
            n,
            rows: rref(rows.to_vec(), n),
        })
    }

    /// The zero code `{0}` of length `n`.
    pub fn zero(n: usize) -> Result<BinaryCode> {
        BinaryCode::from_rows(n, &[])
    }

    /// Code length `n`.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Dimension `k = rank(G)`.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The canonical generator rows (RREF, pivots ascending).
    pub fn generator(&self) -> &[u64] {
        &self.rows
    }

    /// The codeword indexed by `m ∈ [0, 2^k)`: XOR of the generator rows
    /// selected by the bits of `m`.
    pub fn word_at(&self, mut m: u64) -> u64 {
        let mut w = 0u64;
        let mut i = 0;
        while m != 0 {
            if m & 1 != 0 {
                w ^= self.rows[i];
            }
            m >>= 1;
            i += 1;
        }
        w
    }

    /// Membership test by reduction against the RREF rows.
    pub fn contains(&self, mut word: u64) -> bool {
        for &row in &self.rows {
            let pivot = row & row.wrapping_neg(); // lowest set bit = pivot
            if word & pivot != 0 {
                word ^= row;
            }
        }
        word == 0
    }

    /// The dual code `C^⊥ = {w : ⟨w, c⟩ = 0 ∀c ∈ C}`, of dimension `n−k`.
    pub fn dual(&self) -> BinaryCode {
        let n = self.n;
        let pivots: Vec<usize> = self
            .rows
            .iter()
            .map(|&r| r.trailing_zeros() as usize)
            .collect();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; n];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::with_capacity(n - self.rows.len());
        for f in 0..n {
            if is_pivot[f] {
                continue;
            }
            // Free coordinate f: set it, and copy column f of G into the
            // pivot coordinates so every generator row is orthogonal.
            let mut w = 1u64 << f;
            for (row, &p) in self.rows.iter().zip(&pivots) {
                if row & (1u64 << f) != 0 {
                    w |= 1u64 << p;
                }
            }
            basis.push(w);
        }
        let dual = BinaryCode {
            n,
            rows: rref(basis, n),
        };
        debug_assert!(dual
            .rows
            .iter()
            .all(|&h| self.rows.iter().all(|&g| (g & h).count_ones() % 2 == 0)));
        debug_assert_eq!(dual.dim(), n - self.dim());
        dual
    }

    /// Exhaustive minimum distance: the least Hamming weight of a nonzero
    /// codeword, `None` (∞) for the zero-dimensional code.
    ///
    /// Sweeps all `2^k` codewords with a Gray-code walk (one row XOR per
    /// step), split across workers by index range.
    pub fn min_distance(&self) -> Result<Option<usize>> {
        let k = self.dim();
        if k == 0 {
            return Ok(None);
        }
        if k > MAX_DISTANCE_DIM {
            return Err(Error::TooLarge { k });
        }
        let total: u64 = 1u64 << k;
        let chunk: u64 = if k <= 16 {
            total
        } else {
            (total / (rayon::current_num_threads() as u64 * 4).max(1)).max(1 << 16)
        };
        let ranges: Vec<(u64, u64)> = (0..total)
            .step_by(chunk as usize)
            .map(|lo| (lo, (lo + chunk).min(total)))
            .collect();
        let best = ranges
            .into_par_iter()
            .map(|(lo, hi)| {
                // Gray-code order within the range: word(gray(i)).
                let mut w = self.word_at(lo ^ (lo >> 1));
                let mut best = if lo == 0 { u32::MAX } else { w.count_ones() };
                for i in lo + 1..hi {
                    // gray(i) differs from gray(i−1) in bit tz(i).
                    w ^= self.rows[i.trailing_zeros() as usize];
                    best = best.min(w.count_ones());
                }
                best
            })
            .min()
            .unwrap_or(u32::MAX);
        debug_assert!(best >= 1 && best != u32::MAX);
        Ok(Some(best as usize))
    }

    /// Serializes as `nlsg-code v1` text (one generator row per line,
    /// coordinate 0 first).
    pub fn to_text(&self) -> String {
        let mut s = format!("nlsg-code v1\nlength {}\ndimension {}\n", self.n, self.dim());
        for &row in &self.rows {
            for i in 0..self.n {
                s.push(if row & (1u64 << i) != 0 { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the `nlsg-code v1` format.
    pub fn from_text(text: &str) -> Result<BinaryCode> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (ln, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty input"))?;
        if header.trim() != "nlsg-code v1" {
            return Err(parse_err(ln, "expected header `nlsg-code v1`"));
        }
        let (ln, lenline) = lines.next().ok_or_else(|| parse_err(1, "missing length"))?;
        let n: usize = lenline
            .trim()
            .strip_prefix("length ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(ln, "expected `length N`"))?;
        let (ln, dimline) = lines.next().ok_or_else(|| parse_err(2, "missing dimension"))?;
        let k: usize = dimline
            .trim()
            .strip_prefix("dimension ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(ln, "expected `dimension K`"))?;
        let mut rows = Vec::with_capacity(k);
        for _ in 0..k {
            let (ln, rowline) = lines
                .next()
                .ok_or_else(|| parse_err(3 + rows.len(), "missing generator row"))?;
            let bits = rowline.trim();
            if bits.len() != n {
                return Err(parse_err(ln, "generator row has wrong length"));
            }
            let mut row = 0u64;
            for (i, c) in bits.chars().enumerate() {
                match c {
                    '1' => row |= 1u64 << i,
                    '0' => {}
                    _ => return Err(parse_err(ln, "generator rows are 0/1 strings")),
                }
            }
            rows.push(row);
        }
        let code = BinaryCode::from_rows(n, &rows)?;
        if code.dim() != k {
            return Err(Error::InvalidInput(format!(
                "declared dimension {k} but rows have rank {}",
                code.dim()
            )));
        }
        Ok(code)
    }
}

/// Rejection-samples a code of length `n` with dimension `⌈n/10⌉` and
/// certified minimum distance at least `⌈n/10⌉`. Deterministic in the
/// seed; gives up after 1000 attempts.
pub fn good_code(n: usize, seed: u64) -> Result<BinaryCode> {
    if n == 0 || n > 24 {
        return Err(Error::InvalidInput(format!(
            "good-code sampling is desk-scale: length must be in 1..=24, got {n}"
        )));
    }
    let dim = n.div_ceil(10);
    let target = n.div_ceil(10);
    let mut rng = SplitMix64::new(seed);
    let mask = (1u64 << n) - 1;
    const BUDGET: usize = 1000;
    for _ in 0..BUDGET {
        let rows: Vec<u64> = (0..dim).map(|_| rng.next_u64() & mask).collect();
        let code = BinaryCode::from_rows(n, &rows)?;
        if code.dim() != dim {
            continue;
        }
        if let Some(d) = code.min_distance()? {
            if d >= target {
                return Ok(code);
            }
        }
    }
    Err(Error::NoCodeFound { attempts: BUDGET })
}

// =========================================================================
// Coset partitions
// =========================================================================

/// A partition of `𝔽₂ⁿ` into cosets of a subgroup (typically `C^⊥`).
#[derive(Debug, Clone)]
pub struct CosetPartition {
    pub n: usize,
    /// Canonical representatives, ascending; `reps[c]` is the minimal
    /// element of class `c`.
    pub reps: Vec<u64>,
    /// `class_of[x]` is the class index of point `x`.
    pub class_of: Vec<u32>,
    /// Common size of every class (`2^dim`).
    pub class_size: usize,
}

impl CosetPartition {
    /// Number of classes.
    pub fn classes(&self) -> usize {
        self.reps.len()
    }
}

/// Partitions `𝔽₂ⁿ` into cosets of the given code (call with `C^⊥` to get
/// the vertex set of the coset Cayley graph). Representatives are the
/// numerically minimal members, found by an ascending scan.
pub fn cosets(subgroup: &BinaryCode) -> Result<CosetPartition> {
    let n = subgroup.len();
    if n > MAX_COSET_LEN {
        return Err(Error::TooLarge { k: n });
    }
    let size = 1usize << n;
    let sub_size = 1usize << subgroup.dim();
    let mut class_of = vec![u32::MAX; size];
    let mut reps = Vec::with_capacity(size / sub_size);
    // Materialize the subgroup once (Gray-code walk).
    let mut members = Vec::with_capacity(sub_size);
    let mut w = 0u64;
    members.push(w);
    for i in 1..sub_size as u64 {
        w ^= subgroup.generator()[i.trailing_zeros() as usize];
        members.push(w);
    }
    for x in 0..size as u64 {
        if class_of[x as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x);
        for &m in &members {
            class_of[(x ^ m) as usize] = c;
        }
    }
    debug_assert_eq!(reps.len() * sub_size, size);
    Ok(CosetPartition {
        n,
        reps,
        class_of,
        class_size: sub_size,
    })
}
