//! Graph products and averaging operations.
//!
//! All operations act on rotation maps and output genuine multigraphs, so
//! loops and parallel edges survive every composition. The key product is
//! the zigzag product `G₁ Ⓩ G₂`: for a `d₁`-regular graph `G₁` on `n₁`
//! vertices and a `d₂`-regular graph `G₂` on `d₁` vertices, the product
//! has vertex set `V₁ × [d₁]`, degree `d₂²`, and an edge for every
//! *zig–zag–zig* three-step walk: a `G₂`-step inside the cloud of `u`, a
//! `G₁`-step between clouds along the port selected by the zig, then a
//! `G₂`-step inside the destination cloud.
//!
//! The remaining operations:
//!
//! * [`replacement`] — cloud edges plus one inter-cloud edge per vertex
//!   (degree `d₂ + 1`, the inter-cloud edge at port index `d₂`);
//! * [`tensor`] — Kronecker product of adjacencies;
//! * [`power`] — one edge per length-`t` walk (degree `d^t`, adjacency
//!   exactly `A^t`);
//! * [`cesaro`] — the averaged graph with `d^{m−1−t}` parallel edges per
//!   length-`t` walk, `t < m` (degree `m·d^{m−1}`, adjacency exactly
//!   `(1/m) Σ_{t<m} A^t`);
//! * [`edge_complete`] — degree padding `d′ = ℓd + r`: every edge
//!   duplicated `ℓ` times plus `r` loops per vertex;
//! * [`cycle_with_loops`] — the 3-regular `m`-cycle with one loop per vertex;
//! * [`double`] — the matrix doubling `[[0,A],[A,0]]`.
//!
//! Vertex indexing of product graphs is fixed as `(u,a) ↦ u·d₁ + a`
//! (and `(u,a) ↦ u·n_H + a` for tensor), so outputs are byte-reproducible.

use crate::error::{Error, Result};
use crate::matrix::StochasticMatrix;
use crate::multigraph::Multigraph;

/// Default cap on total output ports (`n·d`) for the exponentially growing
/// operations ([`power`], [`cesaro`]). Exceeding the cap is an error, never
/// a silent truncation.
pub const DEFAULT_PORT_CAP: u64 = 1_000_000;

// =========================================================================
// Zigzag and replacement products
// =========================================================================

fn check_cloud_sizes(g1: &Multigraph, g2: &Multigraph) -> Result<()> {
    if g2.n() != g1.degree() {
        return Err(Error::IncompatibleSizes(format!(
            "zigzag/replacement needs |V₂| = deg G₁; got |V₂| = {} and deg G₁ = {}",
            g2.n(),
            g1.degree()
        )));
    }
    Ok(())
}

/// Zigzag product `G₁ Ⓩ G₂`.
///
/// Vertices `(u,a) ↦ u·d₁ + a`; ports `(i,j) ∈ [d₂]² ↦ i·d₂ + j`. The port
/// rotation performs zig (`G₂`-step from `a` along `i`), zag (`G₁`-step
/// from `u` along the arrived cloud point), zig (`G₂`-step along `j`), and
/// records the reversed step labels, which makes it an involution.
pub fn zigzag(g1: &Multigraph, g2: &Multigraph) -> Result<Multigraph> {
    check_cloud_sizes(g1, g2)?;
    let (n1, d1) = (g1.n(), g1.degree());
    let d2 = g2.degree();
    let n = n1 * d1;
    let d = d2 * d2;
    let mut rot = vec![(0u32, 0u32); n * d];
    for u in 0..n1 {
        for a in 0..d1 {
            for i in 0..d2 {
                for j in 0..d2 {
                    // zig: step inside the source cloud.
                    let (ap, ip) = g2.rot(a, i);
                    // zag: cross between clouds along port a′ of u.
                    let (v, bp) = g1.rot(u, ap);
                    // zig: step inside the destination cloud.
                    let (b, jp) = g2.rot(bp, j);
                    let src = (u * d1 + a) * d + (i * d2 + j);
                    rot[src] = ((v * d1 + b) as u32, (jp * d2 + ip) as u32);
                }
            }
        }
    }
    Multigraph::from_rotation(n, d, rot)
}

/// Replacement product: each vertex of `G₁` becomes a copy of `G₂`
/// ("cloud"); ports `0..d₂` are the cloud's own edges, port `d₂` is the
/// single inter-cloud edge along the corresponding `G₁` port.
pub fn replacement(g1: &Multigraph, g2: &Multigraph) -> Result<Multigraph> {
    check_cloud_sizes(g1, g2)?;
    let (n1, d1) = (g1.n(), g1.degree());
    let d2 = g2.degree();
    let n = n1 * d1;
    let d = d2 + 1;
    let mut rot = vec![(0u32, 0u32); n * d];
    for u in 0..n1 {
        for a in 0..d1 {
            let base = (u * d1 + a) * d;
            for q in 0..d2 {
                let (b, qp) = g2.rot(a, q);
                rot[base + q] = ((u * d1 + b) as u32, qp as u32);
            }
            let (v, b) = g1.rot(u, a);
            rot[base + d2] = ((v * d1 + b) as u32, d2 as u32);
        }
    }
    Multigraph::from_rotation(n, d, rot)
}

// =========================================================================
// Tensor product
// =========================================================================

/// Tensor (Kronecker) product: vertices `(u,a) ↦ u·n_H + a`, ports
/// `(p,q) ↦ p·d_H + q`, both coordinates rotating independently.
pub fn tensor(g: &Multigraph, h: &Multigraph) -> Result<Multigraph> {
    let n = g.n() * h.n();
    let d = g.degree() * h.degree();
    let (nh, dh) = (h.n(), h.degree());
    let mut rot = vec![(0u32, 0u32); n * d];
    for u in 0..g.n() {
        for a in 0..nh {
            for p in 0..g.degree() {
                for q in 0..dh {
                    let (v, pp) = g.rot(u, p);
                    let (b, qp) = h.rot(a, q);
                    let src = (u * nh + a) * d + (p * dh + q);
                    rot[src] = ((v * nh + b) as u32, (pp * dh + qp) as u32);
                }
            }
        }
    }
    Multigraph::from_rotation(n, d, rot)
}

// =========================================================================
// Powers and Cesàro averages
// =========================================================================

fn checked_ports(n: usize, degree: u128, cap: u64) -> Result<usize> {
    let needed = n as u128 * degree;
    if needed > cap as u128 {
        return Err(Error::DegreeCapExceeded { needed, cap });
    }
    Ok(degree as usize)
}

/// Graph power `G^t` with the default port cap.
pub fn power(g: &Multigraph, t: usize) -> Result<Multigraph> {
    power_capped(g, t, DEFAULT_PORT_CAP)
}

/// Graph power `G^t`: one edge per length-`t` walk, degree `d^t`.
///
/// A port is the digit string `(p₁,…,p_t)` of walk steps (big-endian in
/// base `d`); its rotation is the reversed string of arrival ports, so the
/// reverse walk uses exactly the mirrored port and the map is an
/// involution. Adjacency equals `A^t` exactly.
pub fn power_capped(g: &Multigraph, t: usize, cap: u64) -> Result<Multigraph> {
    if t == 0 {
        return Err(Error::InvalidInput("graph power needs t ≥ 1".into()));
    }
    let (n, d) = (g.n(), g.degree());
    let dt = (d as u128).pow(t as u32);
    let new_d = checked_ports(n, dt, cap)?;
    let mut rot = vec![(0u32, 0u32); n * new_d];
    let mut steps = vec![0usize; t];
    let mut arrivals = vec![0usize; t];
    for u in 0..n {
        for idx in 0..new_d {
            // Decode the walk digits (big-endian), walk, record arrivals.
            let mut rem = idx;
            for k in (0..t).rev() {
                steps[k] = rem % d;
                rem /= d;
            }
            let mut cur = u;
            for k in 0..t {
                let (nxt, q) = g.rot(cur, steps[k]);
                arrivals[k] = q;
                cur = nxt;
            }
            // Reversed arrival string is the partner port.
            let mut back = 0usize;
            for k in (0..t).rev() {
                back = back * d + arrivals[k];
            }
            rot[u * new_d + idx] = (cur as u32, back as u32);
        }
    }
    Multigraph::from_rotation(n, new_d, rot)
}

/// Cesàro average graph with the default port cap.
pub fn cesaro(g: &Multigraph, m: usize) -> Result<Multigraph> {
    cesaro_capped(g, m, DEFAULT_PORT_CAP)
}

/// Cesàro average graph `𝒜_m(G)`: for every `t ∈ {0,…,m−1}` and every
/// length-`t` walk `u → v`, `d^{m−1−t}` parallel edges join `u` and `v`.
///
/// Degree is `m·d^{m−1}`; adjacency equals `(1/m) Σ_{t<m} A^t` exactly.
/// The `t = 0` block is `d^{m−1}` self-loops per vertex. Ports are laid
/// out as `t·d^{m−1} + walk·d^{m−1−t} + copy`.
pub fn cesaro_capped(g: &Multigraph, m: usize, cap: u64) -> Result<Multigraph> {
    if m == 0 {
        return Err(Error::InvalidInput("Cesàro graph needs m ≥ 1".into()));
    }
    let (n, d) = (g.n(), g.degree());
    let block = (d as u128).pow(m as u32 - 1); // d^{m−1}
    let new_d = checked_ports(n, m as u128 * block, cap)?;
    let block = block as usize;
    let mut rot = vec![(0u32, 0u32); n * new_d];
    let mut steps = vec![0usize; m];
    let mut arrivals = vec![0usize; m];
    for u in 0..n {
        for t in 0..m {
            let copies = d.pow((m - 1 - t) as u32);
            let walks = block / copies; // d^t
            for w in 0..walks {
                // Decode and take the length-t walk.
                let mut rem = w;
                for k in (0..t).rev() {
                    steps[k] = rem % d;
                    rem /= d;
                }
                let mut cur = u;
                for k in 0..t {
                    let (nxt, q) = g.rot(cur, steps[k]);
                    arrivals[k] = q;
                    cur = nxt;
                }
                let mut back = 0usize;
                for k in (0..t).rev() {
                    back = back * d + arrivals[k];
                }
                for c in 0..copies {
                    let src = u * new_d + t * block + w * copies + c;
                    let dst_port = t * block + back * copies + c;
                    rot[src] = (cur as u32, dst_port as u32);
                }
            }
        }
    }
    Multigraph::from_rotation(n, new_d, rot)
}

/// Exact Cesàro average of a stochastic matrix: `(1/m) Σ_{t<m} A^t`.
pub fn cesaro_matrix(a: &StochasticMatrix, m: usize) -> StochasticMatrix {
    a.cesaro(m)
}

// =========================================================================
// Edge completion, loop cycles, doubling
// =========================================================================

/// Edge completion `𝒞_{d′}(G)`: raises the degree to `d′ = ℓd + r` by
/// duplicating every edge `ℓ` times and adding `r` loops per vertex.
pub fn edge_complete(g: &Multigraph, dp: usize) -> Result<Multigraph> {
    let (n, d) = (g.n(), g.degree());
    if dp < d {
        return Err(Error::DegreeTooSmall {
            target: dp,
            current: d,
        });
    }
    let l = dp / d;
    let r = dp % d;
    let mut rot = vec![(0u32, 0u32); n * dp];
    for v in 0..n {
        for p in 0..d {
            let (u, q) = g.rot(v, p);
            for c in 0..l {
                // Copy c of a loop stays a loop; copies pair up otherwise.
                rot[v * dp + p * l + c] = (u as u32, (q * l + c) as u32);
            }
        }
        for c in 0..r {
            let port = d * l + c;
            rot[v * dp + port] = (v as u32, port as u32);
        }
    }
    Multigraph::from_rotation(n, dp, rot)
}

/// The cycle with loops `C_m°`: `m`-cycle plus one self-loop per vertex;
/// 3-regular (two cycle ports, one loop port).
pub fn cycle_with_loops(m: usize) -> Result<Multigraph> {
    if m < 2 {
        return Err(Error::InvalidInput("cycle with loops needs m ≥ 2".into()));
    }
    let d = 3;
    let mut rot = vec![(0u32, 0u32); m * d];
    for v in 0..m {
        rot[v * d] = (((v + 1) % m) as u32, 1);
        rot[v * d + 1] = (((v + m - 1) % m) as u32, 0);
        rot[v * d + 2] = (v as u32, 2);
    }
    Multigraph::from_rotation(m, d, rot)
}

/// Matrix doubling `[[0,A],[A,0]]` (the bipartite double cover of `A`).
pub fn double(a: &StochasticMatrix) -> StochasticMatrix {
    a.double()
}
