//! Desk-scale vertex enumeration for channel polytopes.
//!
//! The feasible set is the product of `k` output simplices cut by linear row
//! constraints. Vertices are maintained under incremental constraint
//! insertion (double description with the combinatorial adjacency test): the
//! base polytope's vertices are the deterministic channels, and each new
//! halfspace replaces violating vertices by the cut points of edges that
//! cross it.

use crate::error::{Error, Result};

/// `a . x <= b` over the flattened `l x k` channel entries.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Constraint {
    fn normalized(mut self) -> Self {
        let m = self.a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if m > 0.0 {
            for x in self.a.iter_mut() {
                *x /= m;
            }
            self.b /= m;
        }
        self
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - self.b
    }
}

/// Row constraints of the LP channel family: for every row `j` and ordered
/// input pair `(i, i')`, `T(j,i) <= gamma_j T(j,i') + nu_j`.
pub fn lp_constraints(l: usize, k: usize, gamma: &[f64], nu: &[f64]) -> Vec<Constraint> {
    let mut out = Vec::with_capacity(l * k * (k - 1));
    for j in 0..l {
        for i in 0..k {
            for i2 in 0..k {
                if i == i2 {
                    continue;
                }
                let mut a = vec![0.0; l * k];
                a[j * k + i] = 1.0;
                a[j * k + i2] -= gamma[j];
                out.push(Constraint { a, b: nu[j] });
            }
        }
    }
    out
}

const TIGHT_TOL: f64 = 1e-9;

#[derive(Clone)]
struct Vertex {
    x: Vec<f64>,
    /// Tight-constraint bitset over the full constraint list.
    tight: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

/// Enumerate all vertices of the channel polytope `{column-stochastic l x k}`
/// intersected with `extra` halfspaces. Capped at `l * k <= cap`.
pub fn channel_polytope_vertices(
    l: usize,
    k: usize,
    extra: &[Constraint],
    cap: usize,
) -> Result<Vec<Vec<f64>>> {
    if l * k > cap {
        return Err(Error::DimensionCap(l * k, cap));
    }
    let n = l * k;
    // Constraint list: nonnegativity first, then the extra halfspaces.
    let mut cons: Vec<Constraint> = Vec::with_capacity(n + extra.len());
    for idx in 0..n {
        let mut a = vec![0.0; n];
        a[idx] = -1.0;
        cons.push(Constraint { a, b: 0.0 });
    }
    for c in extra {
        cons.push(c.clone().normalized());
    }
    let total = cons.len();
    let words = total.div_ceil(64);

    let tight_bits = |x: &[f64]| -> Vec<u64> {
        let mut bits = vec![0u64; words];
        for (i, c) in cons.iter().enumerate() {
            if c.eval(x).abs() <= TIGHT_TOL {
                bit_set(&mut bits, i);
            }
        }
        bits
    };

    // Base vertices: all deterministic channels.
    let mut verts: Vec<Vertex> = Vec::with_capacity(l.pow(k as u32));
    let mut assignment = vec![0usize; k];
    loop {
        let mut x = vec![0.0; n];
        for (c, &r) in assignment.iter().enumerate() {
            x[r * k + c] = 1.0;
        }
        let tight = tight_bits(&x);
        verts.push(Vertex { x, tight });
        // next assignment
        let mut i = 0;
        loop {
            if i == k {
                break;
            }
            assignment[i] += 1;
            if assignment[i] < l {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }

    for t in n..total {
        let vals: Vec<f64> = verts.iter().map(|v| cons[t].eval(&v.x)).collect();
        let any_pos = vals.iter().any(|&v| v > TIGHT_TOL);
        if !any_pos {
            continue;
        }
        let mut next: Vec<Vertex> = Vec::new();
        let mut keys: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
        let round_key =
            |x: &[f64]| -> Vec<i64> { x.iter().map(|v| (v * 1e8).round() as i64).collect() };
        for (i, v) in verts.iter().enumerate() {
            if vals[i] <= TIGHT_TOL {
                keys.insert(round_key(&v.x));
                next.push(v.clone());
            }
        }
        // Cut points on edges between strictly-negative and positive vertices.
        // An edge of the (n - k)-dimensional polytope needs at least
        // dim - 1 common tight inequalities; the popcount prefilter removes
        // almost all pairs before the full adjacency scan.
        let dim = n - k;
        for (i, u) in verts.iter().enumerate() {
            if vals[i] >= -TIGHT_TOL {
                continue;
            }
            for (j, v) in verts.iter().enumerate() {
                if vals[j] <= TIGHT_TOL {
                    continue;
                }
                if common_count(&u.tight, &v.tight, t) + 1 < dim {
                    continue;
                }
                // Combinatorial adjacency over constraints processed so far.
                let adjacent = !verts.iter().enumerate().any(|(w_i, w)| {
                    w_i != i && w_i != j && common_is_subset(&u.tight, &v.tight, &w.tight, t)
                });
                if !adjacent {
                    continue;
                }
                let lam = -vals[i] / (vals[j] - vals[i]);
                let x: Vec<f64> =
                    u.x.iter()
                        .zip(&v.x)
                        .map(|(&a, &b)| a + lam * (b - a))
                        .collect();
                if keys.insert(round_key(&x)) {
                    let tight = tight_bits(&x);
                    next.push(Vertex { x, tight });
                }
            }
        }
        verts = next;
    }
    Ok(verts.into_iter().map(|v| v.x).collect())
}

/// Number of common set bits among the first `upto`.
fn common_count(u: &[u64], v: &[u64], upto: usize) -> usize {
    let words = upto.div_ceil(64);
    let mut n = 0;
    for i in 0..words {
        let mut m = u[i] & v[i];
        if i == words - 1 && upto % 64 != 0 {
            m &= (1u64 << (upto % 64)) - 1;
        }
        n += m.count_ones() as usize;
    }
    n
}

/// `and(u, v)` masked to the first `upto` bits is a subset of `w`.
fn common_is_subset(u: &[u64], v: &[u64], w: &[u64], upto: usize) -> bool {
    let words = upto.div_ceil(64);
    for i in 0..words {
        let mut m = u[i] & v[i];
        if i == words - 1 && upto % 64 != 0 {
            m &= (1u64 << (upto % 64)) - 1;
        }
        if m & !w[i] != 0 {
            return false;
        }
    }
    true
}
