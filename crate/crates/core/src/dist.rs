//! Distributions over finite alphabets, the divergences between them, and
//! likelihood-ratio canonicalization of a distribution pair.
//!
//! Divergence conventions follow the testing literature: the squared Hellinger
//! divergence carries no 1/2 factor and ranges over `[0, 2]`; total variation
//! is `(1/2) * l1` and ranges over `[0, 1]`.

use crate::channel::Channel;
use crate::error::{Error, Result};

/// Sum tolerance for probability vectors and channel columns.
pub const SUM_TOL: f64 = 1e-12;

/// A probability vector over `[k]`.
///
/// Entries are validated on construction and never renormalized silently;
/// call [`Distribution::renormalized`] to rescale explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        for (i, &x) in probs.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} is {x}, expected a finite value >= 0"
                )));
            }
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {s}, expected 1 within {SUM_TOL}"
            )));
        }
        Ok(Distribution { probs })
    }

    /// Bernoulli distribution as the vector `[1 - x, x]`.
    pub fn bernoulli(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::ParameterRange(format!("Bernoulli parameter {x}")));
        }
        Distribution::new(vec![1.0 - x, x])
    }

    /// Point mass at `at` over `[k]`.
    pub fn point_mass(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(Error::ParameterRange(format!("point mass {at} >= {k}")));
        }
        let mut v = vec![0.0; k];
        v[at] = 1.0;
        Distribution::new(v)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Rescale to sum exactly to 1; the only renormalization path.
    pub fn renormalized(&self) -> Self {
        let s: f64 = self.probs.iter().sum();
        Distribution {
            probs: self.probs.iter().map(|x| x / s).collect(),
        }
    }

    /// Draw one symbol by inverse CDF.
    pub fn sample(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, &x) in self.probs.iter().enumerate() {
            acc += x;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

fn check_sizes(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch(p.len(), q.len()));
    }
    Ok(())
}

/// Total variation distance `(1/2) sum_i |p_i - q_i|`, in `[0, 1]`.
pub fn tv(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_sizes(p, q)?;
    Ok(tv_slices(&p.probs, &q.probs))
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

/// Squared Hellinger divergence `sum_i (sqrt(p_i) - sqrt(q_i))^2`, in `[0, 2]`.
///
/// No 1/2 factor: `hellinger_sq` of disjoint supports is 2.
pub fn hellinger_sq(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_sizes(p, q)?;
    Ok(hellinger_sq_slices(&p.probs, &q.probs))
}

pub(crate) fn hellinger_sq_slices(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum()
}

/// Kullback-Leibler divergence in nats; `+inf` unless `p` is absolutely
/// continuous w.r.t. `q`.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_sizes(p, q)?;
    Ok(kl_slices(&p.probs, &q.probs))
}

pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        acc += a * (a / b).ln();
    }
    acc.max(0.0)
}

/// Renyi divergence of order `alpha > 0`; `alpha = 1` dispatches to [`kl`],
/// `alpha = inf` gives the sup-log-likelihood-ratio.
pub fn renyi(p: &Distribution, q: &Distribution, alpha: f64) -> Result<f64> {
    check_sizes(p, q)?;
    if !(alpha > 0.0) {
        return Err(Error::ParameterRange(format!("renyi order {alpha}")));
    }
    Ok(renyi_slices(&p.probs, &q.probs, alpha))
}

pub(crate) fn renyi_slices(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    if alpha == 1.0 {
        return kl_slices(p, q);
    }
    if alpha.is_infinite() {
        let mut sup = 0.0f64;
        for (&a, &b) in p.iter().zip(q) {
            if a == 0.0 {
                continue;
            }
            if b == 0.0 {
                return f64::INFINITY;
            }
            sup = sup.max(a / b);
        }
        return sup.ln().max(0.0);
    }
    let mut sum = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            if alpha > 1.0 {
                return f64::INFINITY;
            }
            continue;
        }
        sum += a.powf(alpha) * b.powf(1.0 - alpha);
    }
    if sum <= 0.0 {
        return f64::INFINITY;
    }
    (sum.ln() / (alpha - 1.0)).max(0.0)
}

/// Chernoff information `-min_{lambda in [0,1]} ln sum_i p_i^lambda q_i^(1-lambda)`.
///
/// The inner function is convex in `lambda`; golden-section search to 1e-10.
pub fn chernoff_info(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_sizes(p, q)?;
    Ok(chernoff_slices(&p.probs, &q.probs))
}

pub(crate) fn chernoff_slices(p: &[f64], q: &[f64]) -> f64 {
    let f = |lambda: f64| -> f64 {
        let mut sum = 0.0;
        for (&a, &b) in p.iter().zip(q) {
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let term = if lambda == 0.0 {
                if a > 0.0 {
                    b
                } else {
                    0.0
                }
            } else if lambda == 1.0 {
                if b > 0.0 {
                    a
                } else {
                    0.0
                }
            } else if a == 0.0 || b == 0.0 {
                0.0
            } else {
                a.powf(lambda) * b.powf(1.0 - lambda)
            };
            sum += term;
        }
        if sum <= 0.0 {
            f64::NEG_INFINITY
        } else {
            sum.ln()
        }
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let v = f((lo + hi) / 2.0).min(f(0.0)).min(f(1.0));
    (-v).max(0.0)
}

/// Likelihood ratio `p_i / q_i` on the extended real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LikelihoodRatio {
    Finite(f64),
    Infinite,
}

impl LikelihoodRatio {
    pub fn as_f64(&self) -> f64 {
        match self {
            LikelihoodRatio::Finite(x) => *x,
            LikelihoodRatio::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LikelihoodRatio::Infinite)
    }
}

/// Exact comparison of ratios `p_a/q_a` vs `p_b/q_b` by cross-multiplication.
/// Infinite ratios (q = 0, p > 0) sort last.
fn cmp_ratio(p: &[f64], q: &[f64], a: usize, b: usize) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let (inf_a, inf_b) = (q[a] == 0.0, q[b] == 0.0);
    match (inf_a, inf_b) {
        (true, true) => Equal,
        (true, false) => Greater,
        (false, true) => Less,
        (false, false) => {
            let lhs = p[a] * q[b];
            let rhs = p[b] * q[a];
            lhs.partial_cmp(&rhs).unwrap_or(Equal)
        }
    }
}

/// The permutation sorting a pair's alphabet by ascending likelihood ratio.
///
/// Ties are broken stably by original index. Construction fails if any
/// coordinate has `p_i = q_i = 0` (canonicalize the pair first).
#[derive(Clone, Debug)]
pub struct LikelihoodOrder {
    perm: Vec<usize>,
    ratios: Vec<LikelihoodRatio>,
}

impl LikelihoodOrder {
    pub fn new(p: &Distribution, q: &Distribution) -> Result<Self> {
        check_sizes(p, q)?;
        let k = p.len();
        let mut ratios = Vec::with_capacity(k);
        for i in 0..k {
            if q[i] == 0.0 {
                if p[i] == 0.0 {
                    return Err(Error::UndefinedRatio(i));
                }
                ratios.push(LikelihoodRatio::Infinite);
            } else {
                ratios.push(LikelihoodRatio::Finite(p[i] / q[i]));
            }
        }
        let mut perm: Vec<usize> = (0..k).collect();
        perm.sort_by(|&a, &b| cmp_ratio(p.probs(), q.probs(), a, b));
        Ok(LikelihoodOrder { perm, ratios })
    }

    /// `perm()[s]` is the original index at sorted position `s`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Ratio of the original index `i`.
    pub fn ratio(&self, i: usize) -> LikelihoodRatio {
        self.ratios[i]
    }

    /// Sorted position of the original index `i`.
    pub fn position(&self, i: usize) -> usize {
        self.perm
            .iter()
            .position(|&j| j == i)
            .expect("index in range")
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

/// A pair rewritten on a merged alphabet with distinct, well-defined
/// likelihood ratios; the deterministic merge map satisfies
/// `merge_map p = merged_p` and `merge_map q = merged_q` exactly.
#[derive(Clone, Debug)]
pub struct PairCanonicalization {
    pub merged_p: Distribution,
    pub merged_q: Distribution,
    pub merge_map: Channel,
}

impl PairCanonicalization {
    /// `k' = 1`: the merged pair is a single point (happens iff `p == q` up to
    /// merging); flagged so callers can warn.
    pub fn is_degenerate(&self) -> bool {
        self.merged_p.len() == 1
    }
}

/// Merge elements with equal likelihood ratios and drop coordinates that are
/// zero under both distributions. Groups keep first-occurrence order.
pub fn canonicalize(p: &Distribution, q: &Distribution) -> Result<PairCanonicalization> {
    check_sizes(p, q)?;
    let k = p.len();
    let live: Vec<usize> = (0..k).filter(|&i| p[i] > 0.0 || q[i] > 0.0).collect();
    if live.is_empty() {
        return Err(Error::InvalidDistribution(
            "p and q are zero everywhere".into(),
        ));
    }
    // Group live indices by exact ratio equality, first-occurrence order.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &live {
        let mut placed = false;
        for g in groups.iter_mut() {
            if cmp_ratio(p.probs(), q.probs(), g[0], i) == std::cmp::Ordering::Equal {
                g.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push(vec![i]);
        }
    }
    let k2 = groups.len();
    let mut map = vec![0usize; k];
    let mut merged_p = vec![0.0; k2];
    let mut merged_q = vec![0.0; k2];
    for (gi, g) in groups.iter().enumerate() {
        for &i in g {
            map[i] = gi;
            merged_p[gi] += p[i];
            merged_q[gi] += q[i];
        }
    }
    // Dead coordinates route to group 0; they carry no mass.
    let merge_map = Channel::deterministic(&map, k2)?;
    // The channel application sums columns in ascending input order, matching
    // the accumulation above term for term, so the equality is bit-exact.
    Ok(PairCanonicalization {
        merged_p: Distribution::new(merged_p)?,
        merged_q: Distribution::new(merged_q)?,
        merge_map,
    })
}
