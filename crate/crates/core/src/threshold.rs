//! Threshold channels: deterministic channels whose preimages are contiguous
//! blocks of the likelihood-ratio ordering, plus the constructive
//! non-extremality witness for deterministic channels that are not threshold.

use crate::channel::Channel;
use crate::dist::{Distribution, LikelihoodOrder};
use crate::error::{Error, Result};

/// Tolerance for recognizing deterministic channels.
pub const DET_TOL: f64 = 1e-12;

/// An ordered split of the likelihood-sorted alphabet into `l` contiguous,
/// possibly empty blocks, with an output labeling permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdPartition {
    /// `l - 1` nondecreasing cut positions in `[0, k]`; block `i` covers
    /// sorted positions `[cuts[i-1], cuts[i])` with implicit 0 and `k` ends.
    pub cuts: Vec<usize>,
    /// Block `i` maps to output `labels[i]`; canonical enumeration uses the
    /// identity labeling.
    pub labels: Vec<usize>,
    pub k: usize,
}

impl ThresholdPartition {
    pub fn new(cuts: Vec<usize>, labels: Vec<usize>, k: usize) -> Result<Self> {
        let l = labels.len();
        if cuts.len() + 1 != l {
            return Err(Error::ParameterRange("cuts/labels length mismatch".into()));
        }
        let mut prev = 0usize;
        for &c in &cuts {
            if c < prev || c > k {
                return Err(Error::ParameterRange(
                    "cuts not nondecreasing in [0,k]".into(),
                ));
            }
            prev = c;
        }
        let mut seen = vec![false; l];
        for &lab in &labels {
            if lab >= l || seen[lab] {
                return Err(Error::ParameterRange("labels not a permutation".into()));
            }
            seen[lab] = true;
        }
        Ok(ThresholdPartition { cuts, labels, k })
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.len()
    }

    /// Block index of sorted position `s`.
    pub fn block_of(&self, s: usize) -> usize {
        self.cuts.iter().take_while(|&&c| c <= s).count()
    }

    /// Relabel blocks with a new output permutation.
    pub fn relabel(&self, labels: Vec<usize>) -> Result<Self> {
        ThresholdPartition::new(self.cuts.clone(), labels, self.k)
    }

    /// The induced deterministic channel on the original alphabet.
    pub fn to_channel(&self, order: &LikelihoodOrder) -> Result<Channel> {
        if order.len() != self.k {
            return Err(Error::SizeMismatch(order.len(), self.k));
        }
        let mut map = vec![0usize; self.k];
        for (s, &orig) in order.perm().iter().enumerate() {
            map[orig] = self.labels[self.block_of(s)];
        }
        Channel::deterministic(&map, self.num_blocks())
    }
}

/// Number of threshold partitions of `[k]` into `l` ordered possibly-empty
/// blocks: `C(k + l - 1, l - 1)`.
pub fn threshold_count(k: usize, l: usize) -> u128 {
    if l == 0 {
        return 0;
    }
    binomial((k + l - 1) as u128, (l - 1) as u128)
}

fn binomial(n: u128, mut r: u128) -> u128 {
    if r > n {
        return 0;
    }
    r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Enumerate every threshold partition of `[k]` into `l` blocks exactly once,
/// in lexicographic cut-vector order, with canonical identity labeling.
pub fn enumerate_threshold(k: usize, l: usize) -> impl Iterator<Item = ThresholdPartition> {
    CompositionIter::new(k, l)
}

/// Like [`enumerate_threshold`], deduplicated up to output relabeling: only
/// partitions whose empty blocks trail are kept.
pub fn enumerate_threshold_dedup(k: usize, l: usize) -> impl Iterator<Item = ThresholdPartition> {
    enumerate_threshold(k, l).filter(|t| {
        let mut sizes = Vec::with_capacity(t.num_blocks());
        let mut prev = 0;
        for &c in &t.cuts {
            sizes.push(c - prev);
            prev = c;
        }
        sizes.push(t.k - prev);
        let first_zero = sizes.iter().position(|&s| s == 0);
        match first_zero {
            None => true,
            Some(z) => sizes[z..].iter().all(|&s| s == 0),
        }
    })
}

struct CompositionIter {
    k: usize,
    l: usize,
    cuts: Option<Vec<usize>>,
}

impl CompositionIter {
    fn new(k: usize, l: usize) -> Self {
        let cuts = if l == 0 {
            None
        } else {
            Some(vec![0; l.saturating_sub(1)])
        };
        CompositionIter { k, l, cuts }
    }
}

impl Iterator for CompositionIter {
    type Item = ThresholdPartition;

    fn next(&mut self) -> Option<ThresholdPartition> {
        let cuts = self.cuts.as_ref()?.clone();
        let part = ThresholdPartition {
            cuts: cuts.clone(),
            labels: (0..self.l).collect(),
            k: self.k,
        };
        // Advance to the next nondecreasing cut vector.
        let mut next = cuts;
        let mut i = next.len();
        loop {
            if i == 0 {
                self.cuts = None;
                break;
            }
            i -= 1;
            if next[i] < self.k {
                let v = next[i] + 1;
                for x in next.iter_mut().skip(i) {
                    *x = v;
                }
                self.cuts = Some(next);
                break;
            }
        }
        Some(part)
    }
}

/// Is `t` a deterministic threshold channel for the pair ordering `order`?
///
/// Implements the betweenness property literally: a violation is a triple
/// with strictly increasing ratios whose outer elements share an output the
/// middle one does not. Elements with equal ratios constrain nothing.
pub fn is_threshold(t: &Channel, order: &LikelihoodOrder) -> Result<bool> {
    let map = t
        .deterministic_map(DET_TOL)
        .ok_or(Error::NotDeterministic(0))?;
    if map.len() != order.len() {
        return Err(Error::SizeMismatch(map.len(), order.len()));
    }
    let groups = ratio_groups(order);
    let l = t.output_size();
    // For each output, the strict interior of its group span must map to it.
    for o in 0..l {
        let gs: Vec<usize> = order
            .perm()
            .iter()
            .enumerate()
            .filter(|(_, &orig)| map[orig] == o)
            .map(|(s, _)| groups[s])
            .collect();
        let (Some(&lo), Some(&hi)) = (gs.iter().min(), gs.iter().max()) else {
            continue;
        };
        for (s, &orig) in order.perm().iter().enumerate() {
            let g = groups[s];
            if g > lo && g < hi && map[orig] != o {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Group id per sorted position; equal ratios share a group.
fn ratio_groups(order: &LikelihoodOrder) -> Vec<usize> {
    let k = order.len();
    let mut groups = vec![0usize; k];
    let mut g = 0;
    for s in 1..k {
        let a = order.ratio(order.perm()[s - 1]);
        let b = order.ratio(order.perm()[s]);
        let equal = match (a.is_infinite(), b.is_infinite()) {
            (true, true) => true,
            (false, false) => a.as_f64() == b.as_f64(),
            _ => false,
        };
        if !equal {
            g += 1;
        }
        groups[s] = g;
    }
    groups
}

/// The binary channel splitting at likelihood ratio 1 (preserves total
/// variation): output 1 iff `p_i >= q_i`.
pub fn scheffe(p: &Distribution, q: &Distribution) -> Result<Channel> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch(p.len(), q.len()));
    }
    let map: Vec<usize> = (0..p.len()).map(|i| usize::from(p[i] >= q[i])).collect();
    Channel::deterministic(&map, 2)
}

/// Two channels averaging to `t` on the pair `(p, q)` while moving `t p`.
#[derive(Clone, Debug)]
pub struct ExtremalityWitness {
    pub t1: Channel,
    pub t2: Channel,
}

impl ExtremalityWitness {
    /// Check the 1/2-mixing identity against `t` on `(p, q)` and that the
    /// first branch actually moves `t p`.
    pub fn verify(
        &self,
        t: &Channel,
        p: &Distribution,
        q: &Distribution,
        tol: f64,
    ) -> Result<bool> {
        let (tp, tq) = (t.apply(p)?, t.apply(q)?);
        let (t1p, t1q) = (self.t1.apply(p)?, self.t1.apply(q)?);
        let (t2p, t2q) = (self.t2.apply(p)?, self.t2.apply(q)?);
        let mut max_res = 0.0f64;
        let mut moved = 0.0f64;
        for r in 0..t.output_size() {
            let rp = 0.5 * t1p[r] + 0.5 * t2p[r] - tp[r];
            let rq = 0.5 * t1q[r] + 0.5 * t2q[r] - tq[r];
            max_res = max_res.max(rp.abs()).max(rq.abs());
            moved = moved.max((t1p[r] - tp[r]).abs());
        }
        Ok(max_res <= tol && moved > tol)
    }
}

/// Constructive witness that `(t p, t q)` is not an extreme point of the
/// joint range, for a deterministic non-threshold `t`.
///
/// Follows the balance construction: with sorted elements `a < b < c`,
/// `t(a) = t(c) = m`, `t(b) = n`, mass `eps_1` moves `a` toward `n` and
/// `eps_2 = eps_1 q_a / q_b` moves `b` toward `m` (so `t1 q = t q`), and the
/// mirrored step on `c` balances `eps_1 q_a (th_b - th_a) = eps_3 q_c (th_c - th_b)`;
/// when `q_c = 0` the second step uses `eps_4 = 0` and balances against `p_c`.
/// Step sizes are the balance solution scaled by half the feasible slack.
///
/// Fails with [`Error::IsThreshold`] if `t` is a threshold channel.
pub fn non_extremality_witness(
    t: &Channel,
    p: &Distribution,
    q: &Distribution,
) -> Result<ExtremalityWitness> {
    let order = LikelihoodOrder::new(p, q)?;
    let map = t
        .deterministic_map(DET_TOL)
        .ok_or(Error::NotDeterministic(0))?;
    if map.len() != p.len() {
        return Err(Error::SizeMismatch(map.len(), p.len()));
    }
    let groups = ratio_groups(&order);
    let perm = order.perm();
    let k = order.len();

    // First violating triple in sorted order: strictly increasing ratios,
    // outer pair shares an output the middle one lacks.
    let mut triple = None;
    'outer: for sa in 0..k {
        for sb in sa + 1..k {
            if groups[sb] == groups[sa] {
                continue;
            }
            for sc in sb + 1..k {
                if groups[sc] == groups[sb] {
                    continue;
                }
                let (a, b, c) = (perm[sa], perm[sb], perm[sc]);
                if map[a] == map[c] && map[a] != map[b] {
                    triple = Some((a, b, c));
                    break 'outer;
                }
            }
        }
    }
    let Some((a, b, c)) = triple else {
        return Err(Error::IsThreshold);
    };
    let (m, n) = (map[a], map[b]);

    let th_a = order.ratio(a).as_f64();
    let th_b = order.ratio(b).as_f64();
    let (qa, qb, qc) = (q[a], q[b], q[c]);
    debug_assert!(qa > 0.0 && qb > 0.0);

    // Unit-step coefficients for (eps1, eps2, eps3, eps4).
    let lhs = qa * (th_b - th_a);
    let (c3, c4) = if qc > 0.0 {
        let th_c = order.ratio(c).as_f64();
        let c3 = lhs / (qc * (th_c - th_b));
        (c3, c3 * qc / qb)
    } else {
        (lhs / p[c], 0.0)
    };
    let coefs = [1.0, qa / qb, c3, c4];
    let max_coef = coefs.iter().cloned().fold(0.0f64, f64::max);
    let step = 0.5 / max_coef;
    let (e1, e2, e3, e4) = (
        step * coefs[0],
        step * coefs[1],
        step * coefs[2],
        step * coefs[3],
    );

    let mut t1 = t.rows();
    t1[m][a] = 1.0 - e1;
    t1[n][a] = e1;
    t1[n][b] = 1.0 - e2;
    t1[m][b] = e2;
    let mut t2 = t.rows();
    t2[m][c] = 1.0 - e3;
    t2[n][c] = e3;
    t2[n][b] = 1.0 - e4;
    t2[m][b] = e4;

    let witness = ExtremalityWitness {
        t1: Channel::new(t1)?,
        t2: Channel::new(t2)?,
    };
    if !witness.verify(t, p, q, 1e-10)? {
        return Err(Error::WitnessFailed(
            "mixing identity residual exceeded tolerance".into(),
        ));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn composition_counts() {
        // k=3, l=2: cuts after 0,1,2,3 sorted elements
        assert_eq!(enumerate_threshold(3, 2).count(), 4);
        // k=5, l=3: stars and bars C(7,2) = 21
        assert_eq!(enumerate_threshold(5, 3).count(), 21);
        assert_eq!(threshold_count(5, 3), 21);
        // k=1: l point-mass channels, 1 canonical after dedup
        assert_eq!(enumerate_threshold(1, 3).count(), 3);
        assert_eq!(enumerate_threshold_dedup(1, 3).count(), 1);
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        let mut seen = std::collections::HashSet::new();
        for t in enumerate_threshold(4, 3) {
            assert!(seen.insert(t.cuts.clone()));
        }
        assert_eq!(seen.len(), threshold_count(4, 3) as usize);
    }

    #[test]
    fn scheffe_is_threshold_and_preserves_tv() {
        let p = dist(&[0.1, 0.3, 0.6]);
        let q = dist(&[0.6, 0.3, 0.1]);
        let t = scheffe(&p, &q).unwrap();
        let order = LikelihoodOrder::new(&p, &q).unwrap();
        assert!(is_threshold(&t, &order).unwrap());
        let tvo = crate::dist::tv(&t.apply(&p).unwrap(), &t.apply(&q).unwrap()).unwrap();
        assert!((tvo - crate::dist::tv(&p, &q).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn non_contiguous_map_is_not_threshold() {
        let p = dist(&[0.1, 0.3, 0.6]);
        let q = dist(&[0.6, 0.3, 0.1]);
        let order = LikelihoodOrder::new(&p, &q).unwrap();
        // sorted order is 0,1,2; map {0,2} -> 0 and {1} -> 1
        let t = Channel::deterministic(&[0, 1, 0], 2).unwrap();
        assert!(!is_threshold(&t, &order).unwrap());
        // identity on [k] with l = k is threshold
        let id = Channel::identity(3);
        assert!(is_threshold(&id, &order).unwrap());
    }

    #[test]
    fn is_threshold_rejects_soft_channels() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.2, 0.8]);
        let order = LikelihoodOrder::new(&p, &q).unwrap();
        let soft = Channel::new(vec![vec![0.6, 0.3], vec![0.4, 0.7]]).unwrap();
        assert!(matches!(
            is_threshold(&soft, &order),
            Err(Error::NotDeterministic(_))
        ));
    }

    #[test]
    fn witness_on_spec_example() {
        let p = dist(&[0.1, 0.3, 0.6]);
        let q = dist(&[0.6, 0.3, 0.1]);
        let t = Channel::deterministic(&[0, 1, 0], 2).unwrap();
        let w = non_extremality_witness(&t, &p, &q).unwrap();
        assert!(w.verify(&t, &p, &q, 1e-10).unwrap());
    }

    #[test]
    fn witness_zero_qc_branch() {
        let p = dist(&[0.2, 0.3, 0.5]);
        let q = dist(&[0.5, 0.5, 0.0]);
        // ratios 0.4 < 0.6 < inf; map {0,2} -> 0, {1} -> 1
        let t = Channel::deterministic(&[0, 1, 0], 2).unwrap();
        let w = non_extremality_witness(&t, &p, &q).unwrap();
        assert!(w.verify(&t, &p, &q, 1e-10).unwrap());
    }

    #[test]
    fn witness_fails_on_threshold() {
        let p = dist(&[0.1, 0.3, 0.6]);
        let q = dist(&[0.6, 0.3, 0.1]);
        let t = Channel::deterministic(&[0, 0, 1], 2).unwrap();
        assert!(matches!(
            non_extremality_witness(&t, &p, &q),
            Err(Error::IsThreshold)
        ));
    }

    #[test]
    fn partition_channel_blocks() {
        let p = dist(&[0.1, 0.3, 0.6]);
        let q = dist(&[0.6, 0.3, 0.1]);
        let order = LikelihoodOrder::new(&p, &q).unwrap();
        let part = ThresholdPartition::new(vec![1], vec![0, 1], 3).unwrap();
        let t = part.to_channel(&order).unwrap();
        // sorted order = original order here; block 0 = {0}, block 1 = {1,2}
        assert_eq!(t.deterministic_map(1e-12), Some(vec![0, 1, 1]));
        assert!(is_threshold(&t, &order).unwrap());
    }
}
