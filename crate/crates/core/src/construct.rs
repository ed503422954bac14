//! Closed-form and constructive channels and pairs: the binary strong
//! data-processing channel, worst-case ternary pairs with prescribed
//! divergences, the minimax upper-bound channel, the reduction plus l-ary
//! randomized response used in the free-privacy regime, the approximate-LDP
//! augmentation, and sample-complexity curves.

use rayon::prelude::*;

use crate::channel::Channel;
use crate::dist::{canonicalize, hellinger_sq, Distribution};
use crate::error::{Error, Result};
use crate::ldp::{randomized_response, LpFamily};
use crate::optimize::{maximize_private, Objective, OptResult};
use crate::{exp_eps, EPS_CAP};

/// Bisection: 200 iterations or `|f(x) - target| <= 1e-12`, whichever first.
/// `f` must bracket `target` between `lo` and `hi` (`f(lo) <= target <= f(hi)`).
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - target).abs() <= 1e-12 {
            return mid;
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// `0 < nu < 1/2` and `2 nu^2 <= rho <= nu`, with one-ulp slack at the
/// lower boundary.
fn admissible(rho: f64, nu: f64) -> bool {
    nu > 0.0 && nu < 0.5 && rho >= 2.0 * nu * nu * (1.0 - 1e-12) && rho <= nu
}

/// Exact total-variation contraction factor of the binary randomized
/// response: `(e^eps - 1) / (e^eps + 1)`.
pub fn rr_tv_factor(eps: f64) -> f64 {
    let g = exp_eps(eps);
    (g - 1.0) / (g + 1.0)
}

/// The binary strong data-processing channel: randomized response attains
/// `max d_h^2(T p, T q)` over all eps-LDP channels on a binary pair.
/// Returns the channel and the exact output Hellinger value.
pub fn sdpi_binary(p: &Distribution, q: &Distribution, eps: f64) -> Result<(Channel, f64)> {
    if p.len() != 2 || q.len() != 2 {
        return Err(Error::SizeMismatch(p.len(), 2));
    }
    let rr = randomized_response(2, eps)?;
    let value = hellinger_sq(&rr.apply(p)?, &rr.apply(q)?)?;
    Ok((rr, value))
}

/// Ternary pair with `tv = nu` exactly and `hellinger_sq = rho` (to 1e-9):
/// `p = (0, 1/2, 1/2)`, `q = (2y, 1/2 + nu - 2y, 1/2 - nu)` with `y` found by
/// bisection on `(0, nu/2)`. Admissible range: `0 < nu < 1/2`,
/// `2 nu^2 <= rho <= nu`.
pub fn worst_case_pair(rho: f64, nu: f64) -> Result<(Distribution, Distribution)> {
    if !admissible(rho, nu) {
        return Err(Error::ParameterRange(format!(
            "need 0 < nu < 0.5 and 2 nu^2 <= rho <= nu, got rho = {rho}, nu = {nu}"
        )));
    }
    let g = |y: f64| {
        let t1 = 2.0 * y;
        let d2 = (0.5 + nu - 2.0 * y).sqrt() - 0.5f64.sqrt();
        let d3 = (0.5 - nu).sqrt() - 0.5f64.sqrt();
        t1 + d2 * d2 + d3 * d3
    };
    // The bisection bracket needs g(0) < rho; for nu close to 1/2 the
    // divergence of the y = 0 pair already exceeds 2 nu^2, so the nominal
    // range check is not sufficient.
    if g(0.0) >= rho {
        return Err(Error::ParameterRange(format!(
            "rho = {rho} is below the construction's reachable divergence {} at nu = {nu}",
            g(0.0)
        )));
    }
    let y = bisect(g, 0.0, nu / 2.0, rho);
    let p = Distribution::new(vec![0.0, 0.5, 0.5])?;
    let q = Distribution::new(vec![2.0 * y, 0.5 + nu - 2.0 * y, 0.5 - nu])?;
    Ok((p, q))
}

/// Binary pair with `tv = nu` exactly and `hellinger_sq = rho` (bisection on
/// the smaller parameter). Same admissible range as [`worst_case_pair`].
pub fn binary_pair(rho: f64, nu: f64) -> Result<(Distribution, Distribution)> {
    if !admissible(rho, nu) {
        return Err(Error::ParameterRange(format!(
            "need 0 < nu < 0.5 and 2 nu^2 <= rho <= nu, got rho = {rho}, nu = {nu}"
        )));
    }
    // d_h^2(Ber(x), Ber(x + nu)) decreases in x on [0, (1 - nu)/2].
    let f = |x: f64| {
        let d1 = x.sqrt() - (x + nu).sqrt();
        let d2 = (1.0 - x).sqrt() - (1.0 - x - nu).sqrt();
        d1 * d1 + d2 * d2
    };
    let hi = (1.0 - nu) / 2.0;
    // bisect expects increasing f; flip the sign.
    let x = bisect(|x| -f(x), 0.0, hi, -rho);
    Ok((
        Distribution::bernoulli(x)?,
        Distribution::bernoulli(x + nu)?,
    ))
}

/// Minimax upper-bound channel: the best binary threshold channel followed
/// by the binary randomized response (the Scheffe split and the
/// Hellinger-preserving split are both in the search space).
pub fn minimax_channel(p: &Distribution, q: &Distribution, eps: f64) -> Result<Channel> {
    if eps <= 0.0 {
        return Err(Error::ParameterRange(format!("eps = {eps}")));
    }
    let can = canonicalize(p, q)?;
    let (mp, mq) = (&can.merged_p, &can.merged_q);
    let order = crate::dist::LikelihoodOrder::new(mp, mq)?;
    let rr = randomized_response(2, eps)?;
    let mut best: Option<(f64, Channel)> = None;
    for part in crate::threshold::enumerate_threshold(mp.len(), 2) {
        let t1 = part.to_channel(&order)?;
        let v = hellinger_sq(&rr.apply(&t1.apply(mp)?)?, &rr.apply(&t1.apply(mq)?)?)?;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, t1));
        }
    }
    let (_, t1) = best.expect("nonempty enumeration");
    Channel::compose(&rr, &Channel::compose(&t1, &can.merge_map)?)
}

/// Indices with likelihood ratio in `[1/2, 1)` (set `a`) and `[1, 2]`
/// (set `a_prime`), and their joint Hellinger contribution `tau`.
#[derive(Clone, Debug)]
pub struct ComparableSplit {
    pub a: Vec<usize>,
    pub a_prime: Vec<usize>,
    pub tau: f64,
}

pub fn comparable_split(p: &Distribution, q: &Distribution) -> Result<ComparableSplit> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch(p.len(), q.len()));
    }
    let mut a = Vec::new();
    let mut a_prime = Vec::new();
    let mut tau = 0.0;
    for i in 0..p.len() {
        if q[i] <= 0.0 {
            continue;
        }
        let r = p[i] / q[i];
        if (0.5..1.0).contains(&r) {
            a.push(i);
        } else if (1.0..=2.0).contains(&r) {
            a_prime.push(i);
        } else {
            continue;
        }
        let d = p[i].sqrt() - q[i].sqrt();
        tau += d * d;
    }
    Ok(ComparableSplit { a, a_prime, tau })
}

/// Which branch of the reduction fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceBranch {
    /// `k <= l`: nothing to do.
    Identity,
    /// Comparable contribution below half: best binary threshold channel.
    Binary,
    /// Dyadic bucketing of comparable elements into `kept` buckets + sink.
    Buckets { kept: usize },
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub channel: Channel,
    pub branch: ReduceBranch,
}

/// Reduce the pair to at most `l` symbols while retaining a guaranteed
/// fraction of the Hellinger divergence: either a binary threshold channel
/// (when incomparable elements dominate) or dyadic-delta bucketing of the
/// comparable elements, ranked by retained `sum q_i delta_i^2`, others to a
/// sink.
pub fn reduce_channel(p: &Distribution, q: &Distribution, l: usize) -> Result<Reduction> {
    if l < 2 {
        return Err(Error::ParameterRange(format!("l = {l}, need l >= 2")));
    }
    let k = p.len();
    if k <= l {
        return Ok(Reduction {
            channel: Channel::identity(k),
            branch: ReduceBranch::Identity,
        });
    }
    let split = comparable_split(p, q)?;
    let dh2 = hellinger_sq(p, q)?;
    if split.tau < dh2 / 2.0 {
        let can = canonicalize(p, q)?;
        let best = crate::optimize::maximize_comm(
            &can.merged_p,
            &can.merged_q,
            2,
            Objective::HellingerSq,
        )?;
        return Ok(Reduction {
            channel: Channel::compose(&best.channel, &can.merge_map)?,
            branch: ReduceBranch::Binary,
        });
    }
    // Dyadic buckets of delta_i = |p_i - q_i| / q_i, separately per side.
    let mut buckets: std::collections::BTreeMap<(u8, i32), (Vec<usize>, f64)> =
        std::collections::BTreeMap::new();
    for (side, idxs) in [(0u8, &split.a), (1u8, &split.a_prime)] {
        for &i in idxs {
            let delta = (p[i] - q[i]).abs() / q[i];
            if delta <= 0.0 {
                continue;
            }
            let j = (1.0 / delta).log2().floor() as i32;
            let e = buckets
                .entry((side, j))
                .or_insert_with(|| (Vec::new(), 0.0));
            e.0.push(i);
            e.1 += q[i] * delta * delta;
        }
    }
    let mut ranked: Vec<((u8, i32), (Vec<usize>, f64))> = buckets.into_iter().collect();
    ranked.sort_by(|a, b| {
        b.1 .1
            .partial_cmp(&a.1 .1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    let kept = ranked.len().min(l - 1);
    let sink = kept;
    let mut map = vec![sink; k];
    for (out, (_, (idxs, _))) in ranked.into_iter().take(kept).enumerate() {
        for i in idxs {
            map[i] = out;
        }
    }
    Ok(Reduction {
        channel: Channel::deterministic(&map, kept + 1)?,
        branch: ReduceBranch::Buckets { kept },
    })
}

/// Free-privacy channel: the reduction to
/// `l = min(max(2, ceil(log2(1/d_h^2))), k, floor(e^eps))` symbols followed
/// by the l-ary randomized response (the clamp keeps `l <= e^eps`).
/// Requires `eps > 1` and a non-degenerate pair.
pub fn free_privacy_channel(p: &Distribution, q: &Distribution, eps: f64) -> Result<Channel> {
    if !(eps > 1.0) {
        return Err(Error::ParameterRange(format!("eps = {eps}, need eps > 1")));
    }
    let dh2 = hellinger_sq(p, q)?;
    if dh2 <= 0.0 {
        return Err(Error::ZeroDivergence);
    }
    let k = p.len();
    let by_dh = (1.0 / dh2).log2().ceil().max(2.0);
    let by_eps = exp_eps(eps).floor();
    let l = by_dh.min(k as f64).min(by_eps) as usize;
    let red = reduce_channel(p, q, l.max(2))?;
    let m = red.channel.output_size();
    if m < 2 {
        return Err(Error::ZeroDivergence);
    }
    let rr = randomized_response(m, eps)?;
    Channel::compose(&rr, &red.channel)
}

/// Approximate-LDP channel `[k] -> [2k]`: with probability `1 - delta` apply
/// the best pure-eps binary-output channel, with probability `delta` reveal
/// the input on a disjoint block. Satisfies the exact identity
/// `d_h^2(T'p, T'q) = (1-delta) d_h^2(Tp, Tq) + delta d_h^2(p, q)`.
pub fn approx_ldp_channel(
    p: &Distribution,
    q: &Distribution,
    eps: f64,
    delta: f64,
) -> Result<Channel> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::ParameterRange(format!("delta = {delta}")));
    }
    let k = p.len();
    if k < 2 {
        return Err(Error::ParameterRange("need k >= 2".into()));
    }
    let fam = LpFamily::pure_ldp(k, 2, eps)?;
    let best = maximize_private(p, q, &fam, Objective::HellingerSq)?.channel;
    let mut rows = vec![vec![0.0; k]; 2 * k];
    for c in 0..k {
        rows[0][c] = (1.0 - delta) * best.entry(0, c);
        rows[1][c] = (1.0 - delta) * best.entry(1, c);
        rows[k + c][c] = delta;
    }
    Channel::new(rows)
}

/// One point of a sample-complexity curve.
#[derive(Clone, Debug)]
pub struct CurvePoint {
    pub eps: f64,
    pub e_eps: f64,
    pub n_hat: f64,
    pub certificate: String,
}

/// Sample-complexity proxy at one privacy level: `n_hat = 1 / max d_h^2`
/// with the maximizing channel as certificate.
#[derive(Clone, Debug)]
pub struct SampleComplexityEstimate {
    pub eps: f64,
    pub l: usize,
    pub n_hat: f64,
    pub channel: Channel,
    pub certificate: String,
}

fn best_private_value(
    p: &Distribution,
    q: &Distribution,
    eps: f64,
    l: usize,
) -> Result<(f64, Channel, String)> {
    let k = p.len();
    if k <= 2 {
        let (rr, v) = sdpi_binary(p, q, eps)?;
        return Ok((v, rr, "rr".into()));
    }
    let res: OptResult = if k == 3 && l >= 3 {
        maximize_private(
            p,
            q,
            &LpFamily::pure_ldp(3, 3, eps)?,
            Objective::HellingerSq,
        )?
    } else {
        maximize_private(
            p,
            q,
            &LpFamily::pure_ldp(k, 2, eps)?,
            Objective::HellingerSq,
        )?
    };
    let cert = res.certificate.summary();
    Ok((res.value, res.channel, cert))
}

pub fn sample_complexity_estimate(
    p: &Distribution,
    q: &Distribution,
    eps: f64,
    l: usize,
) -> Result<SampleComplexityEstimate> {
    let (v, channel, certificate) = best_private_value(p, q, eps, l)?;
    let n_hat = if v > 0.0 { 1.0 / v } else { f64::INFINITY };
    Ok(SampleComplexityEstimate {
        eps,
        l,
        n_hat,
        channel,
        certificate,
    })
}

/// Sample-complexity curve over a grid of `e^eps` values (so `eps = ln g`).
/// Binary pairs use the closed form; ternary pairs with `l >= 3` the exact
/// 3x3 catalog; everything else the binary-output decomposition search.
/// Points are independent and computed in parallel, assembled by grid index.
pub fn complexity_curve(
    p: &Distribution,
    q: &Distribution,
    e_eps_grid: &[f64],
    l: usize,
) -> Result<Vec<CurvePoint>> {
    if e_eps_grid.iter().any(|&g| !(g >= 1.0)) {
        return Err(Error::ParameterRange(
            "grid values must satisfy e^eps >= 1".into(),
        ));
    }
    e_eps_grid
        .par_iter()
        .map(|&g| {
            let eps = g.ln().min(EPS_CAP);
            let (v, _, certificate) = best_private_value(p, q, eps, l)?;
            let n_hat = if v > 0.0 { 1.0 / v } else { f64::INFINITY };
            Ok(CurvePoint {
                eps,
                e_eps: g,
                n_hat,
                certificate,
            })
        })
        .collect()
}

/// Smallest grid `eps` whose `n_hat` is within `c_thresh` of the
/// unconstrained proxy `n_inf = 1 / d_h^2(p, q)`.
pub fn free_privacy_threshold(points: &[CurvePoint], n_inf: f64, c_thresh: f64) -> Option<f64> {
    points
        .iter()
        .find(|pt| pt.n_hat <= c_thresh * n_inf)
        .map(|pt| pt.eps)
}

/// Geometric grid from `start` to `stop` with `points` entries.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![start];
    }
    let ratio = (stop / start).ln() / (points - 1) as f64;
    (0..points)
        .map(|i| start * (ratio * i as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::tv;

    #[test]
    fn sdpi_tv_identity_example() {
        let p = Distribution::bernoulli(0.5).unwrap();
        let q = Distribution::bernoulli(0.9).unwrap();
        let eps = 3.0f64.ln();
        let (rr, _) = sdpi_binary(&p, &q, eps).unwrap();
        let tvo = tv(&rr.apply(&p).unwrap(), &rr.apply(&q).unwrap()).unwrap();
        assert!((tvo - 0.2).abs() < 1e-12);
        assert!((rr_tv_factor(eps) - 0.5).abs() < 1e-12);
        // eps = 0 collapses, eps = inf preserves
        assert!(sdpi_binary(&p, &q, 0.0).unwrap().1.abs() < 1e-12);
        let full = hellinger_sq(&p, &q).unwrap();
        assert!((sdpi_binary(&p, &q, f64::INFINITY).unwrap().1 - full).abs() < 1e-9);
    }

    #[test]
    fn worst_case_pair_boundary_rho() {
        // rho = 2 nu^2 sits just above g(0) <= 1.5 nu^2 at moderate nu.
        let nu = 0.1;
        let (p, q) = worst_case_pair(2.0 * nu * nu, nu).unwrap();
        assert!((tv(&p, &q).unwrap() - nu).abs() <= 1e-12);
        assert!((hellinger_sq(&p, &q).unwrap() - 2.0 * nu * nu).abs() <= 1e-9);
    }

    #[test]
    fn worst_case_pair_examples() {
        let (p, q) = worst_case_pair(0.05, 0.1).unwrap();
        assert!((tv(&p, &q).unwrap() - 0.1).abs() <= 1e-12);
        assert!((hellinger_sq(&p, &q).unwrap() - 0.05).abs() <= 1e-9);
        // figure-scale parameters
        let (p, q) = worst_case_pair(1e-8, 1e-5).unwrap();
        assert!((tv(&p, &q).unwrap() - 1e-5).abs() <= 1e-12);
        assert!((hellinger_sq(&p, &q).unwrap() - 1e-8).abs() <= 1e-9);
        // rejects out-of-range parameters
        assert!(worst_case_pair(0.3, 0.1).is_err());
        assert!(worst_case_pair(1e-12, 1e-5).is_err());
        // nu near 1/2: the y = 0 endpoint already exceeds rho = 2 nu^2
        assert!(worst_case_pair(0.497, 0.498).is_err());
    }

    #[test]
    fn binary_pair_hits_targets() {
        let (p, q) = binary_pair(1e-8, 1e-5).unwrap();
        assert!((tv(&p, &q).unwrap() - 1e-5).abs() <= 1e-12);
        assert!((hellinger_sq(&p, &q).unwrap() - 1e-8).abs() <= 1e-9);
    }

    #[test]
    fn minimax_reduces_to_sdpi_on_binary() {
        let p = Distribution::bernoulli(0.2).unwrap();
        let q = Distribution::bernoulli(0.6).unwrap();
        let eps = 1.0;
        let t = minimax_channel(&p, &q, eps).unwrap();
        let v = hellinger_sq(&t.apply(&p).unwrap(), &t.apply(&q).unwrap()).unwrap();
        let (_, want) = sdpi_binary(&p, &q, eps).unwrap();
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn reduce_identity_when_small() {
        let p = Distribution::bernoulli(0.4).unwrap();
        let q = Distribution::bernoulli(0.7).unwrap();
        let r = reduce_channel(&p, &q, 4).unwrap();
        assert_eq!(r.branch, ReduceBranch::Identity);
        assert_eq!(r.channel, Channel::identity(2));
    }

    #[test]
    fn reduce_binary_branch_on_disjoint_supports() {
        let p = Distribution::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let q = Distribution::new(vec![0.0, 0.0, 0.5, 0.5]).unwrap();
        let r = reduce_channel(&p, &q, 3).unwrap();
        assert_eq!(r.branch, ReduceBranch::Binary);
        let out_h =
            hellinger_sq(&r.channel.apply(&p).unwrap(), &r.channel.apply(&q).unwrap()).unwrap();
        let full = hellinger_sq(&p, &q).unwrap();
        assert!(out_h >= 0.5 * full);
        // disjoint supports actually survive a binary split untouched
        assert!((out_h - full).abs() < 1e-12);
    }

    #[test]
    fn reduce_bucket_branch_retains_bound() {
        // All ratios in [1/2, 2], k = 8, l = 4.
        let q = Distribution::new(vec![0.125; 8]).unwrap();
        let deltas = [0.9, 0.45, 0.22, 0.11, -0.4, -0.2, -0.1, -0.05];
        let mut pv: Vec<f64> = (0..8).map(|i| 0.125 * (1.0 + deltas[i])).collect();
        let s: f64 = pv.iter().sum();
        for x in pv.iter_mut() {
            *x /= s;
        }
        let p = Distribution::new(pv).unwrap();
        let l = 4;
        let r = reduce_channel(&p, &q, l).unwrap();
        assert!(matches!(r.branch, ReduceBranch::Buckets { .. }));
        let rp = r.channel.apply(&p).unwrap();
        let rq = r.channel.apply(&q).unwrap();
        let retained = comparable_split(&rp, &rq).unwrap().tau;
        let dh2 = hellinger_sq(&p, &q).unwrap();
        let denom = (8.0f64).min(1.0 + (1.0 / dh2).log2());
        assert!(
            retained >= dh2 * l as f64 / (2.0 * denom),
            "retained {retained} dh2 {dh2} bound {}",
            dh2 * l as f64 / (2.0 * denom)
        );
    }

    #[test]
    fn free_privacy_binary_pair_large_eps() {
        let p = Distribution::bernoulli(0.2).unwrap();
        let q = Distribution::bernoulli(0.8).unwrap();
        let t = free_privacy_channel(&p, &q, 8.0).unwrap();
        let v = hellinger_sq(&t.apply(&p).unwrap(), &t.apply(&q).unwrap()).unwrap();
        let full = hellinger_sq(&p, &q).unwrap();
        assert!(v >= 0.9 * full, "v = {v}, full = {full}");
    }

    #[test]
    fn free_privacy_comparable_heavy_wide_alphabet() {
        // k = 16, every ratio in [1/2, 2], e^eps = 4 / d_h^2.
        let k = 16;
        let q = Distribution::new(vec![1.0 / k as f64; k]).unwrap();
        let mut pv: Vec<f64> = (0..k)
            .map(|i| q[i] * (0.5 + 1.5 * (i as f64 / (k - 1) as f64)))
            .collect();
        let s: f64 = pv.iter().sum();
        for x in pv.iter_mut() {
            *x /= s;
        }
        let p = Distribution::new(pv).unwrap();
        let dh2 = hellinger_sq(&p, &q).unwrap();
        let eps = (4.0 / dh2).ln();
        let t = free_privacy_channel(&p, &q, eps).unwrap();
        let out = hellinger_sq(&t.apply(&p).unwrap(), &t.apply(&q).unwrap()).unwrap();
        assert!(out >= dh2 / 64.0, "retained {out} of {dh2}");
    }

    #[test]
    fn free_privacy_clamps_l_to_e_eps() {
        // e^1.05 ~ 2.86 so l clamps to 2 even though log2(1/dh2) is larger.
        let k = 8;
        let p = Distribution::new(vec![1.0 / k as f64; k]).unwrap();
        let mut qv: Vec<f64> = (0..k).map(|i| 1.0 + 0.2 * (i as f64 / k as f64)).collect();
        let s: f64 = qv.iter().sum();
        for x in qv.iter_mut() {
            *x /= s;
        }
        let q = Distribution::new(qv).unwrap();
        let t = free_privacy_channel(&p, &q, 1.05).unwrap();
        assert!(t.output_size() <= 2);
    }

    #[test]
    fn approx_ldp_exact_identity() {
        let p = Distribution::bernoulli(0.3).unwrap();
        let q = Distribution::bernoulli(0.8).unwrap();
        let eps = 1.0;
        for delta in [0.0, 0.3, 1.0] {
            let t = approx_ldp_channel(&p, &q, eps, delta).unwrap();
            let v = hellinger_sq(&t.apply(&p).unwrap(), &t.apply(&q).unwrap()).unwrap();
            let (_, pure) = sdpi_binary(&p, &q, eps).unwrap();
            let want = (1.0 - delta) * pure + delta * hellinger_sq(&p, &q).unwrap();
            assert!((v - want).abs() < 1e-12, "delta {delta}: {v} vs {want}");
        }
    }

    #[test]
    fn curve_monotone_and_certified() {
        let (p, q) = worst_case_pair(0.05, 0.1).unwrap();
        let grid = log_grid(1.0, 1e4, 20);
        let pts = complexity_curve(&p, &q, &grid, 3).unwrap();
        assert_eq!(pts.len(), 20);
        for w in pts.windows(2) {
            assert!(w[1].n_hat <= w[0].n_hat * (1.0 + 1e-9));
        }
        // e^eps = 1 collapses the pair up to rounding noise.
        assert!(pts[0].n_hat > 1e25);
        assert!(!pts.last().unwrap().certificate.is_empty());
    }

    #[test]
    fn single_point_grid() {
        let p = Distribution::bernoulli(0.2).unwrap();
        let q = Distribution::bernoulli(0.7).unwrap();
        let pts = complexity_curve(&p, &q, &[10.0], 2).unwrap();
        assert_eq!(pts.len(), 1);
        let (_, v) = sdpi_binary(&p, &q, 10.0f64.ln()).unwrap();
        assert!((pts[0].n_hat - 1.0 / v).abs() < 1e-6);
    }

    #[test]
    fn threshold_detection_on_curve() {
        let p = Distribution::bernoulli(0.2).unwrap();
        let q = Distribution::bernoulli(0.7).unwrap();
        let grid = log_grid(1.0, 1e6, 30);
        let pts = complexity_curve(&p, &q, &grid, 2).unwrap();
        let n_inf = 1.0 / hellinger_sq(&p, &q).unwrap();
        let eps_star = free_privacy_threshold(&pts, n_inf, 10.0).unwrap();
        assert!(eps_star > 0.0);
    }
}
