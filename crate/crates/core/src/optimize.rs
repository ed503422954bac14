//! Exact maximization of permutation-invariant quasi-convex objectives
//! `g(T p, T q)` over channel families, by enumerating the channels that can
//! attain extreme points of the joint range: threshold channels for
//! communication constraints, and threshold channels into `[2 l^2]` composed
//! with extreme points of the constraint polytope for LP families.
//! A randomized feasible-search oracle provides independent lower bounds.

use rayon::prelude::*;

use crate::channel::Channel;
use crate::dist::{Distribution, LikelihoodOrder};
use crate::error::{Error, Result};
use crate::ldp::{extreme_points_catalog, vertex_enumeration, LpFamily, RdpBinaryFamily};
use crate::rng::CounterRng;
use crate::threshold::{enumerate_threshold, ThresholdPartition};

/// Shipped objectives; all are jointly quasi-convex and permutation-invariant
/// (Hellinger, TV and KL are convex; Renyi orders are quasi-convex).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    HellingerSq,
    Tv,
    Kl,
    Renyi(f64),
    Chernoff,
}

impl Objective {
    pub fn eval(&self, p: &Distribution, q: &Distribution) -> f64 {
        assert_eq!(p.len(), q.len(), "objective operands must have equal size");
        self.eval_slices(p.probs(), q.probs())
    }

    pub(crate) fn eval_slices(&self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            Objective::HellingerSq => crate::dist::hellinger_sq_slices(p, q),
            Objective::Tv => crate::dist::tv_slices(p, q),
            Objective::Kl => crate::dist::kl_slices(p, q),
            Objective::Renyi(a) => crate::dist::renyi_slices(p, q, *a),
            Objective::Chernoff => crate::dist::chernoff_slices(p, q),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Objective::HellingerSq => "hellinger_sq".into(),
            Objective::Tv => "tv".into(),
            Objective::Kl => "kl".into(),
            Objective::Renyi(a) => format!("renyi({a})"),
            Objective::Chernoff => "chernoff".into(),
        }
    }
}

/// How the maximizing channel was assembled.
#[derive(Clone, Debug)]
pub enum Certificate {
    Threshold(ThresholdPartition),
    Decomposition { t1: ThresholdPartition, t2: Channel },
}

impl Certificate {
    /// Rebuild the channel from the certificate parts.
    pub fn recompose(&self, order: &LikelihoodOrder) -> Result<Channel> {
        match self {
            Certificate::Threshold(t) => t.to_channel(order),
            Certificate::Decomposition { t1, t2 } => Channel::compose(t2, &t1.to_channel(order)?),
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Certificate::Threshold(t) => format!(
                "threshold:cuts={}",
                t.cuts
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Certificate::Decomposition { t1, t2 } => format!(
                "decomp:cuts={};l2={}",
                t1.cuts
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                t2.output_size()
            ),
        }
    }
}

/// A maximizer with its objective value and assembly certificate.
#[derive(Clone, Debug)]
pub struct OptResult {
    pub channel: Channel,
    pub value: f64,
    pub certificate: Certificate,
}

/// Exact maximum of `g(T p, T q)` over all channels from `[k]` to `[l]`.
///
/// The search space is the threshold channels of the pair's likelihood
/// ordering; ties break toward the lexicographically smallest cut vector.
pub fn maximize_comm(
    p: &Distribution,
    q: &Distribution,
    l: usize,
    g: Objective,
) -> Result<OptResult> {
    maximize_comm_general(p, q, l, &|a, b| g.eval(a, b), false)
}

/// [`maximize_comm`] for an arbitrary objective closure. With `relabel`,
/// every output labeling of each partition is tried (needed only for
/// permutation-variant objectives; costs an extra `l!` factor).
pub fn maximize_comm_general(
    p: &Distribution,
    q: &Distribution,
    l: usize,
    g: &(dyn Fn(&Distribution, &Distribution) -> f64 + Sync),
    relabel: bool,
) -> Result<OptResult> {
    if l == 0 {
        return Err(Error::ParameterRange("l must be >= 1".into()));
    }
    let order = LikelihoodOrder::new(p, q)?;
    let k = p.len();
    let parts: Vec<ThresholdPartition> = enumerate_threshold(k, l).collect();
    let labelings: Vec<Vec<usize>> = if relabel {
        permutations(l)
    } else {
        vec![(0..l).collect()]
    };
    let evals: Vec<(usize, usize, f64)> = parts
        .par_iter()
        .enumerate()
        .map(|(pi, part)| {
            let mut best = (pi, 0usize, f64::NEG_INFINITY);
            for (li, lab) in labelings.iter().enumerate() {
                let t = part
                    .relabel(lab.clone())
                    .and_then(|pt| pt.to_channel(&order))
                    .expect("valid partition");
                let v = g(&t.apply(p).expect("size"), &t.apply(q).expect("size"));
                if v > best.2 {
                    best = (pi, li, v);
                }
            }
            best
        })
        .collect();
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for &(pi, li, v) in &evals {
        if v > best.2 {
            best = (pi, li, v);
        }
    }
    let part = parts[best.0].relabel(labelings[best.1].clone())?;
    let channel = part.to_channel(&order)?;
    let value = g(&channel.apply(p)?, &channel.apply(q)?);
    Ok(OptResult {
        channel,
        value,
        certificate: Certificate::Threshold(part),
    })
}

fn permutations(l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..l).collect();
    heap_permute(&mut cur, l, &mut out);
    out
}

fn heap_permute(arr: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
    if n == 1 {
        out.push(arr.clone());
        return;
    }
    for i in 0..n {
        heap_permute(arr, n - 1, out);
        if n % 2 == 0 {
            arr.swap(i, n - 1);
        } else {
            arr.swap(0, n - 1);
        }
    }
}

/// Exact maximum of `g(T p, T q)` over the LP family `f`.
///
/// Searches `T = T2 x T1` with `T1` a threshold channel into
/// `m = min(2 l^2, k)` and `T2` an extreme point of the family on `[m]`
/// inputs (catalog when available, vertex enumeration otherwise).
pub fn maximize_private(
    p: &Distribution,
    q: &Distribution,
    f: &LpFamily,
    g: Objective,
) -> Result<OptResult> {
    if f.k() != p.len() {
        return Err(Error::SizeMismatch(f.k(), p.len()));
    }
    let order = LikelihoodOrder::new(p, q)?;
    let k = p.len();
    let l = f.l();
    let m = (2 * l * l).min(k);
    let inner = f.with_input_size(m);
    let t2s: Vec<Channel> = match extreme_points_catalog(&inner, false) {
        Ok(cat) => cat,
        Err(Error::Unsupported(_)) => vertex_enumeration(&inner)?,
        Err(e) => return Err(e),
    };
    let parts: Vec<ThresholdPartition> = enumerate_threshold(k, m).collect();
    // Flattened rows of each candidate extreme point for the inner loop.
    let t2_rows: Vec<Vec<Vec<f64>>> = t2s.iter().map(|t| t.rows()).collect();
    let evals: Vec<(usize, f64)> = parts
        .par_iter()
        .map(|part| {
            let t1 = part.to_channel(&order).expect("valid partition");
            let (t1p, t1q) = (t1.apply(p).expect("size"), t1.apply(q).expect("size"));
            let mut tp = vec![0.0; l];
            let mut tq = vec![0.0; l];
            let mut best = (0usize, f64::NEG_INFINITY);
            for (j, rows) in t2_rows.iter().enumerate() {
                apply_rows(rows, t1p.probs(), &mut tp);
                apply_rows(rows, t1q.probs(), &mut tq);
                let v = g.eval_slices(&tp, &tq);
                if v > best.1 {
                    best = (j, v);
                }
            }
            best
        })
        .collect();
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (pi, &(j, v)) in evals.iter().enumerate() {
        if v > best.2 {
            best = (pi, j, v);
        }
    }
    let t1 = parts[best.0].clone();
    let t2 = t2s[best.1].clone();
    let channel = Channel::compose(&t2, &t1.to_channel(&order)?)?;
    let value = g.eval(&channel.apply(p)?, &channel.apply(q)?);
    Ok(OptResult {
        channel,
        value,
        certificate: Certificate::Decomposition { t1, t2 },
    })
}

/// Feasible set for [`oracle_random_search`].
pub enum OracleConstraint<'a> {
    /// All channels from `[k]` to `[l]`.
    Comm { l: usize },
    /// An LP channel family.
    Lp(&'a LpFamily),
    /// Binary-input binary-output Renyi-private channels.
    RdpBinary(RdpBinaryFamily),
}

impl OracleConstraint<'_> {
    fn output_size(&self, _k: usize) -> usize {
        match self {
            OracleConstraint::Comm { l } => *l,
            OracleConstraint::Lp(f) => f.l(),
            OracleConstraint::RdpBinary(_) => 2,
        }
    }

    /// Feasibility over raw rows, matching channel membership semantics.
    fn feasible_rows(&self, rows: &[Vec<f64>]) -> bool {
        match self {
            OracleConstraint::Comm { .. } => true,
            OracleConstraint::Lp(f) => {
                for (j, row) in rows.iter().enumerate() {
                    let (m, mx) = row_min_max(row);
                    if mx > f.gamma()[j] * m + f.nu()[j] + crate::ldp::MEMBER_TOL {
                        return false;
                    }
                }
                true
            }
            OracleConstraint::RdpBinary(f) => f.feasible(rows[0][0], rows[0][1]),
        }
    }

    fn random_member_rows(&self, k: usize, rng: &mut CounterRng) -> Option<Vec<Vec<f64>>> {
        match self {
            OracleConstraint::Comm { l } => {
                let mut rows = vec![vec![0.0; k]; *l];
                let mut col = vec![0.0; *l];
                for c in 0..k {
                    rng.simplex_fill(&mut col);
                    for (r, &x) in col.iter().enumerate() {
                        rows[r][c] = x;
                    }
                }
                Some(rows)
            }
            OracleConstraint::Lp(f) => {
                let l = f.l();
                let mut rows = vec![vec![0.0; k]; l];
                let mut col = vec![0.0; l];
                for c in 0..k {
                    rng.simplex_fill(&mut col);
                    for (r, &x) in col.iter().enumerate() {
                        rows[r][c] = x;
                    }
                }
                // Project toward feasibility: cap each row at its privacy
                // bound and renormalize columns; if the loop stalls, blend
                // toward the uniform channel with the largest feasible
                // mixing weight (closed form: the row constraint is affine
                // in the blend parameter).
                for _ in 0..4 {
                    if self.feasible_rows(&rows) {
                        return Some(rows);
                    }
                    for j in 0..l {
                        let (m, _) = row_min_max(&rows[j]);
                        let cap = f.gamma()[j] * m + f.nu()[j];
                        for x in rows[j].iter_mut() {
                            if *x > cap {
                                *x = cap;
                            }
                        }
                    }
                    for c in 0..k {
                        let mut s = 0.0;
                        for row in rows.iter() {
                            s += row[c];
                        }
                        if s > 0.0 {
                            for row in rows.iter_mut() {
                                row[c] /= s;
                            }
                        }
                    }
                }
                if !self.feasible_rows(&rows) {
                    let u = 1.0 / l as f64;
                    let mut lam = 1.0f64;
                    for (j, row) in rows.iter().enumerate() {
                        let (m, mx) = row_min_max(row);
                        let a = (mx - u) - f.gamma()[j] * (m - u);
                        let b = (f.gamma()[j] - 1.0) * u + f.nu()[j];
                        if a > 0.0 {
                            lam = lam.min(b / a);
                        } else if b < 0.0 {
                            return None;
                        }
                    }
                    if !(lam >= 0.0) {
                        return None;
                    }
                    let lam = lam.clamp(0.0, 1.0) * (1.0 - 1e-14);
                    for row in rows.iter_mut() {
                        for x in row.iter_mut() {
                            *x = lam * *x + (1.0 - lam) * u;
                        }
                    }
                }
                self.feasible_rows(&rows).then_some(rows)
            }
            OracleConstraint::RdpBinary(f) => {
                let x = rng.next_f64();
                let y = rng.range_f64(f.min_y(x), f.max_y(x));
                Some(vec![vec![x, y], vec![1.0 - x, 1.0 - y]])
            }
        }
    }
}

#[inline]
fn row_min_max(row: &[f64]) -> (f64, f64) {
    let mut m = f64::INFINITY;
    let mut mx = f64::NEG_INFINITY;
    for &x in row {
        if x < m {
            m = x;
        }
        if x > mx {
            mx = x;
        }
    }
    (m, mx)
}

fn apply_rows(rows: &[Vec<f64>], src: &[f64], out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(rows) {
        *o = row.iter().zip(src).map(|(a, b)| a * b).sum();
    }
}

/// Best objective value over `trials` random feasible channels, then a
/// 200-sweep coordinate-ascent polish of the best draw (feasibility-checked
/// mass transfers with geometrically decaying step). A sound lower bound on
/// the true maximum; `trials = 0` returns `-inf`.
pub fn oracle_random_search(
    p: &Distribution,
    q: &Distribution,
    constraint: &OracleConstraint,
    g: Objective,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch(p.len(), q.len()));
    }
    if trials == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let k = p.len();
    if matches!(constraint, OracleConstraint::RdpBinary(_)) && k != 2 {
        return Err(Error::Unsupported("RDP oracle needs a binary pair".into()));
    }
    let pv = p.probs();
    let qv = q.probs();
    let l = constraint.output_size(k);
    let evals: Vec<(f64, Option<Vec<Vec<f64>>>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = CounterRng::new(seed, t);
            let mut tp = vec![0.0; l];
            let mut tq = vec![0.0; l];
            match constraint.random_member_rows(k, &mut rng) {
                Some(rows) => {
                    apply_rows(&rows, pv, &mut tp);
                    apply_rows(&rows, qv, &mut tq);
                    (g.eval_slices(&tp, &tq), Some(rows))
                }
                None => (f64::NEG_INFINITY, None),
            }
        })
        .collect();
    let mut best_v = f64::NEG_INFINITY;
    let mut best_rows: Option<Vec<Vec<f64>>> = None;
    for (v, rows) in evals {
        if v > best_v {
            best_v = v;
            best_rows = rows;
        }
    }
    let Some(mut cur) = best_rows else {
        return Ok(f64::NEG_INFINITY);
    };
    // Polish: single mass transfers within a column, plus paired two-column
    // moves whose slopes follow the privacy constraint boundaries (the
    // maximum usually sits where two constraints meet, and single-coordinate
    // ascent stalls at the first boundary it touches).
    let slopes: Vec<(f64, f64)> = match constraint {
        OracleConstraint::Lp(f) => {
            let mut s = vec![(1.0, 1.0), (1.0, -1.0)];
            for &gam in f.gamma() {
                if !s.contains(&(gam, 1.0)) {
                    s.push((gam, 1.0));
                    s.push((1.0, gam));
                }
            }
            s
        }
        _ => vec![(1.0, 1.0), (1.0, -1.0)],
    };
    let mut cur_v = best_v;
    let mut tp = vec![0.0; l];
    let mut tq = vec![0.0; l];
    let mut saved = [0.0f64; 4];
    let mut try_move = |cur: &mut Vec<Vec<f64>>, cur_v: &mut f64, edits: &[(usize, usize, f64)]| {
        for (s, &(r, c, _)) in saved.iter_mut().zip(edits) {
            *s = cur[r][c];
        }
        let mut applied = 0;
        let mut ok = true;
        for &(r, c, d) in edits {
            let v = cur[r][c] + d;
            if !(0.0..=1.0).contains(&v) {
                ok = false;
                break;
            }
            cur[r][c] = v;
            applied += 1;
        }
        if ok && constraint.feasible_rows(cur) {
            apply_rows(cur, pv, &mut tp);
            apply_rows(cur, qv, &mut tq);
            let v = g.eval_slices(&tp, &tq);
            if v > *cur_v {
                *cur_v = v;
                return;
            }
            applied = edits.len();
        }
        for (s, &(r, c, _)) in saved.iter().zip(edits).take(applied) {
            cur[r][c] = *s;
        }
    };
    for sweep in 0..200 {
        let step = 0.25 * 0.93f64.powi(sweep);
        for c in 0..k {
            for r1 in 0..l {
                for r2 in 0..l {
                    if r1 == r2 {
                        continue;
                    }
                    try_move(&mut cur, &mut cur_v, &[(r1, c, -step), (r2, c, step)]);
                }
            }
        }
        for c1 in 0..k {
            for c2 in c1 + 1..k {
                for r1 in 0..l {
                    for r2 in 0..l {
                        if r1 == r2 {
                            continue;
                        }
                        for &(s1, s2) in &slopes {
                            for sign in [1.0, -1.0] {
                                let d1 = sign * s1 * step;
                                let d2 = sign * s2 * step;
                                try_move(
                                    &mut cur,
                                    &mut cur_v,
                                    &[(r1, c1, d1), (r2, c1, -d1), (r1, c2, d2), (r2, c2, -d2)],
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(cur_v.max(best_v))
}

/// Exact-to-grid maximum of `g` over binary-input binary-output
/// Renyi-private channels composed with binary threshold channels.
///
/// The 2x2 extreme set is approximated by the feasibility boundary
/// `max(D_a(x||y), D_a(y||x)) = eps`, traced on a 1e-4 grid of `x` with
/// bisected `y`, then polished by golden-section around the best grid point.
pub fn rdp_binary_optimize(
    p: &Distribution,
    q: &Distribution,
    eps: f64,
    alpha: f64,
    g: Objective,
) -> Result<OptResult> {
    let fam = RdpBinaryFamily::new(eps, alpha)?;
    let order = LikelihoodOrder::new(p, q)?;
    let k = p.len();
    let parts: Vec<ThresholdPartition> = enumerate_threshold(k, 2).collect();
    let eval_xy = |x: f64, y: f64, bp: &Distribution, bq: &Distribution| -> f64 {
        let rp = [
            (x * bp[0] + y * bp[1]).clamp(0.0, 1.0),
            ((1.0 - x) * bp[0] + (1.0 - y) * bp[1]).clamp(0.0, 1.0),
        ];
        let rq = [
            (x * bq[0] + y * bq[1]).clamp(0.0, 1.0),
            ((1.0 - x) * bq[0] + (1.0 - y) * bq[1]).clamp(0.0, 1.0),
        ];
        g.eval_slices(&rp, &rq)
    };
    const GRID: usize = 10_000;
    // The feasibility boundary is independent of the threshold channel;
    // trace it once.
    let boundary: Vec<(f64, f64)> = (0..=GRID)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / GRID as f64;
            (fam.max_y(x), fam.min_y(x))
        })
        .collect();
    let mut best = (0usize, 0.0f64, 0.0f64, f64::NEG_INFINITY);
    let per_part: Vec<(f64, f64, f64)> = parts
        .par_iter()
        .map(|part| {
            let t1 = part.to_channel(&order).expect("valid partition");
            let (bp, bq) = (t1.apply(p).expect("size"), t1.apply(q).expect("size"));
            let mut loc = (0.0f64, 0.0f64, f64::NEG_INFINITY);
            for (i, &(y_hi, y_lo)) in boundary.iter().enumerate() {
                let x = i as f64 / GRID as f64;
                for y in [y_hi, y_lo] {
                    let v = eval_xy(x, y, &bp, &bq);
                    if v > loc.2 {
                        loc = (x, y, v);
                    }
                }
            }
            loc
        })
        .collect();
    for (pi, &(x, y, v)) in per_part.iter().enumerate() {
        if v > best.3 {
            best = (pi, x, y, v);
        }
    }
    // Golden-section polish on x in a window around the best grid point,
    // following whichever boundary branch won.
    let part = parts[best.0].clone();
    let t1c = part.to_channel(&order)?;
    let (bp, bq) = (t1c.apply(p)?, t1c.apply(q)?);
    let upper_branch = (fam.max_y(best.1) - best.2).abs() <= (fam.min_y(best.1) - best.2).abs();
    let value_at = |x: f64| -> f64 {
        let y = if upper_branch {
            fam.max_y(x)
        } else {
            fam.min_y(x)
        };
        eval_xy(x, y, &bp, &bq)
    };
    let (mut lo, mut hi) = ((best.1 - 2e-4).max(0.0), (best.1 + 2e-4).min(1.0));
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (value_at(x1), value_at(x2));
    while hi - lo > 1e-10 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = value_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = value_at(x2);
        }
    }
    let mut xs = [best.1, 0.5 * (lo + hi)];
    xs.sort_by(|a, b| value_at(*b).partial_cmp(&value_at(*a)).unwrap());
    let x = xs[0];
    let y = if upper_branch {
        fam.max_y(x)
    } else {
        fam.min_y(x)
    };
    let t2 = Channel::new(vec![vec![x, y], vec![1.0 - x, 1.0 - y]])?;
    let channel = Channel::compose(&t2, &t1c)?;
    let value = g.eval(&channel.apply(p)?, &channel.apply(q)?);
    Ok(OptResult {
        channel,
        value,
        certificate: Certificate::Decomposition { t1: part, t2 },
    })
}
