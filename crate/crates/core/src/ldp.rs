//! The LP channel family and its extreme-point machinery: membership,
//! randomized response, catalogs for the special cases with closed forms,
//! generic vertex enumeration at desk scale, tight/loose entry
//! classification, and the forbidden six-entry structure that certifies
//! non-extremality of the joint range.

use crate::channel::Channel;
use crate::dist::{Distribution, LikelihoodOrder};
use crate::error::{Error, Result};
use crate::exp_eps;
use crate::polytope::{channel_polytope_vertices, lp_constraints};
use crate::threshold::ExtremalityWitness;

/// Membership tolerance for the row constraints.
pub const MEMBER_TOL: f64 = 1e-12;
/// Tolerance for unique-column detection and tightness classification.
pub const COLUMN_TOL: f64 = 1e-9;
/// Dimension cap for generic vertex enumeration.
pub const VERTEX_CAP: f64 = 20.0;

/// The constraint set: channels from `[k]` to `[l]` with
/// `T(j,i) <= gamma_j T(j,i') + nu_j` for every row `j` and inputs `i, i'`.
///
/// `gamma_j = e^eps, nu_j = 0` recovers pure eps-LDP; `nu_j = delta` gives
/// singleton-based approximate LDP; `l = 2` with `nu = delta` is exactly
/// binary (eps, delta)-LDP.
#[derive(Clone, Debug, PartialEq)]
pub struct LpFamily {
    gamma: Vec<f64>,
    nu: Vec<f64>,
    k: usize,
}

impl LpFamily {
    pub fn new(gamma: Vec<f64>, nu: Vec<f64>, k: usize) -> Result<Self> {
        if gamma.is_empty() || gamma.len() != nu.len() {
            return Err(Error::ParameterRange("gamma/nu length mismatch".into()));
        }
        if k == 0 {
            return Err(Error::ParameterRange("k must be >= 1".into()));
        }
        if gamma
            .iter()
            .chain(nu.iter())
            .any(|&x| !x.is_finite() || x < 0.0)
        {
            return Err(Error::ParameterRange(
                "gamma and nu must be finite and nonnegative".into(),
            ));
        }
        Ok(LpFamily { gamma, nu, k })
    }

    /// Pure eps-LDP channels from `[k]` to `[l]`.
    pub fn pure_ldp(k: usize, l: usize, eps: f64) -> Result<Self> {
        if eps < 0.0 {
            return Err(Error::ParameterRange(format!("eps = {eps}")));
        }
        let g = exp_eps(eps);
        LpFamily::new(vec![g; l], vec![0.0; l], k)
    }

    /// Singleton-based (eps, delta)-LDP from `[k]` to `[l]`.
    pub fn sldp(k: usize, l: usize, eps: f64, delta: f64) -> Result<Self> {
        if eps < 0.0 || !(0.0..=1.0).contains(&delta) {
            return Err(Error::ParameterRange(format!(
                "eps = {eps}, delta = {delta}"
            )));
        }
        let g = exp_eps(eps);
        LpFamily::new(vec![g; l], vec![delta; l], k)
    }

    /// Binary-output (eps, delta)-LDP (exact for `l = 2`).
    pub fn approx_binary(k: usize, eps: f64, delta: f64) -> Result<Self> {
        Self::sldp(k, 2, eps, delta)
    }

    pub fn l(&self) -> usize {
        self.gamma.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Same row constraints over a different input alphabet.
    pub fn with_input_size(&self, k: usize) -> LpFamily {
        LpFamily {
            gamma: self.gamma.clone(),
            nu: self.nu.clone(),
            k,
        }
    }

    /// `Some(gamma)` iff this is a pure family (all `nu = 0`, equal `gamma`).
    pub fn pure_gamma(&self) -> Option<f64> {
        let g = self.gamma[0];
        if self.nu.iter().all(|&v| v == 0.0) && self.gamma.iter().all(|&x| x == g) {
            Some(g)
        } else {
            None
        }
    }

    /// Row-wise membership check via the min/max reformulation:
    /// `M_j <= gamma_j m_j + nu_j` for every row `j`.
    pub fn membership(&self, t: &Channel) -> bool {
        if t.input_size() != self.k || t.output_size() != self.l() {
            return false;
        }
        for j in 0..self.l() {
            let row = t.row(j);
            let m = row.iter().cloned().fold(f64::INFINITY, f64::min);
            let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if mx > self.gamma[j] * m + self.nu[j] + MEMBER_TOL {
                return false;
            }
        }
        true
    }
}

/// The k-ary randomized response channel: keeps the input with probability
/// `e^eps / (k - 1 + e^eps)`, otherwise uniform over the other symbols.
pub fn randomized_response(k: usize, eps: f64) -> Result<Channel> {
    if k < 2 {
        return Err(Error::ParameterRange(format!(
            "randomized response needs k >= 2, got {k}"
        )));
    }
    if eps < 0.0 {
        return Err(Error::ParameterRange(format!("eps = {eps}")));
    }
    let g = exp_eps(eps);
    let denom = (k - 1) as f64 + g;
    let diag = g / denom;
    let off = 1.0 / denom;
    let mut rows = vec![vec![off; k]; k];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = diag;
    }
    Channel::new(rows)
}

/// Closed-form extreme points of the pure-LDP polytope in the catalogued
/// special cases: `l = 2` (two-type column patterns) and `l = k = 3`.
///
/// With `dedup_rows` the output is reduced modulo output relabeling.
/// Unsupported families return [`Error::Unsupported`]; callers fall through
/// to [`vertex_enumeration`].
pub fn extreme_points_catalog(f: &LpFamily, dedup_rows: bool) -> Result<Vec<Channel>> {
    let Some(g) = f.pure_gamma() else {
        return Err(Error::Unsupported(
            "catalog requires a pure eps-LDP family".into(),
        ));
    };
    let (l, k) = (f.l(), f.k());
    let mut out = Vec::new();
    if l == 2 {
        // Trivial extreme points: one row of ones.
        out.push(Channel::constant(k, 2, 0)?);
        if !dedup_rows {
            out.push(Channel::constant(k, 2, 1)?);
        }
        let a = g / (1.0 + g);
        for mask in 1u64..((1u64 << k) - 1) {
            if dedup_rows {
                let comp = !mask & ((1u64 << k) - 1);
                if comp < mask {
                    continue;
                }
            }
            out.push(two_type_pattern(k, mask, a)?);
        }
        return Ok(out);
    }
    if l == 3 && k == 3 {
        for r in 0..3 {
            out.push(Channel::constant(3, 3, r)?);
            if dedup_rows {
                break;
            }
        }
        // Two nonzero rows: the nonzero rows are extreme points of the
        // binary catalog, embedded into each row pair.
        let a = g / (1.0 + g);
        let row_pairs: &[(usize, usize)] = if dedup_rows {
            &[(0, 1)]
        } else {
            &[(0, 1), (0, 2), (1, 2)]
        };
        for &(r1, r2) in row_pairs {
            for mask in 1u64..7 {
                if dedup_rows {
                    let comp = !mask & 7;
                    if comp < mask {
                        continue;
                    }
                }
                let base = two_type_pattern(3, mask, a)?;
                let mut rows = vec![vec![0.0; 3]; 3];
                rows[r1] = base.row(0).to_vec();
                rows[r2] = base.row(1).to_vec();
                out.push(Channel::new(rows)?);
            }
        }
        // Three nonzero rows: symmetric channels with (1-2a)/a = e^eps and
        // a/(1-2a) = e^eps; the first is the randomized response.
        let a1 = 1.0 / (2.0 + g);
        let a2 = g / (1.0 + 2.0 * g);
        for a in [a1, a2] {
            let sym = symmetric_three(a)?;
            if dedup_rows {
                out.push(sym);
            } else {
                // Full row orbit; column permutations coincide with row
                // permutations for these matrices.
                for perm in permutations_3() {
                    out.push(sym.relabel_outputs(&perm)?);
                }
            }
        }
        return Ok(out);
    }
    Err(Error::Unsupported(format!(
        "no catalog for l = {l}, k = {k}"
    )))
}

fn two_type_pattern(k: usize, mask: u64, a: f64) -> Result<Channel> {
    let mut rows = vec![vec![0.0; k]; 2];
    for c in 0..k {
        let top = if mask >> c & 1 == 1 { a } else { 1.0 - a };
        rows[0][c] = top;
        rows[1][c] = 1.0 - top;
    }
    Channel::new(rows)
}

fn symmetric_three(a: f64) -> Result<Channel> {
    let d = 1.0 - 2.0 * a;
    Channel::new(vec![vec![d, a, a], vec![a, d, a], vec![a, a, d]])
}

fn permutations_3() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ]
}

/// All vertices of the polytope `{column-stochastic} ∩ {row constraints}`,
/// capped at `l * k <= 20`. Columns are renormalized once on extraction.
pub fn vertex_enumeration(f: &LpFamily) -> Result<Vec<Channel>> {
    let (l, k) = (f.l(), f.k());
    let cons = lp_constraints(l, k, f.gamma(), f.nu());
    let verts = channel_polytope_vertices(l, k, &cons, VERTEX_CAP as usize)?;
    let mut out = Vec::with_capacity(verts.len());
    for v in verts {
        let mut rows = vec![vec![0.0; k]; l];
        for r in 0..l {
            for c in 0..k {
                rows[r][c] = v[r * k + c].clamp(0.0, 1.0);
            }
        }
        for c in 0..k {
            let s: f64 = (0..l).map(|r| rows[r][c]).sum();
            for row in rows.iter_mut() {
                row[c] /= s;
            }
        }
        out.push(Channel::new(rows)?);
    }
    Ok(out)
}

/// Tightness class of a channel entry relative to its row constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryClass {
    MaxTight,
    MinTight,
    Loose,
}

/// Classify every entry: max-tight entries sit at the row maximum of a row
/// whose constraint is active, min-tight at the row minimum of such a row.
pub fn classify_entries(f: &LpFamily, t: &Channel) -> Result<Vec<Vec<EntryClass>>> {
    if !f.membership(t) {
        return Err(Error::ParameterRange("channel not in family".into()));
    }
    let (l, k) = (t.output_size(), t.input_size());
    let mut grid = vec![vec![EntryClass::Loose; k]; l];
    for j in 0..l {
        let row = t.row(j);
        let m = row.iter().cloned().fold(f64::INFINITY, f64::min);
        let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bound = f.gamma()[j] * m + f.nu()[j];
        let row_tight = (mx - bound).abs() <= COLUMN_TOL * bound.abs().max(1.0);
        if !row_tight {
            continue;
        }
        for c in 0..k {
            if (row[c] - mx).abs() <= COLUMN_TOL {
                grid[j][c] = EntryClass::MaxTight;
            } else if (row[c] - m).abs() <= COLUMN_TOL {
                grid[j][c] = EntryClass::MinTight;
            }
        }
    }
    Ok(grid)
}

/// Six-entry tightness pattern across two rows and three ratio-ordered
/// columns that forbids `(T p, T q)` from being extreme.
#[derive(Clone, Copy, Debug)]
pub struct ForbiddenPattern {
    pub rows: (usize, usize),
    /// Original input indices with strictly increasing likelihood ratios.
    pub cols: (usize, usize, usize),
}

impl ForbiddenPattern {
    /// Check the six non-tightness conditions against the classification.
    pub fn is_valid(&self, f: &LpFamily, t: &Channel) -> Result<bool> {
        let grid = classify_entries(f, t)?;
        let (r, rp) = self.rows;
        let (i1, i2, i3) = self.cols;
        Ok(grid[r][i1] != EntryClass::MinTight
            && grid[r][i3] != EntryClass::MinTight
            && grid[rp][i2] != EntryClass::MinTight
            && grid[r][i2] != EntryClass::MaxTight
            && grid[rp][i1] != EntryClass::MaxTight
            && grid[rp][i3] != EntryClass::MaxTight)
    }
}

/// Pigeonhole search for a forbidden pattern over the unique columns of `t`,
/// walked in likelihood order. Guaranteed to find one when the number of
/// unique columns exceeds `2 l^2`; the pair should be canonicalized so that
/// ratios strictly increase along `order`.
pub fn find_forbidden(
    f: &LpFamily,
    t: &Channel,
    order: &LikelihoodOrder,
) -> Result<Option<ForbiddenPattern>> {
    if !f.membership(t) {
        return Err(Error::ParameterRange("channel not in family".into()));
    }
    if t.input_size() != order.len() {
        return Err(Error::SizeMismatch(t.input_size(), order.len()));
    }
    let l = t.output_size();
    // Unique columns by first appearance in sorted order.
    let mut uniques: Vec<usize> = Vec::new();
    'next: for &orig in order.perm() {
        for &u in &uniques {
            if (0..l).all(|r| (t.entry(r, orig) - t.entry(r, u)).abs() <= COLUMN_TOL) {
                continue 'next;
            }
        }
        uniques.push(orig);
    }
    // Consecutive disjoint pairs, each labeled by the witness rows (g, h)
    // where the left column strictly exceeds the right one and vice versa.
    let mut seen: std::collections::HashMap<(usize, usize), (usize, usize)> =
        std::collections::HashMap::new();
    let mut it = uniques.chunks_exact(2);
    for pair in &mut it {
        let (ca, cb) = (pair[0], pair[1]);
        let mut g = 0;
        let mut h = 0;
        let mut best_pos = f64::NEG_INFINITY;
        let mut best_neg = f64::INFINITY;
        for r in 0..l {
            let d = t.entry(r, ca) - t.entry(r, cb);
            if d > best_pos {
                best_pos = d;
                g = r;
            }
            if d < best_neg {
                best_neg = d;
                h = r;
            }
        }
        if best_pos <= 0.0 || best_neg >= 0.0 {
            continue;
        }
        if let Some(&(i1, i2)) = seen.get(&(g, h)) {
            return Ok(Some(ForbiddenPattern {
                rows: (g, h),
                cols: (i1, i2, ca),
            }));
        }
        seen.insert((g, h), (ca, cb));
    }
    Ok(None)
}

/// Constructive non-extremality witness from a forbidden pattern: two
/// perturbed members of the family whose images average to `(t p, t q)`.
///
/// Balances `eps q_{i1} (th_2 - th_1) = eps' q_{i2} (th_3 - th_2)`; when
/// `th_3` is infinite the second perturbation drops its compensating step
/// and balances against `p_{i3}`.
pub fn forbidden_witness(
    f: &LpFamily,
    t: &Channel,
    pattern: &ForbiddenPattern,
    p: &Distribution,
    q: &Distribution,
) -> Result<ExtremalityWitness> {
    let (r, rp) = pattern.rows;
    let (i1, i2, i3) = pattern.cols;
    let order = LikelihoodOrder::new(p, q)?;
    let th1 = order.ratio(i1).as_f64();
    let th2 = order.ratio(i2).as_f64();
    let (q1, q2, q3) = (q[i1], q[i2], q[i3]);
    if !(q1 > 0.0 && q2 > 0.0) {
        return Err(Error::WitnessFailed("q must be positive on i1, i2".into()));
    }
    let lhs = q1 * (th2 - th1);
    if !(lhs > 0.0) {
        return Err(Error::WitnessFailed(
            "ratios not strictly increasing".into(),
        ));
    }
    // Unit-step coefficients for (eps, delta, eps', delta').
    let (ce, cd, cep, cdp) = if q3 > 0.0 {
        let th3 = order.ratio(i3).as_f64();
        let cep = lhs / (q2 * (th3 - th2));
        (1.0, q1 / q2, cep, cep * q2 / q3)
    } else {
        (1.0, q1 / q2, 0.0, lhs / p[i3])
    };

    // Headroom of each perturbed entry against the [0, 1] box.
    let moves: [(usize, usize, f64, f64); 8] = [
        (r, i1, -1.0, ce),
        (rp, i1, 1.0, ce),
        (r, i2, 1.0, cd),
        (rp, i2, -1.0, cd),
        (r, i2, 1.0, cep),
        (rp, i2, -1.0, cep),
        (r, i3, -1.0, cdp),
        (rp, i3, 1.0, cdp),
    ];
    let mut step = f64::INFINITY;
    for &(row, col, dir, coef) in &moves {
        if coef == 0.0 {
            continue;
        }
        let e = t.entry(row, col);
        let headroom = if dir < 0.0 { e } else { 1.0 - e };
        step = step.min(headroom / coef);
    }
    if !(step > 0.0) {
        return Err(Error::WitnessFailed(
            "no feasible perturbation headroom".into(),
        ));
    }
    let mut scale = 0.5 * step;
    for _ in 0..64 {
        let (eps, delta, epsp, deltap) = (scale * ce, scale * cd, scale * cep, scale * cdp);
        let mut t1 = t.rows();
        t1[r][i1] -= eps;
        t1[rp][i1] += eps;
        t1[r][i2] += delta;
        t1[rp][i2] -= delta;
        let mut t2 = t.rows();
        t2[r][i2] += epsp;
        t2[rp][i2] -= epsp;
        t2[r][i3] -= deltap;
        t2[rp][i3] += deltap;
        let ok_box = t1
            .iter()
            .chain(t2.iter())
            .flatten()
            .all(|&x| (0.0..=1.0).contains(&x));
        if ok_box {
            let c1 = Channel::new(t1)?;
            let c2 = Channel::new(t2)?;
            if f.membership(&c1) && f.membership(&c2) {
                let w = ExtremalityWitness { t1: c1, t2: c2 };
                if w.verify(t, p, q, 1e-10)? {
                    return Ok(w);
                }
            }
        }
        scale *= 0.5;
    }
    Err(Error::WitnessFailed(
        "perturbation never became feasible".into(),
    ))
}

/// Condition 5.2 perturbation: shift mass between two rows on two columns.
/// Returns the perturbed channel (not necessarily a member; see
/// [`mass_transfer_slack`]).
pub fn mass_transfer(
    t: &Channel,
    rows: (usize, usize),
    cols: (usize, usize),
    eps: f64,
    delta: f64,
) -> Result<Channel> {
    let (r, rp) = rows;
    let (c, cp) = cols;
    let mut m = t.rows();
    m[r][c] -= eps;
    m[rp][c] += eps;
    m[r][cp] += delta;
    m[rp][cp] -= delta;
    Channel::new(m)
}

/// Largest symmetric step `s` (up to `hi`, bisected) such that
/// `mass_transfer(t, rows, cols, s, s)` stays in the family.
pub fn mass_transfer_slack(
    f: &LpFamily,
    t: &Channel,
    rows: (usize, usize),
    cols: (usize, usize),
    hi: f64,
) -> f64 {
    let feasible = |s: f64| -> bool {
        match mass_transfer(t, rows, cols, s, s) {
            Ok(c) => f.membership(&c),
            Err(_) => false,
        }
    };
    if !feasible(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, hi);
    if feasible(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 {
            break;
        }
    }
    lo
}

/// Binary Renyi divergence `D_alpha(Ber(x) || Ber(y))` for `alpha > 1`
/// (including `alpha = inf`).
pub fn d_alpha_binary(x: f64, y: f64, alpha: f64) -> f64 {
    let term = |a: f64, b: f64| -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a.powf(alpha) * b.powf(1.0 - alpha)
        }
    };
    if alpha.is_infinite() {
        let r1 = if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x / y
        };
        let r2 = if 1.0 - x == 0.0 {
            0.0
        } else if 1.0 - y == 0.0 {
            f64::INFINITY
        } else {
            (1.0 - x) / (1.0 - y)
        };
        let m = r1.max(r2);
        return if m.is_infinite() {
            f64::INFINITY
        } else {
            m.ln().max(0.0)
        };
    }
    let s = term(x, y) + term(1.0 - x, 1.0 - y);
    if s.is_infinite() {
        f64::INFINITY
    } else {
        (s.ln() / (alpha - 1.0)).max(0.0)
    }
}

/// Binary-input binary-output Renyi-private channels: both column
/// divergences bounded by `eps`. Not an LP family (the constraint couples
/// entries nonlinearly); used as a predicate plus boundary tracing.
#[derive(Clone, Copy, Debug)]
pub struct RdpBinaryFamily {
    pub eps: f64,
    pub alpha: f64,
}

impl RdpBinaryFamily {
    pub fn new(eps: f64, alpha: f64) -> Result<Self> {
        if eps < 0.0 || !(alpha > 1.0) {
            return Err(Error::ParameterRange(format!(
                "eps = {eps}, alpha = {alpha}"
            )));
        }
        Ok(RdpBinaryFamily { eps, alpha })
    }

    /// Feasibility of the parameter pair `(x, y)` = top-row entries.
    pub fn feasible(&self, x: f64, y: f64) -> bool {
        d_alpha_binary(x, y, self.alpha) <= self.eps + MEMBER_TOL
            && d_alpha_binary(y, x, self.alpha) <= self.eps + MEMBER_TOL
    }

    pub fn is_member(&self, t: &Channel) -> Result<bool> {
        if t.input_size() != 2 || t.output_size() != 2 {
            return Err(Error::SizeMismatch(t.input_size(), 2));
        }
        Ok(self.feasible(t.entry(0, 0), t.entry(0, 1)))
    }

    /// Largest feasible `y >= x` (the upper boundary of the feasible region).
    pub fn max_y(&self, x: f64) -> f64 {
        if self.feasible(x, 1.0) {
            return 1.0;
        }
        let (mut lo, mut hi) = (x, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(x, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 {
                break;
            }
        }
        lo
    }

    /// Smallest feasible `y <= x` (the lower boundary).
    pub fn min_y(&self, x: f64) -> f64 {
        if self.feasible(x, 0.0) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, x);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(x, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 {
                break;
            }
        }
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn rr_matrix_values() {
        let t = randomized_response(2, 3.0f64.ln()).unwrap();
        assert!((t.entry(0, 0) - 0.75).abs() < 1e-12);
        assert!((t.entry(0, 1) - 0.25).abs() < 1e-12);
        assert!((t.entry(1, 1) - 0.75).abs() < 1e-12);
        // eps = 0: uniform
        let u = randomized_response(4, 0.0).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert!((u.entry(r, c) - 0.25).abs() < 1e-15);
            }
        }
        // eps capped: identity within 1e-12
        let id = randomized_response(3, f64::INFINITY).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((id.entry(r, c) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rr_on_bernoulli_zero() {
        let t = randomized_response(2, 3.0f64.ln()).unwrap();
        let p = Distribution::bernoulli(0.0).unwrap();
        let out = t.apply(&p).unwrap();
        // p' = (p (e^eps - 1) + 1) / (1 + e^eps) = 1/4
        assert!((out.probs()[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn membership_examples() {
        let eps = 1.2;
        let f = LpFamily::pure_ldp(3, 3, eps).unwrap();
        assert!(f.membership(&randomized_response(3, eps).unwrap()));
        assert!(!f.membership(&Channel::identity(3)));
        // deterministic channel passes when nu = 1 (vacuous constraints)
        let vac = LpFamily::new(vec![1.0, 1.0], vec![1.0, 1.0], 3).unwrap();
        assert!(vac.membership(&Channel::deterministic(&[0, 1, 0], 2).unwrap()));
    }

    #[test]
    fn catalog_counts_l2() {
        let f = LpFamily::pure_ldp(3, 2, 3.0f64.ln()).unwrap();
        let all = extreme_points_catalog(&f, false).unwrap();
        // 2 trivial + (2^3 - 2) patterns
        assert_eq!(all.len(), 8);
        let nontrivial: Vec<_> = all
            .iter()
            .filter(|t| t.deterministic_map(1e-12).is_none())
            .collect();
        assert_eq!(nontrivial.len(), 6);
        for t in &nontrivial {
            for c in 0..3 {
                let e = t.entry(0, c);
                assert!((e - 0.75).abs() < 1e-12 || (e - 0.25).abs() < 1e-12);
            }
        }
        // k = 2: exactly one nontrivial pattern up to row swap = RR
        let f2 = LpFamily::pure_ldp(2, 2, 3.0f64.ln()).unwrap();
        let dd = extreme_points_catalog(&f2, true).unwrap();
        let nontrivial: Vec<_> = dd
            .iter()
            .filter(|t| t.deterministic_map(1e-12).is_none())
            .collect();
        assert_eq!(nontrivial.len(), 1);
        let rr = randomized_response(2, 3.0f64.ln()).unwrap();
        let got = nontrivial[0];
        let same = (0..2).all(|r| (0..2).all(|c| (got.entry(r, c) - rr.entry(r, c)).abs() < 1e-12));
        let swapped =
            (0..2).all(|r| (0..2).all(|c| (got.entry(r, c) - rr.entry(1 - r, c)).abs() < 1e-12));
        assert!(same || swapped);
    }

    #[test]
    fn catalog_l3_contains_rr() {
        let eps = 0.8;
        let f = LpFamily::pure_ldp(3, 3, eps).unwrap();
        let cat = extreme_points_catalog(&f, false).unwrap();
        assert_eq!(cat.len(), 3 + 18 + 12);
        let rr = randomized_response(3, eps).unwrap();
        let found = cat.iter().any(|t| {
            (0..3).all(|r| (0..3).all(|c| (t.entry(r, c) - rr.entry(r, c)).abs() < 1e-12))
        });
        assert!(found);
        for t in &cat {
            assert!(f.membership(t));
        }
    }

    #[test]
    fn vertex_enum_matches_catalog_2x2() {
        let eps = 1.0f64;
        let f = LpFamily::pure_ldp(2, 2, eps).unwrap();
        let mut verts = vertex_enumeration(&f).unwrap();
        let mut cat = extreme_points_catalog(&f, false).unwrap();
        let key = |t: &Channel| {
            let mut v: Vec<i64> = Vec::new();
            for r in 0..2 {
                for c in 0..2 {
                    v.push((t.entry(r, c) * 1e9).round() as i64);
                }
            }
            v
        };
        verts.sort_by_key(&key);
        cat.sort_by_key(&key);
        assert_eq!(verts.len(), cat.len());
        for (a, b) in verts.iter().zip(&cat) {
            assert_eq!(key(a), key(b));
        }
    }

    #[test]
    fn vertex_enum_matches_catalog_3x3() {
        let f = LpFamily::pure_ldp(3, 3, 0.9).unwrap();
        let verts = vertex_enumeration(&f).unwrap();
        let cat = extreme_points_catalog(&f, false).unwrap();
        assert_eq!(verts.len(), cat.len());
        let close = |a: &Channel, b: &Channel| {
            (0..3).all(|r| (0..3).all(|c| (a.entry(r, c) - b.entry(r, c)).abs() < 1e-7))
        };
        for v in &verts {
            assert!(
                cat.iter().any(|c| close(v, c)),
                "vertex missing from catalog"
            );
        }
    }

    #[test]
    fn unconstrained_vertices_are_deterministic() {
        let f = LpFamily::new(vec![1.0, 1.0], vec![1.0, 1.0], 3).unwrap();
        let verts = vertex_enumeration(&f).unwrap();
        assert_eq!(verts.len(), 8);
        for v in &verts {
            assert!(v.deterministic_map(1e-9).is_some());
        }
    }

    #[test]
    fn classify_rr_all_tight() {
        let eps = 1.0;
        let f = LpFamily::pure_ldp(2, 2, eps).unwrap();
        let rr = randomized_response(2, eps).unwrap();
        let grid = classify_entries(&f, &rr).unwrap();
        let flat: Vec<_> = grid.iter().flatten().collect();
        assert!(flat.iter().all(|&&e| e != EntryClass::Loose));
        // and no forbidden pattern on such a small channel
        let p = Distribution::bernoulli(0.3).unwrap();
        let q = Distribution::bernoulli(0.6).unwrap();
        let ord = LikelihoodOrder::new(&p, &q).unwrap();
        assert!(find_forbidden(&f, &rr, &ord).unwrap().is_none());
    }

    #[test]
    fn forbidden_pattern_found_on_many_columned_channel() {
        // k = 10 columns spread strictly inside the privacy band: every
        // column unique and nothing tight, so a pattern must appear.
        let eps = 1.0f64;
        let k = 10;
        let f = LpFamily::pure_ldp(k, 2, eps).unwrap();
        let mut rng = CounterRng::from_seed(42);
        let mut rows = vec![vec![0.0; k]; 2];
        for c in 0..k {
            let x = 0.45 + 0.1 * rng.next_f64();
            rows[0][c] = x;
            rows[1][c] = 1.0 - x;
        }
        let t = Channel::new(rows).unwrap();
        assert!(f.membership(&t));
        let mut p = vec![0.0; k];
        let mut q = vec![0.0; k];
        for i in 0..k {
            p[i] = (i + 1) as f64;
            q[i] = (k - i) as f64;
        }
        let ps: f64 = p.iter().sum();
        let qs: f64 = q.iter().sum();
        let p = Distribution::new(p.iter().map(|x| x / ps).collect()).unwrap();
        let q = Distribution::new(q.iter().map(|x| x / qs).collect()).unwrap();
        let ord = LikelihoodOrder::new(&p, &q).unwrap();
        let pat = find_forbidden(&f, &t, &ord).unwrap().expect("pattern");
        assert!(pat.is_valid(&f, &t).unwrap());
        let w = forbidden_witness(&f, &t, &pat, &p, &q).unwrap();
        assert!(w.verify(&t, &p, &q, 1e-10).unwrap());
        assert!(f.membership(&w.t1) && f.membership(&w.t2));
    }

    #[test]
    fn deterministic_threshold_has_no_pattern() {
        let f = LpFamily::new(vec![2.0, 2.0], vec![1.0, 1.0], 4).unwrap();
        let t = Channel::deterministic(&[0, 0, 1, 1], 2).unwrap();
        let p = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let q = Distribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let ord = LikelihoodOrder::new(&p, &q).unwrap();
        assert!(find_forbidden(&f, &t, &ord).unwrap().is_none());
    }

    #[test]
    fn rdp_limits() {
        // alpha -> inf coincides with pure eps-LDP on 2x2
        let eps = 0.7;
        let fam = RdpBinaryFamily::new(eps, f64::INFINITY).unwrap();
        let g = eps.exp();
        let mut rng = CounterRng::from_seed(5);
        for _ in 0..200 {
            let x = rng.next_f64();
            let y = rng.next_f64();
            let ldp = x <= g * y + 1e-12
                && y <= g * x + 1e-12
                && (1.0 - x) <= g * (1.0 - y) + 1e-12
                && (1.0 - y) <= g * (1.0 - x) + 1e-12;
            assert_eq!(fam.feasible(x, y), ldp, "x={x} y={y}");
        }
        // (eps, 0)-SLDP is pure LDP
        let a = LpFamily::sldp(3, 2, eps, 0.0).unwrap();
        let b = LpFamily::pure_ldp(3, 2, eps).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rdp_rr_feasibility_by_bisection() {
        // Largest t with RR(2, t) feasible for (eps = 0.5, alpha = 2),
        // cross-checked against the closed-form D_2 curve.
        let fam = RdpBinaryFamily::new(0.5, 2.0).unwrap();
        let feasible_t = |t: f64| {
            let rr = randomized_response(2, t).unwrap();
            fam.is_member(&rr).unwrap()
        };
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        assert!(feasible_t(lo) && !feasible_t(hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if feasible_t(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Oracle: solve ln(a^2/(1-a) + (1-a)^2/a) = 0.5 with a = e^t/(1+e^t).
        let d2 = |t: f64| {
            let a = t.exp() / (1.0 + t.exp());
            (a * a / (1.0 - a) + (1.0 - a) * (1.0 - a) / a).ln()
        };
        let (mut l2, mut h2) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (l2 + h2);
            if d2(mid) <= 0.5 {
                l2 = mid;
            } else {
                h2 = mid;
            }
        }
        assert!((lo - l2).abs() < 1e-9, "bisection {lo} vs closed form {l2}");
    }

    #[test]
    fn mass_transfer_stays_feasible_up_to_slack() {
        let eps = 1.0;
        let f = LpFamily::pure_ldp(3, 2, eps).unwrap();
        let a = eps.exp() / (1.0 + eps.exp());
        // Strictly interior channel: nothing tight.
        let t = Channel::new(vec![
            vec![0.5 * a + 0.25, 0.45, 0.6 * a],
            vec![0.75 - 0.5 * a, 0.55, 1.0 - 0.6 * a],
        ])
        .unwrap();
        assert!(f.membership(&t));
        let s = mass_transfer_slack(&f, &t, (0, 1), (0, 1), 0.5);
        assert!(s > 0.0);
        let perturbed = mass_transfer(&t, (0, 1), (0, 1), s * 0.999, s * 0.999).unwrap();
        assert!(f.membership(&perturbed));
    }
}
