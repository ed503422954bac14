//! Column-stochastic channels between finite alphabets.

use crate::dist::{Distribution, SUM_TOL};
use crate::error::{Error, Result};

/// A channel from `[k]` to `[l]`, stored as a row-major `l x k` matrix where
/// each column is a distribution over outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    data: Vec<f64>,
    l: usize,
    k: usize,
}

impl Channel {
    /// Validate and build from row-major entries.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let l = rows.len();
        if l == 0 {
            return Err(Error::InvalidChannel("no rows".into()));
        }
        let k = rows[0].len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidChannel("ragged or empty rows".into()));
        }
        let mut data = Vec::with_capacity(l * k);
        for r in &rows {
            data.extend_from_slice(r);
        }
        let ch = Channel { data, l, k };
        ch.validate()?;
        Ok(ch)
    }

    pub fn from_flat(data: Vec<f64>, l: usize, k: usize) -> Result<Self> {
        if data.len() != l * k || l == 0 || k == 0 {
            return Err(Error::InvalidChannel("bad dimensions".into()));
        }
        let ch = Channel { data, l, k };
        ch.validate()?;
        Ok(ch)
    }

    fn validate(&self) -> Result<()> {
        for (i, &x) in self.data.iter().enumerate() {
            if !x.is_finite() || x < -SUM_TOL || x > 1.0 + SUM_TOL {
                return Err(Error::InvalidChannel(format!(
                    "entry ({}, {}) is {x}, expected in [0, 1]",
                    i / self.k,
                    i % self.k
                )));
            }
        }
        for c in 0..self.k {
            let s: f64 = (0..self.l).map(|r| self.entry(r, c)).sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidChannel(format!(
                    "column {c} sums to {s}, expected 1 within {SUM_TOL}"
                )));
            }
        }
        Ok(())
    }

    /// Identity channel on `[k]`.
    pub fn identity(k: usize) -> Self {
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            data[i * k + i] = 1.0;
        }
        Channel { data, l: k, k }
    }

    /// Deterministic channel sending input `i` to `map[i]` in `[l]`.
    pub fn deterministic(map: &[usize], l: usize) -> Result<Self> {
        let k = map.len();
        if k == 0 || l == 0 {
            return Err(Error::InvalidChannel("empty deterministic map".into()));
        }
        if let Some(&bad) = map.iter().find(|&&m| m >= l) {
            return Err(Error::InvalidChannel(format!("map value {bad} >= {l}")));
        }
        let mut data = vec![0.0; l * k];
        for (c, &r) in map.iter().enumerate() {
            data[r * k + c] = 1.0;
        }
        Ok(Channel { data, l, k })
    }

    /// Channel collapsing `[k]` to the point mass at `at` in `[l]`.
    pub fn constant(k: usize, l: usize, at: usize) -> Result<Self> {
        Self::deterministic(&vec![at; k], l)
    }

    pub fn input_size(&self) -> usize {
        self.k
    }

    pub fn output_size(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.k + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.k..(r + 1) * self.k]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.l).map(|r| self.entry(r, c)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.l).map(|r| self.row(r).to_vec()).collect()
    }

    /// Output distribution `T p` (matrix-vector product).
    pub fn apply(&self, p: &Distribution) -> Result<Distribution> {
        if p.len() != self.k {
            return Err(Error::SizeMismatch(self.k, p.len()));
        }
        let mut out = vec![0.0; self.l];
        for (r, o) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut acc = 0.0;
            for (c, &x) in row.iter().enumerate() {
                acc += x * p[c];
            }
            *o = acc;
        }
        // Guard against rounding pushing a coordinate infinitesimally negative.
        for o in out.iter_mut() {
            if *o < 0.0 {
                *o = 0.0;
            }
        }
        Distribution::new(out)
    }

    /// Cascade `t2` after `t1`: the matrix product `t2 x t1`.
    pub fn compose(t2: &Channel, t1: &Channel) -> Result<Channel> {
        if t1.output_size() != t2.input_size() {
            return Err(Error::SizeMismatch(t1.output_size(), t2.input_size()));
        }
        let (l, m, k) = (t2.l, t2.k, t1.k);
        let mut data = vec![0.0; l * k];
        for r in 0..l {
            for c in 0..k {
                let mut acc = 0.0;
                for j in 0..m {
                    acc += t2.entry(r, j) * t1.entry(j, c);
                }
                data[r * k + c] = acc;
            }
        }
        Channel::from_flat(data, l, k)
    }

    /// `Some(map)` iff every column is a point mass within `tol`.
    pub fn deterministic_map(&self, tol: f64) -> Option<Vec<usize>> {
        let mut map = Vec::with_capacity(self.k);
        for c in 0..self.k {
            let mut arg = None;
            for r in 0..self.l {
                let x = self.entry(r, c);
                if (x - 1.0).abs() <= tol {
                    arg = Some(r);
                } else if x.abs() > tol {
                    return None;
                }
            }
            map.push(arg?);
        }
        Some(map)
    }

    /// Number of distinct columns under entrywise tolerance `tol`.
    pub fn unique_columns(&self, tol: f64) -> usize {
        let mut reps: Vec<usize> = Vec::new();
        'cols: for c in 0..self.k {
            for &r in &reps {
                if (0..self.l).all(|row| (self.entry(row, c) - self.entry(row, r)).abs() <= tol) {
                    continue 'cols;
                }
            }
            reps.push(c);
        }
        reps.len()
    }

    /// Permute output labels: row `r` becomes row `perm[r]`.
    pub fn relabel_outputs(&self, perm: &[usize]) -> Result<Channel> {
        if perm.len() != self.l {
            return Err(Error::SizeMismatch(perm.len(), self.l));
        }
        let mut data = vec![0.0; self.l * self.k];
        for r in 0..self.l {
            let dst = perm[r];
            if dst >= self.l {
                return Err(Error::ParameterRange(format!("label {dst} >= {}", self.l)));
            }
            data[dst * self.k..(dst + 1) * self.k].copy_from_slice(self.row(r));
        }
        Channel::from_flat(data, self.l, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::tv;

    #[test]
    fn identity_apply() {
        let p = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let t = Channel::identity(3);
        assert_eq!(t.apply(&p).unwrap().probs(), p.probs());
    }

    #[test]
    fn constant_channel_collapses() {
        let p = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let t = Channel::constant(3, 2, 1).unwrap();
        let out = t.apply(&p).unwrap();
        assert_eq!(out.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn compose_is_sequential_application() {
        let p = Distribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        let q = Distribution::new(vec![0.5, 0.2, 0.3]).unwrap();
        // Scheffe-style grouping then a 2x2 mixer.
        let t1 = Channel::deterministic(&[0, 1, 0], 2).unwrap();
        let t2 = Channel::new(vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
        let t = Channel::compose(&t2, &t1).unwrap();
        for d in [&p, &q] {
            let direct = t.apply(d).unwrap();
            let seq = t2.apply(&t1.apply(d).unwrap()).unwrap();
            for (a, b) in direct.probs().iter().zip(seq.probs()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        // identity neutral on both sides
        let id3 = Channel::identity(3);
        let id2 = Channel::identity(2);
        assert_eq!(Channel::compose(&t1, &id3).unwrap(), t1);
        assert_eq!(Channel::compose(&id2, &t1).unwrap(), t1);
    }

    #[test]
    fn data_processing_sanity() {
        let p = Distribution::new(vec![0.7, 0.3]).unwrap();
        let q = Distribution::new(vec![0.4, 0.6]).unwrap();
        let t = Channel::new(vec![vec![0.9, 0.2], vec![0.1, 0.8]]).unwrap();
        let tp = t.apply(&p).unwrap();
        let tq = t.apply(&q).unwrap();
        assert!(tv(&tp, &tq).unwrap() <= tv(&p, &q).unwrap() + 1e-15);
    }

    #[test]
    fn deterministic_map_roundtrip() {
        let t = Channel::deterministic(&[1, 0, 1], 2).unwrap();
        assert_eq!(t.deterministic_map(1e-12), Some(vec![1, 0, 1]));
        let soft = Channel::new(vec![vec![0.6, 0.0], vec![0.4, 1.0]]).unwrap();
        assert_eq!(soft.deterministic_map(1e-12), None);
    }

    #[test]
    fn unique_columns_counts() {
        let t = Channel::new(vec![vec![0.75, 0.75, 0.25], vec![0.25, 0.25, 0.75]]).unwrap();
        assert_eq!(t.unique_columns(1e-9), 2);
    }

    #[test]
    fn validation_rejects_bad_columns() {
        assert!(Channel::new(vec![vec![0.6, 0.2], vec![0.3, 0.8]]).is_err());
        assert!(Channel::new(vec![vec![1.2], vec![-0.2]]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn channel_strategy(k: usize, l: usize) -> impl Strategy<Value = Channel> {
            prop::collection::vec(prop::collection::vec(1e-3f64..1.0, l), k).prop_map(move |cols| {
                let mut rows = vec![vec![0.0; k]; l];
                for (c, col) in cols.iter().enumerate() {
                    let s: f64 = col.iter().sum();
                    for (r, &x) in col.iter().enumerate() {
                        rows[r][c] = x / s;
                    }
                }
                Channel::new(rows).unwrap()
            })
        }

        fn simplex(k: usize) -> impl Strategy<Value = Distribution> {
            prop::collection::vec(1e-3f64..1.0, k).prop_map(|mut v| {
                let s: f64 = v.iter().sum();
                for x in v.iter_mut() {
                    *x /= s;
                }
                Distribution::new(v).unwrap()
            })
        }

        proptest! {
            #[test]
            fn compose_matches_sequential_apply(
                t1 in channel_strategy(4, 3),
                t2 in channel_strategy(3, 2),
                p in simplex(4),
            ) {
                let t = Channel::compose(&t2, &t1).unwrap();
                let direct = t.apply(&p).unwrap();
                let seq = t2.apply(&t1.apply(&p).unwrap()).unwrap();
                for (a, b) in direct.probs().iter().zip(seq.probs()) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }

            #[test]
            fn apply_preserves_simplex(t in channel_strategy(5, 3), p in simplex(5)) {
                let out = t.apply(&p).unwrap();
                let s: f64 = out.probs().iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!(out.probs().iter().all(|&x| x >= 0.0));
            }
        }
    }
}
