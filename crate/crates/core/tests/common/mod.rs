//! Shared test oracles and generators, independent of the implementation
//! paths they check.

use ldpopt_core::rng::CounterRng;
use ldpopt_core::{Channel, Distribution};

pub fn random_pair(rng: &mut CounterRng, k: usize) -> (Distribution, Distribution) {
    let p = Distribution::new(rng.simplex(k)).unwrap();
    let q = Distribution::new(rng.simplex(k)).unwrap();
    (p, q)
}

pub fn random_binary_pair(rng: &mut CounterRng) -> (Distribution, Distribution) {
    let x = rng.next_f64() * 0.98;
    let y = (x + 0.01 + rng.next_f64() * (0.99 - x - 0.01)).min(1.0);
    (
        Distribution::bernoulli(x).unwrap(),
        Distribution::bernoulli(y).unwrap(),
    )
}

pub fn random_channel(rng: &mut CounterRng, k: usize, l: usize) -> Channel {
    let mut rows = vec![vec![0.0; k]; l];
    for c in 0..k {
        let col = rng.simplex(l);
        for (r, &x) in col.iter().enumerate() {
            rows[r][c] = x;
        }
    }
    Channel::new(rows).unwrap()
}

/// A pair already in canonical position (distinct, well-defined ratios).
pub fn random_canonical_pair(rng: &mut CounterRng, k: usize) -> (Distribution, Distribution) {
    loop {
        let (p, q) = random_pair(rng, k);
        let can = ldpopt_core::canonicalize(&p, &q).unwrap();
        if can.merged_p.len() == k {
            return (can.merged_p, can.merged_q);
        }
    }
}

/// Exact type-I + type-II error of the likelihood-ratio test on `n` i.i.d.
/// outputs of a binary-output channel, by direct summation over the
/// binomial counts (ties decide `p`, matching the simulator).
pub fn exact_binary_lrt_error(tp: &Distribution, tq: &Distribution, n: usize) -> f64 {
    assert_eq!(tp.len(), 2);
    assert_eq!(tq.len(), 2);
    // Log-likelihood contribution of each output symbol.
    #[derive(Clone, Copy)]
    enum L {
        F(f64),
        P,
        M,
    }
    let lift = |a: f64, b: f64| -> L {
        match (a > 0.0, b > 0.0) {
            (true, true) => L::F((a / b).ln()),
            (true, false) => L::P,
            (false, true) => L::M,
            (false, false) => L::F(0.0),
        }
    };
    let l0 = lift(tp[0], tq[0]);
    let l1 = lift(tp[1], tq[1]);
    // decide p given c ones and n-c zeros
    let decide_p = |c: usize| -> bool {
        let mut sum = 0.0;
        let mut plus = false;
        let mut minus = false;
        let mut add = |l: L, times: usize| {
            if times == 0 {
                return;
            }
            match l {
                L::F(v) => sum += v * times as f64,
                L::P => plus = true,
                L::M => minus = true,
            }
        };
        add(l1, c);
        add(l0, n - c);
        if plus && !minus {
            true
        } else if minus && !plus {
            false
        } else {
            sum >= 0.0
        }
    };
    // ln C(n, c) via a cumulative log-factorial table
    let mut lfact = vec![0.0f64; n + 1];
    for i in 1..=n {
        lfact[i] = lfact[i - 1] + (i as f64).ln();
    }
    let ln_pmf = |c: usize, s: f64| -> f64 {
        if s == 0.0 {
            return if c == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if s == 1.0 {
            return if c == n { 0.0 } else { f64::NEG_INFINITY };
        }
        lfact[n] - lfact[c] - lfact[n - c] + c as f64 * s.ln() + (n - c) as f64 * (1.0 - s).ln()
    };
    let mut type_i = 0.0; // P_p(decide q)
    let mut type_ii = 0.0; // P_q(decide p)
    for c in 0..=n {
        let dp = decide_p(c);
        if !dp {
            type_i += ln_pmf(c, tp[1]).exp();
        } else {
            type_ii += ln_pmf(c, tq[1]).exp();
        }
    }
    type_i + type_ii
}

#[allow(dead_code)]
pub fn apply_pair(t: &Channel, p: &Distribution, q: &Distribution) -> (Distribution, Distribution) {
    (t.apply(p).unwrap(), t.apply(q).unwrap())
}
