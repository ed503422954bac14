//! Seeded verification suites behind `ldpopt verify`; each prints one line
//! per check and the process exits 1 if anything fails.

use ldpopt_core::construct::*;
use ldpopt_core::ldp::*;
use ldpopt_core::optimize::*;
use ldpopt_core::rng::CounterRng;
use ldpopt_core::sim::*;
use ldpopt_core::threshold::*;
use ldpopt_core::*;

pub struct Report {
    pub failures: u32,
}

impl Report {
    fn new() -> Self {
        Report { failures: 0 }
    }

    fn check(&mut self, suite: &str, name: &str, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("[{suite}] {name}: {verdict} ({detail})");
        if !ok {
            self.failures += 1;
        }
    }
}

fn random_pair(rng: &mut CounterRng, k: usize) -> (Distribution, Distribution) {
    let p = Distribution::new(rng.simplex(k)).unwrap();
    let q = Distribution::new(rng.simplex(k)).unwrap();
    (p, q)
}

fn random_binary_pair(rng: &mut CounterRng) -> (Distribution, Distribution) {
    let x = rng.next_f64() * 0.98;
    let y = (x + 0.01 + rng.next_f64() * (0.99 - x - 0.01)).min(1.0);
    (
        Distribution::bernoulli(x).unwrap(),
        Distribution::bernoulli(y).unwrap(),
    )
}

pub fn run_suite(suite: &str, seed: u64) -> std::result::Result<Report, String> {
    let mut r = Report::new();
    match suite {
        "sdpi" => sdpi(&mut r, seed),
        "extreme-comm" => extreme_comm(&mut r, seed),
        "extreme-ldp" => extreme_ldp(&mut r, seed),
        "free-privacy" => free_privacy(&mut r, seed),
        "sim" => sim(&mut r, seed),
        other => return Err(format!("unknown suite: {other}")),
    }
    Ok(r)
}

fn sdpi(r: &mut Report, seed: u64) {
    let mut rng = CounterRng::new(seed, 1);
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..50 {
        let (p, q) = random_binary_pair(&mut rng);
        for eps in [0.1, 1.0, 10.0f64.ln()] {
            let fam = LpFamily::pure_ldp(2, 2, eps).unwrap();
            let (_, rr_value) = sdpi_binary(&p, &q, eps).unwrap();
            let oracle = oracle_random_search(
                &p,
                &q,
                &OracleConstraint::Lp(&fam),
                Objective::HellingerSq,
                2_000,
                seed ^ i,
            )
            .unwrap();
            worst_gap = worst_gap.max(oracle - rr_value);
        }
    }
    r.check(
        "sdpi",
        "rr-is-argmax",
        worst_gap <= 1e-6,
        format!("max oracle-over-RR gap {worst_gap:.2e}"),
    );
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (p, q) = random_binary_pair(&mut rng);
        let eps = rng.range_f64(0.0, 6.0);
        let rr = randomized_response(2, eps).unwrap();
        let lhs = tv(&rr.apply(&p).unwrap(), &rr.apply(&q).unwrap()).unwrap();
        let rhs = tv(&p, &q).unwrap() * rr_tv_factor(eps);
        worst = worst.max((lhs - rhs).abs());
    }
    r.check(
        "sdpi",
        "tv-contraction-identity",
        worst <= 1e-12,
        format!("max residual {worst:.2e}"),
    );
}

fn extreme_comm(r: &mut Report, seed: u64) {
    let mut rng = CounterRng::new(seed, 2);
    let mut witnesses = 0u32;
    let mut failures = 0u32;
    for _ in 0..10 {
        let k = 3 + rng.next_below(3);
        let (p0, q0) = random_pair(&mut rng, k);
        let can = canonicalize(&p0, &q0).unwrap();
        let (p, q) = (&can.merged_p, &can.merged_q);
        let kk = p.len();
        if kk < 3 {
            continue;
        }
        let order = LikelihoodOrder::new(p, q).unwrap();
        for mask in 0u32..(1 << kk) {
            let map: Vec<usize> = (0..kk).map(|i| (mask >> i & 1) as usize).collect();
            let t = Channel::deterministic(&map, 2).unwrap();
            if is_threshold(&t, &order).unwrap() {
                continue;
            }
            witnesses += 1;
            match non_extremality_witness(&t, p, q) {
                Ok(w) => {
                    if !w.verify(&t, p, q, 1e-10).unwrap() {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    r.check(
        "extreme-comm",
        "witness-battery",
        failures == 0 && witnesses > 0,
        format!("{witnesses} witnesses, {failures} failures"),
    );
    // Threshold maximum dominates random channels.
    let (p, q) = random_pair(&mut rng, 5);
    let best = maximize_comm(&p, &q, 2, Objective::HellingerSq).unwrap();
    let oracle = oracle_random_search(
        &p,
        &q,
        &OracleConstraint::Comm { l: 2 },
        Objective::HellingerSq,
        2_000,
        seed ^ 77,
    )
    .unwrap();
    r.check(
        "extreme-comm",
        "threshold-dominates-random",
        best.value >= oracle - 1e-9,
        format!("threshold {0:.6} oracle {oracle:.6}", best.value),
    );
}

fn extreme_ldp(r: &mut Report, seed: u64) {
    let mut rng = CounterRng::new(seed, 3);
    let cases = [
        LpFamily::pure_ldp(4, 2, 1.0).unwrap(),
        LpFamily::pure_ldp(3, 3, 0.8).unwrap(),
        LpFamily::sldp(3, 2, 0.5, 0.1).unwrap(),
    ];
    let mut bad_b1 = 0u32;
    let mut bad_53 = 0u32;
    let mut total = 0usize;
    for f in &cases {
        let verts = vertex_enumeration(f).unwrap();
        total += verts.len();
        let l = f.l();
        let col_cap = l * (1 << (l - 1));
        for v in &verts {
            if !f.membership(v) {
                bad_b1 += 1;
                continue;
            }
            // At most one entry per column away from the row min/max values.
            for c in 0..f.k() {
                let mut free = 0;
                for j in 0..l {
                    let row = v.row(j);
                    let m = row.iter().cloned().fold(f64::INFINITY, f64::min);
                    let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let e = v.entry(j, c);
                    if (e - m).abs() > 1e-7 && (e - mx).abs() > 1e-7 {
                        free += 1;
                    }
                }
                if free > 1 {
                    bad_b1 += 1;
                }
            }
            if v.unique_columns(1e-9) > col_cap {
                bad_53 += 1;
            }
        }
    }
    r.check(
        "extreme-ldp",
        "vertex-structure",
        bad_b1 == 0 && bad_53 == 0 && total > 0,
        format!("{total} vertices, {bad_b1} free-entry / {bad_53} column-bound violations"),
    );
    // Closure under pre-processing.
    let f = LpFamily::pure_ldp(4, 2, 1.0).unwrap();
    let inner = f.with_input_size(3);
    let mut bad = 0u32;
    for _ in 0..200 {
        let t2 = loop {
            let mut rows = vec![vec![0.0; 3]; 2];
            for c in 0..3 {
                let col = rng.simplex(2);
                rows[0][c] = col[0];
                rows[1][c] = col[1];
            }
            let lam = rng.next_f64();
            for row in rows.iter_mut() {
                for x in row.iter_mut() {
                    *x = lam * *x + (1.0 - lam) * 0.5;
                }
            }
            if let Ok(t) = Channel::new(rows) {
                if inner.membership(&t) {
                    break t;
                }
            }
        };
        let map: Vec<usize> = (0..4).map(|_| rng.next_below(3)).collect();
        let t1 = Channel::deterministic(&map, 3).unwrap();
        let comp = Channel::compose(&t2, &t1).unwrap();
        if !f.membership(&comp) {
            bad += 1;
        }
    }
    r.check(
        "extreme-ldp",
        "closure-under-preprocessing",
        bad == 0,
        format!("{bad} violations in 200 compositions"),
    );
}

fn free_privacy(r: &mut Report, seed: u64) {
    let mut rng = CounterRng::new(seed, 4);
    let mut worst = f64::INFINITY;
    let mut n = 0;
    while n < 10 {
        let k = 2 + rng.next_below(15);
        let (p, q) = random_pair(&mut rng, k);
        let dh2 = hellinger_sq(&p, &q).unwrap();
        if dh2 < 1e-4 {
            continue;
        }
        n += 1;
        let e_eps = (1.0 / dh2) * (1.0 / dh2).ln().max(1.0);
        let eps = e_eps.ln().max(1.0001);
        let t = free_privacy_channel(&p, &q, eps).unwrap();
        let out = hellinger_sq(&t.apply(&p).unwrap(), &t.apply(&q).unwrap()).unwrap();
        worst = worst.min(out / dh2);
    }
    r.check(
        "free-privacy",
        "retained-fraction",
        worst >= 1.0 / 64.0,
        format!("min retained fraction {worst:.4}"),
    );
}

fn sim(r: &mut Report, seed: u64) {
    let mut rng = CounterRng::new(seed, 5);
    let mut worst = 0.0f64;
    let mut n_done = 0;
    while n_done < 5 {
        let k = 2 + rng.next_below(3);
        let (p, q) = random_pair(&mut rng, k);
        let mut rows = vec![vec![0.0; k]; 2];
        for c in 0..k {
            let col = rng.simplex(2);
            rows[0][c] = col[0];
            rows[1][c] = col[1];
        }
        let t = Channel::new(rows).unwrap();
        let dh2 = hellinger_sq(&t.apply(&p).unwrap(), &t.apply(&q).unwrap()).unwrap();
        if dh2 < 5e-3 {
            continue;
        }
        n_done += 1;
        let n = (32.0 / dh2).ceil() as usize;
        let cfg = ProtocolConfig {
            p,
            q,
            channel: t,
            n,
            trials: 2_000,
            seed: seed ^ n_done,
        };
        let rep = run_protocol(&cfg).unwrap();
        worst = worst.max(rep.error_sum);
    }
    r.check(
        "sim",
        "error-at-32-over-h2",
        worst <= 0.1,
        format!("worst error sum {worst:.4}"),
    );
    // Bit-for-bit reproducibility.
    let cfg = ProtocolConfig {
        p: Distribution::bernoulli(0.3).unwrap(),
        q: Distribution::bernoulli(0.7).unwrap(),
        channel: Channel::identity(2),
        n: 16,
        trials: 3_000,
        seed,
    };
    let a = run_protocol(&cfg).unwrap();
    let b = run_protocol(&cfg).unwrap();
    r.check(
        "sim",
        "seed-reproducibility",
        a == b,
        format!("error sums {:.5} / {:.5}", a.error_sum, b.error_sum),
    );
}
