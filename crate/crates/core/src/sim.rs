//! Monte Carlo simulator of the non-interactive private testing protocol:
//! i.i.d. samples pass through one shared channel, the server runs the
//! likelihood ratio test on the outputs, and the summed type-I + type-II
//! error is estimated over independent trials.

use rayon::prelude::*;

use crate::channel::Channel;
use crate::dist::{hellinger_sq, Distribution};
use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// One protocol instance: `n` users observe i.i.d. samples from `p` or `q`,
/// privatize through `channel`, and the server applies the LRT.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub p: Distribution,
    pub q: Distribution,
    pub channel: Channel,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Empirical error estimates; `half_width` is the summed 95% Wilson
/// half-width of the two error rates (normal approximation).
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub type_i: f64,
    pub type_ii: f64,
    pub error_sum: f64,
    pub half_width: f64,
    pub trials: u64,
}

#[derive(Clone, Copy)]
enum Llr {
    Finite(f64),
    PlusInf,
    MinusInf,
}

/// Run the protocol: per trial, draw `n` samples under each hypothesis,
/// pass them through the channel, and decide by the log-likelihood sum
/// (ties toward `p`; outputs impossible under `q` force `p` and vice versa).
/// Trials use independent counter-RNG substreams (`seed`, trial index), so
/// reports are bit-identical across thread counts.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ErrorReport> {
    let k = cfg.p.len();
    if cfg.q.len() != k {
        return Err(Error::SizeMismatch(k, cfg.q.len()));
    }
    if cfg.channel.input_size() != k {
        return Err(Error::SizeMismatch(cfg.channel.input_size(), k));
    }
    if cfg.n == 0 || cfg.trials == 0 {
        return Err(Error::ParameterRange("n and trials must be >= 1".into()));
    }
    let l = cfg.channel.output_size();
    let tp = cfg.channel.apply(&cfg.p)?;
    let tq = cfg.channel.apply(&cfg.q)?;
    let llr: Vec<Llr> = (0..l)
        .map(|y| match (tp[y] > 0.0, tq[y] > 0.0) {
            (true, true) => Llr::Finite((tp[y] / tq[y]).ln()),
            (true, false) => Llr::PlusInf,
            (false, true) => Llr::MinusInf,
            (false, false) => Llr::Finite(0.0),
        })
        .collect();
    // Per-input output CDFs for faithful x -> y sampling.
    let col_cdf: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            let mut acc = 0.0;
            (0..l)
                .map(|r| {
                    acc += cfg.channel.entry(r, c);
                    acc
                })
                .collect()
        })
        .collect();
    let sample_y = |x: usize, u: f64| -> usize {
        let cdf = &col_cdf[x];
        cdf.iter().position(|&c| u < c).unwrap_or(l - 1)
    };
    let decide_p = |rng: &mut CounterRng, src: &Distribution| -> bool {
        let mut sum = 0.0f64;
        let mut plus = false;
        let mut minus = false;
        for _ in 0..cfg.n {
            let x = src.sample(rng.next_f64());
            let y = sample_y(x, rng.next_f64());
            match llr[y] {
                Llr::Finite(v) => sum += v,
                Llr::PlusInf => plus = true,
                Llr::MinusInf => minus = true,
            }
        }
        if plus && !minus {
            true
        } else if minus && !plus {
            false
        } else {
            sum >= 0.0
        }
    };
    let (err_p, err_q) = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = CounterRng::new(cfg.seed, t);
            let e1 = u64::from(!decide_p(&mut rng, &cfg.p));
            let e2 = u64::from(decide_p(&mut rng, &cfg.q));
            (e1, e2)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = cfg.trials as f64;
    let type_i = err_p as f64 / n;
    let type_ii = err_q as f64 / n;
    let half_width = wilson_half_width(type_i, n) + wilson_half_width(type_ii, n);
    Ok(ErrorReport {
        type_i,
        type_ii,
        error_sum: type_i + type_ii,
        half_width,
        trials: cfg.trials,
    })
}

fn wilson_half_width(p_hat: f64, n: f64) -> f64 {
    let z = 1.959963984540054f64;
    let z2 = z * z;
    z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
}

/// Smallest sample size whose empirical error sum plus confidence margin
/// stays at or below `target` (doubling then binary search). Errors out when
/// the channel collapses the pair.
pub fn find_sample_size(
    p: &Distribution,
    q: &Distribution,
    channel: &Channel,
    target: f64,
    trials: u64,
    seed: u64,
) -> Result<usize> {
    let dh2 = hellinger_sq(&channel.apply(p)?, &channel.apply(q)?)?;
    if dh2 <= 0.0 {
        return Err(Error::ZeroDivergence);
    }
    let golden: u64 = 0x9E37_79B9_7F4A_7C15;
    let probe = |n: usize| -> Result<bool> {
        let cfg = ProtocolConfig {
            p: p.clone(),
            q: q.clone(),
            channel: channel.clone(),
            n,
            trials,
            seed: seed ^ (n as u64).wrapping_mul(golden),
        };
        let rep = run_protocol(&cfg)?;
        Ok(rep.error_sum + rep.half_width <= target)
    };
    let mut n = 1usize;
    let cap = 1usize << 34;
    while !probe(n)? {
        n *= 2;
        if n > cap {
            return Err(Error::ParameterRange(format!(
                "no sample size below {cap} reached the target {target}"
            )));
        }
    }
    if n == 1 {
        return Ok(1);
    }
    let (mut lo, mut hi) = (n / 2, n);
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
