//! `ldpopt`: compute optimal privatization channels for simple binary
//! hypothesis testing under local differential privacy and communication
//! constraints, emit sample-complexity curves, simulate the private testing
//! protocol, and run verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

mod io;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use io::{fmt17, ChannelFile, PairFile};
use ldpopt_core::construct;
use ldpopt_core::ldp::{extreme_points_catalog, randomized_response, vertex_enumeration, LpFamily};
use ldpopt_core::optimize::{
    maximize_comm, maximize_private, rdp_binary_optimize, Certificate, Objective, OptResult,
};
use ldpopt_core::sim::{find_sample_size, run_protocol, ProtocolConfig};
use ldpopt_core::threshold::{enumerate_threshold, enumerate_threshold_dedup};
use ldpopt_core::{canonicalize, Channel, Distribution};

#[derive(Parser)]
#[command(
    name = "ldpopt",
    about = "Optimal privatization channels for binary hypothesis testing under LDP and communication constraints",
    long_about = None,
    version
)]
struct Cli {
    /// Cap on worker threads (fallback: the LDPOPT_THREADS environment variable).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Family {
    /// Communication constraint only.
    Comm,
    /// Pure eps-LDP.
    Ldp,
    /// Singleton-based (eps, delta)-LDP.
    Sldp,
    /// Binary-output (eps, delta)-LDP (requires --l 2).
    Approx2,
    /// Binary Renyi privacy (requires --l 2 and --alpha).
    Rdp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    /// k-ary randomized response.
    Rr,
    /// Ternary pair with prescribed Hellinger and TV divergences.
    WorstPair,
    /// Binary pair with prescribed Hellinger and TV divergences.
    BinaryPair,
    /// Binary strong data-processing channel and its value.
    Sdpi,
    /// Minimax upper-bound channel (binary threshold then randomized response).
    Minimax,
    /// Free-privacy channel (reduction then l-ary randomized response).
    FreePrivacy,
    /// Approximate-LDP channel with a doubled output alphabet.
    ApproxLdp,
    /// Hellinger-retaining reduction to at most l symbols.
    Reduce,
    /// The TV-preserving binary split at likelihood ratio 1.
    Scheffe,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumerateKind {
    /// Threshold partitions/channels of the sorted alphabet.
    Threshold,
    /// Extreme points of the LP family (catalog, else vertex enumeration).
    Extreme,
    /// Vertex enumeration of the LP family polytope.
    Vertices,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximize a divergence over a channel family; prints the channel,
    /// value, and certificate as JSON.
    Optimize {
        /// Pair file: {"p": [...], "q": [...]}.
        #[arg(long)]
        pair: String,
        #[arg(long, value_enum)]
        family: Option<Family>,
        /// Custom LP family file: {"gamma": [...], "nu": [...], "k": k, "l": l}
        /// (overrides --family; k is adjusted to the canonicalized pair).
        #[arg(long = "family-json")]
        family_json: Option<String>,
        /// Privacy parameter (capped at 700 before exponentiation).
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Renyi order for --family rdp.
        #[arg(long)]
        alpha: Option<f64>,
        /// Output alphabet size.
        #[arg(long)]
        l: usize,
        /// hellinger, tv, kl, chernoff, or renyi:ORDER
        #[arg(long, default_value = "hellinger")]
        objective: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Emit a sample-complexity curve as CSV (eps, e_eps, n_hat, certificate).
    Curve {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        nu: f64,
        /// Grid spec in e^eps space: log:START,STOP,POINTS.
        #[arg(long = "eps-grid")]
        eps_grid: String,
        /// Output CSV path ("-" for stdout).
        #[arg(long)]
        out: String,
        /// Use the binary pair construction instead of the ternary one.
        #[arg(long)]
        binary: bool,
    },
    /// Closed-form and constructive channels and pairs.
    Construct {
        #[arg(long, value_enum)]
        kind: ConstructKind,
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Monte Carlo simulation of the private testing protocol.
    Simulate {
        #[arg(long)]
        pair: String,
        /// Channel file: {"matrix": [[...]]}; defaults to the identity.
        #[arg(long)]
        channel: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Search for the smallest n meeting --target instead of a single run.
        #[arg(long = "find-n")]
        find_n: bool,
        #[arg(long, default_value_t = 0.1)]
        target: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Enumerate threshold channels or extreme points (JSON lines).
    Enumerate {
        #[arg(long, value_enum)]
        kind: EnumerateKind,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Deduplicate up to output relabeling.
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a named verification suite; exits 1 on failure.
    Verify {
        /// extreme-comm | extreme-ldp | sdpi | free-privacy | sim
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    init_threads(cli.threads);
    let code = match run(cli.cmd) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("LDPOPT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn parse_objective(name: &str) -> Result<Objective, String> {
    match name {
        "hellinger" | "hellinger_sq" => Ok(Objective::HellingerSq),
        "tv" => Ok(Objective::Tv),
        "kl" => Ok(Objective::Kl),
        "chernoff" => Ok(Objective::Chernoff),
        other => {
            if let Some(rest) = other.strip_prefix("renyi:") {
                let a: f64 = rest
                    .parse()
                    .map_err(|_| format!("bad renyi order: {rest}"))?;
                Ok(Objective::Renyi(a))
            } else {
                Err(format!("unknown objective: {other}"))
            }
        }
    }
}

fn write_out(path: &Option<String>, content: &str) -> Result<(), String> {
    match path.as_deref() {
        None | Some("-") => {
            println!("{content}");
            Ok(())
        }
        Some(p) => std::fs::write(p, format!("{content}\n")).map_err(|e| format!("{p}: {e}")),
    }
}

fn certificate_json(cert: &Certificate) -> serde_json::Value {
    match cert {
        Certificate::Threshold(t) => json!({
            "kind": "threshold",
            "cuts": t.cuts,
            "labels": t.labels,
        }),
        Certificate::Decomposition { t1, t2 } => json!({
            "kind": "decomposition",
            "cuts": t1.cuts,
            "labels": t1.labels,
            "t2": ChannelFile::from_channel(t2).matrix,
        }),
    }
}

fn opt_result_json(res: &OptResult, channel_full: &Channel, merged_k: usize) -> serde_json::Value {
    json!({
        "value": res.value,
        "channel": { "matrix": ChannelFile::from_channel(channel_full).matrix },
        "certificate": certificate_json(&res.certificate),
        "merged_k": merged_k,
    })
}

fn run(cmd: Cmd) -> Result<i32, String> {
    match cmd {
        Cmd::Optimize {
            pair,
            family,
            family_json,
            eps,
            delta,
            alpha,
            l,
            objective,
            out,
        } => {
            let (p, q) = PairFile::load(&pair)?;
            let g = parse_objective(&objective)?;
            if l == 0 {
                return Err("--l must be >= 1".into());
            }
            let can = canonicalize(&p, &q).map_err(|e| e.to_string())?;
            let (mp, mq) = (&can.merged_p, &can.merged_q);
            let kk = mp.len();
            if let Some(path) = family_json {
                let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
                let file: io::FamilyFile =
                    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
                if file.l != l {
                    return Err(format!("family file has l = {}, --l is {l}", file.l));
                }
                let f = LpFamily::new(file.gamma, file.nu, kk).map_err(|e| e.to_string())?;
                let res = maximize_private(mp, mq, &f, g).map_err(|e| e.to_string())?;
                let full =
                    Channel::compose(&res.channel, &can.merge_map).map_err(|e| e.to_string())?;
                write_out(
                    &out,
                    &serde_json::to_string_pretty(&opt_result_json(&res, &full, kk)).unwrap(),
                )?;
                return Ok(0);
            }
            let family = family.ok_or("one of --family or --family-json is required")?;
            let need_eps = || eps.ok_or_else(|| "--eps is required for this family".to_string());
            let need_delta =
                || delta.ok_or_else(|| "--delta is required for this family".to_string());
            let res = match family {
                Family::Comm => maximize_comm(mp, mq, l, g),
                Family::Ldp => {
                    let f = LpFamily::pure_ldp(kk, l, need_eps()?).map_err(|e| e.to_string())?;
                    maximize_private(mp, mq, &f, g)
                }
                Family::Sldp => {
                    let f = LpFamily::sldp(kk, l, need_eps()?, need_delta()?)
                        .map_err(|e| e.to_string())?;
                    maximize_private(mp, mq, &f, g)
                }
                Family::Approx2 => {
                    if l != 2 {
                        return Err("--family approx2 requires --l 2".into());
                    }
                    let f = LpFamily::approx_binary(kk, need_eps()?, need_delta()?)
                        .map_err(|e| e.to_string())?;
                    maximize_private(mp, mq, &f, g)
                }
                Family::Rdp => {
                    if l != 2 {
                        return Err("--family rdp requires --l 2".into());
                    }
                    let a = alpha.ok_or("--alpha is required for --family rdp")?;
                    rdp_binary_optimize(mp, mq, need_eps()?, a, g)
                }
            }
            .map_err(|e| e.to_string())?;
            let full = Channel::compose(&res.channel, &can.merge_map).map_err(|e| e.to_string())?;
            write_out(
                &out,
                &serde_json::to_string_pretty(&opt_result_json(&res, &full, kk)).unwrap(),
            )?;
            Ok(0)
        }
        Cmd::Curve {
            rho,
            nu,
            eps_grid,
            out,
            binary,
        } => {
            let grid = parse_grid(&eps_grid)?;
            let (p, q, l) = if binary {
                let (p, q) = construct::binary_pair(rho, nu).map_err(|e| e.to_string())?;
                (p, q, 2)
            } else {
                let (p, q) = construct::worst_case_pair(rho, nu).map_err(|e| e.to_string())?;
                (p, q, 3)
            };
            let pts = construct::complexity_curve(&p, &q, &grid, l).map_err(|e| e.to_string())?;
            let mut csv = String::from("eps,e_eps,n_hat,certificate\n");
            for pt in &pts {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt17(pt.eps),
                    fmt17(pt.e_eps),
                    fmt17(pt.n_hat),
                    pt.certificate
                ));
            }
            match out.as_str() {
                "-" => print!("{csv}"),
                path => std::fs::write(path, csv).map_err(|e| format!("{out}: {e}"))?,
            }
            Ok(0)
        }
        Cmd::Construct {
            kind,
            pair,
            k,
            l,
            eps,
            delta,
            rho,
            nu,
            out,
        } => {
            let need_pair = || -> Result<(Distribution, Distribution), String> {
                let path = pair.clone().ok_or("--pair is required for this kind")?;
                PairFile::load(&path)
            };
            let need = |v: Option<f64>, name: &str| -> Result<f64, String> {
                v.ok_or_else(|| format!("--{name} is required for this kind"))
            };
            let value = match kind {
                ConstructKind::Rr => {
                    let k = k.ok_or("--k is required")?;
                    let t = randomized_response(k, need(eps, "eps")?).map_err(|e| e.to_string())?;
                    json!({ "channel": { "matrix": t.rows() } })
                }
                ConstructKind::WorstPair => {
                    let (p, q) = construct::worst_case_pair(need(rho, "rho")?, need(nu, "nu")?)
                        .map_err(|e| e.to_string())?;
                    serde_json::to_value(PairFile::from_pair(&p, &q)).unwrap()
                }
                ConstructKind::BinaryPair => {
                    let (p, q) = construct::binary_pair(need(rho, "rho")?, need(nu, "nu")?)
                        .map_err(|e| e.to_string())?;
                    serde_json::to_value(PairFile::from_pair(&p, &q)).unwrap()
                }
                ConstructKind::Sdpi => {
                    let (p, q) = need_pair()?;
                    let e = need(eps, "eps")?;
                    let (t, v) = construct::sdpi_binary(&p, &q, e).map_err(|e| e.to_string())?;
                    json!({
                        "channel": { "matrix": t.rows() },
                        "value": v,
                        "tv_factor": construct::rr_tv_factor(e),
                    })
                }
                ConstructKind::Minimax => {
                    let (p, q) = need_pair()?;
                    let t = construct::minimax_channel(&p, &q, need(eps, "eps")?)
                        .map_err(|e| e.to_string())?;
                    json!({ "channel": { "matrix": t.rows() } })
                }
                ConstructKind::FreePrivacy => {
                    let (p, q) = need_pair()?;
                    let t = construct::free_privacy_channel(&p, &q, need(eps, "eps")?)
                        .map_err(|e| e.to_string())?;
                    json!({ "channel": { "matrix": t.rows() } })
                }
                ConstructKind::ApproxLdp => {
                    let (p, q) = need_pair()?;
                    let t = construct::approx_ldp_channel(
                        &p,
                        &q,
                        need(eps, "eps")?,
                        need(delta, "delta")?,
                    )
                    .map_err(|e| e.to_string())?;
                    json!({ "channel": { "matrix": t.rows() } })
                }
                ConstructKind::Reduce => {
                    let (p, q) = need_pair()?;
                    let l = l.ok_or("--l is required")?;
                    let r = construct::reduce_channel(&p, &q, l).map_err(|e| e.to_string())?;
                    json!({
                        "channel": { "matrix": r.channel.rows() },
                        "branch": format!("{:?}", r.branch),
                    })
                }
                ConstructKind::Scheffe => {
                    let (p, q) = need_pair()?;
                    let t = ldpopt_core::threshold::scheffe(&p, &q).map_err(|e| e.to_string())?;
                    json!({ "channel": { "matrix": t.rows() } })
                }
            };
            write_out(&out, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(0)
        }
        Cmd::Simulate {
            pair,
            channel,
            n,
            trials,
            seed,
            find_n,
            target,
            out,
        } => {
            let (p, q) = PairFile::load(&pair)?;
            let t = match channel {
                Some(path) => ChannelFile::load(&path)?,
                None => Channel::identity(p.len()),
            };
            if find_n {
                let n = find_sample_size(&p, &q, &t, target, trials, seed)
                    .map_err(|e| e.to_string())?;
                write_out(
                    &out,
                    &serde_json::to_string_pretty(&json!({ "n": n })).unwrap(),
                )?;
                return Ok(0);
            }
            let rep = run_protocol(&ProtocolConfig {
                p,
                q,
                channel: t,
                n,
                trials,
                seed,
            })
            .map_err(|e| e.to_string())?;
            let value = json!({
                "type_i": rep.type_i,
                "type_ii": rep.type_ii,
                "error_sum": rep.error_sum,
                "half_width": rep.half_width,
                "trials": rep.trials,
            });
            write_out(&out, &serde_json::to_string_pretty(&value).unwrap())?;
            Ok(0)
        }
        Cmd::Enumerate {
            kind,
            k,
            l,
            eps,
            delta,
            dedup,
            out,
        } => {
            let mut lines = Vec::new();
            match kind {
                EnumerateKind::Threshold => {
                    let parts: Vec<_> = if dedup {
                        enumerate_threshold_dedup(k, l).collect()
                    } else {
                        enumerate_threshold(k, l).collect()
                    };
                    for part in parts {
                        // Channel over the natural input order.
                        let map: Vec<usize> =
                            (0..k).map(|s| part.labels[part.block_of(s)]).collect();
                        let t = Channel::deterministic(&map, l).map_err(|e| e.to_string())?;
                        lines.push(json!({ "cuts": part.cuts, "matrix": t.rows() }).to_string());
                    }
                }
                EnumerateKind::Extreme | EnumerateKind::Vertices => {
                    let e = eps.ok_or("--eps is required")?;
                    let f = match delta {
                        Some(d) => LpFamily::sldp(k, l, e, d),
                        None => LpFamily::pure_ldp(k, l, e),
                    }
                    .map_err(|e| e.to_string())?;
                    let chans = if matches!(kind, EnumerateKind::Vertices) {
                        vertex_enumeration(&f).map_err(|e| e.to_string())?
                    } else {
                        match extreme_points_catalog(&f, dedup) {
                            Ok(c) => c,
                            Err(ldpopt_core::Error::Unsupported(_)) => {
                                vertex_enumeration(&f).map_err(|e| e.to_string())?
                            }
                            Err(e) => return Err(e.to_string()),
                        }
                    };
                    for t in chans {
                        lines.push(json!({ "matrix": t.rows() }).to_string());
                    }
                }
            }
            write_out(&out, &lines.join("\n"))?;
            Ok(0)
        }
        Cmd::Verify { suite, seed } => {
            let report = verify::run_suite(&suite, seed)?;
            if report.failures == 0 {
                println!("all checks passed");
                Ok(0)
            } else {
                println!("{} check(s) failed", report.failures);
                Ok(1)
            }
        }
    }
}

/// Parse `log:<start>,<stop>,<points>` in `e^eps` space.
fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let rest = spec
        .strip_prefix("log:")
        .ok_or_else(|| format!("bad grid spec (expected log:start,stop,points): {spec}"))?;
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("bad grid spec: {spec}"));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad grid start: {}", parts[0]))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid stop: {}", parts[1]))?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad grid points: {}", parts[2]))?;
    if !(start >= 1.0) || stop < start || points == 0 {
        return Err(format!("bad grid range: {spec}"));
    }
    Ok(construct::log_grid(start, stop, points))
}
