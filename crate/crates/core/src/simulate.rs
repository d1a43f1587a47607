//! Random subgraphs of `K_x` from a stochastic block model, and the empirical
//! distribution of `n(G)` over them.
//!
//! Sample `r` of a configuration draws from a ChaCha8 generator seeded with
//! `seed` and switched to stream `r`, so every sample is reproducible on its
//! own and samples can be evaluated in any order. Each admissible pair of
//! `K_x` consumes one uniform deviate `u` in `[0, 1)`, in [`BlowupGraph::edges`]
//! order, and is kept iff `u < p`. Equal seeds therefore couple samples across
//! different values of `p`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{exact_solve, ExactConfig, GeneralGraph};
use crate::lp::solve_lp;
use crate::skeleton::{blow_up, BlowupGraph, NodeAllocation, SkeletonGraph};

/// Edge probability, either fixed or a function of the vertex count `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PRule {
    Constant(f64),
    /// `n^-0.5`
    InvSqrt,
    /// `n^-0.4`
    InvPow04,
    /// `ln(n)/n`
    LogOverN,
    /// `4 ln(n)/n`
    FourLogOverN,
    /// `6 ln(n)/n`
    SixLogOverN,
}

impl PRule {
    /// Named rules in increasing order of their value at `n = 56`.
    pub const NAMED: [PRule; 5] = [
        PRule::LogOverN,
        PRule::InvSqrt,
        PRule::InvPow04,
        PRule::FourLogOverN,
        PRule::SixLogOverN,
    ];

    pub fn evaluate(&self, n: u64) -> f64 {
        let nf = n as f64;
        let log_over_n = if n == 0 { 0.0 } else { nf.ln() / nf };
        let p = match *self {
            PRule::Constant(p) => p,
            PRule::InvSqrt => nf.powf(-0.5),
            PRule::InvPow04 => nf.powf(-0.4),
            PRule::LogOverN => log_over_n,
            PRule::FourLogOverN => 4.0 * log_over_n,
            PRule::SixLogOverN => 6.0 * log_over_n,
        };
        p.clamp(0.0, 1.0)
    }

    pub fn label(&self) -> String {
        match *self {
            PRule::Constant(p) => format!("{p}"),
            PRule::InvSqrt => "n^-0.5".into(),
            PRule::InvPow04 => "n^-0.4".into(),
            PRule::LogOverN => "log(n)/n".into(),
            PRule::FourLogOverN => "4log(n)/n".into(),
            PRule::SixLogOverN => "6log(n)/n".into(),
        }
    }
}

impl fmt::Display for PRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '*' && *c != '·')
            .collect::<String>()
            .to_ascii_lowercase()
            .replace("ln", "log");
        let rule = match key.as_str() {
            "n^-0.5" | "n^(-0.5)" | "n^-1/2" => PRule::InvSqrt,
            "n^-0.4" | "n^(-0.4)" => PRule::InvPow04,
            "log(n)/n" | "logn/n" => PRule::LogOverN,
            "4log(n)/n" | "4logn/n" => PRule::FourLogOverN,
            "6log(n)/n" | "6logn/n" => PRule::SixLogOverN,
            _ => {
                let p: f64 = key.parse().map_err(|_| Error::Parse {
                    line: 0,
                    msg: format!("unknown edge probability rule `{s}`"),
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("edge probability {p} outside [0, 1]"),
                    });
                }
                PRule::Constant(p)
            }
        };
        Ok(rule)
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub skeleton: SkeletonGraph,
    pub allocation: NodeAllocation,
    pub rule: PRule,
    pub samples: usize,
    pub seed: u64,
    pub exact: ExactConfig,
}

impl SimConfig {
    pub fn new(
        skeleton: SkeletonGraph,
        allocation: NodeAllocation,
        rule: PRule,
        samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            skeleton,
            allocation,
            rule,
            samples,
            seed,
            exact: ExactConfig::default(),
        }
    }

    pub fn probability(&self) -> f64 {
        self.rule.evaluate(self.allocation.total())
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Precondition("sample count must be positive".into()));
        }
        let p = self.probability();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Precondition(format!(
                "edge probability {p} outside [0, 1]"
            )));
        }
        Ok(())
    }
}

/// Empirical distribution of `n(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    /// `counts[t]` samples had `n(G) = t`, for `t = 0..=n_star`.
    pub counts: Vec<u64>,
    pub n_star: u64,
    pub samples: usize,
    /// Samples dropped because the exact solver ran out of budget.
    pub timeouts: usize,
    pub p_hat_star: f64,
}

impl Pmf {
    pub fn probability(&self, t: usize) -> f64 {
        self.counts.get(t).copied().unwrap_or(0) as f64 / self.samples as f64
    }
}

fn draw(k: &BlowupGraph, p: f64, seed: u64, sample_index: u64) -> GeneralGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    let kept: Vec<(usize, usize)> = k.edges().filter(|_| rng.gen::<f64>() < p).collect();
    GeneralGraph::new(k.vertex_count(), kept).expect("blow-up edges are simple")
}

/// Sample `sample_index` of the configuration.
pub fn sbm_sample(cfg: &SimConfig, sample_index: u64) -> Result<GeneralGraph> {
    cfg.validate()?;
    let k = blow_up(&cfg.skeleton, &cfg.allocation)?;
    Ok(draw(&k, cfg.probability(), cfg.seed, sample_index))
}

/// Computes `n(G)` for every sample and tallies the distribution.
///
/// Runs on the current rayon pool; the result does not depend on its size.
pub fn run_experiment(cfg: &SimConfig) -> Result<Pmf> {
    cfg.validate()?;
    let n_star = solve_lp(&cfg.skeleton, &cfg.allocation)?.objective;
    let k = blow_up(&cfg.skeleton, &cfg.allocation)?;
    let p = cfg.probability();
    let outcomes: Vec<Result<Option<usize>>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|r| {
            let g = draw(&k, p, cfg.seed, r);
            match exact_solve(&g, &cfg.exact) {
                Ok(sol) => Ok(Some(sol.order)),
                Err(Error::Budget { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut counts = vec![0u64; n_star as usize + 1];
    let mut timeouts = 0;
    for (r, outcome) in outcomes.into_iter().enumerate() {
        match outcome? {
            Some(t) if t as u64 > n_star => {
                return Err(Error::Internal(format!(
                    "sample {r} has n(G) = {t} above the LP optimum {n_star}"
                )));
            }
            Some(t) => counts[t] += 1,
            None => timeouts += 1,
        }
    }
    let p_hat_star = counts[n_star as usize] as f64 / cfg.samples as f64;
    Ok(Pmf {
        counts,
        n_star,
        samples: cfg.samples,
        timeouts,
        p_hat_star,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub label: String,
    pub p_hat_star: f64,
    pub timeouts: usize,
}

/// `p̂*` for every scaled allocation `k·x` and every rule.
pub fn scaling_sweep(
    skeleton: &SkeletonGraph,
    base: &NodeAllocation,
    scales: &[u64],
    rules: &[PRule],
    samples: usize,
    seed: u64,
    exact: ExactConfig,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &k in scales {
        let allocation = base.scaled(k);
        for &rule in rules {
            let mut cfg = SimConfig::new(skeleton.clone(), allocation.clone(), rule, samples, seed);
            cfg.exact = exact;
            let pmf = run_experiment(&cfg)?;
            rows.push(SweepRow {
                n: allocation.total(),
                label: rule.label(),
                p_hat_star: pmf.p_hat_star,
                timeouts: pmf.timeouts,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `t,<label>...` and one row per `t = 0..=n*`.
pub fn write_pmf_csv<W: Write>(mut w: W, runs: &[(String, Pmf)]) -> Result<()> {
    let n_star = runs.iter().map(|(_, p)| p.n_star).max().unwrap_or(0);
    write!(w, "t")?;
    for (label, _) in runs {
        write!(w, ",{label}")?;
    }
    writeln!(w)?;
    for t in 0..=n_star as usize {
        write!(w, "{t}")?;
        for (_, pmf) in runs {
            write!(w, ",{:.6}", pmf.probability(t))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `key=value` lines recording `n*`, `N`, the seed and each `p̂*`.
pub fn write_sidecar<W: Write>(mut w: W, seed: u64, runs: &[(String, Pmf)]) -> Result<()> {
    let n_star = runs.first().map_or(0, |(_, p)| p.n_star);
    let samples = runs.first().map_or(0, |(_, p)| p.samples);
    let timeouts: usize = runs.iter().map(|(_, p)| p.timeouts).sum();
    writeln!(w, "n_star={n_star}")?;
    writeln!(w, "samples={samples}")?;
    writeln!(w, "seed={seed}")?;
    writeln!(w, "timeouts={timeouts}")?;
    for (label, pmf) in runs {
        writeln!(w, "p_hat_star[{label}]={:.6}", pmf.p_hat_star)?;
    }
    Ok(())
}

/// CSV with header `n,p_label,p_hat_star`.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "n,p_label,p_hat_star")?;
    for row in rows {
        writeln!(w, "{},{},{:.6}", row.n, row.label, row.p_hat_star)?;
    }
    Ok(())
}
