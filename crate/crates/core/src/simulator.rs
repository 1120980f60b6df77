//! Monte Carlo realization of the three-toss dice chain.
//!
//! One step from `(i1, i2)`: the `i1` red dice are retossed and `k1 ~
//! Binomial(i1, alpha1)` keep their colour; likewise `k2 ~ Binomial(i2,
//! alpha2)` blacks. The other `N - k1 - k2` dice are thrown together with
//! red/black probabilities `(beta1, beta2)` and the new reds and blacks are
//! added to `(k1, k2)`.
//!
//! Probabilities are converted to `f64` once per parameter set and sampled by
//! inverse CDF. The generator is `ChaCha20Rng::seed_from_u64(seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::kernel::{binomial_pmf, trinomial_pmf, KernelMatrix};
use crate::params::ChainParams;
use crate::scalar::{self, Scalar};
use crate::statespace::{State, StateSpace};

pub const RNG_NAME: &str = "ChaCha20Rng::seed_from_u64";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ChainState {
    pub i1: usize,
    pub i2: usize,
}

impl ChainState {
    pub const fn new(i1: usize, i2: usize) -> Self {
        ChainState { i1, i2 }
    }

    fn as_state(self) -> State {
        State::new(self.i1, self.i2)
    }
}

/// Internals of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepTrace {
    pub kept_red: usize,
    pub kept_black: usize,
    pub fresh_red: usize,
    pub fresh_black: usize,
    pub next: ChainState,
}

fn cumulative(pmf: impl Iterator<Item = Scalar>) -> Vec<f64> {
    let mut acc = 0.0;
    pmf.map(|p| {
        acc += scalar::to_f64(&p);
        acc
    })
    .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Outcomes `(reds, blacks)` of a joint throw and their cumulative probabilities.
type ThrowTable = (Vec<(usize, usize)>, Vec<f64>);

#[derive(Debug, Clone)]
pub struct Sampler {
    dice: usize,
    keep_red: Vec<Vec<f64>>,
    keep_black: Vec<Vec<f64>>,
    /// `fresh[m]` is the CDF over `(reds, blacks)` for `m` thrown dice.
    fresh: Vec<ThrowTable>,
}

impl Sampler {
    pub fn new(dice: usize, cp: &ChainParams) -> Result<Self> {
        if dice < 1 {
            return Err(Error::InvalidSize(dice));
        }
        if !cp.is_probabilistic() {
            return Err(Error::Range(format!("{cp} are not probabilities")));
        }
        let binom = |a: &Scalar| -> Result<Vec<Vec<f64>>> {
            (0..=dice)
                .map(|i| {
                    let pmf = (0..=i).map(|k| binomial_pmf(k, i, a)).collect::<Result<Vec<_>>>()?;
                    Ok(cumulative(pmf.into_iter()))
                })
                .collect()
        };
        let fresh = (0..=dice)
            .map(|m| {
                let outcomes: Vec<(usize, usize)> =
                    (0..=m).flat_map(|b| (0..=m - b).map(move |r| (r, b))).collect();
                let pmf = outcomes
                    .iter()
                    .map(|&(r, b)| trinomial_pmf(r, b, m, &cp.beta1, &cp.beta2))
                    .collect::<Result<Vec<_>>>()?;
                Ok((outcomes, cumulative(pmf.into_iter())))
            })
            .collect::<Result<_>>()?;
        Ok(Sampler { dice, keep_red: binom(&cp.alpha1)?, keep_black: binom(&cp.alpha2)?, fresh })
    }

    pub fn dice(&self) -> usize {
        self.dice
    }

    pub fn step_traced<R: Rng + ?Sized>(&self, s: ChainState, rng: &mut R) -> Result<StepTrace> {
        if s.i1 + s.i2 > self.dice {
            return Err(Error::InvalidState { i1: s.i1, i2: s.i2, dice: self.dice });
        }
        let kept_red = draw(&self.keep_red[s.i1], rng.random::<f64>());
        let kept_black = draw(&self.keep_black[s.i2], rng.random::<f64>());
        let (outcomes, cdf) = &self.fresh[self.dice - kept_red - kept_black];
        let (fresh_red, fresh_black) = outcomes[draw(cdf, rng.random::<f64>())];
        Ok(StepTrace {
            kept_red,
            kept_black,
            fresh_red,
            fresh_black,
            next: ChainState::new(kept_red + fresh_red, kept_black + fresh_black),
        })
    }

    pub fn step<R: Rng + ?Sized>(&self, s: ChainState, rng: &mut R) -> Result<ChainState> {
        self.step_traced(s, rng).map(|t| t.next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionCounts {
    pub dice: usize,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub rng: String,
    pub start: ChainState,
    /// `counts[source][target]`, both in simplex order.
    pub counts: Vec<Vec<u64>>,
}

impl TransitionCounts {
    fn empty(dice: usize, start: ChainState) -> Self {
        let n = (dice + 1) * (dice + 2) / 2;
        TransitionCounts {
            dice,
            steps: 0,
            seeds: Vec::new(),
            rng: RNG_NAME.to_string(),
            start,
            counts: vec![vec![0; n]; n],
        }
    }

    pub fn visits(&self, source: usize) -> u64 {
        self.counts[source].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn merge(&mut self, other: &TransitionCounts) {
        self.steps += other.steps;
        self.seeds.extend(&other.seeds);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    /// `source_x,source_y,target_x,target_y,count`, nonzero counts only.
    pub fn to_csv(&self) -> String {
        let space = StateSpace::enumerate(self.dice).expect("dice >= 1");
        let mut out = String::from("source_x,source_y,target_x,target_y,count\n");
        for (r, row) in self.counts.iter().enumerate() {
            for (c, &n) in row.iter().enumerate() {
                if n > 0 {
                    let (a, b) = (space.state(r), space.state(c));
                    out.push_str(&format!("{},{},{},{},{}\n", a.x, a.y, b.x, b.y, n));
                }
            }
        }
        out
    }
}

pub fn run_chain(dice: usize, start: ChainState, steps: u64, cp: &ChainParams, seed: u64) -> Result<TransitionCounts> {
    if steps < 1 {
        return Err(Error::Range("a run needs at least one step".into()));
    }
    let sampler = Sampler::new(dice, cp)?;
    let space = StateSpace::enumerate(dice)?;
    let index = |s: ChainState| {
        space.index_of(s.as_state()).ok_or(Error::InvalidState { i1: s.i1, i2: s.i2, dice })
    };
    let mut tc = TransitionCounts::empty(dice, start);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut current = start;
    let mut from = index(current)?;
    for _ in 0..steps {
        let next = sampler.step(current, &mut rng)?;
        let to = index(next)?;
        tc.counts[from][to] += 1;
        current = next;
        from = to;
    }
    tc.steps = steps;
    tc.seeds.push(seed);
    Ok(tc)
}

/// Independent chains, one per seed, merged in seed order.
pub fn run_chains(
    dice: usize,
    start: ChainState,
    steps_each: u64,
    cp: &ChainParams,
    seeds: &[u64],
) -> Result<TransitionCounts> {
    let runs: Vec<TransitionCounts> = seeds
        .par_iter()
        .map(|&seed| run_chain(dice, start, steps_each, cp, seed))
        .collect::<Result<_>>()?;
    let mut merged = TransitionCounts::empty(dice, start);
    for r in &runs {
        merged.merge(r);
    }
    Ok(merged)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquareConfig {
    pub min_visits: u64,
    pub significance: f64,
    /// Cells with smaller expected counts are pooled.
    pub min_expected: f64,
}

impl Default for ChiSquareConfig {
    fn default() -> Self {
        ChiSquareConfig { min_visits: 1000, significance: 0.001, min_expected: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientSamples,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowTest {
    pub source: State,
    pub visits: u64,
    pub test: Option<ChiSquareTest>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiSquareReport {
    pub config: ChiSquareConfig,
    pub rows: Vec<RowTest>,
    /// Every row with enough visits passes.
    pub all_pass: bool,
    pub tested_rows: usize,
}

/// Pearson statistic of observed counts against probabilities, pooling cells
/// whose expected count falls below `min_expected`.
pub fn pearson(observed: &[u64], probs: &[f64], min_expected: f64) -> ChiSquareTest {
    let total: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> =
        probs.iter().zip(observed).map(|(&p, &o)| (p * total as f64, o as f64)).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (e, o) in cells {
        if e < min_expected {
            pool.0 += e;
            pool.1 += o;
        } else {
            bins.push((e, o));
        }
    }
    if pool.0 > 0.0 || pool.1 > 0.0 {
        if pool.0 >= min_expected || bins.is_empty() {
            bins.push(pool);
        } else {
            bins[0].0 += pool.0;
            bins[0].1 += pool.1;
        }
    }
    let statistic: f64 = bins
        .iter()
        .filter(|(e, _)| *e > 0.0)
        .map(|(e, o)| (o - e) * (o - e) / e)
        .sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    ChiSquareTest { statistic, dof, p_value }
}

pub fn chi_square_vs_kernel(tc: &TransitionCounts, k: &KernelMatrix, config: ChiSquareConfig) -> ChiSquareReport {
    assert_eq!(tc.dice, k.size(), "counts and kernel sizes differ");
    let rows: Vec<RowTest> = (0..k.space.len())
        .map(|r| {
            let visits = tc.visits(r);
            let source = k.space.state(r);
            if visits < config.min_visits {
                return RowTest { source, visits, test: None, verdict: Verdict::InsufficientSamples };
            }
            let probs: Vec<f64> = k.matrix.row(r).iter().map(scalar::to_f64).collect();
            let test = pearson(&tc.counts[r], &probs, config.min_expected);
            let verdict = if test.p_value >= config.significance { Verdict::Pass } else { Verdict::Fail };
            RowTest { source, visits, test: Some(test), verdict }
        })
        .collect();
    let tested_rows = rows.iter().filter(|r| r.verdict != Verdict::InsufficientSamples).count();
    let all_pass = rows.iter().all(|r| r.verdict != Verdict::Fail);
    ChiSquareReport { config, rows, all_pass, tested_rows }
}

/// Chi-square of long-run state occupancy against an exact weight. Chain
/// samples are correlated, so the p-value is indicative only.
pub fn occupancy_vs_weight(tc: &TransitionCounts, weight: &[Scalar], min_expected: f64) -> ChiSquareTest {
    let occupancy: Vec<u64> = (0..tc.counts.len()).map(|c| tc.counts.iter().map(|row| row[c]).sum()).collect();
    let probs: Vec<f64> = weight.iter().map(scalar::to_f64).collect();
    pearson(&occupancy, &probs, min_expected)
}
