use rahman_core::scalar::{to_f64, ratio};
use rahman_core::simulator::{
    chi_square_vs_kernel, occupancy_vs_weight, pearson, run_chain, run_chains, ChainState, ChiSquareConfig, Sampler,
    Verdict,
};
use rahman_core::spectral::trinomial_weight;
use rahman_core::params::{compatible_chain, derive_weight};
use rahman_core::sampling::probabilistic_compatible_point;
use rahman_core::{build_kernel, ChainParams, Error, State};
use rand::{Rng, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};

fn cp() -> ChainParams {
    ChainParams::new(ratio(1, 2), ratio(1, 3), ratio(1, 5), ratio(1, 7))
}

#[test]
fn one_step_frequencies_close_to_kernel_row() {
    let k = build_kernel(3, &cp()).unwrap();
    let sampler = Sampler::new(3, &cp()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let samples = 100_000;
    let mut freq = vec![0u64; k.space.len()];
    for _ in 0..samples {
        let next = sampler.step(ChainState::new(1, 1), &mut rng).unwrap();
        freq[k.space.index_of(State::new(next.i1, next.i2)).unwrap()] += 1;
    }
    let row = k.space.index_of(State::new(1, 1)).unwrap();
    let tv: f64 = freq
        .iter()
        .zip(k.matrix.row(row))
        .map(|(&n, p)| (n as f64 / samples as f64 - to_f64(p)).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.01, "total variation {tv}");
}

#[test]
fn same_seed_same_counts() {
    let a = run_chain(3, ChainState::new(0, 0), 20_000, &cp(), 17).unwrap();
    let b = run_chain(3, ChainState::new(0, 0), 20_000, &cp(), 17).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let c = run_chain(3, ChainState::new(0, 0), 20_000, &cp(), 18).unwrap();
    assert_ne!(a.counts, c.counts);
    let merged = run_chains(3, ChainState::new(0, 0), 5_000, &cp(), &[1, 2, 3]).unwrap();
    assert_eq!(merged.total(), 15_000);
    assert_eq!(merged, run_chains(3, ChainState::new(0, 0), 5_000, &cp(), &[1, 2, 3]).unwrap());
}

#[test]
fn single_step_records_one_transition() {
    let tc = run_chain(2, ChainState::new(1, 0), 1, &cp(), 0).unwrap();
    assert_eq!(tc.total(), 1);
    assert_eq!(tc.visits(1), 1);
    assert!(matches!(run_chain(2, ChainState::new(0, 0), 0, &cp(), 0), Err(Error::Range(_))));
    assert!(matches!(run_chain(2, ChainState::new(2, 1), 5, &cp(), 0), Err(Error::InvalidState { .. })));
}

#[test]
fn algebraic_chain_cannot_be_simulated() {
    let bad = ChainParams::new(ratio(1, 2), ratio(7, 4), ratio(-5, 14), ratio(135, 98));
    assert!(Sampler::new(3, &bad).is_err());
}

#[test]
fn chain_agrees_with_kernel() {
    let k = build_kernel(3, &cp()).unwrap();
    let tc = run_chain(3, ChainState::new(0, 0), 300_000, &cp(), 5).unwrap();
    let report = chi_square_vs_kernel(&tc, &k, ChiSquareConfig::default());
    assert!(report.all_pass);
    assert_eq!(report.tested_rows, 10);
}

#[test]
fn perturbed_kernel_is_rejected() {
    let tc = run_chain(3, ChainState::new(0, 0), 300_000, &cp(), 5).unwrap();
    let other = ChainParams::new(ratio(11, 20), ratio(1, 3), ratio(1, 5), ratio(1, 7));
    let report = chi_square_vs_kernel(&tc, &build_kernel(3, &other).unwrap(), ChiSquareConfig::default());
    assert!(!report.all_pass);
    let failing = report.rows.iter().filter(|r| r.verdict == Verdict::Fail).count();
    assert!(failing >= 5, "only {failing} rows rejected");
}

#[test]
fn sparse_rows_are_reported_not_failed() {
    let k = build_kernel(3, &cp()).unwrap();
    let tc = run_chain(3, ChainState::new(0, 0), 500, &cp(), 1).unwrap();
    let report = chi_square_vs_kernel(&tc, &k, ChiSquareConfig::default());
    assert!(report.rows.iter().all(|r| r.verdict == Verdict::InsufficientSamples));
    assert_eq!(report.tested_rows, 0);
}

#[test]
fn null_control_rejection_rate_near_significance() {
    let k = build_kernel(3, &cp()).unwrap();
    let probs: Vec<f64> = k.matrix.row(4).iter().map(to_f64).collect();
    let mut cdf = probs.clone();
    for i in 1..cdf.len() {
        cdf[i] += cdf[i - 1];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let trials = 2000;
    let mut rejected = 0;
    for _ in 0..trials {
        let mut obs = vec![0u64; probs.len()];
        for _ in 0..2000 {
            let u: f64 = rng.random();
            obs[cdf.partition_point(|&c| c <= u).min(probs.len() - 1)] += 1;
        }
        if pearson(&obs, &probs, 5.0).p_value < 0.05 {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / trials as f64;
    assert!((0.03..0.07).contains(&rate), "rejection rate {rate}");
}

#[test]
fn occupancy_follows_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (p, cp) = probabilistic_compatible_point(&mut rng);
    let wp = derive_weight(&p).unwrap();
    let tc = run_chain(2, ChainState::new(0, 0), 400_000, &cp, 2).unwrap();
    let space = rahman_core::StateSpace::enumerate(2).unwrap();
    let weight = trinomial_weight(&space, &wp).unwrap();
    let test = occupancy_vs_weight(&tc, &weight, 5.0);
    // Correlated samples inflate the statistic, so only a gross mismatch fails.
    assert!(test.statistic / (test.dof.max(1) as f64) < 50.0, "{test:?} at {p}, {cp}");
    assert!(compatible_chain(&p, &cp.alpha1).unwrap() == cp);
}
