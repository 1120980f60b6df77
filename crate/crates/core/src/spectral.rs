//! Exact checks of the spectral identities: the eigenvalue relation
//! `K P_{m,n} = lambda_{m,n} P_{m,n}`, orthogonality against the trinomial
//! weight, and stationarity of that weight.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{build_kernel, trinomial_pmf};
use crate::matrix::ExactMatrix;
use crate::params::{
    alpha_relation_residuals, compatible_beta, derive_mapped, derive_weight, ChainParams,
    MappedParams, ParamSet, Regime, WeightParams,
};
use crate::polyeval::poly_values;
use crate::scalar::{self, Scalar};
use crate::statespace::{State, StateSpace};

/// `(1 - b1 t - b2 u)^m (1 - b1 v - b2 w)^n`.
pub fn eigenvalue(freq: State, mp: &MappedParams, b1: &Scalar, b2: &Scalar) -> Scalar {
    let (first, second) = eigenvalue_factors(mp, b1, b2);
    num_traits::pow(first, freq.x) * num_traits::pow(second, freq.y)
}

fn eigenvalue_factors(mp: &MappedParams, b1: &Scalar, b2: &Scalar) -> (Scalar, Scalar) {
    let one = Scalar::one();
    (&one - b1 * &mp.t - b2 * &mp.u, &one - b1 * &mp.v - b2 * &mp.w)
}

/// The same eigenvalue written through `(alpha, eta)` instead of `beta`.
pub fn eigenvalue_from_alpha(
    freq: State,
    mp: &MappedParams,
    wp: &WeightParams,
    a1: &Scalar,
    a2: &Scalar,
) -> Result<Scalar> {
    let one = Scalar::one();
    let d = &one - a1 * &wp.eta1 - a2 * &wp.eta2;
    if d.is_zero() {
        return Err(Error::DegenerateParams("1 - alpha1*eta1 - alpha2*eta2 = 0".into()));
    }
    let f1 = (&d - &wp.eta1 * &mp.t * (&one - a1) - &wp.eta2 * &mp.u * (&one - a2)) / &d;
    let f2 = (&d - &wp.eta1 * &mp.v * (&one - a1) - &wp.eta2 * &mp.w * (&one - a2)) / &d;
    Ok(num_traits::pow(f1, freq.x) * num_traits::pow(f2, freq.y))
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub state: State,
    #[serde(with = "scalar::as_str")]
    pub lhs: Scalar,
    #[serde(with = "scalar::as_str")]
    pub rhs: Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenEntry {
    pub freq: State,
    #[serde(with = "scalar::as_str")]
    pub lambda: Scalar,
    pub exact: bool,
    #[serde(with = "scalar::as_str")]
    pub max_residual: Scalar,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub size: usize,
    pub params: ParamSet,
    pub chain: ChainParams,
    pub regime: Regime,
    /// Both residuals of the retention relation; zero for a compatible chain.
    #[serde(with = "scalar::as_str_vec")]
    pub alpha_relation_residuals: Vec<Scalar>,
    pub entries: Vec<EigenEntry>,
    /// Pairs of frequency states sharing an eigenvalue.
    pub collisions: Vec<(State, State)>,
    pub pass: bool,
}

/// Checks the eigenvalue relation for the chain whose `beta` comes from the
/// stationarity map at `(p, alpha1, alpha2)`.
pub fn verify_eigen(size: usize, p: &ParamSet, alpha1: &Scalar, alpha2: &Scalar) -> Result<EigenReport> {
    let (beta1, beta2) = compatible_beta(p, alpha1, alpha2)?;
    let cp = ChainParams::new(alpha1.clone(), alpha2.clone(), beta1, beta2);
    verify_eigen_chain(size, p, &cp)
}

/// Checks the eigenvalue relation for an arbitrary chain.
pub fn verify_eigen_chain(size: usize, p: &ParamSet, cp: &ChainParams) -> Result<EigenReport> {
    p.validate()?;
    let mp = derive_mapped(p)?;
    let space = StateSpace::enumerate(size)?;
    let kernel = build_kernel(size, cp)?;
    let values = poly_values(size, &mp)?;

    let entries: Vec<EigenEntry> = space
        .states()
        .iter()
        .enumerate()
        .map(|(fi, &freq)| {
            let lambda = eigenvalue(freq, &mp, &cp.beta1, &cp.beta2);
            let vector = values.row(fi);
            let image = kernel.matrix.mul_vec(vector);
            let mut max_residual = Scalar::zero();
            let mut witness = None;
            for (si, (lhs, v)) in image.iter().zip(vector).enumerate() {
                let rhs = &lambda * v;
                let r = (lhs - &rhs).abs();
                if !r.is_zero() && witness.is_none() {
                    witness = Some(Witness { state: space.state(si), lhs: lhs.clone(), rhs });
                }
                if r > max_residual {
                    max_residual = r;
                }
            }
            EigenEntry { freq, exact: max_residual.is_zero(), lambda, max_residual, witness }
        })
        .collect();

    let mut collisions = Vec::new();
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            if a.lambda == b.lambda {
                collisions.push((a.freq, b.freq));
            }
        }
    }
    let pass = entries.iter().all(|e| e.exact);
    Ok(EigenReport {
        size,
        params: p.clone(),
        chain: cp.clone(),
        regime: cp.regime(),
        alpha_relation_residuals: alpha_relation_residuals(p, &cp.alpha1, &cp.alpha2)?.to_vec(),
        entries,
        collisions,
        pass,
    })
}

/// Trinomial weight `b2(x, y, N; eta1, eta2)` over the physical states.
pub fn trinomial_weight(space: &StateSpace, wp: &WeightParams) -> Result<Vec<Scalar>> {
    space
        .states()
        .iter()
        .map(|s| trinomial_pmf(s.x, s.y, space.size(), &wp.eta1, &wp.eta2))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub size: usize,
    pub params: ParamSet,
    pub weight: WeightParams,
    pub gram: ExactMatrix,
    #[serde(with = "scalar::as_str_vec")]
    pub diagonal: Vec<Scalar>,
    /// Off-diagonal positions holding a nonzero value.
    pub nonzero_off_diagonal: Vec<(State, State)>,
    pub off_diagonal_zero: bool,
}

pub fn verify_orthogonality(size: usize, p: &ParamSet) -> Result<GramReport> {
    p.validate()?;
    let mp = derive_mapped(p)?;
    let wp = derive_weight(p)?;
    if (&wp.eta1 + &wp.eta2).is_one() {
        return Err(Error::DegenerateParams(format!(
            "eta1 + eta2 = 1 at {p}: the weight has no blank outcome"
        )));
    }
    let space = StateSpace::enumerate(size)?;
    let weight = trinomial_weight(&space, &wp)?;
    let values = poly_values(size, &mp)?;
    let weighted = ExactMatrix::from_fn(values.rows(), values.cols(), |r, c| &values[(r, c)] * &weight[c]);
    let gram = weighted.mul(&values.transpose());

    let n = space.len();
    let diagonal = (0..n).map(|i| gram[(i, i)].clone()).collect();
    let nonzero_off_diagonal: Vec<_> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|&(r, c)| r != c && !gram[(r, c)].is_zero())
        .map(|(r, c)| (space.state(r), space.state(c)))
        .collect();
    Ok(GramReport {
        size,
        params: p.clone(),
        weight: wp,
        off_diagonal_zero: nonzero_off_diagonal.is_empty(),
        gram,
        diagonal,
        nonzero_off_diagonal,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub size: usize,
    pub params: ParamSet,
    pub chain: ChainParams,
    pub regime: Regime,
    pub weight_valid: bool,
    /// `pi K = pi` exactly for the trinomial weight `pi`.
    pub stationary: bool,
    pub witness: Option<Witness>,
}

pub fn verify_stationarity(
    size: usize,
    p: &ParamSet,
    alpha1: &Scalar,
    alpha2: &Scalar,
) -> Result<StationarityReport> {
    let (beta1, beta2) = compatible_beta(p, alpha1, alpha2)?;
    let cp = ChainParams::new(alpha1.clone(), alpha2.clone(), beta1, beta2);
    stationarity_for_chain(size, p, &cp)
}

pub fn stationarity_for_chain(size: usize, p: &ParamSet, cp: &ChainParams) -> Result<StationarityReport> {
    let wp = derive_weight(p)?;
    let kernel = build_kernel(size, cp)?;
    let pi = trinomial_weight(&kernel.space, &wp)?;
    let image = kernel.matrix.vec_mul(&pi);
    let witness = image
        .iter()
        .zip(&pi)
        .enumerate()
        .find(|(_, (l, r))| l != r)
        .map(|(i, (l, r))| Witness { state: kernel.space.state(i), lhs: l.clone(), rhs: r.clone() });
    Ok(StationarityReport {
        size,
        params: p.clone(),
        chain: cp.clone(),
        regime: cp.regime(),
        weight_valid: wp.valid,
        stationary: witness.is_none(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::compatible_chain;
    use crate::scalar::{int, ratio};

    fn p1234() -> ParamSet {
        ParamSet::from_ints([1, 2, 3, 4])
    }

    #[test]
    fn eigenvalue_basics() {
        let mp = derive_mapped(&p1234()).unwrap();
        assert_eq!(eigenvalue(State::new(0, 0), &mp, &ratio(1, 3), &ratio(1, 9)), int(1));
        // alpha = 0 gives beta = eta and a rank-one kernel.
        let lam = eigenvalue(State::new(1, 0), &mp, &ratio(5, 18), &ratio(5, 7));
        assert_eq!(lam, int(0));
    }

    #[test]
    fn compatible_chain_n2() {
        let cp = compatible_chain(&p1234(), &ratio(1, 2)).unwrap();
        let report = verify_eigen_chain(2, &p1234(), &cp).unwrap();
        assert!(report.pass);
        assert_eq!(report.entries.len(), 6);
        assert!(report.alpha_relation_residuals.iter().all(Zero::is_zero));
    }

    #[test]
    fn stationarity_map_alone_is_not_enough() {
        // alpha2 = 1/3 violates the retention relation at p = (1,2,3,4).
        let report = verify_eigen(2, &p1234(), &ratio(1, 2), &ratio(1, 3)).unwrap();
        assert!(!report.pass);
        assert!(report.entries[0].exact);
        assert!(report.entries.iter().any(|e| e.witness.is_some()));
        assert!(report.alpha_relation_residuals.iter().any(|r| !r.is_zero()));
        // The trinomial weight is still stationary.
        let st = verify_stationarity(2, &p1234(), &ratio(1, 2), &ratio(1, 3)).unwrap();
        assert!(st.stationary);
    }

    #[test]
    fn deterministic_limit() {
        let report = verify_eigen(3, &p1234(), &int(1), &int(1)).unwrap();
        assert!(report.pass);
        assert!(report.entries.iter().all(|e| e.lambda == int(1)));
        assert_eq!(report.collisions.len(), 45);
    }

    #[test]
    fn gram_origin_entry_is_one() {
        let report = verify_orthogonality(1, &p1234()).unwrap();
        assert!(report.off_diagonal_zero);
        assert_eq!(report.gram[(0, 0)], int(1));
    }

    #[test]
    fn degenerate_weight_rejected() {
        assert!(matches!(
            verify_orthogonality(2, &ParamSet::from_ints([2, 2, 2, 2])),
            Err(Error::DegenerateParams(_))
        ));
    }

    #[test]
    fn rank_one_chain_stationarity() {
        // alpha = 0: every row is the beta-trinomial, equal to the weight.
        let st = verify_stationarity(2, &p1234(), &int(0), &int(0)).unwrap();
        assert!(st.stationary);
        let wrong = ChainParams::new(int(0), int(0), ratio(1, 5), ratio(1, 7));
        let st = stationarity_for_chain(2, &p1234(), &wrong).unwrap();
        assert!(!st.stationary);
        assert!(st.witness.is_some());
    }
}
