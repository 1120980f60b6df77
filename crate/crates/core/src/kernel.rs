//! The one-step transition kernel of the three-toss dice chain.
//!
//! Rows are source states `(i1, i2)`, columns target states `(j1, j2)`, so
//! `K * f` sums `f` over targets for a fixed source.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::params::ChainParams;
use crate::scalar::{self, Scalar};
use crate::statespace::StateSpace;

/// `C(n, k) a^k (1 - a)^(n - k)`.
pub fn binomial_pmf(k: usize, n: usize, a: &Scalar) -> Result<Scalar> {
    if k > n {
        return Err(Error::Range(format!("binomial pmf with k={k} > n={n}")));
    }
    let coeff = BigRational::from_integer(scalar::binomial(n, k));
    Ok(coeff * num_traits::pow(a.clone(), k) * num_traits::pow(Scalar::one() - a, n - k))
}

/// Trinomial probability of `i1` reds and `i2` blacks among `n` dice.
pub fn trinomial_pmf(i1: usize, i2: usize, n: usize, b1: &Scalar, b2: &Scalar) -> Result<Scalar> {
    if i1 + i2 > n {
        return Err(Error::Range(format!("trinomial pmf with {i1}+{i2} > n={n}")));
    }
    let coeff = scalar::factorial(n)
        / (scalar::factorial(i1) * scalar::factorial(i2) * scalar::factorial(n - i1 - i2));
    let blank = Scalar::one() - b1 - b2;
    Ok(BigRational::from_integer(coeff)
        * num_traits::pow(b1.clone(), i1)
        * num_traits::pow(b2.clone(), i2)
        * num_traits::pow(blank, n - i1 - i2))
}

#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub params: ChainParams,
    pub space: StateSpace,
    pub matrix: ExactMatrix,
}

impl KernelMatrix {
    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.matrix.entries().iter().all(Signed::is_positive)
    }

    pub fn rows_sum_to_one(&self) -> bool {
        self.matrix.row_sums().iter().all(One::is_one)
    }
}

#[allow(clippy::needless_range_loop)]
pub fn build_kernel(size: usize, cp: &ChainParams) -> Result<KernelMatrix> {
    let space = StateSpace::enumerate(size)?;
    let states = space.states();
    // Binomial tables b(k, i; alpha) for 0 <= k <= i <= N.
    let table = |a: &Scalar| -> Result<Vec<Vec<Scalar>>> {
        (0..=size).map(|i| (0..=i).map(|k| binomial_pmf(k, i, a)).collect()).collect()
    };
    let keep1 = table(&cp.alpha1)?;
    let keep2 = table(&cp.alpha2)?;

    let rows: Vec<Vec<Scalar>> = states
        .par_iter()
        .map(|src| {
            states
                .iter()
                .map(|dst| {
                    let mut acc = Scalar::zero();
                    for k1 in 0..=src.x.min(dst.x) {
                        for k2 in 0..=src.y.min(dst.y) {
                            let (a, b) = (dst.x - k1, dst.y - k2);
                            let rest = size - k1 - k2;
                            if a + b > rest {
                                continue;
                            }
                            let fresh = trinomial_pmf(a, b, rest, &cp.beta1, &cp.beta2)?;
                            acc += &keep1[src.x][k1] * &keep2[src.y][k2] * fresh;
                        }
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let matrix = ExactMatrix::from_rows(rows);

    for (row, sum) in matrix.row_sums().iter().enumerate() {
        if !sum.is_one() {
            return Err(Error::StochasticityViolation { row, sum: scalar::format(sum) });
        }
    }
    Ok(KernelMatrix { params: cp.clone(), space, matrix })
}
