//! Exact evaluation of the two-variable polynomials `P_{m,n}(x, y)`.
//!
//! ```text
//! P_{m,n}(x,y) = sum_{i,j,k,l} (-m)_{i+j} (-n)_{k+l} (-x)_{i+k} (-y)_{j+l}
//!                              / (i! j! k! l! (-N)_{i+j+k+l}) t^i u^j v^k w^l
//! ```
//!
//! The sum is finite: the numerator Pochhammers vanish unless `i+j <= m`,
//! `k+l <= n`, `i+k <= x` and `j+l <= y`, and the loops stop there.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::params::{derive_mapped, MappedParams, ParamSet};
use crate::scalar::{self, Scalar};
use crate::statespace::{State, StateSpace};

/// Rising factorial `a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: &Scalar, n: usize) -> Scalar {
    let mut acc = Scalar::one();
    let mut f = a.clone();
    for _ in 0..n {
        acc *= &f;
        f += Scalar::one();
    }
    acc
}

/// `(-a)_k` for a nonnegative integer `a`: `(-1)^k a!/(a-k)!`, zero for `k > a`.
pub fn pochhammer_neg(a: usize, k: usize) -> BigInt {
    if k > a {
        return BigInt::zero();
    }
    let mag = ((a - k + 1)..=a).fold(BigInt::one(), |acc, f| acc * BigInt::from(f));
    if k % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// Integer data for summing every term over the common denominator
/// `N!^5 (td ud vd wd)^N`, where `t = tn/td` and so on.
struct Powers {
    /// `scaled[0][i] = tn^i td^(N-i)`, likewise for `u`, `v`, `w`.
    scaled: [Vec<BigInt>; 4],
    /// `N!/i!`.
    falling: Vec<BigInt>,
    /// `(N-k)!`.
    factorial: Vec<BigInt>,
    denominator: BigInt,
}

impl Powers {
    fn new(mp: &MappedParams, size: usize) -> Self {
        let scaled_powers = |b: &Scalar| -> Vec<BigInt> {
            (0..=size)
                .map(|i| num_traits::pow(b.numer().clone(), i) * num_traits::pow(b.denom().clone(), size - i))
                .collect()
        };
        let n_fact = scalar::factorial(size);
        let dens = [&mp.t, &mp.u, &mp.v, &mp.w].iter().fold(BigInt::one(), |acc, b| acc * b.denom());
        Powers {
            scaled: [scaled_powers(&mp.t), scaled_powers(&mp.u), scaled_powers(&mp.v), scaled_powers(&mp.w)],
            falling: (0..=size).map(|i| &n_fact / scalar::factorial(i)).collect(),
            factorial: (0..=size).map(scalar::factorial).collect(),
            denominator: num_traits::pow(n_fact, 5) * num_traits::pow(dens, size),
        }
    }
}

fn check_state(s: State, size: usize) -> Result<()> {
    if s.x + s.y > size {
        Err(Error::OutOfSimplex { x: s.x, y: s.y, size })
    } else {
        Ok(())
    }
}

#[allow(clippy::needless_range_loop)]
fn evaluate(freq: State, phys: State, size: usize, pw: &Powers) -> Result<Scalar> {
    let (m, n, x, y) = (freq.x, freq.y, phys.x, phys.y);
    let [ts, us, vs, ws] = &pw.scaled;
    let mut sum = BigInt::zero();
    for i in 0..=m.min(x) {
        for j in 0..=(m - i).min(y) {
            let a = pochhammer_neg(m, i + j) * &pw.falling[i] * &pw.falling[j] * &ts[i] * &us[j];
            for k in 0..=n.min(x - i) {
                let b = &a * pochhammer_neg(x, i + k) * &pw.falling[k] * &vs[k];
                for l in 0..=(n - k).min(y - j) {
                    let order = i + j + k + l;
                    let num = pochhammer_neg(n, k + l) * pochhammer_neg(y, j + l);
                    if num.is_zero() || b.is_zero() {
                        continue;
                    }
                    // (-N)_order vanishes past N; 0/0 terms were skipped above.
                    if order > size {
                        return Err(Error::VanishingDenominator { size, order, i, j, k, l });
                    }
                    // N!/(-N)_order = (-1)^order (N-order)!.
                    let term = &b * num * &pw.falling[l] * &ws[l] * &pw.factorial[size - order];
                    if order % 2 == 1 {
                        sum -= term;
                    } else {
                        sum += term;
                    }
                }
            }
        }
    }
    Ok(BigRational::new(sum, pw.denominator.clone()))
}

/// `P_{m,n}(x, y)` for simplex size `size`.
pub fn rahman_poly(freq: State, phys: State, mp: &MappedParams, size: usize) -> Result<Scalar> {
    check_state(freq, size)?;
    check_state(phys, size)?;
    evaluate(freq, phys, size, &Powers::new(mp, size))
}

/// Values `P_{m,n}(x,y)`: rows are frequency states, columns physical states.
#[derive(Debug, Clone)]
pub struct PolyValueMatrix {
    pub params: ParamSet,
    pub mapped: MappedParams,
    pub space: StateSpace,
    pub matrix: ExactMatrix,
    pub determinant: Scalar,
}

impl PolyValueMatrix {
    pub fn size(&self) -> usize {
        self.space.size()
    }

    /// The vector `(P_{m,n}(x,y))` over physical states, for one frequency state.
    pub fn polynomial(&self, freq_index: usize) -> &[Scalar] {
        self.matrix.row(freq_index)
    }

    pub fn inverse(&self) -> ExactMatrix {
        self.matrix.inverse().expect("invertibility checked at construction")
    }
}

/// Every value for simplex size `size`, computed without the invertibility
/// check.
pub fn poly_values(size: usize, mp: &MappedParams) -> Result<ExactMatrix> {
    let space = StateSpace::enumerate(size)?;
    let pw = Powers::new(mp, size);
    let rows: Vec<Vec<Scalar>> = space
        .states()
        .par_iter()
        .map(|&f| space.states().iter().map(|&s| evaluate(f, s, size, &pw)).collect())
        .collect::<Result<_>>()?;
    Ok(ExactMatrix::from_rows(rows))
}

pub fn build_poly_matrix(size: usize, p: &ParamSet) -> Result<PolyValueMatrix> {
    let space = StateSpace::enumerate(size)?;
    let mapped = derive_mapped(p)?;
    let matrix = poly_values(size, &mapped)?;
    let determinant = matrix.determinant();
    if determinant.is_zero() {
        return Err(Error::SingularPolyMatrix(format!("N={size}, {p}")));
    }
    Ok(PolyValueMatrix { params: p.clone(), mapped, space, matrix, determinant })
}
