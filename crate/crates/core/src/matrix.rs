//! Dense matrices over exact rationals.
//!
//! Rows are scaled to integers before any elimination or product, so the
//! inner loops run on `BigInt` and rationals are reduced once per result
//! entry. Determinants use Bareiss elimination; inverses, ranks and null
//! spaces share one fraction-free reduced row echelon routine.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = Scalar;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds from row vectors. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let n = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == c), "ragged rows");
        ExactMatrix { rows: n, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        ExactMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Product computed on integer-scaled rows of `self` and columns of
    /// `rhs`, with one rational reduction per entry.
    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let lhs: Vec<(Vec<BigInt>, BigInt)> = (0..self.rows).into_par_iter().map(|r| integer_row(self.row(r))).collect();
        let rhs_cols: Vec<(Vec<BigInt>, BigInt)> =
            (0..rhs.cols).into_par_iter().map(|c| integer_row(&rhs.column(c))).collect();
        let data: Vec<Scalar> = lhs
            .par_iter()
            .flat_map_iter(|(row, rl)| {
                rhs_cols.iter().map(move |(col, cl)| {
                    let mut acc = BigInt::zero();
                    for (a, b) in row.iter().zip(col) {
                        if !a.is_zero() && !b.is_zero() {
                            acc += a * b;
                        }
                    }
                    if acc.is_zero() {
                        Scalar::zero()
                    } else {
                        BigRational::new(acc, rl * cl)
                    }
                })
            })
            .collect();
        ExactMatrix { rows: self.rows, cols: rhs.cols, data }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.rows, v.len(), "dimension mismatch in vector-matrix product");
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| &v[r] * &self[(r, c)]).sum())
            .collect()
    }

    pub fn add(&self, rhs: &ExactMatrix) -> ExactMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> ExactMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &ExactMatrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: &Scalar) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// `a * self + b * I`.
    pub fn affine(&self, a: &Scalar, b: &Scalar) -> ExactMatrix {
        assert!(self.is_square());
        let mut m = self.scale(a);
        for i in 0..self.rows {
            m[(i, i)] += b;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row_sums(&self) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.row(r).iter().sum()).collect()
    }

    pub fn row_nonzeros(&self, r: usize) -> usize {
        self.row(r).iter().filter(|a| !a.is_zero()).count()
    }

    /// Largest absolute entry; zero for an empty matrix.
    pub fn max_abs(&self) -> Scalar {
        self.data.iter().map(Signed::abs).max().unwrap_or_else(Scalar::zero)
    }

    /// Inverse by fraction-free reduction of `[A | I]`; `None` when singular.
    pub fn inverse(&self) -> Option<ExactMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let rows: Vec<Vec<BigInt>> = (0..n)
            .map(|r| {
                let (mut row, l) = integer_row(self.row(r));
                row.extend((0..n).map(|c| if c == r { l.clone() } else { BigInt::zero() }));
                row
            })
            .collect();
        let (rows, pivots) = reduce_rows(rows, n);
        if pivots.len() != n {
            return None;
        }
        let data = rows
            .into_par_iter()
            .enumerate()
            .flat_map_iter(|(i, row)| {
                let pv = row[i].clone();
                row.into_iter().skip(n).map(move |x| BigRational::new(x, pv.clone()))
            })
            .collect();
        Some(ExactMatrix { rows: n, cols: n, data })
    }

    /// Determinant via Bareiss fraction-free elimination on the row-wise
    /// integer-scaled matrix.
    pub fn determinant(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Scalar::one();
        }
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|r| {
                let (row, l) = integer_row(self.row(r));
                scale *= l;
                row
            })
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Scalar::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        BigRational::new(sign * &a[n - 1][n - 1], scale)
    }

    /// Rank via the same integer reduction as [`nullspace`](Self::nullspace).
    pub fn rank(&self) -> usize {
        reduce_integer(self).1.len()
    }

    /// Basis of `{v : self * v = 0}` using fraction-free integer row
    /// reduction. Each basis vector has a 1 in one free column and zeros in
    /// the other free columns.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (rows, pivots) = reduce_integer(self);
        let pivot_cols: Vec<usize> = pivots.clone();
        (0..self.cols)
            .filter(|c| !pivot_cols.contains(c))
            .map(|free| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[free] = Scalar::one();
                for (row, &pc) in rows.iter().zip(&pivot_cols) {
                    if !row[free].is_zero() {
                        v[pc] = -BigRational::new(row[free].clone(), row[pc].clone());
                    }
                }
                v
            })
            .collect()
    }
}

impl serde::Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(crate::scalar::format).collect())
            .collect();
        let mut st = s.serialize_struct("ExactMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// Scales a rational row to integers; returns the row and the scale factor.
fn integer_row(row: &[Scalar]) -> (Vec<BigInt>, BigInt) {
    let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints = row.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    (ints, l)
}

fn primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Reduced row echelon form over the integers: every pivot column is zero
/// outside its pivot row. Returns the nonzero rows and their pivot columns.
fn reduce_integer(m: &ExactMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = (0..m.rows()).map(|r| integer_row(m.row(r)).0).collect();
    reduce_rows(rows, m.cols())
}

/// Integer RREF pivoting only in the first `pivot_cols` columns.
fn reduce_rows(rows: Vec<Vec<BigInt>>, pivot_cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut rows: Vec<Vec<BigInt>> = rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    rows.iter_mut().for_each(|r| primitive(r));
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..pivot_cols {
        if next == rows.len() {
            break;
        }
        // Smallest pivot keeps intermediate growth down.
        let Some(p) = (next..rows.len())
            .filter(|&r| !rows[r][col].is_zero())
            .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()))
        else {
            continue;
        };
        rows.swap(next, p);
        let pivot_row = rows[next].clone();
        let pv = pivot_row[col].clone();
        rows.par_iter_mut().enumerate().for_each(|(r, row)| {
            if r == next || row[col].is_zero() {
                return;
            }
            let g = pv.gcd(&row[col]);
            let (fp, fr) = (&pv / &g, &row[col] / &g);
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &fp - y * &fr;
            }
            primitive(row);
        });
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    (rows, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    #[test]
    fn inverse_and_determinant_agree() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.determinant(), int(18));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), ExactMatrix::identity(3));
    }

    #[test]
    fn singular_matrix() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert!(a.inverse().is_none());
        assert_eq!(a.determinant(), int(0));
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn determinant_needs_pivoting() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.determinant(), int(-1));
        let b = ExactMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(1, 5), ratio(1, 7)],
        ]);
        assert_eq!(b.determinant(), ratio(1, 14) - ratio(1, 15));
    }

    #[test]
    fn nullspace_basis() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert!(m(&[&[1, 0], &[0, 1]]).nullspace().is_empty());
    }

    proptest::proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-3i64..4, 12)) {
            let a = ExactMatrix::from_fn(3, 4, |r, c| int(entries[r * 4 + c]));
            let ns = a.nullspace();
            proptest::prop_assert_eq!(ns.len() + a.rank(), 4);
            for v in &ns {
                proptest::prop_assert!(a.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn inverse_iff_nonzero_determinant(entries in proptest::collection::vec(-4i64..5, 16)) {
            let a = ExactMatrix::from_fn(4, 4, |r, c| ratio(entries[r * 4 + c], 1 + (r + c) as i64));
            let det = a.determinant();
            match a.inverse() {
                Some(inv) => {
                    proptest::prop_assert!(!det.is_zero());
                    proptest::prop_assert_eq!(a.mul(&inv), ExactMatrix::identity(4));
                }
                None => proptest::prop_assert!(det.is_zero()),
            }
        }
    }
}
