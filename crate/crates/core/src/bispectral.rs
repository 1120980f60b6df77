//! Difference operators in the frequency variables and local matrices
//! commuting with the kernel.
//!
//! The frequency-space operator is obtained by exact conjugation
//! `B = P D P^{-1}`, where `P` is the polynomial value matrix and `D` is
//! multiplication by `cx x + cy y` on physical states. Its locality is then
//! checked, not assumed.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{build_kernel, KernelMatrix};
use crate::matrix::ExactMatrix;
use crate::params::{ChainParams, ParamSet};
use crate::polyeval::{build_poly_matrix, PolyValueMatrix};
use crate::reference::{self, N3_COMMUTANT_NAMES};
use crate::scalar::{self, int, Scalar};
use crate::statespace::{State, StateSpace, StencilPattern};

pub fn multiplication_diagonal(space: &StateSpace, cx: &Scalar, cy: &Scalar) -> ExactMatrix {
    let diag: Vec<Scalar> = space
        .states()
        .iter()
        .map(|s| cx * int(s.x as i64) + cy * int(s.y as i64))
        .collect();
    ExactMatrix::diagonal(&diag)
}

/// `P D P^{-1}`; the unique `B` with `B P = P D`.
pub fn conjugate_operator(pm: &PolyValueMatrix, d: &ExactMatrix) -> ExactMatrix {
    pm.matrix.mul(d).mul(&pm.inverse())
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    #[serde(with = "scalar::as_str")]
    pub value: Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct StencilReport {
    pub max_nonzeros_per_row: usize,
    pub violations: Vec<Violation>,
    pub conforms: bool,
}

pub fn locality_check(m: &ExactMatrix, pattern: &StencilPattern) -> StencilReport {
    assert_eq!(m.rows(), pattern.dim(), "pattern dimension mismatch");
    let violations: Vec<Violation> = (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| !m[(r, c)].is_zero() && !pattern.contains(r, c))
        .map(|(r, c)| Violation { row: r, col: c, value: m[(r, c)].clone() })
        .collect();
    let max_nonzeros_per_row = (0..m.rows()).map(|r| m.row_nonzeros(r)).max().unwrap_or(0);
    StencilReport { max_nonzeros_per_row, conforms: violations.is_empty(), violations }
}

/// Offsets `(dm, dn)` between a row state and the column states holding
/// nonzero entries, over all rows.
pub fn stencil_shape(m: &ExactMatrix, space: &StateSpace) -> Vec<(i64, i64)> {
    let mut offsets = BTreeSet::new();
    for r in 0..m.rows() {
        let a = space.state(r);
        for c in 0..m.cols() {
            if !m[(r, c)].is_zero() {
                let b = space.state(c);
                offsets.insert((b.x as i64 - a.x as i64, b.y as i64 - a.y as i64));
            }
        }
    }
    offsets.into_iter().collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BispectralOperator {
    pub size: usize,
    pub params: ParamSet,
    pub space: StateSpace,
    #[serde(with = "scalar::as_str")]
    pub cx: Scalar,
    #[serde(with = "scalar::as_str")]
    pub cy: Scalar,
    pub matrix: ExactMatrix,
    pub stencil: StencilReport,
    pub row_sums_zero: bool,
    /// `B P - P D` is the zero matrix.
    pub intertwining_exact: bool,
}

/// Operator for multiplication by `cx x + cy y`, with its stencil checked
/// against the adjacency-plus-diagonal pattern.
pub fn operator_for(pm: &PolyValueMatrix, cx: &Scalar, cy: &Scalar) -> BispectralOperator {
    let d = multiplication_diagonal(&pm.space, cx, cy);
    let b = conjugate_operator(pm, &d);
    let intertwining_exact = b.mul(&pm.matrix).sub(&pm.matrix.mul(&d)).is_zero();
    let stencil = locality_check(&b, &pm.space.adjacency(true));
    BispectralOperator {
        size: pm.size(),
        params: pm.params.clone(),
        space: pm.space.clone(),
        cx: cx.clone(),
        cy: cy.clone(),
        row_sums_zero: b.row_sums().iter().all(Zero::is_zero),
        matrix: b,
        stencil,
        intertwining_exact,
    }
}

/// Coefficients of the five-point function `(p1+p2) x - (p3+p4) y`.
pub fn five_point_coefficients(p: &ParamSet) -> (Scalar, Scalar) {
    (&p.p1 + &p.p2, -(&p.p3 + &p.p4))
}

pub fn solve_bispectral(size: usize, p: &ParamSet) -> Result<BispectralOperator> {
    p.validate()?;
    let pm = build_poly_matrix(size, p)?;
    let (cx, cy) = five_point_coefficients(p);
    Ok(operator_for(&pm, &cx, &cy))
}

#[derive(Debug, Clone, Serialize)]
pub struct SevenPointOperators {
    pub size: usize,
    pub params: ParamSet,
    pub bx: ExactMatrix,
    pub by: ExactMatrix,
    pub bx_max_nonzeros: usize,
    pub by_max_nonzeros: usize,
    pub bx_shape: Vec<(i64, i64)>,
    pub by_shape: Vec<(i64, i64)>,
    /// `(p1+p2) Bx - (p3+p4) By` equals the five-point operator.
    pub linear_consistency: bool,
}

pub fn seven_point_operators(size: usize, p: &ParamSet) -> Result<SevenPointOperators> {
    p.validate()?;
    let pm = build_poly_matrix(size, p)?;
    let inv = pm.inverse();
    let conj = |d: &ExactMatrix| pm.matrix.mul(d).mul(&inv);
    let bx = conj(&multiplication_diagonal(&pm.space, &int(1), &int(0)));
    let by = conj(&multiplication_diagonal(&pm.space, &int(0), &int(1)));
    let (cx, cy) = five_point_coefficients(p);
    let b = conj(&multiplication_diagonal(&pm.space, &cx, &cy));
    let linear_consistency = bx.scale(&cx).add(&by.scale(&cy)) == b;
    let max_nz = |m: &ExactMatrix| (0..m.rows()).map(|r| m.row_nonzeros(r)).max().unwrap_or(0);
    Ok(SevenPointOperators {
        size,
        params: p.clone(),
        bx_max_nonzeros: max_nz(&bx),
        by_max_nonzeros: max_nz(&by),
        bx_shape: stencil_shape(&bx, &pm.space),
        by_shape: stencil_shape(&by, &pm.space),
        bx,
        by,
        linear_consistency,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryComparison {
    pub name: String,
    pub row: State,
    pub col: State,
    #[serde(with = "scalar::as_str")]
    pub computed: Scalar,
    #[serde(with = "scalar::as_str")]
    pub expected: Scalar,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceComparison {
    pub size: usize,
    pub entries: Vec<EntryComparison>,
    /// Nonzero computed entries at positions the reference leaves at zero.
    pub unexpected_nonzeros: Vec<Violation>,
    pub pass: bool,
}

impl ReferenceComparison {
    fn new(size: usize, entries: Vec<EntryComparison>, unexpected_nonzeros: Vec<Violation>) -> Self {
        let pass = entries.iter().all(|e| e.matches) && unexpected_nonzeros.is_empty();
        ReferenceComparison { size, entries, unexpected_nonzeros, pass }
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &EntryComparison> {
        self.entries.iter().filter(|e| !e.matches)
    }
}

/// Compares the computed N=5 operator with the closed-form entries, the
/// diagonal `s_i` completed by zero row sums.
pub fn reproduce_reference_b(p: &ParamSet) -> Result<(BispectralOperator, ReferenceComparison)> {
    p.validate_generic()?;
    let values = reference::n5_values(p)?;
    let op = solve_bispectral(5, p)?;
    let space = &op.space;
    let b = &op.matrix;

    let mut entries = Vec::with_capacity(values.len() + reference::N5_DIM);
    let mut listed = BTreeSet::new();
    let mut row_sums = vec![Scalar::zero(); reference::N5_DIM];
    for (ent, expected) in values {
        listed.insert((ent.row, ent.col));
        row_sums[ent.row] += &expected;
        let computed = b[(ent.row, ent.col)].clone();
        entries.push(EntryComparison {
            name: ent.name.to_string(),
            row: space.state(ent.row),
            col: space.state(ent.col),
            matches: computed == expected,
            computed,
            expected,
        });
    }
    for (r, sum) in row_sums.into_iter().enumerate() {
        listed.insert((r, r));
        let expected = -sum;
        let computed = b[(r, r)].clone();
        entries.push(EntryComparison {
            name: format!("s_{}", r + 1),
            row: space.state(r),
            col: space.state(r),
            matches: computed == expected,
            computed,
            expected,
        });
    }
    let unexpected = (0..b.rows())
        .flat_map(|r| (0..b.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| !listed.contains(&(r, c)) && !b[(r, c)].is_zero())
        .map(|(r, c)| Violation { row: r, col: c, value: b[(r, c)].clone() })
        .collect();
    Ok((op, ReferenceComparison::new(5, entries, unexpected)))
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutantBasis {
    pub size: usize,
    pub chain: ChainParams,
    pub pattern: StencilPattern,
    pub basis: Vec<ExactMatrix>,
    pub dimension: usize,
    pub identity_in_span: bool,
    pub all_commute: bool,
}

impl CommutantBasis {
    /// A basis element that is not a multiple of the identity.
    pub fn nontrivial_element(&self) -> Option<&ExactMatrix> {
        self.basis.iter().find(|m| !is_scalar_matrix(m))
    }
}

fn is_scalar_matrix(m: &ExactMatrix) -> bool {
    let d = &m[(0, 0)];
    (0..m.rows()).all(|r| (0..m.cols()).all(|c| if r == c { m[(r, c)] == *d } else { m[(r, c)].is_zero() }))
}

/// Solves `M K - K M = 0` for `M` supported on `pattern`.
pub fn discover_commutant(k: &KernelMatrix, pattern: &StencilPattern) -> CommutantBasis {
    let km = &k.matrix;
    let n = km.rows();
    assert_eq!(pattern.dim(), n, "pattern dimension mismatch");
    let unknowns: Vec<(usize, usize)> = pattern.positions().collect();

    // (MK - KM)[r][c] = sum_j M[r][j] K[j][c] - sum_i K[r][i] M[i][c].
    let mut system = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let row: Vec<Scalar> = unknowns
                .iter()
                .map(|&(i, j)| {
                    let mut v = Scalar::zero();
                    if i == r {
                        v += &km[(j, c)];
                    }
                    if j == c {
                        v -= &km[(r, i)];
                    }
                    v
                })
                .collect();
            if row.iter().any(|v| !v.is_zero()) {
                system.push(row);
            }
        }
    }
    let null = if system.is_empty() {
        ExactMatrix::identity(unknowns.len()).to_rows()
    } else {
        ExactMatrix::from_rows(system).nullspace()
    };

    let to_matrix = |v: &[Scalar]| {
        let mut m = ExactMatrix::zeros(n, n);
        for (&(i, j), x) in unknowns.iter().zip(v) {
            m[(i, j)] = x.clone();
        }
        m
    };
    let basis: Vec<ExactMatrix> = null.iter().map(|v| to_matrix(v)).collect();
    let all_commute = basis.iter().all(|m| m.mul(km) == km.mul(m));

    let identity_in_span = pattern.includes_diagonal() && {
        let ident: Vec<Scalar> =
            unknowns.iter().map(|&(i, j)| if i == j { Scalar::one() } else { Scalar::zero() }).collect();
        let mut stacked = null.clone();
        let before = ExactMatrix::from_rows(stacked.clone()).rank();
        stacked.push(ident);
        !null.is_empty() && ExactMatrix::from_rows(stacked).rank() == before
    };

    CommutantBasis {
        size: k.size(),
        chain: k.params.clone(),
        pattern: pattern.clone(),
        dimension: basis.len(),
        basis,
        identity_in_span,
        all_commute,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Anchor {
    pub row: usize,
    pub col: usize,
    pub value: i64,
}

/// Default gauge: last diagonal entry 0, entry `(0, index of (0,1))` equal
/// to `N`.
pub fn default_anchors(space: &StateSpace) -> [Anchor; 2] {
    let last = space.len() - 1;
    let up = space.index_of(State::new(0, 1)).expect("(0,1) is in every simplex");
    [Anchor { row: last, col: last, value: 0 }, Anchor { row: 0, col: up, value: space.size() as i64 }]
}

/// Finds `a M + b I` meeting both anchors.
pub fn normalize_gauge(m: &ExactMatrix, anchors: &[Anchor]) -> Result<ExactMatrix> {
    let [first, second] = anchors else {
        return Err(Error::GaugeUnsolvable(format!("need exactly 2 anchors, got {}", anchors.len())));
    };
    for a in [first, second] {
        if a.row >= m.rows() || a.col >= m.cols() {
            return Err(Error::GaugeUnsolvable(format!("anchor ({}, {}) out of range", a.row, a.col)));
        }
    }
    let delta = |a: &Anchor| if a.row == a.col { Scalar::one() } else { Scalar::zero() };
    let (m11, m12, v1) = (m[(first.row, first.col)].clone(), delta(first), int(first.value));
    let (m21, m22, v2) = (m[(second.row, second.col)].clone(), delta(second), int(second.value));
    let det = &m11 * &m22 - &m12 * &m21;
    if det.is_zero() {
        return Err(Error::GaugeUnsolvable("anchor system is singular".into()));
    }
    let a = (&v1 * &m22 - &m12 * &v2) / &det;
    let b = (&m11 * &v2 - &m21 * &v1) / &det;
    Ok(m.affine(&a, &b))
}

/// Discovers the N=3 local commutant, normalizes it to `x34 = 0`, `x3 = 3`,
/// and compares it entry by entry with the closed forms.
pub fn reproduce_reference_commutant(cp: &ChainParams) -> Result<(CommutantBasis, ReferenceComparison)> {
    let expected = reference::n3_commutant_values(cp)?;
    let kernel = build_kernel(3, cp)?;
    let space = kernel.space.clone();
    let pattern = space.adjacency(true);
    let basis = discover_commutant(&kernel, &pattern);
    if basis.dimension != 2 {
        let cmp = ReferenceComparison {
            size: 3,
            entries: Vec::new(),
            unexpected_nonzeros: Vec::new(),
            pass: false,
        };
        return Ok((basis, cmp));
    }
    let element = basis
        .nontrivial_element()
        .ok_or_else(|| Error::GaugeUnsolvable("commutant holds only multiples of the identity".into()))?;
    let anchors = [Anchor { row: 9, col: 9, value: 0 }, Anchor { row: 0, col: 4, value: 3 }];
    let m = normalize_gauge(element, &anchors)?;

    let entries = pattern
        .positions()
        .zip(expected)
        .zip(N3_COMMUTANT_NAMES)
        .map(|(((r, c), expected), name)| {
            let computed = m[(r, c)].clone();
            EntryComparison {
                name: name.to_string(),
                row: space.state(r),
                col: space.state(c),
                matches: computed == expected,
                computed,
                expected,
            }
        })
        .collect();
    let unexpected = locality_check(&m, &pattern).violations;
    Ok((basis, ReferenceComparison::new(3, entries, unexpected)))
}
