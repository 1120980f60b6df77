//! Published closed-form entries used as reference values: the N=5
//! five-point operator and the N=3 local matrix commuting with the kernel.
//!
//! Every off-diagonal entry of the N=5 operator is an integer multiple of one
//! of four rational functions of `p`. With `S = p1+p2+p3+p4` and
//! `D = p1 p4 - p2 p3`:
//!
//! | family        | value                                   |
//! |---------------|-----------------------------------------|
//! | `LowerFirst`  | `k D / (p1+p3)`                         |
//! | `LowerSecond` | `-k D / (p2+p4)`                        |
//! | `RaiseFirst`  | `k p1 p3 (p2+p4) S / ((p1+p3) D)`       |
//! | `RaiseSecond` | `-k p2 p4 (p1+p3) S / ((p2+p4) D)`      |
//!
//! Diagonal entries are completed from the zero row-sum rule.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::params::{ChainParams, ParamSet};
use crate::scalar::{int, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    LowerFirst,
    LowerSecond,
    RaiseFirst,
    RaiseSecond,
}

#[derive(Debug, Clone, Copy)]
pub struct ClosedFormEntry {
    pub name: &'static str,
    pub row: usize,
    pub col: usize,
    pub family: Family,
    pub multiplier: i64,
}

const fn e(name: &'static str, row: usize, col: usize, family: Family, multiplier: i64) -> ClosedFormEntry {
    ClosedFormEntry { name, row, col, family, multiplier }
}

use Family::{LowerFirst as LF, LowerSecond as LS, RaiseFirst as RF, RaiseSecond as RS};

/// Off-diagonal entries of the N=5 operator, rows and columns zero-based in
/// simplex order.
pub const N5_ENTRIES: &[ClosedFormEntry] = &[
    e("a_1", 0, 1, RF, 5),
    e("b_1", 0, 6, RS, 5),
    e("a_2", 1, 0, LF, 1),
    e("c_2", 1, 2, RF, 4),
    e("d_2", 1, 7, RS, 4),
    e("a_3", 2, 1, LF, 2),
    e("c_3", 2, 3, RF, 3),
    e("d_3", 2, 8, RS, 3),
    e("a_4", 3, 2, LF, 3),
    e("c_4", 3, 4, RF, 2),
    e("d_4", 3, 9, RS, 2),
    e("a_5", 4, 3, LF, 4),
    e("c_5", 4, 5, RF, 1),
    e("e_5", 4, 10, RS, 1),
    e("a_6", 5, 4, LF, 5),
    e("d_7", 6, 0, LS, 1),
    e("c_7", 6, 7, RF, 4),
    e("a_7", 6, 11, RS, 4),
    e("a_8", 7, 1, LS, 1),
    e("b_8", 7, 6, LF, 1),
    e("d_8", 7, 8, RF, 3),
    e("e_8", 7, 12, RS, 3),
    e("e_9", 8, 2, LS, 1),
    e("c_9", 8, 7, LF, 2),
    e("a_9", 8, 9, RF, 2),
    e("d_9", 8, 13, RS, 2),
    e("d_10", 9, 3, LS, 1),
    e("a_10", 9, 8, LF, 3),
    e("c_10", 9, 10, RF, 1),
    e("e_10", 9, 14, RS, 1),
    e("b_11", 10, 4, LS, 1),
    e("a_11", 10, 9, LF, 4),
    e("a_12", 11, 6, LS, 2),
    e("d_12", 11, 12, RF, 3),
    e("c_12", 11, 15, RS, 3),
    e("c_13", 12, 7, LS, 2),
    e("a_13", 12, 11, LF, 1),
    e("d_13", 12, 13, RF, 2),
    e("e_13", 12, 16, RS, 2),
    e("d_14", 13, 8, LS, 2),
    e("a_14", 13, 12, LF, 2),
    e("c_14", 13, 14, RF, 1),
    e("e_14", 13, 17, RS, 1),
    e("a_15", 14, 9, LS, 2),
    e("c_15", 14, 13, LF, 3),
    e("a_16", 15, 11, LS, 3),
    e("c_16", 15, 16, RF, 2),
    e("d_16", 15, 18, RS, 2),
    e("e_17", 16, 12, LS, 3),
    e("a_17", 16, 15, LF, 1),
    e("c_17", 16, 17, RF, 1),
    e("d_17", 16, 19, RS, 1),
    e("a_18", 17, 13, LS, 3),
    e("c_18", 17, 16, LF, 2),
    e("c_19", 18, 15, LS, 4),
    e("a_19", 18, 19, RF, 1),
    e("d_19", 18, 20, RS, 1),
    e("a_20", 19, 16, LS, 4),
    e("c_20", 19, 18, LF, 1),
    e("a_21", 20, 18, LS, 5),
];

pub const N5_DIM: usize = 21;

pub fn family_value(p: &ParamSet, family: Family) -> Result<Scalar> {
    let cross = p.cross();
    if cross.is_zero() {
        return Err(Error::DegenerateParams(format!("p1*p4 = p2*p3 at {p}")));
    }
    p.validate()?;
    let s = p.sum();
    let s13 = &p.p1 + &p.p3;
    let s24 = &p.p2 + &p.p4;
    Ok(match family {
        Family::LowerFirst => &cross / &s13,
        Family::LowerSecond => -(&cross / &s24),
        Family::RaiseFirst => &p.p1 * &p.p3 * &s24 * &s / (&s13 * &cross),
        Family::RaiseSecond => -(&p.p2 * &p.p4 * &s13 * &s / (&s24 * &cross)),
    })
}

/// Off-diagonal N=5 entries evaluated at `p`, in table order.
pub fn n5_values(p: &ParamSet) -> Result<Vec<(ClosedFormEntry, Scalar)>> {
    let families = [Family::LowerFirst, Family::LowerSecond, Family::RaiseFirst, Family::RaiseSecond];
    let base: Vec<Scalar> = families.iter().map(|&f| family_value(p, f)).collect::<Result<_>>()?;
    let index = |f: Family| families.iter().position(|&g| g == f).unwrap();
    Ok(N5_ENTRIES
        .iter()
        .map(|ent| (*ent, int(ent.multiplier) * &base[index(ent.family)]))
        .collect())
}

/// Names of the 34 entries of the N=3 local commutant, row-major over the
/// adjacency-plus-diagonal pattern.
pub const N3_COMMUTANT_NAMES: [&str; 34] = [
    "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "x12", "x13", "x14", "x15",
    "x16", "x17", "x18", "x19", "x20", "x21", "x22", "x23", "x24", "x25", "x26", "x27", "x28", "x29",
    "x30", "x31", "x32", "x33", "x34",
];

/// Closed-form entries `x1..x34` of the N=3 local commutant, normalized so
/// that `x34 = 0` and `x3 = 3`.
pub fn n3_commutant_values(cp: &ChainParams) -> Result<[Scalar; 34]> {
    let (a1, a2, b1, b2) = (&cp.alpha1, &cp.alpha2, &cp.beta1, &cp.beta2);
    if a1.is_zero() || b2.is_zero() {
        return Err(Error::DegenerateParams(format!("alpha1 * beta2 = 0 at {cp}")));
    }
    let one = int(1);
    let q = a1 * b2;
    // (beta1 + beta2 - 1) appears in most entries.
    let g = b2 + b1 - &one;
    let a1m = a1 - &one;
    let a2m = a2 - &one;
    let diff = a2 - a1;

    let corner = (a1 * a2 * b2 - int(2) * a1 * b2 + a1 * a2 * b1 - a2 * b1 - a1 * b1 - a1 * a2 + a1) / &q;
    let ratio_b = a2 * b1 / &q;
    let retain = &a1m * a2 * &g / &q;
    let lower = &a2m * &g / b2;
    let spread = &diff * &g / &q;

    let x5 = (int(2) * a1 * a2 * b2 + a2 * b2 - int(5) * a1 * b2 + int(2) * a1 * a2 * b1 - a2 * b1
        - int(3) * a1 * b1
        - int(2) * a1 * a2
        - a2
        + int(3) * a1)
        / &q;
    let x9 = (a1 * a2 * b2 + int(2) * a2 * b2 - int(4) * a1 * b2 + a1 * a2 * b1 + a2 * b1
        - int(3) * a1 * b1
        - a1 * a2
        - int(2) * a2
        + int(3) * a1)
        / &q;
    let x20 = (a1 * a2 * b2 + a2 * b2 - int(3) * a1 * b2 + a1 * a2 * b1 - int(2) * a1 * b1 - a1 * a2 - a2
        + int(2) * a1)
        / &q;

    let k = |n: i64, v: &Scalar| int(n) * v;
    Ok([
        k(3, &corner),  // x1
        k(3, &ratio_b), // x2
        int(3),         // x3
        retain.clone(), // x4
        x5,             // x5
        k(2, &ratio_b), // x6
        int(2),         // x7
        k(2, &retain),  // x8
        x9,             // x9
        ratio_b.clone(), // x10
        int(1),          // x11
        k(3, &retain),   // x12
        k(3, &spread),   // x13
        lower.clone(),   // x14
        k(2, &corner),   // x15
        k(2, &ratio_b),  // x16
        int(2),          // x17
        lower.clone(),   // x18
        retain.clone(),  // x19
        x20,             // x20
        ratio_b.clone(), // x21
        int(1),          // x22
        lower.clone(),   // x23
        k(2, &retain),   // x24
        k(2, &spread),   // x25
        k(2, &lower),    // x26
        corner,          // x27
        ratio_b,         // x28
        int(1),          // x29
        k(2, &lower),    // x30
        retain,          // x31
        spread,          // x32
        k(3, &lower),    // x33
        int(0),          // x34
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use std::collections::HashSet;

    #[test]
    fn table_is_well_formed() {
        let positions: HashSet<_> = N5_ENTRIES.iter().map(|e| (e.row, e.col)).collect();
        assert_eq!(positions.len(), N5_ENTRIES.len());
        assert!(N5_ENTRIES.iter().all(|e| e.row != e.col && e.row < N5_DIM && e.col < N5_DIM));
        let names: HashSet<_> = N5_ENTRIES.iter().map(|e| e.name).collect();
        assert_eq!(names.len(), N5_ENTRIES.len());
        // a_1 .. a_21 each appear once.
        for i in 1..=21 {
            assert!(names.contains(format!("a_{i}").as_str()), "a_{i} missing");
        }
    }

    #[test]
    fn hand_values_at_1234() {
        let vals = n5_values(&ParamSet::from_ints([1, 2, 3, 4])).unwrap();
        let get = |n: &str| vals.iter().find(|(e, _)| e.name == n).unwrap().1.clone();
        assert_eq!(get("a_1"), ratio(-225, 2));
        assert_eq!(get("a_21"), ratio(5, 3));
        assert_eq!(get("b_1"), ratio(400, 3));
    }

    #[test]
    fn degenerate_cross_term() {
        assert!(matches!(
            n5_values(&ParamSet::from_ints([1, 2, 2, 4])),
            Err(Error::DegenerateParams(_))
        ));
    }

    #[test]
    fn commutant_hand_values() {
        let cp = ChainParams::new(ratio(1, 2), ratio(1, 3), ratio(1, 5), ratio(1, 7));
        let x = n3_commutant_values(&cp).unwrap();
        assert_eq!(x[1], ratio(14, 5));
        assert_eq!((x[2].clone(), x[16].clone(), x[28].clone()), (int(3), int(2), int(1)));
        assert_eq!(x[33], int(0));
        let bad = ChainParams::new(int(0), ratio(1, 3), ratio(1, 5), ratio(1, 7));
        assert!(n3_commutant_values(&bad).is_err());
    }
}
