//! The discrete simplex `{(x, y) : x, y >= 0, x + y <= N}`.
//!
//! States are ordered in blocks of increasing `y`, and by increasing `x`
//! inside a block. The same ordering indexes physical states `(x, y)` and
//! frequency states `(m, n)`.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub x: usize,
    pub y: usize,
}

impl State {
    pub const fn new(x: usize, y: usize) -> Self {
        State { x, y }
    }

    fn manhattan(&self, other: &State) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl std::fmt::Display for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSpace {
    size: usize,
    states: Vec<State>,
}

impl StateSpace {
    pub fn enumerate(size: usize) -> Result<Self> {
        if size < 1 {
            return Err(Error::InvalidSize(size));
        }
        let states = (0..=size)
            .flat_map(|y| (0..=size - y).map(move |x| State::new(x, y)))
            .collect();
        Ok(StateSpace { size, states })
    }

    /// The simplex size `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, index: usize) -> State {
        self.states[index]
    }

    pub fn contains(&self, s: State) -> bool {
        s.x + s.y <= self.size
    }

    /// Position of `s`; blocks `y' < y` hold `N + 1 - y'` states each.
    pub fn index_of(&self, s: State) -> Option<usize> {
        if !self.contains(s) {
            return None;
        }
        let n = self.size;
        let before = s.y * (n + 1) - s.y * (s.y.saturating_sub(1)) / 2;
        Some(before + s.x)
    }

    pub fn adjacency(&self, with_diagonal: bool) -> StencilPattern {
        let mut allowed = BTreeSet::new();
        for (r, a) in self.states.iter().enumerate() {
            for (c, b) in self.states.iter().enumerate() {
                let d = a.manhattan(b);
                if d == 1 || (with_diagonal && d == 0) {
                    allowed.insert((r, c));
                }
            }
        }
        StencilPattern { dim: self.len(), allowed, includes_diagonal: with_diagonal }
    }

    pub fn neighbours(&self, s: State) -> Vec<State> {
        self.states.iter().copied().filter(|t| t.manhattan(&s) == 1).collect()
    }
}

/// A set of allowed `(row, column)` positions in a square matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StencilPattern {
    dim: usize,
    allowed: BTreeSet<(usize, usize)>,
    includes_diagonal: bool,
}

impl StencilPattern {
    pub fn diagonal(dim: usize) -> Self {
        StencilPattern {
            dim,
            allowed: (0..dim).map(|i| (i, i)).collect(),
            includes_diagonal: true,
        }
    }

    pub fn full(dim: usize) -> Self {
        StencilPattern {
            dim,
            allowed: (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).collect(),
            includes_diagonal: true,
        }
    }

    pub fn from_positions(dim: usize, positions: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let allowed: BTreeSet<_> = positions.into_iter().collect();
        let includes_diagonal = (0..dim).all(|i| allowed.contains(&(i, i)));
        StencilPattern { dim, allowed, includes_diagonal }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn includes_diagonal(&self) -> bool {
        self.includes_diagonal
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.allowed.contains(&(r, c))
    }

    /// Allowed positions in row-major order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.allowed.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn row_count(&self, r: usize) -> usize {
        self.allowed.range((r, 0)..(r + 1, 0)).count()
    }
}

impl Serialize for StencilPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let positions: Vec<[usize; 2]> = self.allowed.iter().map(|&(r, c)| [r, c]).collect();
        positions.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(space: &StateSpace) -> Vec<(usize, usize)> {
        space.states().iter().map(|s| (s.x, s.y)).collect()
    }

    #[test]
    fn ordering_n5() {
        let space = StateSpace::enumerate(5).unwrap();
        let expected = [
            (0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (5, 0), (0, 1), (1, 1), (2, 1), (3, 1), (4, 1),
            (0, 2), (1, 2), (2, 2), (3, 2), (0, 3), (1, 3), (2, 3), (0, 4), (1, 4), (0, 5),
        ];
        assert_eq!(pairs(&space), expected);
    }

    #[test]
    fn ordering_n3_and_n1() {
        let space = StateSpace::enumerate(3).unwrap();
        let expected =
            [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (0, 3)];
        assert_eq!(pairs(&space), expected);
        assert_eq!(pairs(&StateSpace::enumerate(1).unwrap()), [(0, 0), (1, 0), (0, 1)]);
        assert!(matches!(StateSpace::enumerate(0), Err(Error::InvalidSize(0))));
    }

    #[test]
    fn index_roundtrip() {
        for n in 1..=9 {
            let space = StateSpace::enumerate(n).unwrap();
            assert_eq!(space.len(), (n + 1) * (n + 2) / 2);
            for (i, s) in space.states().iter().enumerate() {
                assert_eq!(space.index_of(*s), Some(i));
            }
            assert_eq!(space.index_of(State::new(n, 1)), None);
        }
    }

    #[test]
    fn neighbour_counts() {
        for n in 2..=8 {
            let space = StateSpace::enumerate(n).unwrap();
            let pat = space.adjacency(false);
            for (i, s) in space.states().iter().enumerate() {
                let far_corner = *s == State::new(n, 0) || *s == State::new(0, n);
                let expected = if far_corner {
                    1
                } else if s.x + s.y == n || *s == State::new(0, 0) {
                    2
                } else if s.x == 0 || s.y == 0 {
                    3
                } else {
                    4
                };
                assert_eq!(pat.row_count(i), expected, "state {s} at N={n}");
            }
        }
        let space = StateSpace::enumerate(1).unwrap();
        assert_eq!(space.neighbours(State::new(0, 0)), vec![State::new(1, 0), State::new(0, 1)]);
    }

    #[test]
    fn n3_pattern_has_34_entries() {
        let pat = StateSpace::enumerate(3).unwrap().adjacency(true);
        assert_eq!(pat.len(), 34);
        assert!(pat.includes_diagonal());
        // First row of the 10x10 local matrix: positions 0, 1 and 4.
        let first: Vec<_> = pat.positions().take_while(|&(r, _)| r == 0).map(|(_, c)| c).collect();
        assert_eq!(first, vec![0, 1, 4]);
    }
}
