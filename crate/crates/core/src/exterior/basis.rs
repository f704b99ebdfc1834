//! Index sets `I ⊂ {0..n-1}` stored as bitmasks, their lexicographic ranks
//! and the permutation signs needed to merge them.
//!
//! Index `j` (0-based) stands for the coordinate `z_{j+1}`.

use crate::MAX_N;

/// Binomial coefficient, zero when `k > n`.
pub const fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1;
    let mut i = 0;
    while i < k {
        r = r * (n - i) / (i + 1);
        i += 1;
    }
    r
}

struct Tables {
    // subsets[n][k][rank] = mask
    subsets: [[[u8; 6]; MAX_N + 1]; MAX_N + 1],
    // rank[n][mask]
    rank: [[u8; 1 << MAX_N]; MAX_N + 1],
}

// Lexicographic comparison of two equal-size sets: the smaller set owns the
// least element of the symmetric difference.
const fn lex_less(a: u32, b: u32) -> bool {
    let d = a ^ b;
    if d == 0 {
        return false;
    }
    let low = d & d.wrapping_neg();
    a & low != 0
}

const fn build() -> Tables {
    let mut t = Tables { subsets: [[[0; 6]; MAX_N + 1]; MAX_N + 1], rank: [[0; 1 << MAX_N]; MAX_N + 1] };
    let mut n = 0;
    while n <= MAX_N {
        let mut mask: u32 = 0;
        while mask < (1 << n) {
            let k = mask.count_ones();
            let mut r = 0;
            let mut other: u32 = 0;
            while other < (1 << n) {
                if other.count_ones() == k && lex_less(other, mask) {
                    r += 1;
                }
                other += 1;
            }
            t.rank[n][mask as usize] = r as u8;
            t.subsets[n][k as usize][r] = mask as u8;
            mask += 1;
        }
        n += 1;
    }
    t
}

static TABLES: Tables = build();

/// The `rank`-th `k`-subset of `{0..n-1}` in lexicographic order, as a bitmask.
#[inline]
pub fn subset(n: usize, k: usize, rank: usize) -> u8 {
    TABLES.subsets[n][k][rank]
}

/// Lexicographic rank of `mask` among subsets of the same size.
#[inline]
pub fn rank(n: usize, mask: u8) -> usize {
    TABLES.rank[n][mask as usize] as usize
}

/// Number of elements of `mask` strictly below `j`.
#[inline]
pub fn below(mask: u8, j: usize) -> u32 {
    (mask as u32 & ((1u32 << j) - 1)).count_ones()
}

/// Sign of the permutation sorting the concatenation `a ++ b` of two disjoint
/// increasing index lists.
#[inline]
pub fn merge_sign(a: u8, b: u8) -> f64 {
    let mut inv = 0;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        inv += (a as u32 >> (y + 1)).count_ones();
        rest &= rest - 1;
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign `s` with `(dz_{I1}∧dz̄_{J1}) ∧ (dz_{I2}∧dz̄_{J2}) = s · dz_{I1∪I2}∧dz̄_{J1∪J2}`,
/// or `None` when the product vanishes.
#[inline]
pub fn wedge_sign(i1: u8, j1: u8, i2: u8, j2: u8) -> Option<f64> {
    if i1 & i2 != 0 || j1 & j2 != 0 {
        return None;
    }
    let cross = if (j1.count_ones() * i2.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
    Some(cross * merge_sign(i1, i2) * merge_sign(j1, j2))
}

/// Indices of a bitmask in increasing order.
pub fn indices(mask: u8) -> impl Iterator<Item = usize> {
    (0..8).filter(move |j| mask & (1 << j) != 0)
}

/// The pair `(I, J)` labelling the coordinate monomial `dz_I ∧ dz̄_J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndexPair {
    /// Holomorphic indices `I` as a bitmask.
    pub holo: u8,
    /// Antiholomorphic indices `J` as a bitmask.
    pub anti: u8,
}

impl MultiIndexPair {
    /// All pairs of bidegree `(p, q)` in storage order: `I` major, `J` minor,
    /// both lexicographic.
    pub fn enumerate(n: usize, p: usize, q: usize) -> alloc::vec::Vec<MultiIndexPair> {
        let (dp, dq) = (binom(n, p), binom(n, q));
        let mut v = alloc::vec::Vec::with_capacity(dp * dq);
        for a in 0..dp {
            for b in 0..dq {
                v.push(MultiIndexPair { holo: subset(n, p, a), anti: subset(n, q, b) });
            }
        }
        v
    }

    /// Storage position of this pair inside a `(p, q)` coefficient array.
    pub fn position(&self, n: usize) -> usize {
        let q = self.anti.count_ones() as usize;
        rank(n, self.holo) * binom(n, q) + rank(n, self.anti)
    }

    /// Holomorphic indices, increasing, 0-based.
    pub fn holo_indices(&self) -> impl Iterator<Item = usize> {
        indices(self.holo)
    }

    /// Antiholomorphic indices, increasing, 0-based.
    pub fn anti_indices(&self) -> impl Iterator<Item = usize> {
        indices(self.anti)
    }
}
