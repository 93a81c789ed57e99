//! Fibonacci numeration for sector-tree coordinates.
//!
//! The sequence is indexed from 1 with `f(1) = 1`, `f(2) = 2`, so it runs
//! 1, 2, 3, 5, 8, 13, 21, ...  Level `l` of one sector tree holds exactly
//! `f(2l + 1)` cells, which is what ties the numeration to the grid: a cell's
//! in-sector number ν determines its level through the cumulative populations,
//! and ν itself is written in the maximal (greedy) Fibonacci representation.
//!
//! Everything is plain `u64` arithmetic with explicit overflow errors; the
//! sequence leaves `u64` at index 93.

use std::fmt;
use thiserror::Error;

/// Errors from the numeration routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibError {
    /// The requested value does not fit in `u64`.
    #[error("fibonacci value at index {0} overflows u64")]
    Overflow(u32),
    /// The sequence is indexed from 1.
    #[error("fibonacci index must be at least 1")]
    IndexZero,
    /// ν = 0 names the central cell, which lives in no sector tree.
    #[error("node number 0 is reserved for the central cell")]
    NuZero,
    /// Digit strings may contain only `0` and `1`.
    #[error("invalid digit {0:?} in a fibonacci representation")]
    BadDigit(char),
}

/// `f(n)` with `f(1) = 1`, `f(2) = 2`.
pub fn fib(n: u32) -> Result<u64, FibError> {
    if n == 0 {
        return Err(FibError::IndexZero);
    }
    let (mut a, mut b) = (1u64, 2u64); // f(1), f(2)
    for _ in 2..n {
        let next = a.checked_add(b).ok_or(FibError::Overflow(n))?;
        a = b;
        b = next;
    }
    Ok(if n == 1 { a } else { b })
}

/// Number of cells on level `level` of one sector tree: `f(2·level + 1)`.
pub fn level_population(level: u32) -> Result<u64, FibError> {
    fib(2 * level + 1)
}

/// Number of cells of one sector tree up to and including `level`.
///
/// The cumulative sum telescopes to `f(2·level + 2) - 1`.
pub fn sector_population(level: u32) -> Result<u64, FibError> {
    Ok(fib(2 * level + 2)? - 1)
}

///// Total cell count of a region: the central cell plus seven sector trees.
pub fn region_population(level: u32) -> Result<u64, FibError> {
    7u64.checked_mul(sector_population(level)?)
        .and_then(|n| n.checked_add(1))
        .ok_or(FibError::Overflow(2 * level + 2))
}

/// First in-sector number ν on `level` (the root is ν = 1).
pub fn level_first(level: u32) -> Result<u64, FibError> {
    if level == 0 {
        Ok(1)
    } else {
        Ok(sector_population(level - 1)? + 1)
    }
}

/// The level of the sector-tree cell numbered ν (ν = 1 is the root).
pub fn level_of(nu: u64) -> Result<u32, FibError> {
    if nu == 0 {
        return Err(FibError::NuZero);
    }
    let mut level = 0;
    while sector_population(level)? < nu {
        level += 1;
    }
    Ok(level)
}

/// A Fibonacci representation: one bit per basis element `f(1), f(2), ...`,
/// most significant digit first, with value `Σ digit_k · f(k)`.
///
/// Values produced by [`to_maximal_fib`] are in maximal (greedy) form, which
/// never has two adjacent 1-digits. Zero is the empty string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FibDigits {
    bits: Vec<bool>, // bits[0] is the most significant digit
}

impl FibDigits {
    /// Parses a digit string like `"101"`. Leading zeros are stripped.
    pub fn parse(s: &str) -> Result<Self, FibError> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(FibError::BadDigit(c)),
            }
        }
        let lead = bits.iter().position(|&b| b).unwrap_or(bits.len());
        bits.drain(..lead);
        Ok(FibDigits { bits })
    }

    /// The digits, most significant first.
    pub fn digits(&self) -> &[bool] {
        &self.bits
    }

    /// `Σ digit_k · f(k)`, overflow-checked.
    pub fn value(&self) -> Result<u64, FibError> {
        let n = self.bits.len() as u32;
        let mut total = 0u64;
        for (i, &bit) in self.bits.iter().enumerate() {
            if bit {
                total = total
                    .checked_add(fib(n - i as u32)?)
                    .ok_or(FibError::Overflow(n))?;
            }
        }
        Ok(total)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }
}

impl fmt::Display for FibDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The maximal Fibonacci representation of `n`: repeatedly take the largest
/// basis element that still fits. Among all representations of `n` this is
/// the lexicographically greatest (aligned at the most significant digit),
/// and it never uses two adjacent basis elements.
pub fn to_maximal_fib(n: u64) -> FibDigits {
    if n == 0 {
        return FibDigits { bits: Vec::new() };
    }
    // collect the basis up to the largest f(k) <= n
    let mut basis = vec![1u64, 2u64];
    while let Some(next) = basis[basis.len() - 1].checked_add(basis[basis.len() - 2]) {
        if next > n {
            break;
        }
        basis.push(next);
    }
    while basis[basis.len() - 1] > n {
        basis.pop();
    }
    let mut bits = vec![false; basis.len()];
    let mut rest = n;
    for (i, &f) in basis.iter().enumerate().rev() {
        if f <= rest {
            bits[basis.len() - 1 - i] = true;
            rest -= f;
        }
    }
    debug_assert_eq!(rest, 0);
    FibDigits { bits }
}

/// Value of a digit string over the Fibonacci basis; inverse of
/// [`to_maximal_fib`] on maximal-form strings, defined on any 0/1 string.
pub fn from_fib(digits: &str) -> Result<u64, FibError> {
    FibDigits::parse(digits)?.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_seeds_and_recurrence() {
        assert_eq!(fib(0), Err(FibError::IndexZero));
        assert_eq!(fib(1), Ok(1));
        assert_eq!(fib(2), Ok(2));
        assert_eq!(fib(3), Ok(3));
        assert_eq!(fib(7), Ok(21));
        for n in 3..40 {
            assert_eq!(fib(n).unwrap(), fib(n - 1).unwrap() + fib(n - 2).unwrap());
        }
    }

    #[test]
    fn overflow_is_an_error_not_a_wrap() {
        assert!(fib(92).is_ok());
        assert_eq!(fib(93), Err(FibError::Overflow(93)));
    }

    #[test]
    fn level_populations() {
        let pops: Vec<u64> = (0..7).map(|l| level_population(l).unwrap()).collect();
        assert_eq!(pops, [1, 3, 8, 21, 55, 144, 377]);
    }

    #[test]
    fn cumulative_populations_match_direct_sums() {
        for level in 0..12 {
            let direct: u64 = (0..=level).map(|l| level_population(l).unwrap()).sum();
            assert_eq!(sector_population(level).unwrap(), direct);
        }
        let totals: Vec<u64> = (0..7).map(|l| region_population(l).unwrap()).collect();
        assert_eq!(totals, [8, 29, 85, 232, 617, 1625, 4264]);
    }

    #[test]
    fn level_of_inverts_the_cumulative_table() {
        assert_eq!(level_of(0), Err(FibError::NuZero));
        assert_eq!(level_of(1), Ok(0));
        assert_eq!(level_of(2), Ok(1));
        assert_eq!(level_of(4), Ok(1));
        assert_eq!(level_of(5), Ok(2));
        assert_eq!(level_of(12), Ok(2));
        assert_eq!(level_of(13), Ok(3));
        for level in 0..10 {
            let first = level_first(level).unwrap();
            let last = sector_population(level).unwrap();
            assert_eq!(level_of(first).unwrap(), level);
            assert_eq!(level_of(last).unwrap(), level);
        }
    }

    #[test]
    fn maximal_representation_examples() {
        assert_eq!(to_maximal_fib(0).to_string(), "");
        assert_eq!(to_maximal_fib(4).to_string(), "101");
        assert_eq!(to_maximal_fib(5).to_string(), "1000");
        assert_eq!(from_fib("").unwrap(), 0);
        assert_eq!(from_fib("101").unwrap(), 4);
        assert_eq!(from_fib("1000").unwrap(), 5);
        assert_eq!(from_fib("2"), Err(FibError::BadDigit('2')));
    }

    #[test]
    fn round_trip_and_no_adjacent_ones() {
        for n in 0..10_000u64 {
            let d = to_maximal_fib(n);
            assert_eq!(d.value().unwrap(), n);
            assert_eq!(from_fib(&d.to_string()).unwrap(), n);
            let bits = d.digits();
            assert!(bits.windows(2).all(|w| !(w[0] && w[1])), "adjacent ones in {d} for {n}");
            if !bits.is_empty() {
                assert!(bits[0], "leading zero in {d} for {n}");
            }
        }
    }

    /// Brute-force oracle: enumerate every 0/1 vector over the basis and check
    /// the greedy answer is the lexicographically greatest representation when
    /// all candidates are aligned at the most significant digit.
    #[test]
    fn greedy_is_lexicographically_maximal() {
        let basis: Vec<u64> = (1..12).map(|k| fib(k).unwrap()).collect(); // up to f(11) = 233
        for n in 1..=232u64 {
            let mut best: Option<Vec<bool>> = None;
            for mask in 0u32..(1 << basis.len()) {
                let sum: u64 = basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, f)| f)
                    .sum();
                if sum != n {
                    continue;
                }
                // digits over the full basis, most significant first
                let cand: Vec<bool> = (0..basis.len()).rev().map(|i| mask >> i & 1 == 1).collect();
                if best.as_ref().is_none_or(|b| cand > *b) {
                    best = Some(cand);
                }
            }
            let oracle = best.expect("every n is representable");
            let greedy = to_maximal_fib(n);
            let mut padded = vec![false; basis.len() - greedy.len()];
            padded.extend_from_slice(greedy.digits());
            assert_eq!(padded, oracle, "n = {n}");
        }
    }

    #[test]
    fn parse_strips_leading_zeros() {
        let d = FibDigits::parse("00101").unwrap();
        assert_eq!(d.to_string(), "101");
        assert_eq!(d.value().unwrap(), 4);
    }
}
