//! Hafnians and loop hafnians by subset memoization.
//!
//! Both recurse on the lowest unmatched index `i` of a bitmask:
//! `hf(S) = sum_{j in S, j != i} F_ij hf(S \ {i, j})`, with the loop variant
//! adding the singleton term `mu_i lhf(S \ {i})`. Results are memoized per
//! subset in a dense table up to 20 indices and in a hash map up to 24;
//! larger inputs fall back to plain recursion.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

pub const DENSE_MEMO_LIMIT: usize = 20;
pub const HASH_MEMO_LIMIT: usize = 24;
/// Masks are `u32`, so this is also a hard structural limit.
pub const MAX_INDICES: usize = 32;

/// Sum over perfect matchings of `prod F_ij`. The diagonal is ignored.
pub fn hafnian(f: &CMatrix) -> Result<C64> {
    let n = f.nrows();
    if f.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.ncols(),
        });
    }
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    matchings(f, None)
}

/// Sum over all partial matchings: matched pairs contribute `F_ij`, unmatched
/// indices contribute `mu_i`.
pub fn loop_hafnian(f: &CMatrix, mu: &CVector) -> Result<C64> {
    let n = f.nrows();
    if f.ncols() != n || mu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mu.len(),
        });
    }
    matchings(f, Some(mu))
}

fn matchings(f: &CMatrix, mu: Option<&CVector>) -> Result<C64> {
    let n = f.nrows();
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if n > MAX_INDICES {
        return Err(Error::DegreeCapExceeded {
            degree: n,
            cap: MAX_INDICES,
        });
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let walker = Walker { f, mu };
    let value = if n <= DENSE_MEMO_LIMIT {
        let mut memo = DenseMemo(vec![None; 1usize << n]);
        walker.eval(full, &mut memo)
    } else if n <= HASH_MEMO_LIMIT {
        let mut memo = HashMemo(HashMap::new());
        walker.eval(full, &mut memo)
    } else {
        log::warn!("matching sum over {n} indices without memoization; this may be slow");
        walker.eval(full, &mut NoMemo)
    };
    Ok(value)
}

trait Memo {
    fn get(&self, mask: u32) -> Option<C64>;
    fn put(&mut self, mask: u32, value: C64);
}

struct DenseMemo(Vec<Option<C64>>);

impl Memo for DenseMemo {
    fn get(&self, mask: u32) -> Option<C64> {
        self.0[mask as usize]
    }
    fn put(&mut self, mask: u32, value: C64) {
        self.0[mask as usize] = Some(value);
    }
}

struct HashMemo(HashMap<u32, C64>);

impl Memo for HashMemo {
    fn get(&self, mask: u32) -> Option<C64> {
        self.0.get(&mask).copied()
    }
    fn put(&mut self, mask: u32, value: C64) {
        self.0.insert(mask, value);
    }
}

struct NoMemo;

impl Memo for NoMemo {
    fn get(&self, _: u32) -> Option<C64> {
        None
    }
    fn put(&mut self, _: u32, _: C64) {}
}

struct Walker<'a> {
    f: &'a CMatrix,
    mu: Option<&'a CVector>,
}

impl Walker<'_> {
    fn eval(&self, mask: u32, memo: &mut impl Memo) -> C64 {
        if mask == 0 {
            return C64::new(1.0, 0.0);
        }
        if self.mu.is_none() && mask.count_ones() % 2 == 1 {
            return C64::new(0.0, 0.0);
        }
        if let Some(v) = memo.get(mask) {
            return v;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1u32 << i);
        let mut acc = C64::new(0.0, 0.0);
        if let Some(mu) = self.mu {
            if mu[i] != C64::new(0.0, 0.0) {
                acc += mu[i] * self.eval(rest, memo);
            }
        }
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let fij = self.f[(i, j)];
            if fij != C64::new(0.0, 0.0) {
                acc += fij * self.eval(rest & !(1u32 << j), memo);
            }
        }
        memo.put(mask, acc);
        acc
    }
}
