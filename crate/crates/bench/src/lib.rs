//! Fixtures shared by the benchmarks.

use kfun::{CMatrix, C64};

/// Deterministic dense complex symmetric matrix with entries of order one.
pub fn symmetric_fixture(n: usize) -> CMatrix {
    let f = |i: usize, j: usize| {
        let k = (i.min(j) * 31 + i.max(j) * 17) as f64;
        C64::new((0.7 * k).sin() * 0.5, (1.3 * k).cos() * 0.5)
    };
    CMatrix::from_fn(n, n, f)
}
