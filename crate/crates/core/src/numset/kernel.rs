//! Pairwise combination kernels over integer lanes.
//!
//! Inputs are sorted numerator slices sharing one denominator; outputs are
//! sorted and duplicate-free. Two strategies: a dense bitmap when the output
//! range is narrow relative to the number of pairs, and batched
//! sort/dedup/merge otherwise. Both stop once the distinct count passes the
//! guard.

use bitvec::prelude::*;
use rayon::prelude::*;

/// Target number of pair results materialised per batch.
const BATCH_PAIRS: usize = 1 << 22;
/// Largest bitmap the dense path will allocate (bits).
const DENSE_MAX_BITS: u128 = 1 << 28;
/// Dense path only when range <= this many bits per pair.
const DENSE_BITS_PER_PAIR: u128 = 32;

/// The guard tripped; `reached` is a proven lower bound on the result size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow {
    pub reached: usize,
}

pub(crate) trait Lane: Ord + Clone + Send + Sync {}
impl Lane for i64 {}
impl Lane for num_bigint::BigInt {}

fn merge_dedup<T: Lane>(acc: Vec<T>, batch: Vec<T>) -> Vec<T> {
    if acc.is_empty() {
        return batch;
    }
    let mut out = Vec::with_capacity(acc.len() + batch.len());
    let mut left = acc.into_iter().peekable();
    let mut right = batch.into_iter().peekable();
    loop {
        let next = match (left.peek(), right.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => left.next(),
                std::cmp::Ordering::Greater => right.next(),
                std::cmp::Ordering::Equal => {
                    right.next();
                    left.next()
                }
            },
            (Some(_), None) => left.next(),
            (None, Some(_)) => right.next(),
            (None, None) => break,
        };
        out.extend(next);
    }
    out
}

/// Batched sort/dedup path. Works for any lane type.
pub(crate) fn pairwise_sorted<T, F>(
    a: &[T],
    b: &[T],
    op: F,
    max_card: usize,
) -> Result<Vec<T>, Overflow>
where
    T: Lane,
    F: Fn(&T, &T) -> T + Sync,
{
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    // iterate the longer operand in the outer loop so batches are row-aligned
    let (outer, inner, swapped) = if a.len() >= b.len() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let rows_per_batch = (BATCH_PAIRS / inner.len()).max(1);
    let mut acc: Vec<T> = Vec::new();
    for rows in outer.chunks(rows_per_batch) {
        let mut batch: Vec<T> = rows
            .par_iter()
            .flat_map_iter(|x| {
                inner
                    .iter()
                    .map(|y| if swapped { op(y, x) } else { op(x, y) })
            })
            .collect();
        batch.par_sort_unstable();
        batch.dedup();
        acc = merge_dedup(acc, batch);
        if acc.len() > max_card {
            return Err(Overflow { reached: acc.len() });
        }
    }
    Ok(acc)
}

/// Whether the dense bitmap path is worth it for output range `[lo, hi]`.
pub(crate) fn dense_fits(lo: i64, hi: i64, pairs: u128) -> bool {
    let width = (hi as i128 - lo as i128 + 1) as u128;
    width <= DENSE_MAX_BITS && width <= DENSE_BITS_PER_PAIR.saturating_mul(pairs)
}

/// Dense bitmap path; every `op(x, y)` must land in `[lo, hi]`.
pub(crate) fn pairwise_dense<F>(
    a: &[i64],
    b: &[i64],
    op: F,
    lo: i64,
    hi: i64,
    max_card: usize,
) -> Result<Vec<i64>, Overflow>
where
    F: Fn(i64, i64) -> i64,
{
    let width = (hi as i128 - lo as i128 + 1) as usize;
    let mut bits = bitvec![u64, Lsb0; 0; width];
    for &x in a {
        for &y in b {
            let v = op(x, y);
            debug_assert!(v >= lo && v <= hi);
            bits.set((v as i128 - lo as i128) as usize, true);
        }
    }
    let count = bits.count_ones();
    if count > max_card {
        return Err(Overflow { reached: count });
    }
    Ok(bits
        .iter_ones()
        .map(|i| (lo as i128 + i as i128) as i64)
        .collect())
}
