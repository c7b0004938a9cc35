//! Pairwise (tree) summation.
//!
//! The reduction order depends only on the length of the input, so a slice
//! of per-mode terms produced in parallel sums to the same bits no matter
//! how the terms were computed.

use std::ops::Add;

const LEAF: usize = 16;

pub fn pairwise_sum<T>(terms: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    if terms.len() <= LEAF {
        return terms.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}
