// Row sweeps, parallel when the `parallel` feature is on. The closures write
// disjoint rows, so results are identical either way.

use alloc::vec::Vec;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn for_each_row<F>(data: &mut [f64], width: usize, op: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    data.par_chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| op(i, row));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row<F>(data: &mut [f64], width: usize, op: F)
where
    F: Fn(usize, &mut [f64]),
{
    data.chunks_mut(width)
        .enumerate()
        .for_each(|(i, row)| op(i, row));
}

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T, F>(n: usize, op: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(op).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T, F>(n: usize, op: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(op).collect()
}
