//! Data-parallel helpers. With the `parallel` feature off every helper runs
//! sequentially; results are identical either way because outputs are always
//! collected in index order.

use std::ops::Range;

#[cfg(feature = "parallel")]
pub(crate) fn map_range<R, F>(range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<R, F>(range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    range.map(f).collect()
}

/// Like [`map_range`] but short-circuits on the first error in index order.
pub(crate) fn try_map_range<R, E, F>(range: Range<usize>, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_range(range, f).into_iter().collect()
}
