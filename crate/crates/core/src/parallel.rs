//! Order-preserving map over independent evaluations.
//!
//! With the `parallel` feature the map runs on the current rayon pool. Every
//! element is computed independently and collected in input order, so callers
//! that reduce the output sequentially get bitwise identical results for any
//! worker count.

use alloc::vec::Vec;

#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
