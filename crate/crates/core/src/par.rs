//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they fall back to sequential iteration. Results keep
//! input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Values of `0..len` accepted by `keep`, ascending.
pub(crate) fn filter_range<F>(len: u64, keep: F) -> Vec<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().filter(|&i| keep(i)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).filter(|&i| keep(i)).collect()
    }
}
