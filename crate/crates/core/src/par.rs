//! Data-parallel helpers.
//!
//! With the `parallel` feature these dispatch to rayon; without it they run
//! the same closures sequentially. Every caller writes into disjoint output
//! slots, so results do not depend on the number of worker threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many items the sequential path is used even when `parallel` is on.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 64;

/// Applies `f` to every chunk of `data` of length `chunk_len` (the last chunk
/// may be shorter), passing the chunk index.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if data.len() / chunk_len.max(1) >= PARALLEL_THRESHOLD {
            data.par_chunks_mut(chunk_len)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
    }
    for (i, c) in data.chunks_mut(chunk_len).enumerate() {
        f(i, c);
    }
}

/// Maps `0..len` through `f`, preserving order.
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if len >= 2 {
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    (0..len).map(f).collect()
}

/// Fallible variant of [`map_range`]; returns the first error by index order
/// among those that occurred.
pub fn try_map_range<R, E, F>(len: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_range(len, f).into_iter().collect()
}

/// True when this build dispatches to a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_writes_cover_every_slot() {
        let mut v = vec![0usize; 1000];
        for_each_chunk_mut(&mut v, 7, |i, c| {
            for (j, x) in c.iter_mut().enumerate() {
                *x = i * 7 + j;
            }
        });
        assert!(v.iter().enumerate().all(|(i, &x)| i == x));
    }

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(500, |i| i * 2);
        assert_eq!(v, (0..500).map(|i| i * 2).collect::<Vec<_>>());
    }

    #[test]
    fn try_map_range_reports_error() {
        let r: Result<Vec<usize>, usize> =
            try_map_range(100, |i| if i == 42 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(42));
    }
}
