//! Order-preserving data-parallel maps. With the `parallel` feature these run
//! on rayon; without it every call degrades to a sequential loop with the
//! same results.

/// Below this many items the global-pool map stays sequential.
pub const MIN_PARALLEL_ITEMS: usize = 64;

/// Maps `items` on a dedicated pool of `threads` workers, preserving order.
/// `threads <= 1` runs sequentially on the caller's thread.
pub fn map_with_threads<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threads > 1 && items.len() > 1 {
        use rayon::prelude::*;
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => return pool.install(|| items.par_iter().map(&f).collect()),
            Err(e) => log::warn!("thread pool unavailable ({e}); running sequentially"),
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    items.iter().map(f).collect()
}

/// Maps `items` on the current rayon pool when there are enough of them.
pub fn map_auto<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if items.len() >= MIN_PARALLEL_ITEMS {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_with_threads(&items, 1, |x| x * x);
        for threads in [2, 4, 8] {
            assert_eq!(map_with_threads(&items, threads, |x| x * x), seq);
        }
        assert_eq!(map_auto(&items, |x| x * x), seq);
        assert!(map_with_threads(&Vec::<u8>::new(), 4, |x| *x).is_empty());
    }
}
