//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default), closures run on the rayon pool;
//! without it the same entry points run sequentially. Results are always
//! collected in input order and reduced by a sequential fold, so float-mode
//! outputs are bit-identical whichever path executes and whatever the
//! worker count is.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice, in parallel when enabled, preserving order.
pub fn maybe_par_map<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(items: &[T], f: F) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Map with an explicit sequential override (used by the benches and by the
/// CLI's --threads=1 path).
pub fn map_with_mode<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(items: &[T], sequential: bool, f: F) -> Vec<U> {
    if sequential {
        items.iter().map(f).collect()
    } else {
        maybe_par_map(items, f)
    }
}

/// Order-fixed sum of f64 contributions: parallel map, sequential fold.
pub fn maybe_par_sum<T: Sync, F: Fn(&T) -> f64 + Sync + Send>(items: &[T], f: F) -> f64 {
    maybe_par_map(items, f).into_iter().sum()
}

/// Install a global thread cap; call once, early, from the CLI. Returns
/// false when the pool was already initialized or the feature is off.
pub fn set_thread_cap(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_and_seq_agree_bitwise() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin() * 1e-3).collect();
        let a = maybe_par_sum(&xs, |x| x * x + 1.0 / (1.0 + x.abs()));
        let b: f64 = xs.iter().map(|x| x * x + 1.0 / (1.0 + x.abs())).sum();
        assert_eq!(a, b);
        let c = map_with_mode(&xs, true, |x| x * 2.0);
        let d = map_with_mode(&xs, false, |x| x * 2.0);
        assert_eq!(c, d);
    }
}
