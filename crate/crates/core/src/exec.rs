//! Deterministic execution helpers.
//!
//! Hot loops (grid evaluation, cell assignment, Monte Carlo batches) run
//! through these functions. With the default `parallel` feature they fan out
//! over rayon; without it they run sequentially. Results are identical either
//! way: mapped values are collected in index order and every floating-point
//! reduction happens in a fixed sequential order via compensated summation.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, preserving index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<R: Send, F: Fn(usize) -> R + Sync + Send>(n: usize, f: F) -> Vec<R> {
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<R, F: Fn(usize) -> R>(n: usize, f: F) -> Vec<R> {
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    items.par_iter().map(f).collect()
}

/// Maps `f` over a slice, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Neumaier compensated sum over a fixed iteration order.
pub fn sum_compensated(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Evaluates `f` on `0..n` and compensation-sums the results in index order.
///
/// The map runs in parallel when enabled; the reduction is always sequential
/// over the index-ordered values, so the result does not depend on the thread
/// count.
pub fn sum_indexed<F: Fn(usize) -> f64 + Sync + Send>(n: usize, f: F) -> f64 {
    // Chunked so the parallel path does not materialize one huge Vec per call
    // on large grids.
    const CHUNK: usize = 4096;
    if n <= CHUNK {
        return sum_compensated(map_indexed(n, f).into_iter());
    }
    let n_chunks = n.div_ceil(CHUNK);
    let partials = map_indexed(n_chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        sum_compensated((lo..hi).map(&f))
    });
    sum_compensated(partials.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_handles_cancellation() {
        let values = vec![1.0e16, 1.0, -1.0e16];
        assert_eq!(sum_compensated(values.into_iter()), 1.0);
    }

    #[test]
    fn sum_indexed_matches_direct_sum() {
        let direct: f64 = (0..100_000).map(|i| (i as f64).sin() / 1e3).sum();
        let chunked = sum_indexed(100_000, |i| (i as f64).sin() / 1e3);
        assert!((direct - chunked).abs() < 1e-9);
    }
}
