//! Deterministic data-parallel reductions.
//!
//! Sums are chunked with a fixed chunk size, each chunk is reduced
//! sequentially, and the chunk results are combined in index order. The
//! result is therefore bit-identical for any worker count, and identical
//! between the rayon build and the sequential fallback
//! (`--no-default-features`).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: usize = 4096;

/// Cap the global worker count (GAUGEKIT_THREADS). Affects speed only;
/// every reduction is ordered, so results do not depend on this. No-op in
/// the sequential build, or if a global pool already exists.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}

/// Ordered chunked sum of `f(0) + f(1) + … + f(n-1)`.
pub fn ordered_sum(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let n_chunks = n.div_ceil(CHUNK);
    let chunk_sum = |c: usize| -> f64 {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        let mut acc = 0.0;
        for i in start..end {
            acc += f(i);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    {
        let partials: Vec<f64> = (0..n_chunks).into_par_iter().map(chunk_sum).collect();
        partials.iter().sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks).map(chunk_sum).sum()
    }
}

/// Ordered chunked sum of fixed-width vectors.
pub fn ordered_sum_vec(n: usize, width: usize, f: impl Fn(usize, &mut [f64]) + Sync + Send) -> Vec<f64> {
    let n_chunks = n.div_ceil(CHUNK);
    let chunk_sum = |c: usize| -> Vec<f64> {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        let mut acc = vec![0.0; width];
        let mut tmp = vec![0.0; width];
        for i in start..end {
            tmp.iter_mut().for_each(|x| *x = 0.0);
            f(i, &mut tmp);
            for (a, t) in acc.iter_mut().zip(tmp.iter()) {
                *a += t;
            }
        }
        acc
    };
    let fold = |partials: Vec<Vec<f64>>| -> Vec<f64> {
        let mut acc = vec![0.0; width];
        for p in partials {
            for (a, t) in acc.iter_mut().zip(p.iter()) {
                *a += t;
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    {
        fold((0..n_chunks).into_par_iter().map(chunk_sum).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        fold((0..n_chunks).map(chunk_sum).collect())
    }
}

/// Order-preserving parallel map into a Vec.
pub fn ordered_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
