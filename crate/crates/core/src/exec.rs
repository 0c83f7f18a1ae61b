//! Execution policy for the data-parallel inner loops.
//!
//! Work is always cut into the same fixed chunks and the per-chunk partial
//! results are combined in chunk order, so a parallel run returns exactly the
//! same bits as a sequential one. Without the `parallel` feature,
//! [`Exec::Parallel`] silently runs sequentially.

/// How chunked work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `job(c)` for every chunk index `c < chunks`, returning the
    /// results in chunk order.
    pub fn map_chunks<R, F>(self, chunks: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..chunks).into_par_iter().map(job).collect()
            }
            _ => (0..chunks).map(job).collect(),
        }
    }
}

/// Splits `total` items into `(start, end)` ranges of at most `chunk` items.
pub(crate) fn chunk_ranges(total: u64, chunk: u64) -> Vec<(u64, u64)> {
    let chunk = chunk.max(1);
    let mut out = Vec::with_capacity((total / chunk + 1) as usize);
    let mut start = 0;
    while start < total {
        let end = (start + chunk).min(total);
        out.push((start, end));
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range() {
        let r = chunk_ranges(10, 3);
        assert_eq!(r, vec![(0, 3), (3, 6), (6, 9), (9, 10)]);
        assert!(chunk_ranges(0, 3).is_empty());
    }

    #[test]
    fn policies_agree() {
        let f = |c: usize| (c as f64).sqrt();
        assert_eq!(
            Exec::Sequential.map_chunks(100, f),
            Exec::Parallel.map_chunks(100, f)
        );
    }
}
