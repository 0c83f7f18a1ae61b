//! Summation over all index tuples `(i_1, …, i_k) ∈ {0..N}^k`.

use num_complex::Complex64;

use crate::divdiff::Workspace;
use crate::error::{Error, Result};
use crate::exec::{chunk_ranges, Exec};

/// Default cap on the number of index tuples a single sum may visit.
pub const DEFAULT_TUPLE_BUDGET: u64 = 10_000_000;

const TUPLE_CHUNK: u64 = 1 << 14;

/// `dim^slots`, or an error if it exceeds `budget`.
pub fn tuple_count(dim: usize, slots: usize, budget: u64) -> Result<u64> {
    let count = (dim as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            tuples: count,
            budget,
        });
    }
    Ok(count as u64)
}

/// `Σ_{tuples} term(tuple)`; tuples are visited in lexicographic order within
/// fixed chunks whose partial sums are added in chunk order.
pub(crate) fn tuple_sum<F>(
    exec: Exec,
    dim: usize,
    slots: usize,
    budget: u64,
    term: F,
) -> Result<Complex64>
where
    F: Fn(&[usize], &mut Workspace) -> Result<Complex64> + Sync + Send,
{
    let total = tuple_count(dim, slots, budget)?;
    let ranges = chunk_ranges(total, TUPLE_CHUNK);
    let partials = exec.map_chunks(ranges.len(), |c| -> Result<Complex64> {
        let (start, end) = ranges[c];
        let mut digits = vec![0usize; slots];
        let mut rest = start;
        for d in digits.iter_mut().rev() {
            *d = (rest % dim as u64) as usize;
            rest /= dim as u64;
        }
        let mut ws = Workspace::default();
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in start..end {
            acc += term(&digits, &mut ws)?;
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < dim {
                    break;
                }
                *d = 0;
            }
        }
        Ok(acc)
    });
    partials.into_iter().sum()
}
