//! Deterministic max-reductions over index ranges, data-parallel via rayon
//! when the `parallel` feature is on and `parallel: true` is requested,
//! sequential otherwise. Ties break toward the smaller index, so the result
//! is identical for any worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Best `(row, payload, key)` over `0..rows`, where `eval(row)` scans one row
/// and returns its best `(payload, key)`. `None` rows are skipped.
pub(crate) fn argmax_rows<T, F>(rows: usize, parallel: bool, eval: F) -> Option<(usize, T, f64)>
where
    T: Send,
    F: Fn(usize) -> Option<(T, f64)> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..rows)
                .into_par_iter()
                .filter_map(|i| eval(i).map(|(payload, key)| (i, payload, key)))
                .reduce_with(pick);
        }
    }
    let _ = parallel;
    let mut best: Option<(usize, T, f64)> = None;
    for i in 0..rows {
        if let Some((payload, key)) = eval(i) {
            best = match best {
                None => Some((i, payload, key)),
                Some(cur) => Some(pick(cur, (i, payload, key))),
            };
        }
    }
    best
}

/// Larger key wins; on exact key ties the smaller row index wins. Associative
/// and commutative, so any reduction tree yields the same answer.
fn pick<T>(a: (usize, T, f64), b: (usize, T, f64)) -> (usize, T, f64) {
    debug_assert!(!a.2.is_nan() && !b.2.is_nan());
    if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) {
        b
    } else {
        a
    }
}
