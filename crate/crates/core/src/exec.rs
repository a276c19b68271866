//! Node-loop execution, sequential or on the ambient rayon pool.

use alloc::vec::Vec;

/// Evaluates `f(j)` for `j in range` and collects the results in order.
///
/// Each index is computed independently, so the output does not depend on
/// how the work is split across threads.
pub(crate) fn map_range<T, F>(range: core::ops::Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        use rayon::prelude::*;
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "rayon"))]
    {
        range.map(f).collect()
    }
}
