//! Switch between rayon and sequential iteration.
//!
//! Every helper here returns results in input order, so callers get the same
//! output whichever mode runs.

/// Execution mode for data-parallel loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Uses the rayon global pool. Falls back to sequential when the crate is
    /// built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Parallelism {
    /// Whether this mode will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..len`.
pub fn map_range<R, F>(mode: Parallelism, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..len).map(f).collect()
}

/// Returns the smallest index whose key is minimal, ignoring `None`s.
///
/// Ties are broken by index so the answer does not depend on scheduling.
pub fn argmin_by_key<K, F>(mode: Parallelism, len: usize, f: F) -> Option<(usize, K)>
where
    K: PartialOrd + Send,
    F: Fn(usize) -> Option<K> + Sync + Send,
{
    let pick = |a: Option<(usize, K)>, b: Option<(usize, K)>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let b_first = match b.1.partial_cmp(&a.1) {
                Some(std::cmp::Ordering::Less) => true,
                Some(std::cmp::Ordering::Greater) => false,
                _ => b.0 < a.0,
            };
            if b_first {
                Some(b)
            } else {
                Some(a)
            }
        }
    };
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..len)
            .into_par_iter()
            .map(|i| f(i).map(|k| (i, k)))
            .reduce(|| None, pick);
    }
    let _ = mode;
    (0..len).map(|i| f(i).map(|k| (i, k))).fold(None, pick)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Parallelism::Sequential, &xs, |x| x * x);
        let b = map(Parallelism::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
    }

    #[test]
    fn argmin_prefers_lowest_index_on_ties() {
        let keys = [3, 1, 2, 1, 1];
        for mode in [Parallelism::Sequential, Parallelism::Parallel] {
            let got = argmin_by_key(mode, keys.len(), |i| Some(keys[i]));
            assert_eq!(got, Some((1, 1)));
        }
        assert_eq!(argmin_by_key(Parallelism::Parallel, 3, |_| None::<i32>), None);
    }
}
