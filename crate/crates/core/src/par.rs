//! Order-preserving data parallelism with a sequential fallback.
//!
//! Without the `parallel` feature every [`Execution`] runs sequentially.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `items.iter().map(f).collect()`, in input order either way.
pub fn map_collect<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_keep_order() {
        let input: Vec<u64> = (0..1000).collect();
        let seq = map_collect(Execution::Sequential, &input, |v| v * v);
        let par = map_collect(Execution::Parallel, &input, |v| v * v);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 998_001);
    }
}
