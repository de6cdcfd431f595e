//! Index-ordered parallel map over grid points.
//!
//! With the `parallel` feature the work is spread over rayon; without it
//! every [`Execution`] runs sequentially. Either way results come back in
//! index order, so downstream output does not depend on scheduling.

/// How grid evaluations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Rayon's global pool when available, else sequential.
    #[default]
    Auto,
    Sequential,
    /// A dedicated pool with this many threads (`0` means rayon's default).
    Threads(usize),
}

impl Execution {
    /// `1` thread means sequential.
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            None => Execution::Auto,
            Some(1) => Execution::Sequential,
            Some(n) => Execution::Threads(n),
        }
    }
}

/// Whether this build can run grid work on more than one thread.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    imp::map_indexed(n, exec, f)
}

#[cfg(feature = "parallel")]
mod imp {
    use super::Execution;
    use rayon::prelude::*;

    pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match exec {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Auto => (0..n).into_par_iter().map(f).collect(),
            Execution::Threads(threads) => {
                match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                    Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                    // pool creation only fails on resource exhaustion
                    Err(_) => (0..n).map(f).collect(),
                }
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    use super::Execution;

    pub fn map_indexed<T, F>(n: usize, _exec: Execution, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_index_ordered() {
        for exec in [
            Execution::Auto,
            Execution::Sequential,
            Execution::Threads(3),
        ] {
            let v = map_indexed(1000, exec, |i| i * i);
            assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
        }
    }

    #[test]
    fn thread_count_mapping() {
        assert_eq!(Execution::from_threads(None), Execution::Auto);
        assert_eq!(Execution::from_threads(Some(1)), Execution::Sequential);
        assert_eq!(Execution::from_threads(Some(4)), Execution::Threads(4));
    }
}
