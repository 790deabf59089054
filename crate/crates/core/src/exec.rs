//! Switch between rayon-parallel and sequential evaluation of the
//! data-parallel loops (oracle grid scans and Monte-Carlo sweeps).
//!
//! Results never depend on the choice: parallel work is collected in index
//! order or reduced with a total order before anything order-sensitive runs.

/// How the data-parallel loops execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Maps `f` over `0..n`, returning results in index order.
    pub(crate) fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_index_order() {
        let seq = Execution::Sequential.map_indexed(1000, |i| i * i);
        assert_eq!(seq, (0..1000).map(|i| i * i).collect::<Vec<_>>());
        assert_eq!(Execution::default().map_indexed(1000, |i| i * i), seq);
    }
}
