//! Execution mode for the data-parallel inner loops.
//!
//! Every parallel loop in the crate writes disjoint outputs or reduces exact
//! integers, so results are bit-identical between the two modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is compiled in, otherwise
    /// behaves like [`Execution::Sequential`].
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Runs `f(chunk_index, chunk)` over consecutive `chunk`-sized pieces of `data`.
pub fn for_each_chunk_mut<T, F>(exec: Execution, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_indexed(Execution::Sequential, 100, |i| i * i);
        let b = map_indexed(Execution::Parallel, 100, |i| i * i);
        assert_eq!(a, b);

        let mut x = vec![0usize; 37];
        let mut y = vec![0usize; 37];
        for_each_chunk_mut(Execution::Sequential, &mut x, 5, |c, s| {
            s.iter_mut().enumerate().for_each(|(j, v)| *v = c * 5 + j)
        });
        for_each_chunk_mut(Execution::Parallel, &mut y, 5, |c, s| {
            s.iter_mut().enumerate().for_each(|(j, v)| *v = c * 5 + j)
        });
        assert_eq!(x, y);
        assert_eq!(x[36], 36);
    }
}
