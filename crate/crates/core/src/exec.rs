//! Backend selection for the data-parallel kernels.
//!
//! Every kernel in the crate funnels its per-site or per-amplitude loop through the
//! helpers here. With the `parallel` feature the loops run on rayon unless the calling
//! thread has selected [`Backend::Sequential`]; without it they are plain loops.
//! Reductions always sum fixed-size chunks in index order, so the result does not
//! depend on the backend or on the thread count.

use std::cell::Cell;
use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    Parallel,
}

impl Backend {
    pub const fn build_default() -> Self {
        if cfg!(feature = "parallel") {
            Backend::Parallel
        } else {
            Backend::Sequential
        }
    }
}

thread_local! {
    static BACKEND: Cell<Backend> = const { Cell::new(Backend::build_default()) };
}

/// Backend used by kernels called from this thread.
pub fn backend() -> Backend {
    let b = BACKEND.with(Cell::get);
    if cfg!(feature = "parallel") {
        b
    } else {
        Backend::Sequential
    }
}

pub fn set_backend(backend: Backend) {
    BACKEND.with(|b| b.set(backend));
}

/// Runs `f` with `backend` selected on this thread, restoring the previous choice.
pub fn with_backend<R>(backend: Backend, f: impl FnOnce() -> R) -> R {
    let previous = BACKEND.with(|b| b.replace(backend));
    struct Restore(Backend);
    impl Drop for Restore {
        fn drop(&mut self) {
            BACKEND.with(|b| b.set(self.0));
        }
    }
    let _restore = Restore(previous);
    f()
}

/// Below this many items a loop is not worth splitting across threads.
#[cfg(feature = "parallel")]
pub(crate) const MIN_PARALLEL_LEN: usize = 1 << 12;

/// Chunk length used by deterministic reductions.
const REDUCE_CHUNK: usize = 1 << 10;

#[cfg(feature = "parallel")]
#[inline]
fn go_parallel(len: usize) -> bool {
    backend() == Backend::Parallel && len >= MIN_PARALLEL_LEN
}

pub(crate) fn for_each_index<F>(len: usize, f: F)
where
    F: Fn(usize) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if go_parallel(len) {
        (0..len)
            .into_par_iter()
            .with_min_len(MIN_PARALLEL_LEN / 4)
            .for_each(f);
        return;
    }
    (0..len).for_each(f);
}

pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if go_parallel(data.len()) {
        let min_chunks = (MIN_PARALLEL_LEN / 4 / chunk).max(1);
        data.par_chunks_mut(chunk)
            .with_min_len(min_chunks)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

pub(crate) fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if go_parallel(len) {
        return (0..len)
            .into_par_iter()
            .with_min_len(MIN_PARALLEL_LEN / 4)
            .map(f)
            .collect();
    }
    (0..len).map(f).collect()
}

/// Sum of `f` over `0..len`, evaluated chunk by chunk in a fixed order.
pub(crate) fn sum_by_chunks<F>(len: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Send + Sync,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = map_collect(chunks, |c| {
        let start = c * REDUCE_CHUNK;
        f(start..(start + REDUCE_CHUNK).min(len))
    });
    partial.into_iter().sum()
}

pub(crate) fn sum_by_chunks_complex<F>(len: usize, f: F) -> crate::C64
where
    F: Fn(Range<usize>) -> crate::C64 + Send + Sync,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = map_collect(chunks, |c| {
        let start = c * REDUCE_CHUNK;
        f(start..(start + REDUCE_CHUNK).min(len))
    });
    partial.into_iter().sum()
}

/// Raw pointer that kernels share across threads to write disjoint elements.
#[derive(Clone, Copy)]
pub(crate) struct SharedMut<T>(*mut T);

unsafe impl<T: Send> Send for SharedMut<T> {}
unsafe impl<T: Send> Sync for SharedMut<T> {}

impl<T> SharedMut<T> {
    pub(crate) fn new(slice: &mut [T]) -> Self {
        SharedMut(slice.as_mut_ptr())
    }

    /// # Safety
    /// `i` must be in bounds of the slice this was created from, and no other thread
    /// may access element `i` concurrently.
    #[inline]
    pub(crate) unsafe fn at(self, i: usize) -> *mut T {
        self.0.add(i)
    }
}
