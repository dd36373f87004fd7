/// Runs `f` on a rayon pool with at most `parallelism` threads.
pub(crate) fn install<R: Send>(parallelism: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(parallelism.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
