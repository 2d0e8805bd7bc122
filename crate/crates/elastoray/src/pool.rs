//! Worker pool sized by `ELASTORAY_THREADS`.

use anyhow::{bail, Context, Result};

pub const THREADS_VAR: &str = "ELASTORAY_THREADS";

/// Worker count requested through the environment, if any.
pub fn requested_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_VAR}={v:?} is not a count"))?;
            if n == 0 {
                bail!("{THREADS_VAR} must be at least 1");
            }
            Ok(Some(n))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{THREADS_VAR}: {e}"),
    }
}

/// Runs `f` on a dedicated pool capped at the requested worker count.
pub fn run_in_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = requested_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("cannot start worker pool")?;
    Ok(pool.install(f))
}
