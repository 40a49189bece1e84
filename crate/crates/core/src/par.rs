//! Trial runner with a rayon backend and a sequential fallback.
//!
//! Trial `i` always receives `stream.split(i)`, so the result of a batch does
//! not depend on which backend ran it.

use crate::rng::RandomStream;

/// Runs `trials` independent trials and folds their outputs with `combine`.
pub fn fold_trials<T, F, C>(trials: u64, stream: &RandomStream, identity: T, trial: F, combine: C) -> T
where
    T: Send + Sync + Clone,
    F: Fn(&mut RandomStream) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        fold_trials_parallel(trials, stream, identity, trial, combine)
    }
    #[cfg(not(feature = "parallel"))]
    {
        fold_trials_sequential(trials, stream, identity, trial, combine)
    }
}

pub fn fold_trials_sequential<T, F, C>(trials: u64, stream: &RandomStream, identity: T, trial: F, combine: C) -> T
where
    F: Fn(&mut RandomStream) -> T,
    C: Fn(T, T) -> T,
{
    (0..trials).fold(identity, |acc, i| combine(acc, trial(&mut stream.split(i))))
}

#[cfg(feature = "parallel")]
pub fn fold_trials_parallel<T, F, C>(trials: u64, stream: &RandomStream, identity: T, trial: F, combine: C) -> T
where
    T: Send + Sync + Clone,
    F: Fn(&mut RandomStream) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    use rayon::prelude::*;

    (0..trials)
        .into_par_iter()
        .map(|i| trial(&mut stream.split(i)))
        .reduce(|| identity.clone(), &combine)
}

/// Counts trials for which `trial` returns true.
pub fn count_successes<F>(trials: u64, stream: &RandomStream, trial: F) -> u64
where
    F: Fn(&mut RandomStream) -> bool + Sync + Send,
{
    fold_trials(trials, stream, 0u64, |r| u64::from(trial(r)), |a, b| a + b)
}

/// Maps `items` in parallel when the `parallel` feature is on, preserving order.
pub fn map_ordered<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree() {
        let s = RandomStream::new(11);
        let seq = fold_trials_sequential(5000, &s, 0u64, |r| u64::from(r.bit()), |a, b| a + b);
        assert_eq!(count_successes(5000, &s, |r| r.bit() == 1), seq);
    }
}
