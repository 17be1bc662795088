//! Random problem instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{euclidean, Config, Env, MAX_SAMPLING_ATTEMPTS};

/// Minimum Euclidean separation between generated terminals.
pub const MIN_TERMINAL_SEPARATION: f64 = 1e-3;

/// `count` valid, well-separated terminals drawn uniformly from the free
/// space. Deterministic in `seed`.
pub fn generate_terminals(env: &Env, count: usize, seed: u64) -> Result<Vec<Config>> {
    if count < 2 {
        return Err(Error::TooFewTerminals(count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Config> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        if attempts >= MAX_SAMPLING_ATTEMPTS {
            return Err(Error::SamplingFailed(attempts));
        }
        attempts += 1;
        let x = env.sample_uniform_free(&mut rng)?;
        if out
            .iter()
            .all(|t| euclidean(t.coords(), x.coords()) >= MIN_TERMINAL_SEPARATION)
        {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let env = Env::uniform_hypercubes(2).unwrap();
        let a = generate_terminals(&env, 2, 17).unwrap();
        let b = generate_terminals(&env, 2, 17).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|t| env.is_state_valid(t).unwrap()));
        assert_ne!(a[0], a[1]);
        assert!(generate_terminals(&env, 1, 0).is_err());
    }

    #[test]
    fn center_obstacle_sweep_never_fails() {
        let env = Env::center_obstacle(4).unwrap();
        for seed in 0..1000 {
            let ts = generate_terminals(&env, 10, seed).unwrap();
            assert_eq!(ts.len(), 10);
        }
    }
}
