use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::stats::binomial_ci;
use crate::attacks::{AttackKind, Guess};
use crate::error::{Error, Result};
use crate::protocol::{
    cao_round, present_round, CaoMode, CaoRoundConfig, CheckBasisPolicy, InitialPolicy,
    PresentRoundConfig, RoundMode, RoundRecord, Scheme,
};

const CHUNK: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub attack: AttackKind,
    pub rounds: u64,
    /// Fraction of rounds used for checking, in (0, 1).
    pub check_fraction: f64,
    pub seed: u64,
    pub initial: InitialPolicy,
    pub check_basis: CheckBasisPolicy,
    /// Normal quantile for the error-rate interval.
    pub z: f64,
    /// Only annotates the output.
    pub threshold: Option<f64>,
    /// Count each unknown guess as half a success in `eve_leak_rate`.
    pub unknown_as_half: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Present,
            attack: AttackKind::None,
            rounds: 100_000,
            check_fraction: 0.5,
            seed: 42,
            initial: InitialPolicy::Random,
            check_basis: CheckBasisPolicy::Random,
            z: 1.96,
            threshold: None,
            unknown_as_half: false,
        }
    }
}

impl RunConfig {
    fn check_rounds(&self) -> Result<usize> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        if !(self.check_fraction > 0.0 && self.check_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "check fraction must lie in (0, 1), got {}",
                self.check_fraction
            )));
        }
        let rounds = usize::try_from(self.rounds)
            .map_err(|_| Error::InvalidConfig("too many rounds".into()))?;
        let checks = (self.rounds as f64 * self.check_fraction).round() as usize;
        if checks == 0 {
            return Err(Error::InvalidConfig(format!(
                "{} rounds at check fraction {} leave no check round",
                self.rounds, self.check_fraction
            )));
        }
        if !(self.z >= 0.0 && self.z.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "z must be non-negative, got {}",
                self.z
            )));
        }
        let compatible = match self.scheme {
            Scheme::Present => self.attack != AttackKind::CaoInterceptResendZ34,
            Scheme::Cao => matches!(
                self.attack,
                AttackKind::None | AttackKind::CaoInterceptResendZ34
            ),
        };
        if !compatible {
            return Err(Error::InvalidConfig(format!(
                "attack `{}` does not apply to scheme `{}`",
                self.attack, self.scheme
            )));
        }
        Ok(checks.min(rounds))
    }

    /// Random stream for round `index`; stream 0 is the master stream.
    fn round_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index + 1);
        rng
    }

    /// Which rounds are check rounds, drawn from the master stream.
    fn check_mask(&self) -> Result<Vec<bool>> {
        let checks = self.check_rounds()?;
        let mut master = ChaCha8Rng::seed_from_u64(self.seed);
        master.set_stream(0);
        let mut mask = vec![false; self.rounds as usize];
        for i in index::sample(&mut master, mask.len(), checks) {
            mask[i] = true;
        }
        Ok(mask)
    }

    /// Runs round `index` as a check or message round.
    pub fn round(&self, index: u64, check: bool) -> Result<RoundRecord> {
        let mut rng = self.round_rng(index);
        let bit = if check {
            None
        } else {
            Some(rng.random_range(0..=1u8))
        };
        match self.scheme {
            Scheme::Present => present_round(
                &PresentRoundConfig {
                    initial: self.initial,
                    mode: bit.map_or(RoundMode::Check, RoundMode::Message),
                    attack: self.attack,
                },
                &mut rng,
            ),
            Scheme::Cao => cao_round(
                &CaoRoundConfig {
                    mode: bit.map_or(CaoMode::Check(self.check_basis), CaoMode::Key),
                    attack: self.attack,
                },
                &mut rng,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    rounds: u64,
    check_rounds: u64,
    check_errors: u64,
    message_rounds: u64,
    recovered: u64,
    guesses_known: u64,
    guesses_correct: u64,
}

impl Tally {
    fn add(&mut self, r: &RoundRecord) {
        self.rounds += 1;
        match r.check_pass {
            Some(pass) => {
                self.check_rounds += 1;
                self.check_errors += u64::from(!pass);
            }
            None => {
                self.message_rounds += 1;
                self.recovered += u64::from(r.recovered_bit == r.message_bit);
                if let Some(Guess::Bit(g)) = r.eve_guess {
                    self.guesses_known += 1;
                    self.guesses_correct += u64::from(Some(g) == r.message_bit);
                }
            }
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            rounds: self.rounds + o.rounds,
            check_rounds: self.check_rounds + o.check_rounds,
            check_errors: self.check_errors + o.check_errors,
            message_rounds: self.message_rounds + o.message_rounds,
            recovered: self.recovered + o.recovered,
            guesses_known: self.guesses_known + o.guesses_known,
            guesses_correct: self.guesses_correct + o.guesses_correct,
        }
    }
}

/// Aggregated Monte Carlo statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub scheme: Scheme,
    pub attack: AttackKind,
    pub seed: u64,
    pub rounds_total: u64,
    pub check_rounds: u64,
    pub check_errors: u64,
    /// Failed check rounds over check rounds.
    pub error_rate: f64,
    pub error_rate_ci95: [f64; 2],
    pub z: f64,
    pub message_rounds: u64,
    pub recovery_accuracy: Option<f64>,
    pub eve_guesses: u64,
    pub eve_correct: u64,
    /// Correct guesses over rounds where Eve output a bit (or over all
    /// message rounds, with unknowns counted as 1/2, when configured).
    pub eve_leak_rate: Option<f64>,
    pub unknown_fraction: Option<f64>,
    pub threshold: Option<f64>,
    pub exceeds_threshold: Option<bool>,
}

fn finish(config: &RunConfig, t: Tally) -> Result<RunStats> {
    let error_rate = t.check_errors as f64 / t.check_rounds as f64;
    let (lo, hi) = binomial_ci(t.check_errors, t.check_rounds, config.z)?;
    let per_message = |n: u64| (t.message_rounds > 0).then(|| n as f64 / t.message_rounds as f64);
    let unknown = t.message_rounds - t.guesses_known;
    let eve_leak_rate = if config.unknown_as_half {
        (t.message_rounds > 0)
            .then(|| (t.guesses_correct as f64 + 0.5 * unknown as f64) / t.message_rounds as f64)
    } else {
        (t.guesses_known > 0).then(|| t.guesses_correct as f64 / t.guesses_known as f64)
    };
    Ok(RunStats {
        scheme: config.scheme,
        attack: config.attack,
        seed: config.seed,
        rounds_total: t.rounds,
        check_rounds: t.check_rounds,
        check_errors: t.check_errors,
        error_rate,
        error_rate_ci95: [lo, hi],
        z: config.z,
        message_rounds: t.message_rounds,
        recovery_accuracy: per_message(t.recovered),
        eve_guesses: t.guesses_known,
        eve_correct: t.guesses_correct,
        eve_leak_rate,
        unknown_fraction: per_message(unknown),
        threshold: config.threshold,
        exceeds_threshold: config.threshold.map(|th| error_rate > th),
    })
}

fn tally_range(config: &RunConfig, mask: &[bool], start: usize, end: usize) -> Result<Tally> {
    let mut t = Tally::default();
    for (i, &check) in mask.iter().enumerate().take(end).skip(start) {
        t.add(&config.round(i as u64, check)?);
    }
    Ok(t)
}

/// Runs `config.rounds` independent rounds on the rayon pool.
///
/// Round `i` draws from its own stream, so results do not depend on
/// scheduling.
pub fn run_monte_carlo(config: &RunConfig) -> Result<RunStats> {
    let mask = config.check_mask()?;
    let chunks = mask.len().div_ceil(CHUNK);
    let total = (0..chunks)
        .into_par_iter()
        .map(|c| tally_range(config, &mask, c * CHUNK, ((c + 1) * CHUNK).min(mask.len())))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    finish(config, total)
}

/// Single-threaded [`run_monte_carlo`].
pub fn run_monte_carlo_serial(config: &RunConfig) -> Result<RunStats> {
    let mask = config.check_mask()?;
    let total = tally_range(config, &mask, 0, mask.len())?;
    finish(config, total)
}
