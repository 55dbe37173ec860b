use std::collections::BTreeMap;

use serde::Serialize;

use crate::attacks::{AttackKind, Guess};
use crate::branch::{enumerate, BranchPicker, Leaf};
use crate::error::{Error, Result};
use crate::protocol::{
    cao_round_with, present_round_with, CaoMode, CaoRoundConfig, CheckBasisPolicy, InitialPolicy,
    PresentRoundConfig, RoundMode, RoundRecord, Scheme,
};

/// Exact error and leak rates from full branch enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub scheme: Scheme,
    pub attack: AttackKind,
    /// Probability that a check round fails.
    pub total_error_rate: f64,
    /// Check failure probability given the initial state (`phi1`, `phi2`)
    /// or the check basis (`z`, `x`, `bell`).
    pub conditional_error_rates: BTreeMap<String, f64>,
    /// Probability of each condition in the check tree.
    pub condition_weights: BTreeMap<String, f64>,
    /// Probability that Bob's recovered bit equals Alice's message bit.
    pub recovery_accuracy: f64,
    /// `P(guess = bit | Eve outputs a bit)`; `None` when Eve never does.
    pub leak_rate: Option<f64>,
    /// Leak rate per initial state (three-qubit scheme).
    pub conditional_leak_rates: BTreeMap<String, Option<f64>>,
    /// Probability that Eve outputs no bit.
    pub unknown_fraction: f64,
    /// Sum of leaf weights of the check tree and the message tree.
    pub total_probability: [f64; 2],
    pub leaves: [usize; 2],
}

fn check_tree(scheme: Scheme, attack: AttackKind) -> Result<Vec<Leaf<RoundRecord>>> {
    match scheme {
        Scheme::Present => {
            let cfg = PresentRoundConfig {
                initial: InitialPolicy::Random,
                mode: RoundMode::Check,
                attack,
            };
            enumerate(|p| present_round_with(&cfg, p))
        }
        Scheme::Cao => {
            let cfg = CaoRoundConfig {
                mode: CaoMode::Check(CheckBasisPolicy::Random),
                attack,
            };
            enumerate(|p| cao_round_with(&cfg, p))
        }
    }
}

fn message_tree(scheme: Scheme, attack: AttackKind) -> Result<Vec<Leaf<RoundRecord>>> {
    enumerate(|p| {
        let bit = p.pick(&[0.5, 0.5]) as u8;
        match scheme {
            Scheme::Present => present_round_with(
                &PresentRoundConfig {
                    initial: InitialPolicy::Random,
                    mode: RoundMode::Message(bit),
                    attack,
                },
                p,
            ),
            Scheme::Cao => cao_round_with(
                &CaoRoundConfig {
                    mode: CaoMode::Key(bit),
                    attack,
                },
                p,
            ),
        }
    })
}

fn condition_key(record: &RoundRecord) -> String {
    match (record.initial, record.check_basis) {
        (Some(init), _) => init.name().to_string(),
        (None, Some(basis)) => basis.name().to_string(),
        (None, None) => String::new(),
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

fn supported(scheme: Scheme, attack: AttackKind) -> bool {
    match scheme {
        Scheme::Present => attack != AttackKind::CaoInterceptResendZ34,
        Scheme::Cao => matches!(attack, AttackKind::None | AttackKind::CaoInterceptResendZ34),
    }
}

/// Walks every branch of a check round and a message round, weighting each
/// leaf by the product of its exact branch probabilities.
pub fn exact_analyze(scheme: Scheme, attack: AttackKind) -> Result<ExactResult> {
    if !supported(scheme, attack) {
        return Err(Error::UnsupportedPair {
            scheme: scheme.name(),
            attack: attack.name(),
        });
    }

    let checks = check_tree(scheme, attack)?;
    let mut total_error_rate = 0.0;
    let mut weights: BTreeMap<String, f64> = BTreeMap::new();
    let mut errors: BTreeMap<String, f64> = BTreeMap::new();
    for leaf in &checks {
        let key = condition_key(&leaf.value);
        *weights.entry(key.clone()).or_default() += leaf.weight;
        let err = errors.entry(key).or_default();
        if leaf.value.check_pass == Some(false) {
            *err += leaf.weight;
            total_error_rate += leaf.weight;
        }
    }
    let conditional_error_rates = errors
        .iter()
        .map(|(k, e)| (k.clone(), e / weights[k]))
        .collect();

    let messages = message_tree(scheme, attack)?;
    let mut recovered = 0.0;
    let mut known = 0.0;
    let mut correct = 0.0;
    let mut by_init: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for leaf in &messages {
        let r = &leaf.value;
        if r.recovered_bit == r.message_bit {
            recovered += leaf.weight;
        }
        if let Some(Guess::Bit(g)) = r.eve_guess {
            let hit = if Some(g) == r.message_bit {
                leaf.weight
            } else {
                0.0
            };
            known += leaf.weight;
            correct += hit;
            if let Some(init) = r.initial {
                let e = by_init.entry(init.name().to_string()).or_default();
                e.0 += hit;
                e.1 += leaf.weight;
            }
        } else if let Some(init) = r.initial {
            by_init.entry(init.name().to_string()).or_default();
        }
    }
    let message_total: f64 = messages.iter().map(|l| l.weight).sum();
    let check_total: f64 = checks.iter().map(|l| l.weight).sum();

    Ok(ExactResult {
        scheme,
        attack,
        total_error_rate,
        conditional_error_rates,
        condition_weights: weights,
        recovery_accuracy: recovered / message_total,
        leak_rate: ratio(correct, known),
        conditional_leak_rates: by_init
            .into_iter()
            .map(|(k, (c, n))| (k, ratio(c, n)))
            .collect(),
        unknown_fraction: 1.0 - known / message_total,
        total_probability: [check_total, message_total],
        leaves: [checks.len(), messages.len()],
    })
}
