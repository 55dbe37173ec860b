//! Round engines for the two schemes.
//!
//! A round is one entangled state from preparation to the parties'
//! measurements. Rounds are either check rounds (sacrificed to estimate the
//! channel error rate) or message/key rounds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

use crate::attacks::{
    apply_attack_with, eve_guess, measure_ancilla, AttackKind, EveNote, Guess, PublicTranscript,
};
use crate::branch::{BranchPicker, Sampled};
use crate::error::{Error, Result};
use crate::qstate::{BellLabel, Gate1Q, MeasurementBasis, Outcome};
use crate::states::{build, InitialState, StateLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Three-qubit `Φ₁`/`Φ₂` scheme.
    Present,
    /// Cao's four-qubit `W₄` scheme.
    Cao,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Present => "present",
            Scheme::Cao => "cao",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "present" => Ok(Scheme::Present),
            "cao" => Ok(Scheme::Cao),
            other => Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialPolicy {
    /// `Φ₁` or `Φ₂` with probability 1/2 each.
    Random,
    Fixed(InitialState),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundMode {
    Check,
    /// Carries one message bit.
    Message(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresentRoundConfig {
    pub initial: InitialPolicy,
    pub mode: RoundMode,
    pub attack: AttackKind,
}

/// Basis both parties use in a Cao check round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckBasis {
    Z,
    X,
    Bell,
}

impl CheckBasis {
    pub const ALL: [CheckBasis; 3] = [CheckBasis::Z, CheckBasis::X, CheckBasis::Bell];

    pub fn name(self) -> &'static str {
        match self {
            CheckBasis::Z => "z",
            CheckBasis::X => "x",
            CheckBasis::Bell => "bell",
        }
    }

    fn for_pair(self, first: usize, second: usize) -> MeasurementBasis {
        match self {
            CheckBasis::Z => MeasurementBasis::Z(vec![first, second]),
            CheckBasis::X => MeasurementBasis::X(vec![first, second]),
            CheckBasis::Bell => MeasurementBasis::Bell(first, second),
        }
    }
}

impl fmt::Display for CheckBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckBasisPolicy {
    /// Z, X or Bell with probability 1/3 each.
    Random,
    Fixed(CheckBasis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaoMode {
    Check(CheckBasisPolicy),
    /// Key round; the bit is one-time-padded with the established key.
    Key(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaoRoundConfig {
    pub mode: CaoMode,
    pub attack: AttackKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Encoding {
    I,
    U,
}

/// Full trace of one round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub scheme: Scheme,
    pub attack: AttackKind,
    pub initial: Option<InitialState>,
    pub check_basis: Option<CheckBasis>,
    pub message_bit: Option<u8>,
    pub alice_encoding: Option<Encoding>,
    pub eve_note: EveNote,
    /// Whether Bob applied a Hadamard before measuring.
    pub bob_decoded: bool,
    pub alice_outcome: Outcome,
    pub bob_outcome: Outcome,
    pub check_pass: Option<bool>,
    pub alice_key: Option<u8>,
    pub bob_key: Option<u8>,
    pub ciphertext: Option<u8>,
    pub recovered_bit: Option<u8>,
    pub eve_guess: Option<Guess>,
}

impl RoundRecord {
    /// Column names of [`RoundRecord::fields`], in order.
    pub const FIELD_NAMES: [&'static str; 16] = [
        "scheme",
        "attack",
        "initial",
        "check_basis",
        "message_bit",
        "alice_encoding",
        "eve_note",
        "bob_decoded",
        "alice_outcome",
        "bob_outcome",
        "check_pass",
        "alice_key",
        "bob_key",
        "ciphertext",
        "recovered_bit",
        "eve_guess",
    ];

    /// Flat key/value view; absent values are empty strings.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let values = [
            self.scheme.to_string(),
            self.attack.to_string(),
            opt(self.initial),
            opt(self.check_basis),
            opt(self.message_bit),
            opt(self.alice_encoding.map(|e| format!("{e:?}"))),
            self.eve_note.to_string(),
            self.bob_decoded.to_string(),
            self.alice_outcome.to_string(),
            self.bob_outcome.to_string(),
            opt(self.check_pass),
            opt(self.alice_key),
            opt(self.bob_key),
            opt(self.ciphertext),
            opt(self.recovered_bit),
            opt(self.eve_guess),
        ];
        Self::FIELD_NAMES.into_iter().zip(values).collect()
    }
}

fn check_bit(bit: u8) -> Result<u8> {
    if bit > 1 {
        return Err(Error::InvalidConfig(format!(
            "message bit must be 0 or 1, got {bit}"
        )));
    }
    Ok(bit)
}

/// Runs one round of the three-qubit scheme.
pub fn present_round<R: Rng>(config: &PresentRoundConfig, rng: &mut R) -> Result<RoundRecord> {
    present_round_with(config, &mut Sampled(rng))
}

/// [`present_round`] with every random event resolved by `picker`.
pub fn present_round_with<P: BranchPicker + ?Sized>(
    config: &PresentRoundConfig,
    picker: &mut P,
) -> Result<RoundRecord> {
    if config.attack == AttackKind::CaoInterceptResendZ34 {
        return Err(Error::InvalidConfig(format!(
            "attack `{}` does not apply to the present scheme",
            config.attack
        )));
    }
    let message_bit = match config.mode {
        RoundMode::Check => None,
        RoundMode::Message(b) => Some(check_bit(b)?),
    };

    let initial = match config.initial {
        InitialPolicy::Fixed(s) => s,
        InitialPolicy::Random => InitialState::ALL[picker.pick(&[0.5, 0.5])],
    };
    let mut state = build(initial.label());

    let alice_encoding = message_bit.map(|bit| if bit == 0 { Encoding::I } else { Encoding::U });
    if alice_encoding == Some(Encoding::U) {
        state = state.apply_1q(3, &Gate1Q::flip())?;
    }

    let (attacked, mut eve_note) = apply_attack_with(config.attack, &state, &[3], picker)?;
    state = attacked;

    let bob_decoded = initial == InitialState::Phi2;
    if bob_decoded {
        state = state.apply_1q(3, &Gate1Q::hadamard())?;
    }

    let alice = state.measure_with(&MeasurementBasis::Z(vec![1, 2]), picker)?;
    let bob = alice
        .state
        .measure_with(&MeasurementBasis::Z(vec![3]), picker)?;
    state = bob.state;

    let mut record = RoundRecord {
        scheme: Scheme::Present,
        attack: config.attack,
        initial: Some(initial),
        check_basis: None,
        message_bit,
        alice_encoding,
        eve_note: EveNote::None,
        bob_decoded,
        alice_outcome: alice.outcome,
        bob_outcome: bob.outcome,
        check_pass: None,
        alice_key: None,
        bob_key: None,
        ciphertext: None,
        recovered_bit: None,
        eve_guess: None,
    };

    match message_bit {
        None => {
            record.check_pass = Some(check_consistent(
                &record.alice_outcome,
                &record.bob_outcome,
            )?);
        }
        Some(_) => {
            record.recovered_bit = Some(recover_bit(&record.alice_outcome, &record.bob_outcome)?);
            measure_ancilla(&mut eve_note, &state, picker)?;
            let transcript = PublicTranscript {
                initial: Some(initial),
                alice_outcome: Some(record.alice_outcome.clone()),
                ciphertext: None,
            };
            record.eve_guess = Some(eve_guess(config.attack, &eve_note, &transcript)?);
        }
    }
    record.eve_note = eve_note;
    Ok(record)
}

/// `(alice ∈ {10, 01}, bob = 0)` → false means "no excitation on qubit 3".
fn parse_pair(alice: &Outcome, bob: &Outcome) -> Result<(bool, u8)> {
    let a = alice.as_bits().ok_or_else(|| {
        Error::InvalidOutcome(format!("Alice outcome {alice} is not a bit string"))
    })?;
    let b = bob
        .as_bits()
        .ok_or_else(|| Error::InvalidOutcome(format!("Bob outcome {bob} is not a bit string")))?;
    let alice_has_excitation = match a {
        [1, 0] | [0, 1] => true,
        [0, 0] => false,
        _ => return Err(Error::InvalidOutcome(format!("Alice outcome |{alice}⟩"))),
    };
    match b {
        [bit @ (0 | 1)] => Ok((alice_has_excitation, *bit)),
        _ => Err(Error::InvalidOutcome(format!("Bob outcome |{bob}⟩"))),
    }
}

/// Check-round rule: Alice `10`/`01` needs Bob `0`; Alice `00` needs Bob `1`.
pub fn check_consistent(alice: &Outcome, bob: &Outcome) -> Result<bool> {
    let (excited, b) = parse_pair(alice, bob)?;
    Ok(if excited { b == 0 } else { b == 1 })
}

/// Message recovery table.
///
/// | Alice      | Bob | bit |
/// |------------|-----|-----|
/// | `10`/`01`  | `0` | 0   |
/// | `10`/`01`  | `1` | 1   |
/// | `00`       | `0` | 1   |
/// | `00`       | `1` | 0   |
pub fn recover_bit(alice: &Outcome, bob: &Outcome) -> Result<u8> {
    let (excited, b) = parse_pair(alice, bob)?;
    Ok(if excited { b } else { 1 - b })
}

/// Runs one round of Cao's scheme.
pub fn cao_round<R: Rng>(config: &CaoRoundConfig, rng: &mut R) -> Result<RoundRecord> {
    cao_round_with(config, &mut Sampled(rng))
}

/// [`cao_round`] with every random event resolved by `picker`.
pub fn cao_round_with<P: BranchPicker + ?Sized>(
    config: &CaoRoundConfig,
    picker: &mut P,
) -> Result<RoundRecord> {
    if !matches!(
        config.attack,
        AttackKind::None | AttackKind::CaoInterceptResendZ34
    ) {
        return Err(Error::InvalidConfig(format!(
            "attack `{}` does not apply to Cao's scheme",
            config.attack
        )));
    }
    let w4 = build(StateLabel::W4);
    let (state, eve_note) = apply_attack_with(config.attack, &w4, &[3, 4], picker)?;

    let (basis, message_bit) = match config.mode {
        CaoMode::Check(CheckBasisPolicy::Fixed(b)) => (b, None),
        CaoMode::Check(CheckBasisPolicy::Random) => {
            (CheckBasis::ALL[picker.pick(&[1.0 / 3.0; 3])], None)
        }
        CaoMode::Key(bit) => (CheckBasis::Bell, Some(check_bit(bit)?)),
    };
    let alice = state.measure_with(&basis.for_pair(1, 2), picker)?;
    let bob = alice.state.measure_with(&basis.for_pair(3, 4), picker)?;

    let mut record = RoundRecord {
        scheme: Scheme::Cao,
        attack: config.attack,
        initial: None,
        check_basis: None,
        message_bit,
        alice_encoding: None,
        eve_note: eve_note.clone(),
        bob_decoded: false,
        alice_outcome: alice.outcome,
        bob_outcome: bob.outcome,
        check_pass: None,
        alice_key: None,
        bob_key: None,
        ciphertext: None,
        recovered_bit: None,
        eve_guess: None,
    };

    match message_bit {
        None => {
            record.check_basis = Some(basis);
            let error = cao_check_error(basis, &record.alice_outcome, &record.bob_outcome)?;
            record.check_pass = Some(!error);
        }
        Some(bit) => {
            let alice_key = cao_alice_key(&record.alice_outcome)?;
            let bob_key = cao_bob_key(&record.bob_outcome)?;
            let ciphertext = alice_key ^ bit;
            record.alice_key = Some(alice_key);
            record.bob_key = Some(bob_key);
            record.ciphertext = Some(ciphertext);
            record.recovered_bit = Some(bob_key ^ ciphertext);
            let transcript = PublicTranscript {
                ciphertext: Some(ciphertext),
                ..Default::default()
            };
            record.eve_guess = Some(eve_guess(config.attack, &eve_note, &transcript)?);
        }
    }
    Ok(record)
}

/// Alice's key bit: `ψ⁺` → 0, `φ±` → 1.
pub fn cao_alice_key(outcome: &Outcome) -> Result<u8> {
    match outcome.as_bell() {
        Some(BellLabel::PsiPlus) => Ok(0),
        Some(BellLabel::PhiPlus | BellLabel::PhiMinus) => Ok(1),
        _ => Err(Error::InvalidOutcome(format!(
            "no key bit for Alice outcome {outcome}"
        ))),
    }
}

/// Bob's key bit: `φ±` → 0, `ψ⁺` → 1.
pub fn cao_bob_key(outcome: &Outcome) -> Result<u8> {
    match outcome.as_bell() {
        Some(BellLabel::PhiPlus | BellLabel::PhiMinus) => Ok(0),
        Some(BellLabel::PsiPlus) => Ok(1),
        _ => Err(Error::InvalidOutcome(format!(
            "no key bit for Bob outcome {outcome}"
        ))),
    }
}

/// Joint outcomes `(Alice on 1,2; Bob on 3,4)` that an undisturbed `W₄`
/// can produce, per check basis.
pub type CaoCheckTable = BTreeMap<CheckBasis, BTreeSet<(Outcome, Outcome)>>;

/// Derives [`CaoCheckTable`] from the exact `W₄` distributions.
pub fn derive_cao_check_table() -> CaoCheckTable {
    let w4 = build(StateLabel::W4);
    CheckBasis::ALL
        .into_iter()
        .map(|basis| {
            let mut allowed = BTreeSet::new();
            let alice_branches = w4.branches(&basis.for_pair(1, 2)).expect("valid basis");
            for a in alice_branches {
                let bob = a
                    .state
                    .distribution(&basis.for_pair(3, 4))
                    .expect("valid basis");
                for (b, p) in bob {
                    if p > 0.0 {
                        allowed.insert((a.outcome.clone(), b));
                    }
                }
            }
            (basis, allowed)
        })
        .collect()
}

/// The table used by [`cao_check_error`], derived once.
pub fn cao_check_table() -> &'static CaoCheckTable {
    static TABLE: OnceLock<CaoCheckTable> = OnceLock::new();
    TABLE.get_or_init(derive_cao_check_table)
}

/// True when the joint outcome is impossible for an undisturbed `W₄`.
pub fn cao_check_error(basis: CheckBasis, alice: &Outcome, bob: &Outcome) -> Result<bool> {
    let fits = |o: &Outcome| match (basis, o) {
        (CheckBasis::Bell, Outcome::Bell(_)) => true,
        (CheckBasis::Z | CheckBasis::X, Outcome::Bits(b)) => b.len() == 2,
        _ => false,
    };
    if !fits(alice) || !fits(bob) {
        return Err(Error::BasisMismatch(basis.name().to_string()));
    }
    Ok(!cao_check_table()[&basis].contains(&(alice.clone(), bob.clone())))
}

serialize_as_display!(Scheme, CheckBasis);
