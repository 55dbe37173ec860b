//! Adversary channels acting on qubits while they travel to Bob.
//!
//! An attack returns the (possibly enlarged) global state together with
//! Eve's private classical record. After the round, [`eve_guess`] combines
//! that record with the public announcements to guess the message bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::branch::{BranchPicker, Sampled};
use crate::error::{Error, Result};
use crate::protocol::recover_bit;
use crate::qstate::{BellLabel, MeasurementBasis, Outcome, StateVector};
use crate::states::InitialState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttackKind {
    None,
    /// Measure the transit qubit in Z and resend the observed basis state.
    InterceptResendZ,
    /// Measure the transit qubit in X and resend the observed basis state.
    InterceptResendX,
    /// CNOT from the transit qubit onto a private ancilla prepared in `|0⟩`.
    CnotAncilla,
    /// Cao scheme only: Z-measure qubits 3 and 4, resend `|00⟩` on outcome
    /// 00 and `ψ⁺` otherwise.
    CaoInterceptResendZ34,
}

impl AttackKind {
    pub const ALL: [AttackKind; 5] = [
        AttackKind::None,
        AttackKind::InterceptResendZ,
        AttackKind::InterceptResendX,
        AttackKind::CnotAncilla,
        AttackKind::CaoInterceptResendZ34,
    ];

    /// Command-line identifier.
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::InterceptResendZ => "ir-z",
            AttackKind::InterceptResendX => "ir-x",
            AttackKind::CnotAncilla => "cnot",
            AttackKind::CaoInterceptResendZ34 => "cao-ir-z",
        }
    }

    /// Number of transit qubits the attack expects, or `None` for any.
    pub fn arity(self) -> Option<usize> {
        match self {
            AttackKind::None => None,
            AttackKind::CaoInterceptResendZ34 => Some(2),
            _ => Some(1),
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown attack `{s}`")))
    }
}

/// Eve's private record of one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EveNote {
    None,
    /// Outcome of an intercept-resend measurement. X outcomes use 0 for `+`.
    Measured {
        basis: char,
        outcome: Outcome,
    },
    /// Eve's ancilla sits at `qubit` of the global state until she measures
    /// it in Z; `outcome` is filled in then.
    Ancilla {
        qubit: usize,
        outcome: Option<u8>,
    },
}

impl fmt::Display for EveNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EveNote::None => Ok(()),
            EveNote::Measured { basis, outcome } => write!(f, "{basis}:{outcome}"),
            EveNote::Ancilla {
                outcome: Some(b), ..
            } => write!(f, "ancilla:{b}"),
            EveNote::Ancilla { outcome: None, .. } => f.write_str("ancilla:?"),
        }
    }
}

/// Everything announced over the classical channel in one round.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PublicTranscript {
    pub initial: Option<InitialState>,
    /// Alice's published outcome on qubits 1,2 (three-qubit scheme).
    pub alice_outcome: Option<Outcome>,
    /// `alice_key ⊕ message` (Cao scheme).
    pub ciphertext: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Guess {
    Bit(u8),
    Unknown,
}

impl fmt::Display for Guess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guess::Bit(b) => write!(f, "{b}"),
            Guess::Unknown => f.write_str("unknown"),
        }
    }
}

/// Sends `transit` qubits of `state` through Eve's channel.
pub fn apply_attack<R: Rng>(
    kind: AttackKind,
    state: &StateVector,
    transit: &[usize],
    rng: &mut R,
) -> Result<(StateVector, EveNote)> {
    apply_attack_with(kind, state, transit, &mut Sampled(rng))
}

/// [`apply_attack`] with branch decisions taken from `picker`.
pub fn apply_attack_with<P: BranchPicker + ?Sized>(
    kind: AttackKind,
    state: &StateVector,
    transit: &[usize],
    picker: &mut P,
) -> Result<(StateVector, EveNote)> {
    if let Some(expected) = kind.arity() {
        if transit.len() != expected {
            return Err(Error::ArityMismatch {
                attack: kind.name(),
                expected,
                got: transit.len(),
            });
        }
    }
    match kind {
        AttackKind::None => Ok((state.clone(), EveNote::None)),
        AttackKind::InterceptResendZ | AttackKind::InterceptResendX => {
            let (basis, symbol) = if kind == AttackKind::InterceptResendZ {
                (MeasurementBasis::Z(transit.to_vec()), 'Z')
            } else {
                (MeasurementBasis::X(transit.to_vec()), 'X')
            };
            // a resent basis state equals the collapsed transit qubit
            let branch = state.measure_with(&basis, picker)?;
            Ok((
                branch.state,
                EveNote::Measured {
                    basis: symbol,
                    outcome: branch.outcome,
                },
            ))
        }
        AttackKind::CnotAncilla => {
            let extended = state.tensor(&StateVector::product("0")?)?;
            let ancilla = extended.num_qubits();
            let entangled = extended.apply_cnot(transit[0], ancilla)?;
            Ok((
                entangled,
                EveNote::Ancilla {
                    qubit: ancilla,
                    outcome: None,
                },
            ))
        }
        AttackKind::CaoInterceptResendZ34 => {
            let mut qubits = transit.to_vec();
            qubits.sort_unstable();
            let branch = state.measure_with(&MeasurementBasis::Z(qubits.clone()), picker)?;
            let bits = branch.outcome.as_bits().expect("Z outcome").to_vec();
            let resent = if bits == [0, 0] {
                branch.state
            } else {
                branch
                    .state
                    .condition_on(&qubits, &bits)?
                    .insert(&qubits, &BellLabel::PsiPlus.state())?
            };
            Ok((
                resent,
                EveNote::Measured {
                    basis: 'Z',
                    outcome: branch.outcome,
                },
            ))
        }
    }
}

/// Measures Eve's ancilla in Z, recording the result in `note`. Other notes
/// pass through untouched. Returns the post-measurement state.
pub fn measure_ancilla<P: BranchPicker + ?Sized>(
    note: &mut EveNote,
    state: &StateVector,
    picker: &mut P,
) -> Result<StateVector> {
    match note {
        EveNote::Ancilla { qubit, outcome } => {
            let branch = state.measure_with(&MeasurementBasis::Z(vec![*qubit]), picker)?;
            *outcome = Some(branch.outcome.as_bits().expect("Z outcome")[0]);
            Ok(branch.state)
        }
        _ => Ok(state.clone()),
    }
}

/// Eve's guess of the message bit from her note and the public transcript.
///
/// Cao scheme: outcome 00 on qubits 3,4 means Alice holds `ψ⁺` (key 0),
/// otherwise `φ±` (key 1); the guess is `ciphertext ⊕ key`.
///
/// Three-qubit scheme: the bit rides on qubit 3 in Z for `Φ₁` and in X for
/// `Φ₂` (Bob's Hadamard maps it back to Z). When Eve's observation was made
/// in that basis she reads the bit off the recovery table exactly as Bob
/// would; otherwise her record is independent of the bit.
pub fn eve_guess(kind: AttackKind, note: &EveNote, transcript: &PublicTranscript) -> Result<Guess> {
    if kind == AttackKind::None {
        return Ok(Guess::Unknown);
    }
    if kind == AttackKind::CaoInterceptResendZ34 {
        let ciphertext = transcript
            .ciphertext
            .ok_or(Error::MissingTranscript("ciphertext"))?;
        let bits = note_bits(note)?;
        let key = u8::from(bits != [0, 0]);
        return Ok(Guess::Bit(ciphertext ^ key));
    }

    let initial = transcript
        .initial
        .ok_or(Error::MissingTranscript("initial-state announcement"))?;
    let alice = transcript
        .alice_outcome
        .as_ref()
        .ok_or(Error::MissingTranscript("Alice's published outcome"))?;
    let matched = matches!(
        (kind, initial),
        (AttackKind::InterceptResendZ, InitialState::Phi1)
            | (AttackKind::CnotAncilla, InitialState::Phi1)
            | (AttackKind::InterceptResendX, InitialState::Phi2)
    );
    if !matched {
        return Ok(Guess::Unknown);
    }
    let bits = note_bits(note)?;
    let bob_equivalent = Outcome::Bits(bits);
    Ok(Guess::Bit(recover_bit(alice, &bob_equivalent)?))
}

fn note_bits(note: &EveNote) -> Result<Vec<u8>> {
    match note {
        EveNote::Measured { outcome, .. } => outcome
            .as_bits()
            .map(<[u8]>::to_vec)
            .ok_or_else(|| Error::InvalidOutcome(format!("Eve recorded {outcome}"))),
        EveNote::Ancilla {
            outcome: Some(b), ..
        } => Ok(vec![*b]),
        EveNote::Ancilla { outcome: None, .. } => {
            Err(Error::InvalidOutcome("ancilla not yet measured".into()))
        }
        EveNote::None => Err(Error::InvalidOutcome("attack left no record".into())),
    }
}

serialize_as_display!(AttackKind, EveNote, Guess);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::enumerate;
    use crate::qstate::{Gate1Q, TOLERANCE};
    use crate::states::{build, StateLabel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn none_is_transparent() {
        let phi1 = build(StateLabel::Phi1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, note) = apply_attack(AttackKind::None, &phi1, &[3], &mut rng).unwrap();
        assert_eq!(out, phi1);
        assert_eq!(note, EveNote::None);
    }

    #[test]
    fn intercept_z_on_phi2_branches() {
        let phi2 = build(StateLabel::Phi2);
        let leaves =
            enumerate(|p| apply_attack_with(AttackKind::InterceptResendZ, &phi2, &[3], p)).unwrap();
        assert_eq!(leaves.len(), 2);
        let zero = leaves
            .iter()
            .find(|l| {
                l.value.1
                    == EveNote::Measured {
                        basis: 'Z',
                        outcome: Outcome::bits("0"),
                    }
            })
            .unwrap();
        assert!((zero.weight - 0.5).abs() < TOLERANCE);
        let want = StateVector::from_real(3, &[1., 0., 1., 0., 1., 0., 0., 0.]).unwrap();
        assert!(zero.value.0.max_deviation(&want).unwrap() < TOLERANCE);
    }

    #[test]
    fn cao_intercept_branches() {
        let w4 = build(StateLabel::W4);
        let leaves =
            enumerate(|p| apply_attack_with(AttackKind::CaoInterceptResendZ34, &w4, &[3, 4], p))
                .unwrap();
        assert_eq!(leaves.len(), 3);
        let psi_12 = BellLabel::PsiPlus
            .state()
            .tensor(&StateVector::product("00").unwrap())
            .unwrap();
        let psi_34 = StateVector::product("00")
            .unwrap()
            .tensor(&BellLabel::PsiPlus.state())
            .unwrap();
        for leaf in &leaves {
            let EveNote::Measured { outcome, .. } = &leaf.value.1 else {
                panic!()
            };
            let (p, want) = match outcome.to_string().as_str() {
                "00" => (0.5, &psi_12),
                "10" | "01" => (0.25, &psi_34),
                other => panic!("impossible outcome {other}"),
            };
            assert!((leaf.weight - p).abs() < TOLERANCE);
            assert!(leaf.value.0.states_equal(want, TOLERANCE).unwrap());
        }
    }

    #[test]
    fn cnot_reproduces_written_state() {
        let phi2 = build(StateLabel::Phi2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, note) = apply_attack(AttackKind::CnotAncilla, &phi2, &[3], &mut rng).unwrap();
        assert_eq!(
            note,
            EveNote::Ancilla {
                qubit: 4,
                outcome: None
            }
        );
        let r6 = 1.0 / 6f64.sqrt();
        // (|10⟩+|01⟩)(|00⟩+|11⟩) + |00⟩(|00⟩−|11⟩), indices over 1,2,3,e
        let mut want = [0.0; 16];
        for (i, a) in [
            (0b1000, r6),
            (0b1011, r6),
            (0b0100, r6),
            (0b0111, r6),
            (0b0000, r6),
            (0b0011, -r6),
        ] {
            want[i] = a;
        }
        let want = StateVector::from_real(4, &want).unwrap();
        assert!(out.max_deviation(&want).unwrap() < TOLERANCE);
    }

    #[test]
    fn arity_checked() {
        let w4 = build(StateLabel::W4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            apply_attack(AttackKind::InterceptResendZ, &w4, &[3, 4], &mut rng),
            Err(Error::ArityMismatch {
                expected: 1,
                got: 2,
                ..
            })
        ));
        assert!(matches!(
            apply_attack(AttackKind::CaoInterceptResendZ34, &w4, &[3], &mut rng),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1,
                ..
            })
        ));
    }

    /// Discard the transit qubit and prepare a fresh one in Eve's observed
    /// basis state, then compare with collapse-in-place on every branch.
    #[test]
    fn resend_equals_collapse() {
        for (kind, basis) in [
            (AttackKind::InterceptResendZ, 'Z'),
            (AttackKind::InterceptResendX, 'X'),
        ] {
            for label in [StateLabel::Phi1, StateLabel::Phi2] {
                let state = build(label);
                let leaves = enumerate(|p| apply_attack_with(kind, &state, &[3], p)).unwrap();
                for leaf in leaves {
                    let EveNote::Measured { outcome, .. } = &leaf.value.1 else {
                        panic!()
                    };
                    let bit = outcome.as_bits().unwrap()[0];
                    let (rotated, fresh) = if basis == 'Z' {
                        (state.clone(), if bit == 0 { "0" } else { "1" })
                    } else {
                        (
                            state.apply_1q(3, &Gate1Q::hadamard()).unwrap(),
                            if bit == 0 { "+" } else { "-" },
                        )
                    };
                    let kept = rotated.condition_on(&[3], &[bit]).unwrap();
                    let replaced = kept
                        .insert(&[3], &StateVector::product(fresh).unwrap())
                        .unwrap();
                    assert!(
                        leaf.value.0.phase_deviation(&replaced).unwrap() <= TOLERANCE,
                        "{kind} {label} {bit}"
                    );
                }
            }
        }
    }

    #[test]
    fn guess_examples() {
        let cao_note = EveNote::Measured {
            basis: 'Z',
            outcome: Outcome::bits("00"),
        };
        let t = PublicTranscript {
            ciphertext: Some(1),
            ..Default::default()
        };
        assert_eq!(
            eve_guess(AttackKind::CaoInterceptResendZ34, &cao_note, &t).unwrap(),
            Guess::Bit(1)
        );

        assert_eq!(
            eve_guess(
                AttackKind::None,
                &EveNote::None,
                &PublicTranscript::default()
            )
            .unwrap(),
            Guess::Unknown
        );

        let note = EveNote::Measured {
            basis: 'Z',
            outcome: Outcome::bits("0"),
        };
        let t = PublicTranscript {
            initial: Some(InitialState::Phi1),
            alice_outcome: Some(Outcome::bits("10")),
            ciphertext: None,
        };
        assert_eq!(
            eve_guess(AttackKind::InterceptResendZ, &note, &t).unwrap(),
            Guess::Bit(0)
        );

        let t2 = PublicTranscript {
            initial: Some(InitialState::Phi2),
            ..t.clone()
        };
        assert_eq!(
            eve_guess(AttackKind::InterceptResendZ, &note, &t2).unwrap(),
            Guess::Unknown
        );
    }

    #[test]
    fn guess_needs_transcript() {
        let note = EveNote::Measured {
            basis: 'Z',
            outcome: Outcome::bits("0"),
        };
        assert!(matches!(
            eve_guess(
                AttackKind::InterceptResendZ,
                &note,
                &PublicTranscript::default()
            ),
            Err(Error::MissingTranscript(_))
        ));
        assert!(matches!(
            eve_guess(
                AttackKind::CaoInterceptResendZ34,
                &note,
                &PublicTranscript::default()
            ),
            Err(Error::MissingTranscript("ciphertext"))
        ));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in AttackKind::ALL {
            assert_eq!(k.name().parse::<AttackKind>().unwrap(), k);
        }
        assert!("bell".parse::<AttackKind>().is_err());
    }
}
