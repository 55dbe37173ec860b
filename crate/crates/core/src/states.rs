//! Named states of both schemes and checks of their decompositions.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{BellLabel, Gate1Q, StateVector, TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    /// `(|100⟩+|010⟩+|001⟩)/√3`
    Phi1,
    /// `(|10+⟩+|01+⟩+|00−⟩)/√3`
    Phi2,
    /// `(|1000⟩+|0100⟩+|0010⟩+|0001⟩)/2`
    W4,
    BellPsiPlus,
    BellPsiMinus,
    BellPhiPlus,
    BellPhiMinus,
}

impl StateLabel {
    pub const ALL: [StateLabel; 7] = [
        StateLabel::Phi1,
        StateLabel::Phi2,
        StateLabel::W4,
        StateLabel::BellPsiPlus,
        StateLabel::BellPsiMinus,
        StateLabel::BellPhiPlus,
        StateLabel::BellPhiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateLabel::Phi1 => "phi1",
            StateLabel::Phi2 => "phi2",
            StateLabel::W4 => "w4",
            StateLabel::BellPsiPlus => "psi+",
            StateLabel::BellPsiMinus => "psi-",
            StateLabel::BellPhiPlus => "phi+",
            StateLabel::BellPhiMinus => "phi-",
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateLabel::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// The two states Alice chooses between in the three-qubit scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InitialState {
    Phi1,
    Phi2,
}

impl InitialState {
    pub const ALL: [InitialState; 2] = [InitialState::Phi1, InitialState::Phi2];

    pub fn label(self) -> StateLabel {
        match self {
            InitialState::Phi1 => StateLabel::Phi1,
            InitialState::Phi2 => StateLabel::Phi2,
        }
    }

    pub fn name(self) -> &'static str {
        self.label().name()
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Canonical state for `label`.
pub fn build(label: StateLabel) -> StateVector {
    match label {
        StateLabel::Phi1 => ket_sum(&[(1.0, "100"), (1.0, "010"), (1.0, "001")]).normalized(),
        // qubit 3 expanded literally from |+⟩ and |−⟩
        StateLabel::Phi2 => ket_sum(&[(1.0, "10+"), (1.0, "01+"), (1.0, "00-")]).normalized(),
        StateLabel::W4 => {
            ket_sum(&[(1.0, "1000"), (1.0, "0100"), (1.0, "0010"), (1.0, "0001")]).normalized()
        }
        StateLabel::BellPsiPlus => BellLabel::PsiPlus.state(),
        StateLabel::BellPsiMinus => BellLabel::PsiMinus.state(),
        StateLabel::BellPhiPlus => BellLabel::PhiPlus.state(),
        StateLabel::BellPhiMinus => BellLabel::PhiMinus.state(),
    }
}

/// Looks up a state by its name (`phi1`, `w4`, `psi+`, ...).
pub fn build_named(name: &str) -> Result<StateVector> {
    Ok(build(name.parse()?))
}

/// Unnormalized linear combination of kets, used to transcribe written
/// expansions term by term, prefactor included.
#[derive(Debug, Clone, PartialEq)]
struct Expr {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Expr {
    fn ket(kets: &str) -> Self {
        let s = StateVector::product(kets).expect("valid product ket");
        Self {
            num_qubits: s.num_qubits(),
            amps: s.amplitudes().to_vec(),
        }
    }

    fn bell(label: BellLabel) -> Self {
        Self {
            num_qubits: 2,
            amps: label.amplitudes().to_vec(),
        }
    }

    fn from_state(s: &StateVector) -> Self {
        Self {
            num_qubits: s.num_qubits(),
            amps: s.amplitudes().to_vec(),
        }
    }

    fn scale(mut self, k: f64) -> Self {
        self.amps.iter_mut().for_each(|a| *a *= k);
        self
    }

    fn plus(mut self, other: Self) -> Self {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.amps
            .iter_mut()
            .zip(other.amps)
            .for_each(|(a, b)| *a += b);
        self
    }

    fn minus(self, other: Self) -> Self {
        self.plus(other.scale(-1.0))
    }

    fn otimes(self, other: Self) -> Self {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalized(self) -> StateVector {
        StateVector::new(self.num_qubits, self.amps).expect("nonzero expression")
    }
}

fn ket_sum(terms: &[(f64, &str)]) -> Expr {
    terms
        .iter()
        .map(|&(k, s)| Expr::ket(s).scale(k))
        .reduce(Expr::plus)
        .expect("at least one term")
}

/// A comparison that was made but is not the one the report is judged on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternateComparison {
    pub right: String,
    pub max_deviation: f64,
    pub equal: bool,
}

/// Outcome of checking one written decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub left: String,
    pub right: String,
    /// Largest amplitude difference between the normalized sides after
    /// aligning global phase.
    pub max_deviation: f64,
    pub pass: bool,
    /// Norm of each side exactly as written, before normalization.
    pub written_norms: [f64; 2],
    pub alternate: Option<AlternateComparison>,
}

fn compare(id: &str, left: (&str, Expr), right: (&str, Expr)) -> IdentityReport {
    let written_norms = [left.1.norm(), right.1.norm()];
    let (l, r) = (left.1.normalized(), right.1.normalized());
    let max_deviation = l.phase_deviation(&r).expect("same register size");
    IdentityReport {
        id: id.to_string(),
        left: left.0.to_string(),
        right: right.0.to_string(),
        max_deviation,
        pass: max_deviation <= TOLERANCE,
        written_norms,
        alternate: None,
    }
}

fn with_alternate(
    mut report: IdentityReport,
    right: &str,
    other: &StateVector,
    left: &Expr,
) -> IdentityReport {
    let max_deviation = left
        .clone()
        .normalized()
        .phase_deviation(other)
        .expect("same register size");
    report.alternate = Some(AlternateComparison {
        right: right.to_string(),
        max_deviation,
        equal: max_deviation <= TOLERANCE,
    });
    report
}

/// Checks every written decomposition of the W states and the CNOT-attacked
/// state. All comparisons are between normalized states, up to global phase.
pub fn verify_identities() -> Vec<IdentityReport> {
    use BellLabel::{PhiMinus, PhiPlus, PsiPlus};

    let half = 0.5;
    let quarter = 0.25;
    let k = |s: &str| Expr::ket(s);
    let bell = Expr::bell;

    // |W₄⟩ in the Z, mixed Z/Bell, Bell and X forms
    let w4_z = ket_sum(&[(1.0, "1000"), (1.0, "0100"), (1.0, "0010"), (1.0, "0001")]).scale(half);
    let w4_pairs = k("10")
        .plus(k("01"))
        .otimes(k("00"))
        .plus(k("00").otimes(k("10").plus(k("01"))))
        .scale(half);
    let w4_bell = bell(PsiPlus)
        .otimes(bell(PhiPlus).plus(bell(PhiMinus)))
        .plus(bell(PhiPlus).plus(bell(PhiMinus)).otimes(bell(PsiPlus)))
        .scale(half);
    let w4_x = k("++")
        .otimes(k("++").scale(2.0).plus(k("+-")).plus(k("-+")))
        .minus(k("--").otimes(k("--").scale(2.0).plus(k("+-")).plus(k("-+"))))
        .plus(k("+-").otimes(k("++").minus(k("--"))))
        .plus(k("-+").otimes(k("++").minus(k("--"))))
        .scale(quarter);

    // attacked Cao states, Z-outcome 00 and 10/01 branches
    let r2 = FRAC_1_SQRT_2;
    let x_all = k("++").plus(k("+-")).plus(k("-+")).plus(k("--"));
    let eq2_z = k("10").plus(k("01")).otimes(k("00")).scale(r2);
    let eq2_bell = bell(PsiPlus)
        .otimes(bell(PhiPlus).plus(bell(PhiMinus)))
        .scale(r2);
    let eq2_x = k("++").minus(k("--")).otimes(x_all.clone()).scale(r2);
    let eq3_z = k("00").otimes(k("10").plus(k("01"))).scale(r2);
    let eq3_bell = bell(PhiPlus)
        .plus(bell(PhiMinus))
        .otimes(bell(PsiPlus))
        .scale(r2);
    let eq3_x = x_all.otimes(k("++").minus(k("--"))).scale(r2);

    // Φ₂ after Eve's CNOT onto an ancilla in |0⟩
    let eq8 = k("10")
        .plus(k("01"))
        .otimes(k("00").plus(k("11")))
        .plus(k("00").otimes(k("00").minus(k("11"))))
        .scale(1.0 / 6f64.sqrt());
    let cnot_attacked = build(StateLabel::Phi2)
        .tensor(&StateVector::product("0").expect("ket"))
        .and_then(|s| s.apply_cnot(3, 4))
        .expect("4-qubit register");

    let r3 = 1.0 / 3f64.sqrt();
    let eq9 = k("10")
        .plus(k("01"))
        .otimes(k("0"))
        .plus(k("00").otimes(k("1")))
        .scale(r3);
    let eq10 = k("10")
        .plus(k("01"))
        .otimes(k("+"))
        .plus(k("00").otimes(k("-")))
        .scale(r3);

    let phi1 = build(StateLabel::Phi1);
    let phi2 = build(StateLabel::Phi2);

    vec![
        compare(
            "w4-z-pairs",
            ("W4 Z form", w4_z.clone()),
            ("W4 pair form", w4_pairs),
        ),
        compare(
            "w4-z-bell",
            ("W4 Z form", w4_z.clone()),
            ("W4 Bell form", w4_bell),
        ),
        compare("w4-z-x", ("W4 Z form", w4_z), ("W4 X form", w4_x)),
        compare(
            "cao-attacked-00-z-bell",
            ("Z form", eq2_z.clone()),
            ("Bell form", eq2_bell),
        ),
        compare("cao-attacked-00-z-x", ("Z form", eq2_z), ("X form", eq2_x)),
        compare(
            "cao-attacked-psi-z-bell",
            ("Z form", eq3_z.clone()),
            ("Bell form", eq3_bell),
        ),
        compare("cao-attacked-psi-z-x", ("Z form", eq3_z), ("X form", eq3_x)),
        compare(
            "phi2-cnot-ancilla",
            ("written Phi2' on 1,2,3,e", eq8),
            ("CNOT(3->e)(Phi2 x |0>e)", Expr::from_state(&cnot_attacked)),
        ),
        compare(
            "phi1-z-split",
            ("(|10>+|01>)|0>+|00>|1>", eq9),
            ("Phi1", Expr::from_state(&phi1)),
        ),
        with_alternate(
            compare(
                "phi-x-split",
                ("(|10>+|01>)|+>+|00>|->", eq10.clone()),
                ("Phi2", Expr::from_state(&phi2)),
            ),
            "Phi1",
            &phi1,
            &eq10,
        ),
    ]
}

/// `H·U` against `U·H`: the Hadamard Bob applies for `Φ₂` turns Alice's
/// X-basis flip into a Z-basis flip (`H·U = −U·H`). Returns the
/// phase-aligned deviation.
pub fn flip_commutation_deviation() -> f64 {
    let h = Gate1Q::hadamard();
    let hu = h.matmul(&Gate1Q::flip());
    let uh = Gate1Q::flip().matmul(&h);
    hu.phase_deviation(&uh)
}

serialize_as_display!(StateLabel, InitialState);
