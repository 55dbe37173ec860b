//! Dense state vectors over at most [`MAX_QUBITS`] qubits.
//!
//! Qubits are numbered from 1 at the interface, and qubit 1 is the most
//! significant bit of the amplitude index, so a ket `|q₁q₂…qₙ⟩` reads the
//! same way as its index written in binary: `|100⟩` is index 4.
//!
//! Values are immutable. Gates and measurements return new states.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::branch::{BranchPicker, Sampled, ZERO_PROBABILITY};
use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for all exact amplitude algebra.
pub const TOLERANCE: f64 = 1e-12;

/// Inputs with a smaller norm are rejected instead of renormalized.
pub const MIN_NORM: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Normalized amplitudes of an `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_capacity(num_qubits)?;
        if num_qubits == 0 {
            return Err(Error::DimensionMismatch {
                num_qubits,
                got: amplitudes.len(),
            });
        }
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                num_qubits,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < MIN_NORM {
            return Err(Error::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Same as [`StateVector::new`] for real amplitudes.
    pub fn from_real(num_qubits: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::new(num_qubits, amplitudes.iter().map(|&a| c(a)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let mut amps = vec![ZERO; 1 << num_qubits];
        *amps.get_mut(index).ok_or(Error::IndexOutOfRange {
            qubit: index,
            num_qubits,
        })? = ONE;
        Self::new(num_qubits, amps)
    }

    /// Product state from a string over `0`, `1`, `+`, `-`, e.g. `"10+"`.
    pub fn product(kets: &str) -> Result<Self> {
        let mut factors = kets.chars().map(|ch| match ch {
            '0' => Self::from_real(1, &[1.0, 0.0]),
            '1' => Self::from_real(1, &[0.0, 1.0]),
            '+' => Self::from_real(1, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            '-' => Self::from_real(1, &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
            other => Err(Error::UnknownLabel(other.to_string())),
        });
        let first = factors
            .next()
            .ok_or_else(|| Error::UnknownLabel(String::new()))??;
        factors.try_fold(first, |acc, f| acc.tensor(&f?))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_size(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; `self` supplies the high-order qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        check_capacity(n)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Applies a single-qubit gate to `qubit` (1-based).
    pub fn apply_1q(&self, qubit: usize, gate: &Gate1Q) -> Result<Self> {
        let mask = self.mask(qubit)?;
        let m = &gate.entries;
        let mut out = self.amplitudes.clone();
        for i0 in (0..out.len()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            out[i0] = m[0][0] * a0 + m[0][1] * a1;
            out[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: out,
        })
    }

    /// Flips `target` on every basis state whose `control` bit is 1.
    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<Self> {
        let cmask = self.mask(control)?;
        let tmask = self.mask(target)?;
        if control == target {
            return Err(Error::SameQubit(control));
        }
        let mut out = self.amplitudes.clone();
        for (i, slot) in out.iter_mut().enumerate() {
            let src = if i & cmask != 0 { i ^ tmask } else { i };
            *slot = self.amplitudes[src];
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: out,
        })
    }

    /// Every outcome of `basis` with its probability, including impossible
    /// ones (reported as exactly 0).
    pub fn distribution(&self, basis: &MeasurementBasis) -> Result<BTreeMap<Outcome, f64>> {
        let mut dist = BTreeMap::new();
        for (outcome, projected) in self.projections(basis)? {
            let p = norm_sqr(&projected);
            dist.insert(outcome, if p <= ZERO_PROBABILITY { 0.0 } else { p });
        }
        Ok(dist)
    }

    /// Outcomes with nonzero probability, each with its collapsed state.
    pub fn branches(&self, basis: &MeasurementBasis) -> Result<Vec<Branch>> {
        let mut out = Vec::new();
        for (outcome, projected) in self.projections(basis)? {
            let probability = norm_sqr(&projected);
            if probability <= ZERO_PROBABILITY {
                continue;
            }
            let scale = probability.sqrt();
            out.push(Branch {
                outcome,
                probability,
                state: Self {
                    num_qubits: self.num_qubits,
                    amplitudes: projected.into_iter().map(|a| a / scale).collect(),
                },
            });
        }
        Ok(out)
    }

    /// Samples a measurement outcome and collapses the state.
    pub fn measure<R: Rng>(&self, basis: &MeasurementBasis, rng: &mut R) -> Result<Branch> {
        self.measure_with(basis, &mut Sampled(rng))
    }

    /// Measurement whose outcome is chosen by `picker`.
    pub fn measure_with<P: BranchPicker + ?Sized>(
        &self,
        basis: &MeasurementBasis,
        picker: &mut P,
    ) -> Result<Branch> {
        let mut branches = self.branches(basis)?;
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        let probs: Vec<f64> = branches.iter().map(|b| b.probability / total).collect();
        let k = picker.pick(&probs);
        Ok(branches.swap_remove(k))
    }

    /// Largest amplitude difference after aligning global phase.
    pub fn phase_deviation(&self, other: &Self) -> Result<f64> {
        self.same_size(other)?;
        Ok(phase_deviation(&self.amplitudes, &other.amplitudes))
    }

    /// True iff `self = e^{iθ}·other` to within `tol` per amplitude.
    pub fn states_equal(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.phase_deviation(other)? <= tol)
    }

    /// Largest componentwise difference, no phase alignment.
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        self.same_size(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Multiplies by the global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// Conditional state of the other qubits given that `qubits` hold `bits`.
    ///
    /// The result drops the listed qubits; remaining qubits keep their
    /// relative order.
    pub fn condition_on(&self, qubits: &[usize], bits: &[u8]) -> Result<Self> {
        let masks = self.masks(qubits)?;
        if bits.len() != qubits.len() || qubits.len() >= self.num_qubits {
            return Err(Error::InvalidBasis(format!(
                "cannot condition {} qubit(s) of {} on {} bit(s)",
                qubits.len(),
                self.num_qubits,
                bits.len()
            )));
        }
        let keep: Vec<usize> = (1..=self.num_qubits)
            .filter(|q| !qubits.contains(q))
            .collect();
        let keep_masks = self.masks(&keep)?;
        let mut amps = vec![ZERO; 1 << keep.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let matches = masks
                .iter()
                .zip(bits)
                .all(|(m, &b)| (i & m != 0) == (b == 1));
            if matches {
                amps[gather(i, &keep_masks)] = *a;
            }
        }
        Self::new(keep.len(), amps)
    }

    /// Inserts `sub` so that its qubits land at `positions` (1-based, in the
    /// result's numbering, increasing) while `self` fills the rest.
    pub fn insert(&self, positions: &[usize], sub: &Self) -> Result<Self> {
        let n = self.num_qubits + sub.num_qubits;
        check_capacity(n)?;
        if positions.len() != sub.num_qubits
            || positions.windows(2).any(|w| w[0] >= w[1])
            || positions.iter().any(|&q| q == 0 || q > n)
        {
            return Err(Error::InvalidBasis(format!(
                "bad insertion positions {positions:?} for {n} qubits"
            )));
        }
        let bit = |q: usize| 1usize << (n - q);
        let sub_masks: Vec<usize> = positions.iter().map(|&q| bit(q)).collect();
        let rest_masks: Vec<usize> = (1..=n)
            .filter(|q| !positions.contains(q))
            .map(bit)
            .collect();
        let amplitudes = (0..1usize << n)
            .map(|i| {
                self.amplitudes[gather(i, &rest_masks)] * sub.amplitudes[gather(i, &sub_masks)]
            })
            .collect();
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    fn same_size(&self, other: &Self) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                num_qubits: self.num_qubits,
                got: other.amplitudes.len(),
            });
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.num_qubits {
            return Err(Error::IndexOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(1 << (self.num_qubits - qubit))
    }

    fn masks(&self, qubits: &[usize]) -> Result<Vec<usize>> {
        qubits.iter().map(|&q| self.mask(q)).collect()
    }

    /// Unnormalized projection of the state onto every outcome of `basis`.
    fn projections(&self, basis: &MeasurementBasis) -> Result<Vec<(Outcome, Vec<Complex64>)>> {
        basis.validate(self.num_qubits)?;
        match basis {
            MeasurementBasis::Z(qubits) => Ok(self.z_projections(qubits)),
            MeasurementBasis::X(qubits) => {
                let h = Gate1Q::hadamard();
                let rotate = |s: &Self| -> Result<Self> {
                    qubits
                        .iter()
                        .try_fold(s.clone(), |acc, &q| acc.apply_1q(q, &h))
                };
                let rotated = rotate(self)?;
                rotated
                    .z_projections(qubits)
                    .into_iter()
                    .map(|(o, amps)| {
                        let back = rotate(&Self {
                            num_qubits: self.num_qubits,
                            amplitudes: amps,
                        })?;
                        Ok((o, back.amplitudes))
                    })
                    .collect()
            }
            MeasurementBasis::Bell(a, b) => {
                let (ma, mb) = (self.mask(*a)?, self.mask(*b)?);
                Ok(BellLabel::ALL
                    .iter()
                    .map(|&label| {
                        let beta = label.amplitudes();
                        let mut out = vec![ZERO; self.amplitudes.len()];
                        for r in (0..self.amplitudes.len()).filter(|i| i & (ma | mb) == 0) {
                            let idx = [r, r | mb, r | ma, r | ma | mb];
                            let overlap: Complex64 = idx
                                .iter()
                                .zip(beta.iter())
                                .map(|(&i, bk)| bk.conj() * self.amplitudes[i])
                                .sum();
                            for (&i, bk) in idx.iter().zip(beta.iter()) {
                                out[i] = bk * overlap;
                            }
                        }
                        (Outcome::Bell(label), out)
                    })
                    .collect())
            }
        }
    }

    fn z_projections(&self, qubits: &[usize]) -> Vec<(Outcome, Vec<Complex64>)> {
        let masks: Vec<usize> = qubits.iter().map(|&q| 1 << (self.num_qubits - q)).collect();
        (0..1usize << qubits.len())
            .map(|value| {
                let bits: Vec<u8> = (0..qubits.len())
                    .map(|k| ((value >> (qubits.len() - 1 - k)) & 1) as u8)
                    .collect();
                let amps = self
                    .amplitudes
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let hit = masks
                            .iter()
                            .zip(&bits)
                            .all(|(m, &b)| (i & m != 0) == (b == 1));
                        if hit {
                            *a
                        } else {
                            ZERO
                        }
                    })
                    .collect();
                (Outcome::Bits(bits), amps)
            })
            .collect()
    }
}

impl fmt::Display for StateVector {
    /// Nonzero amplitudes as `(a)|ket⟩` terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() <= TOLERANCE {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(
                f,
                "({:.6}{:+.6}i)|{:0w$b}⟩",
                a.re,
                a.im,
                i,
                w = self.num_qubits
            )?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::CapacityExceeded {
            requested: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Packs the bits of `index` selected by `masks` (most significant first).
fn gather(index: usize, masks: &[usize]) -> usize {
    masks
        .iter()
        .fold(0, |acc, m| (acc << 1) | usize::from(index & m != 0))
}

/// Largest `|a_i − e^{iθ} b_i|` with `θ = arg⟨b|a⟩`.
pub fn phase_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// A 2×2 unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1Q {
    entries: [[Complex64; 2]; 2],
}

impl Gate1Q {
    /// Checks unitarity to [`TOLERANCE`].
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let gate = Self { entries };
        let product = gate.matmul(&gate.adjoint());
        let identity = Self::identity();
        let off = (0..2)
            .flat_map(|r| (0..2).map(move |k| (r, k)))
            .map(|(r, k)| (product.entries[r][k] - identity.entries[r][k]).norm())
            .fold(0.0, f64::max);
        if off > TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "gate is not unitary (deviation {off:e})"
            )));
        }
        Ok(gate)
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.entries
    }

    /// `I`.
    pub fn identity() -> Self {
        Self {
            entries: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// `U = iσ_y = |0⟩⟨1| − |1⟩⟨0|`, which flips both Z and X eigenstates.
    pub fn flip() -> Self {
        Self {
            entries: [[ZERO, ONE], [-ONE, ZERO]],
        }
    }

    pub fn hadamard() -> Self {
        let h = c(FRAC_1_SQRT_2);
        Self {
            entries: [[h, h], [h, -h]],
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            entries: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            entries: [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn adjoint(&self) -> Self {
        let e = self.entries;
        Self {
            entries: [
                [e[0][0].conj(), e[1][0].conj()],
                [e[0][1].conj(), e[1][1].conj()],
            ],
        }
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        let (a, b) = (self.entries, other.entries);
        let mut entries = [[ZERO; 2]; 2];
        for (r, row) in entries.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = a[r][0] * b[0][k] + a[r][1] * b[1][k];
            }
        }
        Self { entries }
    }

    /// Largest entry difference after aligning global phase.
    pub fn phase_deviation(&self, other: &Self) -> f64 {
        let flat = |g: &Self| g.entries.iter().flatten().copied().collect::<Vec<_>>();
        phase_deviation(&flat(self), &flat(other))
    }
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellLabel {
    /// `(|10⟩+|01⟩)/√2`
    PsiPlus,
    /// `(|10⟩−|01⟩)/√2`
    PsiMinus,
    /// `(|00⟩+|11⟩)/√2`
    PhiPlus,
    /// `(|00⟩−|11⟩)/√2`
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = c(FRAC_1_SQRT_2);
        match self {
            BellLabel::PsiPlus => [ZERO, h, h, ZERO],
            BellLabel::PsiMinus => [ZERO, -h, h, ZERO],
            BellLabel::PhiPlus => [h, ZERO, ZERO, h],
            BellLabel::PhiMinus => [h, ZERO, ZERO, -h],
        }
    }

    pub fn state(self) -> StateVector {
        StateVector {
            num_qubits: 2,
            amplitudes: self.amplitudes().to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What to measure. Qubit indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasurementBasis {
    /// Computational basis on each listed qubit.
    Z(Vec<usize>),
    /// `{|+⟩, |−⟩}` on each listed qubit; outcome bit 0 is `+`, 1 is `−`.
    X(Vec<usize>),
    /// Projection onto the four Bell states of the ordered pair.
    Bell(usize, usize),
}

impl MeasurementBasis {
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qubits: Vec<usize> = match self {
            MeasurementBasis::Z(q) | MeasurementBasis::X(q) => q.clone(),
            MeasurementBasis::Bell(a, b) => vec![*a, *b],
        };
        if qubits.is_empty() {
            return Err(Error::InvalidBasis("no qubits to measure".into()));
        }
        if let Some(&q) = qubits.iter().find(|&&q| q == 0 || q > num_qubits) {
            return Err(Error::IndexOutOfRange {
                qubit: q,
                num_qubits,
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::InvalidBasis(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }
}

/// Result of one measurement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    /// One bit per measured qubit, in the order the basis lists them.
    Bits(Vec<u8>),
    Bell(BellLabel),
}

impl Outcome {
    /// Parses a bit string such as `"10"`. `+`/`-` are accepted as 0/1.
    pub fn bits(s: &str) -> Self {
        Outcome::Bits(
            s.chars()
                .map(|ch| match ch {
                    '0' | '+' => 0,
                    '1' | '-' => 1,
                    other => panic!("not a bit: {other}"),
                })
                .collect(),
        )
    }

    pub fn as_bits(&self) -> Option<&[u8]> {
        match self {
            Outcome::Bits(b) => Some(b),
            Outcome::Bell(_) => None,
        }
    }

    pub fn as_bell(&self) -> Option<BellLabel> {
        match self {
            Outcome::Bell(l) => Some(*l),
            Outcome::Bits(_) => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Bits(bits) => bits.iter().try_for_each(|b| write!(f, "{b}")),
            Outcome::Bell(label) => f.write_str(label.name()),
        }
    }
}

/// One measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: Outcome,
    /// Exact probability of this outcome.
    pub probability: f64,
    /// Post-measurement state, renormalized.
    pub state: StateVector,
}

serialize_as_display!(BellLabel, Outcome);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S3: f64 = 0.577_350_269_189_625_8; // 1/√3

    fn phi1() -> StateVector {
        StateVector::from_real(3, &[0., 1., 1., 0., 1., 0., 0., 0.]).unwrap()
    }

    fn phi2() -> StateVector {
        // (|10+⟩+|01+⟩+|00−⟩)/√3 expanded by hand
        StateVector::from_real(3, &[1., -1., 1., 1., 1., 1., 0., 0.]).unwrap()
    }

    fn w4() -> StateVector {
        let mut amps = [0.0; 16];
        for i in [8, 4, 2, 1] {
            amps[i] = 1.0;
        }
        StateVector::from_real(4, &amps).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TOLERANCE
    }

    #[test]
    fn make_state_examples() {
        let zero = StateVector::from_real(1, &[1.0, 0.0]).unwrap();
        assert_eq!(zero.amplitudes(), &[ONE, ZERO]);

        let p = phi1();
        for i in 0..8 {
            let want = if [4, 2, 1].contains(&i) { S3 } else { 0.0 };
            assert!(close(p.amplitude(i).re, want), "index {i}");
        }

        let s = StateVector::from_real(1, &[3.0, 4.0]).unwrap();
        assert!(close(s.amplitude(0).re, 0.6) && close(s.amplitude(1).re, 0.8));
    }

    #[test]
    fn make_state_errors() {
        assert_eq!(
            StateVector::from_real(2, &[1.0, 0.0]),
            Err(Error::DimensionMismatch {
                num_qubits: 2,
                got: 2
            })
        );
        assert_eq!(
            StateVector::from_real(1, &[0.0, 0.0]),
            Err(Error::ZeroVector)
        );
        assert_eq!(
            StateVector::from_real(1, &[1e-10, 0.0]),
            Err(Error::ZeroVector)
        );
        assert!(matches!(
            StateVector::basis(9, 0),
            Err(Error::CapacityExceeded { requested: 9, .. })
        ));
    }

    #[test]
    fn tensor_examples() {
        let t = StateVector::product("0")
            .unwrap()
            .tensor(&StateVector::product("1").unwrap())
            .unwrap();
        assert_eq!(t, StateVector::basis(2, 0b01).unwrap());

        let pp = StateVector::product("++").unwrap();
        assert!(pp
            .amplitudes()
            .iter()
            .all(|a| close(a.re, 0.5) && a.im == 0.0));

        let with_ancilla = phi2().tensor(&StateVector::product("0").unwrap()).unwrap();
        assert_eq!(with_ancilla.num_qubits(), 4);
        for (i, a) in with_ancilla.amplitudes().iter().enumerate() {
            let expect = if i & 1 == 0 {
                phi2().amplitude(i >> 1)
            } else {
                ZERO
            };
            assert!((a - expect).norm() <= TOLERANCE);
        }

        let big = StateVector::basis(5, 0).unwrap();
        assert!(matches!(
            big.tensor(&big),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn flip_relations_componentwise() {
        let u = Gate1Q::flip();
        let apply = |s: &str| StateVector::product(s).unwrap().apply_1q(1, &u).unwrap();
        let neg = |s: &str| {
            StateVector::product(s)
                .unwrap()
                .with_phase(std::f64::consts::PI)
        };
        let cases = [
            (apply("0"), neg("1")),
            (apply("1"), StateVector::product("0").unwrap()),
            (apply("+"), StateVector::product("-").unwrap()),
            (apply("-"), neg("+")),
        ];
        for (got, want) in cases {
            assert!(
                got.max_deviation(&want).unwrap() <= TOLERANCE,
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn hadamard_on_phi2_qubit3() {
        let got = phi2().apply_1q(3, &Gate1Q::hadamard()).unwrap();
        // (|10⟩+|01⟩)|0⟩+|00⟩|1⟩ over √3, which is Φ₁
        let want = StateVector::from_real(3, &[0., 1., 1., 0., 1., 0., 0., 0.]).unwrap();
        assert!(got.max_deviation(&want).unwrap() <= TOLERANCE);

        // brute-force I⊗I⊗H matrix multiply
        let h = FRAC_1_SQRT_2;
        let src = phi2();
        let mut brute = [ZERO; 8];
        for (row, slot) in brute.iter_mut().enumerate() {
            for col in 0..8 {
                if row >> 1 != col >> 1 {
                    continue;
                }
                let sign = if row & col & 1 == 1 { -h } else { h };
                *slot += c(sign) * src.amplitude(col);
            }
        }
        for (i, want) in brute.iter().enumerate() {
            assert!((want - got.amplitude(i)).norm() <= TOLERANCE);
        }
    }

    #[test]
    fn cnot_examples() {
        let s = StateVector::basis(2, 0b10).unwrap();
        assert_eq!(
            s.apply_cnot(1, 2).unwrap(),
            StateVector::basis(2, 0b11).unwrap()
        );
        let z = StateVector::basis(2, 0).unwrap();
        assert_eq!(z.apply_cnot(1, 2).unwrap(), z);
        assert_eq!(z.apply_cnot(2, 2), Err(Error::SameQubit(2)));
        assert!(matches!(
            z.apply_cnot(1, 3),
            Err(Error::IndexOutOfRange { qubit: 3, .. })
        ));
    }

    #[test]
    fn apply_1q_out_of_range() {
        assert!(matches!(
            phi1().apply_1q(4, &Gate1Q::hadamard()),
            Err(Error::IndexOutOfRange {
                qubit: 4,
                num_qubits: 3
            })
        ));
        assert!(phi1().apply_1q(0, &Gate1Q::hadamard()).is_err());
    }

    #[test]
    fn distribution_examples() {
        let d = phi1()
            .distribution(&MeasurementBasis::Z(vec![1, 2]))
            .unwrap();
        assert_eq!(d.len(), 4);
        for (k, v) in [
            ("10", 1.0 / 3.0),
            ("01", 1.0 / 3.0),
            ("00", 1.0 / 3.0),
            ("11", 0.0),
        ] {
            assert!(close(d[&Outcome::bits(k)], v), "{k}");
        }
        assert_eq!(d[&Outcome::bits("11")], 0.0);

        let d = w4().distribution(&MeasurementBasis::Z(vec![3, 4])).unwrap();
        for (k, v) in [("00", 0.5), ("10", 0.25), ("01", 0.25), ("11", 0.0)] {
            assert!(close(d[&Outcome::bits(k)], v), "{k}");
        }

        let d = w4()
            .distribution(&MeasurementBasis::X(vec![1, 2, 3, 4]))
            .unwrap();
        assert!(close(d[&Outcome::bits("++++")], 0.25));
        assert!(close(d.values().sum::<f64>(), 1.0));
    }

    #[test]
    fn bell_measurement_of_eigenstate() {
        let psi = BellLabel::PsiPlus.state();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = psi
            .measure(&MeasurementBasis::Bell(1, 2), &mut rng)
            .unwrap();
        assert_eq!(b.outcome, Outcome::Bell(BellLabel::PsiPlus));
        assert!(close(b.probability, 1.0));
        assert!(b.state.states_equal(&psi, TOLERANCE).unwrap());
    }

    #[test]
    fn z_collapse_of_phi2() {
        let branches = phi2().branches(&MeasurementBasis::Z(vec![3])).unwrap();
        assert_eq!(branches.len(), 2);
        let zero = &branches[0];
        assert_eq!(zero.outcome, Outcome::bits("0"));
        assert!(close(zero.probability, 0.5));
        let want = StateVector::from_real(3, &[1., 0., 1., 0., 1., 0., 0., 0.]).unwrap();
        assert!(zero.state.max_deviation(&want).unwrap() <= TOLERANCE);
    }

    #[test]
    fn x_collapse_of_phi1() {
        let branches = phi1().branches(&MeasurementBasis::X(vec![3])).unwrap();
        let plus = branches
            .iter()
            .find(|b| b.outcome == Outcome::bits("+"))
            .unwrap();
        assert!(close(plus.probability, 0.5));
        let want = StateVector::from_real(2, &[1., 1., 1., 0.])
            .unwrap()
            .tensor(&StateVector::product("+").unwrap())
            .unwrap();
        assert!(plus.state.max_deviation(&want).unwrap() <= TOLERANCE);
    }

    #[test]
    fn states_equal_examples() {
        let p = phi1();
        assert!(p
            .states_equal(&p.with_phase(std::f64::consts::FRAC_PI_3), TOLERANCE)
            .unwrap());
        assert!(!p.states_equal(&phi2(), TOLERANCE).unwrap());
        // ⟨Φ₁|Φ₂⟩ = (1 + 1 − 1)/√18
        assert!(close(p.inner(&phi2()).unwrap().re, 1.0 / 18f64.sqrt()));
        assert!(matches!(
            p.states_equal(&w4(), TOLERANCE),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invalid_bases() {
        let p = phi1();
        assert!(p.distribution(&MeasurementBasis::Z(vec![])).is_err());
        assert!(p.distribution(&MeasurementBasis::Z(vec![1, 1])).is_err());
        assert!(p.distribution(&MeasurementBasis::X(vec![4])).is_err());
        assert!(p.distribution(&MeasurementBasis::Bell(2, 2)).is_err());
    }

    #[test]
    fn condition_and_insert_round_trip() {
        let s = StateVector::product("1+0").unwrap();
        let rest = s.condition_on(&[3], &[0]).unwrap();
        assert!(rest
            .states_equal(&StateVector::product("1+").unwrap(), TOLERANCE)
            .unwrap());
        let back = rest
            .insert(&[3], &StateVector::product("0").unwrap())
            .unwrap();
        assert!(back.max_deviation(&s).unwrap() <= TOLERANCE);
        let mid = rest
            .insert(&[2], &StateVector::product("-").unwrap())
            .unwrap();
        assert!(
            mid.max_deviation(&StateVector::product("1-+").unwrap())
                .unwrap()
                <= TOLERANCE
        );
    }

    #[test]
    fn gate_new_rejects_non_unitary() {
        assert!(Gate1Q::new([[ONE, ONE], [ZERO, ONE]]).is_err());
        assert!(Gate1Q::new(Gate1Q::hadamard().entries()).is_ok());
    }
}
