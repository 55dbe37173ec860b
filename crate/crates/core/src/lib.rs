//! Simulation and exact analysis of W-state quantum secure communication.
//!
//! Two schemes are modeled:
//!
//! * the three-qubit scheme, where Alice prepares `Φ₁` or `Φ₂`, keeps qubits
//!   1 and 2, encodes one message bit on qubit 3 with `I` or `U = iσ_y`, and
//!   Bob recovers the bit from his Z measurement plus Alice's published
//!   outcome;
//! * Cao's four-qubit scheme, where both parties Bell-measure their halves of
//!   `|W₄⟩` to derive a one-time-pad key.
//!
//! Every quantity is available two ways: [`harness::exact_analyze`] walks the
//! full branch tree with exact probabilities, and
//! [`harness::run_monte_carlo`] samples rounds with reproducible per-round
//! random streams.
//!
//! ```
//! use wstate_qsc::attacks::AttackKind;
//! use wstate_qsc::harness::{exact_analyze, Scheme};
//!
//! let result = exact_analyze(Scheme::Present, AttackKind::InterceptResendZ).unwrap();
//! assert!((result.total_error_rate - 0.25).abs() < 1e-12);
//! ```

/// Serializes a type through its `Display` form.
macro_rules! serialize_as_display {
    ($($ty:ty),+ $(,)?) => {$(
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )+};
}

pub mod attacks;
pub mod branch;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod qstate;
pub mod states;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/state-vectors.md")]
    mod state_vectors {}
    #[doc = include_str!("../../../book/src/w-states.md")]
    mod w_states {}
    #[doc = include_str!("../../../book/src/present-scheme.md")]
    mod present_scheme {}
    #[doc = include_str!("../../../book/src/cao-scheme.md")]
    mod cao_scheme {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
