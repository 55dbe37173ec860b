//! Sources of branch decisions.
//!
//! Every random event in a round (a measurement outcome, Alice's choice of
//! initial state, a check basis) is resolved by asking a [`BranchPicker`] to
//! choose an index from a probability vector. A [`Sampled`] picker draws from
//! a random stream; the [`enumerate`] driver replays the same round code once
//! per leaf of the branch tree and reports each leaf's exact weight.

use rand::Rng;

/// Probabilities at or below this are treated as impossible branches.
pub const ZERO_PROBABILITY: f64 = 1e-20;

/// Chooses one branch out of a probability vector.
pub trait BranchPicker {
    /// `probabilities` sums to 1; the returned index must have nonzero weight.
    fn pick(&mut self, probabilities: &[f64]) -> usize;
}

/// Samples branches from a random stream.
#[derive(Debug)]
pub struct Sampled<R>(pub R);

impl<R: Rng> BranchPicker for Sampled<R> {
    fn pick(&mut self, probabilities: &[f64]) -> usize {
        let u: f64 = self.0.random();
        let mut acc = 0.0;
        let mut last_possible = None;
        for (i, &p) in probabilities.iter().enumerate() {
            if p <= ZERO_PROBABILITY {
                continue;
            }
            acc += p;
            last_possible = Some(i);
            if u < acc {
                return i;
            }
        }
        // rounding left u above the accumulated mass
        last_possible.expect("no branch with nonzero probability")
    }
}

/// Replays a fixed prefix of choices, then takes the first possible branch and
/// queues its siblings for later exploration.
#[derive(Debug)]
pub struct Scripted {
    prefix: Vec<usize>,
    path: Vec<usize>,
    weight: f64,
    queued: Vec<Vec<usize>>,
}

impl Scripted {
    fn new(prefix: Vec<usize>) -> Self {
        Self {
            prefix,
            path: Vec::new(),
            weight: 1.0,
            queued: Vec::new(),
        }
    }

    /// Product of the probabilities of every choice made so far.
    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl BranchPicker for Scripted {
    fn pick(&mut self, probabilities: &[f64]) -> usize {
        let depth = self.path.len();
        let choice = if depth < self.prefix.len() {
            self.prefix[depth]
        } else {
            let mut possible = probabilities
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > ZERO_PROBABILITY)
                .map(|(i, _)| i);
            let first = possible.next().expect("no branch with nonzero probability");
            let siblings: Vec<usize> = possible.collect();
            for &sibling in siblings.iter().rev() {
                let mut alt = self.path.clone();
                alt.push(sibling);
                self.queued.push(alt);
            }
            first
        };
        self.weight *= probabilities[choice];
        self.path.push(choice);
        choice
    }
}

/// One leaf of an enumerated branch tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf<T> {
    pub weight: f64,
    pub path: Vec<usize>,
    pub value: T,
}

/// Runs `round` once per leaf of its branch tree.
///
/// The closure must be deterministic given the choices it receives. Leaves
/// are returned in depth-first order; their weights sum to 1 up to rounding.
pub fn enumerate<T, E, F>(mut round: F) -> Result<Vec<Leaf<T>>, E>
where
    F: FnMut(&mut Scripted) -> Result<T, E>,
{
    let mut leaves = Vec::new();
    let mut pending = vec![Vec::new()];
    while let Some(prefix) = pending.pop() {
        let mut picker = Scripted::new(prefix);
        let value = round(&mut picker)?;
        pending.append(&mut picker.queued);
        leaves.push(Leaf {
            weight: picker.weight,
            path: picker.path,
            value,
        });
    }
    Ok(leaves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumerate_two_level_tree() {
        let leaves = enumerate(|p| -> Result<_, ()> {
            let a = p.pick(&[0.5, 0.5]);
            let b = if a == 0 {
                p.pick(&[0.25, 0.0, 0.75])
            } else {
                9
            };
            Ok((a, b))
        })
        .unwrap();
        let got: Vec<_> = leaves.iter().map(|l| (l.value, l.weight)).collect();
        assert_eq!(got, vec![((0, 0), 0.125), ((0, 2), 0.375), ((1, 9), 0.5)]);
    }

    #[test]
    fn sampled_never_picks_zero_branch() {
        let mut picker = Sampled(ChaCha8Rng::seed_from_u64(3));
        for _ in 0..10_000 {
            assert_ne!(picker.pick(&[0.3, 0.0, 0.7]), 1);
        }
    }

    #[test]
    fn sampled_frequencies() {
        let mut picker = Sampled(ChaCha8Rng::seed_from_u64(11));
        let n = 100_000;
        let hits = (0..n).filter(|_| picker.pick(&[0.25, 0.75]) == 0).count();
        let sigma = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - 0.25).abs() < 5.0 * sigma);
    }
}
