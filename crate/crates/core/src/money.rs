//! Private-key quantum money: the counting security procedure, the
//! generator constructions from pure-state and symmetric-verifiable money,
//! and the counterfeiting reduction with its exact binomial-tail machinery.
//!
//! Counterfeit submissions are restricted to product states (every in-scope
//! reduction mints fresh independent notes), so `count` is the exact
//! Poisson-binomial distribution of per-register verification outcomes.
//! The weak-security variants (counterfeiting succeeds with probability up
//! to 1 - 1/poly) are direct corollaries of the same counting machinery and
//! get no separate surface here.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::owsg::{KeyedStateFamily, Owsg};
use crate::puzzles::{PuzzleSolver, StateSupply};
use crate::qstate::DensityMatrix;
use crate::rng::WbRng;
use crate::TOL_ASSERT;

/// Private-key quantum money over an enumerable key space. Verification is
/// an effect per key, so acceptance probabilities are exact.
#[derive(Debug, Clone)]
pub struct MoneyScheme {
    probs: Vec<f64>,
    notes: Vec<DensityMatrix>,
    ver_effects: Vec<ComplexMatrix>,
    pub eps_corr: f64,
}

impl MoneyScheme {
    pub fn new(
        probs: Vec<f64>,
        notes: Vec<DensityMatrix>,
        ver_effects: Vec<ComplexMatrix>,
        eps_corr: f64,
    ) -> Result<Self> {
        if probs.len() != notes.len() || probs.len() != ver_effects.len() {
            return Err(Error::LengthMismatch {
                left: probs.len(),
                right: notes.len().min(ver_effects.len()),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > crate::TOL_EXACT {
            return Err(Error::NotNormalized {
                deviation: (total - 1.0).abs(),
            });
        }
        let scheme = MoneyScheme {
            probs,
            notes,
            ver_effects,
            eps_corr,
        };
        let corr = scheme.correctness();
        if corr < 1.0 - eps_corr - TOL_ASSERT {
            return Err(Error::InvalidArgument(alloc::format!(
                "correctness {corr} below declared 1 - {eps_corr}"
            )));
        }
        Ok(scheme)
    }

    pub fn key_count(&self) -> usize {
        self.probs.len()
    }

    pub fn key_probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn note(&self, key: usize) -> &DensityMatrix {
        &self.notes[key]
    }

    pub fn verify(&self, key: usize, state: &DensityMatrix) -> f64 {
        state.effect_probability(&self.ver_effects[key])
    }

    pub fn correctness(&self) -> f64 {
        self.probs
            .iter()
            .zip(&self.notes)
            .enumerate()
            .map(|(k, (p, note))| p * self.verify(k, note))
            .sum()
    }

    pub fn sample_key(&self, rng: &mut WbRng) -> usize {
        rng.sample_index(&self.probs)
    }
}

/// Orthonormal basis-state notes with projective verification; the fully
/// invertible toy instantiation.
pub fn orthonormal_money(k: usize) -> Result<MoneyScheme> {
    let shape = crate::qstate::RegisterShape::single("$", k)?;
    let mut notes = Vec::with_capacity(k);
    let mut effects = Vec::with_capacity(k);
    for i in 0..k {
        let note = crate::qstate::PureState::basis(shape.clone(), i)?.to_density();
        effects.push(note.matrix().clone());
        notes.push(note);
    }
    MoneyScheme::new(vec![1.0 / k as f64; k], notes, effects, 0.0)
}

/// Exact distribution of the counting procedure on product submissions:
/// verify each register and tally acceptances. Entry `j` of the result is
/// `Pr[Count = j]`.
pub fn count(scheme: &MoneyScheme, key: usize, registers: &[DensityMatrix]) -> Result<Vec<f64>> {
    let dim = scheme.notes[0].dim();
    let mut dist = vec![1.0f64];
    for reg in registers {
        if reg.dim() != dim {
            return Err(Error::LengthMismatch {
                left: dim,
                right: reg.dim(),
            });
        }
        let p = scheme.verify(key, reg);
        let mut next = vec![0.0f64; dist.len() + 1];
        for (j, mass) in dist.iter().enumerate() {
            next[j] += mass * (1.0 - p);
            next[j + 1] += mass * p;
        }
        dist = next;
    }
    Ok(dist)
}

/// `Pr[Count >= threshold]` from a counting distribution.
pub fn count_at_least(dist: &[f64], threshold: usize) -> f64 {
    dist.iter().skip(threshold).sum::<f64>().clamp(0.0, 1.0)
}

/// Exact binomial upper tail `Pr[Bin(ell, p) >= threshold]`, summed over
/// the lower tail for stability at small thresholds.
pub fn binomial_count_tail(ell: usize, p: f64, threshold: usize) -> f64 {
    if threshold == 0 {
        return 1.0;
    }
    if threshold > ell {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    // pmf(0) = (1-p)^ell via exp(ell ln(1-p)); the recurrence
    // pmf(j+1) = pmf(j) (ell-j)/(j+1) p/(1-p) is stable for the few lower
    // terms the in-scope thresholds need.
    let mut pmf = libm::exp(ell as f64 * libm::log1p(-p));
    let ratio = p / (1.0 - p);
    let mut lower = 0.0f64;
    for j in 0..threshold {
        lower += pmf;
        pmf *= (ell - j) as f64 / (j + 1) as f64 * ratio;
    }
    (1.0 - lower).clamp(0.0, 1.0)
}

/// Generator from money with pure notes: keys and notes carry over,
/// verification projects onto the claimed note.
pub fn owsg_from_pure_money(scheme: &MoneyScheme) -> Result<Owsg> {
    let mut effects = Vec::with_capacity(scheme.key_count());
    for note in &scheme.notes {
        let pure = note.as_pure(TOL_ASSERT)?;
        effects.push(pure.to_density().matrix().clone());
    }
    let family = KeyedStateFamily::new(scheme.probs.clone(), scheme.notes.clone())?;
    Owsg::new(family, effects, scheme.eps_corr)
}

/// Generator from symmetric-verifiable money: the scheme's own verification
/// effects become the generator's, after checking
/// `Pr[Ver(k, $_{k'})] = Pr[Ver(k', $_k)]` on every key pair.
pub fn owsg_from_symmetric_money(scheme: &MoneyScheme) -> Result<Owsg> {
    for a in 0..scheme.key_count() {
        for b in (a + 1)..scheme.key_count() {
            let ab = scheme.verify(a, scheme.note(b));
            let ba = scheme.verify(b, scheme.note(a));
            if (ab - ba).abs() > TOL_ASSERT {
                return Err(Error::SymmetryViolation {
                    key_a: a,
                    key_b: b,
                    delta: (ab - ba).abs(),
                });
            }
        }
    }
    let family = KeyedStateFamily::new(scheme.probs.clone(), scheme.notes.clone())?;
    Owsg::new(family, scheme.ver_effects.clone(), scheme.eps_corr)
}

/// One counterfeiting attempt built from a generator inverter: invert the
/// note to a key guess, mint `ell = max(16p(t+1), 16^2 p^3)` fresh notes,
/// and submit them. The report carries the exact counting tail and the
/// Hoeffding floor the reduction argues from.
#[derive(Debug, Clone, Copy)]
pub struct CloneReport {
    pub ell: usize,
    pub guessed_key: Option<usize>,
    pub per_copy_accept: f64,
    /// Exact `Pr[Count >= t + 1]` for the submission.
    pub tail: f64,
    /// `1 - 2 e^{-2p}`, valid whenever the per-copy acceptance is at least
    /// `1/(8p)`.
    pub hoeffding_floor: f64,
}

pub fn clone_ell(p: usize, t: usize) -> usize {
    (16 * p * (t + 1)).max(256 * p * p * p)
}

pub fn inverter_to_cloner(
    scheme: &MoneyScheme,
    inverter: &dyn PuzzleSolver,
    p: usize,
    t: usize,
    true_key: usize,
    rng: &mut WbRng,
) -> Result<CloneReport> {
    if p < 1 {
        return Err(Error::InvalidArgument("need p >= 1".to_string()));
    }
    if inverter.copy_budget() != t {
        return Err(Error::CopyBudgetExceeded {
            budget: inverter.copy_budget(),
            requested: t,
        });
    }
    let ell = clone_ell(p, t);
    let hoeffding_floor = 1.0 - 2.0 * libm::exp(-2.0 * p as f64);
    let mut supply = StateSupply::new(scheme.note(true_key), t);
    let guess = inverter
        .solve(&mut supply, rng)
        .and_then(|ans| ans.first().copied())
        .map(|g| g as usize)
        .filter(|g| *g < scheme.key_count());
    let (per_copy_accept, tail) = match guess {
        Some(k_prime) => {
            let accept = scheme.verify(true_key, scheme.note(k_prime));
            (accept, binomial_count_tail(ell, accept, t + 1))
        }
        None => (0.0, 0.0),
    };
    Ok(CloneReport {
        ell,
        guessed_key: guess,
        per_copy_accept,
        tail,
        hoeffding_floor,
    })
}
