//! Weakly verifiable quantum puzzles, parallel repetition, and the hardness
//! amplification adversary with its Extend and Estimate subroutines.
//!
//! A puzzle is a (check-key sampler, puzzle generator, secret verifier)
//! triple over a finite key alphabet with exact probabilities. Answers are
//! classical strings; `verify` returns an exact acceptance probability that
//! experiment harnesses Bernoulli-sample. Solvers see only puzzle states,
//! drawn through a [`StateSupply`] that enforces the advertised copy budget,
//! and never a check key.

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;
use crate::rng::WbRng;

pub type PuzzleKey = Vec<u32>;
pub type Answer = Vec<u32>;

/// Answer symbol no accepted-answer set contains; solvers emit it when they
/// have nothing better than a refusal.
pub const NO_ANSWER: u32 = u32::MAX;

/// Weakly verifiable quantum puzzle over an enumerable key space.
///
/// `puzzle_gen` is deterministic given the key (mixedness models internal
/// randomness), so states are precomputed per key and solvers borrow them.
#[derive(Clone)]
pub struct WeaklyVerifiablePuzzle {
    keys: Vec<PuzzleKey>,
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
    verify: Arc<dyn Fn(&[u32], &[u32]) -> f64 + Send + Sync>,
    key_arity: usize,
    answer_arity: usize,
}

impl core::fmt::Debug for WeaklyVerifiablePuzzle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("WeaklyVerifiablePuzzle")
            .field("keys", &self.keys.len())
            .field("key_arity", &self.key_arity)
            .field("answer_arity", &self.answer_arity)
            .finish()
    }
}

impl WeaklyVerifiablePuzzle {
    pub fn new(
        keys: Vec<PuzzleKey>,
        probs: Vec<f64>,
        states: Vec<DensityMatrix>,
        verify: Arc<dyn Fn(&[u32], &[u32]) -> f64 + Send + Sync>,
        key_arity: usize,
        answer_arity: usize,
    ) -> Result<Self> {
        if keys.len() != probs.len() || keys.len() != states.len() {
            return Err(Error::LengthMismatch {
                left: keys.len(),
                right: probs.len().min(states.len()),
            });
        }
        if keys.is_empty() {
            return Err(Error::InvalidArgument("empty key support".to_string()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > crate::TOL_ASSERT {
            return Err(Error::NotNormalized {
                deviation: (total - 1.0).abs(),
            });
        }
        for key in &keys {
            if key.len() != key_arity {
                return Err(Error::LengthMismatch {
                    left: key_arity,
                    right: key.len(),
                });
            }
        }
        Ok(WeaklyVerifiablePuzzle {
            keys,
            probs,
            states,
            verify,
            key_arity,
            answer_arity,
        })
    }

    pub fn key_count(&self) -> usize {
        self.keys.len()
    }

    pub fn key(&self, index: usize) -> &PuzzleKey {
        &self.keys[index]
    }

    pub fn key_probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn key_arity(&self) -> usize {
        self.key_arity
    }

    pub fn answer_arity(&self) -> usize {
        self.answer_arity
    }

    pub fn sample_key_index(&self, rng: &mut WbRng) -> usize {
        rng.sample_index(&self.probs)
    }

    /// The puzzle state for a key; deterministic, so callers may draw as
    /// many copies as their budget allows.
    pub fn state(&self, key_index: usize) -> &DensityMatrix {
        &self.states[key_index]
    }

    /// Exact acceptance probability of `answer` under the key.
    pub fn verify_index(&self, answer: &[u32], key_index: usize) -> f64 {
        (self.verify)(answer, &self.keys[key_index])
    }

    pub fn verify(&self, answer: &[u32], key: &[u32]) -> f64 {
        (self.verify)(answer, key)
    }
}

/// `n`-fold parallel repetition: keys are tuples, the puzzle is the tensor
/// product, and verification is the product of component acceptances (accept
/// iff every component accepts).
pub fn parallel_repetition(
    puzzle: &WeaklyVerifiablePuzzle,
    n: usize,
    cap: usize,
) -> Result<WeaklyVerifiablePuzzle> {
    if n < 1 {
        return Err(Error::InvalidArgument("repetition count must be >= 1".to_string()));
    }
    let base_count = puzzle.key_count();
    let tuple_count = base_count.checked_pow(n as u32).ok_or(Error::DimCapExceeded {
        dim: usize::MAX,
        cap,
    })?;
    let state_dim = puzzle.states[0]
        .dim()
        .checked_pow(n as u32)
        .unwrap_or(usize::MAX);
    if state_dim > cap {
        return Err(Error::DimCapExceeded { dim: state_dim, cap });
    }
    let mut keys = Vec::with_capacity(tuple_count);
    let mut probs = Vec::with_capacity(tuple_count);
    let mut states = Vec::with_capacity(tuple_count);
    for mut flat in 0..tuple_count {
        let mut indices = vec![0usize; n];
        for slot in (0..n).rev() {
            indices[slot] = flat % base_count;
            flat /= base_count;
        }
        let mut key = Vec::with_capacity(n * puzzle.key_arity);
        let mut prob = 1.0;
        let mut state = puzzle.states[indices[0]].relabeled("@1");
        key.extend_from_slice(&puzzle.keys[indices[0]]);
        prob *= puzzle.probs[indices[0]];
        for (slot, &idx) in indices.iter().enumerate().skip(1) {
            key.extend_from_slice(&puzzle.keys[idx]);
            prob *= puzzle.probs[idx];
            state = state.tensor(&puzzle.states[idx].relabeled(&format!("@{}", slot + 1)))?;
        }
        keys.push(key);
        probs.push(prob);
        states.push(state);
    }
    let inner = Arc::clone(&puzzle.verify);
    let (ka, aa) = (puzzle.key_arity, puzzle.answer_arity);
    let verify = Arc::new(move |answer: &[u32], key: &[u32]| -> f64 {
        if answer.len() != n * aa || key.len() != n * ka {
            return 0.0;
        }
        let mut prob = 1.0;
        for slot in 0..n {
            prob *= inner(&answer[slot * aa..(slot + 1) * aa], &key[slot * ka..(slot + 1) * ka]);
            if prob == 0.0 {
                return 0.0;
            }
        }
        prob
    });
    WeaklyVerifiablePuzzle::new(keys, probs, states, verify, n * ka, n * aa)
}

/// Hands a solver up to `remaining` copies of one puzzle state and counts
/// what it actually draws.
#[derive(Debug)]
pub struct StateSupply<'a> {
    state: &'a DensityMatrix,
    remaining: usize,
    taken: usize,
}

impl<'a> StateSupply<'a> {
    pub fn new(state: &'a DensityMatrix, copies: usize) -> Self {
        StateSupply {
            state,
            remaining: copies,
            taken: 0,
        }
    }

    /// Draws `count` copies. The returned reference stands for all of them;
    /// `puzzle_gen` is deterministic so the copies are identical.
    pub fn take(&mut self, count: usize) -> Result<&'a DensityMatrix> {
        if count > self.remaining {
            return Err(Error::CopyBudgetExceeded {
                budget: self.remaining,
                requested: count,
            });
        }
        self.remaining -= count;
        self.taken += count;
        Ok(self.state)
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn taken(&self) -> usize {
        self.taken
    }
}

/// Stochastic adversary against a single puzzle. `None` is a distinguished
/// abort, counted as failure by every harness.
pub trait PuzzleSolver {
    fn copy_budget(&self) -> usize;
    fn solve(&self, supply: &mut StateSupply<'_>, rng: &mut WbRng) -> Option<Answer>;
}

/// Adversary against the `n`-fold repetition, fed slot by slot so the
/// amplification adversary can embed its instance in one slot.
pub trait RepeatedSolver {
    fn slots(&self) -> usize;
    fn copies_per_slot(&self) -> usize;
    fn solve(&self, slots: &mut [StateSupply<'_>], rng: &mut WbRng) -> Option<Vec<Answer>>;
}

/// Runs a base solver independently on every slot.
pub struct SlotwiseSolver<S> {
    pub base: S,
    pub n: usize,
}

impl<S: PuzzleSolver> RepeatedSolver for SlotwiseSolver<S> {
    fn slots(&self) -> usize {
        self.n
    }

    fn copies_per_slot(&self) -> usize {
        self.base.copy_budget()
    }

    fn solve(&self, slots: &mut [StateSupply<'_>], rng: &mut WbRng) -> Option<Vec<Answer>> {
        let mut answers = Vec::with_capacity(slots.len());
        for slot in slots.iter_mut() {
            answers.push(self.base.solve(slot, rng)?);
        }
        Some(answers)
    }
}

/// Empirical success rate of a solver, Bernoulli-sampling the exact
/// verification probability per trial.
#[derive(Debug, Clone)]
pub struct SuccessReport {
    pub rate: f64,
    pub std_error: f64,
    pub outcomes: Vec<bool>,
    pub aborts: usize,
    pub trials: usize,
}

pub fn empirical_success(
    puzzle: &WeaklyVerifiablePuzzle,
    solver: &dyn PuzzleSolver,
    t: usize,
    trials: usize,
    rng: &mut WbRng,
) -> Result<SuccessReport> {
    if trials < 1 {
        return Err(Error::InvalidArgument("need at least one trial".to_string()));
    }
    if solver.copy_budget() != t {
        return Err(Error::CopyBudgetExceeded {
            budget: solver.copy_budget(),
            requested: t,
        });
    }
    let mut outcomes = Vec::with_capacity(trials);
    let mut successes = 0usize;
    let mut aborts = 0usize;
    for _ in 0..trials {
        let key_index = puzzle.sample_key_index(rng);
        let mut supply = StateSupply::new(puzzle.state(key_index), t);
        let success = match solver.solve(&mut supply, rng) {
            Some(answer) => rng.bernoulli(puzzle.verify_index(&answer, key_index)),
            None => {
                aborts += 1;
                false
            }
        };
        outcomes.push(success);
        if success {
            successes += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    let std_error = libm::sqrt(rate * (1.0 - rate) / trials as f64);
    Ok(SuccessReport {
        rate,
        std_error,
        outcomes,
        aborts,
        trials,
    })
}

/// Per-key description of a synthetic puzzle: which answers the verifier
/// accepts, with what probability, and how often the puzzle state leaks the
/// key.
#[derive(Debug, Clone)]
pub struct KeyProfile {
    pub accepted: Vec<u32>,
    pub accept_prob: f64,
    pub hint_prob: f64,
}

/// Test-fixture puzzle with tunable solver success. The puzzle state on key
/// `k` is the classical mixture `hint_prob |k+1><k+1| + (1-hint_prob)
/// |0><0|`: basis index 0 is the erased symbol, so a solver that measures
/// one copy learns `k` with probability exactly `hint_prob`.
pub fn synthetic_puzzle(
    alphabet_size: usize,
    profile: Vec<KeyProfile>,
) -> Result<WeaklyVerifiablePuzzle> {
    if profile.len() != alphabet_size || alphabet_size == 0 {
        return Err(Error::InvalidArgument(format!(
            "profile length {} does not match alphabet {alphabet_size}",
            profile.len()
        )));
    }
    for entry in &profile {
        if !(0.0..=1.0).contains(&entry.accept_prob) || !(0.0..=1.0).contains(&entry.hint_prob) {
            return Err(Error::InvalidArgument(
                "profile probabilities must lie in [0,1]".to_string(),
            ));
        }
    }
    let dim = alphabet_size + 1;
    let keys: Vec<PuzzleKey> = (0..alphabet_size).map(|k| vec![k as u32]).collect();
    let probs = vec![1.0 / alphabet_size as f64; alphabet_size];
    let mut states = Vec::with_capacity(alphabet_size);
    for (k, entry) in profile.iter().enumerate() {
        let mut diag = vec![0.0; dim];
        diag[0] = 1.0 - entry.hint_prob;
        diag[k + 1] = entry.hint_prob;
        states.push(DensityMatrix::diagonal(
            crate::qstate::RegisterShape::single("puz", dim)?,
            &diag,
        )?);
    }
    let verify = Arc::new(move |answer: &[u32], key: &[u32]| -> f64 {
        let entry = &profile[key[0] as usize];
        if answer.len() == 1 && entry.accepted.contains(&answer[0]) {
            entry.accept_prob
        } else {
            0.0
        }
    });
    WeaklyVerifiablePuzzle::new(keys, probs, states, verify, 1, 1)
}

/// Solver for synthetic puzzles: measure one copy in the computational
/// basis, answer the revealed key or refuse.
pub struct PlantedSolver;

impl PuzzleSolver for PlantedSolver {
    fn copy_budget(&self) -> usize {
        1
    }

    fn solve(&self, supply: &mut StateSupply<'_>, rng: &mut WbRng) -> Option<Answer> {
        let state = supply.take(1).ok()?;
        let outcome = rng.sample_index(&state.diagonal_probs());
        Some(vec![if outcome == 0 {
            NO_ANSWER
        } else {
            (outcome - 1) as u32
        }])
    }
}

/// Parameters of the amplification adversary: attack the `n`-fold repetition
/// solver at base level `delta` with slack knob `q`, feeding `t` copies per
/// slot. `scale_loops` multiplies every loop constant and is 1 for the
/// faithful construction; smoke runs may shrink it, and reports must say so.
#[derive(Debug, Clone, Copy)]
pub struct AmplificationParams {
    pub n: usize,
    pub q: f64,
    pub delta: f64,
    pub t: usize,
    pub scale_loops: f64,
}

impl AmplificationParams {
    pub fn new(n: usize, q: f64, delta: f64, t: usize) -> Result<Self> {
        if n < 1 || q < 1.0 || !(0.0..1.0).contains(&delta) || delta <= 0.0 || t < 1 {
            return Err(Error::InvalidArgument(
                "need n >= 1, q >= 1, 0 < delta < 1, t >= 1".to_string(),
            ));
        }
        Ok(AmplificationParams {
            n,
            q,
            delta,
            t,
            scale_loops: 1.0,
        })
    }

    pub fn with_scale_loops(mut self, scale: f64) -> Self {
        self.scale_loops = scale;
        self
    }

    fn scaled_ceil(&self, raw: f64) -> usize {
        let scaled = raw * self.scale_loops;
        (libm::ceil(scaled) as usize).max(1)
    }

    /// Online-phase repetition count `L = ceil(6q ln(6q) / delta^{n-v+1})`.
    pub fn online_iterations(&self, v: usize) -> usize {
        let exponent = (self.n - v + 1) as i32;
        self.scaled_ceil(6.0 * self.q * libm::log(6.0 * self.q) / libm::pow(self.delta, exponent as f64))
    }

    /// Extend trial count `N_i = ceil((6q / delta^{n-i+1}) ln(18qn/delta))`.
    pub fn extend_trials(&self, i: usize) -> usize {
        let exponent = (self.n - i + 1) as f64;
        self.scaled_ceil(
            6.0 * self.q / libm::pow(self.delta, exponent)
                * libm::log(18.0 * self.q * self.n as f64 / self.delta),
        )
    }

    /// Estimate sample count
    /// `M_i = ceil((84q^2 / delta^{n-i}) ln(18qnN_i/delta))`.
    pub fn estimate_samples(&self, i: usize) -> usize {
        let n_i = self.extend_trials(i) as f64;
        let exponent = (self.n - i) as f64;
        self.scaled_ceil(
            84.0 * self.q * self.q / libm::pow(self.delta, exponent)
                * libm::log(18.0 * self.q * self.n as f64 * n_i / self.delta),
        )
    }

    /// Estimate acceptance threshold `delta^{n-i}`.
    pub fn extend_threshold(&self, i: usize) -> f64 {
        libm::pow(self.delta, (self.n - i) as f64)
    }

    /// Instance copy budget `t' = ceil(6q ln(6q)/delta^n) * t`, which covers
    /// the online loop in the worst case `v = 1`.
    pub fn instance_budget(&self) -> usize {
        self.online_iterations(1) * self.t
    }
}

/// Empirical estimate of `rsp(prefix)`: the probability that slots
/// `i+1 .. n` all verify when slots `1 .. i` use the prefix keys and the
/// rest are fresh. Uses exactly `M_i` runs of the repeated solver.
pub fn estimate(
    puzzle: &WeaklyVerifiablePuzzle,
    solver: &dyn RepeatedSolver,
    prefix: &[usize],
    i: usize,
    params: &AmplificationParams,
    rng: &mut WbRng,
) -> f64 {
    debug_assert_eq!(prefix.len(), i);
    debug_assert!(i <= params.n.saturating_sub(1));
    let samples = params.estimate_samples(i);
    let n = params.n;
    let t = params.t;
    let mut count = 0usize;
    let mut key_indices = vec![0usize; n];
    for _ in 0..samples {
        key_indices[..i].copy_from_slice(prefix);
        for slot in i..n {
            key_indices[slot] = puzzle.sample_key_index(rng);
        }
        let mut slots: Vec<StateSupply<'_>> = key_indices
            .iter()
            .map(|&k| StateSupply::new(puzzle.state(k), t))
            .collect();
        let Some(answers) = solver.solve(&mut slots, rng) else {
            continue;
        };
        let mut all = true;
        for slot in i..n {
            if !rng.bernoulli(puzzle.verify_index(&answers[slot], key_indices[slot])) {
                all = false;
                break;
            }
        }
        if all {
            count += 1;
        }
    }
    count as f64 / samples as f64
}

/// Extend subroutine: sample up to `N_i` fresh check keys and return the
/// first whose estimated residual success reaches `delta^{n-i}`.
pub fn extend(
    puzzle: &WeaklyVerifiablePuzzle,
    solver: &dyn RepeatedSolver,
    prefix: &[usize],
    i: usize,
    params: &AmplificationParams,
    rng: &mut WbRng,
) -> Option<usize> {
    debug_assert_eq!(prefix.len(), i - 1);
    let trials = params.extend_trials(i);
    let threshold = params.extend_threshold(i);
    let mut extended = Vec::with_capacity(i);
    for _ in 0..trials {
        let candidate = puzzle.sample_key_index(rng);
        extended.clear();
        extended.extend_from_slice(prefix);
        extended.push(candidate);
        let estimate_value = estimate(puzzle, solver, &extended, i, params, rng);
        if estimate_value >= threshold {
            return Some(candidate);
        }
    }
    None
}

/// Outcome of one amplified-adversary run, with the audit data the
/// experiment harness reports.
#[derive(Debug, Clone)]
pub struct AmplifiedRun {
    pub answer: Option<Answer>,
    pub prefix: Vec<usize>,
    pub stopped_at: usize,
    pub copies_used: usize,
}

/// The amplification adversary: attacks a single puzzle given a solver for
/// its `n`-fold repetition. Preprocessing builds a good prefix of check keys
/// via [`extend`]; the online phase embeds the instance in the first
/// unfilled slot, self-generating and self-verifying the later slots.
pub struct AmplifiedSolver<'a> {
    puzzle: &'a WeaklyVerifiablePuzzle,
    solver: &'a dyn RepeatedSolver,
    params: AmplificationParams,
}

impl<'a> AmplifiedSolver<'a> {
    pub fn new(
        puzzle: &'a WeaklyVerifiablePuzzle,
        solver: &'a dyn RepeatedSolver,
        params: AmplificationParams,
    ) -> Result<Self> {
        if solver.slots() != params.n {
            return Err(Error::LengthMismatch {
                left: solver.slots(),
                right: params.n,
            });
        }
        if solver.copies_per_slot() != params.t {
            return Err(Error::CopyBudgetExceeded {
                budget: solver.copies_per_slot(),
                requested: params.t,
            });
        }
        Ok(AmplifiedSolver {
            puzzle,
            solver,
            params,
        })
    }

    pub fn params(&self) -> &AmplificationParams {
        &self.params
    }

    /// One full run with audit data; `solve` is this minus the audit.
    pub fn run(&self, supply: &mut StateSupply<'_>, rng: &mut WbRng) -> AmplifiedRun {
        let n = self.params.n;
        let mut prefix: Vec<usize> = Vec::with_capacity(n.saturating_sub(1));
        let mut stopped_at = n;
        for i in 1..n {
            match extend(self.puzzle, self.solver, &prefix, i, &self.params, rng) {
                Some(key_index) => prefix.push(key_index),
                None => {
                    stopped_at = i;
                    break;
                }
            }
        }
        let answer = if stopped_at == n {
            // Instance goes into the last slot; one shot.
            self.attempt(&prefix, n, supply, rng)
        } else {
            let iterations = self.params.online_iterations(stopped_at);
            let mut found = None;
            for _ in 0..iterations {
                if let Some(ans) = self.attempt(&prefix, stopped_at, supply, rng) {
                    found = Some(ans);
                    break;
                }
            }
            found
        };
        AmplifiedRun {
            answer,
            prefix,
            stopped_at,
            copies_used: supply.taken(),
        }
    }

    /// One online attempt with the instance embedded in slot `v`; slots
    /// after `v` use self-generated keys and are self-verified, so the
    /// instance's check key is never consulted.
    fn attempt(
        &self,
        prefix: &[usize],
        v: usize,
        supply: &mut StateSupply<'_>,
        rng: &mut WbRng,
    ) -> Option<Answer> {
        let n = self.params.n;
        let t = self.params.t;
        let instance_state = supply.take(t).ok()?;
        let mut tail_keys = Vec::with_capacity(n - v);
        let mut slots: Vec<StateSupply<'_>> = Vec::with_capacity(n);
        for &k in prefix {
            slots.push(StateSupply::new(self.puzzle.state(k), t));
        }
        slots.push(StateSupply::new(instance_state, t));
        for _ in v..n {
            let k = self.puzzle.sample_key_index(rng);
            tail_keys.push(k);
            slots.push(StateSupply::new(self.puzzle.state(k), t));
        }
        let answers = self.solver.solve(&mut slots, rng)?;
        for (offset, &k) in tail_keys.iter().enumerate() {
            let slot = v + offset;
            if !rng.bernoulli(self.puzzle.verify_index(&answers[slot], k)) {
                return None;
            }
        }
        Some(answers[v - 1].clone())
    }
}

impl PuzzleSolver for AmplifiedSolver<'_> {
    fn copy_budget(&self) -> usize {
        self.params.instance_budget()
    }

    fn solve(&self, supply: &mut StateSupply<'_>, rng: &mut WbRng) -> Option<Answer> {
        self.run(supply, rng).answer
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_DIM_CAP;

    fn uniform_profile(alphabet: usize, hint: f64) -> Vec<KeyProfile> {
        (0..alphabet)
            .map(|k| KeyProfile {
                accepted: vec![k as u32],
                accept_prob: 1.0,
                hint_prob: hint,
            })
            .collect()
    }

    struct FixedAnswer(Answer, usize);

    impl PuzzleSolver for FixedAnswer {
        fn copy_budget(&self) -> usize {
            self.1
        }
        fn solve(&self, _s: &mut StateSupply<'_>, _rng: &mut WbRng) -> Option<Answer> {
            Some(self.0.clone())
        }
    }

    struct UniformGuess(u32);

    impl PuzzleSolver for UniformGuess {
        fn copy_budget(&self) -> usize {
            1
        }
        fn solve(&self, _s: &mut StateSupply<'_>, rng: &mut WbRng) -> Option<Answer> {
            Some(vec![rng.below(self.0 as usize) as u32])
        }
    }

    #[test]
    fn repetition_of_one_keeps_values() {
        let p = synthetic_puzzle(3, uniform_profile(3, 0.5)).unwrap();
        let r = parallel_repetition(&p, 1, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(r.key_count(), 3);
        for idx in 0..3 {
            assert_eq!(
                p.verify_index(&[idx as u32], idx),
                r.verify_index(&[idx as u32], idx)
            );
        }
    }

    #[test]
    fn repetition_verify_is_product() {
        let mut profile = uniform_profile(2, 1.0);
        profile[0].accept_prob = 0.9;
        profile[1].accept_prob = 0.8;
        let p = synthetic_puzzle(2, profile).unwrap();
        let r = parallel_repetition(&p, 2, DEFAULT_DIM_CAP).unwrap();
        // Key tuple (0, 1): accepted answers (0, 1) with probability 0.72.
        let tuple_idx = r
            .key_probabilities()
            .iter()
            .enumerate()
            .find(|(i, _)| r.key(*i) == &vec![0u32, 1u32])
            .unwrap()
            .0;
        let joint = r.verify_index(&[0, 1], tuple_idx);
        assert!((joint - 0.72).abs() < 1e-12);
        // One surely-rejecting component zeroes the product.
        assert_eq!(r.verify_index(&[1, 1], tuple_idx), 0.0);
    }

    #[test]
    fn repetition_respects_cap() {
        let p = synthetic_puzzle(3, uniform_profile(3, 0.5)).unwrap();
        assert!(matches!(
            parallel_repetition(&p, 9, 4096),
            Err(Error::DimCapExceeded { .. })
        ));
    }

    #[test]
    fn empirical_success_fixed_answer() {
        let p = synthetic_puzzle(1, uniform_profile(1, 0.0)).unwrap();
        let solver = FixedAnswer(vec![0], 1);
        let mut rng = WbRng::seed(5);
        let report = empirical_success(&p, &solver, 1, 200, &mut rng).unwrap();
        assert_eq!(report.rate, 1.0);
        assert_eq!(report.aborts, 0);
    }

    #[test]
    fn empirical_success_uniform_guess() {
        let alphabet = 4usize;
        let p = synthetic_puzzle(alphabet, uniform_profile(alphabet, 0.0)).unwrap();
        let solver = UniformGuess(alphabet as u32);
        let mut rng = WbRng::seed(6);
        let trials = 20_000;
        let report = empirical_success(&p, &solver, 1, trials, &mut rng).unwrap();
        let expected = 1.0 / alphabet as f64;
        assert!(
            (report.rate - expected).abs() <= 3.0 * report.std_error.max(1e-6),
            "rate {} expected {expected}",
            report.rate
        );
    }

    #[test]
    fn empirical_success_planted_rate() {
        let p = synthetic_puzzle(4, uniform_profile(4, 0.75)).unwrap();
        let mut rng = WbRng::seed(7);
        let report = empirical_success(&p, &PlantedSolver, 1, 10_000, &mut rng).unwrap();
        assert!(
            (report.rate - 0.75).abs() <= 3.0 * report.std_error,
            "rate {}",
            report.rate
        );
    }

    #[test]
    fn empirical_success_budget_mismatch() {
        let p = synthetic_puzzle(2, uniform_profile(2, 0.5)).unwrap();
        assert!(matches!(
            empirical_success(&p, &PlantedSolver, 2, 10, &mut WbRng::seed(0)),
            Err(Error::CopyBudgetExceeded { .. })
        ));
    }

    #[test]
    fn loop_constants_match_formulas() {
        let params = AmplificationParams::new(2, 3.0, 0.75, 1).unwrap();
        // N_1 = ceil(6q/delta^2 * ln(18qn/delta)) with q=3, n=2, delta=0.75.
        let n1 = (6.0 * 3.0 / (0.75f64 * 0.75) * (18.0 * 3.0 * 2.0 / 0.75f64).ln()).ceil();
        assert_eq!(params.extend_trials(1), n1 as usize);
        let m1 = (84.0 * 9.0 / 0.75 * (18.0 * 3.0 * 2.0 * n1 / 0.75f64).ln()).ceil();
        assert_eq!(params.estimate_samples(1), m1 as usize);
        let l1 = (6.0 * 3.0 * (18.0f64).ln() / 0.75f64.powi(2)).ceil();
        assert_eq!(params.online_iterations(1), l1 as usize);
        assert_eq!(params.instance_budget(), l1 as usize);
        // Scaling multiplies and floors at one.
        let scaled = params.with_scale_loops(0.01);
        assert!(scaled.extend_trials(1) < params.extend_trials(1));
        assert!(scaled.estimate_samples(1) >= 1);
    }

    #[test]
    fn estimate_tracks_planted_rate() {
        let delta = 0.6;
        let p = synthetic_puzzle(3, uniform_profile(3, delta)).unwrap();
        let solver = SlotwiseSolver {
            base: PlantedSolver,
            n: 2,
        };
        // Full-formula sample count M_1.
        let params = AmplificationParams::new(2, 2.0, 0.5, 1).unwrap();
        let mut rng = WbRng::seed(11);
        let prefix = [p.sample_key_index(&mut rng)];
        let est = estimate(&p, &solver, &prefix, 1, &params, &mut rng);
        // rsp(prefix) = delta for the independent planted solver: only the
        // last slot's verification is counted.
        let m = params.estimate_samples(1) as f64;
        let sigma = (delta * (1.0 - delta) / m).sqrt();
        assert!((est - delta).abs() <= 3.0 * sigma, "est {est} m {m}");
    }

    #[test]
    fn extend_rarely_fails_at_exact_threshold() {
        // Every key's residual success equals the threshold delta^{n-i}
        // exactly, so each candidate's estimate clears it with probability
        // about one half and the failure rate is at most
        // (1/2)^{N_i} plus estimation slack.
        let delta = 0.5;
        let p = synthetic_puzzle(2, uniform_profile(2, delta)).unwrap();
        let solver = SlotwiseSolver {
            base: PlantedSolver,
            n: 2,
        };
        let params = AmplificationParams::new(2, 2.0, delta, 1)
            .unwrap()
            .with_scale_loops(0.1);
        let trials_n = params.extend_trials(1);
        assert!(trials_n >= 20, "N_1 {trials_n}");
        let mut rng = WbRng::seed(13);
        for _ in 0..30 {
            assert!(
                extend(&p, &solver, &[], 1, &params, &mut rng).is_some(),
                "bottom-out probability should be ~(1/2)^{trials_n}"
            );
        }
    }

    #[test]
    fn extend_finds_keys_when_all_good() {
        let p = synthetic_puzzle(3, uniform_profile(3, 0.9)).unwrap();
        let solver = SlotwiseSolver {
            base: PlantedSolver,
            n: 2,
        };
        // Threshold delta^{n-i} = 0.5 while every key has rsp 0.9.
        let params = AmplificationParams::new(2, 2.0, 0.5, 1)
            .unwrap()
            .with_scale_loops(0.25);
        let mut rng = WbRng::seed(13);
        for _ in 0..10 {
            assert!(extend(&p, &solver, &[], 1, &params, &mut rng).is_some());
        }
    }

    #[test]
    fn extend_bottoms_out_on_dead_solver() {
        let p = synthetic_puzzle(2, uniform_profile(2, 0.0)).unwrap();
        let solver = SlotwiseSolver {
            base: PlantedSolver,
            n: 2,
        };
        let params = AmplificationParams::new(2, 2.0, 0.5, 1)
            .unwrap()
            .with_scale_loops(0.1);
        let mut rng = WbRng::seed(17);
        assert!(extend(&p, &solver, &[], 1, &params, &mut rng).is_none());
    }

    #[test]
    fn degenerate_repetition_equals_base_solver() {
        // n = 1: the amplified adversary is the repeated solver run once on
        // the instance.
        let delta = 0.7;
        let p = synthetic_puzzle(3, uniform_profile(3, delta)).unwrap();
        let solver = SlotwiseSolver {
            base: PlantedSolver,
            n: 1,
        };
        let params = AmplificationParams::new(1, 3.0, 0.5, 1).unwrap();
        let amplified = AmplifiedSolver::new(&p, &solver, params).unwrap();
        let mut rng = WbRng::seed(19);
        let trials = 4000;
        let report =
            empirical_success(&p, &amplified, amplified.copy_budget(), trials, &mut rng).unwrap();
        let direct = empirical_success(&p, &PlantedSolver, 1, trials, &mut rng).unwrap();
        let sigma = (report.std_error.powi(2) + direct.std_error.powi(2)).sqrt();
        assert!(
            (report.rate - direct.rate).abs() <= 3.0 * sigma,
            "amplified {} direct {}",
            report.rate,
            direct.rate
        );
    }

    #[test]
    fn amplified_solver_beats_target_smoke() {
        // Smoke-scale version of the headline amplification experiment:
        // n = 2, q = 3, delta = 0.75, planted per-slot success 0.75, loops
        // scaled down. The full-constant run lives in the acceptance suite.
        let delta = 0.75;
        let p = synthetic_puzzle(4, uniform_profile(4, delta)).unwrap();
        let solver = SlotwiseSolver {
            base: PlantedSolver,
            n: 2,
        };
        let params = AmplificationParams::new(2, 3.0, delta, 1)
            .unwrap()
            .with_scale_loops(0.05);
        let amplified = AmplifiedSolver::new(&p, &solver, params).unwrap();
        let mut rng = WbRng::seed(23);
        let trials = 400;
        let report =
            empirical_success(&p, &amplified, amplified.copy_budget(), trials, &mut rng).unwrap();
        let target = delta * (1.0 - 1.0 / 3.0);
        assert!(
            report.rate >= target - 3.0 * report.std_error,
            "rate {} target {target}",
            report.rate
        );
    }

    #[test]
    fn amplified_solver_counts_copies() {
        let delta = 0.75;
        let p = synthetic_puzzle(4, uniform_profile(4, delta)).unwrap();
        let solver = SlotwiseSolver {
            base: PlantedSolver,
            n: 2,
        };
        let params = AmplificationParams::new(2, 3.0, delta, 1)
            .unwrap()
            .with_scale_loops(0.05);
        let amplified = AmplifiedSolver::new(&p, &solver, params).unwrap();
        let budget = amplified.copy_budget();
        let mut rng = WbRng::seed(29);
        for _ in 0..50 {
            let key = p.sample_key_index(&mut rng);
            let mut supply = StateSupply::new(p.state(key), budget);
            let run = amplified.run(&mut supply, &mut rng);
            assert!(run.copies_used <= budget);
            assert_eq!(run.copies_used, budget - supply.remaining());
        }
    }
}
