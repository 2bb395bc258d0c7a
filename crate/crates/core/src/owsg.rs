//! One-way state generators: keyed state families with optional purification
//! data, general verification effects, parallel repetition, the embedding
//! into weakly verifiable puzzles, projective verification for pure outputs,
//! and the many-copy construction from pseudorandom state generators.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::puzzles::WeaklyVerifiablePuzzle;
use crate::qstate::{DensityMatrix, PureState, RegisterShape};
use crate::rng::WbRng;
use crate::{Complex64, TOL_ASSERT};

/// Purifying data for a keyed family: a key unitary preparing
/// `sum_k sqrt(Pr[k]) |k>|mu_k>` from `|0...0>`, and per-key purifications
/// `|psi_k>` on registers (A, B) whose B-marginal is the family state.
#[derive(Debug, Clone)]
pub struct FamilyPurification {
    pub key_unitary: ComplexMatrix,
    pub mu_dim: usize,
    pub state_purifications: Vec<PureState>,
    pub a_dim: usize,
}

/// Finite keyed family `{ Pr[k], phi_k }`. Every key carries a classical
/// word (its content as a tuple of symbols); plain families use `[index]`.
#[derive(Debug, Clone)]
pub struct KeyedStateFamily {
    key_words: Vec<Vec<u32>>,
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
    purification: Option<FamilyPurification>,
    key_arity: usize,
}

impl KeyedStateFamily {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        let key_words = (0..probs.len()).map(|i| vec![i as u32]).collect();
        Self::with_words(key_words, probs, states, 1)
    }

    pub fn with_words(
        key_words: Vec<Vec<u32>>,
        probs: Vec<f64>,
        states: Vec<DensityMatrix>,
        key_arity: usize,
    ) -> Result<Self> {
        if probs.len() != states.len() || probs.len() != key_words.len() {
            return Err(Error::LengthMismatch {
                left: probs.len(),
                right: states.len(),
            });
        }
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty key family".to_string()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > crate::TOL_EXACT {
            return Err(Error::NotNormalized {
                deviation: (total - 1.0).abs(),
            });
        }
        let dim = states[0].dim();
        for state in &states {
            if state.dim() != dim {
                return Err(Error::ShapeMismatch {
                    expected: states[0].shape().describe(),
                    found: state.shape().describe(),
                });
            }
        }
        Ok(KeyedStateFamily {
            key_words,
            probs,
            states,
            purification: None,
            key_arity,
        })
    }

    /// Attaches purification data, checking that each `|psi_k>`'s B-marginal
    /// reproduces the family state.
    pub fn with_purification(mut self, purification: FamilyPurification) -> Result<Self> {
        if purification.state_purifications.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: purification.state_purifications.len(),
            });
        }
        for (psi, phi) in purification.state_purifications.iter().zip(&self.states) {
            let reduced = psi.to_density().partial_trace(&["B"])?;
            if reduced.matrix().sub(phi.matrix()).max_norm() > TOL_ASSERT {
                return Err(Error::InvalidArgument(
                    "purification marginal does not match family state".to_string(),
                ));
            }
        }
        self.purification = Some(purification);
        Ok(self)
    }

    /// Derives a purification: `|psi_k>` from the eigendecomposition of
    /// `phi_k` (A sized to the largest rank in the family) and a key unitary
    /// with trivial `|mu_k>`.
    pub fn purified(self) -> Result<Self> {
        let dim = self.states[0].dim();
        let mut ranks = Vec::with_capacity(self.len());
        let mut eigs = Vec::with_capacity(self.len());
        for state in &self.states {
            let eig = linalg::hermitian_eigen(state.matrix())?;
            let rank = eig
                .values
                .iter()
                .filter(|l| **l > crate::SUPPORT_CUTOFF)
                .count()
                .max(1);
            ranks.push(rank);
            eigs.push(eig);
        }
        let a_dim = ranks.iter().copied().max().unwrap_or(1);
        let shape = RegisterShape::new(vec![("A", a_dim), ("B", dim)])?;
        let mut purifications = Vec::with_capacity(self.len());
        for eig in &eigs {
            let mut amps = vec![Complex64::new(0.0, 0.0); a_dim * dim];
            // Largest eigenvalues first so A indexes branches by weight.
            let mut order: Vec<usize> = (0..eig.values.len()).collect();
            order.reverse();
            for (branch, &col) in order.iter().enumerate().take(a_dim) {
                let lambda = eig.values[col].max(0.0);
                if lambda <= crate::SUPPORT_CUTOFF {
                    continue;
                }
                let root = libm::sqrt(lambda);
                let vec_b = eig.vectors.column(col);
                for b in 0..dim {
                    amps[branch * dim + b] = vec_b[b].scale(root);
                }
            }
            purifications.push(PureState::new(shape.clone(), amps)?);
        }
        let column: Vec<Complex64> = self
            .probs
            .iter()
            .map(|p| Complex64::new(libm::sqrt(*p), 0.0))
            .collect();
        let key_unitary = linalg::unitary_from_first_column(&column)?;
        self.with_purification(FamilyPurification {
            key_unitary,
            mu_dim: 1,
            state_purifications: purifications,
            a_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probability(&self, key: usize) -> f64 {
        self.probs[key]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn state(&self, key: usize) -> &DensityMatrix {
        &self.states[key]
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn key_word(&self, key: usize) -> &[u32] {
        &self.key_words[key]
    }

    pub fn key_words(&self) -> &[Vec<u32>] {
        &self.key_words
    }

    pub fn key_arity(&self) -> usize {
        self.key_arity
    }

    pub fn purification(&self) -> Option<&FamilyPurification> {
        self.purification.as_ref()
    }

    pub fn sample_key(&self, rng: &mut WbRng) -> usize {
        rng.sample_index(&self.probs)
    }

    /// Smallest pairwise trace distance over distinct keys.
    pub fn min_pairwise_distance(&self) -> Result<f64> {
        let mut min = 1.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                min = min.min(self.states[i].trace_distance(&self.states[j])?);
            }
        }
        Ok(min)
    }
}

/// One-way state generator: a keyed family plus a verification effect per
/// candidate key, `Ver(k', rho) = Tr(Pi_{k'} rho)`.
#[derive(Debug, Clone)]
pub struct Owsg {
    pub family: KeyedStateFamily,
    effects: Vec<ComplexMatrix>,
    pub eps_corr: f64,
}

impl Owsg {
    pub fn new(family: KeyedStateFamily, effects: Vec<ComplexMatrix>, eps_corr: f64) -> Result<Self> {
        if effects.len() != family.len() {
            return Err(Error::LengthMismatch {
                left: family.len(),
                right: effects.len(),
            });
        }
        let dim = family.state(0).dim();
        for effect in &effects {
            if effect.rows() != dim {
                return Err(Error::LengthMismatch {
                    left: dim,
                    right: effect.rows(),
                });
            }
            let dev = effect.hermitian_deviation();
            if dev > TOL_ASSERT {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let eig = linalg::hermitian_eigen(effect)?;
            let min = eig.values.first().copied().unwrap_or(0.0);
            let max = eig.values.last().copied().unwrap_or(0.0);
            if min < -TOL_ASSERT || max > 1.0 + TOL_ASSERT {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                });
            }
        }
        let owsg = Owsg {
            family,
            effects,
            eps_corr,
        };
        let correctness = owsg_correctness(&owsg);
        if correctness < 1.0 - eps_corr - TOL_ASSERT {
            return Err(Error::InvalidArgument(alloc::format!(
                "correctness {correctness} below declared 1 - {eps_corr}"
            )));
        }
        Ok(owsg)
    }

    pub fn key_count(&self) -> usize {
        self.family.len()
    }

    pub fn effect(&self, candidate: usize) -> &ComplexMatrix {
        &self.effects[candidate]
    }

    /// Exact acceptance probability of the candidate key on a state.
    pub fn verify(&self, candidate: usize, state: &DensityMatrix) -> f64 {
        state.effect_probability(&self.effects[candidate])
    }

    /// Acceptance of a candidate key word; unknown words reject.
    pub fn verify_word(&self, word: &[u32], state: &DensityMatrix) -> f64 {
        match self
            .family
            .key_words()
            .iter()
            .position(|w| w.as_slice() == word)
        {
            Some(idx) => self.verify(idx, state),
            None => 0.0,
        }
    }
}

/// Exact correctness `sum_k Pr[k] Tr(Pi_k phi_k)`.
pub fn owsg_correctness(owsg: &Owsg) -> f64 {
    let mut total = 0.0;
    for k in 0..owsg.key_count() {
        total += owsg.family.probability(k) * owsg.verify(k, owsg.family.state(k));
    }
    total
}

/// `n`-fold repetition: keys are tuples, states are tensor products, and
/// verification is the product of component effects.
pub fn owsg_repetition(owsg: &Owsg, n: usize, cap: usize) -> Result<Owsg> {
    if n < 1 {
        return Err(Error::InvalidArgument("repetition count must be >= 1".to_string()));
    }
    let base = owsg.key_count();
    let tuple_count = base.checked_pow(n as u32).ok_or(Error::DimCapExceeded {
        dim: usize::MAX,
        cap,
    })?;
    let dim = owsg
        .family
        .state(0)
        .dim()
        .checked_pow(n as u32)
        .unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimCapExceeded { dim, cap });
    }
    let mut key_words = Vec::with_capacity(tuple_count);
    let mut probs = Vec::with_capacity(tuple_count);
    let mut states = Vec::with_capacity(tuple_count);
    let mut effects = Vec::with_capacity(tuple_count);
    for mut flat in 0..tuple_count {
        let mut indices = vec![0usize; n];
        for slot in (0..n).rev() {
            indices[slot] = flat % base;
            flat /= base;
        }
        let mut word = Vec::with_capacity(n * owsg.family.key_arity());
        let mut prob = 1.0;
        let mut state = owsg.family.state(indices[0]).relabeled("@1");
        let mut effect = owsg.effects[indices[0]].clone();
        word.extend_from_slice(owsg.family.key_word(indices[0]));
        prob *= owsg.family.probability(indices[0]);
        for (slot, &idx) in indices.iter().enumerate().skip(1) {
            word.extend_from_slice(owsg.family.key_word(idx));
            prob *= owsg.family.probability(idx);
            state = state.tensor(&owsg.family.state(idx).relabeled(&format!("@{}", slot + 1)))?;
            effect = effect.kron(&owsg.effects[idx]);
        }
        key_words.push(word);
        probs.push(prob);
        states.push(state);
        effects.push(effect);
    }
    let family = KeyedStateFamily::with_words(
        key_words,
        probs,
        states,
        n * owsg.family.key_arity(),
    )?;
    // Componentwise acceptance multiplies, so the correctness floor does too.
    let eps = 1.0 - libm::pow(1.0 - owsg.eps_corr, n as f64);
    Owsg::new(family, effects, eps)
}

/// Views the generator as a weakly verifiable puzzle: check keys are the
/// generator keys, the puzzle is the generated state, and verification
/// regenerates the state from the check key before applying the candidate's
/// effect.
pub fn owsg_as_puzzle(owsg: &Owsg) -> Result<WeaklyVerifiablePuzzle> {
    let states: Vec<DensityMatrix> = owsg.family.states().to_vec();
    let probs = owsg.family.probabilities().to_vec();
    let key_words = owsg.family.key_words().to_vec();
    let mut lookup: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (idx, word) in key_words.iter().enumerate() {
        lookup.insert(word.clone(), idx);
    }
    let effects = owsg.effects.clone();
    let states_for_verify = states.clone();
    let verify = Arc::new(move |answer: &[u32], key: &[u32]| -> f64 {
        let Some(&key_idx) = lookup.get(key) else {
            return 0.0;
        };
        let Some(&cand_idx) = lookup.get(answer) else {
            return 0.0;
        };
        states_for_verify[key_idx].effect_probability(&effects[cand_idx])
    });
    WeaklyVerifiablePuzzle::new(
        key_words,
        probs,
        states,
        verify,
        owsg.family.key_arity(),
        owsg.family.key_arity(),
    )
}

/// Replaces a pure-output generator's verification with the projective
/// measurement onto the claimed state: `Ver(k', phi_k) = |<phi_k|phi_k'>|^2`.
pub fn canonical_pure_ver(owsg: &Owsg) -> Result<Owsg> {
    let mut effects = Vec::with_capacity(owsg.key_count());
    for state in owsg.family.states() {
        let pure = state.as_pure(TOL_ASSERT)?;
        effects.push(pure.to_density().matrix().clone());
    }
    Owsg::new(owsg.family.clone(), effects, 0.0)
}

/// Pure-output pseudorandom state generator.
#[derive(Debug, Clone)]
pub struct Prsg {
    pub probs: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Prsg {
    pub fn new(probs: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if probs.len() != states.len() || probs.is_empty() {
            return Err(Error::LengthMismatch {
                left: probs.len(),
                right: states.len(),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > crate::TOL_EXACT {
            return Err(Error::NotNormalized {
                deviation: (total - 1.0).abs(),
            });
        }
        Ok(Prsg { probs, states })
    }

    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let p = 1.0 / states.len() as f64;
        Prsg::new(vec![p; states.len()], states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `r`-copy generator: outputs `|xi_k>^{tensor r}` with projective
/// verification on the full copy block.
pub fn prsg_to_owsg(prsg: &Prsg, r: usize, cap: usize) -> Result<Owsg> {
    if r < 1 {
        return Err(Error::InvalidArgument("copy count must be >= 1".to_string()));
    }
    let mut states = Vec::with_capacity(prsg.len());
    let mut effects = Vec::with_capacity(prsg.len());
    for xi in &prsg.states {
        let copies = xi.tensor_power(r, cap)?;
        let density = copies.to_density();
        effects.push(density.matrix().clone());
        states.push(density);
    }
    let family = KeyedStateFamily::new(prsg.probs.clone(), states)?;
    Owsg::new(family, effects, 0.0)
}

/// Dimension of the symmetric subspace of `r` copies in local dimension
/// `d`: the binomial `C(d + r - 1, r)`.
pub fn symmetric_subspace_dim(d: usize, r: usize) -> f64 {
    let mut value = 1.0f64;
    for i in 0..r {
        value *= (d + i) as f64 / (i + 1) as f64;
    }
    value
}

/// Monte-Carlo estimate of the Haar collision sum
/// `E_psi sum_k |<xi_k|psi>|^{2r}`, whose exact value is
/// `K / C(d + r - 1, r)`.
pub fn haar_collision_expectation(
    prsg: &Prsg,
    r: usize,
    samples: usize,
    rng: &mut WbRng,
) -> Result<(f64, f64)> {
    if samples < 1 {
        return Err(Error::InvalidArgument("need at least one sample".to_string()));
    }
    let dim = prsg.states[0].dim();
    let mut acc = 0.0;
    let mut acc_sq = 0.0;
    for _ in 0..samples {
        let psi = crate::qstate::haar_random_state(dim, rng);
        let mut collision = 0.0;
        for xi in &prsg.states {
            let overlap = xi
                .amplitudes()
                .iter()
                .zip(psi.amplitudes())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .norm_sqr();
            collision += libm::pow(overlap, r as f64);
        }
        acc += collision;
        acc_sq += collision * collision;
    }
    let mean = acc / samples as f64;
    let var = (acc_sq / samples as f64 - mean * mean).max(0.0);
    Ok((mean, libm::sqrt(var / samples as f64)))
}

/// Toy instantiations used across the reduction experiments. All are
/// deliberately insecure so that adversaries with known success rates exist.
pub mod toy {
    use super::*;
    use crate::puzzles::{Answer, PuzzleSolver, StateSupply, NO_ANSWER};

    /// Maximally insecure family: `K` equiprobable orthonormal basis states
    /// with projective verification. Fully invertible by measurement.
    pub fn orthonormal_family(k: usize) -> Result<Owsg> {
        let shape = RegisterShape::single("m", k)?;
        let mut states = Vec::with_capacity(k);
        let mut effects = Vec::with_capacity(k);
        for i in 0..k {
            let pure = PureState::basis(shape.clone(), i)?;
            let density = pure.to_density();
            effects.push(density.matrix().clone());
            states.push(density);
        }
        let family = KeyedStateFamily::new(vec![1.0 / k as f64; k], states)?;
        Owsg::new(family, effects, 0.0)
    }

    /// Two keys with tunable real overlap `c` and projective verification.
    pub fn overlap_pair(c: f64) -> Result<Owsg> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidArgument(format!("overlap {c} outside [0,1]")));
        }
        let shape = RegisterShape::single("m", 2)?;
        let zero = PureState::basis(shape.clone(), 0)?;
        let tilted = PureState::new(
            shape,
            vec![
                Complex64::new(c, 0.0),
                Complex64::new(libm::sqrt(1.0 - c * c), 0.0),
            ],
        )?;
        let states = vec![zero.to_density(), tilted.to_density()];
        let effects = vec![states[0].matrix().clone(), states[1].matrix().clone()];
        let family = KeyedStateFamily::new(vec![0.5, 0.5], states)?;
        Owsg::new(family, effects, 0.0)
    }

    /// Inverter for basis-state families: measures one copy and returns the
    /// outcome as the key guess with the planted probability, refusing
    /// otherwise. On `orthonormal_family` its success rate is exactly
    /// `success`.
    pub struct PlantedInverter {
        pub success: f64,
    }

    impl PuzzleSolver for PlantedInverter {
        fn copy_budget(&self) -> usize {
            1
        }

        fn solve(&self, supply: &mut StateSupply<'_>, rng: &mut WbRng) -> Option<Answer> {
            let state = supply.take(1).ok()?;
            if rng.bernoulli(self.success) {
                let outcome = rng.sample_index(&state.diagonal_probs());
                Some(vec![outcome as u32])
            } else {
                Some(vec![NO_ANSWER])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzles::{
        empirical_success, parallel_repetition, PuzzleSolver, StateSupply,
    };
    use crate::DEFAULT_DIM_CAP;

    #[test]
    fn correctness_of_projective_toy_is_one() {
        let owsg = toy::orthonormal_family(3).unwrap();
        assert!((owsg_correctness(&owsg) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correctness_of_reject_all_is_zero() {
        let owsg = toy::orthonormal_family(2).unwrap();
        let dim = owsg.family.state(0).dim();
        let reject = vec![ComplexMatrix::zeros(dim, dim); 2];
        let rejecting = Owsg::new(owsg.family.clone(), reject, 1.0).unwrap();
        assert_eq!(owsg_correctness(&rejecting), 0.0);
    }

    #[test]
    fn overlap_family_cross_acceptance() {
        let c = 0.6;
        let owsg = toy::overlap_pair(c).unwrap();
        assert!((owsg_correctness(&owsg) - 1.0).abs() < 1e-12);
        let cross = owsg.verify(1, owsg.family.state(0));
        assert!((cross - c * c).abs() < 1e-12);
    }

    #[test]
    fn repetition_correctness_products() {
        let owsg = toy::orthonormal_family(2).unwrap();
        let rep = owsg_repetition(&owsg, 3, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(rep.key_count(), 8);
        assert!((owsg_correctness(&rep) - 1.0).abs() < 1e-12);
        // Component accepts (0.9, 0.9) -> joint 0.81 on scaled effects.
        let base = toy::orthonormal_family(2).unwrap();
        let softened: Vec<ComplexMatrix> = (0..2)
            .map(|k| base.effect(k).scale_real(0.9))
            .collect();
        let soft = Owsg::new(base.family.clone(), softened, 0.1).unwrap();
        let soft2 = owsg_repetition(&soft, 2, DEFAULT_DIM_CAP).unwrap();
        let idx = soft2
            .family
            .key_words()
            .iter()
            .position(|w| w == &vec![0, 1])
            .unwrap();
        let p = soft2.verify(idx, soft2.family.state(idx));
        assert!((p - 0.81).abs() < 1e-12);
    }

    #[test]
    fn puzzle_embedding_matches_generator() {
        let owsg = toy::orthonormal_family(3).unwrap();
        let puzzle = owsg_as_puzzle(&owsg).unwrap();
        // True key answer wins with the generator's correctness.
        for k in 0..3 {
            let word = owsg.family.key_word(k).to_vec();
            assert!((puzzle.verify(&word, &word) - 1.0).abs() < 1e-12);
        }
        // Wrong answers on an orthonormal projective family always reject.
        assert_eq!(puzzle.verify(&[1], &[0]), 0.0);
    }

    #[test]
    fn guessing_solver_hits_one_over_k() {
        struct Guess(u32);
        impl PuzzleSolver for Guess {
            fn copy_budget(&self) -> usize {
                1
            }
            fn solve(&self, _s: &mut StateSupply<'_>, rng: &mut WbRng) -> Option<Vec<u32>> {
                Some(vec![rng.below(self.0 as usize) as u32])
            }
        }
        let owsg = toy::orthonormal_family(4).unwrap();
        let puzzle = owsg_as_puzzle(&owsg).unwrap();
        let mut rng = WbRng::seed(3);
        let report = empirical_success(&puzzle, &Guess(4), 1, 20_000, &mut rng).unwrap();
        assert!(
            (report.rate - 0.25).abs() <= 3.0 * report.std_error,
            "rate {}",
            report.rate
        );
    }

    #[test]
    fn puzzle_embedding_commutes_with_repetition() {
        let owsg = toy::overlap_pair(0.5).unwrap();
        let n = 2;
        let route_a = parallel_repetition(&owsg_as_puzzle(&owsg).unwrap(), n, DEFAULT_DIM_CAP)
            .unwrap();
        let route_b = owsg_as_puzzle(&owsg_repetition(&owsg, n, DEFAULT_DIM_CAP).unwrap()).unwrap();
        assert_eq!(route_a.key_count(), route_b.key_count());
        for idx in 0..route_a.key_count() {
            assert_eq!(route_a.key(idx), route_b.key(idx));
            assert!(
                route_a.state(idx).matrix().sub(route_b.state(idx).matrix()).max_norm() < 1e-12
            );
            for ans_idx in 0..route_a.key_count() {
                let answer = route_a.key(ans_idx).clone();
                let pa = route_a.verify_index(&answer, idx);
                let pb = route_b.verify_index(&answer, idx);
                assert!((pa - pb).abs() < 1e-12, "answer {answer:?} key {idx}");
            }
        }
    }

    #[test]
    fn canonical_pure_ver_matches_overlaps() {
        let owsg = toy::overlap_pair(core::f64::consts::FRAC_1_SQRT_2).unwrap();
        let canonical = canonical_pure_ver(&owsg).unwrap();
        assert!((canonical.verify(0, canonical.family.state(0)) - 1.0).abs() < 1e-9);
        assert!((canonical.verify(1, canonical.family.state(0)) - 0.5).abs() < 1e-9);
        // Orthogonal pair rejects across keys.
        let ortho = canonical_pure_ver(&toy::orthonormal_family(2).unwrap()).unwrap();
        assert!(ortho.verify(1, ortho.family.state(0)) < 1e-12);
        // Mixed outputs are rejected.
        let mixed = KeyedStateFamily::new(
            vec![1.0],
            vec![DensityMatrix::maximally_mixed(
                RegisterShape::single("m", 2).unwrap(),
            )],
        )
        .unwrap();
        let id_effect = vec![ComplexMatrix::identity(2)];
        let mixed_owsg = Owsg::new(mixed, id_effect, 0.0).unwrap();
        assert!(matches!(
            canonical_pure_ver(&mixed_owsg),
            Err(Error::MixedState { .. })
        ));
    }

    #[test]
    fn prsg_copies_power_cross_acceptance() {
        let c: f64 = 0.7;
        let base = toy::overlap_pair(c).unwrap();
        let prsg = Prsg::uniform(
            base.family
                .states()
                .iter()
                .map(|s| s.as_pure(1e-9).unwrap())
                .collect(),
        )
        .unwrap();
        for r in 1..=3 {
            let owsg = prsg_to_owsg(&prsg, r, DEFAULT_DIM_CAP).unwrap();
            let cross = owsg.verify(1, owsg.family.state(0));
            let expected = libm::pow(c * c, r as f64);
            assert!((cross - expected).abs() < 1e-10, "r={r} cross {cross}");
            assert!((owsg_correctness(&owsg) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_subspace_dims() {
        assert_eq!(symmetric_subspace_dim(2, 2), 3.0);
        assert_eq!(symmetric_subspace_dim(5, 2), 15.0);
        assert_eq!(symmetric_subspace_dim(4, 3), 20.0);
        // C(d + r - 1, r) >= d^r / r! (the symmetric-trace lower bound).
        for d in 1..=6usize {
            for r in 1..=4usize {
                let mut pow = 1.0;
                let mut fact = 1.0;
                for i in 0..r {
                    pow *= d as f64;
                    fact *= (i + 1) as f64;
                }
                assert!(symmetric_subspace_dim(d, r) >= pow / fact - 1e-9);
            }
        }
    }

    #[test]
    fn haar_collision_matches_analytic() {
        let mut rng = WbRng::seed(37);
        // (d, r, K) = (2, 2, 1): expectation 1 / C(3, 2) = 1/3.
        let prsg = Prsg::uniform(vec![crate::qstate::haar_random_state(2, &mut rng)]).unwrap();
        let (mean, se) = haar_collision_expectation(&prsg, 2, 40_000, &mut rng).unwrap();
        assert!((mean - 1.0 / 3.0).abs() <= 3.0 * se, "mean {mean} se {se}");
        // (d, r, K) = (4, 2, 3): expectation 3 / C(5, 2) = 0.3.
        let states: Vec<PureState> = (0..3)
            .map(|_| crate::qstate::haar_random_state(4, &mut rng))
            .collect();
        let prsg = Prsg::uniform(states).unwrap();
        let (mean, se) = haar_collision_expectation(&prsg, 2, 40_000, &mut rng).unwrap();
        assert!((mean - 0.3).abs() <= 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn purified_family_reproduces_marginals() {
        let mut rng = WbRng::seed(41);
        let states = vec![
            crate::qstate::random_density(3, 2, &mut rng),
            crate::qstate::random_density(3, 1, &mut rng),
        ];
        let family = KeyedStateFamily::new(vec![0.25, 0.75], states)
            .unwrap()
            .purified()
            .unwrap();
        let purification = family.purification().unwrap();
        assert!(purification.key_unitary.unitary_deviation() < 1e-9);
        for (psi, phi) in purification
            .state_purifications
            .iter()
            .zip(family.states())
        {
            let reduced = psi.to_density().partial_trace(&["B"]).unwrap();
            assert!(reduced.matrix().sub(phi.matrix()).max_norm() < 1e-9);
        }
    }

    #[test]
    fn planted_inverter_rate_on_orthonormal_family() {
        let owsg = toy::orthonormal_family(3).unwrap();
        let puzzle = owsg_as_puzzle(&owsg).unwrap();
        let solver = toy::PlantedInverter { success: 0.6 };
        let mut rng = WbRng::seed(43);
        let report = empirical_success(&puzzle, &solver, 1, 10_000, &mut rng).unwrap();
        assert!(
            (report.rate - 0.6).abs() <= 3.0 * report.std_error,
            "rate {}",
            report.rate
        );
    }
}
