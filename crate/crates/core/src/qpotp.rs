//! Quantum pseudo one-time pads with classical keys shorter than the
//! plaintext: the generator construction with its wrong-message bound, the
//! EFI pair via Pauli one-time padding of a maximally entangled half, the
//! twirl identity behind its hybrid step, and the secret-key to public-key
//! encryption conversion.
//!
//! Decryption is a POVM per secret key, so every game probability here is
//! an exact sum; nothing in this module samples.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::owsg::{KeyedStateFamily, Owsg};
use crate::qstate::{maximally_entangled, pauli_operator, DensityMatrix, RegisterShape};
use crate::TOL_ASSERT;

/// One-time symmetric encryption with a `kappa`-bit classical key and an
/// `ell`-bit classical plaintext carried by `ell * qubits_per_bit` qubits of
/// ciphertext. Ciphertexts and decryption POVMs are tabulated per key.
#[derive(Debug, Clone)]
pub struct QpotpScheme {
    pub kappa: usize,
    pub ell: usize,
    pub qubits_per_bit: usize,
    pub sk_probs: Vec<f64>,
    cts: Vec<Vec<DensityMatrix>>,
    dec_effects: Vec<Vec<ComplexMatrix>>,
    pub eps_corr: f64,
    /// Metadata only: whether the scheme claims security for a single
    /// ciphertext copy rather than arbitrarily many. Nothing here can
    /// enforce a computational claim; constructions that need the
    /// single-copy hypothesis record it.
    pub single_copy_secure: bool,
}

impl QpotpScheme {
    pub fn new(
        kappa: usize,
        ell: usize,
        qubits_per_bit: usize,
        sk_probs: Vec<f64>,
        cts: Vec<Vec<DensityMatrix>>,
        dec_effects: Vec<Vec<ComplexMatrix>>,
        eps_corr: f64,
    ) -> Result<Self> {
        let keys = 1usize << kappa;
        let messages = 1usize << ell;
        if sk_probs.len() != keys || cts.len() != keys || dec_effects.len() != keys {
            return Err(Error::LengthMismatch {
                left: keys,
                right: sk_probs.len(),
            });
        }
        let dim = 1usize << (ell * qubits_per_bit);
        for (ct_row, eff_row) in cts.iter().zip(&dec_effects) {
            if ct_row.len() != messages || eff_row.len() != messages {
                return Err(Error::LengthMismatch {
                    left: messages,
                    right: ct_row.len(),
                });
            }
            let mut sum = ComplexMatrix::zeros(dim, dim);
            for effect in eff_row {
                sum = sum.add(effect);
            }
            if sum.sub(&ComplexMatrix::identity(dim)).max_norm() > TOL_ASSERT {
                return Err(Error::InvalidArgument(
                    "decryption effects do not form a POVM".to_string(),
                ));
            }
            for ct in ct_row {
                if ct.dim() != dim {
                    return Err(Error::LengthMismatch {
                        left: dim,
                        right: ct.dim(),
                    });
                }
            }
        }
        let scheme = QpotpScheme {
            kappa,
            ell,
            qubits_per_bit,
            sk_probs,
            cts,
            dec_effects,
            eps_corr,
            single_copy_secure: false,
        };
        let correctness = scheme.correctness();
        if correctness < 1.0 - eps_corr - TOL_ASSERT {
            return Err(Error::InvalidArgument(alloc::string::String::from(
                "correctness below the declared floor",
            )));
        }
        Ok(scheme)
    }

    pub fn key_count(&self) -> usize {
        self.sk_probs.len()
    }

    pub fn message_count(&self) -> usize {
        1usize << self.ell
    }

    pub fn ciphertext_dim(&self) -> usize {
        1usize << (self.ell * self.qubits_per_bit)
    }

    /// Whether the key is shorter than the plaintext, the hypothesis the
    /// generator and EFI constructions need.
    pub fn short_key(&self) -> bool {
        self.kappa < self.ell
    }

    pub fn encrypt(&self, sk: usize, x: usize) -> &DensityMatrix {
        &self.cts[sk][x]
    }

    pub fn dec_effect(&self, sk: usize, x: usize) -> &ComplexMatrix {
        &self.dec_effects[sk][x]
    }

    /// Exact `Pr[x <- Dec(sk, ct)]`.
    pub fn dec_prob(&self, sk: usize, x: usize, ct: &DensityMatrix) -> f64 {
        ct.effect_probability(&self.dec_effects[sk][x])
    }

    pub fn dec_distribution(&self, sk: usize, ct: &DensityMatrix) -> Vec<f64> {
        (0..self.message_count())
            .map(|x| self.dec_prob(sk, x, ct))
            .collect()
    }

    /// Worst-case-over-plaintexts exact correctness
    /// `min_x sum_sk Pr[sk] Pr[x <- Dec(sk, Enc(sk, x))]`.
    pub fn correctness(&self) -> f64 {
        let mut worst = 1.0f64;
        for x in 0..self.message_count() {
            let mut acc = 0.0;
            for sk in 0..self.key_count() {
                acc += self.sk_probs[sk] * self.dec_prob(sk, x, &self.cts[sk][x]);
            }
            worst = worst.min(acc);
        }
        worst
    }
}

/// Exactly correct, statistically insecure fixture: a classical one-time
/// pad on the first `kappa` plaintext bits (identity on the rest), with
/// ciphertexts encoded in the computational basis, one qubit per bit.
pub fn toy_qpotp(kappa: usize, ell: usize) -> Result<QpotpScheme> {
    if kappa > ell || ell == 0 {
        return Err(Error::InvalidArgument(
            "toy scheme needs 0 < kappa <= ell".to_string(),
        ));
    }
    let keys = 1usize << kappa;
    let messages = 1usize << ell;
    let shape = RegisterShape::single("ct", messages)?;
    let mut cts = Vec::with_capacity(keys);
    let mut dec_effects = Vec::with_capacity(keys);
    for sk in 0..keys {
        // The key pads the leading kappa bits of the plaintext.
        let pad = sk << (ell - kappa);
        let mut ct_row = Vec::with_capacity(messages);
        let mut eff_row = Vec::with_capacity(messages);
        for x in 0..messages {
            let y = x ^ pad;
            let ct = crate::qstate::PureState::basis(shape.clone(), y)?.to_density();
            eff_row.push(ct.matrix().clone());
            ct_row.push(ct);
        }
        cts.push(ct_row);
        dec_effects.push(eff_row);
    }
    let mut scheme = QpotpScheme::new(
        kappa,
        ell,
        1,
        vec![1.0 / keys as f64; keys],
        cts,
        dec_effects,
        0.0,
    )?;
    scheme.single_copy_secure = true;
    Ok(scheme)
}

/// Generator from a pad scheme: keys are `(sk, x)` with `x` uniform, the
/// state is `ct_{sk,x} (x) |x><x|`, and the candidate `(sk', x')` accepts
/// exactly when decrypting with `sk'` yields `x'` and the plaintext register
/// reads `x'`.
pub fn owsg_from_qpotp(scheme: &QpotpScheme) -> Result<Owsg> {
    let messages = scheme.message_count();
    let keys = scheme.key_count();
    let x_shape = RegisterShape::single("x", messages)?;
    let mut key_words = Vec::with_capacity(keys * messages);
    let mut probs = Vec::with_capacity(keys * messages);
    let mut states = Vec::with_capacity(keys * messages);
    let mut x_projectors = Vec::with_capacity(messages);
    for x in 0..messages {
        x_projectors.push(
            crate::qstate::PureState::basis(x_shape.clone(), x)?
                .to_density()
                .matrix()
                .clone(),
        );
    }
    for sk in 0..keys {
        for x in 0..messages {
            key_words.push(vec![sk as u32, x as u32]);
            probs.push(scheme.sk_probs[sk] / messages as f64);
            let x_state = crate::qstate::PureState::basis(x_shape.clone(), x)?.to_density();
            states.push(scheme.encrypt(sk, x).tensor(&x_state)?);
        }
    }
    let mut effects = Vec::with_capacity(keys * messages);
    for sk in 0..keys {
        for x in 0..messages {
            effects.push(scheme.dec_effect(sk, x).kron(&x_projectors[x]));
        }
    }
    let family = KeyedStateFamily::with_words(key_words, probs, states, 2)?;
    Owsg::new(family, effects, scheme.eps_corr)
}

/// The wrong-message probability and its closed-form ceiling `2^k / 2^l`.
#[derive(Debug, Clone, Copy)]
pub struct WrongMessageReport {
    pub lhs: f64,
    pub rhs: f64,
}

/// Exact averaged probability that decrypting an encryption of a random
/// `x_1` under a candidate key yields an independent random `x_0`, summed
/// over every candidate key — the security argument's bounding step, which
/// drops the adversary's key-choice distribution. The result never exceeds
/// `2^kappa / 2^ell`, with equality for complete decryption POVMs.
pub fn wrong_message_bound_check(scheme: &QpotpScheme) -> Result<WrongMessageReport> {
    if !scheme.short_key() {
        return Err(Error::InvalidArgument(
            "wrong-message bound needs kappa < ell".to_string(),
        ));
    }
    let messages = scheme.message_count() as f64;
    let mut lhs = 0.0f64;
    for sk in 0..scheme.key_count() {
        for x1 in 0..scheme.message_count() {
            let ct = scheme.encrypt(sk, x1);
            for sk_prime in 0..scheme.key_count() {
                for x0 in 0..scheme.message_count() {
                    lhs += scheme.sk_probs[sk] * scheme.dec_prob(sk_prime, x0, ct);
                }
            }
        }
    }
    lhs /= messages * messages;
    let rhs = scheme.key_count() as f64 / messages;
    Ok(WrongMessageReport { lhs, rhs })
}

/// Full Pauli twirl `(1/4^n) sum_{x,z} X^x Z^z rho (X^x Z^z)^dagger`, which
/// maps every state to the maximally mixed one.
pub fn pauli_twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dim = rho.dim();
    let n = dim.trailing_zeros() as usize;
    if dim != 1usize << n {
        return Err(Error::InvalidArgument(
            "pauli twirl needs a qubit register".to_string(),
        ));
    }
    let mut acc = ComplexMatrix::zeros(dim, dim);
    let count = 1usize << n;
    for x in 0..count {
        for z in 0..count {
            let x_bits: Vec<bool> = (0..n).map(|i| (x >> (n - 1 - i)) & 1 == 1).collect();
            let z_bits: Vec<bool> = (0..n).map(|i| (z >> (n - 1 - i)) & 1 == 1).collect();
            let pauli = pauli_operator(&x_bits, &z_bits)?;
            acc = acc.add(&pauli.mul(rho.matrix()).mul(&pauli.adjoint()));
        }
    }
    let scale = 1.0 / ((count * count) as f64);
    Ok(DensityMatrix::trusted(
        rho.shape_arc(),
        acc.scale_real(scale).hermitize(),
    ))
}

/// Two efficiently generatable states that are statistically far apart.
#[derive(Debug, Clone)]
pub struct EfiPair {
    pub rho0: DensityMatrix,
    pub rho1: DensityMatrix,
}

impl EfiPair {
    pub fn new(rho0: DensityMatrix, rho1: DensityMatrix) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(Error::ShapeMismatch {
                expected: rho0.shape().describe(),
                found: rho1.shape().describe(),
            });
        }
        Ok(EfiPair { rho0, rho1 })
    }

    /// Exact statistical distinguishability `(1/2)||rho_0 - rho_1||_1`.
    pub fn statistical_distance(&self) -> Result<f64> {
        self.rho0.trace_distance(&self.rho1)
    }
}

/// The EFI construction from a pad scheme with even plaintext length
/// `ell = 2n`, together with the hybrid states (ciphertexts replaced by an
/// encryption of all-zeros) whose equality is the construction's structural
/// indistinguishability step.
#[derive(Debug, Clone)]
pub struct EfiFromQpotp {
    pub pair: EfiPair,
    pub hybrid0: DensityMatrix,
    pub hybrid1: DensityMatrix,
    pub payload_qubits: usize,
}

pub fn efi_from_qpotp(scheme: &QpotpScheme, cap: usize) -> Result<EfiFromQpotp> {
    if scheme.ell % 2 != 0 {
        return Err(Error::InvalidArgument(
            "EFI construction needs an even plaintext length".to_string(),
        ));
    }
    let n = scheme.ell / 2;
    let side = 1usize << n;
    let payload_dim = side * side;
    let total_dim = scheme.ciphertext_dim() * payload_dim;
    if total_dim > cap {
        return Err(Error::DimCapExceeded {
            dim: total_dim,
            cap,
        });
    }
    let entangled = maximally_entangled(n, cap)?.to_density();
    let mixed_b = DensityMatrix::maximally_mixed(RegisterShape::single("B", side)?);
    let zero_a = crate::qstate::PureState::basis(RegisterShape::single("A", side)?, 0)?
        .to_density();
    let product = zero_a.tensor(&mixed_b)?;

    let shape = RegisterShape::new(vec![
        ("ct", scheme.ciphertext_dim()),
        ("A", side),
        ("B", side),
    ])?;
    let mut acc0 = ComplexMatrix::zeros(total_dim, total_dim);
    let mut acc1 = ComplexMatrix::zeros(total_dim, total_dim);
    let mut hyb0 = ComplexMatrix::zeros(total_dim, total_dim);
    let mut hyb1 = ComplexMatrix::zeros(total_dim, total_dim);
    let identity_b = ComplexMatrix::identity(side);
    let norm = 1.0 / (side * side) as f64;
    for x in 0..side {
        for z in 0..side {
            let x_bits: Vec<bool> = (0..n).map(|i| (x >> (n - 1 - i)) & 1 == 1).collect();
            let z_bits: Vec<bool> = (0..n).map(|i| (z >> (n - 1 - i)) & 1 == 1).collect();
            let pauli = pauli_operator(&x_bits, &z_bits)?.kron(&identity_b);
            let padded0 = pauli.mul(entangled.matrix()).mul(&pauli.adjoint());
            let padded1 = pauli.mul(product.matrix()).mul(&pauli.adjoint());
            // Plaintext (x, z) encoded with x in the leading half.
            let plaintext = (x << n) | z;
            for sk in 0..scheme.key_count() {
                let weight = scheme.sk_probs[sk] * norm;
                let ct = scheme.encrypt(sk, plaintext).matrix();
                let ct0 = scheme.encrypt(sk, 0).matrix();
                acc0 = acc0.add(&ct.kron(&padded0).scale_real(weight));
                acc1 = acc1.add(&ct.kron(&padded1).scale_real(weight));
                hyb0 = hyb0.add(&ct0.kron(&padded0).scale_real(weight));
                hyb1 = hyb1.add(&ct0.kron(&padded1).scale_real(weight));
            }
        }
    }
    let rho0 = DensityMatrix::new(shape.clone(), acc0.hermitize())?;
    let rho1 = DensityMatrix::new(shape.clone(), acc1.hermitize())?;
    let hybrid0 = DensityMatrix::new(shape.clone(), hyb0.hermitize())?;
    let hybrid1 = DensityMatrix::new(shape, hyb1.hermitize())?;
    Ok(EfiFromQpotp {
        pair: EfiPair::new(rho0, rho1)?,
        hybrid0,
        hybrid1,
        payload_qubits: n,
    })
}

/// Public-key encryption from one-bit secret-key encryption: the public key
/// is the ciphertext pair `(Enc(sk, 0), Enc(sk, 1))`; encrypting selects a
/// component and decryption is unchanged.
#[derive(Debug, Clone)]
pub struct QpkeScheme {
    pub sk_probs: Vec<f64>,
    public_keys: Vec<(DensityMatrix, DensityMatrix)>,
    dec_effects: Vec<Vec<ComplexMatrix>>,
    pub eps_corr: f64,
}

impl QpkeScheme {
    pub fn public_key(&self, sk: usize) -> &(DensityMatrix, DensityMatrix) {
        &self.public_keys[sk]
    }

    /// `Enc(pk, x) = ct_x`: the selected public-key component.
    pub fn encrypt(&self, sk: usize, x: usize) -> &DensityMatrix {
        if x == 0 {
            &self.public_keys[sk].0
        } else {
            &self.public_keys[sk].1
        }
    }

    pub fn dec_prob(&self, sk: usize, x: usize, ct: &DensityMatrix) -> f64 {
        ct.effect_probability(&self.dec_effects[sk][x])
    }

    pub fn correctness(&self) -> f64 {
        let mut worst = 1.0f64;
        for x in 0..2 {
            let mut acc = 0.0;
            for sk in 0..self.sk_probs.len() {
                acc += self.sk_probs[sk] * self.dec_prob(sk, x, self.encrypt(sk, x));
            }
            worst = worst.min(acc);
        }
        worst
    }
}

pub fn qpke_from_qske(qske: &QpotpScheme) -> Result<QpkeScheme> {
    if qske.ell != 1 {
        return Err(Error::InvalidArgument(
            "public-key conversion expects one-bit messages".to_string(),
        ));
    }
    let mut public_keys = Vec::with_capacity(qske.key_count());
    let mut dec_effects = Vec::with_capacity(qske.key_count());
    for sk in 0..qske.key_count() {
        public_keys.push((qske.encrypt(sk, 0).clone(), qske.encrypt(sk, 1).clone()));
        dec_effects.push(vec![
            qske.dec_effect(sk, 0).clone(),
            qske.dec_effect(sk, 1).clone(),
        ]);
    }
    Ok(QpkeScheme {
        sk_probs: qske.sk_probs.clone(),
        public_keys,
        dec_effects,
        eps_corr: qske.eps_corr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::random_density;
    use crate::rng::WbRng;
    use crate::DEFAULT_DIM_CAP;

    #[test]
    fn toy_scheme_is_exactly_correct() {
        let scheme = toy_qpotp(1, 2).unwrap();
        assert_eq!(scheme.correctness(), 1.0);
        assert!(scheme.short_key());
        // Decrypting with the wrong key flips the padded bit.
        let ct = scheme.encrypt(1, 0b00);
        assert_eq!(scheme.dec_prob(0, 0b10, ct), 1.0);
        assert_eq!(scheme.dec_prob(0, 0b00, ct), 0.0);
    }

    #[test]
    fn generator_accepts_honest_keys_only() {
        let scheme = toy_qpotp(1, 2).unwrap();
        let owsg = owsg_from_qpotp(&scheme).unwrap();
        assert!((crate::owsg::owsg_correctness(&owsg) - 1.0).abs() < 1e-12);
        // Honest key, wrong plaintext claim: reject.
        let honest = owsg
            .family
            .key_words()
            .iter()
            .position(|w| w == &vec![0, 0])
            .unwrap();
        let wrong_x = owsg
            .family
            .key_words()
            .iter()
            .position(|w| w == &vec![0, 1])
            .unwrap();
        assert_eq!(owsg.verify(wrong_x, owsg.family.state(honest)), 0.0);
        // Wrong pad key on the toy scheme decrypts to a different message.
        let wrong_sk = owsg
            .family
            .key_words()
            .iter()
            .position(|w| w == &vec![1, 0])
            .unwrap();
        let accept = owsg.verify(wrong_sk, owsg.family.state(honest));
        let expect = scheme.dec_prob(1, 0, scheme.encrypt(0, 0));
        assert!((accept - expect).abs() < 1e-12);
    }

    #[test]
    fn wrong_message_bound_is_tight_on_toy() {
        let scheme = toy_qpotp(1, 2).unwrap();
        let report = wrong_message_bound_check(&scheme).unwrap();
        assert!((report.rhs - 0.5).abs() < 1e-15);
        assert!(report.lhs <= report.rhs + 1e-12);
        // Complete POVM: the bounding step is an equality.
        assert!((report.lhs - report.rhs).abs() < 1e-12);
        // kappa = ell is rejected.
        assert!(wrong_message_bound_check(&toy_qpotp(2, 2).unwrap()).is_err());
        // ell = kappa + 3 gives 1/8.
        let scheme = toy_qpotp(1, 4).unwrap();
        let report = wrong_message_bound_check(&scheme).unwrap();
        assert!((report.rhs - 0.125).abs() < 1e-15);
        assert!(report.lhs <= report.rhs + 1e-12);
    }

    #[test]
    fn twirl_flattens_everything() {
        let mut rng = WbRng::seed(31);
        for n in 1..=2usize {
            let dim = 1 << n;
            for _ in 0..20 {
                let rho = random_density(dim, 1 + rng.below(dim), &mut rng);
                let twirled = pauli_twirl(&rho).unwrap();
                let mixed = DensityMatrix::maximally_mixed(
                    crate::qstate::RegisterShape::single("q", dim).unwrap(),
                );
                let dist = twirled.trace_distance(&mixed).unwrap();
                assert!(dist <= 1e-12, "n={n} dist {dist}");
            }
        }
        // Already maximally mixed: unchanged.
        let mixed =
            DensityMatrix::maximally_mixed(crate::qstate::RegisterShape::single("q", 4).unwrap());
        let twirled = pauli_twirl(&mixed).unwrap();
        assert!(twirled.matrix().sub(mixed.matrix()).max_norm() < 1e-15);
    }

    #[test]
    fn efi_construction_identities() {
        let scheme = toy_qpotp(1, 2).unwrap();
        let built = efi_from_qpotp(&scheme, DEFAULT_DIM_CAP).unwrap();
        // Hybrid identity: with the ciphertext fixed, the twirl flattens
        // both payloads to the same state.
        assert!(
            built.hybrid0.matrix().sub(built.hybrid1.matrix()).max_norm() < 1e-12,
            "hybrids differ"
        );
        // Payload marginal of rho_0 is maximally mixed on both halves.
        let payload = built.pair.rho0.partial_trace(&["A", "B"]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(
            crate::qstate::RegisterShape::new(vec![("A", 2), ("B", 2)]).unwrap(),
        );
        assert!(payload.matrix().sub(mixed.matrix()).max_norm() < 1e-12);
        // Replacing ciphertexts only touches the ct factor: tracing it out
        // leaves rho_0 and its hybrid identical.
        let marg0 = built.pair.rho0.partial_trace(&["A", "B"]).unwrap();
        let marg0h = built.hybrid0.partial_trace(&["A", "B"]).unwrap();
        assert!(marg0.matrix().sub(marg0h.matrix()).max_norm() < 1e-12);
        // The statistical leg: the short-key toy pad leaks, exactly.
        let distance = built.pair.statistical_distance().unwrap();
        assert!(distance > 0.05, "distance {distance}");
    }

    #[test]
    fn qpke_inherits_everything() {
        let qske = toy_qpotp(1, 1).unwrap();
        let qpke = qpke_from_qske(&qske).unwrap();
        assert_eq!(qpke.correctness(), qske.correctness());
        // Encrypt 0, decrypt with the true key.
        assert_eq!(qpke.dec_prob(0, 0, qpke.encrypt(0, 0)), 1.0);
        // Public-key components equal fresh ciphertexts.
        for sk in 0..qske.key_count() {
            let (ct0, ct1) = qpke.public_key(sk);
            assert!(ct0.matrix().sub(qske.encrypt(sk, 0).matrix()).max_norm() < 1e-12);
            assert!(ct1.matrix().sub(qske.encrypt(sk, 1).matrix()).max_norm() < 1e-12);
        }
        // Multi-bit schemes are rejected.
        assert!(qpke_from_qske(&toy_qpotp(1, 2).unwrap()).is_err());
    }
}
