//! Canonical quantum bit commitments with exact hiding and binding metrics,
//! EFI-pair tensor amplification, secretly-verifiable statistically-
//! invertible generators, and the commitment built from one, including the
//! key-identification witness for hiding and the measure-the-tag adversary
//! for binding.
//!
//! A canonical commitment is a pair of unitaries on a commitment register C
//! and a reveal register R; committing to `b` prepares `Q_b|0>` and sends C.
//! Hiding is the distance of the two C-marginals; the unbounded binding
//! advantage is the Uhlmann maximum `sqrt(F)` of those marginals, attained
//! by a closed-form polar attack that the metrics cross-check numerically.
//!
//! A flavor-converting transformation (hiding and binding swap roles) is
//! known for canonical commitments; this workbench uses only its statement
//! and does not construct it.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::discriminate::{pgm, Ensemble};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::owsg::KeyedStateFamily;
use crate::qpotp::EfiPair;
use crate::qstate::{DensityMatrix, PureState, RegisterShape};
use crate::{Complex64, SUPPORT_CUTOFF, TOL_ASSERT};

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Register dimensions of a commitment built from a keyed family.
#[derive(Debug, Clone, Copy)]
pub struct SvsiCommitmentDims {
    pub c1: usize,
    pub c2: usize,
    pub r2: usize,
    pub r3: usize,
    pub copies: usize,
}

/// Construction data kept alongside a commitment built by
/// [`commitment_from_svsi`], needed to replay binding attacks as key
/// inverters.
#[derive(Debug, Clone)]
pub struct SvsiProvenance {
    pub family: KeyedStateFamily,
    pub dims: SvsiCommitmentDims,
}

/// Canonical quantum bit commitment: unitaries `Q_0, Q_1` over the factors
/// of `shape`, of which `c_factors` leading factors form the commitment
/// register and the rest the reveal register.
#[derive(Debug, Clone)]
pub struct CanonicalCommitment {
    shape: RegisterShape,
    c_factors: usize,
    q0: ComplexMatrix,
    q1: ComplexMatrix,
    provenance: Option<SvsiProvenance>,
}

impl CanonicalCommitment {
    pub fn new(
        shape: RegisterShape,
        c_factors: usize,
        q0: ComplexMatrix,
        q1: ComplexMatrix,
    ) -> Result<Self> {
        let dim = shape.total_dim();
        if q0.rows() != dim || q1.rows() != dim {
            return Err(Error::LengthMismatch {
                left: dim,
                right: q0.rows(),
            });
        }
        if c_factors == 0 || c_factors >= shape.factors().len() {
            return Err(Error::InvalidArgument(
                "commitment needs a nonempty split into C and R factors".to_string(),
            ));
        }
        for u in [&q0, &q1] {
            let dev = u.unitary_deviation();
            if dev > TOL_ASSERT {
                return Err(Error::NotUnitary { deviation: dev });
            }
        }
        Ok(CanonicalCommitment {
            shape,
            c_factors,
            q0,
            q1,
            provenance: None,
        })
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn unitary(&self, bit: u8) -> &ComplexMatrix {
        if bit == 0 {
            &self.q0
        } else {
            &self.q1
        }
    }

    pub fn c_dim(&self) -> usize {
        self.shape.factors()[..self.c_factors]
            .iter()
            .map(|(_, d)| *d)
            .product()
    }

    pub fn r_dim(&self) -> usize {
        self.shape.factors()[self.c_factors..]
            .iter()
            .map(|(_, d)| *d)
            .product()
    }

    pub fn provenance(&self) -> Option<&SvsiProvenance> {
        self.provenance.as_ref()
    }

    /// `Q_b |0>`: the first column of the commitment unitary.
    pub fn commit_vector(&self, bit: u8) -> Vec<Complex64> {
        self.unitary(bit).column(0)
    }

    /// Reduced state on the commitment register.
    pub fn c_marginal(&self, bit: u8) -> Result<DensityMatrix> {
        let full = PureState::new(self.shape.clone(), self.commit_vector(bit))?.to_density();
        let keep: Vec<&str> = self.shape.factors()[..self.c_factors]
            .iter()
            .map(|(l, _)| l.as_str())
            .collect();
        full.partial_trace(&keep)
    }
}

/// Trace distance between the two commitment-register marginals; zero for
/// perfectly hiding schemes.
pub fn hiding_distance(commitment: &CanonicalCommitment) -> Result<f64> {
    commitment
        .c_marginal(0)?
        .trace_distance(&commitment.c_marginal(1)?)
}

/// Best possible opening attack for an unbounded adversary:
/// `sup_{U, tau} ||<0|Q_1^dag (I_C (x) U_{R,Z}) (Q_0|0> (x) |tau>)||`, which
/// Uhlmann's theorem evaluates to `sqrt(F)` of the C-marginals.
pub fn unbounded_binding_advantage(commitment: &CanonicalCommitment) -> Result<f64> {
    let f = commitment
        .c_marginal(0)?
        .fidelity(&commitment.c_marginal(1)?)?;
    Ok(libm::sqrt(f))
}

/// Exact norm of the displayed binding vector for a concrete attack: a
/// unitary on the reveal register joined with an ancilla `Z` in the state
/// `tau`.
pub fn binding_overlap(
    commitment: &CanonicalCommitment,
    attack: &ComplexMatrix,
    tau: &PureState,
) -> Result<f64> {
    let c_dim = commitment.c_dim();
    let r_dim = commitment.r_dim();
    let z_dim = tau.dim();
    if attack.rows() != r_dim * z_dim {
        return Err(Error::LengthMismatch {
            left: r_dim * z_dim,
            right: attack.rows(),
        });
    }
    let q0 = commitment.commit_vector(0);
    let q1 = commitment.commit_vector(1);
    // v = (Q_0|0>) (x) |tau>, then I_C (x) U on the trailing (R, Z) block.
    let mut v = vec![C_ZERO; c_dim * r_dim * z_dim];
    for (cr, amp) in q0.iter().enumerate() {
        if *amp == C_ZERO {
            continue;
        }
        for (z, tz) in tau.amplitudes().iter().enumerate() {
            v[cr * z_dim + z] = amp * tz;
        }
    }
    linalg::apply_trailing(&mut v, c_dim, attack);
    // Partial inner product against <0|Q_1^dag leaves a vector on Z.
    let mut w = vec![C_ZERO; z_dim];
    for (cr, amp) in q1.iter().enumerate() {
        if *amp == C_ZERO {
            continue;
        }
        let conj = amp.conj();
        for (z, wz) in w.iter_mut().enumerate() {
            *wz += conj * v[cr * z_dim + z];
        }
    }
    Ok(libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum()))
}

/// Closed-form optimal opening attack via the polar decomposition of the
/// cross operator `X = Tr_C |psi_0><psi_1|` on the purifying side: returns
/// the attack unitary on `R (x) Z` (with `|tau> = |0>` of dimension
/// `z_dim`) and the overlap `||X||_1` it achieves, which equals the
/// Uhlmann maximum.
pub fn uhlmann_attack(
    commitment: &CanonicalCommitment,
    z_dim: usize,
) -> Result<(ComplexMatrix, f64)> {
    let c_dim = commitment.c_dim();
    let r_dim = commitment.r_dim();
    let p_dim = r_dim * z_dim;
    let q0 = commitment.commit_vector(0);
    let q1 = commitment.commit_vector(1);
    // Purifications |psi_b> = Q_b|0> (x) |0_Z> on C (x) P with P = R (x) Z.
    // X[p][p'] = sum_c psi0[c, p] conj(psi1[c, p']).
    let mut x = ComplexMatrix::zeros(p_dim, p_dim);
    for c in 0..c_dim {
        for r0 in 0..r_dim {
            let a0 = q0[c * r_dim + r0];
            if a0 == C_ZERO {
                continue;
            }
            for r1 in 0..r_dim {
                let a1 = q1[c * r_dim + r1].conj();
                if a1 == C_ZERO {
                    continue;
                }
                let val = x.get(r0 * z_dim, r1 * z_dim) + a0 * a1;
                x.set(r0 * z_dim, r1 * z_dim, val);
            }
        }
    }
    let (w, s, v) = linalg::svd_square(&x)?;
    let attack = v.mul(&w.adjoint());
    Ok((attack, s.iter().sum()))
}

/// Tensor-power amplification of an EFI pair.
pub fn efi_amplify(pair: &EfiPair, n: usize, cap: usize) -> Result<EfiPair> {
    if n < 1 {
        return Err(Error::InvalidArgument("copy count must be >= 1".to_string()));
    }
    EfiPair::new(
        pair.rho0.tensor_power(n, cap)?,
        pair.rho1.tensor_power(n, cap)?,
    )
}

/// Lower bound `1 - exp(-n ||rho - sigma||_1 / 4)` on the amplified
/// statistical distance, in terms of the single-copy trace distance.
pub fn efi_amplification_bound(single_copy_distance: f64, n: usize) -> f64 {
    1.0 - libm::exp(-(n as f64) * 2.0 * single_copy_distance / 4.0)
}

/// Secretly-verifiable statistically-invertible generator: a purified keyed
/// family whose states are pairwise at least `1/p` apart in trace distance,
/// with verification fixed to the key-equality predicate.
#[derive(Debug, Clone)]
pub struct SvSiOwsg {
    pub family: KeyedStateFamily,
    pub invertibility_p: f64,
}

impl SvSiOwsg {
    pub fn new(family: KeyedStateFamily, invertibility_p: f64) -> Result<Self> {
        if family.purification().is_none() {
            return Err(Error::InvalidArgument(
                "statistically invertible generator needs purification data".to_string(),
            ));
        }
        let min = family.min_pairwise_distance()?;
        if min < 1.0 / invertibility_p - TOL_ASSERT {
            return Err(Error::InvalidArgument(alloc::format!(
                "min pairwise distance {min} below declared 1/p = {}",
                1.0 / invertibility_p
            )));
        }
        Ok(SvSiOwsg {
            family,
            invertibility_p,
        })
    }
}

/// Equality verification for secretly-verifiable generators; any raw
/// verifier can be replaced by this one without loss of generality.
pub fn sv_owsg_ver_canonicalize(key: &[u32], candidate: &[u32]) -> bool {
    key == candidate
}

/// Generator from an EFI pair: keys are uniform `kappa`-bit strings and
/// `phi_k` is the tensor of the pair's states selected bitwise. Checks the
/// fidelity product identity
/// `F(phi_k, phi_k') = prod_i F(rho_{k_i}, rho_{k_i'})` on every pair.
pub fn svsi_from_efi(pair: &EfiPair, kappa: usize, cap: usize) -> Result<SvSiOwsg> {
    if kappa < 1 {
        return Err(Error::InvalidArgument("kappa must be >= 1".to_string()));
    }
    let keys = 1usize << kappa;
    let single = [pair.rho0.clone(), pair.rho1.clone()];
    let dim = single[0].dim().checked_pow(kappa as u32).unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimCapExceeded { dim, cap });
    }
    let mut states = Vec::with_capacity(keys);
    for k in 0..keys {
        let mut state = single[(k >> (kappa - 1)) & 1].relabeled("#1");
        for bit in 1..kappa {
            let b = (k >> (kappa - 1 - bit)) & 1;
            state = state.tensor(&single[b].relabeled(&alloc::format!("#{}", bit + 1)))?;
        }
        states.push(state);
    }
    // Fidelity multiplicativity across tensor factors, asserted exactly.
    let f01 = single[0].fidelity(&single[1])?;
    for a in 0..keys {
        for b in (a + 1)..keys {
            let differing = (a ^ b).count_ones();
            let expected = libm::pow(f01, differing as f64);
            let actual = states[a].fidelity(&states[b])?;
            if (actual - expected).abs() > TOL_ASSERT {
                return Err(Error::InvalidArgument(alloc::format!(
                    "fidelity product identity violated: {actual} vs {expected}"
                )));
            }
        }
    }
    let family = KeyedStateFamily::new(vec![1.0 / keys as f64; keys], states)?.purified()?;
    let min = family.min_pairwise_distance()?;
    SvSiOwsg::new(family, 1.0 / min)
}

/// Tensor-power amplification of the family's statistical invertibility.
pub fn svsi_amplify(generator: &SvSiOwsg, copies: usize, cap: usize) -> Result<SvSiOwsg> {
    if copies < 1 {
        return Err(Error::InvalidArgument("copy count must be >= 1".to_string()));
    }
    if copies == 1 {
        return Ok(generator.clone());
    }
    let mut states = Vec::with_capacity(generator.family.len());
    for state in generator.family.states() {
        states.push(state.tensor_power(copies, cap)?);
    }
    let family =
        KeyedStateFamily::new(generator.family.probabilities().to_vec(), states)?.purified()?;
    let min = family.min_pairwise_distance()?;
    SvSiOwsg::new(family, 1.0 / min)
}

/// Per-key success of identifying the key from `t` copies with the square
/// root measurement.
#[derive(Debug, Clone)]
pub struct KeyIdReport {
    pub per_key_success: Vec<f64>,
    pub min_success: f64,
    pub max_error: f64,
    pub used_gram_path: bool,
    pub copies: usize,
}

/// Square-root measurement over `{phi_k^{(x) t}}`: the Gram fast path for
/// pure families, the full copy space otherwise (subject to the cap).
pub fn key_identification_report(
    generator: &SvSiOwsg,
    t: usize,
    cap: usize,
) -> Result<KeyIdReport> {
    let family = &generator.family;
    let all_pure = family
        .states()
        .iter()
        .all(|s| s.is_pure(TOL_ASSERT));
    let per_key_success = if all_pure {
        let pures: Vec<PureState> = family
            .states()
            .iter()
            .map(|s| s.as_pure(TOL_ASSERT))
            .collect::<Result<_>>()?;
        let weights = vec![1.0 / family.len() as f64; family.len()];
        crate::discriminate::gram_pgm_success(&pures, &weights, t)?
    } else {
        let copies: Vec<DensityMatrix> = family
            .states()
            .iter()
            .map(|s| s.tensor_power(t, cap))
            .collect::<Result<_>>()?;
        let ensemble = Ensemble::uniform(copies.clone())?;
        let povm = pgm(&ensemble)?;
        let mut out = Vec::with_capacity(family.len());
        for (k, state) in copies.iter().enumerate() {
            let effect = povm
                .effect(&alloc::format!("{k}"))
                .expect("pgm emits one effect per label");
            out.push(state.effect_probability(effect));
        }
        out
    };
    let min_success = per_key_success.iter().copied().fold(1.0, f64::min);
    Ok(KeyIdReport {
        max_error: 1.0 - min_success,
        min_success,
        per_key_success,
        used_gram_path: all_pure,
        copies: t,
    })
}

/// The key-identification measurement materialized as a POVM in the full
/// `t`-copy space, with its success report. Fails beyond the cap; the
/// Gram-path [`key_identification_report`] covers pure families of any
/// copy count without building effects.
pub fn key_identification_povm(
    generator: &SvSiOwsg,
    t: usize,
    cap: usize,
) -> Result<(crate::qstate::Povm, KeyIdReport)> {
    let family = &generator.family;
    let copies: Vec<DensityMatrix> = family
        .states()
        .iter()
        .map(|s| s.tensor_power(t, cap))
        .collect::<Result<_>>()?;
    let ensemble = Ensemble::uniform(copies.clone())?;
    let povm = pgm(&ensemble)?;
    let mut per_key_success = Vec::with_capacity(family.len());
    for (k, state) in copies.iter().enumerate() {
        let effect = povm
            .effect(&alloc::format!("{k}"))
            .expect("pgm emits one effect per label");
        per_key_success.push(state.effect_probability(effect));
    }
    let min_success = per_key_success.iter().copied().fold(1.0, f64::min);
    let report = KeyIdReport {
        max_error: 1.0 - min_success,
        min_success,
        per_key_success,
        used_gram_path: false,
        copies: t,
    };
    Ok((povm, report))
}

/// Commitment from a purified statistically-invertible generator with `t`
/// state copies:
/// `Q_b|0> = sum_k sqrt(Pr[k]) (|k>|mu_k>)_{C1} |psi_k>^{(x)t}_{C2,R2} |tag_b(k)>_{R3}`
/// with `tag_0 = 0` and `tag_1 = k`. The unitaries are deterministic
/// basis completions of those target columns.
pub fn commitment_from_svsi(
    generator: &SvSiOwsg,
    t: usize,
    cap: usize,
) -> Result<CanonicalCommitment> {
    if t < 1 {
        return Err(Error::InvalidArgument("copy count must be >= 1".to_string()));
    }
    let family = &generator.family;
    let purification = family
        .purification()
        .ok_or(Error::ProvenanceMissing)?;
    let keys = family.len();
    let mu_dim = purification.mu_dim;
    let a_dim = purification.a_dim;
    let b_dim = family.state(0).dim();
    let c1 = keys * mu_dim;
    let c2 = a_dim.checked_pow(t as u32).unwrap_or(usize::MAX);
    let r2 = b_dim.checked_pow(t as u32).unwrap_or(usize::MAX);
    let r3 = keys;
    let total = c1
        .checked_mul(c2)
        .and_then(|x| x.checked_mul(r2))
        .and_then(|x| x.checked_mul(r3))
        .unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::DimCapExceeded { dim: total, cap });
    }
    // |k>|mu_k> blocks come from the key unitary's first column.
    let key_column = purification.key_unitary.column(0);
    // psi_k^{(x)t} regrouped with all A factors first, then all B factors.
    let mut grouped: Vec<Vec<Complex64>> = Vec::with_capacity(keys);
    for psi in &purification.state_purifications {
        let amps = psi.amplitudes();
        let mut block = vec![C_ZERO; c2 * r2];
        for a_flat in 0..c2 {
            for b_flat in 0..r2 {
                let mut product = Complex64::new(1.0, 0.0);
                let (mut ar, mut br) = (a_flat, b_flat);
                // Copy index runs last-to-first through the flat indices.
                for _copy in 0..t {
                    let a_i = ar % a_dim;
                    let b_i = br % b_dim;
                    ar /= a_dim;
                    br /= b_dim;
                    product *= amps[a_i * b_dim + b_i];
                    if product == C_ZERO {
                        break;
                    }
                }
                block[a_flat * r2 + b_flat] = product;
            }
        }
        grouped.push(block);
    }
    let mut target0 = vec![C_ZERO; total];
    let mut target1 = vec![C_ZERO; total];
    for k in 0..keys {
        for m in 0..mu_dim {
            let amp_km = key_column[k * mu_dim + m];
            if amp_km == C_ZERO {
                continue;
            }
            let c1_idx = k * mu_dim + m;
            for (ab, amp_ab) in grouped[k].iter().enumerate() {
                if *amp_ab == C_ZERO {
                    continue;
                }
                let amp = amp_km * amp_ab;
                let base = (c1_idx * c2 * r2 + ab) * r3;
                target0[base] += amp;
                target1[base + k] += amp;
            }
        }
    }
    let q0 = linalg::unitary_from_first_column(&target0)?;
    let q1 = linalg::unitary_from_first_column(&target1)?;
    let shape = RegisterShape::new(vec![
        ("C1", c1),
        ("C2", c2),
        ("R2", r2),
        ("R3", r3),
    ])?;
    let mut commitment = CanonicalCommitment::new(shape, 2, q0, q1)?;
    commitment.provenance = Some(SvsiProvenance {
        family: family.clone(),
        dims: SvsiCommitmentDims {
            c1,
            c2,
            r2,
            r3,
            copies: t,
        },
    });
    Ok(commitment)
}

/// Both sides of the binding chain for a concrete attack `(U, tau)` against
/// a family-built commitment: the squared overlap on the left and the exact
/// success of the adversary that applies `U` to
/// `|psi_k>^{(x)t} |0>_{R3} |tau>` and measures the tag register, on the
/// right. Convexity makes left <= right.
#[derive(Debug, Clone, Copy)]
pub struct BindingChainReport {
    pub overlap_sq: f64,
    pub inverter_success: f64,
}

pub fn binding_attack_to_inverter(
    commitment: &CanonicalCommitment,
    attack: &ComplexMatrix,
    tau: &PureState,
) -> Result<BindingChainReport> {
    let provenance = commitment
        .provenance()
        .ok_or(Error::ProvenanceMissing)?;
    let dims = provenance.dims;
    let family = &provenance.family;
    let purification = family.purification().ok_or(Error::ProvenanceMissing)?;
    let z_dim = tau.dim();
    if attack.rows() != dims.r2 * dims.r3 * z_dim {
        return Err(Error::LengthMismatch {
            left: dims.r2 * dims.r3 * z_dim,
            right: attack.rows(),
        });
    }
    let overlap = binding_overlap(commitment, attack, tau)?;

    let a_dim = purification.a_dim;
    let b_dim = family.state(0).dim();
    let t = dims.copies;
    let mut success = 0.0;
    for k in 0..family.len() {
        // |psi_k>^{(x)t} on (C2, R2), then |0>_{R3}, then |tau>_Z.
        let psi = &purification.state_purifications[k];
        let amps = psi.amplitudes();
        let mut v = vec![C_ZERO; dims.c2 * dims.r2 * dims.r3 * z_dim];
        for a_flat in 0..dims.c2 {
            for b_flat in 0..dims.r2 {
                let mut product = Complex64::new(1.0, 0.0);
                let (mut ar, mut br) = (a_flat, b_flat);
                for _ in 0..t {
                    product *= amps[(ar % a_dim) * b_dim + (br % b_dim)];
                    ar /= a_dim;
                    br /= b_dim;
                    if product == C_ZERO {
                        break;
                    }
                }
                if product == C_ZERO {
                    continue;
                }
                for (z, tz) in tau.amplitudes().iter().enumerate() {
                    v[((a_flat * dims.r2 + b_flat) * dims.r3) * z_dim + z] = product * tz;
                }
            }
        }
        linalg::apply_trailing(&mut v, dims.c2, attack);
        // Project the tag register onto |k> and take the squared norm.
        let mut norm_sq = 0.0;
        for c2 in 0..dims.c2 {
            for r2 in 0..dims.r2 {
                for z in 0..z_dim {
                    norm_sq +=
                        v[((c2 * dims.r2 + r2) * dims.r3 + k) * z_dim + z].norm_sqr();
                }
            }
        }
        success += family.probability(k) * norm_sq;
    }
    Ok(BindingChainReport {
        overlap_sq: overlap * overlap,
        inverter_success: success,
    })
}

/// The statistical-hiding witness: a Stinespring dilation `U` of the key
/// identification measurement on the reveal copies, followed by copying the
/// outcome into the tag register in the computational basis and undoing `U`. Applied next to `Q_0|0>`,
/// it reproduces `Q_1|0>` up to the identification error; the report carries
/// the exact overlap `<0|<0|_Z Q_1^dag W Q_0|0>|0>_Z`, which equals
/// `sum_k Pr[k] (1 - eps_k)`.
#[derive(Debug, Clone)]
pub struct HidingWitnessReport {
    pub overlap: f64,
    pub expected_overlap: f64,
    pub ancilla_dim: usize,
}

pub fn hiding_witness(commitment: &CanonicalCommitment, cap: usize) -> Result<HidingWitnessReport> {
    let provenance = commitment
        .provenance()
        .ok_or(Error::ProvenanceMissing)?;
    let dims = provenance.dims;
    let family = &provenance.family;
    let keys = family.len();
    let t = dims.copies;

    // Square-root measurement over the t-copy reveal marginals, in the full
    // copy space (effects are needed as matrices for the dilation).
    let copies: Vec<DensityMatrix> = family
        .states()
        .iter()
        .map(|s| s.tensor_power(t, cap))
        .collect::<Result<_>>()?;
    let ensemble = Ensemble::uniform(copies.clone())?;
    let povm = pgm(&ensemble)?;
    let mut expected_overlap = 0.0;
    for (k, state) in copies.iter().enumerate() {
        let effect = povm
            .effect(&alloc::format!("{k}"))
            .expect("pgm emits one effect per label");
        expected_overlap += family.probability(k) * state.effect_probability(effect);
    }

    // Stinespring dilation on R2 (x) Z with Z indexing outcomes plus the
    // outside-support effect: U |phi>|0_Z> = sum_z (sqrt(E_z)|phi>) |z>.
    let z_dim = keys + 1;
    let r2 = dims.r2;
    let mut roots = Vec::with_capacity(z_dim);
    for (_, effect) in povm.effects() {
        let (root, _) = linalg::psd_sqrt_and_pinv(effect, SUPPORT_CUTOFF)?;
        roots.push(root);
    }
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(r2);
    for r in 0..r2 {
        let mut col = vec![C_ZERO; r2 * z_dim];
        for (z, root) in roots.iter().enumerate() {
            for rp in 0..r2 {
                col[rp * z_dim + z] = root.get(rp, r);
            }
        }
        columns.push(col);
    }
    // Columns for Z-input 0 sit at indices r * z_dim; complete the rest.
    let mut dilation = ComplexMatrix::zeros(r2 * z_dim, r2 * z_dim);
    {
        let mut ordered: Vec<Vec<Complex64>> = columns.clone();
        linalg::complete_orthonormal(&mut ordered, r2 * z_dim);
        // Reassemble so that constrained columns land where they belong and
        // fillers take the remaining column slots deterministically.
        let filler = ordered.split_off(r2);
        for (r, col) in ordered.into_iter().enumerate() {
            dilation.set_column(r * z_dim, &col);
        }
        let mut next = 0usize;
        for col_idx in 0..r2 * z_dim {
            if col_idx % z_dim == 0 && col_idx / z_dim < r2 {
                continue;
            }
            dilation.set_column(col_idx, &filler[next]);
            next += 1;
        }
        let dev = dilation.unitary_deviation();
        if dev > 1e-7 {
            return Err(Error::NotUnitary { deviation: dev });
        }
    }

    // Copy gate on (R3, Z): |r3>|z> -> |r3 + f(z) mod r3_dim>|z> with
    // f(z) = z for real outcomes and 0 for the outside-support slot.
    let r3 = dims.r3;
    let mut copy = ComplexMatrix::zeros(r3 * z_dim, r3 * z_dim);
    for r in 0..r3 {
        for z in 0..z_dim {
            let shift = if z < keys { z } else { 0 };
            let target = (r + shift) % r3;
            copy.set(target * z_dim + z, r * z_dim + z, Complex64::new(1.0, 0.0));
        }
    }

    // W = U^dag Copy U on (R2, R3, Z).
    let dims_rz = [r2, r3, z_dim];
    let u_full = linalg::embed_operator(&dims_rz, &[0, 2], &dilation);
    let copy_full = linalg::embed_operator(&dims_rz, &[1, 2], &copy);
    let witness = u_full.adjoint().mul(&copy_full).mul(&u_full);

    // Overlap <q1, 0_Z| (I_C (x) W) |q0, 0_Z>.
    let c_dim = dims.c1 * dims.c2;
    let q0 = commitment.commit_vector(0);
    let q1 = commitment.commit_vector(1);
    let rz = r2 * r3;
    let mut v = vec![C_ZERO; c_dim * rz * z_dim];
    for (cr, amp) in q0.iter().enumerate() {
        if *amp != C_ZERO {
            v[cr * z_dim] = *amp;
        }
    }
    linalg::apply_trailing(&mut v, c_dim, &witness);
    let mut overlap = C_ZERO;
    for (cr, amp) in q1.iter().enumerate() {
        if *amp != C_ZERO {
            overlap += amp.conj() * v[cr * z_dim];
        }
    }
    Ok(HidingWitnessReport {
        overlap: overlap.re,
        expected_overlap,
        ancilla_dim: z_dim,
    })
}

/// Random commitment for metric sweeps: independent Haar-ish unitaries on a
/// `C (x) R` split.
pub fn random_commitment(
    c_dim: usize,
    r_dim: usize,
    rng: &mut crate::rng::WbRng,
) -> Result<CanonicalCommitment> {
    let shape = RegisterShape::new(vec![("C", c_dim), ("R", r_dim)])?;
    let dim = c_dim * r_dim;
    CanonicalCommitment::new(
        shape,
        1,
        linalg::random_unitary(dim, rng),
        linalg::random_unitary(dim, rng),
    )
}
