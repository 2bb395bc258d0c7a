//! States, effects, and distances on small labeled tensor-product registers.
//!
//! A [`RegisterShape`] is an ordered list of labeled factors. Indices are
//! row-major with the first factor most significant, matching the Kronecker
//! product order, so `tensor` is shape concatenation plus `kron`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::rng::WbRng;
use crate::{Complex64, TOL_ASSERT};

pub use crate::linalg::psd_sqrt_and_pinv;

/// Ordered labeled tensor factors. The empty shape is the scalar space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterShape {
    factors: Vec<(String, usize)>,
}

impl RegisterShape {
    pub fn new<L: Into<String>>(factors: Vec<(L, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> = factors
            .into_iter()
            .map(|(l, d)| (l.into(), d))
            .collect();
        for (label, dim) in &factors {
            if *dim < 1 {
                return Err(Error::InvalidArgument(format!(
                    "factor {label:?} has dimension {dim}"
                )));
            }
        }
        for i in 0..factors.len() {
            for j in (i + 1)..factors.len() {
                if factors[i].0 == factors[j].0 {
                    return Err(Error::LabelCollision(factors[i].0.clone()));
                }
            }
        }
        Ok(RegisterShape { factors })
    }

    pub fn scalar() -> Self {
        RegisterShape { factors: Vec::new() }
    }

    /// Single factor shape.
    pub fn single<L: Into<String>>(label: L, dim: usize) -> Result<Self> {
        Self::new(vec![(label.into(), dim)])
    }

    /// `n` qubits labeled `prefix0..prefix{n-1}`.
    pub fn qubits(prefix: &str, n: usize) -> Self {
        RegisterShape {
            factors: (0..n).map(|i| (format!("{prefix}{i}"), 2)).collect(),
        }
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| *d).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|(l, _)| l == label)
    }

    /// Concatenation; labels must stay unique.
    pub fn concat(&self, other: &RegisterShape) -> Result<RegisterShape> {
        let mut factors = self.factors.clone();
        for (l, d) in &other.factors {
            if self.position(l).is_some() {
                return Err(Error::LabelCollision(l.clone()));
            }
            factors.push((l.clone(), *d));
        }
        Ok(RegisterShape { factors })
    }

    /// Relabels every factor as `{label}{suffix}`.
    pub fn suffixed(&self, suffix: &str) -> RegisterShape {
        RegisterShape {
            factors: self
                .factors
                .iter()
                .map(|(l, d)| (format!("{l}{suffix}"), *d))
                .collect(),
        }
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        format!("[{}]", parts.join(" "))
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.factors.len();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.factors[i + 1].1;
        }
        strides
    }
}

fn shape_mismatch(expected: &RegisterShape, found: &RegisterShape) -> Error {
    Error::ShapeMismatch {
        expected: expected.describe(),
        found: found.describe(),
    }
}

/// Unit-norm state vector on a labeled register.
#[derive(Debug, Clone)]
pub struct PureState {
    shape: Arc<RegisterShape>,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(shape: RegisterShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::LengthMismatch {
                left: shape.total_dim(),
                right: amplitudes.len(),
            });
        }
        let norm = libm::sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum());
        if (norm - 1.0).abs() > TOL_ASSERT {
            return Err(Error::NotNormalized {
                deviation: (norm - 1.0).abs(),
            });
        }
        Ok(PureState {
            shape: Arc::new(shape),
            amplitudes,
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(shape: RegisterShape, index: usize) -> Result<Self> {
        let dim = shape.total_dim();
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(PureState {
            shape: Arc::new(shape),
            amplitudes,
        })
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`; shapes must have equal dimension.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(shape_mismatch(&self.shape, &other.shape));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn overlap_sq(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, self.amplitudes[r] * self.amplitudes[c].conj());
            }
        }
        DensityMatrix {
            shape: Arc::clone(&self.shape),
            matrix: m,
        }
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let shape = self.shape.concat(&other.shape)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(PureState {
            shape: Arc::new(shape),
            amplitudes,
        })
    }

    /// `state^{tensor count}` with factor labels suffixed per copy.
    pub fn tensor_power(&self, count: usize, cap: usize) -> Result<PureState> {
        let dim = self.dim().checked_pow(count as u32).unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimCapExceeded { dim, cap });
        }
        let mut out = self.relabeled("#1");
        for copy in 2..=count {
            out = out.tensor(&self.relabeled(&format!("#{copy}")))?;
        }
        Ok(out)
    }

    pub fn relabeled(&self, suffix: &str) -> PureState {
        PureState {
            shape: Arc::new(self.shape.suffixed(suffix)),
            amplitudes: self.amplitudes.clone(),
        }
    }
}

/// Hermitian, unit-trace, PSD matrix on a labeled register.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    shape: Arc<RegisterShape>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Fully validated constructor: Hermitian, unit trace, and PSD within
    /// the module tolerances. The PSD check costs an eigendecomposition, so
    /// internal operations that preserve validity use `trusted`.
    pub fn new(shape: RegisterShape, matrix: ComplexMatrix) -> Result<Self> {
        let dim = shape.total_dim();
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::LengthMismatch {
                left: dim,
                right: matrix.rows(),
            });
        }
        let dev = matrix.hermitian_deviation();
        if dev > TOL_ASSERT {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TOL_ASSERT || trace.im.abs() > TOL_ASSERT {
            return Err(Error::NotNormalized {
                deviation: (trace - Complex64::new(1.0, 0.0)).norm(),
            });
        }
        let eig = linalg::hermitian_eigen(&matrix)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -TOL_ASSERT {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(DensityMatrix {
            shape: Arc::new(shape),
            matrix,
        })
    }

    /// Constructor for matrices already known to satisfy the invariants
    /// (outputs of validity-preserving operations). Debug builds still check.
    pub(crate) fn trusted(shape: Arc<RegisterShape>, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(shape.total_dim(), matrix.rows());
        debug_assert!(matrix.hermitian_deviation() <= 1e-7);
        debug_assert!((matrix.trace().re - 1.0).abs() <= 1e-7);
        DensityMatrix { shape, matrix }
    }

    /// Classical mixture in the computational basis.
    pub fn diagonal(shape: RegisterShape, probs: &[f64]) -> Result<Self> {
        let dim = shape.total_dim();
        if probs.len() != dim {
            return Err(Error::LengthMismatch {
                left: dim,
                right: probs.len(),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TOL_ASSERT {
            return Err(Error::NotNormalized {
                deviation: (total - 1.0).abs(),
            });
        }
        if let Some(p) = probs.iter().find(|p| **p < -TOL_ASSERT) {
            return Err(Error::NotPsd {
                min_eigenvalue: *p,
            });
        }
        let entries: Vec<Complex64> = probs.iter().map(|p| Complex64::new(*p, 0.0)).collect();
        Ok(DensityMatrix {
            shape: Arc::new(shape),
            matrix: ComplexMatrix::diagonal(&entries),
        })
    }

    pub fn maximally_mixed(shape: RegisterShape) -> Self {
        let dim = shape.total_dim();
        let probs = vec![1.0 / dim as f64; dim];
        Self::diagonal(shape, &probs).expect("uniform diagonal is valid")
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub(crate) fn shape_arc(&self) -> Arc<RegisterShape> {
        Arc::clone(&self.shape)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).trace().re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::hermitian_eigen(&self.matrix)?.values)
    }

    /// Kronecker product with concatenated shape.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let shape = self.shape.concat(&other.shape)?;
        Ok(DensityMatrix {
            shape: Arc::new(shape),
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// `rho^{tensor count}` with factor labels suffixed per copy.
    pub fn tensor_power(&self, count: usize, cap: usize) -> Result<DensityMatrix> {
        let dim = self.dim().checked_pow(count as u32).unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimCapExceeded { dim, cap });
        }
        let mut out = self.relabeled("#1");
        for copy in 2..=count {
            out = out.tensor(&self.relabeled(&format!("#{copy}")))?;
        }
        Ok(out)
    }

    pub fn relabeled(&self, suffix: &str) -> DensityMatrix {
        DensityMatrix {
            shape: Arc::new(self.shape.suffixed(suffix)),
            matrix: self.matrix.clone(),
        }
    }

    /// Traces out every factor not named in `keep`; kept factors stay in
    /// their original order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        for label in keep {
            if self.shape.position(label).is_none() {
                return Err(Error::UnknownLabel((*label).to_string()));
            }
        }
        let factors = self.shape.factors();
        let kept: Vec<usize> = (0..factors.len())
            .filter(|i| keep.contains(&factors[*i].0.as_str()))
            .collect();
        let traced: Vec<usize> = (0..factors.len()).filter(|i| !kept.contains(i)).collect();
        let strides = self.shape.strides();
        let kept_dims: Vec<usize> = kept.iter().map(|i| factors[*i].1).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|i| factors[*i].1).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced_dims.iter().product();

        // Flat offsets contributed by each kept / traced multi-index.
        let offsets = |dims: &[usize], positions: &[usize]| -> Vec<usize> {
            let total: usize = dims.iter().product();
            let mut out = Vec::with_capacity(total);
            for mut flat in 0..total {
                let mut offset = 0usize;
                for i in (0..dims.len()).rev() {
                    offset += (flat % dims[i]) * strides[positions[i]];
                    flat /= dims[i];
                }
                out.push(offset);
            }
            out
        };
        let kept_offsets = offsets(&kept_dims, &kept);
        let traced_offsets = offsets(&traced_dims, &traced);

        let dim = self.dim();
        let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
        for (r, roff) in kept_offsets.iter().enumerate() {
            for (c, coff) in kept_offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for toff in traced_offsets.iter().take(traced_dim) {
                    acc += self.matrix.data()[(roff + toff) * dim + (coff + toff)];
                }
                out.set(r, c, acc);
            }
        }
        let kept_factors: Vec<(String, usize)> = kept
            .iter()
            .map(|i| factors[*i].clone())
            .collect();
        Ok(DensityMatrix {
            shape: Arc::new(RegisterShape { factors: kept_factors }),
            matrix: out,
        })
    }

    /// Half the trace norm of the difference, in `[0, 1]`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(shape_mismatch(&self.shape, &other.shape));
        }
        let diff = self.matrix.sub(&other.matrix);
        let eig = linalg::hermitian_eigen(&diff)?;
        Ok(0.5 * eig.values.iter().map(|l| libm::fabs(*l)).sum::<f64>())
    }

    /// Uhlmann fidelity `F = ||sqrt(rho) sqrt(sigma)||_1^2`. Square roots
    /// drop eigenvalues below the support cutoff, and the trace norm goes
    /// through the Hermitian embedding, so null modes of either state do not
    /// amplify rounding noise.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(shape_mismatch(&self.shape, &other.shape));
        }
        let supported_sqrt = |l: f64| {
            if l > crate::SUPPORT_CUTOFF {
                libm::sqrt(l)
            } else {
                0.0
            }
        };
        let sqrt_a = linalg::hermitian_function(&self.matrix, supported_sqrt)?;
        let sqrt_b = linalg::hermitian_function(&other.matrix, supported_sqrt)?;
        let tn = linalg::trace_norm(&sqrt_a.mul(&sqrt_b))?;
        Ok((tn * tn).clamp(0.0, 1.0))
    }

    /// Expectation `Tr(E rho)` of an effect, clamped to `[0, 1]`.
    pub fn effect_probability(&self, effect: &ComplexMatrix) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let dim = self.dim();
        for r in 0..dim {
            for c in 0..dim {
                acc += effect.get(r, c) * self.matrix.get(c, r);
            }
        }
        acc.re.clamp(0.0, 1.0)
    }

    /// Diagonal in the computational basis (a probability vector).
    pub fn diagonal_probs(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.matrix.get(i, i).re.max(0.0))
            .collect()
    }

    /// Extracts the state vector of a rank-one density matrix. The global
    /// phase is fixed by making the largest-magnitude amplitude real and
    /// positive. Mixed inputs are rejected.
    pub fn as_pure(&self, tol: f64) -> Result<PureState> {
        let purity = self.purity();
        if (purity - 1.0).abs() > tol {
            return Err(Error::MixedState { purity });
        }
        let eig = linalg::hermitian_eigen(&self.matrix)?;
        let top = eig.values.len() - 1;
        let mut amps = eig.vectors.column(top);
        let (mut best, mut best_norm) = (0usize, 0.0);
        for (i, a) in amps.iter().enumerate() {
            if a.norm() > best_norm {
                best_norm = a.norm();
                best = i;
            }
        }
        let phase = amps[best].unscale(best_norm);
        for a in amps.iter_mut() {
            *a *= phase.conj();
        }
        PureState::new((*self.shape).clone(), amps)
    }

    /// Conjugation `U rho U^dagger` by a unitary on the full register.
    pub fn conjugate(&self, unitary: &ComplexMatrix) -> Result<DensityMatrix> {
        if unitary.rows() != self.dim() || unitary.cols() != self.dim() {
            return Err(Error::LengthMismatch {
                left: self.dim(),
                right: unitary.rows(),
            });
        }
        let m = unitary.mul(&self.matrix).mul(&unitary.adjoint());
        Ok(DensityMatrix {
            shape: Arc::clone(&self.shape),
            matrix: m,
        })
    }
}

/// Finite POVM: labeled PSD effects summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    shape: Arc<RegisterShape>,
    effects: Vec<(String, ComplexMatrix)>,
}

impl Povm {
    pub fn new(shape: RegisterShape, effects: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        let dim = shape.total_dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (label, effect) in &effects {
            if effect.rows() != dim || effect.cols() != dim {
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
            if min < -TOL_ASSERT {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                });
            }
            let _ = label;
            sum = sum.add(effect);
        }
        let dev = sum.sub(&ComplexMatrix::identity(dim)).max_norm();
        if dev > TOL_ASSERT {
            return Err(Error::InvalidArgument(format!(
                "effects sum deviates from identity by {dev:.3e}"
            )));
        }
        Ok(Povm {
            shape: Arc::new(shape),
            effects,
        })
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn effects(&self) -> &[(String, ComplexMatrix)] {
        &self.effects
    }

    pub fn effect(&self, label: &str) -> Option<&ComplexMatrix> {
        self.effects
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, e)| e)
    }

    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<(String, f64)>> {
        if rho.dim() != self.shape.total_dim() {
            return Err(shape_mismatch(&self.shape, rho.shape()));
        }
        Ok(self
            .effects
            .iter()
            .map(|(l, e)| (l.clone(), rho.effect_probability(e)))
            .collect())
    }
}

/// Pauli word `X^x Z^z = tensor_i X^{x_i} Z^{z_i}` on `n` qubits.
pub fn pauli_operator(x_bits: &[bool], z_bits: &[bool]) -> Result<ComplexMatrix> {
    if x_bits.len() != z_bits.len() {
        return Err(Error::LengthMismatch {
            left: x_bits.len(),
            right: z_bits.len(),
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = ComplexMatrix::identity(1);
    for (x, z) in x_bits.iter().zip(z_bits) {
        let single = match (x, z) {
            (false, false) => ComplexMatrix::identity(2),
            (true, false) => {
                ComplexMatrix::from_data(2, 2, vec![zero, one, one, zero]).unwrap()
            }
            (false, true) => {
                ComplexMatrix::from_data(2, 2, vec![one, zero, zero, -one]).unwrap()
            }
            // X Z = [[0, -1], [1, 0]]
            (true, true) => {
                ComplexMatrix::from_data(2, 2, vec![zero, -one, one, zero]).unwrap()
            }
        };
        out = out.kron(&single);
    }
    Ok(out)
}

/// `(1/sqrt(2^n)) sum_i |i>_A |i>_B`; both marginals maximally mixed.
pub fn maximally_entangled(n: usize, cap: usize) -> Result<PureState> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one qubit".to_string()));
    }
    let side = 1usize << n;
    let total = side * side;
    if total > cap {
        return Err(Error::DimCapExceeded { dim: total, cap });
    }
    let shape = RegisterShape::new(vec![("A", side), ("B", side)])?;
    let amp = Complex64::new(1.0 / libm::sqrt(side as f64), 0.0);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); total];
    for i in 0..side {
        amplitudes[i * side + i] = amp;
    }
    PureState::new(shape, amplitudes)
}

/// Haar-random pure state: normalized i.i.d. complex Gaussian vector.
pub fn haar_random_state(dim: usize, rng: &mut WbRng) -> PureState {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm > 1e-6 {
            let amplitudes = v.into_iter().map(|z| z.unscale(norm)).collect();
            return PureState {
                shape: Arc::new(
                    RegisterShape::single("q", dim).expect("single factor shape"),
                ),
                amplitudes,
            };
        }
    }
}

/// Haar-random density matrix of the given rank: mixture of a Haar state's
/// marginals. Used by test sweeps that need generic mixed states.
pub fn random_density(dim: usize, rank: usize, rng: &mut WbRng) -> DensityMatrix {
    let rank = rank.max(1);
    let mut m = ComplexMatrix::zeros(dim, dim);
    let mut weights = Vec::with_capacity(rank);
    let mut total = 0.0;
    for _ in 0..rank {
        let w = rng.uniform() + 1e-3;
        weights.push(w);
        total += w;
    }
    for w in &mut weights {
        *w /= total;
    }
    for w in weights {
        let psi = haar_random_state(dim, rng);
        for r in 0..dim {
            for c in 0..dim {
                let val = m.get(r, c)
                    + (psi.amplitudes[r] * psi.amplitudes[c].conj()).scale(w);
                m.set(r, c, val);
            }
        }
    }
    DensityMatrix::trusted(
        Arc::new(RegisterShape::single("q", dim).expect("single factor shape")),
        m,
    )
}

// ---------------------------------------------------------------------------
// Text serialization: header line `dims: d1 d2 ...`, then row-major entries
// as `re,im` pairs with 17 significant digits, one matrix row per line. Pure
// states are a single row.
// ---------------------------------------------------------------------------

fn write_entries(out: &mut String, entries: &[Complex64]) {
    for (i, z) in entries.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format!("{:.16e},{:.16e}", z.re, z.im));
    }
    out.push('\n');
}

pub fn serialize_matrix(shape: &RegisterShape, matrix: &ComplexMatrix) -> String {
    let mut out = String::from("dims:");
    for d in shape.dims() {
        out.push_str(&format!(" {d}"));
    }
    out.push('\n');
    for r in 0..matrix.rows() {
        let row: Vec<Complex64> = (0..matrix.cols()).map(|c| matrix.get(r, c)).collect();
        write_entries(&mut out, &row);
    }
    out
}

pub fn serialize_pure(state: &PureState) -> String {
    let mut out = String::from("dims:");
    for d in state.shape.dims() {
        out.push_str(&format!(" {d}"));
    }
    out.push('\n');
    write_entries(&mut out, &state.amplitudes);
    out
}

fn parse_dims(line: &str) -> Result<Vec<usize>> {
    let rest = line
        .strip_prefix("dims:")
        .ok_or_else(|| Error::ParseError(format!("expected dims header, got {line:?}")))?;
    let mut dims = Vec::new();
    for tok in rest.split_whitespace() {
        dims.push(
            tok.parse::<usize>()
                .map_err(|_| Error::ParseError(format!("bad dimension {tok:?}")))?,
        );
    }
    if dims.is_empty() {
        return Err(Error::ParseError("empty dims header".to_string()));
    }
    Ok(dims)
}

fn parse_entries(line: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for tok in line.split_whitespace() {
        let (re, im) = tok
            .split_once(',')
            .ok_or_else(|| Error::ParseError(format!("bad entry {tok:?}")))?;
        let re: f64 = re
            .parse()
            .map_err(|_| Error::ParseError(format!("bad real part {re:?}")))?;
        let im: f64 = im
            .parse()
            .map_err(|_| Error::ParseError(format!("bad imag part {im:?}")))?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn default_shape(dims: &[usize]) -> RegisterShape {
    RegisterShape {
        factors: dims
            .iter()
            .enumerate()
            .map(|(i, d)| (format!("r{i}"), *d))
            .collect(),
    }
}

/// Parses the matrix text format. Labels are synthesized as `r0 r1 ...`
/// since the format records only dimensions.
pub fn parse_matrix(text: &str) -> Result<(RegisterShape, ComplexMatrix)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let dims = parse_dims(
        lines
            .next()
            .ok_or_else(|| Error::ParseError("empty input".to_string()))?,
    )?;
    let shape = default_shape(&dims);
    let dim = shape.total_dim();
    let mut data = Vec::with_capacity(dim * dim);
    for line in lines {
        data.extend(parse_entries(line)?);
    }
    let matrix = ComplexMatrix::from_data(dim, dim, data)?;
    Ok((shape, matrix))
}

pub fn parse_pure(text: &str) -> Result<PureState> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let dims = parse_dims(
        lines
            .next()
            .ok_or_else(|| Error::ParseError("empty input".to_string()))?,
    )?;
    let shape = default_shape(&dims);
    let mut amplitudes = Vec::new();
    for line in lines {
        amplitudes.extend(parse_entries(line)?);
    }
    PureState::new(shape, amplitudes)
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    let (shape, matrix) = parse_matrix(text)?;
    DensityMatrix::new(shape, matrix)
}
