//! Exact state algebra for registers of up to four qubits: pure states,
//! density matrices, unitaries, projective measurements, reductions and
//! entropy/entanglement functionals.
//!
//! Qubit ordering is big-endian throughout the crate: qubit 0 is the most
//! significant factor of the register index.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Cplx<T> = Complex<T>;

pub const MAX_QUBITS: usize = 4;
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

fn checked_qubits(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { dim });
    }
    let qubits = dim.trailing_zeros() as usize;
    if dim > MAX_DIM {
        return Err(Error::RegisterTooLarge { qubits });
    }
    Ok(qubits)
}

/// Derive a reproducible random stream from one master seed.
///
/// Stream `k` of a given master seed is always the same sequence, regardless
/// of how many other streams were consumed before it; consumers that must not
/// correlate take distinct stream numbers.
pub fn derive_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

// ---------------------------------------------------------------------------
// PureState
// ---------------------------------------------------------------------------

/// Normalized pure state of a 1–4 qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Scalar> {
    qubits: usize,
    amps: Vec<Cplx<T>>,
}

impl<T: Scalar> PureState<T> {
    /// Build from amplitudes; the vector length must be a power of two ≤ 16
    /// and the state normalized within tolerance.
    pub fn new(amps: Vec<Cplx<T>>) -> Result<Self> {
        let qubits = checked_qubits(amps.len())?;
        let norm_sq: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::validation_tol() {
            return Err(Error::NotNormalized {
                norm_sq: norm_sq.as_f64(),
            });
        }
        Ok(Self { qubits, amps })
    }

    /// Build from possibly unnormalized amplitudes, rescaling to unit norm.
    pub fn normalized(amps: Vec<Cplx<T>>) -> Result<Self> {
        let qubits = checked_qubits(amps.len())?;
        let norm_sq: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= T::entropy_clip() {
            return Err(Error::NotNormalized {
                norm_sq: norm_sq.as_f64(),
            });
        }
        let inv = norm_sq.sqrt().recip();
        let amps = amps.into_iter().map(|a| a * inv).collect();
        Ok(Self { qubits, amps })
    }

    /// Computational basis state |index⟩ of a register.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        checked_qubits(dim)?;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amps = vec![Cplx::new(T::zero(), T::zero()); dim];
        amps[index] = Cplx::new(T::one(), T::zero());
        Ok(Self { qubits, amps })
    }

    pub fn ket0() -> Self {
        Self::basis(1, 0).unwrap()
    }

    pub fn ket1() -> Self {
        Self::basis(1, 1).unwrap()
    }

    pub fn plus() -> Self {
        let h = T::of(0.5).sqrt();
        Self::new(vec![Cplx::new(h, T::zero()), Cplx::new(h, T::zero())]).unwrap()
    }

    pub fn minus() -> Self {
        let h = T::of(0.5).sqrt();
        Self::new(vec![Cplx::new(h, T::zero()), Cplx::new(-h, T::zero())]).unwrap()
    }

    /// Single-qubit state cos θ|0⟩ + sin θ|1⟩.
    pub fn rotated(theta: T) -> Self {
        Self::normalized(vec![
            Cplx::new(theta.cos(), T::zero()),
            Cplx::new(theta.sin(), T::zero()),
        ])
        .unwrap()
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Cplx<T> {
        self.amps[index]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Cplx::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// |⟨self|other⟩|².
    pub fn overlap_prob(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        let dim = self.dim();
        let mut mat = vec![Cplx::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                mat[i * dim + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { dim, mat }
    }
}

/// Kronecker product of two register states.
pub fn tensor_product<T: Scalar>(a: &PureState<T>, b: &PureState<T>) -> Result<PureState<T>> {
    let dim = a.dim() * b.dim();
    checked_qubits(dim)?;
    let mut amps = Vec::with_capacity(dim);
    for x in a.amplitudes() {
        for y in b.amplitudes() {
            amps.push(*x * *y);
        }
    }
    PureState::new(amps)
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Hermitian, unit-trace, positive-semidefinite matrix (validated on build).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    dim: usize,
    mat: Vec<Cplx<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(dim: usize, mat: Vec<Cplx<T>>) -> Result<Self> {
        checked_qubits(dim)?;
        if mat.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} entries, expected {}",
                mat.len(),
                dim * dim
            )));
        }
        let tol = T::validation_tol();
        for i in 0..dim {
            for j in 0..dim {
                let d = mat[i * dim + j] - mat[j * dim + i].conj();
                if d.norm() > tol {
                    return Err(Error::NotHermitian);
                }
            }
        }
        let trace: Cplx<T> = (0..dim).map(|i| mat[i * dim + i]).fold(
            Cplx::new(T::zero(), T::zero()),
            |acc, x| acc + x,
        );
        if (trace.re - T::one()).abs() > tol || trace.im.abs() > tol {
            return Err(Error::BadTrace {
                trace: trace.re.as_f64(),
            });
        }
        let rho = Self { dim, mat };
        let min_eig = rho
            .eigenvalues()
            .into_iter()
            .fold(T::infinity(), |m, e| m.min(e));
        if min_eig < -tol {
            return Err(Error::NotPositiveSemidefinite {
                eig: min_eig.as_f64(),
            });
        }
        Ok(rho)
    }

    pub fn from_pure(psi: &PureState<T>) -> Self {
        psi.projector()
    }

    /// Convex mixture Σ pᵢ ρᵢ.
    pub fn mixture(probs: &[T], states: &[DensityMatrix<T>]) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::DimensionMismatch(
                "mixture weights and states differ in length".into(),
            ));
        }
        let dim = states[0].dim;
        if states.iter().any(|s| s.dim != dim) {
            return Err(Error::DimensionMismatch(
                "mixture members differ in dimension".into(),
            ));
        }
        let mut mat = vec![Cplx::new(T::zero(), T::zero()); dim * dim];
        for (p, s) in probs.iter().zip(states) {
            if *p < -T::validation_tol() {
                return Err(Error::InvalidDistribution(
                    "negative mixture weight".into(),
                ));
            }
            for (m, e) in mat.iter_mut().zip(&s.mat) {
                *m = *m + *e * *p;
            }
        }
        Self::new(dim, mat)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Cplx<T> {
        self.mat[i * self.dim + j]
    }

    pub fn matrix(&self) -> &[Cplx<T>] {
        &self.mat
    }

    /// Real eigenvalue spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.mat, self.dim)
    }

    /// Tr(ρσ); real for Hermitian arguments.
    pub fn overlap(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "overlap of different dimensions".into(),
            ));
        }
        let mut acc = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + (self.entry(i, j) * other.entry(j, i)).re;
            }
        }
        Ok(acc)
    }

    /// Entrywise max-norm distance to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "distance of different dimensions".into(),
            ));
        }
        Ok(self
            .mat
            .iter()
            .zip(&other.mat)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }
}

// ---------------------------------------------------------------------------
// UnitaryMap
// ---------------------------------------------------------------------------

/// Unitary matrix acting on a 1–4 qubit register (validated on build).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMap<T: Scalar> {
    dim: usize,
    mat: Vec<Cplx<T>>,
}

impl<T: Scalar> UnitaryMap<T> {
    pub fn new(dim: usize, mat: Vec<Cplx<T>>) -> Result<Self> {
        checked_qubits(dim)?;
        if mat.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} entries, expected {}",
                mat.len(),
                dim * dim
            )));
        }
        let tol = T::validation_tol();
        for i in 0..dim {
            for j in 0..dim {
                // (U·U†)_{ij}
                let mut acc = Cplx::new(T::zero(), T::zero());
                for k in 0..dim {
                    acc = acc + mat[i * dim + k] * mat[j * dim + k].conj();
                }
                let expect = if i == j { T::one() } else { T::zero() };
                if (acc - Cplx::new(expect, T::zero())).norm() > tol {
                    return Err(Error::NotUnitary);
                }
            }
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        checked_qubits(dim)?;
        let mut mat = vec![Cplx::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            mat[i * dim + i] = Cplx::new(T::one(), T::zero());
        }
        Ok(Self { dim, mat })
    }

    pub fn pauli_x() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(
            2,
            vec![
                Cplx::new(z, z),
                Cplx::new(o, z),
                Cplx::new(o, z),
                Cplx::new(z, z),
            ],
        )
        .unwrap()
    }

    pub fn pauli_y() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(
            2,
            vec![
                Cplx::new(z, z),
                Cplx::new(z, -o),
                Cplx::new(z, o),
                Cplx::new(z, z),
            ],
        )
        .unwrap()
    }

    pub fn pauli_z() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(
            2,
            vec![
                Cplx::new(o, z),
                Cplx::new(z, z),
                Cplx::new(z, z),
                Cplx::new(-o, z),
            ],
        )
        .unwrap()
    }

    /// Real rotation by θ in the single-qubit computational basis.
    pub fn rotation(theta: T) -> Self {
        let (c, s) = (theta.cos(), theta.sin());
        let z = T::zero();
        Self::new(
            2,
            vec![
                Cplx::new(c, z),
                Cplx::new(-s, z),
                Cplx::new(s, z),
                Cplx::new(c, z),
            ],
        )
        .unwrap()
    }

    /// Product of two unitaries: self ∘ other (other applied first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "composition of different dimensions".into(),
            ));
        }
        let d = self.dim;
        let mut mat = vec![Cplx::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = Cplx::new(T::zero(), T::zero());
                for k in 0..d {
                    acc = acc + self.mat[i * d + k] * other.mat[k * d + j];
                }
                mat[i * d + j] = acc;
            }
        }
        Ok(Self { dim: d, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Cplx<T>] {
        &self.mat
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

fn target_masks<T: Scalar>(state: &PureState<T>, targets: &[usize]) -> Result<Vec<usize>> {
    let n = state.qubits();
    let mut seen = [false; MAX_QUBITS];
    for &q in targets {
        if q >= n {
            return Err(Error::DimensionMismatch(format!(
                "target qubit {q} out of range for {n}-qubit register"
            )));
        }
        if seen[q] {
            return Err(Error::InvalidParameter(format!("duplicate target qubit {q}")));
        }
        seen[q] = true;
    }
    Ok(targets.iter().map(|&q| 1usize << (n - 1 - q)).collect())
}

fn embed(base: usize, masks: &[usize], sub: usize) -> usize {
    let k = masks.len();
    let mut idx = base;
    for (j, m) in masks.iter().enumerate() {
        if (sub >> (k - 1 - j)) & 1 == 1 {
            idx |= m;
        }
    }
    idx
}

/// Apply `u` to the listed target qubits (big-endian: `targets[0]` is the most
/// significant index of `u`); identity on all other qubits.
pub fn apply_unitary<T: Scalar>(
    state: &PureState<T>,
    u: &UnitaryMap<T>,
    targets: &[usize],
) -> Result<PureState<T>> {
    let masks = target_masks(state, targets)?;
    let subdim = 1usize << targets.len();
    if u.dim() != subdim {
        return Err(Error::DimensionMismatch(format!(
            "unitary dim {} does not match {} target qubits",
            u.dim(),
            targets.len()
        )));
    }
    let dim = state.dim();
    let full_mask: usize = masks.iter().sum();
    let mut out = vec![Cplx::new(T::zero(), T::zero()); dim];
    for base in 0..dim {
        if base & full_mask != 0 {
            continue;
        }
        for tout in 0..subdim {
            let mut acc = Cplx::new(T::zero(), T::zero());
            for tin in 0..subdim {
                acc = acc + u.mat[tout * subdim + tin] * state.amps[embed(base, &masks, tin)];
            }
            out[embed(base, &masks, tout)] = acc;
        }
    }
    PureState::new(out)
}

fn check_measurement_basis<T: Scalar>(basis: &[PureState<T>], subdim: usize) -> Result<()> {
    if basis.len() != subdim || basis.iter().any(|b| b.dim() != subdim) {
        return Err(Error::NotOrthonormal);
    }
    let tol = T::validation_tol();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let ip = a.inner(b)?;
            let expect = if i == j { T::one() } else { T::zero() };
            if (ip - Cplx::new(expect, T::zero())).norm() > tol {
                return Err(Error::NotOrthonormal);
            }
        }
    }
    Ok(())
}

/// One branch of a projective measurement on a subsystem.
#[derive(Debug, Clone)]
pub struct MeasurementBranch<T: Scalar> {
    pub outcome: usize,
    pub prob: T,
    /// Full register state after collapse (targets replaced by the outcome state).
    pub post: PureState<T>,
}

/// All outcome branches of measuring `targets` in the given orthonormal basis.
/// Branches with vanishing probability are omitted.
pub fn measurement_branches<T: Scalar>(
    state: &PureState<T>,
    basis: &[PureState<T>],
    targets: &[usize],
) -> Result<Vec<MeasurementBranch<T>>> {
    let masks = target_masks(state, targets)?;
    let subdim = 1usize << targets.len();
    check_measurement_basis(basis, subdim)?;
    let dim = state.dim();
    let full_mask: usize = masks.iter().sum();
    let mut branches = Vec::new();
    for (outcome, b) in basis.iter().enumerate() {
        let mut post = vec![Cplx::new(T::zero(), T::zero()); dim];
        let mut prob = T::zero();
        for base in 0..dim {
            if base & full_mask != 0 {
                continue;
            }
            // overlap of the target component with |b⟩ at this rest-configuration
            let mut alpha = Cplx::new(T::zero(), T::zero());
            for t in 0..subdim {
                alpha = alpha + b.amp(t).conj() * state.amps[embed(base, &masks, t)];
            }
            prob = prob + alpha.norm_sqr();
            for t in 0..subdim {
                post[embed(base, &masks, t)] = b.amp(t) * alpha;
            }
        }
        if prob > T::entropy_clip() {
            let inv = prob.sqrt().recip();
            let post = post.into_iter().map(|a| a * inv).collect();
            branches.push(MeasurementBranch {
                outcome,
                prob,
                post: PureState::new(post)?,
            });
        }
    }
    Ok(branches)
}

/// Outcome probabilities of measuring `targets` in the given basis, for every
/// outcome index (including zero-probability ones).
pub fn projective_probabilities<T: Scalar>(
    state: &PureState<T>,
    basis: &[PureState<T>],
    targets: &[usize],
) -> Result<Vec<T>> {
    let branches = measurement_branches(state, basis, targets)?;
    let mut probs = vec![T::zero(); basis.len()];
    for b in branches {
        probs[b.outcome] = b.prob;
    }
    Ok(probs)
}

fn sample_index<T: Scalar>(probs: &[(usize, T)], rng: &mut impl Rng) -> usize {
    // inverse-CDF over ascending outcome index; ties broken deterministically
    let u: f64 = rng.gen();
    let mut cdf = 0.0;
    for (idx, p) in probs {
        cdf += p.as_f64();
        if u < cdf {
            return *idx;
        }
    }
    probs.last().expect("nonempty distribution").0
}

/// Sample a projective measurement of `targets`; returns the outcome index and
/// the collapsed full-register state.
pub fn measure_subsystem<T: Scalar>(
    state: &PureState<T>,
    basis: &[PureState<T>],
    targets: &[usize],
    rng: &mut impl Rng,
) -> Result<(usize, PureState<T>)> {
    let branches = measurement_branches(state, basis, targets)?;
    let probs: Vec<(usize, T)> = branches.iter().map(|b| (b.outcome, b.prob)).collect();
    let picked = sample_index(&probs, rng);
    let branch = branches
        .into_iter()
        .find(|b| b.outcome == picked)
        .expect("sampled branch exists");
    Ok((branch.outcome, branch.post))
}

/// Sample a full-register projective measurement; the post state is the basis
/// state of the sampled outcome.
pub fn projective_measure<T: Scalar>(
    state: &PureState<T>,
    basis: &[PureState<T>],
    rng: &mut impl Rng,
) -> Result<(usize, PureState<T>)> {
    let targets: Vec<usize> = (0..state.qubits()).collect();
    measure_subsystem(state, basis, &targets, rng)
}

/// Trace out all factors not in `keep`. `dims` are the factor dimensions of
/// the register (product must equal the matrix dimension); `keep` is a
/// strictly increasing set of factor indices.
pub fn partial_trace<T: Scalar>(
    rho: &DensityMatrix<T>,
    keep: &[usize],
    dims: &[usize],
) -> Result<DensityMatrix<T>> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor dims product {} does not match matrix dim {}",
            total,
            rho.dim()
        )));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidParameter(
            "keep must be a strictly increasing set of factor indices".into(),
        ));
    }
    if keep.is_empty() {
        return Err(Error::InvalidParameter("keep must be nonempty".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
    let strides: Vec<usize> = (0..dims.len())
        .map(|f| dims[f + 1..].iter().product())
        .collect();
    let kept_dim: usize = keep.iter().map(|&f| dims[f]).product();
    let traced_dim: usize = traced.iter().map(|&f| dims[f]).product();

    // mixed-radix decomposition of a flat index over the given factor subset
    let expand = |flat: usize, factors: &[usize]| -> usize {
        let mut rem = flat;
        let mut idx = 0;
        for &f in factors.iter().rev() {
            idx += (rem % dims[f]) * strides[f];
            rem /= dims[f];
        }
        idx
    };

    let mut out = vec![Cplx::new(T::zero(), T::zero()); kept_dim * kept_dim];
    for a in 0..kept_dim {
        let ia = expand(a, keep);
        for b in 0..kept_dim {
            let ib = expand(b, keep);
            let mut acc = Cplx::new(T::zero(), T::zero());
            for t in 0..traced_dim.max(1) {
                let it = if traced.is_empty() { 0 } else { expand(t, &traced) };
                acc = acc + rho.entry(ia + it, ib + it);
            }
            out[a * kept_dim + b] = acc;
        }
    }
    DensityMatrix::new(kept_dim, out)
}

/// Von Neumann entropy −Tr(ρ log₂ ρ) in bits.
pub fn von_neumann_entropy<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let tol = T::validation_tol();
    let clip = T::entropy_clip();
    let mut s = T::zero();
    for e in rho.eigenvalues() {
        if e < -tol {
            return Err(Error::NotPositiveSemidefinite { eig: e.as_f64() });
        }
        if e > clip {
            s = s - e * e.log2();
        }
    }
    Ok(s.max(T::zero()))
}

/// Two-qubit concurrence from the Schmidt coefficients of the 2×2 amplitude
/// matrix: C = 2·s₀·s₁.
pub fn concurrence<T: Scalar>(psi: &PureState<T>) -> Result<T> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence requires a two-qubit state, got dim {}",
            psi.dim()
        )));
    }
    let a = psi.amplitudes();
    // Gram matrix of M = [[a0,a1],[a2,a3]]: singular values from trace/det
    let tr: T = a.iter().map(|x| x.norm_sqr()).sum();
    let det = (a[0] * a[3] - a[1] * a[2]).norm();
    let disc = (tr * tr - T::of(4.0) * det * det).max(T::zero()).sqrt();
    let s0 = ((tr + disc) * T::of(0.5)).max(T::zero()).sqrt();
    let s1 = ((tr - disc) * T::of(0.5)).max(T::zero()).sqrt();
    Ok((T::of(2.0) * s0 * s1).min(T::one()))
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic Jacobi with phase-folded rotations)
// ---------------------------------------------------------------------------

fn hermitian_eigenvalues<T: Scalar>(mat: &[Cplx<T>], n: usize) -> Vec<T> {
    let mut a = mat.to_vec();
    let scale = a
        .iter()
        .map(|x| x.norm())
        .fold(T::zero(), T::max)
        .max(T::one());
    let stop = T::epsilon() * scale * T::of(n as f64);
    for _ in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[p * n + q].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let m = apq.norm();
                if m <= stop * T::of(0.01) {
                    continue;
                }
                let phase = apq / m; // e^{iφ}
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (T::of(2.0) * m);
                let t = if tau >= T::zero() {
                    (tau + (T::one() + tau * tau).sqrt()).recip()
                } else {
                    -((-tau + (T::one() + tau * tau).sqrt()).recip())
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                // columns
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = arp * c - arq * phase.conj() * s;
                    a[r * n + q] = arp * s + arq * phase.conj() * c;
                }
                // rows (conjugate transform)
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = apr * c - aqr * phase * s;
                    a[q * n + r] = apr * s + aqr * phase * c;
                }
            }
        }
    }
    let mut eigs: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigs
}
