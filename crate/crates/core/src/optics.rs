//! Bosonic two-photon, four-mode simulation of the receiver's analyzer: a
//! polarization-independent 50/50 beam splitter followed by two polarizing
//! beam splitters routing onto four detectors.
//!
//! Mode order is fixed as (aH, aV, bH, bV): spatial port a carries qubit 1,
//! port b carries qubit 2. After the analyzer the four modes are the detector
//! modes (D1, D2, D3, D4).

use std::fmt;

use num_complex::Complex;
use rand::Rng;

use crate::basisclass::LetterBasis;
use crate::error::{Error, Result};
use crate::qstate::Cplx;
use crate::scalar::Scalar;

/// Number of optical modes.
pub const MODES: usize = 4;
/// Number of symmetric two-photon occupation states |1_i 1_j⟩, i ≤ j.
pub const PAIR_STATES: usize = 10;

/// Canonical index of the unordered mode pair (i, j), i ≤ j, in
/// lexicographic order: (0,0),(0,1),...,(3,3).
pub fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // offset of row i in the upper triangle
    i * MODES - i * (i + 1) / 2 + j
}

/// Inverse of [`pair_index`].
pub fn pair_modes(index: usize) -> (usize, usize) {
    let mut k = index;
    for i in 0..MODES {
        let row = MODES - i;
        if k < row {
            return (i, i + k);
        }
        k -= row;
    }
    panic!("pair index {index} out of range");
}

/// Two-photon state over the four modes, in the symmetric occupation basis.
///
/// Doubly-occupied amplitudes carry the bosonic √2 factor internally, so
/// every click probability is the squared amplitude.
#[derive(Debug, Clone)]
pub struct TwoPhotonState<T: Scalar> {
    amps: [Cplx<T>; PAIR_STATES],
}

impl<T: Scalar> TwoPhotonState<T> {
    pub fn new(amps: [Cplx<T>; PAIR_STATES]) -> Result<Self> {
        let norm_sq: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::validation_tol() {
            return Err(Error::NotNormalized {
                norm_sq: norm_sq.as_f64(),
            });
        }
        Ok(Self { amps })
    }

    pub fn amplitudes(&self) -> &[Cplx<T>; PAIR_STATES] {
        &self.amps
    }

    pub fn amp(&self, i: usize, j: usize) -> Cplx<T> {
        self.amps[pair_index(i, j)]
    }
}

/// 4×4 unitary acting on the mode creation operators.
#[derive(Debug, Clone)]
pub struct ModeTransform<T: Scalar> {
    mat: [[Cplx<T>; MODES]; MODES],
}

impl<T: Scalar> ModeTransform<T> {
    pub fn new(mat: [[Cplx<T>; MODES]; MODES]) -> Result<Self> {
        let tol = T::validation_tol();
        for i in 0..MODES {
            for j in 0..MODES {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..MODES {
                    acc = acc + mat[i][k] * mat[j][k].conj();
                }
                let expect = if i == j { T::one() } else { T::zero() };
                if (acc - Complex::new(expect, T::zero())).norm() > tol {
                    return Err(Error::NotUnitary);
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        let mut mat = [[z; MODES]; MODES];
        for (i, row) in mat.iter_mut().enumerate() {
            row[i] = o;
        }
        Self { mat }
    }

    /// Entry (out, in): the coefficient of output mode `out` in the image of
    /// input mode `in`'s creation operator.
    pub fn entry(&self, out: usize, input: usize) -> Cplx<T> {
        self.mat[out][input]
    }

    /// self ∘ other (other applied first).
    pub fn compose(&self, other: &Self) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let mut mat = [[z; MODES]; MODES];
        for i in 0..MODES {
            for j in 0..MODES {
                let mut acc = z;
                for k in 0..MODES {
                    acc = acc + self.mat[i][k] * other.mat[k][j];
                }
                mat[i][j] = acc;
            }
        }
        Self { mat }
    }
}

/// Detector label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Detector {
    D1,
    D2,
    D3,
    D4,
}

impl Detector {
    pub fn from_mode(mode: usize) -> Self {
        [Detector::D1, Detector::D2, Detector::D3, Detector::D4][mode]
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.index() + 1)
    }
}

/// Multiset of the two detector clicks of one analyzer shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClickPattern {
    first: Detector,
    second: Detector,
}

impl ClickPattern {
    pub fn new(a: Detector, b: Detector) -> Self {
        let (first, second) = if a <= b { (a, b) } else { (b, a) };
        Self { first, second }
    }

    pub fn detectors(self) -> (Detector, Detector) {
        (self.first, self.second)
    }

    pub fn is_double_click(self) -> bool {
        self.first == self.second
    }
}

impl fmt::Display for ClickPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

/// Map a letter state onto the two-photon mode representation: qubit 1 on
/// port a, qubit 2 on port b, H/V as the polarization of each.
pub fn encode_letter<T: Scalar>(index: usize, basis: &LetterBasis<T>) -> Result<TwoPhotonState<T>> {
    if index > 3 {
        return Err(Error::InvalidParameter(format!(
            "letter index {index} out of range"
        )));
    }
    let z = Complex::new(T::zero(), T::zero());
    let mut amps = [z; PAIR_STATES];
    let state = basis.state(index);
    for (qidx, &amp) in state.amplitudes().iter().enumerate() {
        // |xy⟩: x on port a (modes 0=H,1=V), y on port b (modes 2=H,3=V)
        let mode_a = (qidx >> 1) & 1;
        let mode_b = 2 + (qidx & 1);
        amps[pair_index(mode_a, mode_b)] = amps[pair_index(mode_a, mode_b)] + amp;
    }
    TwoPhotonState::new(amps)
}

/// The analyzer: 50/50 splitter mixing ports a and b (phase i on reflection),
/// then polarizing splitters routing H/V of the two output ports onto
/// detectors D1..D4 (D1 = port-1 H, D2 = port-1 V, D3 = port-2 H, D4 = port-2 V).
pub fn analyzer_transform<T: Scalar>() -> ModeTransform<T> {
    let z = T::zero();
    let h = T::of(0.5).sqrt();
    let t = Complex::new(h, z); // transmission
    let r = Complex::new(z, h); // reflection, phase i
    let o = Complex::new(z, z);
    // columns: input modes (aH, aV, bH, bV); rows: detector modes (D1..D4)
    ModeTransform::new([
        [t, o, r, o], // D1 <- aH transmitted, bH reflected
        [o, t, o, r], // D2 <- aV transmitted, bV reflected
        [r, o, t, o], // D3 <- aH reflected, bH transmitted
        [o, r, o, t], // D4 <- aV reflected, bV transmitted
    ])
    .expect("analyzer matrix is unitary")
}

/// Second-quantized lift of a mode transform to the two-photon state space.
pub fn apply_mode_transform<T: Scalar>(
    s: &TwoPhotonState<T>,
    t: &ModeTransform<T>,
) -> TwoPhotonState<T> {
    let z = Complex::new(T::zero(), T::zero());
    let sqrt2 = T::of(2.0).sqrt();
    let inv_sqrt2 = sqrt2.recip();
    // operator-polynomial coefficients alpha_{ij} of a_i† a_j†
    let mut alpha = [z; PAIR_STATES];
    for idx in 0..PAIR_STATES {
        let (i, j) = pair_modes(idx);
        alpha[idx] = if i == j {
            s.amps[idx] * inv_sqrt2
        } else {
            s.amps[idx]
        };
    }
    // substitute a_i† = Σ_k t[k][i] b_k† and collect symmetric coefficients
    let mut beta = [z; PAIR_STATES];
    for idx in 0..PAIR_STATES {
        let (i, j) = pair_modes(idx);
        if alpha[idx].norm_sqr() == T::zero() {
            continue;
        }
        for k in 0..MODES {
            for l in 0..MODES {
                let contrib = alpha[idx] * t.entry(k, i) * t.entry(l, j);
                beta[pair_index(k, l)] = beta[pair_index(k, l)] + contrib;
            }
        }
    }
    let mut amps = [z; PAIR_STATES];
    for idx in 0..PAIR_STATES {
        let (k, l) = pair_modes(idx);
        amps[idx] = if k == l { beta[idx] * sqrt2 } else { beta[idx] };
    }
    TwoPhotonState { amps }
}

/// Exact probability of each click pattern for a state in detector-mode space.
pub fn click_distribution<T: Scalar>(s: &TwoPhotonState<T>) -> Vec<(ClickPattern, T)> {
    (0..PAIR_STATES)
        .map(|idx| {
            let (i, j) = pair_modes(idx);
            (
                ClickPattern::new(Detector::from_mode(i), Detector::from_mode(j)),
                s.amps[idx].norm_sqr(),
            )
        })
        .collect()
}

/// Sample one click pattern (inverse-CDF in canonical pair order).
pub fn sample_click<T: Scalar>(s: &TwoPhotonState<T>, rng: &mut impl Rng) -> ClickPattern {
    let dist = click_distribution(s);
    let u: f64 = rng.gen();
    let mut cdf = 0.0;
    for (pattern, p) in &dist {
        cdf += p.as_f64();
        if u < cdf {
            return *pattern;
        }
    }
    dist.last().expect("nonempty distribution").0
}

/// Decode a click pattern into the discriminated letter index; `None` means a
/// pattern outside the four letters' supports (never produced by them).
pub fn discriminate(c: ClickPattern) -> Option<usize> {
    use Detector::*;
    match (c.first, c.second) {
        (D1, D1) | (D3, D3) => Some(0),
        (D1, D2) | (D3, D4) => Some(1),
        (D2, D3) | (D1, D4) => Some(2),
        (D2, D2) | (D4, D4) => Some(3),
        (D1, D3) | (D2, D4) => None,
        _ => unreachable!("patterns are stored in sorted order"),
    }
}

/// Convenience: exact click distribution of letter `index` after the analyzer.
pub fn analyze_letter<T: Scalar>(
    basis: &LetterBasis<T>,
    index: usize,
) -> Result<Vec<(ClickPattern, T)>> {
    let encoded = encode_letter(index, basis)?;
    Ok(click_distribution(&apply_mode_transform(
        &encoded,
        &analyzer_transform(),
    )))
}

/// Whether the analyzer unambiguously discriminates every letter of `basis`:
/// each click pattern a letter can produce must decode back to that letter.
pub fn discriminates_basis<T: Scalar>(basis: &LetterBasis<T>) -> Result<bool> {
    for letter in 0..4 {
        for (pattern, p) in analyze_letter(basis, letter)? {
            if p > T::validation_tol() && discriminate(pattern) != Some(letter) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
