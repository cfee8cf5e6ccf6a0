//! Classification of four-state orthonormal two-qubit alphabets by
//! entanglement type (pnm), pairwise evaluation of Mor's sequential-access
//! security condition, and screening for the known vulnerable types.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qstate::{concurrence, partial_trace, tensor_product, Cplx, PureState};
use crate::scalar::Scalar;

/// Four orthonormal two-qubit letter states with their bit-pair labels.
///
/// Labels are a bijection onto {00, 01, 10, 11}, stored as 0..=3; the default
/// assignment is letter i ↦ i.
#[derive(Debug, Clone)]
pub struct LetterBasis<T: Scalar> {
    states: [PureState<T>; 4],
    labels: [u8; 4],
}

impl<T: Scalar> LetterBasis<T> {
    pub fn new(states: [PureState<T>; 4], labels: [u8; 4]) -> Result<Self> {
        let tol = T::validation_tol();
        for s in &states {
            if s.dim() != 4 {
                return Err(Error::DimensionMismatch(
                    "letter states must be two-qubit states".into(),
                ));
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if states[i].inner(&states[j])?.norm() > tol {
                    return Err(Error::NotOrthonormal);
                }
            }
        }
        let mut seen = [false; 4];
        for &l in &labels {
            if l > 3 || seen[l as usize] {
                return Err(Error::InvalidParameter(
                    "labels must be a bijection onto the four bit pairs".into(),
                ));
            }
            seen[l as usize] = true;
        }
        Ok(Self { states, labels })
    }

    pub fn with_default_labels(states: [PureState<T>; 4]) -> Result<Self> {
        Self::new(states, [0, 1, 2, 3])
    }

    pub fn states(&self) -> &[PureState<T>; 4] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &PureState<T> {
        &self.states[i]
    }

    pub fn labels(&self) -> [u8; 4] {
        self.labels
    }

    /// The 202 basis: {|HH⟩, (|HV⟩+|VH⟩)/√2, (|HV⟩−|VH⟩)/√2, |VV⟩}.
    pub fn canonical_202() -> Self {
        let z = T::zero();
        let h = T::of(0.5).sqrt();
        let st = |a: [T; 4]| {
            PureState::new(a.iter().map(|&x| Cplx::new(x, z)).collect()).unwrap()
        };
        Self::with_default_labels([
            st([T::one(), z, z, z]),
            st([z, h, h, z]),
            st([z, h, -h, z]),
            st([z, z, z, T::one()]),
        ])
        .unwrap()
    }

    /// The 004 basis of the four Bell states {Φ⁺, Ψ⁺, Ψ⁻, Φ⁻}.
    pub fn bell_004() -> Self {
        let z = T::zero();
        let h = T::of(0.5).sqrt();
        let st = |a: [T; 4]| {
            PureState::new(a.iter().map(|&x| Cplx::new(x, z)).collect()).unwrap()
        };
        Self::with_default_labels([
            st([h, z, z, h]),
            st([z, h, h, z]),
            st([z, h, -h, z]),
            st([h, z, z, -h]),
        ])
        .unwrap()
    }

    /// The 400 example {|00⟩, |10⟩, |+1⟩, |−1⟩}.
    pub fn product_400() -> Self {
        let k0 = PureState::ket0();
        let k1 = PureState::ket1();
        Self::with_default_labels([
            tensor_product(&k0, &k0).unwrap(),
            tensor_product(&k1, &k0).unwrap(),
            tensor_product(&PureState::plus(), &k1).unwrap(),
            tensor_product(&PureState::minus(), &k1).unwrap(),
        ])
        .unwrap()
    }
}

/// Entanglement class of a single two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntanglementClass {
    Product,
    Nonmaximal,
    Maximal,
}

/// Counts of product / nonmaximally / maximally entangled members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PnmSignature {
    pub product: usize,
    pub nonmaximal: usize,
    pub maximal: usize,
}

impl fmt::Display for PnmSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.product, self.nonmaximal, self.maximal)
    }
}

/// Per-state classification detail behind a signature.
#[derive(Debug, Clone)]
pub struct Classification<T: Scalar> {
    pub signature: PnmSignature,
    pub concurrences: [T; 4],
    pub classes: [EntanglementClass; 4],
    /// Set for states whose concurrence sits within the threshold band of a
    /// class boundary (classified by nearest class).
    pub boundary_flags: [bool; 4],
}

/// Classify each letter by concurrence and count the pnm signature.
pub fn classify_pnm<T: Scalar>(b: &LetterBasis<T>) -> Result<Classification<T>> {
    let tol = T::class_tol();
    let band = tol * T::of(2.0);
    let mut concurrences = [T::zero(); 4];
    let mut classes = [EntanglementClass::Product; 4];
    let mut boundary_flags = [false; 4];
    let mut sig = PnmSignature {
        product: 0,
        nonmaximal: 0,
        maximal: 0,
    };
    for (i, s) in b.states().iter().enumerate() {
        let conc = concurrence(s)?;
        concurrences[i] = conc;
        classes[i] = if conc < tol {
            sig.product += 1;
            EntanglementClass::Product
        } else if conc > T::one() - tol {
            sig.maximal += 1;
            EntanglementClass::Maximal
        } else {
            sig.nonmaximal += 1;
            EntanglementClass::Nonmaximal
        };
        boundary_flags[i] =
            (conc - tol).abs() < band || ((T::one() - tol) - conc).abs() < band;
    }
    Ok(Classification {
        signature: sig,
        concurrences,
        classes,
        boundary_flags,
    })
}

/// Pairwise verdict of Mor's condition for one ordered pair i < j.
#[derive(Debug, Clone, Copy)]
pub struct MorPair {
    pub i: usize,
    pub j: usize,
    pub first_nonorthogonal: bool,
    pub first_nonidentical: bool,
    pub second_nonorthogonal: bool,
    pub satisfies: bool,
}

/// All six pairwise verdicts for a basis.
#[derive(Debug, Clone)]
pub struct MorReport {
    pub pairs: Vec<MorPair>,
}

impl MorReport {
    pub fn satisfying_pairs(&self) -> usize {
        self.pairs.iter().filter(|p| p.satisfies).count()
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&MorPair> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }
}

/// Evaluate Mor's condition on every pair: first-subsystem reductions must be
/// nonorthogonal and nonidentical, second-subsystem reductions nonorthogonal.
pub fn mor_condition<T: Scalar>(b: &LetterBasis<T>) -> Result<MorReport> {
    let tol = T::validation_tol();
    let dims = [2usize, 2];
    let reduced: Vec<_> = b
        .states()
        .iter()
        .map(|s| {
            let rho = s.projector();
            Ok((
                partial_trace(&rho, &[0], &dims)?,
                partial_trace(&rho, &[1], &dims)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            let (ref a1, ref a2) = reduced[i];
            let (ref b1, ref b2) = reduced[j];
            let first_nonorthogonal = a1.overlap(b1)? > tol;
            let first_nonidentical = a1.max_abs_diff(b1)? > tol;
            let second_nonorthogonal = a2.overlap(b2)? > tol;
            pairs.push(MorPair {
                i,
                j,
                first_nonorthogonal,
                first_nonidentical,
                second_nonorthogonal,
                satisfies: first_nonorthogonal && first_nonidentical && second_nonorthogonal,
            });
        }
    }
    Ok(MorReport { pairs })
}

/// Screening verdict for a candidate letter basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// 400 type: a local measurement on the second qubit leaks a bit
    /// without disturbance.
    VulnerableToLocalMeasurement,
    /// 004 type: an entangled-ancilla substitution leaks both bits
    /// without disturbance.
    VulnerableToAncillaSwap,
    CandidateSecure,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::VulnerableToLocalMeasurement => "vulnerable-to-local-measurement",
            Verdict::VulnerableToAncillaSwap => "vulnerable-to-ancilla-swap",
            Verdict::CandidateSecure => "candidate-secure",
        };
        f.write_str(s)
    }
}

/// Security screening result: pnm signature, verdict and the Mor report.
#[derive(Debug, Clone)]
pub struct ScreeningReport<T: Scalar> {
    pub classification: Classification<T>,
    pub verdict: Verdict,
    pub mor: MorReport,
}

/// Screen a basis against the two known vulnerable types.
pub fn screen_basis<T: Scalar>(b: &LetterBasis<T>) -> Result<ScreeningReport<T>> {
    let classification = classify_pnm(b)?;
    let sig = classification.signature;
    let verdict = if sig.product == 4 {
        Verdict::VulnerableToLocalMeasurement
    } else if sig.maximal == 4 {
        Verdict::VulnerableToAncillaSwap
    } else {
        Verdict::CandidateSecure
    };
    Ok(ScreeningReport {
        classification,
        verdict,
        mor: mor_condition(b)?,
    })
}

// ---------------------------------------------------------------------------
// Text format: four rows of eight reals (interleaved re/im) in the
// |HH⟩,|HV⟩,|VH⟩,|VV⟩ amplitude order.
// ---------------------------------------------------------------------------

/// Parse a basis document. Blank lines and `#` comments are ignored.
pub fn parse_letter_basis<T: Scalar>(text: &str) -> Result<LetterBasis<T>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 8 {
            return Err(Error::Parse(format!(
                "line {}: expected 8 reals (4 amplitudes, interleaved re/im), got {}",
                lineno + 1,
                vals.len()
            )));
        }
        let amps: Vec<Cplx<T>> = vals
            .chunks(2)
            .map(|c| Complex::new(T::of(c[0]), T::of(c[1])))
            .collect();
        rows.push(PureState::new(amps)?);
    }
    if rows.len() != 4 {
        return Err(Error::Parse(format!(
            "expected 4 letter rows, got {}",
            rows.len()
        )));
    }
    let states: [PureState<T>; 4] = rows.try_into().expect("length checked");
    LetterBasis::with_default_labels(states)
}

/// Render a basis in the same text format `parse_letter_basis` reads.
pub fn format_letter_basis<T: Scalar>(b: &LetterBasis<T>) -> String {
    let mut out = String::new();
    for s in b.states() {
        let row: Vec<String> = s
            .amplitudes()
            .iter()
            .flat_map(|a| [format!("{:?}", a.re.as_f64()), format!("{:?}", a.im.as_f64())])
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
