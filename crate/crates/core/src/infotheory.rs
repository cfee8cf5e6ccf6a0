//! Classical and quantum information functionals: Shannon entropy,
//! conditional entropy, mutual information, the Holevo bound and the QKD
//! efficiency metric, plus the efficiency table of known schemes.
//!
//! All entropies are in bits (log base 2).

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::qstate::{von_neumann_entropy, DensityMatrix};
use crate::scalar::Scalar;

/// Probability distribution over a finite alphabet.
#[derive(Debug, Clone)]
pub struct Distribution<T: Scalar> {
    probs: Vec<T>,
}

impl<T: Scalar> Distribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if probs.iter().any(|p| *p < -T::validation_tol()) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::validation_tol() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        let p = T::of(1.0 / n as f64);
        Self {
            probs: vec![p; n],
        }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }
}

/// Joint distribution p(x_i, y_j); rows index X, columns index Y.
#[derive(Debug, Clone)]
pub struct JointDistribution<T: Scalar> {
    rows: usize,
    cols: usize,
    probs: Vec<T>,
}

impl<T: Scalar> JointDistribution<T> {
    pub fn new(rows: usize, cols: usize, probs: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || probs.len() != rows * cols {
            return Err(Error::InvalidDistribution(
                "joint distribution shape mismatch".into(),
            ));
        }
        if probs.iter().any(|p| *p < -T::validation_tol()) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::validation_tol() {
            return Err(Error::InvalidDistribution(format!(
                "joint probabilities sum to {total}"
            )));
        }
        Ok(Self { rows, cols, probs })
    }

    pub fn prob(&self, x: usize, y: usize) -> T {
        self.probs[x * self.cols + y]
    }

    /// Marginal over X (summing out Y).
    pub fn marginal_x(&self) -> Vec<T> {
        (0..self.rows)
            .map(|x| (0..self.cols).map(|y| self.prob(x, y)).sum())
            .collect()
    }

    /// Marginal over Y (summing out X).
    pub fn marginal_y(&self) -> Vec<T> {
        (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.prob(x, y)).sum())
            .collect()
    }

    /// Joint with X and Y swapped.
    pub fn transposed(&self) -> Self {
        let mut probs = vec![T::zero(); self.probs.len()];
        for x in 0..self.rows {
            for y in 0..self.cols {
                probs[y * self.rows + x] = self.prob(x, y);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            probs,
        }
    }
}

/// Ensemble {p_i, ρ_i} of equally-dimensioned density matrices.
#[derive(Debug, Clone)]
pub struct EnsembleSpec<T: Scalar> {
    probs: Distribution<T>,
    states: Vec<DensityMatrix<T>>,
}

impl<T: Scalar> EnsembleSpec<T> {
    pub fn new(probs: Distribution<T>, states: Vec<DensityMatrix<T>>) -> Result<Self> {
        if probs.probs().len() != states.len() {
            return Err(Error::DimensionMismatch(
                "ensemble weights and states differ in length".into(),
            ));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "ensemble members differ in dimension".into(),
            ));
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &[T] {
        self.probs.probs()
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    pub fn mixture(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::mixture(self.probs.probs(), &self.states)
    }
}

/// Per-step resource accounting of a QKD scheme.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolCost<T: Scalar> {
    pub secret_bits: T,
    pub qubits: T,
    pub classical_bits: T,
}

impl<T: Scalar> ProtocolCost<T> {
    pub fn new(secret_bits: T, qubits: T, classical_bits: T) -> Result<Self> {
        if qubits + classical_bits <= T::zero() {
            return Err(Error::ZeroCostDenominator);
        }
        Ok(Self {
            secret_bits,
            qubits,
            classical_bits,
        })
    }
}

/// Efficiency value with a flag raised when it exceeds the Shannon+Holevo
/// ceiling of 1.
#[derive(Debug, Clone, Copy)]
pub struct Efficiency<T: Scalar> {
    pub value: T,
    pub exceeds_bound: bool,
}

fn plogp<T: Scalar>(p: T) -> T {
    if p > T::entropy_clip() {
        -(p * p.log2())
    } else {
        T::zero()
    }
}

/// Shannon entropy H = −Σ p log₂ p over the support.
pub fn shannon_entropy<T: Scalar>(d: &Distribution<T>) -> T {
    d.probs().iter().map(|&p| plogp(p)).sum()
}

/// H(X|Y) = Σ_j p(y_j) H(X | y_j); zero-probability columns contribute 0.
pub fn conditional_entropy<T: Scalar>(j: &JointDistribution<T>) -> T {
    let py = j.marginal_y();
    let mut h = T::zero();
    for (y, &pj) in py.iter().enumerate() {
        if pj <= T::entropy_clip() {
            continue;
        }
        for x in 0..j.rows {
            h = h + pj * plogp(j.prob(x, y) / pj);
        }
    }
    h
}

/// I(X:Y) = H(X) − H(X|Y).
pub fn mutual_information<T: Scalar>(j: &JointDistribution<T>) -> T {
    let hx: T = j.marginal_x().iter().map(|&p| plogp(p)).sum();
    hx - conditional_entropy(j)
}

/// Holevo quantity χ = S(Σ pᵢρᵢ) − Σ pᵢ S(ρᵢ).
pub fn holevo_chi<T: Scalar>(e: &EnsembleSpec<T>) -> Result<T> {
    let mixed = von_neumann_entropy(&e.mixture()?)?;
    let mut avg = T::zero();
    for (p, s) in e.probs().iter().zip(e.states()) {
        avg = avg + *p * von_neumann_entropy(s)?;
    }
    Ok(mixed - avg)
}

/// Efficiency ℰ = b_s / (q_t + b_t).
pub fn efficiency<T: Scalar>(c: &ProtocolCost<T>) -> Efficiency<T> {
    let value = c.secret_bits / (c.qubits + c.classical_bits);
    Efficiency {
        value,
        exceeds_bound: value > T::one() + T::validation_tol(),
    }
}

// ---------------------------------------------------------------------------
// Efficiency table of known QKD schemes
// ---------------------------------------------------------------------------

/// Whether a tabulated value is exact, an upper bound (≤), or a strict bound (<).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qualifier {
    Exact,
    UpperBound,
    StrictBound,
}

impl Qualifier {
    pub fn symbol(self) -> &'static str {
        match self {
            Qualifier::Exact => "",
            Qualifier::UpperBound => "<=",
            Qualifier::StrictBound => "<",
        }
    }
}

/// One scheme row: exact rational per-step costs plus a qualifier describing
/// how the efficiency value is to be read.
#[derive(Debug, Clone)]
pub struct SchemeRow {
    pub scheme: &'static str,
    pub secret_bits: Ratio<i64>,
    pub qubits: Ratio<i64>,
    pub classical_bits: Ratio<i64>,
    pub qualifier: Qualifier,
}

impl SchemeRow {
    /// ℰ recomputed from the row, kept as an exact rational.
    pub fn efficiency_ratio(&self) -> Ratio<i64> {
        self.secret_bits / (self.qubits + self.classical_bits)
    }

    pub fn efficiency_f64(&self) -> f64 {
        let e = self.efficiency_ratio();
        *e.numer() as f64 / *e.denom() as f64
    }

    /// Two-decimal display with the bound qualifier, e.g. `<0.25` or `<=0.33`.
    pub fn efficiency_display(&self) -> String {
        format!("{}{:.2}", self.qualifier.symbol(), self.efficiency_f64())
    }
}

/// Efficiency of well-known QKD schemes, from their per-step accounting.
/// Bound rows store the bounding value (B92 sends strictly fewer than 0.5
/// secret bits per step; Goldenberg–Vaidman spends at least one classical bit).
pub fn scheme_table() -> Vec<SchemeRow> {
    use Qualifier::*;
    let r = Ratio::new;
    vec![
        SchemeRow {
            scheme: "Bennett, 1992",
            secret_bits: r(1, 2),
            qubits: r(1, 1),
            classical_bits: r(1, 1),
            qualifier: StrictBound,
        },
        SchemeRow {
            scheme: "Bennett and Brassard, 1984",
            secret_bits: r(1, 2),
            qubits: r(1, 1),
            classical_bits: r(1, 1),
            qualifier: Exact,
        },
        SchemeRow {
            scheme: "Goldenberg and Vaidman, 1995",
            secret_bits: r(1, 1),
            qubits: r(2, 1),
            classical_bits: r(1, 1),
            qualifier: UpperBound,
        },
        SchemeRow {
            scheme: "Ekert, 1991",
            secret_bits: r(1, 1),
            qubits: r(1, 1),
            classical_bits: r(1, 1),
            qualifier: Exact,
        },
        SchemeRow {
            scheme: "Koashi and Imoto, 1997",
            secret_bits: r(1, 1),
            qubits: r(2, 1),
            classical_bits: r(0, 1),
            qualifier: Exact,
        },
        SchemeRow {
            scheme: "Cabello, 2000",
            secret_bits: r(2, 1),
            qubits: r(2, 1),
            classical_bits: r(1, 1),
            qualifier: Exact,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::PureState;

    type D = Distribution<f64>;
    type J = JointDistribution<f64>;

    #[test]
    fn shannon_entropy_values() {
        assert!((shannon_entropy(&D::new(vec![0.5, 0.5]).unwrap()) - 1.0).abs() < 1e-12);
        assert!(shannon_entropy(&D::new(vec![1.0, 0.0]).unwrap()).abs() < 1e-12);
        assert!(
            (shannon_entropy(&D::new(vec![0.9, 0.1]).unwrap()) - 0.4689955935892812).abs() < 1e-9
        );
    }

    #[test]
    fn shannon_entropy_rejects_negative() {
        assert!(D::new(vec![1.2, -0.2]).is_err());
    }

    #[test]
    fn conditional_entropy_values() {
        let correlated = J::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(conditional_entropy(&correlated).abs() < 1e-12);

        let independent = J::new(2, 2, vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        assert!((conditional_entropy(&independent) - 1.0).abs() < 1e-12);

        // binary symmetric channel, flip 1/4, uniform input
        let bsc = J::new(2, 2, vec![0.375, 0.125, 0.125, 0.375]).unwrap();
        assert!((conditional_entropy(&bsc) - 0.8112781244591328).abs() < 1e-9);
        assert!((mutual_information(&bsc) - 0.18872187554086717).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_extremes() {
        let independent = J::new(2, 2, vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        assert!(mutual_information(&independent).abs() < 1e-12);
        let correlated = J::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&correlated) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn holevo_chi_values() {
        // four equiprobable orthogonal two-qubit pure states: the Holevo limit
        let states: Vec<_> = (0..4)
            .map(|i| PureState::<f64>::basis(2, i).unwrap().projector())
            .collect();
        let e = EnsembleSpec::new(D::uniform(4), states).unwrap();
        assert!((holevo_chi(&e).unwrap() - 2.0).abs() < 1e-9);

        let e = EnsembleSpec::new(
            D::uniform(2),
            vec![
                PureState::<f64>::ket0().projector(),
                PureState::<f64>::ket1().projector(),
            ],
        )
        .unwrap();
        assert!((holevo_chi(&e).unwrap() - 1.0).abs() < 1e-9);

        let e = EnsembleSpec::new(
            D::uniform(2),
            vec![
                PureState::<f64>::ket0().projector(),
                PureState::<f64>::plus().projector(),
            ],
        )
        .unwrap();
        assert!((holevo_chi(&e).unwrap() - 0.6008760366928562).abs() < 1e-9);
    }

    #[test]
    fn efficiency_values() {
        let e = efficiency(&ProtocolCost::<f64>::new(0.5, 1.0, 1.0).unwrap());
        assert!((e.value - 0.25).abs() < 1e-12 && !e.exceeds_bound);
        let e = efficiency(&ProtocolCost::<f64>::new(2.0, 2.0, 1.0).unwrap());
        assert!((e.value - 2.0 / 3.0).abs() < 1e-12);
        let e = efficiency(&ProtocolCost::<f64>::new(2.0, 2.0, 0.0).unwrap());
        assert!((e.value - 1.0).abs() < 1e-12 && !e.exceeds_bound);
        let e = efficiency(&ProtocolCost::<f64>::new(3.0, 2.0, 0.0).unwrap());
        assert!(e.exceeds_bound);
        assert!(ProtocolCost::<f64>::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn efficiency_scale_invariance() {
        for lambda in [0.5f64, 2.0, 7.25] {
            let base = efficiency(&ProtocolCost::<f64>::new(2.0, 2.0, 1.0).unwrap());
            let scaled =
                efficiency(&ProtocolCost::new(2.0 * lambda, 2.0 * lambda, lambda).unwrap());
            assert!((base.value - scaled.value).abs() < 1e-12);
        }
    }

    #[test]
    fn scheme_table_matches_published_column() {
        let rows = scheme_table();
        let shown: Vec<String> = rows.iter().map(|r| r.efficiency_display()).collect();
        assert_eq!(shown, vec!["<0.25", "0.25", "<=0.33", "0.50", "0.50", "0.67"]);
        // exact rationals before rounding
        let r = Ratio::new;
        let exact: Vec<_> = rows.iter().map(|row| row.efficiency_ratio()).collect();
        assert_eq!(
            exact,
            vec![r(1, 4), r(1, 4), r(1, 3), r(1, 2), r(1, 2), r(2, 3)]
        );
        // and the float route through `efficiency` agrees
        for row in &rows {
            let as_f64 = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
            let cost = ProtocolCost::new(
                as_f64(row.secret_bits),
                as_f64(row.qubits),
                as_f64(row.classical_bits),
            )
            .unwrap();
            assert!((efficiency(&cost).value - row.efficiency_f64()).abs() < 1e-12);
        }
    }

    mod random_properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mutual_information_identities(raw in proptest::collection::vec(1e-3f64..1.0, 6)) {
                let total: f64 = raw.iter().sum();
                let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
                let j = J::new(2, 3, probs).unwrap();
                let i_xy = mutual_information(&j);
                let i_yx = mutual_information(&j.transposed());
                let hx = shannon_entropy(&D::new(j.marginal_x()).unwrap());
                let hy = shannon_entropy(&D::new(j.marginal_y()).unwrap());
                prop_assert!(i_xy >= -1e-9);
                prop_assert!((i_xy - i_yx).abs() < 1e-9);
                prop_assert!((i_xy - (hx - conditional_entropy(&j))).abs() < 1e-9);
                prop_assert!((i_xy - (hy - conditional_entropy(&j.transposed()))).abs() < 1e-9);
            }

            #[test]
            fn efficiency_scale_invariant_random(
                secret in 0.0f64..4.0,
                qubits in 0.1f64..4.0,
                classical in 0.0f64..4.0,
                lambda in 0.1f64..10.0,
            ) {
                let base = efficiency(&ProtocolCost::new(secret, qubits, classical).unwrap());
                let scaled = efficiency(
                    &ProtocolCost::new(secret * lambda, qubits * lambda, classical * lambda)
                        .unwrap(),
                );
                prop_assert!((base.value - scaled.value).abs() < 1e-9);
            }
        }
    }
}
