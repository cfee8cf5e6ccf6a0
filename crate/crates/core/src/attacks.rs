//! Eve's strategy catalog under the sequential-access constraint and an exact
//! calculator of information gain and per-test detection probability.
//!
//! The register layout is fixed: qubit 0 is travel qubit 1, qubit 1 is travel
//! qubit 2, qubits 2..=3 are Eve's optional ancillas. Stage 1 runs while Eve
//! holds travel qubit 1 (travel qubit 2 is out of reach); stage 2 runs after
//! she has forwarded a qubit in its place and received travel qubit 2. The
//! constructor rejects any program that violates these access sets, so a
//! joint measurement on both travel qubits before forwarding is
//! unrepresentable.

use std::collections::BTreeMap;

use rand::Rng;

use crate::basisclass::LetterBasis;
use crate::error::{Error, Result};
use crate::infotheory::{mutual_information, JointDistribution};
use crate::qstate::{
    apply_unitary, measurement_branches, tensor_product, PureState, UnitaryMap,
};
use crate::scalar::Scalar;

pub const TRAVEL_1: usize = 0;
pub const TRAVEL_2: usize = 1;
pub const MAX_ANCILLAS: usize = 2;

/// One operation of a stage program. Targets are global register indices.
#[derive(Debug, Clone)]
pub enum StageOp<T: Scalar> {
    Unitary {
        u: UnitaryMap<T>,
        targets: Vec<usize>,
    },
    /// Projective measurement; the outcome index is appended to Eve's record.
    Measure {
        basis: Vec<PureState<T>>,
        targets: Vec<usize>,
    },
    /// Apply `cases[outcome]` where `outcome` is the result of the
    /// `record`-th measurement executed so far.
    Conditional {
        record: usize,
        cases: Vec<UnitaryMap<T>>,
        targets: Vec<usize>,
    },
}

impl<T: Scalar> StageOp<T> {
    fn targets(&self) -> &[usize] {
        match self {
            StageOp::Unitary { targets, .. }
            | StageOp::Measure { targets, .. }
            | StageOp::Conditional { targets, .. } => targets,
        }
    }
}

/// A stage program: operations on the accessible qubits, then the
/// designation of the qubit forwarded onward.
#[derive(Debug, Clone)]
pub struct StageProgram<T: Scalar> {
    pub ops: Vec<StageOp<T>>,
    pub forward: usize,
}

/// Final measurement on Eve's retained qubits, feeding her letter guess.
#[derive(Debug, Clone)]
pub struct FinalMeasurement<T: Scalar> {
    pub basis: Vec<PureState<T>>,
    pub targets: Vec<usize>,
}

/// A complete, validated eavesdropping program.
#[derive(Debug, Clone)]
pub struct AttackStrategy<T: Scalar> {
    name: String,
    ancilla: Option<PureState<T>>,
    stage1: StageProgram<T>,
    stage2: StageProgram<T>,
    final_guess: Option<FinalMeasurement<T>>,
}

impl<T: Scalar> AttackStrategy<T> {
    pub fn new(
        name: impl Into<String>,
        ancilla: Option<PureState<T>>,
        stage1: StageProgram<T>,
        stage2: StageProgram<T>,
        final_guess: Option<FinalMeasurement<T>>,
    ) -> Result<Self> {
        let ancilla_qubits = ancilla.as_ref().map_or(0, |a| a.qubits());
        if ancilla_qubits > MAX_ANCILLAS {
            return Err(Error::InvalidAttack(format!(
                "{ancilla_qubits} ancilla qubits exceed the limit of {MAX_ANCILLAS}"
            )));
        }
        let total = 2 + ancilla_qubits;

        let mut accessible1: Vec<usize> = vec![TRAVEL_1];
        accessible1.extend(2..total);
        let mut measure_count = 0usize;
        check_stage(&stage1, &accessible1, "stage 1", &mut measure_count)?;

        let mut accessible2: Vec<usize> = vec![TRAVEL_2];
        accessible2.extend(accessible1.iter().copied().filter(|&q| q != stage1.forward));
        check_stage(&stage2, &accessible2, "stage 2", &mut measure_count)?;

        if let Some(fin) = &final_guess {
            let retained: Vec<usize> = (0..total)
                .filter(|&q| q != stage1.forward && q != stage2.forward)
                .collect();
            for &t in &fin.targets {
                if !retained.contains(&t) {
                    return Err(Error::InvalidAttack(format!(
                        "final measurement touches qubit {t}, which Eve no longer holds"
                    )));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            ancilla,
            stage1,
            stage2,
            final_guess,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ancilla(&self) -> Option<&PureState<T>> {
        self.ancilla.as_ref()
    }

    pub fn register_qubits(&self) -> usize {
        2 + self.ancilla.as_ref().map_or(0, |a| a.qubits())
    }

    /// Global indices of the qubits Bob receives, in (qubit 1, qubit 2) order.
    pub fn forwarded(&self) -> [usize; 2] {
        [self.stage1.forward, self.stage2.forward]
    }

    /// Identity strategy: both qubits pass untouched.
    pub fn no_attack() -> Self {
        Self::new(
            "no-attack",
            None,
            StageProgram {
                ops: vec![],
                forward: TRAVEL_1,
            },
            StageProgram {
                ops: vec![],
                forward: TRAVEL_2,
            },
            None,
        )
        .expect("identity program is valid")
    }

    /// Let qubit 1 pass, measure qubit 2 in the computational basis and
    /// resend the eigenstate.
    pub fn local_measure_qubit_2() -> Self {
        Self::new(
            "local-measure-2",
            None,
            StageProgram {
                ops: vec![],
                forward: TRAVEL_1,
            },
            StageProgram {
                ops: vec![StageOp::Measure {
                    basis: vec![PureState::ket0(), PureState::ket1()],
                    targets: vec![TRAVEL_2],
                }],
                forward: TRAVEL_2,
            },
            None,
        )
        .expect("program is valid")
    }

    /// Substitute half of Eve's own maximally entangled pair for qubit 1;
    /// after qubit 2 arrives, measure the original pair in the Bell basis and
    /// apply the Pauli correction mapping Eve's pair onto the observed Bell
    /// state before forwarding its other half.
    pub fn ancilla_swap() -> Self {
        let bell = LetterBasis::bell_004();
        let correction = |u: UnitaryMap<T>| u;
        Self::new(
            "ancilla-swap",
            Some(bell.state(0).clone()), // ancilla pair (qubits 2,3) in the first Bell state
            StageProgram {
                ops: vec![],
                forward: 2,
            },
            StageProgram {
                ops: vec![
                    StageOp::Measure {
                        basis: bell.states().to_vec(),
                        targets: vec![TRAVEL_1, TRAVEL_2],
                    },
                    StageOp::Conditional {
                        record: 0,
                        cases: vec![
                            correction(UnitaryMap::identity(2).unwrap()),
                            correction(UnitaryMap::pauli_x()),
                            correction(UnitaryMap::pauli_z().compose(&UnitaryMap::pauli_x()).unwrap()),
                            correction(UnitaryMap::pauli_z()),
                        ],
                        targets: vec![3],
                    },
                ],
                forward: 3,
            },
            None,
        )
        .expect("program is valid")
    }

    /// Measure each travel qubit in a rotated local basis (angle from the
    /// computational basis) and resend the eigenstate; `None` lets the qubit
    /// pass untouched.
    pub fn intercept_resend(theta1: Option<T>, theta2: Option<T>) -> Self {
        let rotated_basis = |theta: T| {
            vec![
                PureState::rotated(theta),
                PureState::rotated(theta + T::of(std::f64::consts::FRAC_PI_2)),
            ]
        };
        let stage_ops = |theta: Option<T>, target: usize| match theta {
            Some(t) => vec![StageOp::Measure {
                basis: rotated_basis(t),
                targets: vec![target],
            }],
            None => vec![],
        };
        let describe = |theta: Option<T>| match theta {
            Some(t) => format!("{:.6}", t.as_f64()),
            None => "pass".into(),
        };
        Self::new(
            format!(
                "intercept-resend(theta1={}, theta2={})",
                describe(theta1),
                describe(theta2)
            ),
            None,
            StageProgram {
                ops: stage_ops(theta1, TRAVEL_1),
                forward: TRAVEL_1,
            },
            StageProgram {
                ops: stage_ops(theta2, TRAVEL_2),
                forward: TRAVEL_2,
            },
            None,
        )
        .expect("program is valid")
    }
}

fn check_stage<T: Scalar>(
    stage: &StageProgram<T>,
    accessible: &[usize],
    label: &str,
    measure_count: &mut usize,
) -> Result<()> {
    for op in &stage.ops {
        for &t in op.targets() {
            if !accessible.contains(&t) {
                return Err(Error::InvalidAttack(format!(
                    "{label} touches qubit {t}, outside its accessible set {accessible:?}"
                )));
            }
        }
        match op {
            StageOp::Measure { .. } => *measure_count += 1,
            StageOp::Conditional { record, cases, .. } => {
                if *record >= *measure_count {
                    return Err(Error::InvalidAttack(format!(
                        "{label} conditions on measurement record {record} before it exists"
                    )));
                }
                if cases.is_empty() {
                    return Err(Error::InvalidAttack(
                        "conditional operation with no cases".into(),
                    ));
                }
            }
            StageOp::Unitary { .. } => {}
        }
    }
    if !accessible.contains(&stage.forward) {
        return Err(Error::InvalidAttack(format!(
            "{label} forwards qubit {}, outside its accessible set {accessible:?}",
            stage.forward
        )));
    }
    Ok(())
}

/// Built-in strategies: identity, the two canonical no-disturbance attacks,
/// and a computational-basis intercept-resend instance.
pub fn catalog<T: Scalar>() -> Vec<AttackStrategy<T>> {
    vec![
        AttackStrategy::no_attack(),
        AttackStrategy::local_measure_qubit_2(),
        AttackStrategy::ancilla_swap(),
        AttackStrategy::intercept_resend(Some(T::zero()), Some(T::zero())),
    ]
}

/// Look up a built-in strategy by its catalog name.
pub fn by_name<T: Scalar>(name: &str) -> Option<AttackStrategy<T>> {
    match name {
        "no-attack" | "none" => Some(AttackStrategy::no_attack()),
        "local-measure-2" => Some(AttackStrategy::local_measure_qubit_2()),
        "ancilla-swap" => Some(AttackStrategy::ancilla_swap()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// One exact evolution branch of Eve's program on a given letter state.
#[derive(Debug, Clone)]
pub struct EveBranch<T: Scalar> {
    pub prob: T,
    pub record: Vec<usize>,
    pub state: PureState<T>,
}

fn apply_op_exact<T: Scalar>(
    branches: Vec<EveBranch<T>>,
    op: &StageOp<T>,
) -> Result<Vec<EveBranch<T>>> {
    let mut out = Vec::new();
    for br in branches {
        match op {
            StageOp::Unitary { u, targets } => {
                out.push(EveBranch {
                    state: apply_unitary(&br.state, u, targets)?,
                    ..br
                });
            }
            StageOp::Measure { basis, targets } => {
                for mb in measurement_branches(&br.state, basis, targets)? {
                    let mut record = br.record.clone();
                    record.push(mb.outcome);
                    out.push(EveBranch {
                        prob: br.prob * mb.prob,
                        record,
                        state: mb.post,
                    });
                }
            }
            StageOp::Conditional {
                record,
                cases,
                targets,
            } => {
                let outcome = *br.record.get(*record).ok_or_else(|| {
                    Error::InvalidAttack(format!("missing measurement record {record}"))
                })?;
                let u = cases.get(outcome).ok_or_else(|| {
                    Error::InvalidAttack(format!(
                        "no conditional case for outcome {outcome}"
                    ))
                })?;
                out.push(EveBranch {
                    state: apply_unitary(&br.state, u, targets)?,
                    ..br
                });
            }
        }
    }
    Ok(out)
}

/// Exactly enumerate every branch of the attack applied to one letter state
/// (stage 1, stage 2, then the final-guess measurement).
pub fn enumerate_branches<T: Scalar>(
    strategy: &AttackStrategy<T>,
    letter_state: &PureState<T>,
) -> Result<Vec<EveBranch<T>>> {
    let full = match strategy.ancilla() {
        Some(anc) => tensor_product(letter_state, anc)?,
        None => letter_state.clone(),
    };
    let mut branches = vec![EveBranch {
        prob: T::one(),
        record: vec![],
        state: full,
    }];
    for op in &strategy.stage1.ops {
        branches = apply_op_exact(branches, op)?;
    }
    for op in &strategy.stage2.ops {
        branches = apply_op_exact(branches, op)?;
    }
    if let Some(fin) = &strategy.final_guess {
        branches = apply_op_exact(
            branches,
            &StageOp::Measure {
                basis: fin.basis.clone(),
                targets: fin.targets.clone(),
            },
        )?;
    }
    Ok(branches)
}

/// Sample one path through the attack (used by the protocol engine); returns
/// Eve's measurement record and the post-attack full register state.
pub fn sample_execution<T: Scalar>(
    strategy: &AttackStrategy<T>,
    letter_state: &PureState<T>,
    rng: &mut impl Rng,
) -> Result<(Vec<usize>, PureState<T>)> {
    let branches = enumerate_branches_sampled(strategy, letter_state, rng)?;
    Ok(branches)
}

fn enumerate_branches_sampled<T: Scalar>(
    strategy: &AttackStrategy<T>,
    letter_state: &PureState<T>,
    rng: &mut impl Rng,
) -> Result<(Vec<usize>, PureState<T>)> {
    use crate::qstate::measure_subsystem;
    let mut state = match strategy.ancilla() {
        Some(anc) => tensor_product(letter_state, anc)?,
        None => letter_state.clone(),
    };
    let mut record = Vec::new();
    let all_ops = strategy
        .stage1
        .ops
        .iter()
        .chain(&strategy.stage2.ops)
        .cloned()
        .collect::<Vec<_>>();
    let final_op = strategy.final_guess.as_ref().map(|fin| StageOp::Measure {
        basis: fin.basis.clone(),
        targets: fin.targets.clone(),
    });
    for op in all_ops.iter().chain(final_op.iter()) {
        match op {
            StageOp::Unitary { u, targets } => {
                state = apply_unitary(&state, u, targets)?;
            }
            StageOp::Measure { basis, targets } => {
                let (outcome, post) = measure_subsystem(&state, basis, targets, rng)?;
                record.push(outcome);
                state = post;
            }
            StageOp::Conditional {
                record: rec,
                cases,
                targets,
            } => {
                let outcome = *record.get(*rec).ok_or_else(|| {
                    Error::InvalidAttack(format!("missing measurement record {rec}"))
                })?;
                let u = cases.get(outcome).ok_or_else(|| {
                    Error::InvalidAttack(format!("no conditional case for outcome {outcome}"))
                })?;
                state = apply_unitary(&state, u, targets)?;
            }
        }
    }
    Ok((record, state))
}

// ---------------------------------------------------------------------------
// Exact statistics
// ---------------------------------------------------------------------------

/// Exact information gain and detection statistics of a (basis, strategy) pair.
#[derive(Debug, Clone)]
pub struct EveStats<T: Scalar> {
    /// Mutual information between the sent letter and Eve's maximum-likelihood
    /// guess, in bits.
    pub info_gain: T,
    /// Per-tested-pair probability that Bob's inferred letter differs from
    /// the sent one, averaged over equiprobable letters.
    pub detect_prob: T,
    /// Per-letter detail: probability Bob reads the letter correctly, and
    /// Eve's guess distribution.
    pub per_letter: [LetterOutcome<T>; 4],
    /// Deterministic map from Eve's measurement record to her ML guess.
    pub guess_map: BTreeMap<Vec<usize>, usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct LetterOutcome<T: Scalar> {
    pub p_bob_correct: T,
    pub guess_dist: [T; 4],
}

impl<T: Scalar> Default for LetterOutcome<T> {
    fn default() -> Self {
        Self {
            p_bob_correct: T::zero(),
            guess_dist: [T::zero(); 4],
        }
    }
}

/// Exact evolution of all four equiprobable letters through the attack and
/// Bob's letter-basis measurement, enumerating every measurement branch.
pub fn exact_eve_stats<T: Scalar>(
    basis: &LetterBasis<T>,
    strategy: &AttackStrategy<T>,
) -> Result<EveStats<T>> {
    let [f1, f2] = strategy.forwarded();
    let quarter = T::of(0.25);
    // joint probability of (letter, Eve record)
    let mut record_joint: BTreeMap<Vec<usize>, [T; 4]> = BTreeMap::new();
    let mut detect = T::zero();
    let mut per_letter: [LetterOutcome<T>; 4] = Default::default();

    for letter in 0..4 {
        for br in enumerate_branches(strategy, basis.state(letter))? {
            let probs = crate::qstate::projective_probabilities(
                &br.state,
                basis.states(),
                &[f1, f2],
            )?;
            let p_correct = probs[letter];
            detect = detect + quarter * br.prob * (T::one() - p_correct);
            per_letter[letter].p_bob_correct =
                per_letter[letter].p_bob_correct + br.prob * p_correct;
            let entry = record_joint.entry(br.record).or_insert([T::zero(); 4]);
            entry[letter] = entry[letter] + quarter * br.prob;
        }
    }

    // ML guess per record: first letter within tolerance of the maximum, so
    // analytically tied posteriors resolve deterministically under float noise
    let tie_tol = T::validation_tol();
    let mut guess_map = BTreeMap::new();
    let mut joint = [[T::zero(); 4]; 4]; // [letter][guess]
    for (record, probs) in &record_joint {
        let best = probs.iter().copied().fold(T::zero(), T::max);
        let guess = (0..4)
            .find(|&l| probs[l] >= best - tie_tol)
            .expect("a maximal letter exists");
        guess_map.insert(record.clone(), guess);
        for l in 0..4 {
            joint[l][guess] = joint[l][guess] + probs[l];
        }
    }
    for letter in 0..4 {
        for guess in 0..4 {
            // guess_dist conditioned on the letter (letters are equiprobable)
            per_letter[letter].guess_dist[guess] = joint[letter][guess] / quarter;
        }
    }
    let flat: Vec<T> = joint.iter().flatten().copied().collect();
    let info_gain = mutual_information(&JointDistribution::new(4, 4, flat)?);
    Ok(EveStats {
        info_gain,
        // roundoff can leave a tiny negative residue on undisturbed bases
        detect_prob: detect.max(T::zero()),
        per_letter,
        guess_map,
    })
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

/// One intercept-resend grid point; `None` leaves that qubit untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterceptParams<T: Scalar> {
    pub theta1: Option<T>,
    pub theta2: Option<T>,
}

/// Sweep result: per-point stats plus the argmax/argmin indices.
#[derive(Debug, Clone)]
pub struct SweepResult<T: Scalar> {
    pub points: Vec<(InterceptParams<T>, EveStats<T>)>,
    /// Index of the grid point maximizing information gain (first on ties).
    pub best_info_gain: usize,
    /// Index of the grid point minimizing detection probability (first on ties).
    pub least_detectable: usize,
}

/// Evaluate an intercept-resend family over a finite parameter grid.
pub fn strategy_sweep<T: Scalar>(
    basis: &LetterBasis<T>,
    grid: &[InterceptParams<T>],
) -> Result<SweepResult<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for params in grid {
        let strategy = AttackStrategy::intercept_resend(params.theta1, params.theta2);
        points.push((*params, exact_eve_stats(basis, &strategy)?));
    }
    let mut best_info_gain = 0usize;
    let mut least_detectable = 0usize;
    for (i, (_, stats)) in points.iter().enumerate() {
        if stats.info_gain > points[best_info_gain].1.info_gain {
            best_info_gain = i;
        }
        if stats.detect_prob < points[least_detectable].1.detect_prob {
            least_detectable = i;
        }
    }
    Ok(SweepResult {
        points,
        best_info_gain,
        least_detectable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type B = LetterBasis<f64>;

    #[test]
    fn catalog_has_the_named_strategies() {
        let cat = catalog::<f64>();
        assert!(cat.len() >= 4);
        let names: Vec<_> = cat.iter().map(|s| s.name().to_string()).collect();
        assert!(names.contains(&"no-attack".to_string()));
        assert!(names.contains(&"local-measure-2".to_string()));
        assert!(names.contains(&"ancilla-swap".to_string()));
    }

    #[test]
    fn no_attack_is_invisible_everywhere() {
        for basis in [B::canonical_202(), B::product_400(), B::bell_004()] {
            let stats = exact_eve_stats(&basis, &AttackStrategy::no_attack()).unwrap();
            assert!(stats.detect_prob.abs() < 1e-15);
            assert!(stats.info_gain.abs() < 1e-15);
        }
    }

    #[test]
    fn no_attack_forwards_letters_with_unit_fidelity() {
        let basis = B::canonical_202();
        for letter in 0..4 {
            let branches =
                enumerate_branches(&AttackStrategy::no_attack(), basis.state(letter)).unwrap();
            assert_eq!(branches.len(), 1);
            let fid = branches[0]
                .state
                .overlap_prob(basis.state(letter))
                .unwrap();
            assert!((fid - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn local_measurement_on_400_basis() {
        let stats =
            exact_eve_stats(&B::product_400(), &AttackStrategy::local_measure_qubit_2()).unwrap();
        assert!(stats.info_gain >= 1.0 - 1e-9);
        assert!(stats.detect_prob <= 1e-12);
    }

    #[test]
    fn ancilla_swap_on_bell_basis_reads_both_bits() {
        let stats = exact_eve_stats(&B::bell_004(), &AttackStrategy::ancilla_swap()).unwrap();
        assert!((stats.info_gain - 2.0).abs() < 1e-9);
        assert!(stats.detect_prob <= 1e-12);
        // Eve's guesses equal the letters
        for (letter, outcome) in stats.per_letter.iter().enumerate() {
            assert!((outcome.guess_dist[letter] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ancilla_swap_stage2_pauli_mapping() {
        // given the Bell outcome psi2 (index 2), the correction maps Eve's
        // pair onto that Bell state
        let basis = B::bell_004();
        let branches =
            enumerate_branches(&AttackStrategy::ancilla_swap(), basis.state(2)).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].record, vec![2]);
        let probs = crate::qstate::projective_probabilities(
            &branches[0].state,
            basis.states(),
            &[2, 3],
        )
        .unwrap();
        assert!((probs[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ancilla_swap_on_202_is_detectable() {
        // frozen from the independent density-matrix oracle
        let stats = exact_eve_stats(&B::canonical_202(), &AttackStrategy::ancilla_swap()).unwrap();
        assert!((stats.detect_prob - 0.25).abs() < 1e-9);
        assert!((stats.info_gain - 1.5).abs() < 1e-9);
    }

    #[test]
    fn sequential_access_is_structural() {
        // stage 1 may not touch travel qubit 2
        let bad = AttackStrategy::<f64>::new(
            "bad",
            None,
            StageProgram {
                ops: vec![StageOp::Measure {
                    basis: vec![PureState::ket0(), PureState::ket1()],
                    targets: vec![TRAVEL_2],
                }],
                forward: TRAVEL_1,
            },
            StageProgram {
                ops: vec![],
                forward: TRAVEL_2,
            },
            None,
        );
        assert!(matches!(bad, Err(Error::InvalidAttack(_))));

        // a joint measurement on both travel qubits before forwarding
        let bell = B::bell_004();
        let bad = AttackStrategy::<f64>::new(
            "bad-joint",
            None,
            StageProgram {
                ops: vec![StageOp::Measure {
                    basis: bell.states().to_vec(),
                    targets: vec![TRAVEL_1, TRAVEL_2],
                }],
                forward: TRAVEL_1,
            },
            StageProgram {
                ops: vec![],
                forward: TRAVEL_2,
            },
            None,
        );
        assert!(matches!(bad, Err(Error::InvalidAttack(_))));

        // stage 2 may not touch the forwarded qubit
        let bad = AttackStrategy::<f64>::new(
            "bad-forwarded",
            None,
            StageProgram {
                ops: vec![],
                forward: TRAVEL_1,
            },
            StageProgram {
                ops: vec![StageOp::Measure {
                    basis: vec![PureState::ket0(), PureState::ket1()],
                    targets: vec![TRAVEL_1],
                }],
                forward: TRAVEL_2,
            },
            None,
        );
        assert!(matches!(bad, Err(Error::InvalidAttack(_))));

        // conditioning on a record that does not exist yet
        let bad = AttackStrategy::<f64>::new(
            "bad-record",
            None,
            StageProgram {
                ops: vec![StageOp::Conditional {
                    record: 0,
                    cases: vec![UnitaryMap::identity(2).unwrap()],
                    targets: vec![TRAVEL_1],
                }],
                forward: TRAVEL_1,
            },
            StageProgram {
                ops: vec![],
                forward: TRAVEL_2,
            },
            None,
        );
        assert!(matches!(bad, Err(Error::InvalidAttack(_))));
    }

    #[test]
    fn stats_invariant_under_letter_permutation() {
        let b = B::canonical_202();
        let perm = [3usize, 1, 2, 0];
        let states = [
            b.state(perm[0]).clone(),
            b.state(perm[1]).clone(),
            b.state(perm[2]).clone(),
            b.state(perm[3]).clone(),
        ];
        let permuted = LetterBasis::new(states, [3, 1, 2, 0]).unwrap();
        for strategy in [
            AttackStrategy::ancilla_swap(),
            AttackStrategy::intercept_resend(Some(0.3), Some(0.9)),
        ] {
            let a = exact_eve_stats(&b, &strategy).unwrap();
            let c = exact_eve_stats(&permuted, &strategy).unwrap();
            assert!((a.info_gain - c.info_gain).abs() < 1e-9);
            assert!((a.detect_prob - c.detect_prob).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_over_second_qubit_angle_on_400() {
        // sweeping the qubit-2 measurement angle recovers the
        // computational-basis optimum: one bit, undetected
        let grid: Vec<InterceptParams<f64>> = (0..9)
            .map(|i| InterceptParams {
                theta1: None,
                theta2: Some(i as f64 * std::f64::consts::PI / 16.0),
            })
            .collect();
        let sweep = strategy_sweep(&B::product_400(), &grid).unwrap();
        let best = &sweep.points[sweep.best_info_gain];
        assert_eq!(sweep.best_info_gain, 0);
        assert!((best.1.info_gain - 1.0).abs() < 1e-9);
        assert!(best.1.detect_prob <= 1e-12);
        // frozen oracle value at theta2 = pi/4
        assert!((sweep.points[4].1.detect_prob - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sweep_contains_no_attack_point() {
        let grid = [InterceptParams::<f64> {
            theta1: None,
            theta2: None,
        }];
        let sweep = strategy_sweep(&B::canonical_202(), &grid).unwrap();
        assert!(sweep.points[0].1.detect_prob.abs() < 1e-15);
        assert!(sweep.points[0].1.info_gain.abs() < 1e-15);
    }

    #[test]
    fn sweep_rejects_empty_grid() {
        assert!(strategy_sweep::<f64>(&B::canonical_202(), &[]).is_err());
    }

    #[test]
    fn intercept_resend_oracle_values_on_202() {
        // frozen from the independent density-matrix oracle
        let pi = std::f64::consts::PI;
        let cases = [
            (Some(0.0), Some(0.0), 1.5, 0.25),
            (Some(0.0), Some(pi / 4.0), 0.5, 0.625),
            (Some(pi / 8.0), Some(pi / 8.0), 0.649123963307, 0.53125),
            (None, Some(0.0), 0.5, 0.25),
            (Some(0.0), None, 0.5, 0.25),
        ];
        for (t1, t2, info, det) in cases {
            let stats = exact_eve_stats(
                &B::canonical_202(),
                &AttackStrategy::intercept_resend(t1, t2),
            )
            .unwrap();
            assert!((stats.info_gain - info).abs() < 1e-9, "info at {t1:?},{t2:?}");
            assert!((stats.detect_prob - det).abs() < 1e-9, "detect at {t1:?},{t2:?}");
        }
    }
}
