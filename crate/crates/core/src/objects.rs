//! States, observables, and channels, plus constructors for every named
//! object used by the built-in scenarios.
//!
//! Basis convention throughout: subsystem 1 carries the most significant
//! index, and qubit basis states are ordered (+, -), so a two-qubit product
//! basis reads (++, +-, -+, --).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigensystem, partial_trace, ComplexMatrix, SubsystemLayout,
};

const HERMITICITY_TOL: f64 = 1e-10;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Normalized pure state over a subsystem layout.
#[derive(Debug, Clone)]
pub struct StateVector {
    layout: SubsystemLayout,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validating constructor; rejects amplitude lists whose norm deviates
    /// from 1 by more than 1e-9.
    pub fn new(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for ambient dimension {}",
                amplitudes.len(),
                layout.ambient_dim()
            )));
        }
        for (idx, z) in amplitudes.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(idx));
            }
        }
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::BadNorm((norm - 1.0).abs()));
        }
        Ok(Self { layout, amplitudes })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// |<self|other>| — the phase-insensitive overlap.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    pub fn to_density(&self) -> DensityOperator {
        let n = self.amplitudes.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        DensityOperator::new(self.layout.clone(), m)
            .expect("outer product of a unit vector is a valid density operator")
    }
}

/// Hermitian, positive-semidefinite, unit-trace operator over a layout.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    layout: SubsystemLayout,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(layout: SubsystemLayout, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != layout.ambient_dim() || !matrix.is_square() {
            return Err(Error::BadDensity(format!(
                "{}x{} matrix for ambient dimension {}",
                matrix.rows(),
                matrix.cols(),
                layout.ambient_dim()
            )));
        }
        let dev = matrix.hermitian_deviation()?;
        if dev > HERMITICITY_TOL {
            return Err(Error::BadDensity(format!(
                "Hermiticity deviation {dev:.3e}"
            )));
        }
        let tr = matrix.trace()?;
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::BadDensity(format!("trace {tr} != 1")));
        }
        let eig = hermitian_eigensystem(&matrix, HERMITICITY_TOL)?;
        if let Some(&min) = eig.values.last() {
            if min < -1e-10 {
                return Err(Error::BadDensity(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { layout, matrix })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Reduced density operator on one subsystem.
    pub fn reduce(&self, keep: usize) -> Result<ComplexMatrix> {
        partial_trace(&self.matrix, &self.layout, keep)
    }
}

/// One measurement outcome of a local observable.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub label: String,
    pub eigenvalue: f64,
    pub projector: ComplexMatrix,
}

/// Projective observable on a single subsystem. Projectors live on the
/// subsystem's local space, are mutually orthogonal, and sum to the local
/// identity.
#[derive(Debug, Clone)]
pub struct LocalObservable {
    subsystem: usize,
    outcomes: Vec<Outcome>,
}

impl LocalObservable {
    pub fn new(subsystem: usize, outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::BadObservable("no outcomes".into()));
        }
        let dim = outcomes[0].projector.rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (i, o) in outcomes.iter().enumerate() {
            let p = &o.projector;
            if p.rows() != dim || p.cols() != dim {
                return Err(Error::BadObservable(format!(
                    "projector {i} has mismatched dimensions"
                )));
            }
            if p.hermitian_deviation()? > HERMITICITY_TOL {
                return Err(Error::BadObservable(format!("projector {i} not Hermitian")));
            }
            let idem = p.multiply(p)?.max_abs_diff(p);
            if idem > HERMITICITY_TOL {
                return Err(Error::BadObservable(format!(
                    "projector {i} not idempotent (deviation {idem:.3e})"
                )));
            }
            for (j, other) in outcomes.iter().enumerate() {
                if i != j {
                    let cross = p.multiply(&other.projector)?.frobenius_norm();
                    if cross > HERMITICITY_TOL {
                        return Err(Error::BadObservable(format!(
                            "projectors {i} and {j} not orthogonal"
                        )));
                    }
                }
            }
            sum = sum.add(p);
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > 1e-12 {
            return Err(Error::BadObservable(
                "projectors do not sum to the identity".into(),
            ));
        }
        let mut labels: Vec<&str> = outcomes.iter().map(|o| o.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != outcomes.len() {
            return Err(Error::BadObservable("duplicate outcome labels".into()));
        }
        Ok(Self { subsystem, outcomes })
    }

    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn local_dim(&self) -> usize {
        self.outcomes[0].projector.rows()
    }

    pub fn outcome(&self, label: &str) -> Result<&Outcome> {
        self.outcomes
            .iter()
            .find(|o| o.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Labels in declaration order.
    pub fn labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.label.clone()).collect()
    }

    /// The observable as an operator, Σ eigenvalue · projector.
    pub fn operator(&self) -> ComplexMatrix {
        let dim = self.local_dim();
        let mut op = ComplexMatrix::zeros(dim, dim);
        for o in &self.outcomes {
            op = op.add(&o.projector.scale(re(o.eigenvalue)));
        }
        op
    }
}

/// Observable with rank-1 projectors onto the standard basis vectors.
/// Duplicate eigenvalues are rejected: they would merge eigenspaces.
pub fn computational_observable(
    subsystem: usize,
    labels: &[&str],
    eigenvalues: &[f64],
) -> Result<LocalObservable> {
    if labels.len() != eigenvalues.len() || labels.is_empty() {
        return Err(Error::BadObservable(
            "labels and eigenvalues must pair up".into(),
        ));
    }
    let dim = labels.len();
    for (i, &a) in eigenvalues.iter().enumerate() {
        for &b in &eigenvalues[i + 1..] {
            if a == b {
                return Err(Error::BadObservable(format!(
                    "duplicate eigenvalue {a}"
                )));
            }
        }
    }
    let outcomes = labels
        .iter()
        .zip(eigenvalues)
        .enumerate()
        .map(|(k, (&label, &eigenvalue))| {
            let mut p = ComplexMatrix::zeros(dim, dim);
            p.set(k, k, Complex64::ONE);
            Outcome {
                label: label.to_string(),
                eigenvalue,
                projector: p,
            }
        })
        .collect();
    LocalObservable::new(subsystem, outcomes)
}

/// Two-outcome diagonal observable whose projectors sum basis projectors
/// over the given index sets (used for pointer readouts on dim-4 blocks).
pub fn grouped_observable(
    subsystem: usize,
    local_dim: usize,
    groups: &[(&str, f64, &[usize])],
) -> Result<LocalObservable> {
    let outcomes = groups
        .iter()
        .map(|&(label, eigenvalue, indices)| {
            let mut p = ComplexMatrix::zeros(local_dim, local_dim);
            for &k in indices {
                if k >= local_dim {
                    return Err(Error::BadObservable(format!(
                        "basis index {k} out of range for local dim {local_dim}"
                    )));
                }
                p.set(k, k, Complex64::ONE);
            }
            Ok(Outcome {
                label: label.to_string(),
                eigenvalue,
                projector: p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LocalObservable::new(subsystem, outcomes)
}

/// Local evolution between surfaces: either a single unitary or a
/// trace-preserving Kraus set, acting on one subsystem.
#[derive(Debug, Clone)]
pub enum ChannelKind {
    Unitary(ComplexMatrix),
    Kraus(Vec<ComplexMatrix>),
}

#[derive(Debug, Clone)]
pub struct QuantumChannel {
    subsystem: usize,
    kind: ChannelKind,
}

/// Outcome of a channel completeness check.
#[derive(Debug, Clone)]
pub struct ChannelValidation {
    pub ok: bool,
    pub max_deviation: f64,
}

impl QuantumChannel {
    pub fn unitary(subsystem: usize, u: ComplexMatrix) -> Result<Self> {
        let ch = Self {
            subsystem,
            kind: ChannelKind::Unitary(u),
        };
        let v = ch.validate()?;
        if !v.ok {
            return Err(Error::BadChannel(format!(
                "U†U deviates from identity by {:.3e}",
                v.max_deviation
            )));
        }
        Ok(ch)
    }

    pub fn kraus(subsystem: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::BadChannel("empty Kraus set".into()));
        }
        let ch = Self {
            subsystem,
            kind: ChannelKind::Kraus(ops),
        };
        let v = ch.validate()?;
        if !v.ok {
            return Err(Error::BadChannel(format!(
                "Σ K†K deviates from identity by {:.3e}",
                v.max_deviation
            )));
        }
        Ok(ch)
    }

    pub fn identity(subsystem: usize, local_dim: usize) -> Self {
        Self {
            subsystem,
            kind: ChannelKind::Unitary(ComplexMatrix::identity(local_dim)),
        }
    }

    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn local_dim(&self) -> usize {
        match &self.kind {
            ChannelKind::Unitary(u) => u.rows(),
            ChannelKind::Kraus(ops) => ops[0].rows(),
        }
    }

    /// Checks U†U = I (unitary) or Σ K†K = I (Kraus) and reports the
    /// max-abs deviation instead of erroring.
    pub fn validate(&self) -> Result<ChannelValidation> {
        let sum = match &self.kind {
            ChannelKind::Unitary(u) => u.adjoint().multiply(u)?,
            ChannelKind::Kraus(ops) => {
                let dim = ops[0].rows();
                let mut acc = ComplexMatrix::zeros(dim, dim);
                for k in ops {
                    if k.rows() != dim || k.cols() != dim {
                        return Err(Error::BadChannel(
                            "Kraus operators have mixed dimensions".into(),
                        ));
                    }
                    acc = acc.add(&k.adjoint().multiply(k)?);
                }
                acc
            }
        };
        let max_deviation = sum.max_abs_diff(&ComplexMatrix::identity(sum.rows()));
        Ok(ChannelValidation {
            ok: max_deviation <= HERMITICITY_TOL,
            max_deviation,
        })
    }

    /// Applies a unitary channel to a pure state; Kraus channels do not map
    /// pure states to pure states and are rejected here.
    pub fn apply_to_state(&self, state: &StateVector) -> Result<StateVector> {
        let u = match &self.kind {
            ChannelKind::Unitary(u) => u,
            ChannelKind::Kraus(_) => {
                return Err(Error::BadChannel(
                    "Kraus channel cannot act on a pure state".into(),
                ))
            }
        };
        let lifted = lift_local(u, state.layout(), self.subsystem)?;
        let amps = lifted.apply(state.amplitudes())?;
        StateVector::new(state.layout().clone(), amps)
    }

    /// ρ ↦ Σ_k (K_k ⊗ I) ρ (K_k ⊗ I)†, with the single-unitary case as a
    /// one-element sum.
    pub fn apply_to_density(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let layout = rho.layout().clone();
        let ops: Vec<&ComplexMatrix> = match &self.kind {
            ChannelKind::Unitary(u) => vec![u],
            ChannelKind::Kraus(ops) => ops.iter().collect(),
        };
        let dim = layout.ambient_dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for op in ops {
            let lifted = lift_local(op, &layout, self.subsystem)?;
            let term = lifted
                .multiply(rho.matrix())?
                .multiply(&lifted.adjoint())?;
            acc = acc.add(&term);
        }
        DensityOperator::new(layout, acc)
    }
}

/// Embeds a local operator into the ambient space (identity elsewhere).
pub fn lift_local(
    op: &ComplexMatrix,
    layout: &SubsystemLayout,
    subsystem: usize,
) -> Result<ComplexMatrix> {
    let local = layout.local_dim(subsystem)?;
    if op.rows() != local || op.cols() != local {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on subsystem of dimension {local}",
            op.rows(),
            op.cols()
        )));
    }
    let mut out: Option<ComplexMatrix> = None;
    for (s, &d) in layout.dims().iter().enumerate() {
        let factor = if s == subsystem {
            op.clone()
        } else {
            ComplexMatrix::identity(d)
        };
        out = Some(match out {
            None => factor,
            Some(acc) => acc.tensor(&factor),
        });
    }
    Ok(out.expect("layout has at least one subsystem"))
}

/// Two-qubit layout shared by the built-in states.
pub fn qubit_pair_layout() -> SubsystemLayout {
    SubsystemLayout::new(vec![2, 2]).expect("static layout")
}

/// Validating state constructor over an explicit layout.
pub fn make_state(layout: SubsystemLayout, amplitudes: Vec<Complex64>) -> Result<StateVector> {
    StateVector::new(layout, amplitudes)
}

/// Two-qubit state with amplitudes (1, -1, -1, -3)/(2√3) in the
/// (++, +-, -+, --) basis.
pub fn hardy_jordan() -> StateVector {
    let n = 1.0 / (2.0 * 3.0_f64.sqrt());
    StateVector::new(
        qubit_pair_layout(),
        vec![re(n), re(-n), re(-n), re(-3.0 * n)],
    )
    .expect("exact amplitudes")
}

/// The antisymmetric two-qubit state (|+-> - |-+>)/√2.
pub fn singlet() -> StateVector {
    let s = 1.0 / 2.0_f64.sqrt();
    StateVector::new(
        qubit_pair_layout(),
        vec![re(0.0), re(s), re(-s), re(0.0)],
    )
    .expect("exact amplitudes")
}

/// The 2x2 Hadamard unitary as a channel on one qubit subsystem.
pub fn hadamard_channel(subsystem: usize) -> Result<QuantumChannel> {
    let s = 1.0 / 2.0_f64.sqrt();
    let u = ComplexMatrix::from_real(2, 2, &[s, s, s, -s])?;
    QuantumChannel::unitary(subsystem, u)
}

/// Opposite single-qubit rotations by angle `phi`:
/// subsystem 1 gets |+> ↦ cos φ|+> + sin φ|->, subsystem 2 the reverse.
pub fn rotation_channels(phi: f64) -> Result<(QuantumChannel, QuantumChannel)> {
    let u1 = rotation_unitary(phi)?;
    let u2 = rotation_unitary(-phi)?;
    Ok((
        QuantumChannel::unitary(0, u1)?,
        QuantumChannel::unitary(1, u2)?,
    ))
}

/// exp(-i h φ) for the generator h = i(|-><+| - |+><-|).
pub fn rotation_unitary(phi: f64) -> Result<ComplexMatrix> {
    let h = ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        ],
    )?;
    crate::linalg::exp_generator(&h, phi)
}

/// Kraus pair {√(1-p)·I, √p·Z} on one qubit subsystem.
pub fn dephasing_kraus(subsystem: usize, p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "dephasing probability {p} outside [0, 1]"
        )));
    }
    let k0 = ComplexMatrix::identity(2).scale(re((1.0 - p).sqrt()));
    let z = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])?;
    let k1 = z.scale(re(p.sqrt()));
    QuantumChannel::kraus(subsystem, vec![k0, k1])
}

/// Attaches a pointer qubit to each side of a two-qubit state: each local
/// basis state |r±> becomes |r±>|p±>, so the layout grows from 2⊗2 to 4⊗4
/// with block 1 = system+pointer 1 and block 2 = system+pointer 2.
pub fn ancilla_extend(state: &StateVector) -> Result<StateVector> {
    if state.layout().dims() != [2, 2] {
        return Err(Error::BadLayout(format!(
            "ancilla extension expects a 2⊗2 layout, got {:?}",
            state.layout().dims()
        )));
    }
    let layout = SubsystemLayout::new(vec![4, 4])?;
    let mut amps = vec![Complex64::ZERO; 16];
    for r1 in 0..2 {
        for r2 in 0..2 {
            // |r> |p=r> sits at local index 3r within each block.
            let b1 = 3 * r1;
            let b2 = 3 * r2;
            amps[b1 * 4 + b2] = state.amplitudes()[r1 * 2 + r2];
        }
    }
    StateVector::new(layout, amps)
}

/// Unitary on a dim-4 system+pointer block acting as a Hadamard on
/// span{|r+p+>, |r-p->} and as the identity on the complementary
/// span{|r+p->, |r-p+>}.
pub fn block_hadamard_channel(subsystem: usize) -> Result<QuantumChannel> {
    let s = 1.0 / 2.0_f64.sqrt();
    let mut u = ComplexMatrix::zeros(4, 4);
    u.set(0, 0, re(s));
    u.set(0, 3, re(s));
    u.set(3, 0, re(s));
    u.set(3, 3, re(-s));
    u.set(1, 1, Complex64::ONE);
    u.set(2, 2, Complex64::ONE);
    QuantumChannel::unitary(subsystem, u)
}
