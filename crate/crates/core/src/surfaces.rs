//! Four intersecting spacelike surfaces over a shared initial state.
//!
//! Geometry is encoded purely by the (surface, subsystem) pairing: the two
//! lower intersection points carry the `alpha` observables, the two upper
//! ones the `beta` observables, and the two tilted surfaces each mix one of
//! either. All states are expressed in a single coordinate basis, so surface
//! crossings reduce to applying one or both local channels.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix};
use crate::objects::{ChannelKind, DensityOperator, LocalObservable, QuantumChannel};

/// The four surfaces. `alpha` is the initial surface, `beta` the final one,
/// `gamma` crosses after only subsystem 1 evolved, `delta` after only
/// subsystem 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceLabel {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl SurfaceLabel {
    pub const ALL: [SurfaceLabel; 4] = [
        SurfaceLabel::Alpha,
        SurfaceLabel::Beta,
        SurfaceLabel::Gamma,
        SurfaceLabel::Delta,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceLabel::Alpha => "alpha",
            SurfaceLabel::Beta => "beta",
            SurfaceLabel::Gamma => "gamma",
            SurfaceLabel::Delta => "delta",
        }
    }
}

impl fmt::Display for SurfaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Initial state, one local channel per subsystem, and the observables
/// measured on the initial (`obs_alpha`) and final (`obs_beta`) surfaces.
#[derive(Debug, Clone)]
pub struct FourSurfaceScenario {
    rho_alpha: DensityOperator,
    channel_1: QuantumChannel,
    channel_2: QuantumChannel,
    obs_alpha: (LocalObservable, LocalObservable),
    obs_beta: (LocalObservable, LocalObservable),
}

impl FourSurfaceScenario {
    pub fn new(
        rho_alpha: DensityOperator,
        channel_1: QuantumChannel,
        channel_2: QuantumChannel,
        obs_alpha: (LocalObservable, LocalObservable),
        obs_beta: (LocalObservable, LocalObservable),
    ) -> Result<Self> {
        let layout = rho_alpha.layout();
        if layout.subsystem_count() != 2 {
            return Err(Error::BadScenario(format!(
                "expected a bipartite layout, got {} subsystems",
                layout.subsystem_count()
            )));
        }
        if channel_1.subsystem() != 0 || channel_2.subsystem() != 1 {
            return Err(Error::BadScenario(
                "channels must act on subsystems 1 and 2 respectively".into(),
            ));
        }
        for (ch, s) in [(&channel_1, 0usize), (&channel_2, 1usize)] {
            if ch.local_dim() != layout.local_dim(s)? {
                return Err(Error::BadScenario(format!(
                    "channel on subsystem {} has local dim {}, layout has {}",
                    s + 1,
                    ch.local_dim(),
                    layout.local_dim(s)?
                )));
            }
        }
        for (obs, s, name) in [
            (&obs_alpha.0, 0usize, "A1"),
            (&obs_alpha.1, 1usize, "A2"),
            (&obs_beta.0, 0usize, "B1"),
            (&obs_beta.1, 1usize, "B2"),
        ] {
            if obs.subsystem() != s {
                return Err(Error::BadScenario(format!(
                    "{name} must sit on subsystem {}",
                    s + 1
                )));
            }
            if obs.local_dim() != layout.local_dim(s)? {
                return Err(Error::BadScenario(format!(
                    "{name} has local dim {}, layout has {}",
                    obs.local_dim(),
                    layout.local_dim(s)?
                )));
            }
        }
        Ok(Self {
            rho_alpha,
            channel_1,
            channel_2,
            obs_alpha,
            obs_beta,
        })
    }

    pub fn rho_alpha(&self) -> &DensityOperator {
        &self.rho_alpha
    }

    pub fn channel_1(&self) -> &QuantumChannel {
        &self.channel_1
    }

    pub fn channel_2(&self) -> &QuantumChannel {
        &self.channel_2
    }

    pub fn obs_alpha(&self) -> (&LocalObservable, &LocalObservable) {
        (&self.obs_alpha.0, &self.obs_alpha.1)
    }

    pub fn obs_beta(&self) -> (&LocalObservable, &LocalObservable) {
        (&self.obs_beta.0, &self.obs_beta.1)
    }

    /// Observable pair measured on a surface, with their conventional
    /// names: alpha pairs (A1, A2), beta (B1, B2), gamma (B1, A2),
    /// delta (A1, B2).
    pub fn observables_on(
        &self,
        surface: SurfaceLabel,
    ) -> ((&'static str, &LocalObservable), (&'static str, &LocalObservable)) {
        match surface {
            SurfaceLabel::Alpha => (("A1", &self.obs_alpha.0), ("A2", &self.obs_alpha.1)),
            SurfaceLabel::Beta => (("B1", &self.obs_beta.0), ("B2", &self.obs_beta.1)),
            SurfaceLabel::Gamma => (("B1", &self.obs_beta.0), ("A2", &self.obs_alpha.1)),
            SurfaceLabel::Delta => (("A1", &self.obs_alpha.0), ("B2", &self.obs_beta.1)),
        }
    }
}

/// State on a surface in the shared coordinate basis: alpha is the input,
/// gamma applies channel 1 only, delta channel 2 only, beta both.
pub fn state_on(scenario: &FourSurfaceScenario, surface: SurfaceLabel) -> Result<DensityOperator> {
    match surface {
        SurfaceLabel::Alpha => Ok(scenario.rho_alpha.clone()),
        SurfaceLabel::Gamma => scenario.channel_1.apply_to_density(&scenario.rho_alpha),
        SurfaceLabel::Delta => scenario.channel_2.apply_to_density(&scenario.rho_alpha),
        SurfaceLabel::Beta => {
            let mid = scenario.channel_1.apply_to_density(&scenario.rho_alpha)?;
            scenario.channel_2.apply_to_density(&mid)
        }
    }
}

/// Pulls a final-surface observable back through a channel:
/// `U† B U` for unitary evolution, `Σ K† B K` for a Kraus set. The result
/// is Hermitian but in the Kraus case generally not projective.
pub fn effective_observable(
    channel: &QuantumChannel,
    b: &LocalObservable,
) -> Result<ComplexMatrix> {
    if channel.subsystem() != b.subsystem() {
        return Err(Error::BadScenario(format!(
            "channel on subsystem {} vs observable on subsystem {}",
            channel.subsystem() + 1,
            b.subsystem() + 1
        )));
    }
    let b_op = b.operator();
    match channel.kind() {
        ChannelKind::Unitary(u) => u.adjoint().multiply(&b_op)?.multiply(u),
        ChannelKind::Kraus(ops) => {
            let dim = b_op.rows();
            let mut acc = ComplexMatrix::zeros(dim, dim);
            for k in ops {
                acc = acc.add(&k.adjoint().multiply(&b_op)?.multiply(k)?);
            }
            Ok(acc)
        }
    }
}

/// One reduced-state comparison inside a no-signaling report.
#[derive(Debug, Clone)]
pub struct ReducedComparison {
    pub description: String,
    pub deviation: f64,
}

/// Cross-surface agreement of reduced states: a local channel on one
/// subsystem must leave the other subsystem's reduced state untouched.
#[derive(Debug, Clone)]
pub struct NoSignalingReport {
    pub comparisons: Vec<ReducedComparison>,
    pub max_deviation: f64,
    pub pass: bool,
}

pub fn check_no_signaling(scenario: &FourSurfaceScenario, tol: f64) -> Result<NoSignalingReport> {
    let layout = scenario.rho_alpha.layout().clone();
    let rho_alpha = scenario.rho_alpha.matrix().clone();
    let rho_beta = state_on(scenario, SurfaceLabel::Beta)?;
    let rho_gamma = state_on(scenario, SurfaceLabel::Gamma)?;
    let rho_delta = state_on(scenario, SurfaceLabel::Delta)?;

    let reduce = |m: &ComplexMatrix, keep: usize| partial_trace(m, &layout, keep);

    let pairs = [
        ("gamma vs alpha on subsystem 2", rho_gamma.matrix(), &rho_alpha, 1usize),
        ("delta vs alpha on subsystem 1", rho_delta.matrix(), &rho_alpha, 0usize),
        ("beta vs gamma on subsystem 1", rho_beta.matrix(), rho_gamma.matrix(), 0usize),
        ("beta vs delta on subsystem 2", rho_beta.matrix(), rho_delta.matrix(), 1usize),
    ];

    let mut comparisons = Vec::with_capacity(pairs.len());
    let mut max_deviation = 0.0f64;
    for (description, left, right, keep) in pairs {
        let deviation = reduce(left, keep)?.max_abs_diff(&reduce(right, keep)?);
        max_deviation = max_deviation.max(deviation);
        comparisons.push(ReducedComparison {
            description: description.to_string(),
            deviation,
        });
    }
    Ok(NoSignalingReport {
        comparisons,
        max_deviation,
        pass: max_deviation <= tol,
    })
}
