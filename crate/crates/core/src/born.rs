//! Joint probability tables per surface and the single-observable marginals
//! shared between them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::objects::{lift_local, DensityOperator, LocalObservable};
use crate::surfaces::{state_on, FourSurfaceScenario, SurfaceLabel};

/// Joint outcome table for the observable pair measured on one surface.
/// Entries are keyed by (label1, label2) and kept in lexicographic order
/// for deterministic serialization.
#[derive(Debug, Clone)]
pub struct MarginalTable {
    pub surface: SurfaceLabel,
    pub obs1_name: String,
    pub obs2_name: String,
    pub labels1: Vec<String>,
    pub labels2: Vec<String>,
    pub eigenvalues1: Vec<f64>,
    pub eigenvalues2: Vec<f64>,
    probs: BTreeMap<(String, String), f64>,
}

impl MarginalTable {
    /// Assembles a table from raw entries, clamping negative floating-point
    /// dust (≥ -1e-12) to zero and rejecting anything more negative. The
    /// entries must cover exactly the label product and sum to 1 within
    /// 1e-10.
    pub fn from_entries(
        surface: SurfaceLabel,
        obs1_name: &str,
        obs2_name: &str,
        labels1: Vec<String>,
        labels2: Vec<String>,
        eigenvalues1: Vec<f64>,
        eigenvalues2: Vec<f64>,
        entries: Vec<((String, String), f64)>,
    ) -> Result<Self> {
        if entries.len() != labels1.len() * labels2.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} table",
                entries.len(),
                labels1.len(),
                labels2.len()
            )));
        }
        let mut probs = BTreeMap::new();
        let mut sum = 0.0;
        for ((l1, l2), p) in entries {
            if !labels1.contains(&l1) {
                return Err(Error::UnknownLabel(l1));
            }
            if !labels2.contains(&l2) {
                return Err(Error::UnknownLabel(l2));
            }
            let p = clamp_probability(p)?;
            sum += p;
            if probs.insert((l1, l2), p).is_some() {
                return Err(Error::InvalidArgument("duplicate table cell".into()));
            }
        }
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "table sums to {sum}, not 1"
            )));
        }
        Ok(Self {
            surface,
            obs1_name: obs1_name.to_string(),
            obs2_name: obs2_name.to_string(),
            labels1,
            labels2,
            eigenvalues1,
            eigenvalues2,
            probs,
        })
    }

    pub fn prob(&self, label1: &str, label2: &str) -> Result<f64> {
        self.probs
            .get(&(label1.to_string(), label2.to_string()))
            .copied()
            .ok_or_else(|| Error::UnknownLabel(format!("({label1}, {label2})")))
    }

    /// Entries in lexicographic key order.
    pub fn entries(&self) -> impl Iterator<Item = (&(String, String), f64)> {
        self.probs.iter().map(|(k, &v)| (k, v))
    }

    pub fn sum(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// Negative dust within -1e-12 is clamped to zero; anything beyond is a bug
/// upstream, not noise, and is rejected.
fn clamp_probability(p: f64) -> Result<f64> {
    if p < -1e-12 {
        return Err(Error::NegativeProbability(p));
    }
    if p < 0.0 {
        log::debug!("clamping probability dust {p:.3e} to 0");
        return Ok(0.0);
    }
    Ok(p.min(1.0))
}

/// Born weight Tr[(P_x ⊗ P_y) ρ] for one outcome pair; the imaginary part
/// must be numerical noise (< 1e-10) and is discarded.
pub fn joint_probability(
    rho: &DensityOperator,
    x: (&LocalObservable, &str),
    y: (&LocalObservable, &str),
) -> Result<f64> {
    let (obs1, label1) = x;
    let (obs2, label2) = y;
    if obs1.subsystem() != 0 || obs2.subsystem() != 1 {
        return Err(Error::BadScenario(
            "joint probability expects observables on subsystems 1 and 2".into(),
        ));
    }
    let p1 = &obs1.outcome(label1)?.projector;
    let p2 = &obs2.outcome(label2)?.projector;
    let lifted = lift_local(p1, rho.layout(), 0)?
        .multiply(&lift_local(p2, rho.layout(), 1)?)?;
    let tr = lifted.multiply(rho.matrix())?.trace()?;
    if tr.im.abs() >= 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "joint probability has imaginary part {:.3e}",
            tr.im
        )));
    }
    clamp_probability(tr.re)
}

/// Full outcome table on one surface, pairing observables by the surface
/// convention and filling every label pair via the Born rule.
pub fn marginal_table(scenario: &FourSurfaceScenario, surface: SurfaceLabel) -> Result<MarginalTable> {
    let rho = state_on(scenario, surface)?;
    let ((name1, obs1), (name2, obs2)) = scenario.observables_on(surface);
    let labels1 = obs1.labels();
    let labels2 = obs2.labels();
    let mut entries = Vec::with_capacity(labels1.len() * labels2.len());
    for l1 in &labels1 {
        for l2 in &labels2 {
            let p = joint_probability(&rho, (obs1, l1), (obs2, l2))?;
            entries.push(((l1.clone(), l2.clone()), p));
        }
    }
    MarginalTable::from_entries(
        surface,
        name1,
        name2,
        labels1,
        labels2,
        obs1.outcomes().iter().map(|o| o.eigenvalue).collect(),
        obs2.outcomes().iter().map(|o| o.eigenvalue).collect(),
        entries,
    )
}

/// Row and column sums of a table: the per-observable distributions.
pub fn single_marginals(table: &MarginalTable) -> (Vec<(String, f64)>, Vec<(String, f64)>) {
    let first = table
        .labels1
        .iter()
        .map(|l1| {
            let sum = table
                .labels2
                .iter()
                .map(|l2| table.prob(l1, l2).expect("complete table"))
                .sum();
            (l1.clone(), sum)
        })
        .collect();
    let second = table
        .labels2
        .iter()
        .map(|l2| {
            let sum = table
                .labels1
                .iter()
                .map(|l1| table.prob(l1, l2).expect("complete table"))
                .sum();
            (l2.clone(), sum)
        })
        .collect();
    (first, second)
}

/// The four per-surface tables of one scenario.
#[derive(Debug, Clone)]
pub struct FourTables {
    pub alpha: MarginalTable,
    pub beta: MarginalTable,
    pub gamma: MarginalTable,
    pub delta: MarginalTable,
}

impl FourTables {
    pub fn compute(scenario: &FourSurfaceScenario) -> Result<Self> {
        Ok(Self {
            alpha: marginal_table(scenario, SurfaceLabel::Alpha)?,
            beta: marginal_table(scenario, SurfaceLabel::Beta)?,
            gamma: marginal_table(scenario, SurfaceLabel::Gamma)?,
            delta: marginal_table(scenario, SurfaceLabel::Delta)?,
        })
    }

    pub fn get(&self, surface: SurfaceLabel) -> &MarginalTable {
        match surface {
            SurfaceLabel::Alpha => &self.alpha,
            SurfaceLabel::Beta => &self.beta,
            SurfaceLabel::Gamma => &self.gamma,
            SurfaceLabel::Delta => &self.delta,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &MarginalTable> {
        SurfaceLabel::ALL.iter().map(move |&s| self.get(s))
    }
}

/// One marginal comparison inside an overlap-consistency report.
#[derive(Debug, Clone)]
pub struct OverlapComparison {
    pub observable: String,
    pub surfaces: (SurfaceLabel, SurfaceLabel),
    pub deviation: f64,
}

/// Each observable appears in exactly two of the four tables; its single
/// marginal must agree between them.
#[derive(Debug, Clone)]
pub struct OverlapReport {
    pub comparisons: Vec<OverlapComparison>,
    pub max_deviation: f64,
    pub pass: bool,
}

pub fn overlap_consistency(tables: &FourTables, tol: f64) -> OverlapReport {
    // (observable, table carrying it first, side in that table, table
    // carrying it second, side there). Side 0 = row marginal.
    let specs = [
        ("A1", SurfaceLabel::Alpha, 0, SurfaceLabel::Delta, 0),
        ("A2", SurfaceLabel::Alpha, 1, SurfaceLabel::Gamma, 1),
        ("B1", SurfaceLabel::Beta, 0, SurfaceLabel::Gamma, 0),
        ("B2", SurfaceLabel::Beta, 1, SurfaceLabel::Delta, 1),
    ];
    let mut comparisons = Vec::with_capacity(4);
    let mut max_deviation = 0.0f64;
    for (name, s1, side1, s2, side2) in specs {
        let m1 = marginal_side(tables.get(s1), side1);
        let m2 = marginal_side(tables.get(s2), side2);
        let mut deviation = 0.0f64;
        for (a, b) in m1.iter().zip(&m2) {
            debug_assert_eq!(a.0, b.0);
            deviation = deviation.max((a.1 - b.1).abs());
        }
        if m1.len() != m2.len() {
            deviation = f64::INFINITY;
        }
        max_deviation = max_deviation.max(deviation);
        comparisons.push(OverlapComparison {
            observable: name.to_string(),
            surfaces: (s1, s2),
            deviation,
        });
    }
    OverlapReport {
        comparisons,
        max_deviation,
        pass: max_deviation <= tol,
    }
}

fn marginal_side(table: &MarginalTable, side: usize) -> Vec<(String, f64)> {
    let (first, second) = single_marginals(table);
    if side == 0 {
        first
    } else {
        second
    }
}
