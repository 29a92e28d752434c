//! Angle sweep over the singlet scenario: every grid point is an
//! independent pure pipeline (build, tabulate, solve), so the sweep is
//! data-parallel. With the `parallel` feature the points run on rayon;
//! results are assembled in grid order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::born::FourTables;
use crate::error::{Error, Result};
use crate::feasibility::{
    assemble_problem, battery_max_value, ch_battery, solve_feasibility, FeasibilityStatus,
};
use crate::scenarios::singlet_scenario;

/// One sweep grid point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub phi: f64,
    /// The tracked four-term combination
    /// `P[delta](+,-) + P[gamma](-,+) + P[beta](+,+) - P[alpha](+,+)`,
    /// which any joint distribution keeps inside [0, 1].
    pub s_value: f64,
    /// Largest value over the full inequality battery.
    pub ch_max: f64,
    pub lp_feasible: bool,
    /// Phase-1 objective landed between the tolerance and 1e-6.
    pub marginal: bool,
}

/// The four-term combination tracked by the sweep.
pub fn four_term_value(tables: &FourTables) -> Result<f64> {
    Ok(tables.delta.prob("+", "-")?
        + tables.gamma.prob("-", "+")?
        + tables.beta.prob("+", "+")?
        - tables.alpha.prob("+", "+")?)
}

/// Full pipeline at a single angle.
pub fn evaluate_point(phi: f64, tol: f64) -> Result<SweepRow> {
    let scenario = singlet_scenario(phi)?;
    let tables = FourTables::compute(&scenario)?;
    let s_value = four_term_value(&tables)?;
    let evals = ch_battery(&tables, tol)?;
    let ch_max = battery_max_value(&evals).expect("battery is nonempty");
    let problem = assemble_problem(&tables, 1e-8)?;
    let verdict = solve_feasibility(&problem, tol)?;
    Ok(SweepRow {
        phi,
        s_value,
        ch_max,
        lp_feasible: verdict.status == FeasibilityStatus::Feasible,
        marginal: verdict.marginal,
    })
}

/// Evenly spaced grid with both endpoints included.
pub fn sweep_grid(phi_min: f64, phi_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }
    // NaN bounds fall through to the error as well.
    if phi_min.partial_cmp(&phi_max) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidArgument(format!(
            "empty sweep range [{phi_min}, {phi_max}]"
        )));
    }
    let span = phi_max - phi_min;
    Ok((0..steps)
        .map(|k| phi_min + span * k as f64 / (steps - 1) as f64)
        .collect())
}

/// Sequential evaluation of the whole grid.
pub fn singlet_sweep_sequential(
    phi_min: f64,
    phi_max: f64,
    steps: usize,
    tol: f64,
) -> Result<Vec<SweepRow>> {
    sweep_grid(phi_min, phi_max, steps)?
        .into_iter()
        .map(|phi| evaluate_point(phi, tol))
        .collect()
}

/// Parallel evaluation of the whole grid; rows come back in grid order
/// regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn singlet_sweep_parallel(
    phi_min: f64,
    phi_max: f64,
    steps: usize,
    tol: f64,
) -> Result<Vec<SweepRow>> {
    sweep_grid(phi_min, phi_max, steps)?
        .into_par_iter()
        .map(|phi| evaluate_point(phi, tol))
        .collect()
}

/// Grid sweep over the singlet scenario, parallel when the `parallel`
/// feature is enabled.
pub fn singlet_sweep(phi_min: f64, phi_max: f64, steps: usize, tol: f64) -> Result<Vec<SweepRow>> {
    #[cfg(feature = "parallel")]
    {
        singlet_sweep_parallel(phi_min, phi_max, steps, tol)
    }
    #[cfg(not(feature = "parallel"))]
    {
        singlet_sweep_sequential(phi_min, phi_max, steps, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    const TOL: f64 = 1e-9;

    #[test]
    fn grid_shape_and_validation() {
        let grid = sweep_grid(0.0, FRAC_PI_2, 5).unwrap();
        assert_eq!(grid.len(), 5);
        assert!((grid[0] - 0.0).abs() < 1e-15);
        assert!((grid[4] - FRAC_PI_2).abs() < 1e-15);
        assert!(sweep_grid(0.0, 1.0, 1).is_err());
        assert!(sweep_grid(1.0, 0.5, 10).is_err());
    }

    #[test]
    fn s_matches_closed_form_on_a_small_grid() {
        let rows = singlet_sweep_sequential(0.0, FRAC_PI_2, 41, TOL).unwrap();
        assert_eq!(rows.len(), 41);
        for row in &rows {
            let closed = row.phi.cos().powi(2) + 0.5 * (2.0 * row.phi).sin().powi(2);
            assert!((row.s_value - closed).abs() < 1e-10, "phi {}", row.phi);
        }
    }

    #[test]
    fn boundary_and_violation_points() {
        let zero = evaluate_point(0.0, TOL).unwrap();
        assert!((zero.s_value - 1.0).abs() < 1e-12);
        assert!(zero.lp_feasible);

        let eighth = evaluate_point(FRAC_PI_8, TOL).unwrap();
        assert!((eighth.s_value - 1.1035533905932737).abs() < 1e-10);
        assert!(!eighth.lp_feasible);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let seq = singlet_sweep_sequential(0.0, FRAC_PI_2, 25, TOL).unwrap();
        let par = singlet_sweep_parallel(0.0, FRAC_PI_2, 25, TOL).unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(a.phi.to_bits(), b.phi.to_bits());
            assert_eq!(a.s_value.to_bits(), b.s_value.to_bits());
            assert_eq!(a.ch_max.to_bits(), b.ch_max.to_bits());
            assert_eq!(a.lp_feasible, b.lp_feasible);
        }
    }
}
