//! The three built-in demonstrations: the Hardy-Jordan state under local
//! Hadamards, its pointer-extended variant under block Hadamards, and the
//! singlet under opposite small rotations.

use crate::error::Result;
use crate::linalg::hermitian_eigensystem;
use crate::objects::{
    ancilla_extend, block_hadamard_channel, computational_observable, grouped_observable,
    hadamard_channel, hardy_jordan, rotation_channels, singlet, LocalObservable,
};
use crate::surfaces::{state_on, FourSurfaceScenario, SurfaceLabel};

fn spin_observable(subsystem: usize) -> Result<LocalObservable> {
    computational_observable(subsystem, &["+", "-"], &[1.0, -1.0])
}

/// Pointer readout on a dim-4 system+pointer block: outcome + collects the
/// pointer-up basis states {|r+p+>, |r-p+>}, outcome - the rest.
fn pointer_observable(subsystem: usize) -> Result<LocalObservable> {
    grouped_observable(subsystem, 4, &[("+", 1.0, &[0, 2]), ("-", -1.0, &[1, 3])])
}

/// Hardy-Jordan state with a Hadamard applied to each qubit between the
/// initial and final surfaces.
pub fn hardy_scenario() -> Result<FourSurfaceScenario> {
    FourSurfaceScenario::new(
        hardy_jordan().to_density(),
        hadamard_channel(0)?,
        hadamard_channel(1)?,
        (spin_observable(0)?, spin_observable(1)?),
        (spin_observable(0)?, spin_observable(1)?),
    )
}

/// Pointer-extended Hardy-Jordan state with a block Hadamard on each
/// system+pointer pair; measured observables are the pointer readouts.
pub fn ancilla_scenario() -> Result<FourSurfaceScenario> {
    let state = ancilla_extend(&hardy_jordan())?;
    FourSurfaceScenario::new(
        state.to_density(),
        block_hadamard_channel(0)?,
        block_hadamard_channel(1)?,
        (pointer_observable(0)?, pointer_observable(1)?),
        (pointer_observable(0)?, pointer_observable(1)?),
    )
}

/// Singlet state with the two qubits rotated in opposite directions by
/// `phi` between the initial and final surfaces.
pub fn singlet_scenario(phi: f64) -> Result<FourSurfaceScenario> {
    let (u1, u2) = rotation_channels(phi)?;
    FourSurfaceScenario::new(
        singlet().to_density(),
        u1,
        u2,
        (spin_observable(0)?, spin_observable(1)?),
        (spin_observable(0)?, spin_observable(1)?),
    )
}

/// Spectrum of one reduced block on one surface.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub surface: SurfaceLabel,
    /// 0 for the first system+pointer block, 1 for the second.
    pub block: usize,
    /// Eigenvalues sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Smallest pairwise gap among nonzero eigenvalues; `None` when fewer
    /// than two eigenvalues are nonzero.
    pub min_nonzero_gap: Option<f64>,
    /// Largest component of any nonzero eigenvector outside
    /// span{|r+p+>, |r-p->}.
    pub correlated_subspace_residual: f64,
}

const NONZERO_EPS: f64 = 1e-8;

/// Reduced-block spectra of the pointer-extended scenario on every surface.
/// The nonzero spectrum must stay nondegenerate and supported on the
/// correlated subspace for the pointer readout to track the system value.
pub fn ancilla_block_spectra(scenario: &FourSurfaceScenario) -> Result<Vec<BlockSpectrum>> {
    let mut out = Vec::with_capacity(8);
    for surface in SurfaceLabel::ALL {
        let rho = state_on(scenario, surface)?;
        for block in 0..2 {
            let reduced = rho.reduce(block)?;
            let eig = hermitian_eigensystem(&reduced, 1e-10)?;
            let nonzero: Vec<usize> = (0..eig.values.len())
                .filter(|&k| eig.values[k] > NONZERO_EPS)
                .collect();

            let mut min_gap: Option<f64> = None;
            for (a, &i) in nonzero.iter().enumerate() {
                for &j in nonzero.iter().skip(a + 1) {
                    let gap = (eig.values[i] - eig.values[j]).abs();
                    min_gap = Some(min_gap.map_or(gap, |g| g.min(gap)));
                }
            }

            let mut residual = 0.0f64;
            for &k in &nonzero {
                let v = eig.vector(k);
                for (idx, amp) in v.iter().enumerate() {
                    if idx != 0 && idx != 3 {
                        residual = residual.max(amp.norm());
                    }
                }
            }

            out.push(BlockSpectrum {
                surface,
                block,
                eigenvalues: eig.values,
                min_nonzero_gap: min_gap,
                correlated_subspace_residual: residual,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::born::FourTables;
    use crate::feasibility::{assemble_problem, solve_feasibility, FeasibilityStatus};

    #[test]
    fn hardy_zero_cells_drive_the_forced_chain() {
        let tables = FourTables::compute(&hardy_scenario().unwrap()).unwrap();
        assert!((tables.alpha.prob("+", "+").unwrap() - 1.0 / 12.0).abs() < 1e-14);
        assert!(tables.gamma.prob("+", "+").unwrap() < 1e-14);
        assert!(tables.delta.prob("+", "+").unwrap() < 1e-14);
        assert!(tables.beta.prob("-", "-").unwrap() < 1e-14);
    }

    #[test]
    fn ancilla_tables_mirror_the_qubit_case() {
        let plain = FourTables::compute(&hardy_scenario().unwrap()).unwrap();
        let extended = FourTables::compute(&ancilla_scenario().unwrap()).unwrap();
        for surface in SurfaceLabel::ALL {
            let a = plain.get(surface);
            let b = extended.get(surface);
            for l1 in ["+", "-"] {
                for l2 in ["+", "-"] {
                    assert!(
                        (a.prob(l1, l2).unwrap() - b.prob(l1, l2).unwrap()).abs() < 1e-12,
                        "{surface} ({l1},{l2})"
                    );
                }
            }
        }
        let problem = assemble_problem(&extended, 1e-8).unwrap();
        let verdict = solve_feasibility(&problem, 1e-9).unwrap();
        assert_eq!(verdict.status, FeasibilityStatus::Infeasible);
    }

    #[test]
    fn ancilla_spectra_are_nondegenerate_and_supported_correctly() {
        let spectra = ancilla_block_spectra(&ancilla_scenario().unwrap()).unwrap();
        assert_eq!(spectra.len(), 8);

        // Characteristic-polynomial oracle for the nonzero pair: the
        // restricted 2x2 block has trace 1 and determinant 1/9, so the
        // eigenvalues are (1 ± √5/3)/2.
        let disc = (1.0f64 - 4.0 / 9.0).sqrt();
        let hi = (1.0 + disc) / 2.0;
        let lo = (1.0 - disc) / 2.0;

        for s in &spectra {
            assert_eq!(s.eigenvalues.len(), 4);
            assert!((s.eigenvalues[0] - hi).abs() < 1e-12, "{:?}", s);
            assert!((s.eigenvalues[1] - lo).abs() < 1e-12, "{:?}", s);
            assert!(s.eigenvalues[2].abs() < 1e-12);
            assert!(s.eigenvalues[3].abs() < 1e-12);
            let gap = s.min_nonzero_gap.expect("two nonzero eigenvalues");
            assert!(gap > 1e-6);
            assert!((gap - disc).abs() < 1e-12);
            assert!(s.correlated_subspace_residual < 1e-8);
        }
    }

    #[test]
    fn singlet_scenario_alpha_is_channel_free() {
        let tables = FourTables::compute(&singlet_scenario(0.77).unwrap()).unwrap();
        assert!(tables.alpha.prob("+", "+").unwrap() < 1e-14);
        assert!((tables.alpha.prob("+", "-").unwrap() - 0.5).abs() < 1e-13);
    }
}
