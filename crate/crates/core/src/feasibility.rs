//! Existence of a joint distribution over all four outcome quadruples with
//! the per-surface tables as marginals, decided by phase-1 simplex, plus a
//! four-term inequality battery that cross-checks the verdict for binary
//! observables.

use std::collections::BTreeSet;

use crate::born::{overlap_consistency, FourTables};
use crate::error::{Error, Result};
use crate::surfaces::SurfaceLabel;

/// Equality system `A q = b`, `q >= 0` over outcome quadruples
/// (a1, a2, b1, b2): one total-mass row plus one row per cell of each of
/// the four tables. Redundant rows are kept; the solver handles rank.
#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    labels: [Vec<String>; 4],
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    row_names: Vec<String>,
    tables: FourTables,
}

impl FeasibilityProblem {
    pub fn num_vars(&self) -> usize {
        self.labels.iter().map(|l| l.len()).product()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    pub fn labels(&self) -> &[Vec<String>; 4] {
        &self.labels
    }

    pub fn tables(&self) -> &FourTables {
        &self.tables
    }

    pub fn row_names(&self) -> &[String] {
        &self.row_names
    }

    /// Flat index of the quadruple (i over A1 outcomes, j over A2,
    /// k over B1, l over B2).
    pub fn var_index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        let [d1, d2, d3, d4] = self.dims();
        debug_assert!(i < d1 && j < d2 && k < d3 && l < d4);
        ((i * d2 + j) * d3 + k) * d4 + l
    }

    pub fn dims(&self) -> [usize; 4] {
        [
            self.labels[0].len(),
            self.labels[1].len(),
            self.labels[2].len(),
            self.labels[3].len(),
        ]
    }

    /// Per-row residuals `A q - b` of a candidate joint distribution.
    pub fn residuals(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for {} variables",
                q.len(),
                self.num_vars()
            )));
        }
        Ok(self
            .a
            .iter()
            .zip(&self.b)
            .map(|(row, rhs)| row.iter().zip(q).map(|(c, x)| c * x).sum::<f64>() - rhs)
            .collect())
    }
}

/// Builds the marginal-equation system from four tables. Tables whose
/// shared single-observable marginals disagree beyond `overlap_tol` are
/// refused: the system would be trivially inconsistent for bookkeeping
/// reasons rather than physical ones.
pub fn assemble_problem(tables: &FourTables, overlap_tol: f64) -> Result<FeasibilityProblem> {
    let report = overlap_consistency(tables, overlap_tol);
    if !report.pass {
        return Err(Error::InconsistentTables(format!(
            "shared marginals deviate by {:.3e} (tolerance {overlap_tol:.3e})",
            report.max_deviation
        )));
    }
    let a1 = tables.alpha.labels1.clone();
    let a2 = tables.alpha.labels2.clone();
    let b1 = tables.beta.labels1.clone();
    let b2 = tables.beta.labels2.clone();
    if tables.delta.labels1 != a1
        || tables.gamma.labels2 != a2
        || tables.gamma.labels1 != b1
        || tables.delta.labels2 != b2
    {
        return Err(Error::InconsistentTables(
            "tables disagree on outcome label sets".into(),
        ));
    }

    let labels = [a1, a2, b1, b2];
    let dims = [
        labels[0].len(),
        labels[1].len(),
        labels[2].len(),
        labels[3].len(),
    ];
    let n: usize = dims.iter().product();
    let var_index =
        |i: usize, j: usize, k: usize, l: usize| ((i * dims[1] + j) * dims[2] + k) * dims[3] + l;

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut row_names = Vec::new();

    a.push(vec![1.0; n]);
    b.push(1.0);
    row_names.push("mass".to_string());

    // alpha: sum over (k, l).
    for (i, li) in labels[0].iter().enumerate() {
        for (j, lj) in labels[1].iter().enumerate() {
            let mut row = vec![0.0; n];
            for k in 0..dims[2] {
                for l in 0..dims[3] {
                    row[var_index(i, j, k, l)] = 1.0;
                }
            }
            a.push(row);
            b.push(tables.alpha.prob(li, lj)?);
            row_names.push(format!("alpha({li},{lj})"));
        }
    }
    // beta: sum over (i, j).
    for (k, lk) in labels[2].iter().enumerate() {
        for (l, ll) in labels[3].iter().enumerate() {
            let mut row = vec![0.0; n];
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    row[var_index(i, j, k, l)] = 1.0;
                }
            }
            a.push(row);
            b.push(tables.beta.prob(lk, ll)?);
            row_names.push(format!("beta({lk},{ll})"));
        }
    }
    // gamma pairs (B1, A2): sum over (i, l).
    for (k, lk) in labels[2].iter().enumerate() {
        for (j, lj) in labels[1].iter().enumerate() {
            let mut row = vec![0.0; n];
            for i in 0..dims[0] {
                for l in 0..dims[3] {
                    row[var_index(i, j, k, l)] = 1.0;
                }
            }
            a.push(row);
            b.push(tables.gamma.prob(lk, lj)?);
            row_names.push(format!("gamma({lk},{lj})"));
        }
    }
    // delta pairs (A1, B2): sum over (j, k).
    for (i, li) in labels[0].iter().enumerate() {
        for (l, ll) in labels[3].iter().enumerate() {
            let mut row = vec![0.0; n];
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    row[var_index(i, j, k, l)] = 1.0;
                }
            }
            a.push(row);
            b.push(tables.delta.prob(li, ll)?);
            row_names.push(format!("delta({li},{ll})"));
        }
    }

    Ok(FeasibilityProblem {
        labels,
        a,
        b,
        row_names,
        tables: tables.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

/// Solver outcome: a witness distribution when feasible, otherwise the
/// phase-1 objective and (for binary problems) the maximally violated
/// four-term inequality.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: FeasibilityStatus,
    pub phase1_objective: f64,
    pub witness: Option<Vec<f64>>,
    pub certificate: Option<ChEvaluation>,
    /// Set when the objective lands in (tol, 1e-6): still classified
    /// infeasible, but close enough to the knife edge to be worth flagging.
    pub marginal: bool,
}

/// Phase-1 simplex with Bland's rule. Feasible iff the minimized
/// artificial-variable mass is at most `tol`.
pub fn solve_feasibility(problem: &FeasibilityProblem, tol: f64) -> Result<Verdict> {
    let cap = 1000 * (problem.num_vars() + problem.num_constraints());
    solve_feasibility_capped(problem, tol, cap)
}

pub(crate) fn solve_feasibility_capped(
    problem: &FeasibilityProblem,
    tol: f64,
    cap: usize,
) -> Result<Verdict> {
    let (objective, witness) = phase1_simplex(&problem.a, &problem.b, cap)?;
    if objective <= tol {
        Ok(Verdict {
            status: FeasibilityStatus::Feasible,
            phase1_objective: objective,
            witness: Some(witness),
            certificate: None,
            marginal: false,
        })
    } else {
        let certificate = if problem.dims() == [2, 2, 2, 2] {
            let evals = ch_battery(&problem.tables, tol)?;
            max_violation(&evals).cloned()
        } else {
            None
        };
        Ok(Verdict {
            status: FeasibilityStatus::Infeasible,
            phase1_objective: objective,
            witness: None,
            certificate,
            marginal: objective < 1e-6,
        })
    }
}

/// Returns (phase-1 objective, candidate witness over the original vars).
fn phase1_simplex(a: &[Vec<f64>], b: &[f64], cap: usize) -> Result<(f64, Vec<f64>)> {
    const ENTER_EPS: f64 = 1e-10;
    const PIVOT_EPS: f64 = 1e-11;

    let m = a.len();
    let n = if m > 0 { a[0].len() } else { 0 };
    let rhs = n + m;
    let width = rhs + 1;

    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; width];
        let flip = b[i] < 0.0;
        for j in 0..n {
            row[j] = if flip { -a[i][j] } else { a[i][j] };
        }
        row[n + i] = 1.0;
        row[rhs] = b[i].abs();
        t.push(row);
    }
    let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();

    // Reduced costs of the original columns under the all-artificial basis.
    let mut red = vec![0.0; n];
    for (j, r) in red.iter_mut().enumerate() {
        *r = -(0..m).map(|i| t[i][j]).sum::<f64>();
    }

    let mut iterations = 0usize;
    // Bland: smallest-index improving column. Artificial columns never
    // re-enter; dropping them cannot flip the verdict since an exact
    // solution keeps every artificial at zero anyway.
    while let Some(enter) = (0..n).find(|&j| red[j] < -ENTER_EPS) {
        let mut choice: Option<(f64, usize)> = None;
        for i in 0..m {
            let coef = t[i][enter];
            if coef > PIVOT_EPS {
                let ratio = t[i][rhs] / coef;
                choice = match choice {
                    None => Some((ratio, i)),
                    Some((best, row)) => {
                        if ratio < best - 1e-12 {
                            Some((ratio, i))
                        } else if ratio < best + 1e-12 && basis[i] < basis[row] {
                            Some((ratio.min(best), i))
                        } else {
                            Some((best, row))
                        }
                    }
                };
            }
        }
        let Some((_, leave)) = choice else {
            return Err(Error::InvalidArgument(
                "phase-1 simplex found an unbounded direction".into(),
            ));
        };

        let pivot = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= pivot;
        }
        for i in 0..m {
            if i == leave {
                continue;
            }
            let f = t[i][enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i][j] -= f * t[leave][j];
                }
            }
            if t[i][rhs] < 0.0 && t[i][rhs] > -1e-12 {
                t[i][rhs] = 0.0;
            }
        }
        let rc = red[enter];
        for j in 0..n {
            red[j] -= rc * t[leave][j];
        }
        basis[leave] = enter;

        iterations += 1;
        if iterations > cap {
            return Err(Error::IterationCap(cap));
        }
    }

    let objective: f64 = (0..m)
        .filter(|&i| basis[i] >= n)
        .map(|i| t[i][rhs])
        .sum();
    let mut witness = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            witness[basis[i]] = t[i][rhs];
        }
    }
    Ok((objective, witness))
}

/// A four-term inequality `0 <= P1 + P2 + P3 - P0 <= 1` over table cells.
/// The three positive cells are chosen so that the negative cell's event is
/// covered: whenever it occurs, one of the positive events must too.
#[derive(Debug, Clone, PartialEq)]
pub struct ChInequality {
    pub positive: [(SurfaceLabel, String, String); 3],
    pub negative: (SurfaceLabel, String, String),
}

impl ChInequality {
    pub fn id(&self) -> String {
        let term = |(s, l1, l2): &(SurfaceLabel, String, String)| format!("P[{s}]({l1},{l2})");
        format!(
            "{} + {} + {} - {}",
            term(&self.positive[0]),
            term(&self.positive[1]),
            term(&self.positive[2]),
            term(&self.negative)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChEvaluation {
    pub inequality: ChInequality,
    pub value: f64,
    pub violated: bool,
}

impl ChEvaluation {
    /// Distance outside [0, 1]; zero when the inequality holds.
    pub fn violation(&self) -> f64 {
        (-self.value).max(self.value - 1.0).max(0.0)
    }
}

/// Evaluates every four-term inequality obtained by choosing which table
/// contributes the subtracted cell and assigning outcome labels to the four
/// observables, deduplicated. Requires binary observables throughout.
pub fn ch_battery(tables: &FourTables, tol: f64) -> Result<Vec<ChEvaluation>> {
    for t in tables.iter() {
        if t.labels1.len() != 2 || t.labels2.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "battery requires binary observables, {} table is {}x{}",
                t.surface,
                t.labels1.len(),
                t.labels2.len()
            )));
        }
    }
    let a1 = &tables.alpha.labels1;
    let a2 = &tables.alpha.labels2;
    let b1 = &tables.beta.labels1;
    let b2 = &tables.beta.labels2;

    // For each choice of the subtracted table T0 = (X, Y) at (u, v):
    // the opposite table T3 = (X', Y') takes (s, t), the table pairing
    // X with Y' takes (u, t̄), and the table pairing X' with Y takes (s̄, v).
    // Entries are ((T0, T1, T2, T3), labels of X, Y, X', Y').
    use SurfaceLabel::*;
    let roles: [([SurfaceLabel; 4], [&Vec<String>; 4]); 4] = [
        ([Alpha, Delta, Gamma, Beta], [a1, a2, b1, b2]),
        ([Beta, Gamma, Delta, Alpha], [b1, b2, a1, a2]),
        ([Gamma, Beta, Alpha, Delta], [b1, a2, a1, b2]),
        ([Delta, Alpha, Beta, Gamma], [a1, b2, b1, a2]),
    ];

    let other = |labels: &Vec<String>, l: &str| -> String {
        if labels[0] == l {
            labels[1].clone()
        } else {
            labels[0].clone()
        }
    };

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for ([t0, t1, t2, t3], [lx, ly, lxp, lyp]) in roles {
        for u in lx.iter() {
            for v in ly.iter() {
                for s in lxp.iter() {
                    for tt in lyp.iter() {
                        let inequality = ChInequality {
                            positive: [
                                (t1, u.clone(), other(lyp, tt)),
                                (t2, other(lxp, s), v.clone()),
                                (t3, s.clone(), tt.clone()),
                            ],
                            negative: (t0, u.clone(), v.clone()),
                        };
                        let mut key: Vec<String> = inequality
                            .positive
                            .iter()
                            .map(|(surf, l1, l2)| format!("+{surf}:{l1}:{l2}"))
                            .collect();
                        key.sort();
                        key.push(format!(
                            "-{}:{}:{}",
                            inequality.negative.0, inequality.negative.1, inequality.negative.2
                        ));
                        if !seen.insert(key.join("|")) {
                            continue;
                        }
                        let value = inequality
                            .positive
                            .iter()
                            .map(|(surf, l1, l2)| tables.get(*surf).prob(l1, l2))
                            .sum::<Result<f64>>()?
                            - tables
                                .get(inequality.negative.0)
                                .prob(&inequality.negative.1, &inequality.negative.2)?;
                        let violated = value < -tol || value > 1.0 + tol;
                        out.push(ChEvaluation {
                            inequality,
                            value,
                            violated,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Largest battery value (interesting for upper-bound violations).
pub fn battery_max_value(evals: &[ChEvaluation]) -> Option<f64> {
    evals
        .iter()
        .map(|e| e.value)
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

/// The evaluation with the largest distance outside [0, 1], if any member
/// is violated.
pub fn max_violation(evals: &[ChEvaluation]) -> Option<&ChEvaluation> {
    evals
        .iter()
        .filter(|e| e.violated)
        .max_by(|a, b| a.violation().partial_cmp(&b.violation()).unwrap())
}

/// Recheck of a feasible witness against every marginal equation.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub max_residual: f64,
    pub min_entry: f64,
    pub pass: bool,
}

pub fn verify_witness(
    problem: &FeasibilityProblem,
    witness: &[f64],
    tol: f64,
) -> Result<WitnessReport> {
    let residuals = problem.residuals(witness)?;
    let max_residual = residuals.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let min_entry = witness.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(WitnessReport {
        max_residual,
        min_entry,
        pass: max_residual <= 10.0 * tol && min_entry >= -tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::born::{FourTables, MarginalTable};
    use crate::objects::{
        computational_observable, dephasing_kraus, hadamard_channel, hardy_jordan,
        rotation_channels, singlet, LocalObservable, QuantumChannel, StateVector,
    };
    use crate::surfaces::FourSurfaceScenario;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const TOL: f64 = 1e-9;

    fn r_observable(subsystem: usize) -> LocalObservable {
        computational_observable(subsystem, &["+", "-"], &[1.0, -1.0]).unwrap()
    }

    fn scenario(
        state: StateVector,
        ch1: QuantumChannel,
        ch2: QuantumChannel,
    ) -> FourSurfaceScenario {
        FourSurfaceScenario::new(
            state.to_density(),
            ch1,
            ch2,
            (r_observable(0), r_observable(1)),
            (r_observable(0), r_observable(1)),
        )
        .unwrap()
    }

    fn hardy_tables() -> FourTables {
        FourTables::compute(&scenario(
            hardy_jordan(),
            hadamard_channel(0).unwrap(),
            hadamard_channel(1).unwrap(),
        ))
        .unwrap()
    }

    fn singlet_tables(phi: f64) -> FourTables {
        let (u1, u2) = rotation_channels(phi).unwrap();
        FourTables::compute(&scenario(singlet(), u1, u2)).unwrap()
    }

    fn binary_labels() -> (Vec<String>, Vec<String>) {
        (vec!["+".into(), "-".into()], vec!["+".into(), "-".into()])
    }

    fn table_from_vec(surface: SurfaceLabel, n1: &str, n2: &str, p: [f64; 4]) -> MarginalTable {
        let (l1, l2) = binary_labels();
        MarginalTable::from_entries(
            surface,
            n1,
            n2,
            l1,
            l2,
            vec![1.0, -1.0],
            vec![1.0, -1.0],
            vec![
                (("+".into(), "+".into()), p[0]),
                (("+".into(), "-".into()), p[1]),
                (("-".into(), "+".into()), p[2]),
                (("-".into(), "-".into()), p[3]),
            ],
        )
        .unwrap()
    }

    /// Marginalizes an explicit joint distribution into four tables; any
    /// instance built this way is feasible by construction.
    fn tables_from_joint(q: &[f64; 16]) -> FourTables {
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * 2 + j) * 2 + k) * 2 + l;
        let mut alpha = [0.0; 4];
        let mut beta = [0.0; 4];
        let mut gamma = [0.0; 4];
        let mut delta = [0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let p = q[idx(i, j, k, l)];
                        alpha[i * 2 + j] += p;
                        beta[k * 2 + l] += p;
                        gamma[k * 2 + j] += p;
                        delta[i * 2 + l] += p;
                    }
                }
            }
        }
        FourTables {
            alpha: table_from_vec(SurfaceLabel::Alpha, "A1", "A2", alpha),
            beta: table_from_vec(SurfaceLabel::Beta, "B1", "B2", beta),
            gamma: table_from_vec(SurfaceLabel::Gamma, "B1", "A2", gamma),
            delta: table_from_vec(SurfaceLabel::Delta, "A1", "B2", delta),
        }
    }

    fn random_joint(rng: &mut StdRng) -> [f64; 16] {
        let mut q = [0.0; 16];
        let mut sum = 0.0;
        for v in q.iter_mut() {
            *v = rng.random::<f64>();
            sum += *v;
        }
        for v in q.iter_mut() {
            *v /= sum;
        }
        q
    }

    fn random_state(rng: &mut StdRng) -> StateVector {
        let raw: Vec<num_complex::Complex64> = (0..4)
            .map(|_| num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        StateVector::new(
            crate::objects::qubit_pair_layout(),
            raw.into_iter().map(|z| z / norm).collect(),
        )
        .unwrap()
    }

    fn random_unitary_channel(rng: &mut StdRng, subsystem: usize) -> QuantumChannel {
        let data: Vec<num_complex::Complex64> = (0..4)
            .map(|_| num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let m = crate::linalg::ComplexMatrix::new(2, 2, data).unwrap();
        let h = m.add(&m.adjoint()).scale(num_complex::Complex64::new(0.5, 0.0));
        let u = crate::linalg::exp_generator(&h, 1.0).unwrap();
        QuantumChannel::unitary(subsystem, u).unwrap()
    }

    fn random_channel(rng: &mut StdRng, subsystem: usize) -> QuantumChannel {
        if rng.random::<f64>() < 0.5 {
            random_unitary_channel(rng, subsystem)
        } else {
            dephasing_kraus(subsystem, rng.random::<f64>()).unwrap()
        }
    }

    #[test]
    fn assemble_counts_variables_and_constraints() {
        let problem = assemble_problem(&hardy_tables(), 1e-8).unwrap();
        assert_eq!(problem.num_vars(), 16);
        assert_eq!(problem.num_constraints(), 17);
    }

    #[test]
    fn assemble_refuses_inconsistent_tables() {
        let mut tables = hardy_tables();
        tables.delta = table_from_vec(
            SurfaceLabel::Delta,
            "A1",
            "B2",
            [0.05, 1.0 / 6.0 - 0.05, 2.0 / 3.0, 1.0 / 6.0],
        );
        assert!(matches!(
            assemble_problem(&tables, 1e-8),
            Err(Error::InconsistentTables(_))
        ));
    }

    #[test]
    fn product_tables_admit_product_witness() {
        // Independent marginals: q = outer product of the singles.
        let q_joint = {
            let m = [0.3f64, 0.7, 0.6, 0.4, 0.2, 0.8, 0.9, 0.1];
            let mut q = [0.0; 16];
            let mut pos = 0;
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            q[pos] = m[i] * m[2 + j] * m[4 + k] * m[6 + l];
                            pos += 1;
                        }
                    }
                }
            }
            q
        };
        let tables = tables_from_joint(&q_joint);
        let problem = assemble_problem(&tables, 1e-8).unwrap();
        let verdict = solve_feasibility(&problem, TOL).unwrap();
        assert_eq!(verdict.status, FeasibilityStatus::Feasible);
        let witness = verdict.witness.unwrap();
        let report = verify_witness(&problem, &witness, TOL).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);

        // The product joint itself is also a witness.
        let report = verify_witness(&problem, &q_joint, TOL).unwrap();
        assert!(report.max_residual < 1e-12);
    }

    #[test]
    fn identity_channels_on_a_product_state_are_feasible() {
        let plus_minus = StateVector::new(
            crate::objects::qubit_pair_layout(),
            vec![
                num_complex::Complex64::ZERO,
                num_complex::Complex64::ONE,
                num_complex::Complex64::ZERO,
                num_complex::Complex64::ZERO,
            ],
        )
        .unwrap();
        let sc = scenario(
            plus_minus,
            QuantumChannel::identity(0, 2),
            QuantumChannel::identity(1, 2),
        );
        let tables = FourTables::compute(&sc).unwrap();
        let problem = assemble_problem(&tables, 1e-8).unwrap();
        let verdict = solve_feasibility(&problem, TOL).unwrap();
        assert_eq!(verdict.status, FeasibilityStatus::Feasible);
        let witness = verdict.witness.unwrap();
        assert!(verify_witness(&problem, &witness, TOL).unwrap().pass);
        // All four tables are copies of the same product table, so the
        // deterministic coupling concentrates on a single quadruple.
        let peak = problem.var_index(0, 1, 0, 1);
        assert!((witness[peak] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hardy_tables_are_infeasible() {
        // Logical oracle: gamma forces B1=- whenever A2=+, delta forces
        // B2=- whenever A1=+, so the 1/12 of mass at (A1,A2)=(+,+) must
        // land on (B1,B2)=(-,-), which beta gives probability zero.
        let tables = hardy_tables();
        assert!(tables.gamma.prob("+", "+").unwrap() < 1e-14);
        assert!(tables.delta.prob("+", "+").unwrap() < 1e-14);
        assert!(tables.beta.prob("-", "-").unwrap() < 1e-14);
        assert!((tables.alpha.prob("+", "+").unwrap() - 1.0 / 12.0).abs() < 1e-14);

        let problem = assemble_problem(&tables, 1e-8).unwrap();
        let verdict = solve_feasibility(&problem, TOL).unwrap();
        assert_eq!(verdict.status, FeasibilityStatus::Infeasible);
        assert!(verdict.phase1_objective > TOL);
        let cert = verdict.certificate.expect("binary certificate");
        assert!(cert.violation() >= 1.0 / 12.0 - 1e-9, "violation {}", cert.violation());
    }

    #[test]
    fn singlet_pi_over_8_is_infeasible_with_known_ch_value() {
        let tables = singlet_tables(std::f64::consts::FRAC_PI_8);
        let problem = assemble_problem(&tables, 1e-8).unwrap();
        let verdict = solve_feasibility(&problem, TOL).unwrap();
        assert_eq!(verdict.status, FeasibilityStatus::Infeasible);

        let evals = ch_battery(&tables, TOL).unwrap();
        let max = battery_max_value(&evals).unwrap();
        assert!((max - 1.1035533905932737).abs() < 1e-10, "max {max}");
    }

    #[test]
    fn battery_matches_closed_form_on_lower_quarter() {
        for &phi in &[0.0, 0.1, 0.3, std::f64::consts::FRAC_PI_8, 0.7] {
            let tables = singlet_tables(phi);
            let evals = ch_battery(&tables, TOL).unwrap();
            let max = battery_max_value(&evals).unwrap();
            let closed = phi.cos().powi(2) + 0.5 * (2.0 * phi).sin().powi(2);
            if phi <= std::f64::consts::FRAC_PI_4 {
                assert!((max - closed).abs() < 1e-12, "phi {phi}: {max} vs {closed}");
            }
            if phi == 0.0 {
                assert!(evals.iter().all(|e| !e.violated));
                assert!((max - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn battery_members_hold_on_explicit_joints() {
        // Every battery member is a valid inequality: no table set built by
        // marginalizing an actual joint distribution may violate any of them.
        let mut rng = StdRng::seed_from_u64(101);
        for _ in 0..100 {
            let q = random_joint(&mut rng);
            let tables = tables_from_joint(&q);
            let evals = ch_battery(&tables, TOL).unwrap();
            for e in &evals {
                assert!(!e.violated, "{} = {}", e.inequality.id(), e.value);
            }
        }
    }

    #[test]
    fn battery_size_and_dedup() {
        let evals = ch_battery(&hardy_tables(), TOL).unwrap();
        assert_eq!(evals.len(), 64);
        let ids: BTreeSet<String> = evals.iter().map(|e| e.inequality.id()).collect();
        assert_eq!(ids.len(), 64);
    }

    #[test]
    fn lp_and_battery_agree_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(202);

        // Route (a): marginalized joints, always feasible.
        for _ in 0..120 {
            let tables = tables_from_joint(&random_joint(&mut rng));
            let problem = assemble_problem(&tables, 1e-8).unwrap();
            let verdict = solve_feasibility(&problem, TOL).unwrap();
            assert_eq!(verdict.status, FeasibilityStatus::Feasible);
            let report = verify_witness(&problem, &verdict.witness.unwrap(), TOL).unwrap();
            assert!(report.pass, "residual {}", report.max_residual);
            assert!(ch_battery(&tables, TOL).unwrap().iter().all(|e| !e.violated));
        }

        // Route (b): the scenario pipeline at random states and channels.
        for _ in 0..120 {
            let sc = scenario(
                random_state(&mut rng),
                random_channel(&mut rng, 0),
                random_channel(&mut rng, 1),
            );
            let tables = FourTables::compute(&sc).unwrap();
            let problem = assemble_problem(&tables, 1e-8).unwrap();
            let verdict = solve_feasibility(&problem, TOL).unwrap();
            let battery_violated = ch_battery(&tables, TOL)
                .unwrap()
                .iter()
                .any(|e| e.violated);
            assert_eq!(
                verdict.status == FeasibilityStatus::Infeasible,
                battery_violated,
                "LP and battery disagree (objective {:.3e})",
                verdict.phase1_objective
            );
            if let Some(witness) = verdict.witness {
                assert!(verify_witness(&problem, &witness, TOL).unwrap().pass);
            }
        }
    }

    #[test]
    fn corrupted_witness_reports_injected_residual() {
        let tables = tables_from_joint(&random_joint(&mut StdRng::seed_from_u64(7)));
        let problem = assemble_problem(&tables, 1e-8).unwrap();
        let verdict = solve_feasibility(&problem, TOL).unwrap();
        let mut witness = verdict.witness.unwrap();
        witness[3] += 0.125;
        let report = verify_witness(&problem, &witness, TOL).unwrap();
        assert!(!report.pass);
        // The mass row residual picks up exactly the injected bump.
        assert!((report.max_residual - 0.125).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_is_a_solver_failure() {
        let tables = hardy_tables();
        let problem = assemble_problem(&tables, 1e-8).unwrap();
        assert!(matches!(
            solve_feasibility_capped(&problem, TOL, 1),
            Err(Error::IterationCap(1))
        ));
    }
}
