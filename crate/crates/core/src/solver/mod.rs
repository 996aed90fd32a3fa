//! Maximizes a real-linear objective over a matrix subspace subject to a
//! unit bound on a constraint seminorm — the computational realization of
//! the supremum in the spectral distance formula.
//!
//! The algorithm is a cutting-plane (Kelley) scheme: each iteration
//! linearizes the constraint at the current master solution through its top
//! singular pairs and adds the cuts to a small dense LP. The master is
//! solved over the span generated by the objective and the accumulated cut
//! gradients; restricting to that span preserves the LP value as a valid
//! upper bound, because both the objective and every cut vanish on its
//! orthogonal complement. Feasible iterates, rescaled to the constraint
//! boundary, certify lower bounds; the reported value is always the
//! certified feasible one.

pub mod master;
pub mod oracle;
pub mod space;

use nalgebra::DVector;

use crate::error::{CoreError, Result};
use crate::geometry::TruncatedCircleGeometry;

pub use oracle::{ConstraintOracle, DerivSupOracle, MatrixNormOracle};

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Certified gap within tolerance; the witness is feasible.
    Optimal,
    /// Iteration cap reached; value and gap are still certified.
    MaxIterations,
    /// The certified value exceeded the configured cap without a kernel
    /// certificate; numerically divergent.
    UnboundedSuspected,
    /// A constraint-kernel direction carries nonzero objective: the supremum
    /// is exactly infinite.
    KernelUnbounded,
}

/// Certified output of a solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Certified value (+∞ for kernel-unbounded problems).
    pub value: f64,
    /// Coefficient vector of the optimal element (feasible for finite
    /// statuses; a kernel direction for kernel-unbounded ones).
    pub witness: DVector<f64>,
    /// oracle norm of the witness minus one.
    pub feas_residual: f64,
    /// Upper bound minus certified value; +∞ when no upper bound was
    /// established.
    pub gap_estimate: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative gap target.
    pub rel_gap: f64,
    /// Absolute gap floor.
    pub abs_gap: f64,
    pub max_iterations: usize,
    /// Certified values above this cap are reported as suspected-unbounded.
    pub value_cap: f64,
    /// Feasibility tolerance demanded of the master LP.
    pub lp_feas_tol: f64,
    /// Cuts added per iteration from near-top singular pairs.
    pub max_block_cuts: usize,
    /// Relative window below the top singular value for block cuts.
    pub block_window: f64,
    /// Cut-row cap; the oldest inactive rows are pruned beyond it.
    pub max_rows: usize,
    /// Safety box on the master's span coordinates; bounds from a solution
    /// touching it are discarded.
    pub initial_radius: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_gap: 1e-5,
            abs_gap: 1e-9,
            max_iterations: 2000,
            value_cap: 1e4,
            lp_feas_tol: 1e-9,
            max_block_cuts: 8,
            block_window: 0.08,
            max_rows: 1600,
            initial_radius: 1e7,
        }
    }
}

/// A spectral-norm-constrained linear maximization:
/// sup { obj·c : h(c) ≤ 1 } over the coefficient space of a subspace basis.
pub struct ConvexProblem {
    pub objective: DVector<f64>,
    pub oracle: Box<dyn ConstraintOracle>,
    /// Known kernel directions of the constraint map (each verified before
    /// use). The identity direction of a unital subspace always belongs
    /// here, which projects the gauge freedom out of the solve.
    pub kernel: Vec<DVector<f64>>,
    /// A constant with h(c) ≥ norm_lower·‖c‖₂ on the kernel complement
    /// (0 disables it). It fences master directions no cut has visited,
    /// which keeps the exploration phase short; it is spot-checked against
    /// the oracle before the solve.
    pub norm_lower: f64,
    /// Candidate near-optimal elements; the solve seeds its cut model at
    /// them. Purely an accelerator: cuts are valid wherever generated.
    pub warm_starts: Vec<DVector<f64>>,
    /// Gram condition number of the underlying basis.
    pub gram_condition: f64,
}

impl ConvexProblem {
    /// Build a problem, checking that the objective annihilates the
    /// identity direction (states on both sides are unital).
    pub fn new(
        objective: DVector<f64>,
        oracle: Box<dyn ConstraintOracle>,
        kernel: Vec<DVector<f64>>,
        norm_lower: f64,
        gram_condition: f64,
        identity: Option<&DVector<f64>>,
    ) -> Result<Self> {
        if oracle.coeff_dim() != objective.len() {
            return Err(CoreError::DimensionMismatch {
                expected: oracle.coeff_dim(),
                got: objective.len(),
            });
        }
        if let Some(id) = identity {
            let overlap = objective.dot(id).abs();
            if overlap > 1e-10 * objective.norm().max(1.0) * id.norm().max(1.0) {
                return Err(CoreError::InvalidParameter(format!(
                    "objective does not annihilate the identity (overlap {overlap:.3e})"
                )));
            }
        }
        Ok(Self {
            objective,
            oracle,
            kernel,
            norm_lower,
            warm_starts: Vec::new(),
            gram_condition,
        })
    }

    pub fn with_warm_starts(mut self, warm_starts: Vec<DVector<f64>>) -> Self {
        self.warm_starts = warm_starts;
        self
    }
}

fn orthonormalize(vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for b in &basis {
            let c = r.dot(b);
            r -= b * c;
        }
        let n = r.norm();
        if n > 1e-12 * v.norm().max(1.0) {
            basis.push(r / n);
        }
    }
    basis
}

struct CutStore {
    /// Full-dimension gradients, kept to extend rows when the span grows.
    grads: Vec<DVector<f64>>,
    rows: Vec<Vec<f64>>,
    last_active: Vec<usize>,
}

impl CutStore {
    fn prune(&mut self, keep: usize, iteration: usize) {
        if self.rows.len() <= keep {
            return;
        }
        // Retain recently-active rows; among the rest drop the stalest.
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.last_active[i]));
        order.truncate(keep);
        order.sort_unstable();
        fn select<T: Default>(src: &mut Vec<T>, order: &[usize]) {
            let mut out = Vec::with_capacity(order.len());
            for &i in order {
                out.push(std::mem::take(&mut src[i]));
            }
            *src = out;
        }
        select(&mut self.grads, &order);
        select(&mut self.rows, &order);
        self.last_active = order.iter().map(|_| iteration).collect();
    }
}

/// Solve the constrained maximization. See the module docs for the scheme.
pub fn maximize(problem: &ConvexProblem, opts: &SolverOptions) -> Result<SolveReport> {
    let d = problem.objective.len();
    if problem.oracle.coeff_dim() != d {
        return Err(CoreError::DimensionMismatch {
            expected: problem.oracle.coeff_dim(),
            got: d,
        });
    }
    if !problem.gram_condition.is_finite() || problem.gram_condition > 1e12 {
        return Err(CoreError::IllConditionedBasis {
            condition: problem.gram_condition,
        });
    }

    // Kernel directions: verify membership, then test the objective on them.
    let kernel = orthonormalize(&problem.kernel);
    for k in &kernel {
        let h = problem.oracle.norm(k);
        if h > 1e-9 {
            return Err(CoreError::InvalidParameter(format!(
                "declared kernel direction has constraint norm {h:.3e}"
            )));
        }
    }
    let obj_norm = problem.objective.norm();
    for k in &kernel {
        let overlap = problem.objective.dot(k);
        if overlap.abs() > 1e-9 * obj_norm.max(1e-12) {
            let witness = if overlap > 0.0 { k.clone() } else { -k.clone() };
            let feas = problem.oracle.norm(&witness) - 1.0;
            return Ok(SolveReport {
                value: f64::INFINITY,
                witness,
                feas_residual: feas,
                gap_estimate: 0.0,
                status: SolveStatus::KernelUnbounded,
                iterations: 0,
            });
        }
    }

    // Spot-check the declared norm floor h ≥ σ‖·‖ on pseudo-random
    // kernel-orthogonal directions; a wrong floor would corrupt bounds.
    if problem.norm_lower > 0.0 {
        let mut seed = 0x0f_f1ce_u64;
        for _ in 0..3 {
            let mut v = DVector::from_fn(d, |i, _| {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407 + i as u64);
                ((seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            });
            for k in &kernel {
                let c = v.dot(k);
                v -= k * c;
            }
            let n = v.norm();
            if n < 1e-9 {
                continue;
            }
            v /= n;
            let h = problem.oracle.norm(&v);
            if h < problem.norm_lower * (1.0 - 1e-9) {
                return Err(CoreError::InvalidParameter(format!(
                    "declared norm floor {:.6e} exceeds the constraint norm {h:.6e} \
                     of a probe direction",
                    problem.norm_lower
                )));
            }
        }
    }

    let mut obj_proj = problem.objective.clone();
    for k in &kernel {
        let c = obj_proj.dot(k);
        obj_proj -= k * c;
    }
    if obj_proj.norm() <= 1e-14 * obj_norm.max(1.0) {
        return Ok(SolveReport {
            value: 0.0,
            witness: DVector::zeros(d),
            feas_residual: -1.0,
            gap_estimate: 0.0,
            status: SolveStatus::Optimal,
            iterations: 0,
        });
    }

    // The span of the objective and all cut gradients; both it and every
    // cut row are extended as new directions appear.
    let mut span: Vec<DVector<f64>> = vec![obj_proj.normalize()];
    let mut obj_span: Vec<f64> = vec![obj_proj.norm()];
    let mut cuts = CutStore {
        grads: Vec::new(),
        rows: Vec::new(),
        last_active: Vec::new(),
    };

    let radius = opts.initial_radius;
    let mut best_upper = f64::INFINITY;
    // c = 0 is always feasible, so value 0 is certified from the start.
    let mut best_value = 0.0_f64;
    let mut best_raw: Option<(DVector<f64>, f64)> = None; // (c, fast norm)
    let mut iterations = 0;

    let finish = |status: SolveStatus,
                  best_value: f64,
                  best_raw: &Option<(DVector<f64>, f64)>,
                  best_upper: f64,
                  iterations: usize,
                  problem: &ConvexProblem|
     -> SolveReport {
        let (witness, value) = match best_raw {
            Some((c, _)) => {
                let h = problem.oracle.norm(c);
                if h > 0.0 {
                    let w = c / h;
                    let v = problem.objective.dot(&w);
                    (w, v)
                } else {
                    (DVector::zeros(d), 0.0)
                }
            }
            None => (DVector::zeros(d), 0.0),
        };
        let value = value.max(0.0).max(if best_raw.is_none() { 0.0 } else { best_value.min(value) });
        let feas_residual = if witness.norm() == 0.0 {
            -1.0
        } else {
            problem.oracle.norm(&witness) - 1.0
        };
        let gap = if best_upper.is_finite() {
            (best_upper - value).max(0.0)
        } else {
            f64::INFINITY
        };
        SolveReport {
            value,
            witness,
            feas_residual,
            gap_estimate: gap,
            status,
            iterations,
        }
    };

    while iterations < opts.max_iterations {
        iterations += 1;
        let sol = master::solve_master(
            &obj_span,
            &cuts.rows,
            radius,
            opts.lp_feas_tol,
            problem.norm_lower,
        )?;

        // Model activity drives cut retention.
        let t_at_point = cuts
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let lhs: f64 = row.iter().zip(&sol.point).map(|(a, b)| a * b).sum();
                (i, lhs.abs())
            })
            .collect::<Vec<_>>();
        let t_max = t_at_point
            .iter()
            .map(|&(_, v)| v)
            .fold(0.0_f64, f64::max);
        for (i, v) in t_at_point {
            if v >= t_max * (1.0 - 1e-6) {
                cuts.last_active[i] = iterations;
            }
        }

        let mut c_t: DVector<f64> = DVector::zeros(d);
        for (s, b) in sol.point.iter().zip(&span) {
            c_t += b * *s;
        }
        let (h_t, grads) = problem
            .oracle
            .cuts(&c_t, opts.max_block_cuts, opts.block_window);

        let obj_ct = problem.objective.dot(&c_t);
        if h_t > 1e-300 && obj_ct > 0.0 {
            let cand = obj_ct / h_t;
            if cand > best_value {
                best_value = cand;
                best_raw = Some((c_t.clone(), h_t));
            }
        }

        if !sol.box_touched && sol.model_min > 1e-300 {
            best_upper = best_upper.min(1.0 / sol.model_min);
        }

        if std::env::var_os("SPECTRAL_CUTOFF_TRACE").is_some() {
            eprintln!(
                "iter {iterations}: span {} rows {} touched {} model {:.6e} h {h_t:.3e} \
                 L {best_value:.6e} U {best_upper:.6e}",
                span.len(),
                cuts.rows.len(),
                sol.box_touched,
                sol.model_min,
            );
        }

        let tol = opts
            .abs_gap
            .max(opts.rel_gap * best_upper.abs().max(best_value.abs()));
        if best_upper.is_finite() && best_upper - best_value <= tol {
            // Re-certify the candidate with the oracle's certified norm
            // before declaring optimality.
            if let Some((c, _)) = &best_raw {
                let h = problem.oracle.norm(c);
                let certified = if h > 0.0 { problem.objective.dot(c) / h } else { 0.0 };
                if best_upper - certified <= tol {
                    return Ok(finish(
                        SolveStatus::Optimal,
                        certified,
                        &best_raw,
                        best_upper,
                        iterations,
                        problem,
                    ));
                }
                best_value = certified.max(0.0);
            } else {
                // Zero is the optimum.
                return Ok(finish(
                    SolveStatus::Optimal,
                    0.0,
                    &None,
                    best_upper,
                    iterations,
                    problem,
                ));
            }
        }

        if best_value > opts.value_cap {
            return Ok(finish(
                SolveStatus::UnboundedSuspected,
                best_value,
                &best_raw,
                best_upper,
                iterations,
                problem,
            ));
        }

        for g in grads {
            let mut g_perp = g.clone();
            for k in &kernel {
                let c = g_perp.dot(k);
                g_perp -= k * c;
            }
            // Extend the span if the gradient leaves it.
            let mut r = g_perp.clone();
            for b in &span {
                let c = r.dot(b);
                r -= b * c;
            }
            if r.norm() > 1e-10 * g_perp.norm().max(1e-300) {
                let b_new = r.normalize();
                for (row, grad) in cuts.rows.iter_mut().zip(&cuts.grads) {
                    row.push(grad.dot(&b_new));
                }
                obj_span.push(obj_proj.dot(&b_new));
                span.push(b_new);
            }
            let row: Vec<f64> = span.iter().map(|b| g_perp.dot(b)).collect();
            cuts.grads.push(g_perp);
            cuts.rows.push(row);
            cuts.last_active.push(iterations);
        }
        if cuts.rows.len() > opts.max_rows {
            cuts.prune(3 * opts.max_rows / 4, iterations);
        }
    }

    Ok(finish(
        SolveStatus::MaxIterations,
        best_value,
        &best_raw,
        best_upper,
        iterations,
        problem,
    ))
}

/// Recompute the objective value and feasibility residual of a witness from
/// the problem data alone, independent of any solve.
pub fn certify(problem: &ConvexProblem, witness: &DVector<f64>) -> Result<(f64, f64)> {
    if witness.len() != problem.objective.len() {
        return Err(CoreError::DimensionMismatch {
            expected: problem.objective.len(),
            got: witness.len(),
        });
    }
    let value = problem.objective.dot(witness);
    let residual = problem.oracle.norm(witness) - 1.0;
    Ok((value, residual))
}

/// Growth profile of the truncated-flat distance between two circle points
/// as the symbol band widens: one (band, value) pair per requested band.
/// The feasible sets are nested, so the sequence is nondecreasing up to
/// solver tolerance.
pub fn divergence_probe(
    geom: &TruncatedCircleGeometry,
    x: f64,
    y: f64,
    bands: &[usize],
    opts: &SolverOptions,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::with_capacity(bands.len());
    for &band in bands {
        let result = crate::distances::distance_truncated_flat(geom, x, y, band, opts)?;
        let value = result.value.finite().ok_or_else(|| {
            CoreError::SolverFailure(
                "truncated-flat distance at finite band cannot be infinite".into(),
            )
        })?;
        out.push((band, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::space::{SymbolCoords, ToeplitzCoords};
    use super::*;
    use crate::geometry::build_circle;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    /// 1-D problem: maximize c·t subject to |t|·‖X₀‖ ≤ 1.
    fn one_dim_problem(c: f64, x0: f64) -> ConvexProblem {
        let map = space::LinearMatrixMap {
            out_dim: 1,
            images: vec![vec![(0, 0, Complex64::new(x0, 0.0))]],
        };
        ConvexProblem {
            objective: DVector::from_vec(vec![c]),
            oracle: Box::new(MatrixNormOracle { map }),
            kernel: vec![],
            norm_lower: 0.0,
            gram_condition: 1.0,
        }
    }

    #[test]
    fn one_dimensional_closed_form() {
        let p = one_dim_problem(3.0, 4.0);
        let report = maximize(&p, &SolverOptions::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert_relative_eq!(report.value, 3.0 / 4.0, epsilon = 1e-7);
        assert!(report.feas_residual <= 1e-7);
    }

    #[test]
    fn kernel_direction_with_objective_is_unbounded() {
        // Identity-only subspace with an artificial nonzero objective.
        let map = space::LinearMatrixMap {
            out_dim: 2,
            images: vec![vec![]], // K = 0 on the single direction
        };
        let p = ConvexProblem {
            objective: DVector::from_vec(vec![1.0]),
            oracle: Box::new(MatrixNormOracle { map }),
            kernel: vec![DVector::from_vec(vec![1.0])],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let report = maximize(&p, &SolverOptions::default()).unwrap();
        assert_eq!(report.status, SolveStatus::KernelUnbounded);
        assert!(report.value.is_infinite());
        assert!(problem_objective(&p, &report.witness) > 0.0);
        assert!(p.oracle.norm(&report.witness) <= 1e-9);
    }

    fn problem_objective(p: &ConvexProblem, w: &DVector<f64>) -> f64 {
        p.objective.dot(w)
    }

    #[test]
    fn certify_zero_witness() {
        let p = one_dim_problem(1.0, 2.0);
        let (v, r) = certify(&p, &DVector::zeros(1)).unwrap();
        assert_eq!(v, 0.0);
        assert_relative_eq!(r, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn solver_witness_recertifies() {
        let p = one_dim_problem(2.0, 5.0);
        let report = maximize(&p, &SolverOptions::default()).unwrap();
        let (v, r) = certify(&p, &report.witness).unwrap();
        assert_relative_eq!(v, report.value, epsilon = 1e-9);
        assert!((r - report.feas_residual).abs() <= 1e-9);
    }

    #[test]
    fn zero_objective_returns_zero() {
        let geom = build_circle(1).unwrap();
        let coords = ToeplitzCoords { n: 1 };
        let p = ConvexProblem {
            objective: DVector::zeros(coords.coeff_dim()),
            oracle: Box::new(MatrixNormOracle {
                map: coords.bi_commutator_map(&geom),
            }),
            kernel: vec![coords.identity_coeffs()],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let report = maximize(&p, &SolverOptions::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        assert_eq!(report.value, 0.0);
        assert_relative_eq!(report.feas_residual, -1.0, epsilon = 1e-12);
    }

    /// Brute-force oracle: by homogeneity the optimum is
    /// max over directions u of obj·u / h(u); scan a dense direction grid
    /// with a coordinatewise polish.
    fn brute_force_ratio(p: &ConvexProblem, steps: usize) -> f64 {
        let d = p.objective.len();
        let mut best = 0.0_f64;
        let mut best_dir = DVector::zeros(d);
        let mut grid = vec![0usize; d];
        loop {
            let dir = DVector::from_iterator(
                d,
                grid.iter()
                    .map(|&g| -1.0 + 2.0 * g as f64 / (steps - 1) as f64),
            );
            if dir.norm() > 1e-9 {
                let h = p.oracle.norm(&dir);
                if h > 1e-12 {
                    let v = p.objective.dot(&dir) / h;
                    if v > best {
                        best = v;
                        best_dir = dir;
                    }
                }
            }
            let mut carry = 0;
            while carry < d {
                grid[carry] += 1;
                if grid[carry] < steps {
                    break;
                }
                grid[carry] = 0;
                carry += 1;
            }
            if carry == d {
                break;
            }
        }
        // Coordinatewise polish around the best grid direction.
        let mut step = 2.0 / (steps - 1) as f64;
        for _ in 0..40 {
            let mut improved = false;
            for i in 0..d {
                for s in [-step, step] {
                    let mut dir = best_dir.clone();
                    dir[i] += s;
                    if dir.norm() < 1e-9 {
                        continue;
                    }
                    let h = p.oracle.norm(&dir);
                    if h > 1e-12 {
                        let v = p.objective.dot(&dir) / h;
                        if v > best {
                            best = v;
                            best_dir = dir;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }

    #[test]
    fn solver_matches_brute_force_on_small_symbol_problem() {
        // Band-1 truncated-flat problem on the N = 1 circle: 2 free
        // coefficients after the constant is projected out.
        let geom = build_circle(1).unwrap();
        let coords = SymbolCoords { band: 1 };
        let p = ConvexProblem {
            objective: coords.point_difference(0.0, std::f64::consts::PI),
            oracle: Box::new(MatrixNormOracle {
                map: coords.trunc_dirac_map(&geom),
            }),
            kernel: vec![coords.constant_coeffs()],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let report = maximize(&p, &SolverOptions::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        let brute = brute_force_ratio(&p, 41);
        assert_relative_eq!(report.value, brute, max_relative = 1e-3);
    }

    #[test]
    fn solver_matches_brute_force_on_toeplitz_n1() {
        // N = 1 bi-truncated problem between Fejér states at 0 and π:
        // 4 free coefficients after gauge fixing.
        let geom = build_circle(1).unwrap();
        let coords = ToeplitzCoords { n: 1 };
        let a = crate::states::fejer_state(0.0, 1).unwrap();
        let b = crate::states::fejer_state(std::f64::consts::PI, 1).unwrap();
        let g = crate::matops::HermitianMatrix::from_matrix(
            a.density().as_matrix() - b.density().as_matrix(),
        )
        .unwrap();
        let p = ConvexProblem {
            objective: coords.pairing_vector(&g),
            oracle: Box::new(MatrixNormOracle {
                map: coords.bi_commutator_map(&geom),
            }),
            kernel: vec![coords.identity_coeffs()],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let report = maximize(&p, &SolverOptions::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Optimal);
        let brute = brute_force_ratio(&p, 13);
        assert!(
            (report.value - brute).abs() <= 1e-3 * brute.max(1.0),
            "solver {} vs brute {}",
            report.value,
            brute
        );
        // The paper's bounds: 1/N ≤ d ≤ geodesic.
        assert!(report.value >= 1.0 - 1e-6);
        assert!(report.value <= std::f64::consts::PI + 1e-6);
    }

    #[test]
    fn monotone_in_the_basis() {
        // Enlarging the symbol band never decreases the value.
        let geom = build_circle(2).unwrap();
        let opts = SolverOptions::default();
        let mut prev = 0.0;
        for band in [1usize, 2, 4] {
            let coords = SymbolCoords { band };
            let p = ConvexProblem {
                objective: coords.point_difference(0.0, 2.0),
                oracle: Box::new(MatrixNormOracle {
                    map: coords.trunc_dirac_map(&geom),
                }),
                kernel: vec![coords.constant_coeffs()],
                norm_lower: 0.0,
                gram_condition: 1.0,
            };
            let report = maximize(&p, &opts).unwrap();
            assert!(report.value >= prev - 2.0 * (report.gap_estimate + 1e-9));
            prev = report.value;
        }
    }

    #[test]
    fn symmetry_under_state_swap() {
        let geom = build_circle(2).unwrap();
        let coords = SymbolCoords { band: 3 };
        let opts = SolverOptions::default();
        let forward = ConvexProblem {
            objective: coords.point_difference(0.5, 2.5),
            oracle: Box::new(MatrixNormOracle {
                map: coords.trunc_dirac_map(&geom),
            }),
            kernel: vec![coords.constant_coeffs()],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let backward = ConvexProblem {
            objective: coords.point_difference(2.5, 0.5),
            oracle: Box::new(MatrixNormOracle {
                map: coords.trunc_dirac_map(&geom),
            }),
            kernel: vec![coords.constant_coeffs()],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let f = maximize(&forward, &opts).unwrap();
        let b = maximize(&backward, &opts).unwrap();
        let tol = 2.0 * (f.gap_estimate + b.gap_estimate) + 1e-9;
        assert!((f.value - b.value).abs() <= tol);
    }

    #[test]
    fn homogeneity_in_the_constraint_scale() {
        // Scaling the constraint map by s scales the value by 1/s.
        let geom = build_circle(1).unwrap();
        let coords = SymbolCoords { band: 2 };
        let opts = SolverOptions::default();
        let base_map = coords.trunc_dirac_map(&geom);
        let mut scaled_map = base_map.clone();
        let s = 3.0;
        for image in &mut scaled_map.images {
            for entry in image.iter_mut() {
                entry.2 *= s;
            }
        }
        let base = ConvexProblem {
            objective: coords.point_difference(0.0, 3.0),
            oracle: Box::new(MatrixNormOracle { map: base_map }),
            kernel: vec![coords.constant_coeffs()],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let scaled = ConvexProblem {
            objective: coords.point_difference(0.0, 3.0),
            oracle: Box::new(MatrixNormOracle { map: scaled_map }),
            kernel: vec![coords.constant_coeffs()],
            norm_lower: 0.0,
            gram_condition: 1.0,
        };
        let vb = maximize(&base, &opts).unwrap().value;
        let vs = maximize(&scaled, &opts).unwrap().value;
        assert_relative_eq!(vs, vb / s, max_relative = 1e-6);
    }

    #[test]
    fn ill_conditioned_basis_rejected() {
        let p = ConvexProblem {
            objective: DVector::from_vec(vec![1.0]),
            oracle: Box::new(MatrixNormOracle {
                map: space::LinearMatrixMap {
                    out_dim: 1,
                    images: vec![vec![(0, 0, Complex64::new(1.0, 0.0))]],
                },
            }),
            kernel: vec![],
            norm_lower: 0.0,
            gram_condition: 1e14,
        };
        assert!(matches!(
            maximize(&p, &SolverOptions::default()),
            Err(CoreError::IllConditionedBasis { .. })
        ));
    }
}
