//! The assembled distance computations: bi-truncated and flat circle
//! distances, the Berezin coherent-state distance, the circle geodesic
//! reference, and the sandwich spot-check.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::geometry::{build_berezin, BerezinGeometry, TruncatedCircleGeometry};
use crate::matops::HermitianMatrix;
use crate::seminorm::commutator_berezin;
use crate::solver::space::{HermitianCoords, SymbolCoords, ToeplitzCoords};
use crate::solver::{
    maximize, ConvexProblem, DerivSupOracle, MatrixNormOracle, SolveReport, SolveStatus,
    SolverOptions,
};
use crate::states::{berezin_state_pair, DensityState, ExtReal};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Geodesic distance on the unit circle.
pub fn geodesic_circle(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Identifying parameters of a distance computation.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DistanceMeta {
    pub label: String,
    pub params: Vec<(String, f64)>,
    pub rel_gap: f64,
}

/// A computed distance: a certified value (or exact infinity), the solver
/// status, and the optimal element's coefficients.
#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub value: ExtReal,
    pub status: SolveStatus,
    pub witness: Option<DVector<f64>>,
    pub gap: f64,
    pub feas_residual: f64,
    pub meta: DistanceMeta,
}

impl DistanceResult {
    fn from_report(report: SolveReport, meta: DistanceMeta) -> Self {
        let value = match report.status {
            SolveStatus::KernelUnbounded => ExtReal::Infinite,
            _ => ExtReal::Finite(report.value),
        };
        Self {
            value,
            status: report.status,
            witness: Some(report.witness),
            gap: report.gap_estimate,
            feas_residual: report.feas_residual,
            meta,
        }
    }
}

/// The bi-truncated distance d_{O_N, D_N} between two density states on the
/// rank-N circle truncation: the supremum runs over Hermitian Toeplitz
/// matrices with diagonals |k| ≤ 2N — the exact image of the compression —
/// under ‖[D_N, a]‖ ≤ 1.
pub fn distance_bi(
    geom: &TruncatedCircleGeometry,
    a: &DensityState,
    b: &DensityState,
    opts: &SolverOptions,
) -> Result<DistanceResult> {
    if a.dim() != geom.dim() || b.dim() != geom.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: geom.dim(),
            got: a.dim().max(b.dim()),
        });
    }
    let coords = ToeplitzCoords { n: geom.rank() };
    let diff =
        HermitianMatrix::from_matrix(a.density().as_matrix() - b.density().as_matrix())?;
    let objective = coords.pairing_vector(&diff);
    let identity = coords.identity_coeffs();
    let problem = ConvexProblem::new(
        objective,
        Box::new(MatrixNormOracle {
            map: coords.bi_commutator_map(geom),
        }),
        vec![identity.clone()],
        coords.bi_norm_lower(),
        1.0,
        Some(&identity),
    )?;
    let report = maximize(&problem, opts)?;
    Ok(DistanceResult::from_report(
        report,
        DistanceMeta {
            label: "bi-truncated".into(),
            params: vec![("N".into(), geom.rank() as f64)],
            rel_gap: opts.rel_gap,
        },
    ))
}

/// The truncated-flat distance d♭_{A, D_N} between two circle points,
/// restricted to symbols of band M: the full multiplication operator enters
/// the constraint through its exact finite window. The values grow without
/// bound as M → ∞.
pub fn distance_truncated_flat(
    geom: &TruncatedCircleGeometry,
    x: f64,
    y: f64,
    band: usize,
    opts: &SolverOptions,
) -> Result<DistanceResult> {
    if band == 0 {
        return Err(CoreError::InvalidParameter("band must be at least 1".into()));
    }
    let coords = SymbolCoords { band };
    let identity = coords.constant_coeffs();
    let problem = ConvexProblem::new(
        coords.point_difference(x, y),
        Box::new(MatrixNormOracle {
            map: coords.trunc_dirac_map(geom),
        }),
        vec![identity.clone()],
        coords.trunc_dirac_norm_lower(geom),
        1.0,
        Some(&identity),
    )?;
    let report = maximize(&problem, opts)?;
    Ok(DistanceResult::from_report(
        report,
        DistanceMeta {
            label: "truncated-flat".into(),
            params: vec![
                ("N".into(), geom.rank() as f64),
                ("M".into(), band as f64),
                ("x".into(), x),
                ("y".into(), y),
            ],
            rel_gap: opts.rel_gap,
        },
    ))
}

/// States a flat-circle distance can compare: point evaluations, or Fejér
/// pullbacks Ψ♯ of a given rank.
#[derive(Debug, Clone, Copy)]
pub enum FlatStatePair {
    Points { x: f64, y: f64 },
    Fejer { x: f64, y: f64, rank: usize },
}

/// The flat distance with the *full* circle Dirac, restricted to band-M
/// symbols under the Lipschitz constraint sup|f'| ≤ 1. Converges to the
/// geodesic distance from below as M → ∞.
pub fn distance_full_flat(x: f64, y: f64, band: usize, opts: &SolverOptions) -> Result<DistanceResult> {
    distance_full_flat_states(FlatStatePair::Points { x, y }, band, opts)
}

/// Full-Dirac flat distance between a configurable state pair.
pub fn distance_full_flat_states(
    pair: FlatStatePair,
    band: usize,
    opts: &SolverOptions,
) -> Result<DistanceResult> {
    if band == 0 {
        return Err(CoreError::InvalidParameter("band must be at least 1".into()));
    }
    let coords = SymbolCoords { band };
    let (objective, mut params) = match pair {
        FlatStatePair::Points { x, y } => (
            coords.point_difference(x, y),
            vec![("x".into(), x), ("y".into(), y)],
        ),
        FlatStatePair::Fejer { x, y, rank } => (
            coords.fejer_difference(x, y, rank),
            vec![("x".into(), x), ("y".into(), y), ("N".into(), rank as f64)],
        ),
    };
    params.push(("M".into(), band as f64));
    let identity = coords.constant_coeffs();
    let problem = ConvexProblem::new(
        objective,
        Box::new(DerivSupOracle { coords }),
        vec![identity.clone()],
        coords.deriv_sup_norm_lower(),
        1.0,
        Some(&identity),
    )?;
    let report = maximize(&problem, opts)?;
    Ok(DistanceResult::from_report(
        report,
        DistanceMeta {
            label: "full-flat".into(),
            params,
            rel_gap: opts.rel_gap,
        },
    ))
}

/// The Berezin coherent-state distance d_{O_θ, D_θ}(Ψ_z, Ψ_{z'}). The
/// supremum runs over all Hermitian matrices on the truncated Fock space:
/// at finite K every such matrix is the compression of some Schwartz
/// function, so no relaxation is introduced. Inputs must stay inside the
/// truncation-safety window |z| ≤ 0.5·√(θK).
pub fn distance_berezin_coherent(
    theta: f64,
    k_max: usize,
    z: Complex64,
    z_prime: Complex64,
    opts: &SolverOptions,
) -> Result<DistanceResult> {
    let geom = build_berezin(theta, k_max)?;
    let window = 0.5 * (theta * k_max as f64).sqrt();
    for (name, point) in [("z", z), ("z'", z_prime)] {
        if point.norm() > window {
            return Err(CoreError::OutOfWindow(format!(
                "coherent point {name} with |{name}| = {:.4} lies outside the \
                 truncation-safety window 0.5·√(θK) = {window:.4}; raise the Fock \
                 cut-off K or move the point inward",
                point.norm()
            )));
        }
    }
    let coords = HermitianCoords {
        dim: geom.fock_dim(),
    };
    let (rho_z, rho_zp) = berezin_state_pair(z, z_prime, theta, k_max)?;
    let diff =
        HermitianMatrix::from_matrix(rho_z.density().as_matrix() - rho_zp.density().as_matrix())?;
    let objective = coords.pairing_vector(&diff);
    let identity = coords.identity_coeffs();
    let problem = ConvexProblem::new(
        objective,
        Box::new(MatrixNormOracle {
            map: coords.berezin_map(&geom),
        }),
        vec![identity.clone()],
        coords.berezin_norm_lower(&geom),
        1.0,
        Some(&identity),
    )?;
    let report = maximize(&problem, opts)?;
    Ok(DistanceResult::from_report(
        report,
        DistanceMeta {
            label: "berezin-coherent".into(),
            params: vec![
                ("theta".into(), theta),
                ("K".into(), k_max as f64),
                ("re_z".into(), z.re),
                ("im_z".into(), z.im),
                ("re_z'".into(), z_prime.re),
                ("im_z'".into(), z_prime.im),
            ],
            rel_gap: opts.rel_gap,
        },
    ))
}

/// One fixed-element lower bound on the coherent-state distance: any
/// Hermitian f with nonzero commutator norm yields
/// d ≥ (Ψ_z(f) − Ψ_{z'}(f)) / ‖[D_θ, f ⊕ f]‖.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    /// Ψ_z(f) − Ψ_{z'}(f).
    pub objective: f64,
    pub commutator_norm: f64,
    pub lower_bound: f64,
}

pub fn sandwich_spotcheck(
    geom: &BerezinGeometry,
    z: Complex64,
    z_prime: Complex64,
    f: &HermitianMatrix,
) -> Result<SandwichReport> {
    let objective = crate::geometry::berezin_transform(geom, f, z)?
        - crate::geometry::berezin_transform(geom, f, z_prime)?;
    let commutator_norm = commutator_berezin(geom, f)?.norm;
    let lower_bound = if commutator_norm > 1e-12 {
        objective / commutator_norm
    } else {
        0.0
    };
    Ok(SandwichReport {
        objective,
        commutator_norm,
        lower_bound,
    })
}
