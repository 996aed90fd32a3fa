//! State functionals on the truncated spaces: Fejér states, point
//! evaluations, coherent states, truncated normal states, and first-moment
//! machinery.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::geometry::{compress_symbol, FourierSymbol, TruncatedCircleGeometry};
use crate::matops::{hermitian_eigen, CMatrix, HermitianMatrix};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// An extended-real value; infinity is a legitimate outcome of distance and
/// moment computations, carried as a tagged variant rather than a float
/// sentinel.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::Infinite => None,
        }
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

/// A state given by a density matrix: positive semidefinite, trace one.
#[derive(Debug, Clone)]
pub struct DensityState {
    rho: HermitianMatrix,
}

impl DensityState {
    pub fn from_matrix(rho: HermitianMatrix) -> Result<Self> {
        let eig = hermitian_eigen(&rho);
        let min = eig.eigenvalues[0];
        if min < -1e-10 {
            return Err(CoreError::NotAState(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        let trace = rho.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(CoreError::NotAState(format!(
                "density matrix has trace {trace}, expected 1"
            )));
        }
        Ok(Self { rho })
    }

    /// Rank-one density matrix |v⟩⟨v| of a unit vector.
    pub fn from_vector(v: &DVector<Complex64>) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CoreError::NotAState(format!(
                "vector has norm {norm}, expected 1"
            )));
        }
        let dim = v.len();
        let m = CMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj());
        Ok(Self {
            rho: HermitianMatrix::from_matrix(m)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn density(&self) -> &HermitianMatrix {
        &self.rho
    }

    /// Evaluate the state on a Hermitian element: Tr(ρ a).
    pub fn eval(&self, a: &HermitianMatrix) -> Result<f64> {
        if a.dim() != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        Ok(self.rho.inner(a))
    }
}

/// The pure state δ_x of the circle algebra: f ↦ f(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFunctional {
    x: f64,
}

impl PointFunctional {
    pub fn new(x: f64) -> Self {
        Self {
            x: x.rem_euclid(TAU),
        }
    }

    pub fn point(&self) -> f64 {
        self.x
    }
}

/// Evaluate δ_x on a real symbol: Σ f_k e^{ikx}.
pub fn eval_point(x: &PointFunctional, f: &FourierSymbol) -> Result<f64> {
    if !f.is_real_valued() {
        return Err(CoreError::NonRealSymbol);
    }
    let v = f.eval(x.point());
    debug_assert!(v.im.abs() <= 1e-12 * v.re.abs().max(1.0));
    Ok(v.re)
}

/// The Fejér state at x on the rank-N truncation: the vector state of
/// v = (N+1)^{−1/2}(1, e^{−ix}, …, e^{−iNx}) supported on modes 0..N.
/// Evaluating it on a compressed symbol gives the Cesàro-weighted Fourier
/// sum Σ_{|n|≤N} (1 − |n|/(N+1)) f_n e^{inx}.
pub fn fejer_state(x: f64, n: usize) -> Result<DensityState> {
    if n == 0 {
        return Err(CoreError::InvalidParameter(
            "Fejér state needs rank N ≥ 1".into(),
        ));
    }
    let dim = 2 * n + 1;
    let amp = 1.0 / ((n + 1) as f64).sqrt();
    let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for m in 0..=n {
        // Mode m lives at index m + N.
        v[m + n] = Complex64::new(0.0, -(m as f64) * x).exp().scale(amp);
    }
    DensityState::from_vector(&v)
}

/// Closed-form Fejér sum, kept as an independent cross-check of the
/// density-matrix route.
pub fn fejer_sum(x: f64, n: usize, f: &FourierSymbol) -> f64 {
    let nn = n as i64;
    (-nn..=nn)
        .map(|k| {
            let w = 1.0 - k.unsigned_abs() as f64 / (n + 1) as f64;
            (f.coeff(k) * Complex64::new(0.0, k as f64 * x).exp()).re * w
        })
        .sum()
}

/// A truncated, renormalized coherent vector at the phase-space point z.
#[derive(Debug, Clone)]
pub struct CoherentStateVec {
    z: Complex64,
    theta: f64,
    k_max: usize,
    amplitudes: Vec<Complex64>,
    tail_mass: f64,
}

impl CoherentStateVec {
    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn level_cutoff(&self) -> usize {
        self.k_max
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Weight discarded by the truncation, before renormalization.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// True when the discarded weight exceeds 1e−8 and results should be
    /// treated with suspicion.
    pub fn tail_warning(&self) -> bool {
        self.tail_mass > 1e-8
    }

    pub fn to_density(&self) -> Result<DensityState> {
        DensityState::from_vector(&DVector::from_column_slice(&self.amplitudes))
    }
}

/// Coherent vector c_n ∝ z̄^n / √(θ^n n!), truncated at level K and
/// renormalized; the discarded weight is reported as `tail_mass`.
pub fn coherent_state(z: Complex64, theta: f64, k_max: usize) -> Result<CoherentStateVec> {
    if !(theta > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "quantization parameter θ must be positive, got {theta}"
        )));
    }
    if k_max < 2 {
        return Err(CoreError::InvalidParameter(format!(
            "Fock cut-off K must be at least 2, got {k_max}"
        )));
    }
    let r = z.norm_sqr() / theta;
    // Poisson(r) weights t_n = e^{−r} r^n / n!, accumulated recursively.
    let mut t = (-r).exp();
    let mut kept = 0.0;
    let mut unnormalized = Vec::with_capacity(k_max + 1);
    let zbar_over = z.conj() / theta.sqrt();
    let mut amp = Complex64::new((-r / 2.0).exp(), 0.0);
    for n in 0..=k_max {
        if n > 0 {
            t *= r / n as f64;
            amp *= zbar_over / (n as f64).sqrt();
        }
        kept += t;
        unnormalized.push(amp);
    }
    let tail_mass = (1.0 - kept).max(0.0);
    let scale = 1.0 / kept.sqrt();
    let mut amplitudes: Vec<Complex64> = unnormalized.iter().map(|a| a.scale(scale)).collect();
    // Kill residual rounding so Σ|c_n|² = 1 holds to machine precision.
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amplitudes {
        *a = a.scale(1.0 / norm);
    }
    Ok(CoherentStateVec {
        z,
        theta,
        k_max,
        amplitudes,
        tail_mass,
    })
}

/// Density matrices of a pair of truncated coherent states on the same
/// Fock space.
pub fn berezin_state_pair(
    z: Complex64,
    z_prime: Complex64,
    theta: f64,
    k_max: usize,
) -> Result<(DensityState, DensityState)> {
    let a = coherent_state(z, theta, k_max)?.to_density()?;
    let b = coherent_state(z_prime, theta, k_max)?.to_density()?;
    Ok((a, b))
}

/// A rank-r projection, carried as an isometry whose orthonormal columns
/// span its range.
#[derive(Debug, Clone)]
pub struct Projection {
    isometry: CMatrix,
}

impl Projection {
    /// Projection onto a set of coordinate basis vectors.
    pub fn from_indices(ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(CoreError::InvalidParameter("empty projection".into()));
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return Err(CoreError::InvalidParameter(
                "duplicate projection indices".into(),
            ));
        }
        if *sorted.last().unwrap() >= ambient_dim {
            return Err(CoreError::InvalidParameter(
                "projection index out of range".into(),
            ));
        }
        let mut v = CMatrix::zeros(ambient_dim, sorted.len());
        for (col, &i) in sorted.iter().enumerate() {
            v[(i, col)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { isometry: v })
    }

    /// Projection from its matrix; validates P = P* = P² and extracts an
    /// orthonormal basis of the range (eigenvectors with eigenvalue 1).
    pub fn from_matrix(p: &HermitianMatrix) -> Result<Self> {
        let m = p.as_matrix();
        let idem = (m * m - m).iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if idem > 1e-10 {
            return Err(CoreError::InvalidParameter(format!(
                "matrix is not idempotent (defect {idem:.3e})"
            )));
        }
        let eig = hermitian_eigen(p);
        let dim = p.dim();
        let rank = eig.eigenvalues.iter().filter(|&&l| l > 0.5).count();
        if rank == 0 {
            return Err(CoreError::InvalidParameter("zero projection".into()));
        }
        let mut v = CMatrix::zeros(dim, rank);
        for (col, i) in (dim - rank..dim).enumerate() {
            v.set_column(col, &eig.eigenvectors.column(i));
        }
        Ok(Self { isometry: v })
    }

    pub fn ambient_dim(&self) -> usize {
        self.isometry.nrows()
    }

    pub fn rank(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }
}

/// Compress a normal state by a projection: returns Z = Tr(P R) and the
/// renormalized truncation (1/Z) P R P restricted to the range of P.
pub fn truncate_normal(
    state: &DensityState,
    proj: &Projection,
) -> Result<(DensityState, f64)> {
    if proj.ambient_dim() != state.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: state.dim(),
            got: proj.ambient_dim(),
        });
    }
    let v = proj.isometry();
    let compressed = v.adjoint() * state.density().as_matrix() * v;
    let z: f64 = compressed.diagonal().iter().map(|c| c.re).sum();
    if z <= 1e-12 {
        return Err(CoreError::StateOrthogonalToWindow);
    }
    let rho = HermitianMatrix::from_matrix(compressed.scale(1.0 / z))?;
    Ok((DensityState::from_matrix(rho)?, z))
}

/// The pullback φ♯ = φ ∘ Ad P_N of a truncated state to a functional on
/// symbols: φ♯(f) = φ(P_N π(f) P_N).
pub struct SharpFunctional<'a> {
    state: &'a DensityState,
    geom: &'a TruncatedCircleGeometry,
}

pub fn sharp_pullback<'a>(
    state: &'a DensityState,
    geom: &'a TruncatedCircleGeometry,
) -> Result<SharpFunctional<'a>> {
    if state.dim() != geom.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: geom.dim(),
            got: state.dim(),
        });
    }
    Ok(SharpFunctional { state, geom })
}

impl SharpFunctional<'_> {
    pub fn eval(&self, f: &FourierSymbol) -> Result<f64> {
        let compressed = compress_symbol(self.geom, f)?;
        self.state.eval(&compressed)
    }
}

/// A normal state presented with an explicit eigenbasis: R ψ_n = p_n ψ_n.
/// The basis is an input, never inferred: the first moment genuinely depends
/// on it.
#[derive(Debug, Clone)]
pub struct NormalStateSpec {
    rho: DensityState,
    basis: CMatrix,
    weights: Vec<f64>,
}

impl NormalStateSpec {
    pub fn new(rho: DensityState, basis: CMatrix, weights: Vec<f64>) -> Result<Self> {
        let dim = rho.dim();
        if basis.nrows() != dim || basis.ncols() != dim || weights.len() != dim {
            return Err(CoreError::DimensionMismatch {
                expected: dim,
                got: basis.ncols().min(weights.len()),
            });
        }
        let unitarity = (basis.adjoint() * &basis - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if unitarity > 1e-9 {
            return Err(CoreError::InvalidParameter(format!(
                "eigenbasis is not unitary (defect {unitarity:.3e})"
            )));
        }
        for (n, &p) in weights.iter().enumerate() {
            if p < -1e-12 {
                return Err(CoreError::NotAState(format!("negative weight p_{n} = {p}")));
            }
            let col = basis.column(n);
            let resid = (rho.density().as_matrix() * col).map(|v| v) - col.scale(p);
            let defect = resid.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
            if defect > 1e-9 {
                return Err(CoreError::InvalidParameter(format!(
                    "basis column {n} is not an eigenvector (defect {defect:.3e})"
                )));
            }
        }
        Ok(Self { rho, basis, weights })
    }

    /// Eigendecompose a density matrix; weights descending.
    pub fn from_density(rho: DensityState) -> Result<Self> {
        let eig = hermitian_eigen(rho.density());
        let dim = rho.dim();
        let mut basis = CMatrix::zeros(dim, dim);
        let mut weights = Vec::with_capacity(dim);
        for i in 0..dim {
            let src = dim - 1 - i;
            basis.set_column(i, &eig.eigenvectors.column(src));
            weights.push(eig.eigenvalues[src].max(0.0));
        }
        Self::new(rho, basis, weights)
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn density(&self) -> &DensityState {
        &self.rho
    }
}

/// Moment of order 1 of the density matrix with respect to its eigenbasis
/// and the reference vector state Ψ_k: Σ_n p_n d(Ψ_k, Ψ_n). Infinite
/// entries propagate.
pub fn moment1(
    spec: &NormalStateSpec,
    dists: &[Vec<ExtReal>],
    reference: usize,
) -> Result<ExtReal> {
    let n = spec.dim();
    if dists.len() != n || dists.iter().any(|row| row.len() != n) {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: dists.len(),
        });
    }
    if reference >= n {
        return Err(CoreError::InvalidParameter(format!(
            "reference index {reference} out of range"
        )));
    }
    for (i, row) in dists.iter().enumerate() {
        match row[i] {
            ExtReal::Finite(v) if v.abs() <= 1e-12 => {}
            _ => {
                return Err(CoreError::InvalidParameter(
                    "distance matrix has nonzero diagonal".into(),
                ))
            }
        }
        for (j, &d) in row.iter().enumerate() {
            match (d, dists[j][i]) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                    if a < -1e-12 || (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                        return Err(CoreError::InvalidParameter(
                            "distance matrix must be symmetric and nonnegative".into(),
                        ));
                    }
                }
                (ExtReal::Infinite, ExtReal::Infinite) => {}
                _ => {
                    return Err(CoreError::InvalidParameter(
                        "distance matrix must be symmetric".into(),
                    ))
                }
            }
        }
    }
    let mut total = 0.0;
    for (n_idx, &p) in spec.weights().iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        match dists[reference][n_idx] {
            ExtReal::Finite(d) => total += p * d,
            ExtReal::Infinite => return Ok(ExtReal::Infinite),
        }
    }
    Ok(ExtReal::Finite(total))
}

/// First moment of a finite point mixture on the circle relative to x′:
/// Σ w_i d_geo(x_i, x′).
pub fn moment1_commutative(mixture: &[(f64, f64)], x_prime: f64) -> Result<f64> {
    if mixture.is_empty() {
        return Err(CoreError::InvalidParameter("empty mixture".into()));
    }
    let total: f64 = mixture.iter().map(|(w, _)| *w).sum();
    if mixture.iter().any(|(w, _)| *w <= 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(CoreError::NotAState(
            "mixture weights must be positive and sum to 1".into(),
        ));
    }
    Ok(mixture
        .iter()
        .map(|(w, x)| w * crate::distances::geodesic_circle(*x, x_prime))
        .sum())
}
