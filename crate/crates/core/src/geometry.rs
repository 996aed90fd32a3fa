//! The two worked truncated geometries: the circle with a Fourier-mode
//! cut-off and the Berezin-quantized plane with a Fock-level cut-off.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::matops::{toeplitz_hermitian, CMatrix, HermitianMatrix};
use crate::states::coherent_state;

/// A band-limited function on the circle given by its Fourier coefficients
/// f_k, k ∈ [−M, M]. Real-valued symbols satisfy f_{−k} = conj(f_k) exactly
/// by construction.
#[derive(Debug, Clone)]
pub struct FourierSymbol {
    band: usize,
    /// Coefficient f_k stored at index k + band.
    coeffs: Vec<Complex64>,
    real_valued: bool,
}

impl FourierSymbol {
    /// Build from the full coefficient list f_{−M}, …, f_M.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(CoreError::InvalidParameter(
                "coefficient list must have odd length 2M+1".into(),
            ));
        }
        let band = coeffs.len() / 2;
        let real_valued = (0..=band).all(|k| {
            (coeffs[band + k] - coeffs[band - k].conj()).norm() == 0.0
        });
        Ok(Self {
            band,
            coeffs,
            real_valued,
        })
    }

    /// Real-valued symbol from f_0 and f_k for k ≥ 1; f_{−k} = conj(f_k) is
    /// filled in exactly.
    pub fn real_from_half(f0: f64, upper: &[Complex64]) -> Self {
        let band = upper.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * band + 1];
        coeffs[band] = Complex64::new(f0, 0.0);
        for (k, &a) in upper.iter().enumerate() {
            coeffs[band + k + 1] = a;
            coeffs[band - k - 1] = a.conj();
        }
        Self {
            band,
            coeffs,
            real_valued: true,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::real_from_half(value, &[])
    }

    /// 2 cos kx, i.e. f_k = f_{−k} = 1.
    pub fn two_cos(k: usize) -> Self {
        let mut upper = vec![Complex64::new(0.0, 0.0); k];
        upper[k - 1] = Complex64::new(1.0, 0.0);
        Self::real_from_half(0.0, &upper)
    }

    /// sin kx, i.e. f_k = −i/2, f_{−k} = i/2.
    pub fn sin(k: usize) -> Self {
        let mut upper = vec![Complex64::new(0.0, 0.0); k];
        upper[k - 1] = Complex64::new(0.0, -0.5);
        Self::real_from_half(0.0, &upper)
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    /// f_k; zero outside the band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let m = self.band as i64;
        if k < -m || k > m {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + m) as usize]
        }
    }

    /// Σ f_k e^{ikx}.
    pub fn eval(&self, x: f64) -> Complex64 {
        let m = self.band as i64;
        (-m..=m)
            .map(|k| self.coeff(k) * Complex64::new(0.0, k as f64 * x).exp())
            .sum()
    }

    /// Derivative value f'(x) = Σ ik f_k e^{ikx}; real for real symbols.
    pub fn eval_derivative(&self, x: f64) -> Complex64 {
        let m = self.band as i64;
        (-m..=m)
            .map(|k| {
                self.coeff(k)
                    * Complex64::new(0.0, k as f64)
                    * Complex64::new(0.0, k as f64 * x).exp()
            })
            .sum()
    }
}

/// The circle geometry truncated to the Fourier modes m ∈ [−N, N], with the
/// Dirac compression D_N = diag(−N, …, N) in the mode basis.
#[derive(Debug, Clone)]
pub struct TruncatedCircleGeometry {
    n: usize,
    dirac: HermitianMatrix,
}

impl TruncatedCircleGeometry {
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn dirac(&self) -> &HermitianMatrix {
        &self.dirac
    }

    /// Index of mode m in the stored basis (m = −N ↦ 0).
    pub fn mode_index(&self, m: i64) -> usize {
        (m + self.n as i64) as usize
    }

    /// Eigenvalues of D_N, i.e. the modes −N..N.
    pub fn dirac_eigenvalues(&self) -> Vec<f64> {
        let n = self.n as i64;
        (-n..=n).map(|m| m as f64).collect()
    }
}

/// Construct the truncated circle. N = 0 is rejected: the one-mode space is
/// a single point and every commutator seminorm vanishes on it.
pub fn build_circle(n: usize) -> Result<TruncatedCircleGeometry> {
    if n == 0 {
        return Err(CoreError::InvalidParameter(
            "circle cut-off rank N must be at least 1".into(),
        ));
    }
    let modes: Vec<f64> = (-(n as i64)..=n as i64).map(|m| m as f64).collect();
    Ok(TruncatedCircleGeometry {
        n,
        dirac: HermitianMatrix::from_real_diagonal(&modes),
    })
}

/// Compression P_N π(f) P_N of a real symbol: the Hermitian Toeplitz matrix
/// with diagonal k equal to f_k for |k| ≤ 2N and zero beyond.
pub fn compress_symbol(
    geom: &TruncatedCircleGeometry,
    f: &FourierSymbol,
) -> Result<HermitianMatrix> {
    if !f.is_real_valued() {
        return Err(CoreError::NonRealSymbol);
    }
    let dim = geom.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c = f.coeff(k as i64);
    }
    toeplitz_hermitian(&coeffs, dim)
}

/// Berezin quantization of the plane truncated to Fock levels 0..K:
/// annihilator 𝔞 h_n = √n h_{n−1}, its adjoint, and the two-component Dirac
/// block D_θ = (2/√θ)[[0, 𝔞†],[𝔞, 0]].
#[derive(Debug, Clone)]
pub struct BerezinGeometry {
    theta: f64,
    k_max: usize,
    lower: CMatrix,
    raise: CMatrix,
    dirac: HermitianMatrix,
}

impl BerezinGeometry {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Highest retained Fock level K; the one-component space has dim K+1.
    pub fn level_cutoff(&self) -> usize {
        self.k_max
    }

    pub fn fock_dim(&self) -> usize {
        self.k_max + 1
    }

    /// Annihilation operator on the truncated Fock space.
    pub fn lower(&self) -> &CMatrix {
        &self.lower
    }

    /// Creation operator, the exact adjoint of `lower`.
    pub fn raise(&self) -> &CMatrix {
        &self.raise
    }

    /// The 2(K+1)-dimensional truncated Dirac operator.
    pub fn dirac(&self) -> &HermitianMatrix {
        &self.dirac
    }

    /// Eigenvalues of D_θ by direct eigensolve, ascending.
    pub fn dirac_eigenvalues(&self) -> Vec<f64> {
        crate::matops::hermitian_eigen(&self.dirac)
            .eigenvalues
            .iter()
            .cloned()
            .collect()
    }
}

pub fn build_berezin(theta: f64, k_max: usize) -> Result<BerezinGeometry> {
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
    let dim = k_max + 1;
    let mut lower = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        lower[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let raise = lower.adjoint();
    let scale = 2.0 / theta.sqrt();
    let mut dirac = CMatrix::zeros(2 * dim, 2 * dim);
    dirac
        .view_mut((0, dim), (dim, dim))
        .copy_from(&raise.scale(scale));
    dirac
        .view_mut((dim, 0), (dim, dim))
        .copy_from(&lower.scale(scale));
    Ok(BerezinGeometry {
        theta,
        k_max,
        lower,
        raise,
        dirac: HermitianMatrix::from_matrix(dirac)?,
    })
}

/// Eigenvalue-counting convention for the spectral action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum CountConvention {
    /// Count eigenvalues with |λ| ≤ Λ (default; matches two-sided spectra).
    #[default]
    SymmetricAbs,
    /// Count eigenvalues with 0 ≤ λ ≤ Λ.
    NonnegativeOnly,
}

/// Number of eigenvalues within the energy scale Λ. Eigenvalues sitting on
/// the threshold up to a 1e−9 relative rounding slack are counted as inside,
/// so numerically computed spectra behave like their exact counterparts.
pub fn spectral_action_count(
    eigenvalues: &[f64],
    lambda: f64,
    convention: CountConvention,
) -> Result<usize> {
    if !(lambda > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "energy scale Λ must be positive, got {lambda}"
        )));
    }
    let cut = lambda * (1.0 + 1e-9);
    Ok(eigenvalues
        .iter()
        .filter(|&&ev| match convention {
            CountConvention::SymmetricAbs => ev.abs() <= cut,
            CountConvention::NonnegativeOnly => (-lambda * 1e-9..=cut).contains(&ev),
        })
        .count())
}

/// Berezin transform of a truncated operator at the phase-space point z:
/// ⟨ψ_z, a ψ_z⟩ with ψ_z the truncated, renormalized coherent vector.
pub fn berezin_transform(
    geom: &BerezinGeometry,
    a: &HermitianMatrix,
    z: Complex64,
) -> Result<f64> {
    if a.dim() != geom.fock_dim() {
        return Err(CoreError::DimensionMismatch {
            expected: geom.fock_dim(),
            got: a.dim(),
        });
    }
    let psi = coherent_state(z, geom.theta(), geom.level_cutoff())?;
    let v: DVector<Complex64> = DVector::from_column_slice(psi.amplitudes());
    let val = (v.adjoint() * a.as_matrix() * &v)[(0, 0)];
    debug_assert!(val.im.abs() <= 1e-10 * val.re.abs().max(1.0));
    Ok(val.re)
}
