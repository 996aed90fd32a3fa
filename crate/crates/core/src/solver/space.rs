//! Coefficient-space machinery for the solver: real coordinates on the
//! variable subspaces (Hermitian Toeplitz compressions, band-limited
//! symbols, full Hermitian matrices) and the sparse images of the linear
//! constraint maps on each basis direction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::geometry::{BerezinGeometry, FourierSymbol, TruncatedCircleGeometry};
use crate::matops::{CMatrix, HermitianMatrix, NULLSPACE_THRESHOLD};

/// Sparse entries (row, col, value) of one basis direction's image under a
/// linear matrix-valued map.
pub type SparseImage = Vec<(usize, usize, Complex64)>;

/// A real-linear map from coefficient vectors to complex matrices, stored
/// as the sparse image of each basis direction.
#[derive(Debug, Clone)]
pub struct LinearMatrixMap {
    pub out_dim: usize,
    pub images: Vec<SparseImage>,
}

impl LinearMatrixMap {
    pub fn coeff_dim(&self) -> usize {
        self.images.len()
    }

    /// Σ c_p · image_p as a dense matrix.
    pub fn apply(&self, c: &DVector<f64>) -> CMatrix {
        let mut m = CMatrix::zeros(self.out_dim, self.out_dim);
        for (p, image) in self.images.iter().enumerate() {
            let w = c[p];
            if w != 0.0 {
                for &(r, col, v) in image {
                    m[(r, col)] += v.scale(w);
                }
            }
        }
        m
    }

    /// Cut gradient for a singular pair (u, v): g_p = Re⟨u, image_p v⟩.
    pub fn pair_gradient(
        &self,
        u: &DVector<Complex64>,
        v: &DVector<Complex64>,
    ) -> DVector<f64> {
        DVector::from_iterator(
            self.images.len(),
            self.images.iter().map(|image| {
                image
                    .iter()
                    .map(|&(r, c, val)| (u[r].conj() * val * v[c]).re)
                    .sum::<f64>()
            }),
        )
    }

    /// Orthonormal basis of the coefficient-space nullspace, by dense SVD
    /// with the shared singular-value threshold. Intended for desk-scale
    /// coefficient dimensions.
    pub fn nullspace(&self) -> Vec<DVector<f64>> {
        let n = self.images.len();
        let rows = (2 * self.out_dim * self.out_dim).max(n);
        let mut m = DMatrix::<f64>::zeros(rows, n);
        for (col, image) in self.images.iter().enumerate() {
            for &(r, c, v) in image {
                let idx = 2 * (r * self.out_dim + c);
                m[(idx, col)] += v.re;
                m[(idx + 1, col)] += v.im;
            }
        }
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("svd requested v_t");
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
        let mut kernel = Vec::new();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s <= NULLSPACE_THRESHOLD * sigma_max {
                kernel.push(DVector::from_iterator(n, v_t.row(i).iter().cloned()));
            }
        }
        kernel
    }
}

/// Real coordinates on the Hermitian Toeplitz compressions of the rank-N
/// circle: c = [a_0, Re a_1, Im a_1, …, Re a_{2N}, Im a_{2N}].
#[derive(Debug, Clone, Copy)]
pub struct ToeplitzCoords {
    pub n: usize,
}

impl ToeplitzCoords {
    pub fn coeff_dim(&self) -> usize {
        4 * self.n + 1
    }

    pub fn matrix_dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn identity_coeffs(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.coeff_dim());
        e[0] = 1.0;
        e
    }

    /// Diagonal coefficients a_0..a_{2N} of the element with coordinates c.
    pub fn diagonals(&self, c: &DVector<f64>) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * self.n + 1];
        coeffs[0] = Complex64::new(c[0], 0.0);
        for k in 1..=2 * self.n {
            coeffs[k] = Complex64::new(c[2 * k - 1], c[2 * k]);
        }
        coeffs
    }

    pub fn to_matrix(&self, c: &DVector<f64>) -> Result<HermitianMatrix> {
        if c.len() != self.coeff_dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.coeff_dim(),
                got: c.len(),
            });
        }
        crate::matops::toeplitz_hermitian(&self.diagonals(c), self.matrix_dim())
    }

    /// Objective vector ⟨G, b_p⟩ for a Hermitian G: the linear functional
    /// c ↦ Tr(G · element(c)).
    pub fn pairing_vector(&self, g: &HermitianMatrix) -> DVector<f64> {
        let dim = self.matrix_dim();
        let mut obj = DVector::zeros(self.coeff_dim());
        obj[0] = g.trace();
        for k in 1..=2 * self.n {
            let mut re_sum = 0.0;
            let mut im_sum = 0.0;
            for m in 0..dim - k {
                let z = g.entry(m + k, m);
                re_sum += z.re;
                im_sum += z.im;
            }
            obj[2 * k - 1] = 2.0 * re_sum;
            obj[2 * k] = 2.0 * im_sum;
        }
        obj
    }

    /// A constant σ with ‖[D_N, a_c]‖ ≥ σ‖c‖₂ for c orthogonal to the
    /// identity direction: the k-diagonal of the commutator has Frobenius
    /// mass 2k²(dim−k)|a_k|² ≥ 4N|a_k|², and the operator norm dominates
    /// Frobenius over √dim.
    pub fn bi_norm_lower(&self) -> f64 {
        let dim = self.matrix_dim() as f64;
        (4.0 * self.n as f64 / dim).sqrt()
    }

    /// Sparse images of [D_N, ·] on each coordinate direction:
    /// entry (m', m) of [D_N, a] is (m' − m)·a_{m'−m}.
    pub fn bi_commutator_map(&self, geom: &TruncatedCircleGeometry) -> LinearMatrixMap {
        assert_eq!(geom.dim(), self.matrix_dim());
        let dim = self.matrix_dim();
        let mut images = Vec::with_capacity(self.coeff_dim());
        images.push(SparseImage::new()); // identity commutes
        for k in 1..=2 * self.n {
            let kf = k as f64;
            let mut re_image = SparseImage::new();
            let mut im_image = SparseImage::new();
            for m in 0..dim - k {
                // C_k entries: (m+k, m) = 1, (m, m+k) = 1.
                re_image.push((m + k, m, Complex64::new(kf, 0.0)));
                re_image.push((m, m + k, Complex64::new(-kf, 0.0)));
                // S_k entries: (m+k, m) = i, (m, m+k) = −i.
                im_image.push((m + k, m, Complex64::new(0.0, kf)));
                im_image.push((m, m + k, Complex64::new(0.0, kf)));
            }
            images.push(re_image);
            images.push(im_image);
        }
        LinearMatrixMap {
            out_dim: dim,
            images,
        }
    }
}

/// Real coordinates on band-M real symbols:
/// c = [f_0, α_1, β_1, …, α_M, β_M] with f = f_0 + Σ α_k cos kx + β_k sin kx.
#[derive(Debug, Clone, Copy)]
pub struct SymbolCoords {
    pub band: usize,
}

impl SymbolCoords {
    pub fn coeff_dim(&self) -> usize {
        2 * self.band + 1
    }

    pub fn constant_coeffs(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.coeff_dim());
        e[0] = 1.0;
        e
    }

    pub fn to_symbol(&self, c: &DVector<f64>) -> Result<FourierSymbol> {
        if c.len() != self.coeff_dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.coeff_dim(),
                got: c.len(),
            });
        }
        let upper: Vec<Complex64> = (1..=self.band)
            .map(|k| Complex64::new(c[2 * k - 1] / 2.0, -c[2 * k] / 2.0))
            .collect();
        Ok(FourierSymbol::real_from_half(c[0], &upper))
    }

    /// Objective vector for the evaluation functional f ↦ f(x) − f(y).
    pub fn point_difference(&self, x: f64, y: f64) -> DVector<f64> {
        let mut obj = DVector::zeros(self.coeff_dim());
        for k in 1..=self.band {
            let kf = k as f64;
            obj[2 * k - 1] = (kf * x).cos() - (kf * y).cos();
            obj[2 * k] = (kf * x).sin() - (kf * y).sin();
        }
        obj
    }

    /// Objective vector for the difference of Fejér-weighted evaluations of
    /// rank N (the pullback states Ψ♯): weights 1 − k/(N+1) on |k| ≤ N.
    pub fn fejer_difference(&self, x: f64, y: f64, n: usize) -> DVector<f64> {
        let mut obj = DVector::zeros(self.coeff_dim());
        for k in 1..=self.band.min(n) {
            let w = 1.0 - k as f64 / (n + 1) as f64;
            let kf = k as f64;
            obj[2 * k - 1] = w * ((kf * x).cos() - (kf * y).cos());
            obj[2 * k] = w * ((kf * x).sin() - (kf * y).sin());
        }
        obj
    }

    /// A constant σ with ‖[D_N, π(f_c)]‖ ≥ σ‖c‖₂ for c orthogonal to the
    /// constants: the boundary entries at mode N alone carry Frobenius mass
    /// N²Σ2|f_k|² = N²‖c‖²/2.
    pub fn trunc_dirac_norm_lower(&self, geom: &TruncatedCircleGeometry) -> f64 {
        let n = geom.rank() as f64;
        let dim_window = 2.0 * (geom.rank() + self.band) as f64 + 1.0;
        n / (2.0 * dim_window).sqrt()
    }

    /// A constant σ with sup|f'_c| ≥ σ‖c‖₂ for c orthogonal to the
    /// constants: the sup dominates the root-mean-square of
    /// f' = Σ k(−α_k sin + β_k cos), which is √(Σ k²(α²+β²)/2).
    pub fn deriv_sup_norm_lower(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    /// Sparse images of [D_N, π(·)] on modes |m| ≤ N + band: entry
    /// (m', m) = f_{m'−m} (m'·1_{|m'|≤N} − m·1_{|m|≤N}).
    pub fn trunc_dirac_map(&self, geom: &TruncatedCircleGeometry) -> LinearMatrixMap {
        let n = geom.rank() as i64;
        let w = n + self.band as i64;
        let dim = (2 * w + 1) as usize;
        let weight = |mode: i64| if mode.abs() <= n { mode as f64 } else { 0.0 };
        let mut images = Vec::with_capacity(self.coeff_dim());
        images.push(SparseImage::new()); // constants commute
        for k in 1..=self.band as i64 {
            let mut cos_image = SparseImage::new();
            let mut sin_image = SparseImage::new();
            for row in 0..dim {
                let mp = row as i64 - w;
                for &mq in &[mp - k, mp + k] {
                    if mq < -w || mq > w {
                        continue;
                    }
                    let col = (mq + w) as usize;
                    let wgt = weight(mp) - weight(mq);
                    if wgt == 0.0 {
                        continue;
                    }
                    // cos k has f_{±k} = 1/2; sin k has f_k = −i/2, f_{−k} = i/2.
                    cos_image.push((row, col, Complex64::new(wgt / 2.0, 0.0)));
                    let sin_coeff = if mp - mq == k {
                        Complex64::new(0.0, -0.5)
                    } else {
                        Complex64::new(0.0, 0.5)
                    };
                    sin_image.push((row, col, sin_coeff * wgt));
                }
            }
            images.push(cos_image);
            images.push(sin_image);
        }
        LinearMatrixMap {
            out_dim: dim,
            images,
        }
    }
}

/// Real coordinates on all Hermitian matrices of a given dimension:
/// diagonal entries first, then (Re, Im) of each upper-triangle entry in
/// row-major order.
#[derive(Debug, Clone, Copy)]
pub struct HermitianCoords {
    pub dim: usize,
}

impl HermitianCoords {
    pub fn coeff_dim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn identity_coeffs(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.coeff_dim());
        for i in 0..self.dim {
            e[i] = 1.0;
        }
        e
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        // Upper-triangle pairs (i < j) laid out row-major after the diagonal.
        let before = i * self.dim - i * (i + 1) / 2;
        self.dim + 2 * (before + (j - i - 1))
    }

    pub fn to_matrix(&self, c: &DVector<f64>) -> Result<HermitianMatrix> {
        if c.len() != self.coeff_dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.coeff_dim(),
                got: c.len(),
            });
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            m[(i, i)] = Complex64::new(c[i], 0.0);
        }
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let p = self.pair_index(i, j);
                // Basis pair: (E_ij + E_ji) and (iE_ij − iE_ji).
                let val = Complex64::new(c[p], c[p + 1]);
                m[(i, j)] = val;
                m[(j, i)] = val.conj();
            }
        }
        HermitianMatrix::from_matrix(m)
    }

    /// Objective vector ⟨G, b_p⟩ = Tr(G b_p) over the basis.
    pub fn pairing_vector(&self, g: &HermitianMatrix) -> DVector<f64> {
        let mut obj = DVector::zeros(self.coeff_dim());
        for i in 0..self.dim {
            obj[i] = g.entry(i, i).re;
        }
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let p = self.pair_index(i, j);
                obj[p] = 2.0 * g.entry(i, j).re;
                obj[p + 1] = 2.0 * g.entry(i, j).im;
            }
        }
        obj
    }

    /// A constant σ with (2/√θ)‖[𝔞, a]‖ ≥ σ‖c‖₂ for Hermitian a ⊥ 1.
    ///
    /// [𝔞, ·] maps the o-th matrix diagonal into the (o−1)-st, so its
    /// Frobenius singular values split into per-diagonal bidiagonal blocks
    /// whose kernels are exactly the powers 𝔞^j. A Hermitian element
    /// orthogonal to the identity keeps at least half its mass off that
    /// kernel (the adjoint halves pair up), the operator norm dominates
    /// Frobenius over √(K+1), and the coefficient norm is dominated by the
    /// Frobenius norm.
    pub fn berezin_norm_lower(&self, geom: &BerezinGeometry) -> f64 {
        let k_max = geom.level_cutoff();
        let dim = k_max + 1;
        let mut sigma_star = f64::INFINITY;
        for offset in -(k_max as i64)..=k_max as i64 {
            // Source basis E_{j+o, j}, target offset o − 1.
            let src: Vec<(usize, usize)> = (0..dim)
                .filter_map(|j| {
                    let i = j as i64 + offset;
                    (i >= 0 && i < dim as i64).then_some((i as usize, j))
                })
                .collect();
            let tgt: std::collections::HashMap<(usize, usize), usize> = (0..dim)
                .filter_map(|j| {
                    let i = j as i64 + offset - 1;
                    (i >= 0 && i < dim as i64).then_some(((i as usize, j), j))
                })
                .enumerate()
                .map(|(idx, (key, _))| (key, idx))
                .collect();
            if src.is_empty() || tgt.is_empty() {
                continue;
            }
            let mut block = DMatrix::<f64>::zeros(tgt.len(), src.len());
            for (col, &(i, j)) in src.iter().enumerate() {
                if i > 0 {
                    if let Some(&row) = tgt.get(&(i - 1, j)) {
                        block[(row, col)] += (i as f64).sqrt();
                    }
                }
                if j + 1 < dim {
                    if let Some(&row) = tgt.get(&(i, j + 1)) {
                        block[(row, col)] -= ((j + 1) as f64).sqrt();
                    }
                }
            }
            let svd = block.svd(false, false);
            let s_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
            for &s in svd.singular_values.iter() {
                if s > 1e-9 * s_max.max(1.0) {
                    sigma_star = sigma_star.min(s);
                }
            }
        }
        if !sigma_star.is_finite() {
            return 0.0;
        }
        (2.0 / geom.theta().sqrt()) * sigma_star / (2.0 * dim as f64).sqrt()
    }

    /// Sparse images of the scaled annihilator commutator
    /// a ↦ (2/√θ)[𝔞, a] on each coordinate direction.
    pub fn berezin_map(&self, geom: &BerezinGeometry) -> LinearMatrixMap {
        assert_eq!(self.dim, geom.fock_dim());
        let scale = 2.0 / geom.theta().sqrt();
        let lower = geom.lower();
        // [𝔞, B] for sparse Hermitian B built from elementary E_ij.
        let commutator_of = |entries: &[(usize, usize, Complex64)]| {
            let mut out = SparseImage::new();
            for &(i, j, v) in entries {
                // 𝔞 E_ij = √i · E_{i−1, j}
                if i > 0 {
                    out.push((i - 1, j, lower[(i - 1, i)] * v * scale));
                }
                // E_ij 𝔞 = √(j+1) · E_{i, j+1}
                if j + 1 < self.dim {
                    out.push((i, j + 1, -(lower[(j, j + 1)] * v * scale)));
                }
            }
            out
        };
        let one = Complex64::new(1.0, 0.0);
        let eye = Complex64::new(0.0, 1.0);
        let mut images = vec![SparseImage::new(); self.coeff_dim()];
        for i in 0..self.dim {
            images[i] = commutator_of(&[(i, i, one)]);
        }
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let p = self.pair_index(i, j);
                images[p] = commutator_of(&[(i, j, one), (j, i, one)]);
                images[p + 1] = commutator_of(&[(i, j, eye), (j, i, -eye)]);
            }
        }
        LinearMatrixMap {
            out_dim: self.dim,
            images,
        }
    }
}
