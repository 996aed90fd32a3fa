//! Dense Hermitian linear algebra: eigendecomposition, operator norm via the
//! Hermitian dilation, Toeplitz construction, and nullspaces of linear maps
//! on matrix subspaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Absolute floor used when validating Hermitian symmetry.
const HERMITIAN_TOL: f64 = 1e-12;

/// Relative singular-value threshold for nullspace membership.
pub const NULLSPACE_THRESHOLD: f64 = 1e-9;

/// A validated Hermitian matrix. Construction checks the symmetry defect and
/// then symmetrizes, so `H == H*` holds exactly afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(CoreError::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        let tolerance = HERMITIAN_TOL * scale.max(1.0);
        let mut asymmetry = 0.0_f64;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asymmetry > tolerance {
            return Err(CoreError::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        let adjoint = m.adjoint();
        let entries = (m + adjoint).scale(0.5);
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = CMatrix::zeros(dim, dim);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        Self { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real trace pairing ⟨A, B⟩ = Re Tr(A B); an inner product on the
    /// real vector space of Hermitian matrices.
    pub fn inner(&self, other: &Self) -> f64 {
        (0..self.dim())
            .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
            .map(|(i, j)| (self.entries[(j, i)].conj() * other.entries[(j, i)]).re)
            .sum()
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: DVector<f64>,
    /// Unitary matrix whose column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

/// Full eigendecomposition with eigenvalues sorted ascending. Ties keep the
/// decomposition's original column order, so results are deterministic.
pub fn hermitian_eigen(h: &HermitianMatrix) -> HermitianEigen {
    let dim = h.dim();
    let se = h.entries.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("eigenvalue is NaN")
    });
    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| se.eigenvalues[i]));
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        eigenvectors.set_column(col, &se.eigenvectors.column(i));
    }
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Operator (spectral) norm of an arbitrary complex matrix, computed as the
/// largest eigenvalue of the Hermitian dilation [[0, X], [X*, 0]].
pub fn op_norm(x: &CMatrix) -> f64 {
    let (r, c) = (x.nrows(), x.ncols());
    if r == 0 || c == 0 {
        return 0.0;
    }
    let n = r + c;
    let mut dil = CMatrix::zeros(n, n);
    dil.view_mut((0, r), (r, c)).copy_from(x);
    let xs = x.adjoint();
    dil.view_mut((r, 0), (c, r)).copy_from(&xs);
    let h = HermitianMatrix { entries: dil };
    let eig = hermitian_eigen(&h);
    eig.eigenvalues[n - 1].max(0.0)
}

/// Operator norm of a Hermitian matrix: max |eigenvalue|.
pub fn op_norm_hermitian(h: &HermitianMatrix) -> f64 {
    if h.dim() == 0 {
        return 0.0;
    }
    let eig = hermitian_eigen(h);
    eig.eigenvalues[0]
        .abs()
        .max(eig.eigenvalues[h.dim() - 1].abs())
}

/// Hermitian Toeplitz matrix from the coefficients of its diagonals
/// k = 0, 1, ..: entry (m', m) = coeffs[m' - m], with coeffs[-k] = conj(coeffs[k]).
pub fn toeplitz_hermitian(coeffs: &[Complex64], dim: usize) -> Result<HermitianMatrix> {
    if coeffs.len() > dim {
        return Err(CoreError::OversizedBand {
            band: coeffs.len(),
            dim,
        });
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (k, &a) in coeffs.iter().enumerate() {
        for row in k..dim {
            let col = row - k;
            m[(row, col)] = a;
            m[(col, row)] = a.conj();
        }
    }
    HermitianMatrix::from_matrix(m)
}

/// A real-linear basis of a subspace of Hermitian matrices, with the Gram
/// condition number of the trace inner product reported at construction.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
    gram_condition: f64,
}

impl SubspaceBasis {
    pub fn new(elements: Vec<HermitianMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(CoreError::InvalidParameter("empty basis".into()));
        }
        let dim = elements[0].dim();
        for e in &elements {
            if e.dim() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
        }
        let n = elements.len();
        let mut gram = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = elements[i].inner(&elements[j]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let eig = gram.symmetric_eigen();
        let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > max * 1e-12) {
            return Err(CoreError::IllConditionedBasis {
                condition: if min > 0.0 { max / min } else { f64::INFINITY },
            });
        }
        Ok(Self {
            dim,
            elements,
            gram_condition: max / min,
        })
    }

    pub fn space_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &HermitianMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    /// Assemble Σ c_i b_i.
    pub fn combine(&self, coeffs: &DVector<f64>) -> Result<HermitianMatrix> {
        if coeffs.len() != self.elements.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.elements.len(),
                got: coeffs.len(),
            });
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, b) in coeffs.iter().zip(&self.elements) {
            m += b.as_matrix().scale(*c);
        }
        HermitianMatrix::from_matrix(m)
    }
}

/// Deterministic pseudo-random stream for linearity spot checks (splitmix64).
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        // uniform in [-1, 1)
        (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

/// Orthonormal basis of { c : K(Σ c_i b_i) = 0 }, via a singular-value
/// threshold of 1e-9 × the largest singular value. The map is spot-checked
/// for linearity on deterministic pseudo-random pairs.
pub fn map_nullspace<K>(basis: &SubspaceBasis, map: K) -> Result<Vec<DVector<f64>>>
where
    K: Fn(&HermitianMatrix) -> CMatrix,
{
    let n = basis.len();
    let images: Vec<CMatrix> = basis.elements().iter().map(&map).collect();
    let (or, oc) = (images[0].nrows(), images[0].ncols());
    for im in &images {
        if im.nrows() != or || im.ncols() != oc {
            return Err(CoreError::DimensionMismatch {
                expected: or,
                got: im.nrows(),
            });
        }
    }

    // Linearity check: K(α a + β b) = α K(a) + β K(b) on random pairs.
    let mut rng = SplitMix64(0x5eed_c0ffee);
    let scale: f64 = images
        .iter()
        .flat_map(|im| im.iter())
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    for _ in 0..4 {
        let i = (rng.next_f64().abs() * n as f64) as usize % n;
        let j = (rng.next_f64().abs() * n as f64) as usize % n;
        let alpha = rng.next_f64();
        let beta = rng.next_f64();
        let combined = HermitianMatrix::from_matrix(
            basis.element(i).as_matrix().scale(alpha) + basis.element(j).as_matrix().scale(beta),
        )?;
        let lhs = map(&combined);
        let rhs = images[i].scale(alpha) + images[j].scale(beta);
        let defect = (lhs - rhs).iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if defect > 1e-10 * scale {
            return Err(CoreError::InvalidParameter(format!(
                "constraint map is not linear (defect {defect:.3e})"
            )));
        }
    }

    // Real matrix of the map: rows = stacked (Re, Im) of each image entry.
    let rows = 2 * or * oc;
    let padded_rows = rows.max(n);
    let mut m = DMatrix::<f64>::zeros(padded_rows, n);
    for (col, im) in images.iter().enumerate() {
        for r in 0..or {
            for c in 0..oc {
                let idx = 2 * (r * oc + c);
                m[(idx, col)] = im[(r, c)].re;
                m[(idx + 1, col)] = im[(r, c)].im;
            }
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let threshold = NULLSPACE_THRESHOLD * sigma_max;
    let mut kernel = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= threshold {
            kernel.push(DVector::from_iterator(n, v_t.row(i).iter().cloned()));
        }
    }
    Ok(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_cmatrix(rng: &mut ChaCha8Rng, r: usize, cdim: usize) -> CMatrix {
        CMatrix::from_fn(r, cdim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> HermitianMatrix {
        let m = random_cmatrix(rng, dim, dim);
        let h = (&m + m.adjoint()).scale(0.5);
        HermitianMatrix::from_matrix(h).unwrap()
    }

    #[test]
    fn eigen_identity() {
        let h = HermitianMatrix::identity(3);
        let eig = hermitian_eigen(&h);
        for i in 0..3 {
            assert_relative_eq!(eig.eigenvalues[i], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigen_diagonal_sorted() {
        let h = HermitianMatrix::from_real_diagonal(&[2.0, -1.0, 0.0]);
        let eig = hermitian_eigen(&h);
        assert_relative_eq!(eig.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(eig.eigenvalues[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(eig.eigenvalues[2], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn eigen_pauli_x() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let h = HermitianMatrix::from_matrix(m).unwrap();
        let eig = hermitian_eigen(&h);
        assert_relative_eq!(eig.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(eig.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigen_reconstruction_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 5, 16] {
            let h = random_hermitian(&mut rng, dim);
            let eig = hermitian_eigen(&h);
            let lambda = CMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    c(eig.eigenvalues[i], 0.0)
                } else {
                    c(0.0, 0.0)
                }
            });
            let recon = &eig.eigenvectors * lambda * eig.eigenvectors.adjoint();
            let resid = (recon - h.as_matrix())
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid <= 1e-10 * h.frobenius_norm().max(1.0), "resid {resid}");
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 8);
            let eig = hermitian_eigen(&h);
            let sum: f64 = eig.eigenvalues.iter().sum();
            assert_relative_eq!(sum, h.trace(), max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0.5, 0.), c(0., 0.)]);
        assert!(matches!(
            HermitianMatrix::from_matrix(m),
            Err(CoreError::NotHermitian { .. })
        ));
    }

    #[test]
    fn op_norm_zero_matrix() {
        assert_relative_eq!(op_norm(&CMatrix::zeros(4, 4)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn op_norm_tridiagonal_skew() {
        // [[0,1,0],[-1,0,1],[0,-1,0]] has singular values {√2, √2, 0}.
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0., 0.),
                c(1., 0.),
                c(0., 0.),
                c(-1., 0.),
                c(0., 0.),
                c(1., 0.),
                c(0., 0.),
                c(-1., 0.),
                c(0., 0.),
            ],
        );
        assert_relative_eq!(op_norm(&m), 2.0_f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn op_norm_diagonal() {
        let n = 5i64;
        let diag: Vec<f64> = (-n..=n).map(|k| k as f64).collect();
        let h = HermitianMatrix::from_real_diagonal(&diag);
        assert_relative_eq!(op_norm(h.as_matrix()), 5.0, epsilon = 1e-10);
    }

    #[test]
    fn op_norm_adjoint_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let m = random_cmatrix(&mut rng, 6, 4);
            assert_relative_eq!(op_norm(&m), op_norm(&m.adjoint()), epsilon = 1e-9);
        }
    }

    #[test]
    fn op_norm_subadditive_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let a = random_cmatrix(&mut rng, 5, 5);
            let b = random_cmatrix(&mut rng, 5, 5);
            let s: f64 = rng.gen_range(-3.0..3.0);
            assert!(op_norm(&(&a + &b)) <= op_norm(&a) + op_norm(&b) + 1e-9);
            assert_relative_eq!(op_norm(&a.scale(s)), s.abs() * op_norm(&a), epsilon = 1e-9);
        }
    }

    #[test]
    fn toeplitz_identity() {
        let t = toeplitz_hermitian(&[c(1., 0.)], 4).unwrap();
        assert_eq!(t.as_matrix(), HermitianMatrix::identity(4).as_matrix());
    }

    #[test]
    fn toeplitz_two_cos() {
        // a_1 = a_{-1} = 1 gives the tridiagonal matrix with ones off-diagonal.
        let t = toeplitz_hermitian(&[c(0., 0.), c(1., 0.)], 3).unwrap();
        let expect = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0., 0.),
                c(1., 0.),
                c(0., 0.),
                c(1., 0.),
                c(0., 0.),
                c(1., 0.),
                c(0., 0.),
                c(1., 0.),
                c(0., 0.),
            ],
        );
        assert_eq!(t.as_matrix(), &expect);
    }

    #[test]
    fn toeplitz_skew_band() {
        let t = toeplitz_hermitian(&[c(0., 0.), c(0., 0.), c(0., 1.)], 5).unwrap();
        assert_eq!(t.entry(2, 0), c(0., 1.));
        assert_eq!(t.entry(0, 2), c(0., -1.));
        assert_eq!(t.entry(4, 2), c(0., 1.));
        assert_eq!(t.entry(1, 0), c(0., 0.));
    }

    #[test]
    fn toeplitz_oversized_band_rejected() {
        let coeffs = vec![c(1., 0.); 4];
        assert!(matches!(
            toeplitz_hermitian(&coeffs, 3),
            Err(CoreError::OversizedBand { .. })
        ));
    }

    #[test]
    fn toeplitz_entries_depend_on_offset_only() {
        let t = toeplitz_hermitian(&[c(0.3, 0.), c(0.1, -0.4), c(0., 0.9)], 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                for p in 0..6 {
                    for q in 0..6 {
                        if i as i64 - j as i64 == p as i64 - q as i64 {
                            assert_eq!(t.entry(i, j), t.entry(p, q));
                        }
                    }
                }
            }
        }
    }

    fn pauli_basis() -> SubspaceBasis {
        let sx = HermitianMatrix::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        ))
        .unwrap();
        let sy = HermitianMatrix::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        ))
        .unwrap();
        let sz = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        let id = HermitianMatrix::identity(2);
        SubspaceBasis::new(vec![id, sx, sy, sz]).unwrap()
    }

    #[test]
    fn nullspace_identity_map_is_empty() {
        let basis = pauli_basis();
        let ker = map_nullspace(&basis, |h| h.as_matrix().clone()).unwrap();
        assert!(ker.is_empty());
    }

    #[test]
    fn nullspace_zero_map_is_everything() {
        let basis = pauli_basis();
        let ker = map_nullspace(&basis, |h| CMatrix::zeros(h.dim(), h.dim())).unwrap();
        assert_eq!(ker.len(), 4);
    }

    #[test]
    fn nullspace_commutator_with_circle_dirac() {
        // Toeplitz basis on the N=2 circle; [D_2, a] = 0 forces a ∝ identity.
        let dim = 5;
        let diag: Vec<f64> = (-2..=2).map(|k| k as f64).collect();
        let d = HermitianMatrix::from_real_diagonal(&diag);
        let mut elements = vec![HermitianMatrix::identity(dim)];
        for k in 1..dim {
            let mut coeffs = vec![c(0., 0.); k + 1];
            coeffs[k] = c(1., 0.);
            elements.push(toeplitz_hermitian(&coeffs, dim).unwrap());
            coeffs[k] = c(0., 1.);
            elements.push(toeplitz_hermitian(&coeffs, dim).unwrap());
        }
        let basis = SubspaceBasis::new(elements).unwrap();
        let ker = map_nullspace(&basis, |a| {
            d.as_matrix() * a.as_matrix() - a.as_matrix() * d.as_matrix()
        })
        .unwrap();
        assert_eq!(ker.len(), 1);
        // The kernel direction is the identity's coefficient vector (index 0).
        let v = &ker[0];
        assert_relative_eq!(v[0].abs(), 1.0, epsilon = 1e-9);
        for i in 1..v.len() {
            assert!(v[i].abs() < 1e-9);
        }
    }

    #[test]
    fn gram_condition_reported() {
        let basis = pauli_basis();
        assert_relative_eq!(basis.gram_condition(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dependent_basis_rejected() {
        let id = HermitianMatrix::identity(2);
        let id2 = HermitianMatrix::from_real_diagonal(&[1.0, 1.0]);
        assert!(matches!(
            SubspaceBasis::new(vec![id, id2]),
            Err(CoreError::IllConditionedBasis { .. })
        ));
    }
}
