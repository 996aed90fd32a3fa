//! The commutator seminorms that constrain the distance optimizations:
//! the bi-truncated seminorm ‖[D_N, ·]‖ on Toeplitz compressions, the
//! truncated-Dirac seminorm on full multiplication operators, the full
//! Lipschitz seminorm sup|f'| on the circle, and the Berezin commutator.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::geometry::{BerezinGeometry, FourierSymbol, TruncatedCircleGeometry};
use crate::matops::{map_nullspace, op_norm, CMatrix, HermitianMatrix, SubspaceBasis};

/// Mode range a finite commutator matrix lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeWindow {
    pub lo: i64,
    pub hi: i64,
}

/// A commutator together with its operator norm and window.
#[derive(Debug, Clone)]
pub struct CommutatorResult {
    pub matrix: CMatrix,
    pub norm: f64,
    pub window: ModeWindow,
}

/// The bi-truncated commutator [D_N, a] of a Hermitian Toeplitz compression:
/// entry (m', m) = (m' − m) a_{m'−m}.
pub fn commutator_bi(
    geom: &TruncatedCircleGeometry,
    a: &HermitianMatrix,
) -> Result<CommutatorResult> {
    let dim = geom.dim();
    if a.dim() != dim {
        return Err(CoreError::DimensionMismatch {
            expected: dim,
            got: a.dim(),
        });
    }
    // The bi-truncated space is Toeplitz; reject anything else.
    let scale = a.frobenius_norm().max(1.0);
    for i in 1..dim {
        for j in 1..dim {
            if (a.entry(i, j) - a.entry(i - 1, j - 1)).norm() > 1e-12 * scale {
                return Err(CoreError::InvalidParameter(
                    "element is not Toeplitz".into(),
                ));
            }
        }
    }
    let mut m = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            let k = row as i64 - col as i64;
            m[(row, col)] = a.entry(row, col) * Complex64::new(k as f64, 0.0);
        }
    }
    let norm = op_norm(&m);
    let n = geom.rank() as i64;
    Ok(CommutatorResult {
        matrix: m,
        norm,
        window: ModeWindow { lo: -n, hi: n },
    })
}

/// The commutator [D_N, π(f)] of the truncated Dirac with the *full*
/// multiplication operator by a band-M symbol. Entries vanish identically
/// outside modes |m| ≤ N + M, so the finite window realizes the operator
/// norm exactly.
pub fn commutator_trunc_dirac_full(
    geom: &TruncatedCircleGeometry,
    f: &FourierSymbol,
) -> Result<CommutatorResult> {
    commutator_trunc_dirac_full_padded(geom, f, 0)
}

/// Same as [`commutator_trunc_dirac_full`] with extra window padding; the
/// norm must not depend on the padding.
pub fn commutator_trunc_dirac_full_padded(
    geom: &TruncatedCircleGeometry,
    f: &FourierSymbol,
    pad: usize,
) -> Result<CommutatorResult> {
    if !f.is_real_valued() {
        return Err(CoreError::NonRealSymbol);
    }
    let n = geom.rank() as i64;
    let w = n + f.band() as i64 + pad as i64;
    let dim = (2 * w + 1) as usize;
    let mut m = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let mp = row as i64 - w;
        for col in 0..dim {
            let mq = col as i64 - w;
            let dp = if mp.abs() <= n { mp as f64 } else { 0.0 };
            let dq = if mq.abs() <= n { mq as f64 } else { 0.0 };
            let weight = dp - dq;
            if weight != 0.0 {
                m[(row, col)] = f.coeff(mp - mq) * Complex64::new(weight, 0.0);
            }
        }
    }
    let norm = op_norm(&m);
    Ok(CommutatorResult {
        matrix: m,
        norm,
        window: ModeWindow { lo: -w, hi: w },
    })
}

/// Certified supremum of |f'| over the circle for a real band-limited
/// symbol. Uses a uniform grid fine enough that the grid maximum, divided
/// by cos(πM/P), brackets the true supremum from above; the overestimate is
/// at most ~5e−9 relative.
pub fn lip_full_circle(f: &FourierSymbol) -> Result<f64> {
    if !f.is_real_valued() {
        return Err(CoreError::NonRealSymbol);
    }
    Ok(lip_sup_certified(f).0)
}

/// Certified sup|f'| plus the grid argmax and the sign of f' there.
/// The certified value never underestimates the true supremum.
pub(crate) fn lip_sup_certified(f: &FourierSymbol) -> (f64, f64, f64) {
    let m = f.band();
    if m == 0 {
        return (0.0, 0.0, 1.0);
    }
    // Ehlich–Zeller: for a trig poly of degree M sampled on P equidistant
    // points, sup ≤ grid_max / cos(πM/P). P = 22440·M keeps the factor
    // within 1e-8 of 1.
    let p = 22440 * m;
    let (gmax, argmax, sign) = derivative_grid_max(f, p);
    let factor = (std::f64::consts::PI * m as f64 / p as f64).cos();
    (gmax / factor, argmax, sign)
}

/// Coarse, uncertified sup|f'| with golden-section polish; fast enough for
/// per-iteration use inside the solver. Returns (value, argmax, sign).
pub(crate) fn lip_sup_polished(f: &FourierSymbol) -> (f64, f64, f64) {
    let m = f.band();
    if m == 0 {
        return (0.0, 0.0, 1.0);
    }
    let p = 64 * m;
    let (gmax, argmax, _) = derivative_grid_max(f, p);
    if gmax == 0.0 {
        return (0.0, 0.0, 1.0);
    }
    let h = std::f64::consts::TAU / p as f64;
    let (x, v) = golden_max(|x| f.eval_derivative(x).re.abs(), argmax - h, argmax + h);
    let sign = if f.eval_derivative(x).re >= 0.0 { 1.0 } else { -1.0 };
    (v.max(gmax), x, sign)
}

fn derivative_grid_max(f: &FourierSymbol, p: usize) -> (f64, f64, f64) {
    let step = std::f64::consts::TAU / p as f64;
    let mut best = (0.0_f64, 0.0_f64, 1.0_f64);
    for g in 0..p {
        let x = g as f64 * step;
        let s = f.eval_derivative(x).re;
        if s.abs() > best.0 {
            best = (s.abs(), x, if s >= 0.0 { 1.0 } else { -1.0 });
        }
    }
    best
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// The Berezin commutator [D_θ, a ⊕ a]. Its two off-diagonal blocks are
/// (2/√θ)[𝔞†, a] and (2/√θ)[𝔞, a], so the block norm reduces to
/// (2/√θ)‖[𝔞, a]‖.
pub fn commutator_berezin(
    geom: &BerezinGeometry,
    a: &HermitianMatrix,
) -> Result<CommutatorResult> {
    let dim = geom.fock_dim();
    if a.dim() != dim {
        return Err(CoreError::DimensionMismatch {
            expected: dim,
            got: a.dim(),
        });
    }
    let scale = 2.0 / geom.theta().sqrt();
    let am = a.as_matrix();
    let lower_comm = (geom.lower() * am - am * geom.lower()).scale(scale);
    let raise_comm = (geom.raise() * am - am * geom.raise()).scale(scale);
    let mut block = CMatrix::zeros(2 * dim, 2 * dim);
    block.view_mut((0, dim), (dim, dim)).copy_from(&raise_comm);
    block.view_mut((dim, 0), (dim, dim)).copy_from(&lower_comm);
    let norm = op_norm(&lower_comm);
    Ok(CommutatorResult {
        matrix: block,
        norm,
        window: ModeWindow {
            lo: 0,
            hi: geom.level_cutoff() as i64,
        },
    })
}

/// Norm of the Berezin commutator restricted to the top two Fock levels:
/// the truncation artifact acceptance tests may want to subtract.
pub fn berezin_boundary_defect(geom: &BerezinGeometry, a: &HermitianMatrix) -> Result<f64> {
    let dim = geom.fock_dim();
    if a.dim() != dim {
        return Err(CoreError::DimensionMismatch {
            expected: dim,
            got: a.dim(),
        });
    }
    let scale = 2.0 / geom.theta().sqrt();
    let am = a.as_matrix();
    let comm = (geom.lower() * am - am * geom.lower()).scale(scale);
    let mut restricted = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if i + 2 >= dim || j + 2 >= dim {
                restricted[(i, j)] = comm[(i, j)];
            }
        }
    }
    Ok(op_norm(&restricted))
}

/// Outcome of the Lipschitz-property check: the seminorm is Lipschitz when
/// its kernel is exactly the span of the identity.
#[derive(Debug, Clone)]
pub struct LipschitzReport {
    pub lipschitz: bool,
    pub kernel: Vec<DVector<f64>>,
}

/// Check whether a commutator map's kernel on the given subspace is exactly
/// span{identity}.
pub fn lipschitz_check<K>(basis: &SubspaceBasis, map: K) -> Result<LipschitzReport>
where
    K: Fn(&HermitianMatrix) -> CMatrix,
{
    let kernel = map_nullspace(basis, map)?;
    let lipschitz = if kernel.len() == 1 {
        let combo = basis.combine(&kernel[0])?;
        is_multiple_of_identity(&combo)
    } else {
        false
    };
    Ok(LipschitzReport { lipschitz, kernel })
}

fn is_multiple_of_identity(h: &HermitianMatrix) -> bool {
    let dim = h.dim();
    let c = h.entry(0, 0);
    if c.norm() < 1e-9 {
        return false;
    }
    let tol = 1e-9 * c.norm().max(1.0);
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j { c } else { Complex64::new(0.0, 0.0) };
            if (h.entry(i, j) - expect).norm() > tol {
                return false;
            }
        }
    }
    true
}
