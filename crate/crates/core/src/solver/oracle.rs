//! Constraint oracles: evaluate the constraint seminorm h(c) at a
//! coefficient vector and produce supporting linearizations (cuts)
//! g with g·c = h(c) and g·c' ≤ h(c') for every c'.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::geometry::FourierSymbol;
use crate::matops::{hermitian_eigen, HermitianMatrix};
use crate::seminorm::{lip_sup_certified, lip_sup_polished};
use crate::solver::space::{LinearMatrixMap, SymbolCoords};

pub trait ConstraintOracle {
    fn coeff_dim(&self) -> usize;

    /// Certified evaluation of h(c): never underestimates the true value by
    /// more than roundoff, overestimates by at most ~1e−8 relative.
    fn norm(&self, c: &DVector<f64>) -> f64;

    /// Evaluate h(c) and return supporting cuts at c. The returned value may
    /// be a fast, slightly loose evaluation; the cuts are always valid.
    fn cuts(&self, c: &DVector<f64>, max_cuts: usize, rel_window: f64)
        -> (f64, Vec<DVector<f64>>);
}

/// h(c) = ‖K(c)‖ for a linear matrix-valued map, evaluated as the top
/// eigenvalue of the Hermitian dilation; cuts come from the top singular
/// pairs.
pub struct MatrixNormOracle {
    pub map: LinearMatrixMap,
}

impl ConstraintOracle for MatrixNormOracle {
    fn coeff_dim(&self) -> usize {
        self.map.coeff_dim()
    }

    fn norm(&self, c: &DVector<f64>) -> f64 {
        crate::matops::op_norm(&self.map.apply(c))
    }

    fn cuts(
        &self,
        c: &DVector<f64>,
        max_cuts: usize,
        rel_window: f64,
    ) -> (f64, Vec<DVector<f64>>) {
        let x = self.map.apply(c);
        let n = self.map.out_dim;
        let mut dil = crate::matops::CMatrix::zeros(2 * n, 2 * n);
        dil.view_mut((0, n), (n, n)).copy_from(&x);
        let xs = x.adjoint();
        dil.view_mut((n, 0), (n, n)).copy_from(&xs);
        let h = HermitianMatrix::from_matrix(dil).expect("dilation is Hermitian");
        let eig = hermitian_eigen(&h);
        let top = eig.eigenvalues[2 * n - 1].max(0.0);
        if top <= 0.0 {
            return (0.0, Vec::new());
        }
        let mut cuts = Vec::new();
        for idx in (0..2 * n).rev() {
            let lambda = eig.eigenvalues[idx];
            if lambda < top * (1.0 - rel_window) || cuts.len() >= max_cuts {
                break;
            }
            let w = eig.eigenvectors.column(idx);
            let mut u = DVector::from_iterator(n, w.iter().take(n).cloned());
            let mut v = DVector::from_iterator(n, w.iter().skip(n).cloned());
            let (nu, nv) = (u.norm(), v.norm());
            if nu < 1e-8 || nv < 1e-8 {
                continue;
            }
            u /= Complex64::new(nu, 0.0);
            v /= Complex64::new(nv, 0.0);
            cuts.push(self.map.pair_gradient(&u, &v));
        }
        (top, cuts)
    }
}

/// h(c) = sup over the circle of |f'_c| for the band-limited symbol with
/// coordinates c; cuts come from polished near-maximal points of |f'|.
pub struct DerivSupOracle {
    pub coords: SymbolCoords,
}

impl DerivSupOracle {
    fn cut_at(&self, x: f64, sign: f64) -> DVector<f64> {
        // d/dc of f'(x): f' = Σ −k α_k sin kx + k β_k cos kx.
        let mut g = DVector::zeros(self.coords.coeff_dim());
        for k in 1..=self.coords.band {
            let kf = k as f64;
            g[2 * k - 1] = -sign * kf * (kf * x).sin();
            g[2 * k] = sign * kf * (kf * x).cos();
        }
        g
    }

    fn symbol(&self, c: &DVector<f64>) -> FourierSymbol {
        self.coords.to_symbol(c).expect("coefficient dimension")
    }
}

impl ConstraintOracle for DerivSupOracle {
    fn coeff_dim(&self) -> usize {
        self.coords.coeff_dim()
    }

    fn norm(&self, c: &DVector<f64>) -> f64 {
        lip_sup_certified(&self.symbol(c)).0
    }

    fn cuts(
        &self,
        c: &DVector<f64>,
        max_cuts: usize,
        rel_window: f64,
    ) -> (f64, Vec<DVector<f64>>) {
        let f = self.symbol(c);
        let band = self.coords.band;
        if band == 0 {
            return (0.0, Vec::new());
        }
        let p = 64 * band;
        let step = std::f64::consts::TAU / p as f64;
        let vals: Vec<f64> = (0..p)
            .map(|g| f.eval_derivative(g as f64 * step).re)
            .collect();
        let vmax = vals.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
        if vmax == 0.0 {
            return (0.0, Vec::new());
        }
        // Local maxima of |f'| on the cyclic grid, strongest first.
        let mut peaks: Vec<(f64, usize)> = (0..p)
            .filter(|&g| {
                let a = vals[(g + p - 1) % p].abs();
                let b = vals[g].abs();
                let c2 = vals[(g + 1) % p].abs();
                b >= a && b >= c2 && b >= vmax * (1.0 - rel_window)
            })
            .map(|g| (vals[g].abs(), g))
            .collect();
        peaks.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        peaks.truncate(max_cuts);
        let mut best = 0.0_f64;
        let mut cuts = Vec::new();
        for &(_, g) in &peaks {
            let x0 = g as f64 * step;
            let (value, x, sign) = polish_peak(&f, x0, step);
            best = best.max(value);
            cuts.push(self.cut_at(x, sign));
        }
        // The polished evaluation may clip slightly below the true sup;
        // that is fine for cut generation and iterate rescaling.
        let (polished, _, _) = lip_sup_polished(&f);
        (best.max(polished), cuts)
    }
}

fn polish_peak(f: &FourierSymbol, x0: f64, h: f64) -> (f64, f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let eval = |x: f64| f.eval_derivative(x).re.abs();
    let (mut a, mut b) = (x0 - h, x0 + h);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    let x = 0.5 * (a + b);
    let s = f.eval_derivative(x).re;
    (s.abs(), x, if s >= 0.0 { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_circle;
    use crate::solver::space::ToeplitzCoords;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrix_cuts_support_the_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let geom = build_circle(2).unwrap();
        let coords = ToeplitzCoords { n: 2 };
        let oracle = MatrixNormOracle {
            map: coords.bi_commutator_map(&geom),
        };
        for _ in 0..10 {
            let c = DVector::from_fn(coords.coeff_dim(), |_, _| rng.gen_range(-1.0..1.0));
            let (h, cuts) = oracle.cuts(&c, 4, 0.1);
            assert_relative_eq!(h, oracle.norm(&c), epsilon = 1e-9);
            assert!(!cuts.is_empty());
            // Supporting at c …
            assert_relative_eq!(cuts[0].dot(&c), h, epsilon = 1e-8);
            // … and valid everywhere.
            for _ in 0..10 {
                let other =
                    DVector::from_fn(coords.coeff_dim(), |_, _| rng.gen_range(-1.0..1.0));
                for g in &cuts {
                    assert!(g.dot(&other) <= oracle.norm(&other) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn deriv_cuts_support_the_sup() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let oracle = DerivSupOracle {
            coords: SymbolCoords { band: 3 },
        };
        for _ in 0..10 {
            let c = DVector::from_fn(oracle.coeff_dim(), |_, _| rng.gen_range(-1.0..1.0));
            let (h, cuts) = oracle.cuts(&c, 4, 0.2);
            let cert = oracle.norm(&c);
            assert!(h <= cert * (1.0 + 1e-8) + 1e-12);
            assert!(h >= cert * (1.0 - 1e-6), "polish missed the sup");
            assert!(!cuts.is_empty());
            assert_relative_eq!(cuts[0].dot(&c), h, epsilon = 1e-6 * h.max(1.0));
            for _ in 0..10 {
                let other =
                    DVector::from_fn(oracle.coeff_dim(), |_, _| rng.gen_range(-1.0..1.0));
                for g in &cuts {
                    assert!(g.dot(&other) <= oracle.norm(&other) * (1.0 + 1e-8) + 1e-12);
                }
            }
        }
    }
}
