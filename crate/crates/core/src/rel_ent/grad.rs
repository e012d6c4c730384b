//! Objective and gradient for minimizing sigma -> S(rho||sigma), plus the
//! 1-D Brent minimizer used for exact line searches.

use crate::density::DensityMatrix;
use crate::linalg::{cr, herm_eig_unchecked, hermitize, CMatrix, Spectrum};

const LN_2: f64 = std::f64::consts::LN_2;

/// Eigenvalue floor for the objective value. Kept at the smallest positive
/// normal so rank-deficient candidates read as a steep finite penalty
/// (about 1000 bits per unit of misplaced mass) instead of NaN; descent
/// then backs away from the cone boundary on its own.
const VALUE_FLOOR: f64 = 1e-300;

/// Eigenvalue floor inside the gradient kernel, only to keep 1/lambda
/// finite on clipped spectra.
const GRAD_FLOOR: f64 = 1e-15;

/// Divided difference of ln between two eigenvalues (the Daleckii-Krein
/// kernel); close pairs use the limit 1/lambda evaluated at the midpoint.
fn log_divided_difference(a: f64, b: f64) -> f64 {
    let a = a.max(GRAD_FLOOR);
    let b = b.max(GRAD_FLOOR);
    if (a - b).abs() <= 1e-8 * (a + b) {
        2.0 / (a + b)
    } else {
        (a.ln() - b.ln()) / (a - b)
    }
}

/// Evaluates S(rho||sigma) and its sigma-gradient for a fixed rho.
pub(crate) struct Objective {
    rho: CMatrix,
    /// tr[rho log2 rho], the sigma-independent part.
    tr_rho_log_rho: f64,
}

impl Objective {
    pub fn new(rho: &DensityMatrix) -> Self {
        let mut acc = 0.0;
        for &w in &rho.spectrum().eigenvalues {
            let w = w.clamp(0.0, 1.0);
            if w > 0.0 {
                acc += w * w.ln();
            }
        }
        Self {
            rho: rho.matrix().clone(),
            tr_rho_log_rho: acc / LN_2,
        }
    }

    /// S(rho||sigma) in bits from sigma's spectrum, with floored
    /// eigenvalues.
    pub fn value_from_spectrum(&self, spec: &Spectrum) -> f64 {
        let v = &spec.eigenvectors;
        let overlap = v.adjoint() * &self.rho * v;
        let mut tr_rho_log_sigma = 0.0;
        for (j, &mu) in spec.eigenvalues.iter().enumerate() {
            let q = overlap[(j, j)].re.max(0.0);
            if q > 0.0 {
                tr_rho_log_sigma += q * mu.max(VALUE_FLOOR).ln() / LN_2;
            }
        }
        self.tr_rho_log_rho - tr_rho_log_sigma
    }

    pub fn value(&self, sigma: &CMatrix) -> f64 {
        self.value_from_spectrum(&herm_eig_unchecked(&hermitize(sigma)))
    }

    /// Hermitian gradient of S(rho||sigma) with respect to sigma:
    /// -(1/ln 2) V ((V^H rho V) o K) V^H with K the divided-difference
    /// kernel of ln over sigma's eigenvalues.
    pub fn gradient_from_spectrum(&self, spec: &Spectrum) -> CMatrix {
        let v = &spec.eigenvectors;
        let n = spec.dim();
        let mut inner = v.adjoint() * &self.rho * v;
        for i in 0..n {
            for j in 0..n {
                let k = log_divided_difference(spec.eigenvalues[i], spec.eigenvalues[j]);
                inner[(i, j)] *= cr(-k / LN_2);
            }
        }
        hermitize(&(v * inner * v.adjoint()))
    }
}

/// Brent minimization of a unimodal function on [a, b]. Returns the best
/// abscissa and value; endpoints are approached but never evaluated, so the
/// function may diverge there.
pub(crate) fn brent_min(
    mut f: impl FnMut(f64) -> f64,
    bounds: (f64, f64),
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105;
    let (mut a, mut b) = bounds;
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d = 0.0f64;
    let mut e = 0.0f64;
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-14;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Parabola through (x, w, v).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m > x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner_re, max_abs_entry};
    use crate::random::{random_full_rank, stream_rng};
    use approx::assert_abs_diff_eq;

    #[test]
    fn brent_finds_quadratic_minimum() {
        let (x, fx) = brent_min(|t| (t - 0.3).powi(2) + 1.0, (0.0, 1.0), 1e-12, 100);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fx, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn brent_handles_divergent_endpoint() {
        let (x, _) = brent_min(
            |t| if t >= 0.999 { f64::INFINITY } else { (t - 0.5).powi(2) },
            (0.0, 1.0),
            1e-10,
            100,
        );
        assert_abs_diff_eq!(x, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // Directional derivative of S(rho||sigma) along a random Hermitian
        // direction, against central differences.
        let mut rng = stream_rng(71, 0);
        let rho = random_full_rank((2, 2), &mut rng);
        let sigma = random_full_rank((2, 2), &mut rng);
        let dir_raw = crate::random::ginibre(4, 4, &mut rng);
        let dir = hermitize(&dir_raw);
        let obj = Objective::new(&rho);
        let spec = herm_eig_unchecked(&hermitize(sigma.matrix()));
        let g = obj.gradient_from_spectrum(&spec);
        let analytic = inner_re(&g, &dir);
        let h = 1e-6;
        let plus = obj.value(&(sigma.matrix() + dir.scale(h)));
        let minus = obj.value(&(sigma.matrix() - dir.scale(h)));
        let numeric = (plus - minus) / (2.0 * h);
        assert_abs_diff_eq!(analytic, numeric, epsilon = 1e-5 * (1.0 + analytic.abs()));
    }

    #[test]
    fn gradient_is_hermitian() {
        let mut rng = stream_rng(72, 0);
        let rho = random_full_rank((2, 2), &mut rng);
        let sigma = random_full_rank((2, 2), &mut rng);
        let obj = Objective::new(&rho);
        let spec = herm_eig_unchecked(&hermitize(sigma.matrix()));
        let g = obj.gradient_from_spectrum(&spec);
        assert!(max_abs_entry(&(&g - g.adjoint())) < 1e-12);
    }

    #[test]
    fn objective_matches_relative_entropy_on_full_rank_pairs() {
        let mut rng = stream_rng(73, 0);
        let rho = random_full_rank((2, 2), &mut rng);
        let sigma = random_full_rank((2, 2), &mut rng);
        let obj = Objective::new(&rho);
        let direct = crate::entropy::relative_entropy(&rho, &sigma).unwrap();
        assert_abs_diff_eq!(obj.value(sigma.matrix()), direct, epsilon = 1e-11);
    }
}
