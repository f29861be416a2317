//! Real polynomials, characteristic polynomials of tridiagonal matrices,
//! simultaneous complex root finding, and discriminants.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QesError, Result};
use crate::problem::GaugedMatrix;

/// Relative threshold below which leading coefficients are considered zero.
pub const TRIM_TOL: f64 = 1e-13;

/// Dense real polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trims leading coefficients smaller than `TRIM_TOL` relative to the
    /// largest coefficient magnitude. The zero polynomial is kept as `[0]`.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let cutoff = scale * TRIM_TOL;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= cutoff) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> RealPolynomial {
        if self.coeffs.len() <= 1 {
            return RealPolynomial { coeffs: vec![0.0] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        RealPolynomial { coeffs }
    }

    /// Magnitude bound Sum_k |a_k| |z|^k used to scale residual tests.
    pub fn magnitude_at(&self, z_abs: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * z_abs + c.abs())
    }
}

/// Characteristic polynomial p(E) = det(E I - T) of a tridiagonal matrix,
/// via the three-term recurrence on leading principal minors. Monic exactly.
pub fn tridiagonal_characteristic_polynomial(matrix: &DMatrix<f64>) -> Result<RealPolynomial> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(QesError::InvalidInput(format!(
            "matrix must be square, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    for r in 0..n {
        for c in 0..n {
            if r.abs_diff(c) > 1 && matrix[(r, c)] != 0.0 {
                return Err(QesError::NotTridiagonal { row: r, col: c });
            }
        }
    }
    // prev2 = p_{k-2}, prev = p_{k-1}, ascending coefficients.
    let mut prev2 = vec![1.0f64];
    if n == 0 {
        return Ok(RealPolynomial { coeffs: prev2 });
    }
    let mut prev = vec![-matrix[(0, 0)], 1.0];
    for k in 2..=n {
        let d = matrix[(k - 1, k - 1)];
        let w = matrix[(k - 1, k - 2)] * matrix[(k - 2, k - 1)];
        let mut next = vec![0.0f64; k + 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= d * c;
        }
        for (i, &c) in prev2.iter().enumerate() {
            next[i] -= w * c;
        }
        prev2 = std::mem::replace(&mut prev, next);
    }
    Ok(RealPolynomial { coeffs: prev })
}

/// Characteristic polynomial of the full gauged matrix.
pub fn characteristic_polynomial(matrix: &GaugedMatrix) -> RealPolynomial {
    tridiagonal_characteristic_polynomial(matrix.entries())
        .expect("gauged matrix is tridiagonal by construction")
}

/// All complex roots by Aberth-Ehrlich simultaneous iteration with Newton
/// polishing. Roots of real-coefficient input are symmetrized into exact
/// conjugate pairs. Each returned root r satisfies
/// |p(r)| <= tol * Sum_k |a_k| |r|^k.
pub fn roots(poly: &RealPolynomial, tol: f64) -> Result<Vec<Complex64>> {
    let degree = poly.degree();
    if degree < 1 || poly.leading() == 0.0 {
        return Err(QesError::DegreeTooLow {
            min: 1,
            got: degree,
        });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(QesError::InvalidInput(format!(
            "root tolerance must be positive, got {tol}"
        )));
    }

    // Exact zero constant terms factor out as exact zero roots.
    let mut zero_roots = 0usize;
    while zero_roots < degree && poly.coeffs()[zero_roots] == 0.0 {
        zero_roots += 1;
    }
    let reduced: Vec<f64> = poly.coeffs()[zero_roots..].to_vec();
    let mut found = vec![Complex64::ZERO; zero_roots];

    if reduced.len() > 1 {
        let lead = *reduced.last().unwrap();
        let monic: Vec<Complex64> = reduced
            .iter()
            .map(|&c| Complex64::new(c / lead, 0.0))
            .collect();
        let (mut approx, converged, iterations) = aberth(&monic);
        for z in approx.iter_mut() {
            newton_polish(&monic, z);
        }
        crate::spectrum::conjugate_symmetrize(&mut approx, TRIM_TOL);
        let worst = approx
            .iter()
            .map(|&r| poly.eval_complex(r).norm() / poly.magnitude_at(r.norm()).max(f64::MIN_POSITIVE))
            .fold(0.0f64, f64::max);
        if !converged && worst > tol {
            found.extend_from_slice(&approx);
            return Err(QesError::RootsNonConvergence {
                iterations,
                residual: worst,
                best: found,
            });
        }
        found.extend_from_slice(&approx);
    }

    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(found)
}

const ABERTH_MAX_ITERATIONS: u32 = 200;
const ABERTH_STEP_TOL: f64 = 1e-13;

fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::ZERO;
    let mut dp = Complex64::ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// One simultaneous-iteration pass over monic ascending coefficients.
fn aberth(monic: &[Complex64]) -> (Vec<Complex64>, bool, u32) {
    let degree = monic.len() - 1;
    // Fujiwara-style inclusion radius for the initial circle.
    let mut radius = 0.0f64;
    for (k, c) in monic.iter().enumerate().take(degree) {
        let mut mag = c.norm();
        if k == 0 {
            mag *= 0.5;
        }
        radius = radius.max(2.0 * mag.powf(1.0 / (degree - k) as f64));
    }
    if radius == 0.0 {
        radius = 1.0;
    }
    let mut z: Vec<Complex64> = (0..degree)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * (i as f64) / (degree as f64)
                + std::f64::consts::FRAC_PI_2 / (degree as f64);
            Complex64::from_polar(radius, angle)
        })
        .collect();

    for iteration in 1..=ABERTH_MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (p, dp) = eval_with_derivative(monic, z[i]);
            if p == Complex64::ZERO {
                continue;
            }
            let newton = if dp == Complex64::ZERO {
                // Nudge off a critical point.
                Complex64::new(1e-12 * (1.0 + z[i].norm()), 0.0)
            } else {
                p / dp
            };
            let mut repulsion = Complex64::ZERO;
            for (k, &other) in z.iter().enumerate() {
                if k == i {
                    continue;
                }
                let diff = z[i] - other;
                if diff.norm_sqr() > 0.0 {
                    repulsion += diff.inv();
                }
            }
            let denom = Complex64::ONE - newton * repulsion;
            let step = if denom.norm_sqr() > 0.0 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < ABERTH_STEP_TOL {
            return (z, true, iteration);
        }
    }
    (z, false, ABERTH_MAX_ITERATIONS)
}

fn newton_polish(monic: &[Complex64], z: &mut Complex64) {
    for _ in 0..2 {
        let (p, dp) = eval_with_derivative(monic, *z);
        if dp == Complex64::ZERO {
            return;
        }
        let step = p / dp;
        if !step.is_finite() || step.norm() > 0.1 * (1.0 + z.norm()) {
            return;
        }
        *z -= step;
    }
}

/// Discriminant via the Sylvester resultant of p and p', normalized so that a
/// polynomial with all roots real and distinct has positive discriminant and
/// a cubic with one real root and a conjugate pair has a negative one.
pub fn discriminant(poly: &RealPolynomial) -> Result<f64> {
    let m = poly.degree();
    if m < 2 {
        return Err(QesError::DegreeTooLow { min: 2, got: m });
    }
    let deriv = poly.derivative();
    let size = 2 * m - 1;
    let mut sylvester = DMatrix::<f64>::zeros(size, size);
    // m-1 shifted copies of p, then m shifted copies of p'.
    for row in 0..m - 1 {
        for (k, &c) in poly.coeffs().iter().rev().enumerate() {
            sylvester[(row, row + k)] = c;
        }
    }
    for row in 0..m {
        for (k, &c) in deriv.coeffs().iter().rev().enumerate() {
            sylvester[(m - 1 + row, row + k)] = c;
        }
    }
    let resultant = sylvester.lu().determinant();
    let sign = if (m * (m - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * resultant / poly.leading())
}

/// Closed-form reality classifier for the N = 5 cubic sector:
/// Delta = 16 xi^6 - 4 xi^4 + 103 xi^2 - 9.
/// Delta > 0 exactly when the cubic has one real root and a conjugate pair.
pub fn delta_n5(xi: f64) -> f64 {
    let s = xi * xi;
    ((16.0 * s - 4.0) * s + 103.0) * s - 9.0
}
