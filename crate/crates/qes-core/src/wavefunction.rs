//! Band-edge eigenfunctions psi(x) = e^{i(1-N)x} e^{(i/2) xi sin 2x} P(x)
//! with P a degree-(N-1) trigonometric polynomial, reconstructed from gauged
//! eigenvectors and validated directly against the Schrodinger equation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QesError, Result};
use crate::problem::{GaugedMatrix, QesProblem};
use crate::spectrum::spectrum_of_real_matrix;

/// A supplied energy must sit this close to a computed eigenvalue.
pub const ENERGY_MATCH_TOL: f64 = 1e-6;
/// Below this eigenvalue separation the pair counts as (nearly) defective.
pub const DEFECTIVE_GAP: f64 = 1e-4;
/// Residual targets for inverse iteration, plain and near-defective.
pub const RESIDUAL_TARGET: f64 = 1e-8;
pub const RESIDUAL_TARGET_DEFECTIVE: f64 = 1e-4;
/// Grid size used by the classification checks.
pub const CLASSIFICATION_GRID: usize = 257;

/// Warning attached to eigenvectors computed next to a coalescence, where the
/// eigenvector is unique only up to scale and conditioning is poor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectivePairWarning {
    pub partner: Complex64,
    pub gap: f64,
}

/// Output of the shifted inverse iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorSolution {
    /// Sup-normalized monomial coefficients; the largest entry is exactly 1.
    pub coeffs: Vec<Complex64>,
    /// Snapped eigenvalue actually used as the shift.
    pub energy: Complex64,
    /// Achieved infinity-norm residual of (H - E I) c.
    pub residual: f64,
    pub defective: Option<DefectivePairWarning>,
}

/// Inverse iteration with the shift snapped to the nearest eigenvalue.
///
/// The snap targets the raw solver output rather than the symmetrized
/// spectrum: high even-N levels carry imaginary parts well below the reality
/// tolerance, and flattening those would put an O(Im) floor under the
/// residual.
pub fn eigenvector_for(matrix: &GaugedMatrix, energy: Complex64) -> Result<EigenvectorSolution> {
    let raw = crate::eigen::eigenvalues_real(matrix.entries())?;
    let (nearest_idx, distance) = raw
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z - energy).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("gauged matrices have at least one eigenvalue");
    if distance > ENERGY_MATCH_TOL {
        return Err(QesError::NotAnEigenvalue {
            shift: energy,
            closest: distance,
            tol: ENERGY_MATCH_TOL,
        });
    }
    let shift = raw[nearest_idx];
    let defective = raw
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != nearest_idx)
        .map(|(_, z)| (*z, (z - shift).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .filter(|(_, gap)| *gap < DEFECTIVE_GAP)
        .map(|(partner, gap)| DefectivePairWarning { partner, gap });

    let n = matrix.dim();
    let h: DMatrix<Complex64> = matrix.entries().map(|x| Complex64::new(x, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
    let mut v = DVector::<Complex64>::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    sup_normalize(&mut v);

    let mut effective_shift = shift;
    let mut lu = shifted_lu(&h, effective_shift);
    let mut best = v.clone();
    let mut best_residual = f64::INFINITY;
    for iteration in 0..10 {
        let solved = match lu.solve(&v) {
            Some(w) if w.iter().all(|z| z.is_finite()) => w,
            _ => {
                // Exactly singular shift: nudge into the resolvent set.
                effective_shift += Complex64::new(1e-13, 1e-13) * (1.0 + shift.norm());
                lu = shifted_lu(&h, effective_shift);
                match lu.solve(&v) {
                    Some(w) => w,
                    None => break,
                }
            }
        };
        v = solved;
        sup_normalize(&mut v);
        let residual = eigen_residual(&h, shift, &v);
        if residual < best_residual {
            best_residual = residual;
            best.copy_from(&v);
        }
        // Stop well below RESIDUAL_TARGET; converged shifts reach machine
        // level in a couple of solves.
        if iteration >= 2 && best_residual <= 1e-13 * (1.0 + shift.norm()) {
            break;
        }
    }
    Ok(EigenvectorSolution {
        coeffs: best.iter().copied().collect(),
        energy: shift,
        residual: best_residual,
        defective,
    })
}

fn shifted_lu(
    h: &DMatrix<Complex64>,
    shift: Complex64,
) -> nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn> {
    let n = h.nrows();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    a.lu()
}

fn sup_normalize(v: &mut DVector<Complex64>) {
    let mut idx = 0;
    let mut max = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > max {
            max = z.norm();
            idx = i;
        }
    }
    if max > 0.0 {
        let pivot = v[idx];
        for z in v.iter_mut() {
            *z /= pivot;
        }
    }
}

fn eigen_residual(h: &DMatrix<Complex64>, shift: Complex64, v: &DVector<Complex64>) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        let mut acc = -shift * v[r];
        for c in r.saturating_sub(1)..(r + 2).min(n) {
            acc += h[(r, c)] * v[c];
        }
        worst = worst.max(acc.norm());
    }
    worst
}

/// Periodicity class of a band-edge eigenfunction under x -> x + pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodicity {
    PiPeriodic,
    PiAntiPeriodic,
}

impl Periodicity {
    pub fn label(&self) -> &'static str {
        match self {
            Periodicity::PiPeriodic => "pi-periodic",
            Periodicity::PiAntiPeriodic => "pi-anti-periodic",
        }
    }
}

/// Result of the PT test conj(psi(-x)) = alpha psi(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PtSymmetry {
    Symmetric { phase: Complex64 },
    Broken { max_deviation: f64 },
}

impl PtSymmetry {
    pub fn is_symmetric(&self) -> bool {
        matches!(self, PtSymmetry::Symmetric { .. })
    }
}

/// A reconstructed eigenfunction: energy plus the monomial coefficients of
/// the polynomial factor in z = e^{2ix}.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    problem: QesProblem,
    energy: Complex64,
    coeffs: Vec<Complex64>,
}

impl Eigenfunction {
    /// Wraps explicit coefficients (sup-normalizing them); used for
    /// closed-form constructions and cross-checks.
    pub fn from_coefficients(
        problem: QesProblem,
        energy: Complex64,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if coeffs.len() != problem.big_n() as usize {
            return Err(QesError::InvalidInput(format!(
                "expected {} coefficients, got {}",
                problem.big_n(),
                coeffs.len()
            )));
        }
        let mut v = DVector::from_vec(coeffs);
        sup_normalize(&mut v);
        Ok(Self {
            problem,
            energy,
            coeffs: v.iter().copied().collect(),
        })
    }

    /// Computes the eigenfunction for an energy near a true eigenvalue.
    pub fn compute(
        problem: QesProblem,
        energy: Complex64,
    ) -> Result<(Self, Option<DefectivePairWarning>)> {
        let matrix = GaugedMatrix::new(problem);
        let solution = eigenvector_for(&matrix, energy)?;
        Ok((
            Self {
                problem,
                energy: solution.energy,
                coeffs: solution.coeffs,
            },
            solution.defective,
        ))
    }

    pub fn problem(&self) -> &QesProblem {
        &self.problem
    }

    pub fn energy(&self) -> Complex64 {
        self.energy
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The PT image: conj(psi(-x)) has conjugated coefficients at the
    /// conjugated energy.
    pub fn pt_image(&self) -> Self {
        Self {
            problem: self.problem,
            energy: self.energy.conj(),
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    fn polynomial_part(&self, x: f64) -> (Complex64, Complex64, Complex64) {
        let mut p = Complex64::ZERO;
        let mut dp = Complex64::ZERO;
        let mut ddp = Complex64::ZERO;
        for (k, &c) in self.coeffs.iter().enumerate() {
            let kf = k as f64;
            let mode = Complex64::new(0.0, 2.0 * kf * x).exp() * c;
            p += mode;
            dp += Complex64::new(0.0, 2.0 * kf) * mode;
            ddp += Complex64::new(-4.0 * kf * kf, 0.0) * mode;
        }
        (p, dp, ddp)
    }

    fn prefactor_exponent(&self, x: f64) -> Complex64 {
        let big_n = self.problem.big_n() as f64;
        let xi = self.problem.xi();
        Complex64::new(0.0, (1.0 - big_n) * x + 0.5 * xi * (2.0 * x).sin())
    }

    /// psi(x); the prefactor is unimodular for real coupling, so values stay
    /// O(max |P|).
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let (p, _, _) = self.polynomial_part(x);
        self.prefactor_exponent(x).exp() * p
    }

    /// psi''(x) from the closed-form factors.
    pub fn evaluate_second_derivative(&self, x: f64) -> Complex64 {
        let big_n = self.problem.big_n() as f64;
        let xi = self.problem.xi();
        let (p, dp, ddp) = self.polynomial_part(x);
        let dphi = Complex64::new(0.0, (1.0 - big_n) + xi * (2.0 * x).cos());
        let ddphi = Complex64::new(0.0, -2.0 * xi * (2.0 * x).sin());
        self.prefactor_exponent(x).exp() * ((ddphi + dphi * dphi) * p + 2.0 * dphi * dp + ddp)
    }

    /// max_x |psi'' (x) + (i xi sin 2x + N)^2 psi + E psi| / max_x |psi|,
    /// the pointwise defect of the Schrodinger equation on `grid`.
    pub fn schrodinger_residual(&self, grid: &[f64]) -> Result<f64> {
        if grid.is_empty() {
            return Err(QesError::InvalidInput(
                "residual grid must not be empty".into(),
            ));
        }
        let big_n = self.problem.big_n() as f64;
        let xi = self.problem.xi();
        let mut worst = 0.0f64;
        let mut amplitude = 0.0f64;
        for &x in grid {
            let psi = self.evaluate(x);
            let psi2 = self.evaluate_second_derivative(x);
            let w = Complex64::new(big_n, xi * (2.0 * x).sin());
            let defect = -psi2 - w * w * psi - self.energy * psi;
            worst = worst.max(defect.norm());
            amplitude = amplitude.max(psi.norm());
        }
        if amplitude == 0.0 {
            return Err(QesError::InvalidInput(
                "eigenfunction vanishes on the whole grid".into(),
            ));
        }
        Ok(worst / amplitude)
    }

    /// Classifies psi(x + pi) / psi(x) as +1 or -1 on sample points away from
    /// zeros. Structurally this equals the parity of N - 1.
    pub fn periodicity_class(&self) -> Result<Periodicity> {
        let grid = uniform_grid(CLASSIFICATION_GRID);
        let values: Vec<(Complex64, Complex64)> = grid
            .iter()
            .map(|&x| (self.evaluate(x), self.evaluate(x + std::f64::consts::PI)))
            .collect();
        let amplitude = values
            .iter()
            .map(|(a, _)| a.norm())
            .fold(0.0f64, f64::max);
        let mut max_dev_plus = 0.0f64;
        let mut max_dev_minus = 0.0f64;
        let mut used = 0usize;
        for (here, shifted) in &values {
            if here.norm() < 1e-6 * amplitude {
                continue;
            }
            let ratio = shifted / here;
            max_dev_plus = max_dev_plus.max((ratio - Complex64::ONE).norm());
            max_dev_minus = max_dev_minus.max((ratio + Complex64::ONE).norm());
            used += 1;
        }
        if used == 0 {
            return Err(QesError::InconclusivePeriodicity(f64::INFINITY));
        }
        if max_dev_plus <= 1e-8 {
            Ok(Periodicity::PiPeriodic)
        } else if max_dev_minus <= 1e-8 {
            Ok(Periodicity::PiAntiPeriodic)
        } else {
            Err(QesError::InconclusivePeriodicity(
                max_dev_plus.min(max_dev_minus),
            ))
        }
    }

    /// Searches for a unimodular alpha with conj(psi(-x)) = alpha psi(x):
    /// fitted where |psi| peaks, then verified on the whole grid.
    pub fn pt_symmetry(&self, tol: f64) -> PtSymmetry {
        let grid = uniform_grid(CLASSIFICATION_GRID);
        let values: Vec<(Complex64, Complex64)> = grid
            .iter()
            .map(|&x| (self.evaluate(x), self.evaluate(-x).conj()))
            .collect();
        let (peak_idx, amplitude) = values
            .iter()
            .enumerate()
            .map(|(i, (a, _))| (i, a.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("grid is nonempty");
        if amplitude == 0.0 {
            return PtSymmetry::Broken {
                max_deviation: f64::INFINITY,
            };
        }
        let alpha_raw = values[peak_idx].1 / values[peak_idx].0;
        let modulus_defect = (alpha_raw.norm() - 1.0).abs();
        let alpha = if alpha_raw.norm() > 0.0 {
            alpha_raw / alpha_raw.norm()
        } else {
            Complex64::ONE
        };
        let mut max_dev = modulus_defect;
        for (here, reflected) in &values {
            max_dev = max_dev.max((reflected - alpha * here).norm() / amplitude);
        }
        if max_dev <= tol {
            PtSymmetry::Symmetric { phase: alpha }
        } else {
            PtSymmetry::Broken { max_deviation: max_dev }
        }
    }
}

/// Uniform grid on [0, pi).
pub fn uniform_grid(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| std::f64::consts::PI * i as f64 / len as f64)
        .collect()
}

/// Every eigenpair of a problem, each with its possible defectiveness
/// warning. Degenerate energies share one representative eigenvector.
pub fn all_eigenfunctions(
    problem: QesProblem,
    tol_reality: f64,
) -> Result<Vec<(Eigenfunction, Option<DefectivePairWarning>)>> {
    let matrix = GaugedMatrix::new(problem);
    let spectrum = spectrum_of_real_matrix(matrix.entries(), tol_reality)?;
    spectrum
        .eigenvalues()
        .iter()
        .map(|&energy| Eigenfunction::compute(problem, energy))
        .collect()
}
