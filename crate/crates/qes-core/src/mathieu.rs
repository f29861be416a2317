//! The imaginary-sine Mathieu problem -psi'' - 2ig sin(2x) psi = E psi on
//! pi-periodic solutions, solved by Fourier truncation, plus the asymptotic
//! comparison against QES spectra at fixed g = N xi.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QesError, Result};
use crate::problem::QesProblem;
use crate::spectrum::{problem_spectrum, spectrum_of_real_matrix, Spectrum};

/// Default truncation order for transition work; the doubling study shows
/// sub-1e-6 drift at this size for |g| <= 3.
pub const DEFAULT_N_MAX: usize = 32;

/// Coupling plus Fourier truncation order; only the pi-periodic class
/// (modes e^{2inx}, n = -n_max..n_max) is represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuProblem {
    g: f64,
    n_max: usize,
}

impl MathieuProblem {
    pub fn new(g: f64, n_max: usize) -> Result<Self> {
        if !g.is_finite() {
            return Err(QesError::NonFiniteCoupling(g));
        }
        if n_max < 4 {
            return Err(QesError::TruncationTooSmall(n_max));
        }
        Ok(Self { g, n_max })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    /// Truncation shield: eigenvalues with modulus below this are trusted.
    pub fn trusted_bound(&self) -> f64 {
        let b = 2.0 * (self.n_max as f64 - 2.0);
        b * b
    }
}

/// Tridiagonal Fourier-space truncation: diagonal (2n)^2, superdiagonal -g,
/// subdiagonal +g.
#[derive(Debug, Clone, PartialEq)]
pub struct HillMatrix {
    problem: MathieuProblem,
    entries: DMatrix<f64>,
}

impl HillMatrix {
    pub fn new(problem: MathieuProblem) -> Self {
        let dim = problem.dim();
        let n_max = problem.n_max() as isize;
        let g = problem.g();
        let mut entries = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            let mode = n_max - i as isize;
            entries[(i, i)] = (2.0 * mode as f64).powi(2);
            if i + 1 < dim {
                entries[(i, i + 1)] = -g;
                entries[(i + 1, i)] = g;
            }
        }
        Self { problem, entries }
    }

    pub fn problem(&self) -> &MathieuProblem {
        &self.problem
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }
}

pub fn build_hill_matrix(problem: MathieuProblem) -> HillMatrix {
    HillMatrix::new(problem)
}

/// Spectrum of the truncated problem together with the truncation shield.
#[derive(Debug, Clone, PartialEq)]
pub struct MathieuSpectrum {
    pub spectrum: Spectrum,
    pub trusted: Vec<bool>,
    pub trusted_bound: f64,
}

impl MathieuSpectrum {
    /// Trusted eigenvalues in (Re, Im) order.
    pub fn trusted_values(&self) -> Vec<Complex64> {
        self.spectrum
            .eigenvalues()
            .iter()
            .zip(&self.trusted)
            .filter(|(_, t)| **t)
            .map(|(z, _)| *z)
            .collect()
    }
}

pub fn mathieu_eigenvalues(problem: MathieuProblem, tol_reality: f64) -> Result<MathieuSpectrum> {
    let hill = HillMatrix::new(problem);
    let spectrum = spectrum_of_real_matrix(hill.entries(), tol_reality)?;
    let bound = problem.trusted_bound();
    let trusted = spectrum
        .eigenvalues()
        .iter()
        .map(|z| z.norm() < bound)
        .collect();
    Ok(MathieuSpectrum {
        spectrum,
        trusted,
        trusted_bound: bound,
    })
}

/// Whether the two lowest trusted eigenvalues form a conjugate pair rather
/// than two distinct reals.
fn lowest_pair_is_complex(g: f64, n_max: usize, tol_reality: f64) -> Result<bool> {
    let ms = mathieu_eigenvalues(MathieuProblem::new(g, n_max)?, tol_reality)?;
    let trusted = ms.trusted_values();
    if trusted.len() < 2 {
        return Err(QesError::InvalidInput(format!(
            "only {} trusted eigenvalues at n_max = {n_max}; increase the truncation",
            trusted.len()
        )));
    }
    let a = trusted[0];
    let b = trusted[1];
    let complex = a.im != 0.0 && b.im != 0.0 && (a - b.conj()).norm() <= 1e-8 * (1.0 + a.norm());
    Ok(complex)
}

/// Bisects for the coupling where the two lowest pi-periodic eigenvalues
/// merge and turn complex. The result is certified by re-running at twice
/// the truncation order; disagreement beyond 10x tol is an error.
pub fn locate_gc(bracket: (f64, f64), tol: f64, n_max: usize, tol_reality: f64) -> Result<f64> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QesError::InvalidInput(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    let first = locate_gc_single(bracket, tol, n_max, tol_reality)?;
    let second = locate_gc_single(bracket, tol, 2 * n_max, tol_reality)?;
    let allowed = 10.0 * tol;
    if (first - second).abs() > allowed {
        return Err(QesError::TruncationUnstable {
            first,
            second,
            allowed,
        });
    }
    Ok(first)
}

fn locate_gc_single(bracket: (f64, f64), tol: f64, n_max: usize, tol_reality: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(QesError::InvalidInput(format!(
            "bracket must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    let class_lo = lowest_pair_is_complex(lo, n_max, tol_reality)?;
    let class_hi = lowest_pair_is_complex(hi, n_max, tol_reality)?;
    if class_lo == class_hi {
        return Err(QesError::NoBracket { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if lowest_pair_is_complex(mid, n_max, tol_reality)? == class_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One compared level of the asymptotic check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub level: usize,
    pub qes_shifted: Complex64,
    pub mathieu: Complex64,
    pub abs_dev: f64,
}

/// Side-by-side lowest levels of the shifted QES spectrum (E + N^2) and the
/// truncated Mathieu spectrum at the same g = N xi.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub big_n: u32,
    pub g: f64,
    pub xi: f64,
    pub n_max: usize,
    pub rows: Vec<ComparisonRow>,
}

pub fn qes_vs_mathieu(
    big_n: u32,
    g: f64,
    k: usize,
    n_max: usize,
    tol_reality: f64,
) -> Result<ComparisonReport> {
    if big_n == 0 {
        return Err(QesError::InvalidBigN);
    }
    if big_n.is_multiple_of(2) {
        return Err(QesError::InvalidInput(
            "even N compares against the pi-anti-periodic Mathieu class, which is not represented"
                .into(),
        ));
    }
    if k == 0 || k > big_n as usize {
        return Err(QesError::InvalidInput(format!(
            "k must satisfy 1 <= k <= N, got k = {k} for N = {big_n}"
        )));
    }
    let xi = g / big_n as f64;
    let qes = problem_spectrum(QesProblem::new(big_n, xi)?, tol_reality)?;
    let nsq = (big_n as f64) * (big_n as f64);
    let shifted: Vec<Complex64> = qes
        .eigenvalues()
        .iter()
        .map(|z| z + Complex64::new(nsq, 0.0))
        .collect();
    let ms = mathieu_eigenvalues(MathieuProblem::new(g, n_max)?, tol_reality)?;
    let trusted = ms.trusted_values();
    if trusted.len() < k {
        return Err(QesError::InvalidInput(format!(
            "only {} trusted Mathieu eigenvalues at n_max = {n_max}, need {k}",
            trusted.len()
        )));
    }
    let rows = (0..k)
        .map(|level| {
            let dev = (shifted[level] - trusted[level]).norm();
            ComparisonRow {
                level,
                qes_shifted: shifted[level],
                mathieu: trusted[level],
                abs_dev: dev,
            }
        })
        .collect();
    Ok(ComparisonReport {
        big_n,
        g,
        xi,
        n_max,
        rows,
    })
}
