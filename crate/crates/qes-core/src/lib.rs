//! Quasi-exactly solvable spectra of the complex PT-symmetric periodic
//! potential V(x) = -(i xi sin 2x + N)^2.
//!
//! The crate builds the finite gauged matrix of the problem, splits it into
//! its two symmetry sectors, finds spectra both through characteristic
//! polynomials and through a dense QR eigensolver, locates the exceptional
//! points where eigenvalue pairs coalesce and turn complex, reconstructs and
//! validates band-edge eigenfunctions, and checks the large-N correspondence
//! with the imaginary-coupling Mathieu equation.

pub mod critical;
pub mod eigen;
pub mod error;
pub mod mathieu;
pub mod polynomial;
pub mod problem;
pub mod spectrum;
pub mod wavefunction;

pub use critical::{
    all_critical_points, branch_exponent, locate_critical_xi, reality_profile, scaling_table,
    CriticalConfig, DetectionMethod, ExceptionalPoint, RealityProfile, ScalingRow, ScalingTable,
};
pub use error::{QesError, Result};
pub use mathieu::{
    build_hill_matrix, locate_gc, mathieu_eigenvalues, qes_vs_mathieu, ComparisonReport,
    ComparisonRow, HillMatrix, MathieuProblem, MathieuSpectrum, DEFAULT_N_MAX,
};
pub use polynomial::{
    characteristic_polynomial, delta_n5, discriminant, roots,
    tridiagonal_characteristic_polynomial, RealPolynomial,
};
pub use problem::{
    build_gauged_matrix, involution_matrix, split_sectors, GaugedMatrix, QesProblem, Sector,
    SectorBlock, SectorSplit,
};
pub use spectrum::{
    min_pairwise_gap, optimal_max_distance, problem_spectrum, spectrum_of_complex_matrix,
    spectrum_of_real_matrix, Spectrum, DEFAULT_TOL_REALITY,
};
pub use wavefunction::{
    all_eigenfunctions, eigenvector_for, uniform_grid, DefectivePairWarning, Eigenfunction,
    EigenvectorSolution, Periodicity, PtSymmetry,
};

pub use num_complex::Complex64;
