//! Locating exceptional points: real couplings where two QES eigenvalues of
//! an odd-N problem coalesce and branch into the complex plane.
//!
//! The primary detector is the sign of the sector characteristic polynomial's
//! discriminant, which flips exactly at a reality transition; a golden-section
//! minimization of the eigenvalue gap then polishes the bisection result and
//! certifies the coalescence.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen;
use crate::error::{QesError, Result};
use crate::polynomial::{discriminant, tridiagonal_characteristic_polynomial};
use crate::problem::{GaugedMatrix, QesProblem, Sector};
use crate::spectrum::{self, min_pairwise_gap, problem_spectrum};

/// Knobs for scans and refinement.
#[derive(Debug, Clone, Copy)]
pub struct CriticalConfig {
    /// Grid step of the coupling pre-scan.
    pub scan_step: f64,
    /// Bracket width at which discriminant bisection stops.
    pub bisection_tol: f64,
    /// Largest eigenvalue gap accepted as a certified coalescence.
    pub gap_certificate: f64,
    /// Relative reality tolerance handed to spectra.
    pub tol_reality: f64,
    /// Scan gaps below this become refinement candidates even without a
    /// discriminant sign change.
    pub gap_candidate_threshold: f64,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        Self {
            scan_step: 1e-3,
            bisection_tol: 1e-8,
            gap_certificate: 1e-5,
            tol_reality: spectrum::DEFAULT_TOL_REALITY,
            gap_candidate_threshold: 0.05,
        }
    }
}

/// How an exceptional point was pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionMethod {
    DiscriminantBisection,
    GapMinimization,
}

impl DetectionMethod {
    pub fn label(&self) -> &'static str {
        match self {
            DetectionMethod::DiscriminantBisection => "discriminant-bisection",
            DetectionMethod::GapMinimization => "gap-minimization",
        }
    }
}

/// A certified coalescence of two eigenvalues at a positive coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalPoint {
    pub big_n: u32,
    pub xi_c: f64,
    pub coalesced_energy: Complex64,
    /// Indices of the merging eigenvalues in the full sorted spectrum at xi_c.
    pub pair: (usize, usize),
    /// Smallest eigenvalue gap achieved at the refined coupling.
    pub gap_at_xic: f64,
    pub sector: Sector,
    pub method: DetectionMethod,
    /// Set on the smallest critical coupling of a scan.
    pub is_first: bool,
}

/// Per-coupling counts of real eigenvalues and conjugate pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RealityProfile {
    pub xi_grid: Vec<f64>,
    pub n_real: Vec<usize>,
    pub n_pairs: Vec<usize>,
}

/// Reality counts of the N-level QES spectrum over a strictly increasing grid.
pub fn reality_profile(big_n: u32, xi_grid: &[f64], tol_reality: f64) -> Result<RealityProfile> {
    if xi_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QesError::InvalidInput(
            "xi grid must be strictly increasing".into(),
        ));
    }
    let counts: Vec<(usize, usize)> = xi_grid
        .par_iter()
        .map(|&xi| {
            let s = problem_spectrum(QesProblem::new(big_n, xi)?, tol_reality)?;
            Ok((s.n_real(), s.n_conjugate_pairs()))
        })
        .collect::<Result<_>>()?;
    Ok(RealityProfile {
        xi_grid: xi_grid.to_vec(),
        n_real: counts.iter().map(|c| c.0).collect(),
        n_pairs: counts.iter().map(|c| c.1).collect(),
    })
}

fn require_odd(big_n: u32) -> Result<()> {
    if big_n == 0 {
        return Err(QesError::InvalidBigN);
    }
    if big_n.is_multiple_of(2) {
        return Err(QesError::EvenNNoSplit(big_n));
    }
    Ok(())
}

fn sector_matrix(big_n: u32, xi: f64, sector: Sector) -> Result<nalgebra::DMatrix<f64>> {
    let split = GaugedMatrix::new(QesProblem::new(big_n, xi)?).split_sectors()?;
    Ok(split.block(sector).matrix.clone())
}

/// Discriminant of one sector's characteristic polynomial; None when the
/// block is too small to ever coalesce.
fn sector_discriminant(big_n: u32, xi: f64, sector: Sector) -> Result<Option<f64>> {
    let block = sector_matrix(big_n, xi, sector)?;
    if block.nrows() < 2 {
        return Ok(None);
    }
    let poly = tridiagonal_characteristic_polynomial(&block)?;
    discriminant(&poly).map(Some)
}

/// Smallest eigenvalue gap within one sector block.
fn sector_gap(big_n: u32, xi: f64, sector: Sector) -> Result<f64> {
    let block = sector_matrix(big_n, xi, sector)?;
    if block.nrows() < 2 {
        return Ok(f64::INFINITY);
    }
    Ok(min_pairwise_gap(&eigen::eigenvalues_real(&block)?))
}

/// Bisection on the discriminant sign down to bracket width `tol`.
fn bisect_discriminant(
    big_n: u32,
    sector: Sector,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut d_lo = sector_discriminant(big_n, lo, sector)?
        .ok_or(QesError::NoBracket { lo, hi })?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let d_mid = sector_discriminant(big_n, mid, sector)?.unwrap();
        if d_mid == 0.0 {
            let quarter = 0.25 * (hi - lo);
            return Ok(((mid - quarter).max(lo), (mid + quarter).min(hi)));
        }
        if d_mid.signum() == d_lo.signum() {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

const GOLDEN_RATIO_CONJ: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of the sector gap; returns (xi, gap).
fn minimize_gap(big_n: u32, sector: Sector, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let gap_at = |xi: f64| sector_gap(big_n, xi, sector);
    let mut x1 = hi - GOLDEN_RATIO_CONJ * (hi - lo);
    let mut x2 = lo + GOLDEN_RATIO_CONJ * (hi - lo);
    let mut f1 = gap_at(x1)?;
    let mut f2 = gap_at(x2)?;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN_RATIO_CONJ * (hi - lo);
            f1 = gap_at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN_RATIO_CONJ * (hi - lo);
            f2 = gap_at(x2)?;
        }
    }
    let xi = if f1 <= f2 { x1 } else { x2 };
    Ok((xi, f1.min(f2)))
}

fn certify(
    big_n: u32,
    sector: Sector,
    xi_c: f64,
    gap: f64,
    method: DetectionMethod,
    config: &CriticalConfig,
) -> Result<ExceptionalPoint> {
    if gap > config.gap_certificate {
        return Err(QesError::CoalescenceNotCertified {
            xi: xi_c,
            gap,
            threshold: config.gap_certificate,
        });
    }
    let block = sector_matrix(big_n, xi_c, sector)?;
    let eigs = eigen::eigenvalues_real(&block)?;
    let mut pair = (0usize, 1usize);
    let mut best = f64::INFINITY;
    for i in 0..eigs.len() {
        for k in (i + 1)..eigs.len() {
            let d = (eigs[i] - eigs[k]).norm();
            if d < best {
                best = d;
                pair = (i, k);
            }
        }
    }
    let mut energy = (eigs[pair.0] + eigs[pair.1]) * 0.5;
    if energy.im.abs() <= config.gap_certificate {
        // A reality transition merges on the real axis; drop the dust.
        energy.im = 0.0;
    }
    let full = problem_spectrum(QesProblem::new(big_n, xi_c)?, config.tol_reality)?;
    let mut dist: Vec<(usize, f64)> = full
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z - energy).norm()))
        .collect();
    dist.sort_by(|a, b| a.1.total_cmp(&b.1));
    let full_pair = (dist[0].0.min(dist[1].0), dist[0].0.max(dist[1].0));
    Ok(ExceptionalPoint {
        big_n,
        xi_c,
        coalesced_energy: energy,
        pair: full_pair,
        gap_at_xic: best,
        sector,
        method,
        is_first: false,
    })
}

fn refine_sign_change(
    big_n: u32,
    sector: Sector,
    lo: f64,
    hi: f64,
    tol: f64,
    config: &CriticalConfig,
) -> Result<ExceptionalPoint> {
    let (a, b) = bisect_discriminant(big_n, sector, lo, hi, tol)?;
    let width = (b - a).max(tol);
    let polish_lo = (a - 16.0 * width).max(lo.min(a));
    let polish_hi = (b + 16.0 * width).min(hi.max(b));
    let (xi_c, gap) = minimize_gap(big_n, sector, polish_lo, polish_hi)?;
    certify(
        big_n,
        sector,
        xi_c,
        gap,
        DetectionMethod::DiscriminantBisection,
        config,
    )
}

/// Refines a candidate interval by pure gap minimization. Used for scan
/// minima that never flip a discriminant sign.
pub fn refine_by_gap(
    big_n: u32,
    sector: Sector,
    lo: f64,
    hi: f64,
    config: &CriticalConfig,
) -> Result<ExceptionalPoint> {
    require_odd(big_n)?;
    let (xi_c, gap) = minimize_gap(big_n, sector, lo, hi)?;
    certify(
        big_n,
        sector,
        xi_c,
        gap,
        DetectionMethod::GapMinimization,
        config,
    )
}

/// Locates the single exceptional point inside `bracket` by bisecting the
/// sector discriminant sign, then polishing with a gap minimization.
///
/// A 100-point pre-scan decides which sector changes its reality class; zero
/// changes raise `NoBracket`, more than one raise `AmbiguousBracket`.
pub fn locate_critical_xi(
    big_n: u32,
    bracket: (f64, f64),
    tol: f64,
    config: &CriticalConfig,
) -> Result<ExceptionalPoint> {
    require_odd(big_n)?;
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(QesError::InvalidInput(format!(
            "bracket must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QesError::InvalidInput(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    const PRESCAN: usize = 100;
    let xs: Vec<f64> = (0..=PRESCAN)
        .map(|i| lo + (hi - lo) * i as f64 / PRESCAN as f64)
        .collect();
    let mut events: Vec<(Sector, f64, f64)> = Vec::new();
    for sector in [Sector::Even, Sector::Odd] {
        let discs: Vec<Option<f64>> = xs
            .par_iter()
            .map(|&x| sector_discriminant(big_n, x, sector))
            .collect::<Result<_>>()?;
        for i in 0..PRESCAN {
            match (discs[i], discs[i + 1]) {
                (Some(a), Some(b)) if a == 0.0 || (a.signum() != b.signum() && b != 0.0) => {
                    events.push((sector, xs[i.saturating_sub(1)], xs[i + 1]));
                }
                _ => {}
            }
        }
    }
    match events.len() {
        0 => Err(QesError::NoBracket { lo, hi }),
        1 => {
            let (sector, a, b) = events[0];
            refine_sign_change(big_n, sector, a, b, tol, config)
        }
        count => Err(QesError::AmbiguousBracket { lo, hi, count }),
    }
}

/// Finds every certified exceptional point with 0 < xi <= xi_max, ascending;
/// the lowest is flagged `is_first`.
pub fn all_critical_points(
    big_n: u32,
    xi_max: f64,
    config: &CriticalConfig,
) -> Result<Vec<ExceptionalPoint>> {
    require_odd(big_n)?;
    if !(xi_max.is_finite() && xi_max > 0.0) {
        return Err(QesError::InvalidInput(format!(
            "xi_max must be positive, got {xi_max}"
        )));
    }
    let steps = (xi_max / config.scan_step).ceil() as usize;
    let xs: Vec<f64> = (0..=steps)
        .map(|i| (i as f64 * config.scan_step).min(xi_max))
        .collect();
    let mut points: Vec<ExceptionalPoint> = Vec::new();
    for sector in [Sector::Even, Sector::Odd] {
        let samples: Vec<(Option<f64>, f64)> = xs
            .par_iter()
            .map(|&x| {
                let d = sector_discriminant(big_n, x, sector)?;
                let g = sector_gap(big_n, x, sector)?;
                Ok((d, g))
            })
            .collect::<Result<_>>()?;
        let mut sign_changes: Vec<(f64, f64)> = Vec::new();
        for i in 0..xs.len() - 1 {
            match (samples[i].0, samples[i + 1].0) {
                (Some(a), Some(b)) if a == 0.0 || (a.signum() != b.signum() && b != 0.0) => {
                    sign_changes.push((xs[i.saturating_sub(1)], xs[i + 1]));
                }
                _ => {}
            }
        }
        for &(a, b) in &sign_changes {
            match refine_sign_change(big_n, sector, a, b, config.bisection_tol, config) {
                Ok(ep) => points.push(ep),
                Err(QesError::CoalescenceNotCertified { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        // Gap minima without a sign change: refine, keep only if certified.
        for i in 1..xs.len() - 1 {
            let g = samples[i].1;
            if g < config.gap_candidate_threshold
                && g <= samples[i - 1].1
                && g <= samples[i + 1].1
                && !sign_changes
                    .iter()
                    .any(|&(a, b)| xs[i] >= a - config.scan_step && xs[i] <= b + config.scan_step)
            {
                if let Ok(ep) = refine_by_gap(big_n, sector, xs[i - 1], xs[i + 1], config) {
                    points.push(ep);
                }
            }
        }
    }
    points.sort_by(|p, q| p.xi_c.total_cmp(&q.xi_c));
    points.dedup_by(|b, a| {
        if (b.xi_c - a.xi_c).abs() < 1e-6 && b.sector == a.sector {
            if b.method == DetectionMethod::DiscriminantBisection {
                a.method = DetectionMethod::DiscriminantBisection;
            }
            true
        } else {
            false
        }
    });
    if let Some(first) = points.first_mut() {
        first.is_first = true;
    }
    Ok(points)
}

/// One row of the coupling-scaling table.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub big_n: u32,
    pub xi_c_first: f64,
    pub n_times_xi: f64,
}

/// First critical couplings for a list of odd N with the N * xi_c product.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Whether the N * xi_c column decreases monotonically (reported, not
    /// enforced).
    pub monotone_decreasing: bool,
}

pub fn scaling_table(odd_n: &[u32], config: &CriticalConfig) -> Result<ScalingTable> {
    let mut rows = Vec::with_capacity(odd_n.len());
    for &big_n in odd_n {
        require_odd(big_n)?;
        if big_n < 3 {
            return Err(QesError::InvalidInput(
                "scaling rows need N >= 3 (N = 1 has nothing to coalesce)".into(),
            ));
        }
        let horizon = 3.0 / big_n as f64;
        let points = all_critical_points(big_n, horizon, config)?;
        let first = points.first().ok_or(QesError::NoBracket {
            lo: 0.0,
            hi: horizon,
        })?;
        rows.push(ScalingRow {
            big_n,
            xi_c_first: first.xi_c,
            n_times_xi: big_n as f64 * first.xi_c,
        });
    }
    let monotone_decreasing = rows.windows(2).all(|w| w[1].n_times_xi < w[0].n_times_xi);
    Ok(ScalingTable {
        rows,
        monotone_decreasing,
    })
}

/// Least-squares exponent of gap ~ C |xi - xi_c|^beta on the real side of an
/// exceptional point, fitted over offsets in [1e-6, 1e-4].
pub fn branch_exponent(ep: &ExceptionalPoint) -> Result<f64> {
    let mut logs: Vec<(f64, f64)> = Vec::new();
    let n_points = 13;
    for i in 0..n_points {
        let t = i as f64 / (n_points - 1) as f64;
        let offset = 1e-6 * (1e2f64).powf(t);
        let xi = ep.xi_c - offset;
        if xi <= 0.0 {
            continue;
        }
        let gap = sector_gap(ep.big_n, xi, ep.sector)?;
        if gap.is_finite() && gap > 0.0 {
            logs.push((offset.ln(), gap.ln()));
        }
    }
    if logs.len() < 4 {
        return Err(QesError::InvalidInput(
            "too few usable points for the branch-exponent fit".into(),
        ));
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
