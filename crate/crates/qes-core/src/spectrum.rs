//! Spectra with reality classification, conjugate pairing, and sector labels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen;
use crate::error::{QesError, Result};
use crate::problem::{GaugedMatrix, QesProblem, Sector};

/// Default relative tolerance deciding whether an eigenvalue counts as real.
pub const DEFAULT_TOL_REALITY: f64 = 1e-9;

/// Eigenvalues sorted by (Re, Im) with reality flags, conjugate-partner
/// indices, and (for odd-N problems solved sector by sector) block labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    reality: Vec<bool>,
    pair_index: Vec<Option<usize>>,
    sectors: Vec<Option<Sector>>,
    tol_reality: f64,
}

impl Spectrum {
    /// Assembles a spectrum from labeled values. `symmetrize` snaps values
    /// that classify as real onto the real axis and replaces the remaining
    /// values by exact conjugate pairs; use it whenever the source matrix (or
    /// polynomial) has real entries.
    pub fn from_labeled_values(
        mut values: Vec<(Complex64, Option<Sector>)>,
        tol_reality: f64,
        symmetrize: bool,
    ) -> Self {
        if symmetrize {
            let mut raw: Vec<Complex64> = values.iter().map(|(z, _)| *z).collect();
            conjugate_symmetrize(&mut raw, tol_reality);
            // Symmetrization never reorders, so labels stay aligned.
            for (slot, z) in values.iter_mut().zip(raw) {
                slot.0 = z;
            }
        }
        values.sort_by(|a, b| {
            a.0.re
                .total_cmp(&b.0.re)
                .then(a.0.im.total_cmp(&b.0.im))
                .then(sector_rank(a.1).cmp(&sector_rank(b.1)))
        });
        let eigenvalues: Vec<Complex64> = values.iter().map(|(z, _)| *z).collect();
        let sectors: Vec<Option<Sector>> = values.iter().map(|(_, s)| *s).collect();
        let reality: Vec<bool> = eigenvalues
            .iter()
            .map(|z| is_real_within(*z, tol_reality))
            .collect();
        let mut pair_index: Vec<Option<usize>> = vec![None; eigenvalues.len()];
        let mut unpaired: Vec<usize> = (0..eigenvalues.len()).filter(|&i| !reality[i]).collect();
        while let Some(i) = unpaired.pop() {
            let mut best: Option<(usize, f64)> = None;
            for (slot, &k) in unpaired.iter().enumerate() {
                let d = (eigenvalues[k] - eigenvalues[i].conj()).norm();
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((slot, d));
                }
            }
            if let Some((slot, d)) = best {
                let k = unpaired.remove(slot);
                if d <= 1e-6 * (1.0 + eigenvalues[i].norm()) {
                    pair_index[i] = Some(k);
                    pair_index[k] = Some(i);
                }
            }
        }
        Self {
            eigenvalues,
            reality,
            pair_index,
            sectors,
            tol_reality,
        }
    }

    pub fn from_values(values: Vec<Complex64>, tol_reality: f64, symmetrize: bool) -> Self {
        Self::from_labeled_values(
            values.into_iter().map(|z| (z, None)).collect(),
            tol_reality,
            symmetrize,
        )
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn reality_flags(&self) -> &[bool] {
        &self.reality
    }

    pub fn pair_indices(&self) -> &[Option<usize>] {
        &self.pair_index
    }

    pub fn sectors(&self) -> &[Option<Sector>] {
        &self.sectors
    }

    pub fn tol_reality(&self) -> f64 {
        self.tol_reality
    }

    pub fn n_real(&self) -> usize {
        self.reality.iter().filter(|&&r| r).count()
    }

    pub fn n_conjugate_pairs(&self) -> usize {
        (self.len() - self.n_real()) / 2
    }
}

fn sector_rank(s: Option<Sector>) -> u8 {
    match s {
        None => 0,
        Some(Sector::Even) => 1,
        Some(Sector::Odd) => 2,
    }
}

pub fn is_real_within(z: Complex64, tol_reality: f64) -> bool {
    z.im.abs() <= tol_reality * (1.0 + z.norm())
}

/// Forces a conjugate-closed multiset: values classifying as real are snapped
/// onto the axis, the rest are paired with their best conjugate match and the
/// pair replaced by (u, conj u). Order is preserved.
pub fn conjugate_symmetrize(values: &mut [Complex64], tol_reality: f64) {
    let mut complex_idx: Vec<usize> = Vec::new();
    for (i, z) in values.iter_mut().enumerate() {
        if is_real_within(*z, tol_reality) {
            z.im = 0.0;
        } else {
            complex_idx.push(i);
        }
    }
    while complex_idx.len() >= 2 {
        let i = complex_idx[0];
        let mut best_slot = 1usize;
        let mut best_dist = f64::INFINITY;
        for (slot, &k) in complex_idx.iter().enumerate().skip(1) {
            let d = (values[k] - values[i].conj()).norm();
            if d < best_dist {
                best_dist = d;
                best_slot = slot;
            }
        }
        let k = complex_idx.remove(best_slot);
        complex_idx.remove(0);
        let u = (values[i] + values[k].conj()) * 0.5;
        values[i] = u;
        values[k] = u.conj();
    }
}

/// Full spectrum of a real square matrix (symmetrized).
pub fn spectrum_of_real_matrix(matrix: &DMatrix<f64>, tol_reality: f64) -> Result<Spectrum> {
    let raw = eigen::eigenvalues_real(matrix)?;
    Ok(Spectrum::from_values(raw, tol_reality, true))
}

/// Full spectrum of a complex square matrix (no symmetrization).
pub fn spectrum_of_complex_matrix(
    matrix: &DMatrix<Complex64>,
    tol_reality: f64,
) -> Result<Spectrum> {
    let raw = eigen::eigenvalues_complex(matrix)?;
    Ok(Spectrum::from_values(raw, tol_reality, false))
}

/// Spectrum of a QES problem. Odd N is solved block by block so every
/// eigenvalue carries its sector label; even N is solved on the full matrix.
pub fn problem_spectrum(problem: QesProblem, tol_reality: f64) -> Result<Spectrum> {
    let matrix = GaugedMatrix::new(problem);
    if problem.big_n() % 2 == 1 {
        let split = matrix.split_sectors()?;
        let mut labeled: Vec<(Complex64, Option<Sector>)> = Vec::with_capacity(matrix.dim());
        for block in [&split.even, &split.odd] {
            if block.dim() == 0 {
                continue;
            }
            let mut vals = eigen::eigenvalues_real(&block.matrix)?;
            conjugate_symmetrize(&mut vals, tol_reality);
            labeled.extend(vals.into_iter().map(|z| (z, Some(block.sector))));
        }
        Ok(Spectrum::from_labeled_values(labeled, tol_reality, false))
    } else {
        spectrum_of_real_matrix(matrix.entries(), tol_reality)
    }
}

/// Smallest pairwise distance within a set of complex values.
pub fn min_pairwise_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for k in (i + 1)..values.len() {
            gap = gap.min((values[i] - values[k]).norm());
        }
    }
    gap
}

/// Largest matched distance between two equally sized multisets under the
/// best pairing: exhaustive for up to 8 values, greedy closest-pair beyond.
pub fn optimal_max_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(QesError::InvalidInput(format!(
            "multiset sizes differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    if n <= 8 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, &mut |p: &[usize]| {
            let worst = (0..n)
                .map(|i| (a[i] - b[p[i]]).norm())
                .fold(0.0f64, f64::max);
            if worst < best {
                best = worst;
            }
        });
        return Ok(best);
    }
    let mut remaining_a: Vec<usize> = (0..n).collect();
    let mut remaining_b: Vec<usize> = (0..n).collect();
    let mut worst = 0.0f64;
    while !remaining_a.is_empty() {
        let mut best = (0usize, 0usize, f64::INFINITY);
        for (ia, &i) in remaining_a.iter().enumerate() {
            for (ib, &k) in remaining_b.iter().enumerate() {
                let d = (a[i] - b[k]).norm();
                if d < best.2 {
                    best = (ia, ib, d);
                }
            }
        }
        worst = worst.max(best.2);
        remaining_a.remove(best.0);
        remaining_b.remove(best.1);
    }
    Ok(worst)
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}
