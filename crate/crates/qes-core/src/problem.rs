//! The finite spectral problem behind the potential V(x) = -(i xi sin 2x + N)^2.
//!
//! Gauging the Schrodinger operator by mu(z) = z^{(1-N)/2} exp[xi (z - 1/z)/4],
//! z = exp(2ix), maps it to an N x N real tridiagonal matrix acting on the
//! monomials z^0 .. z^{N-1}. All entries are simple arithmetic expressions in
//! N and xi, so construction is exact in floating point.

use nalgebra::DMatrix;

use crate::error::{QesError, Result};

/// One spectral problem: depth index `N >= 1` and real coupling `xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QesProblem {
    big_n: u32,
    xi: f64,
}

impl QesProblem {
    pub fn new(big_n: u32, xi: f64) -> Result<Self> {
        if big_n == 0 {
            return Err(QesError::InvalidBigN);
        }
        if !xi.is_finite() {
            return Err(QesError::NonFiniteCoupling(xi));
        }
        Ok(Self { big_n, xi })
    }

    pub fn big_n(&self) -> u32 {
        self.big_n
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Spin label j = (N - 1) / 2 of the underlying finite representation.
    pub fn spin(&self) -> f64 {
        (self.big_n as f64 - 1.0) / 2.0
    }

    /// Same problem at coupling `-xi`; the spectrum is invariant under this.
    pub fn negated(&self) -> Self {
        Self {
            big_n: self.big_n,
            xi: -self.xi,
        }
    }
}

/// The gauged Hamiltonian on the monomial basis, tridiagonal by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugedMatrix {
    problem: QesProblem,
    entries: DMatrix<f64>,
}

impl GaugedMatrix {
    /// Builds the N x N matrix with diagonal `4(k-j)^2 - N^2 + xi^2`,
    /// subdiagonal `2 xi (k - 2j)` and superdiagonal `2 xi k` (column k).
    pub fn new(problem: QesProblem) -> Self {
        let n = problem.big_n() as usize;
        let xi = problem.xi();
        let j = problem.spin();
        let nsq = (problem.big_n() as f64) * (problem.big_n() as f64);
        let mut entries = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            entries[(k, k)] = 4.0 * (kf - j) * (kf - j) - nsq + xi * xi;
            if k + 1 < n {
                entries[(k + 1, k)] = 2.0 * xi * (kf - 2.0 * j);
            }
            if k > 0 {
                entries[(k - 1, k)] = 2.0 * xi * kf;
            }
        }
        Self { problem, entries }
    }

    pub fn problem(&self) -> &QesProblem {
        &self.problem
    }

    pub fn dim(&self) -> usize {
        self.problem.big_n() as usize
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.entries[(k, k)]).sum()
    }

    /// Closed form of the trace, Sum_k [4(k-j)^2 - N^2 + xi^2].
    pub fn trace_closed_form(&self) -> f64 {
        let j = self.problem.spin();
        let nsq = (self.problem.big_n() as f64).powi(2);
        let xi2 = self.problem.xi() * self.problem.xi();
        (0..self.dim())
            .map(|k| 4.0 * (k as f64 - j) * (k as f64 - j) - nsq + xi2)
            .sum()
    }

    /// Splits into the two invariant sectors of the signed reversal; odd N only.
    pub fn split_sectors(&self) -> Result<SectorSplit> {
        split_sectors(self)
    }
}

/// Convenience wrapper matching the operation-level entry point.
pub fn build_gauged_matrix(problem: QesProblem) -> GaugedMatrix {
    GaugedMatrix::new(problem)
}

/// The signed reversal S: e_k -> (-1)^k e_{2j-k} as an N x N matrix.
///
/// S commutes with the gauged matrix entrywise-exactly for every N. For odd N
/// it is an involution (S^2 = I) and splits the problem; for even N, S^2 = -I
/// and no real split exists.
pub fn involution_matrix(big_n: u32) -> DMatrix<f64> {
    let n = big_n as usize;
    let mut s = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s[(n - 1 - k, k)] = sign;
    }
    s
}

/// Sector label for the split of an odd-N problem.
///
/// `Even` is the sector containing the middle monomial z^j; it always has
/// dimension (N+1)/2 and carries the lowest exceptional point of the family.
/// `Odd` is the complementary sector of dimension (N-1)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    pub fn label(&self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
        }
    }
}

/// A basis vector of a sector block, as sparse (monomial index, weight) pairs.
pub type BasisVector = Vec<(usize, f64)>;

/// One invariant block of the gauged matrix plus its symmetrized basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBlock {
    pub sector: Sector,
    pub matrix: DMatrix<f64>,
    pub basis: Vec<BasisVector>,
}

impl SectorBlock {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Both invariant blocks of an odd-N gauged matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSplit {
    pub even: SectorBlock,
    pub odd: SectorBlock,
    problem: QesProblem,
}

impl SectorSplit {
    pub fn problem(&self) -> &QesProblem {
        &self.problem
    }

    pub fn block(&self, sector: Sector) -> &SectorBlock {
        match sector {
            Sector::Even => &self.even,
            Sector::Odd => &self.odd,
        }
    }
}

/// Folds the matrix onto the +/-1 eigenspaces of the signed reversal.
///
/// Basis: v_i = (e_i + s (-1)^i e_{2j-i}) / sqrt(2) for i < j with the block
/// sign s, plus the middle monomial e_j in the sector with s = (-1)^j. The
/// fold of the tridiagonal matrix is again tridiagonal with the same interior
/// couplings; only the couplings onto e_j pick up a sqrt(2):
///   <e_j|H|v_{j-1}> = -2 sqrt(2) xi (j+1),   <v_{j-1}|H|e_j> = 2 sqrt(2) xi j.
pub fn split_sectors(matrix: &GaugedMatrix) -> Result<SectorSplit> {
    let big_n = matrix.problem().big_n();
    if big_n.is_multiple_of(2) {
        return Err(QesError::EvenNNoSplit(big_n));
    }
    let j = ((big_n - 1) / 2) as usize;
    let xi = matrix.problem().xi();
    let h = matrix.entries();
    let sqrt2 = std::f64::consts::SQRT_2;
    let middle_sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };

    let build = |sign: f64, with_middle: bool| -> SectorBlock {
        let dim = j + usize::from(with_middle);
        let mut block = DMatrix::<f64>::zeros(dim, dim);
        let mut basis: Vec<BasisVector> = Vec::with_capacity(dim);
        for i in 0..j {
            let parity = if i % 2 == 0 { 1.0 } else { -1.0 };
            basis.push(vec![
                (i, 1.0 / sqrt2),
                (2 * j - i, sign * parity / sqrt2),
            ]);
            block[(i, i)] = h[(i, i)];
            if i + 1 < j {
                block[(i + 1, i)] = h[(i + 1, i)];
                block[(i, i + 1)] = h[(i, i + 1)];
            }
        }
        if with_middle {
            basis.push(vec![(j, 1.0)]);
            block[(j, j)] = h[(j, j)];
            if j > 0 {
                block[(j, j - 1)] = -2.0 * sqrt2 * xi * (j as f64 + 1.0);
                block[(j - 1, j)] = 2.0 * sqrt2 * xi * j as f64;
            }
        }
        let sector = if with_middle { Sector::Even } else { Sector::Odd };
        SectorBlock {
            sector,
            matrix: block,
            basis,
        }
    };

    Ok(SectorSplit {
        even: build(middle_sign, true),
        odd: build(-middle_sign, false),
        problem: *matrix.problem(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(big_n: u32, xi: f64) -> GaugedMatrix {
        GaugedMatrix::new(QesProblem::new(big_n, xi).unwrap())
    }

    #[test]
    fn rejects_invalid_problems() {
        assert_eq!(QesProblem::new(0, 1.0), Err(QesError::InvalidBigN));
        assert!(matches!(
            QesProblem::new(3, f64::NAN),
            Err(QesError::NonFiniteCoupling(_))
        ));
        assert!(matches!(
            QesProblem::new(3, f64::INFINITY),
            Err(QesError::NonFiniteCoupling(_))
        ));
    }

    #[test]
    fn n1_matrix_is_xi_squared_minus_one() {
        let m = mat(1, 0.3);
        assert_eq!(m.dim(), 1);
        assert_eq!(m.entries()[(0, 0)], -1.0 + 0.09);
    }

    #[test]
    fn n3_zero_coupling_is_diagonal() {
        let m = mat(3, 0.0);
        let e = m.entries();
        assert_eq!(e[(0, 0)], -5.0);
        assert_eq!(e[(1, 1)], -9.0);
        assert_eq!(e[(2, 2)], -5.0);
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    assert_eq!(e[(r, c)], 0.0);
                }
            }
        }
    }

    #[test]
    fn n2_unit_coupling_matches_hand_expansion() {
        let m = mat(2, 1.0);
        let e = m.entries();
        assert_eq!(e[(0, 0)], -2.0);
        assert_eq!(e[(1, 1)], -2.0);
        assert_eq!(e[(1, 0)], -2.0);
        assert_eq!(e[(0, 1)], 2.0);
    }

    #[test]
    fn tridiagonal_for_a_range_of_problems() {
        for big_n in [1u32, 2, 5, 17, 50] {
            for xi in [-10.0, -0.37, 0.0, 2.25, 10.0] {
                let m = mat(big_n, xi);
                let e = m.entries();
                for r in 0..m.dim() {
                    for c in 0..m.dim() {
                        if r.abs_diff(c) > 1 {
                            assert_eq!(e[(r, c)], 0.0, "N={big_n} xi={xi} ({r},{c})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trace_matches_closed_form_exactly() {
        for big_n in [1u32, 4, 9, 23] {
            for xi in [-3.0, 0.1, 1.75] {
                let m = mat(big_n, xi);
                assert_eq!(m.trace(), m.trace_closed_form());
            }
        }
    }

    #[test]
    fn involution_commutes_exactly_for_odd_and_even_n() {
        for big_n in [1u32, 2, 3, 4, 7, 12, 25] {
            for xi in [-2.3, 0.0, 0.41, 5.0] {
                let m = mat(big_n, xi);
                let s = involution_matrix(big_n);
                let lhs = &s * m.entries();
                let rhs = m.entries() * &s;
                let max = (lhs - rhs).abs().max();
                assert_eq!(max, 0.0, "N={big_n} xi={xi}");
            }
        }
    }

    #[test]
    fn involution_squares_to_identity_only_for_odd_n() {
        for big_n in [1u32, 3, 9] {
            let s = involution_matrix(big_n);
            let id = DMatrix::<f64>::identity(big_n as usize, big_n as usize);
            assert_eq!(&s * &s, id);
        }
        for big_n in [2u32, 4, 10] {
            let s = involution_matrix(big_n);
            let id = DMatrix::<f64>::identity(big_n as usize, big_n as usize);
            assert_eq!(&s * &s, -id);
        }
    }

    #[test]
    fn split_rejects_even_n() {
        assert!(matches!(
            mat(4, 0.5).split_sectors(),
            Err(QesError::EvenNNoSplit(4))
        ));
    }

    #[test]
    fn split_dims_are_ceil_and_floor_of_half_n() {
        for big_n in [1u32, 3, 5, 7, 9, 11, 15] {
            let split = mat(big_n, 0.7).split_sectors().unwrap();
            let n = big_n as usize;
            assert_eq!(split.even.dim(), n / 2 + 1);
            assert_eq!(split.odd.dim(), n / 2);
        }
    }

    #[test]
    fn n1_split_is_a_single_block() {
        let split = mat(1, 2.0).split_sectors().unwrap();
        assert_eq!(split.even.dim(), 1);
        assert_eq!(split.odd.dim(), 0);
        assert_eq!(split.even.matrix[(0, 0)], -1.0 + 4.0);
    }

    #[test]
    fn n3_single_eigenvalue_block_is_odd_sector() {
        // The dim-1 block carries E = -5 + xi^2.
        let split = mat(3, 0.2).split_sectors().unwrap();
        assert_eq!(split.odd.dim(), 1);
        assert!((split.odd.matrix[(0, 0)] - (-4.96)).abs() < 1e-14);
    }

    #[test]
    fn block_basis_vectors_hold_the_symmetry() {
        // Applying the signed reversal to each basis vector must reproduce it
        // up to the block sign.
        for big_n in [3u32, 5, 7, 9] {
            let split = mat(big_n, 1.3).split_sectors().unwrap();
            let s = involution_matrix(big_n);
            let n = big_n as usize;
            let j = (n - 1) / 2;
            let middle_sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
            for (block, sign) in [(&split.even, middle_sign), (&split.odd, -middle_sign)] {
                for basis_vec in &block.basis {
                    let mut v = DMatrix::<f64>::zeros(n, 1);
                    for &(idx, w) in basis_vec {
                        v[(idx, 0)] = w;
                    }
                    let sv = &s * &v;
                    let diff = (&sv - &v * sign).abs().max();
                    assert!(diff < 1e-15, "N={big_n} sector={:?}", block.sector);
                }
            }
        }
    }
}
