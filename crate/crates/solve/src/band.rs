//! Banded LU factorization with partial pivoting, plus a dense fallback.
//!
//! Global stiffness matrices of fiber meshes are narrow-banded under
//! station-major dof ordering (one element couples at most 21 consecutive
//! dofs), but contact between distant elements widens the band arbitrarily.
//! The assembly therefore measures the actual half-bandwidth b of the free
//! system and picks the cheaper container: banded storage costs (3b+1)·n
//! and factors in O(n·b²), dense costs n² and O(n³).  Both paths eliminate
//! with row partial pivoting; row swaps during banded elimination stay
//! within the extra `b` fill rows the storage reserves on top of the band.
//!
//! Layout: column-major band storage with `2b + b + 1` rows per column.
//! A(i, j) lives at in-band row `2b + i − j` of column j, so rows
//! `0..b` of each column are the fill space pivoting can write into.

use nalgebra::{DMatrix, DVector};

/// Symmetric-pattern band matrix: half-bandwidth `b` both sides, with `b`
/// extra fill rows for pivoting.
pub struct BandMatrix {
    n: usize,
    b: usize,
    rows: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, b: usize) -> Self {
        assert!(n > 0, "empty system");
        let b = b.min(n - 1);
        let rows = 3 * b + 1;
        Self {
            n,
            b,
            rows,
            ab: vec![0.0; rows * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.b
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        // Storable range per column j: rows j−2b..=j+b (fill space above
        // the band absorbs pivoting fill, subdiagonals stop at b).
        debug_assert!(j <= i + 2 * self.b && i <= j + self.b, "outside band");
        // In-band row index 2b + i − j ∈ [b, 3b] for the stored band and
        // [0, b) for the fill space above it.
        j * self.rows + (2 * self.b + i - j)
    }

    /// Add into A(i, j); (i, j) must lie inside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[self.idx(i, j)]
    }

    /// Factor in place: banded LU with row partial pivoting.  Pivot rows
    /// are searched among the `b` subdiagonal rows of each column; the
    /// upper bandwidth grows to at most `2b`, which the fill rows hold.
    pub fn factor(mut self) -> Result<BandLu, SingularMatrix> {
        let (n, b) = (self.n, self.b);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            // Pivot search in column j, rows j..=j+b.
            let i_max = (j + b).min(n - 1);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for i in (j + 1)..=i_max {
                let v = self.get(i, j).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(SingularMatrix { column: j });
            }
            ipiv[j] = p;
            if p != j {
                // Swap rows j and p across the columns both touch.
                let c_max = (j + 2 * b).min(n - 1);
                for c in j..=c_max {
                    let kj = self.idx(j, c);
                    let kp = self.idx(p, c);
                    self.ab.swap(kj, kp);
                }
            }
            let piv = self.get(j, j);
            for i in (j + 1)..=i_max {
                let l = self.get(i, j) / piv;
                let k = self.idx(i, j);
                self.ab[k] = l;
                if l != 0.0 {
                    let c_max = (j + 2 * b).min(n - 1);
                    for c in (j + 1)..=c_max {
                        let v = l * self.get(j, c);
                        let k = self.idx(i, c);
                        self.ab[k] -= v;
                    }
                }
            }
        }
        Ok(BandLu { mat: self, ipiv })
    }
}

/// A factored band matrix (L with unit diagonal below, U on and above).
pub struct BandLu {
    mat: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let (n, b) = (self.mat.n, self.mat.b);
        assert_eq!(rhs.len(), n);
        let mut x = rhs.clone();
        // Forward: apply the recorded row swaps, then L⁻¹.
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap_rows(j, p);
            }
            let xj = x[j];
            if xj != 0.0 {
                let i_max = (j + b).min(n - 1);
                for i in (j + 1)..=i_max {
                    x[i] -= self.mat.get(i, j) * xj;
                }
            }
        }
        // Backward: U⁻¹ with upper bandwidth 2b.
        for j in (0..n).rev() {
            let c_max = (j + 2 * b).min(n - 1);
            let mut s = x[j];
            for c in (j + 1)..=c_max {
                s -= self.mat.get(j, c) * x[c];
            }
            x[j] = s / self.mat.get(j, j);
        }
        x
    }
}

#[derive(Debug, Clone, Copy, thiserror::Error)]
#[error("factorization met a zero pivot in column {column}")]
pub struct SingularMatrix {
    pub column: usize,
}

/// The assembled free-space system in whichever container its bandwidth
/// justified.  Banded wins while its storage (3b+1)·n undercuts n².
pub enum SystemMatrix {
    Banded(BandMatrix),
    Dense(DMatrix<f64>),
}

impl SystemMatrix {
    /// Choose a container for an n×n system with measured half-bandwidth b.
    pub fn zeros(n: usize, b: usize) -> Self {
        if 3 * b + 1 < n {
            Self::Banded(BandMatrix::zeros(n, b))
        } else {
            Self::Dense(DMatrix::zeros(n, n))
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        match self {
            Self::Banded(m) => m.add(i, j, v),
            Self::Dense(m) => m[(i, j)] += v,
        }
    }

    pub fn factor(self) -> Result<SystemFactor, SingularMatrix> {
        match self {
            Self::Banded(m) => Ok(SystemFactor::Banded(m.factor()?)),
            Self::Dense(m) => {
                let lu = m.lu();
                // nalgebra's LU defers the singularity verdict to solve();
                // an exactly zero pivot shows up there.
                Ok(SystemFactor::Dense(lu))
            }
        }
    }
}

pub enum SystemFactor {
    Banded(BandLu),
    Dense(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SystemFactor {
    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>, SingularMatrix> {
        match self {
            Self::Banded(f) => Ok(f.solve(rhs)),
            Self::Dense(f) => f.solve(rhs).ok_or(SingularMatrix { column: 0 }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_banded(rng: &mut ChaCha8Rng, n: usize, b: usize) -> (BandMatrix, DMatrix<f64>) {
        let mut band = BandMatrix::zeros(n, b);
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) <= b {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    // Diagonal boost keeps the systems comfortably regular
                    // without forbidding pivoting (off-diagonals still win
                    // sometimes at this scale).
                    let v = if i == j { v + 1.5 } else { v };
                    band.add(i, j, v);
                    dense[(i, j)] = v;
                }
            }
        }
        (band, dense)
    }

    #[test]
    fn banded_solution_matches_dense_lu_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, b) in &[(1usize, 0usize), (5, 1), (12, 3), (40, 7), (80, 21)] {
            for _ in 0..4 {
                let (band, dense) = random_banded(&mut rng, n, b);
                let rhs = DVector::from_fn(n, |i, _| ((i * 7 + 3) % 11) as f64 - 5.0);
                let x_band = band.factor().expect("regular").solve(&rhs);
                let x_dense = dense.clone().lu().solve(&rhs).expect("regular");
                let err = (&x_band - &x_dense).norm() / x_dense.norm().max(1.0);
                assert!(err < 1e-10, "n={n} b={b}: banded vs dense err {err:.3e}");
                // Residual check against the original matrix.
                let res = (&dense * &x_band - &rhs).norm() / rhs.norm();
                assert!(res < 1e-10, "n={n} b={b}: residual {res:.3e}");
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] needs a row swap; without pivoting it breaks.
        let mut m = BandMatrix::zeros(2, 1);
        m.add(0, 1, 1.0);
        m.add(1, 0, 1.0);
        let f = m.factor().expect("regular after pivoting");
        let x = f.solve(&DVector::from_vec(vec![2.0, 3.0]));
        assert!((x[0] - 3.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exactly_singular_matrix_is_reported() {
        let mut m = BandMatrix::zeros(3, 1);
        // Row 2 duplicates row 1 (both within the band): rank 2.
        m.add(0, 0, 1.0);
        m.add(0, 1, 2.0);
        m.add(1, 0, 0.0);
        m.add(1, 1, 1.0);
        m.add(1, 2, 1.0);
        m.add(2, 1, 1.0);
        m.add(2, 2, 1.0);
        assert!(m.factor().is_err());
    }

    #[test]
    fn container_choice_follows_bandwidth() {
        assert!(matches!(SystemMatrix::zeros(100, 5), SystemMatrix::Banded(_)));
        assert!(matches!(SystemMatrix::zeros(100, 40), SystemMatrix::Dense(_)));
        // Tiny systems are dense regardless.
        assert!(matches!(SystemMatrix::zeros(4, 1), SystemMatrix::Dense(_)));
    }

    #[test]
    fn wide_band_equals_dense_behavior() {
        // b = n−1 stores the whole matrix; results must still be exact.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (band, dense) = random_banded(&mut rng, 9, 8);
        let rhs = DVector::from_fn(9, |i, _| i as f64 - 4.0);
        let x = band.factor().unwrap().solve(&rhs);
        let res = (&dense * &x - &rhs).norm();
        assert!(res < 1e-12, "residual {res:.3e}");
    }
}
