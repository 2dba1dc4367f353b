//! Dense complex linear algebra for five-dimensional belief states.
//!
//! Everything in the model lives in a fixed five-dimensional real-symmetric
//! world, so this module provides exactly that: a Jacobi eigensolver for
//! 5x5 symmetric matrices, unitary propagators `exp(-iHt)` built from the
//! eigensystem, and an independent scaled-and-squared power-series
//! propagator used to cross-check the spectral route.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Fixed dimension of the state space.
pub const DIM: usize = 5;

/// Off-diagonal Frobenius norm below which the Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-14;

/// Truncation threshold for the power-series propagator: terms are added
/// until the max-norm of the next term falls below this.
const SERIES_TERM_TOL: f64 = 1e-16;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix entry ({row},{col}) is not finite")]
    NonFiniteMatrix { row: usize, col: usize },
    #[error("time argument is not finite")]
    NonFiniteTime,
}

/// Five complex amplitudes. When used as a belief state the squared
/// magnitudes sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector5(pub [C64; DIM]);

impl Vector5 {
    pub fn zeros() -> Self {
        Vector5([C64::ZERO; DIM])
    }

    /// Builds a vector with real entries and zero imaginary parts.
    pub fn from_real(re: [f64; DIM]) -> Self {
        Vector5(re.map(|x| C64::new(x, 0.0)))
    }

    /// Sum of squared magnitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest entry-wise magnitude of the difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Vector5(self.0.map(|c| c * factor))
    }
}

impl std::ops::Index<usize> for Vector5 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

/// Real symmetric 5x5 matrix. The mutators write both mirror entries from
/// the same value, so stored matrices are symmetric exactly, not merely
/// within rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix5 {
    entries: [[f64; DIM]; DIM],
}

impl SymMatrix5 {
    pub fn zeros() -> Self {
        SymMatrix5 {
            entries: [[0.0; DIM]; DIM],
        }
    }

    pub fn from_diagonal(diag: [f64; DIM]) -> Self {
        let mut m = Self::zeros();
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i][i] = d;
        }
        m
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[f64; DIM]; DIM] {
        &self.entries
    }

    pub fn set_diagonal_entry(&mut self, i: usize, value: f64) {
        self.entries[i][i] = value;
    }

    /// Sets `(i, j)` and `(j, i)` to the same value.
    pub fn set_symmetric_pair(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "use set_diagonal_entry for diagonal writes");
        self.entries[i][j] = value;
        self.entries[j][i] = value;
    }

    /// Element-wise sum; symmetry is preserved exactly.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                out.entries[i][j] = self.entries[i][j] + other.entries[i][j];
            }
        }
        out
    }

    /// Matrix-vector product with a complex vector.
    pub fn apply(&self, v: &Vector5) -> Vector5 {
        let mut out = Vector5::zeros();
        for i in 0..DIM {
            let mut acc = C64::ZERO;
            for j in 0..DIM {
                acc += self.entries[i][j] * v.0[j];
            }
            out.0[i] = acc;
        }
        out
    }

    /// Raw matrix product. The result of multiplying two symmetric
    /// matrices is generally not symmetric, so this returns plain entries.
    pub fn product_entries(&self, other: &Self) -> [[f64; DIM]; DIM] {
        let mut out = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    out[i][j] += self.entries[i][k] * other.entries[k][j];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in 0..DIM {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    fn check_finite(&self) -> Result<(), LinalgError> {
        for (i, row) in self.entries.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(LinalgError::NonFiniteMatrix { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

/// Complex unitary 5x5 matrix (propagator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary5(pub [[C64; DIM]; DIM]);

impl Unitary5 {
    pub fn identity() -> Self {
        let mut m = [[C64::ZERO; DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = C64::ONE;
        }
        Unitary5(m)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &Vector5) -> Vector5 {
        let mut out = Vector5::zeros();
        for i in 0..DIM {
            let mut acc = C64::ZERO;
            for j in 0..DIM {
                acc += self.0[i][j] * v.0[j];
            }
            out.0[i] = acc;
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = [[C64::ZERO; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = C64::ZERO;
                for k in 0..DIM {
                    acc += self.0[i][k] * other.0[k][j];
                }
                out[i][j] = acc;
            }
        }
        Unitary5(out)
    }

    /// Max-norm of `U^dagger U - I`; zero for an exact unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = C64::ZERO;
                for k in 0..DIM {
                    acc += self.0[k][i].conj() * self.0[k][j];
                }
                let expected = if i == j { C64::ONE } else { C64::ZERO };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in 0..DIM {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }
}

/// Eigensystem of a symmetric matrix: `H = V diag(values) V^T` with
/// orthonormal columns in `vectors` and eigenvalues sorted ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen {
    pub values: [f64; DIM],
    /// Column `k` of this matrix is the eigenvector for `values[k]`.
    pub vectors: [[f64; DIM]; DIM],
}

impl Eigen {
    /// Propagator `exp(-iHt) = V diag(exp(-i lambda t)) V^T` for the
    /// decomposed Hamiltonian.
    pub fn propagator(&self, t: f64) -> Unitary5 {
        let phases: [C64; DIM] = self.values.map(|lambda| (-C64::i() * lambda * t).exp());
        let mut u = [[C64::ZERO; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = C64::ZERO;
                for k in 0..DIM {
                    acc += self.vectors[i][k] * phases[k] * self.vectors[j][k];
                }
                u[i][j] = acc;
            }
        }
        Unitary5(u)
    }

    /// Rebuilds `V diag(values) V^T`, for residual checks.
    pub fn reconstruct(&self) -> SymMatrix5 {
        let mut m = SymMatrix5::zeros();
        for i in 0..DIM {
            for j in i..DIM {
                let mut acc = 0.0;
                for k in 0..DIM {
                    acc += self.vectors[i][k] * self.values[k] * self.vectors[j][k];
                }
                if i == j {
                    m.set_diagonal_entry(i, acc);
                } else {
                    m.set_symmetric_pair(i, j, acc);
                }
            }
        }
        m
    }
}

fn off_diagonal_frobenius(a: &[[f64; DIM]; DIM]) -> f64 {
    let mut acc = 0.0;
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            acc += 2.0 * a[i][j] * a[i][j];
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// Sweeps rotate away each off-diagonal pair in turn until the
/// off-diagonal Frobenius norm drops below [`JACOBI_TOL`]. Eigenvalues
/// come back sorted ascending with matching eigenvector columns.
pub fn eigendecompose(h: &SymMatrix5) -> Result<Eigen, LinalgError> {
    h.check_finite()?;
    let mut a = *h.entries();
    let mut v = [[0.0; DIM]; DIM];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    // Cyclic Jacobi converges quadratically; 64 sweeps is far beyond what
    // a 5x5 double-precision matrix ever needs.
    let mut converged = false;
    for _ in 0..64 {
        if off_diagonal_frobenius(&a) < JACOBI_TOL {
            converged = true;
            break;
        }
        for p in 0..DIM - 1 {
            for q in (p + 1)..DIM {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                // Smaller-magnitude root of t^2 + 2 t theta - 1 = 0.
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for k in 0..DIM {
                    if k != p && k != q {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[p][k] = a[k][p];
                        a[k][q] = s * akp + c * akq;
                        a[q][k] = a[k][q];
                    }
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    assert!(
        converged || off_diagonal_frobenius(&a) < JACOBI_TOL,
        "Jacobi sweep failed to converge on a finite symmetric matrix"
    );

    let mut order = [0usize, 1, 2, 3, 4];
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let mut values = [0.0; DIM];
    let mut vectors = [[0.0; DIM]; DIM];
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a[src][src];
        for i in 0..DIM {
            vectors[i][dst] = v[i][src];
        }
    }
    Ok(Eigen { values, vectors })
}

/// Unitary propagator `exp(-iHt)` via the eigensystem of `H`.
pub fn propagator(h: &SymMatrix5, t: f64) -> Result<Unitary5, LinalgError> {
    if !t.is_finite() {
        return Err(LinalgError::NonFiniteTime);
    }
    Ok(eigendecompose(h)?.propagator(t))
}

fn cmat_scaled_add(acc: &mut [[C64; DIM]; DIM], term: &[[C64; DIM]; DIM]) {
    for i in 0..DIM {
        for j in 0..DIM {
            acc[i][j] += term[i][j];
        }
    }
}

fn cmat_mul(a: &[[C64; DIM]; DIM], b: &[[C64; DIM]; DIM]) -> [[C64; DIM]; DIM] {
    let mut out = [[C64::ZERO; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            let mut acc = C64::ZERO;
            for k in 0..DIM {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn cmat_max_norm(a: &[[C64; DIM]; DIM]) -> f64 {
    a.iter()
        .flatten()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Independent propagator oracle: scaled-and-squared truncated power
/// series of `exp(-iHt)`.
///
/// `H t` is halved until its Frobenius norm is at most 0.5, the series is
/// summed until the next term's max-norm drops below 1e-16, and the result
/// is squared back up. This path shares no code with [`propagator`] beyond
/// the input type, so agreement between the two is a real cross-check.
pub fn taylor_propagator(h: &SymMatrix5, t: f64) -> Result<Unitary5, LinalgError> {
    h.check_finite()?;
    if !t.is_finite() {
        return Err(LinalgError::NonFiniteTime);
    }

    let scale_norm = h.frobenius_norm() * t.abs();
    let squarings = if scale_norm > 0.5 {
        (scale_norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let dt = t / 2f64.powi(squarings);

    // B = -i H dt
    let mut b = [[C64::ZERO; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            b[i][j] = -C64::i() * h.entry(i, j) * dt;
        }
    }

    let mut acc = Unitary5::identity().0;
    let mut term = Unitary5::identity().0;
    for k in 1..200 {
        term = cmat_mul(&term, &b);
        let inv_k = 1.0 / k as f64;
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x *= inv_k;
            }
        }
        cmat_scaled_add(&mut acc, &term);
        if cmat_max_norm(&term) < SERIES_TERM_TOL {
            break;
        }
    }
    for _ in 0..squarings {
        acc = cmat_mul(&acc, &acc);
    }
    Ok(Unitary5(acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-10;

    fn diag(d: [f64; DIM]) -> SymMatrix5 {
        SymMatrix5::from_diagonal(d)
    }

    #[test]
    fn eigendecompose_diagonal_matrix() {
        let eig = eigendecompose(&diag([1.0, -1.0, -1.0, 1.0, -1.0])).unwrap();
        assert_eq!(eig.values, [-1.0, -1.0, -1.0, 1.0, 1.0]);
        // Columns must be signed unit vectors (a signed permutation of the
        // identity columns).
        for k in 0..DIM {
            let col: Vec<f64> = (0..DIM).map(|i| eig.vectors[i][k]).collect();
            let ones = col.iter().filter(|x| x.abs() > 0.5).count();
            assert_eq!(ones, 1, "column {k} is not a signed unit vector: {col:?}");
            let norm: f64 = col.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn eigendecompose_zero_matrix() {
        let eig = eigendecompose(&SymMatrix5::zeros()).unwrap();
        assert_eq!(eig.values, [0.0; DIM]);
        assert!(eig.reconstruct().max_abs_diff(&SymMatrix5::zeros()) < TOL);
    }

    #[test]
    fn eigendecompose_rejects_non_finite() {
        let mut m = SymMatrix5::zeros();
        m.set_symmetric_pair(0, 3, f64::NAN);
        assert_eq!(
            eigendecompose(&m),
            Err(LinalgError::NonFiniteMatrix { row: 0, col: 3 })
        );
    }

    #[test]
    fn eigenvalues_sorted_ascending() {
        let mut m = diag([3.0, -2.0, 0.5, 1.0, -0.25]);
        m.set_symmetric_pair(0, 1, 0.7);
        m.set_symmetric_pair(2, 4, -0.3);
        let eig = eigendecompose(&m).unwrap();
        for k in 1..DIM {
            assert!(eig.values[k - 1] <= eig.values[k]);
        }
    }

    #[test]
    fn propagator_of_zero_is_identity() {
        let u = propagator(&SymMatrix5::zeros(), 1.37).unwrap();
        assert!(u.max_abs_diff(&Unitary5::identity()) < TOL);
    }

    #[test]
    fn propagator_of_diagonal_preserves_magnitudes() {
        let u = propagator(&diag([0.3, -0.9, 1.1, 0.0, 2.0]), 0.81).unwrap();
        let v = Vector5::from_real([0.1, 0.2, 0.3, 0.4, 0.5]);
        let w = u.apply(&v);
        for i in 0..DIM {
            assert!((w.0[i].norm() - v.0[i].norm()).abs() < TOL);
        }
    }

    #[test]
    fn taylor_of_zero_is_identity() {
        let u = taylor_propagator(&SymMatrix5::zeros(), 2.0).unwrap();
        assert!(u.max_abs_diff(&Unitary5::identity()) < TOL);
    }

    #[test]
    fn taylor_half_period_diagonal_flips_sign() {
        // exp(-i (+-1) pi) = -1 for every component.
        let u = taylor_propagator(&diag([1.0, -1.0, -1.0, 1.0, -1.0]), std::f64::consts::PI)
            .unwrap();
        let minus_identity = {
            let mut m = [[C64::ZERO; DIM]; DIM];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = -C64::ONE;
            }
            Unitary5(m)
        };
        assert!(u.max_abs_diff(&minus_identity) < 1e-12);
    }

    #[test]
    fn apply_identity_is_noop() {
        let v = Vector5::from_real([0.4, 0.1, -0.2, 0.7, 0.3]);
        assert!(Unitary5::identity().apply(&v).max_abs_diff(&v) < 1e-15);
    }

    #[test]
    fn time_must_be_finite() {
        assert_eq!(
            propagator(&SymMatrix5::zeros(), f64::INFINITY),
            Err(LinalgError::NonFiniteTime)
        );
        assert_eq!(
            taylor_propagator(&SymMatrix5::zeros(), f64::NAN),
            Err(LinalgError::NonFiniteTime)
        );
    }
}
