//! Small dense complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian matrices.
//!
//! Everything in this crate lives in 2, 3 or 4 dimensions, so matrices are
//! fixed-size arrays and all operations are plain loops.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix of fixed dimension `N`, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat<const N: usize>(pub [[Complex64; N]; N]);

pub type Mat2 = CMat<2>;
pub type Mat4 = CMat<4>;

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(d: [f64; N]) -> Self {
        Self::from_fn(|i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Frobenius norm squared, `Tr(A†A)`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Largest modulus among off-diagonal entries.
    pub fn off_diagonal_max(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    worst = worst.max(self.0[i][j].norm());
                }
            }
        }
        worst
    }

    pub fn column(&self, j: usize) -> [Complex64; N] {
        std::array::from_fn(|i| self.0[i][j])
    }

    /// Schatten 1-norm of a Hermitian matrix: the sum of absolute eigenvalues.
    pub fn trace_norm_hermitian(&self) -> f64 {
        hermitian_eigen(self).values.iter().map(|v| v.abs()).sum()
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl<const N: usize> Mul<f64> for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * rhs)
    }
}

/// Kronecker product of two single-qubit operators; the first factor acts on
/// the most significant bit of the basis index.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a.0[i / 2][j / 2] * b.0[i % 2][j % 2])
}

pub fn pauli_x() -> Mat2 {
    CMat([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> Mat2 {
    CMat([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> Mat2 {
    CMat([[ONE, ZERO], [ZERO, -ONE]])
}

/// The three Pauli matrices in x, y, z order.
pub fn paulis() -> [Mat2; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// Eigen-decomposition of a Hermitian matrix. `vectors` holds the
/// eigenvectors as columns, in the same order as `values` (ascending).
#[derive(Debug, Clone)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: CMat<N>,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then applies the classical real Jacobi rotation. Only the
/// Hermitian part of `m` is used.
pub fn hermitian_eigen<const N: usize>(m: &CMat<N>) -> HermitianEigen<N> {
    let mut a = CMat::<N>::from_fn(|i, j| 0.5 * (m.0[i][j] + m.0[j][i].conj()));
    let mut v = CMat::<N>::identity();
    let scale = a.max_abs();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..N)
                .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a.0[i][j].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    HermitianEigen {
        values: std::array::from_fn(|k| a.0[order[k]][order[k]].re),
        vectors: CMat::from_fn(|i, k| v.0[i][order[k]]),
    }
}

fn rotate<const N: usize>(a: &mut CMat<N>, v: &mut CMat<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }

    // Diagonal phase: column q times e^{-i phi}, row q times e^{+i phi}.
    let phase = apq / r;
    let conj_phase = phase.conj();
    for k in 0..N {
        a.0[k][q] *= conj_phase;
    }
    for k in 0..N {
        a.0[q][k] *= phase;
    }
    for k in 0..N {
        v.0[k][q] *= conj_phase;
    }

    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * c - akq * s;
        a.0[k][q] = akp * s + akq * c;
    }
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = apk * c - aqk * s;
        a.0[q][k] = apk * s + aqk * c;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    for k in 0..N {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * c - vkq * s;
        v.0[k][q] = vkp * s + vkq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(entries: &[f64]) -> Mat4 {
        let mut m = Mat4::zeros();
        let mut it = entries.iter().copied();
        for i in 0..4 {
            m.0[i][i] = Complex64::new(it.next().unwrap(), 0.0);
            for j in (i + 1)..4 {
                let z = Complex64::new(it.next().unwrap(), it.next().unwrap());
                m.0[i][j] = z;
                m.0[j][i] = z.conj();
            }
        }
        m
    }

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = paulis();
        let ixy = (x * y).scale(-I);
        assert!((ixy - z).max_abs() < 1e-15);
        assert!((x * x - Mat2::identity()).max_abs() < 1e-15);
    }

    #[test]
    fn kron_orders_first_factor_as_high_bit() {
        let k = kron(&pauli_z(), &Mat2::identity());
        let diag: Vec<f64> = (0..4).map(|i| k.0[i][i].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let e = hermitian_eigen(&Mat4::diagonal([3.0, -1.0, 2.0, 0.5]));
        assert_eq!(e.values, [-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = CMat([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
            [Complex64::new(0.0, -2.0), Complex64::new(-1.0, 0.0)],
        ]);
        let e = hermitian_eigen(&m);
        let r = 5f64.sqrt();
        assert!((e.values[0] + r).abs() < 1e-14);
        assert!((e.values[1] - r).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let e = hermitian_eigen(&Mat4::zeros());
        assert_eq!(e.values, [0.0; 4]);
        assert!((e.vectors - Mat4::identity()).max_abs() == 0.0);
    }

    proptest! {
        #[test]
        fn jacobi_diagonalizes(entries in proptest::collection::vec(-5.0f64..5.0, 16)) {
            let m = random_hermitian(&entries);
            let e = hermitian_eigen(&m);
            let v = e.vectors;
            let unit = v.adjoint() * v;
            prop_assert!((unit - Mat4::identity()).max_abs() < 1e-12);
            let d = v.adjoint() * m * v;
            prop_assert!(d.off_diagonal_max() < 1e-12);
            for k in 0..4 {
                prop_assert!((d.0[k][k].re - e.values[k]).abs() < 1e-12);
            }
            let tr: f64 = e.values.iter().sum();
            prop_assert!((tr - m.trace().re).abs() < 1e-12);
        }
    }
}
