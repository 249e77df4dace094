//! Spectral data of one diamond block: two Heisenberg spins coupled by an
//! anisotropic XXZ exchange with a z-axis Dzyaloshinskii-Moriya term, held
//! between two classical Ising spins.
//!
//! Conventions: spin operators are `S = σ/2` with ħ = 1 and k_B = 1. The
//! two-qubit basis is `{|00>, |01>, |10>, |11>}` where `|0>` is spin up
//! (σ_z = +1) and the first label belongs to spin `a`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, paulis, Mat2, Mat4, ONE, ZERO};

/// Couplings of the Ising-XXZ diamond chain plus the temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Heisenberg XY exchange `J` between the two dimer spins.
    pub j: f64,
    /// Ising-Heisenberg coupling `J1`.
    pub j1: f64,
    /// z-axis anisotropy, multiplies `J` on the `S_z S_z` term.
    pub delta: f64,
    /// Magnitude of the DM vector, which points along z.
    pub d: f64,
    /// External magnetic field along z.
    pub h: f64,
    /// Absolute temperature.
    pub t: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            j: 1.0,
            j1: 1.0,
            delta: 1.0,
            d: 0.0,
            h: 1.0,
            t: 0.2,
        }
    }
}

impl ModelParams {
    pub fn new(j: f64, j1: f64, delta: f64, d: f64, h: f64, t: f64) -> Self {
        Self {
            j,
            j1,
            delta,
            d,
            h,
            t,
        }
    }

    pub fn with_t(self, t: f64) -> Self {
        Self { t, ..self }
    }

    /// Checks that every coupling is finite. Temperature is checked by
    /// [`ModelParams::validate_thermal`].
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("J", self.j),
            ("J1", self.j1),
            ("delta", self.delta),
            ("D", self.d),
            ("h", self.h),
            ("T", self.t),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: "finite",
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn validate_thermal(&self) -> Result<()> {
        self.validate()?;
        if self.t <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "T",
                requirement: "> 0",
                value: self.t,
            });
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.t
    }
}

/// A classical nodal spin, `±1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsingSpin {
    Up,
    Down,
}

impl IsingSpin {
    pub fn value(self) -> f64 {
        match self {
            IsingSpin::Up => 0.5,
            IsingSpin::Down => -0.5,
        }
    }

    pub fn from_bit(up: bool) -> Self {
        if up {
            IsingSpin::Up
        } else {
            IsingSpin::Down
        }
    }
}

/// The two Ising neighbours `(μ_i, μ_{i+1})` of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IsingPair {
    pub mu_i: IsingSpin,
    pub mu_ip1: IsingSpin,
}

impl IsingPair {
    pub const UP_UP: IsingPair = IsingPair::new(IsingSpin::Up, IsingSpin::Up);
    pub const UP_DOWN: IsingPair = IsingPair::new(IsingSpin::Up, IsingSpin::Down);
    pub const DOWN_UP: IsingPair = IsingPair::new(IsingSpin::Down, IsingSpin::Up);
    pub const DOWN_DOWN: IsingPair = IsingPair::new(IsingSpin::Down, IsingSpin::Down);
    pub const ALL: [IsingPair; 4] = [Self::UP_UP, Self::UP_DOWN, Self::DOWN_UP, Self::DOWN_DOWN];

    pub const fn new(mu_i: IsingSpin, mu_ip1: IsingSpin) -> Self {
        Self { mu_i, mu_ip1 }
    }

    /// `μ_i + μ_{i+1}`, one of -1, 0, 1.
    pub fn sum(&self) -> f64 {
        self.mu_i.value() + self.mu_ip1.value()
    }
}

/// Eigen-data of one block Hamiltonian at fixed Ising neighbours.
///
/// Index `k` of `lambdas` and `vectors` follows the fixed labelling
/// `|00>`, singlet-like, triplet-like, `|11>`; it is not sorted by energy.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub lambdas: [f64; 4],
    /// `sqrt(D² + J²)`.
    pub eta: f64,
    /// Unimodular phase `iη/(D + iJ) = (J + iD)/η` of the mixed eigenvectors.
    pub a: Complex64,
    /// Set when `J = D = 0`; `a` is then fixed to 1 since λ₂ = λ₃.
    pub a_regularized: bool,
    /// Eigenvectors in the computational basis, one per entry of `lambdas`.
    pub vectors: [[Complex64; 4]; 4],
}

/// Phase `a` of the mixed eigenvectors together with `η`.
pub fn dm_phase(j: f64, d: f64) -> (f64, Complex64, bool) {
    let eta = j.hypot(d);
    if eta == 0.0 {
        (0.0, ONE, true)
    } else {
        (eta, Complex64::new(j / eta, d / eta), false)
    }
}

/// Matrix of the block Hamiltonian in the computational basis, built from
/// spin operators rather than from the closed-form spectrum.
pub fn block_hamiltonian(params: &ModelParams, pair: IsingPair) -> Mat4 {
    let [sx, sy, sz] = paulis().map(|p| p * 0.5);
    let id = Mat2::identity();
    let s = pair.sum();

    let xx = kron(&sx, &sx);
    let yy = kron(&sy, &sy);
    let zz = kron(&sz, &sz);
    let exchange = (xx + yy + zz * params.delta) * params.j;

    let sz_total = kron(&sz, &id) + kron(&id, &sz);
    let zeeman = sz_total * (params.j1 * s - params.h);

    // D·(S^a × S^b) with D along z.
    let dm = (kron(&sx, &sy) - kron(&sy, &sx)) * params.d;

    let shift = Mat4::identity() * (-0.5 * params.h * s);
    exchange + zeeman + dm + shift
}

/// Closed-form eigenvalues and eigenvectors of the block Hamiltonian.
pub fn block_spectrum(params: &ModelParams, pair: IsingPair) -> BlockSpectrum {
    let ModelParams {
        j, j1, delta, d, h, ..
    } = *params;
    let s = pair.sum();
    let (eta, a, a_regularized) = dm_phase(j, d);
    let quarter = 0.25 * j * delta;

    let lambdas = [
        quarter - (0.5 * h - j1) * s - h,
        -0.5 * eta - 0.5 * h * s - quarter,
        0.5 * eta - 0.5 * h * s - quarter,
        quarter - (0.5 * h + j1) * s + h,
    ];

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let vectors = [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, -a * r, Complex64::new(r, 0.0), ZERO],
        [ZERO, a * r, Complex64::new(r, 0.0), ZERO],
        [ZERO, ZERO, ZERO, ONE],
    ];

    BlockSpectrum {
        lambdas,
        eta,
        a,
        a_regularized,
        vectors,
    }
}

/// Spectrum obtained by numerically diagonalizing [`block_hamiltonian`].
/// Eigenvalues come out in ascending order; `eta` and `a` are filled from
/// the couplings so the record is comparable with [`block_spectrum`].
pub fn spectrum_oracle(params: &ModelParams, pair: IsingPair) -> BlockSpectrum {
    let h = block_hamiltonian(params, pair);
    let eig = hermitian_eigen(&h);
    let (eta, a, a_regularized) = dm_phase(params.j, params.d);
    BlockSpectrum {
        lambdas: eig.values,
        eta,
        a,
        a_regularized,
        vectors: std::array::from_fn(|k| eig.vectors.column(k)),
    }
}

impl BlockSpectrum {
    /// Eigenvalues sorted ascending, for multiset comparisons.
    pub fn sorted_lambdas(&self) -> [f64; 4] {
        let mut l = self.lambdas;
        l.sort_by(f64::total_cmp);
        l
    }

    /// Matrix whose columns are the eigenvectors.
    pub fn vector_matrix(&self) -> Mat4 {
        Mat4::from_fn(|i, k| self.vectors[k][i])
    }
}

/// Largest positional difference between two ascending eigenvalue lists.
pub fn multiset_distance(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let mut a = *a;
    let mut b = *b;
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_params() -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn unit_couplings_up_up() {
        let spec = block_spectrum(&unit_params(), IsingPair::UP_UP);
        assert_eq!(spec.lambdas, [-0.25, -1.25, -0.25, -0.25]);

        let numeric = spectrum_oracle(&unit_params(), IsingPair::UP_UP);
        let expected = [-1.25, -0.25, -0.25, -0.25];
        for (x, y) in numeric.lambdas.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_ising_neighbours_cancel_j1() {
        let base = ModelParams::new(0.7, 0.0, 1.3, 0.4, 0.9, 1.0);
        let with_j1 = ModelParams { j1: 2.5, ..base };
        let a = block_hamiltonian(&base, IsingPair::UP_DOWN);
        let b = block_hamiltonian(&with_j1, IsingPair::UP_DOWN);
        assert!((a - b).max_abs() == 0.0);
    }

    #[test]
    fn pure_xy_dimer() {
        let p = ModelParams::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        for pair in IsingPair::ALL {
            let numeric = spectrum_oracle(&p, pair).lambdas;
            let expected = [-0.5, 0.0, 0.0, 0.5];
            for (x, y) in numeric.iter().zip(expected) {
                assert!((x - y).abs() < 1e-12, "{numeric:?}");
            }
            assert_eq!(block_spectrum(&p, pair).sorted_lambdas(), expected);
        }
    }

    #[test]
    fn phase_without_dm_is_one() {
        let spec = block_spectrum(
            &ModelParams::new(1.0, 1.0, 1.0, 0.0, 1.0, 1.0),
            IsingPair::UP_UP,
        );
        assert_eq!(spec.eta, 1.0);
        assert_eq!(spec.a, ONE);
    }

    #[test]
    fn phase_with_dm_is_unimodular() {
        let spec = block_spectrum(
            &ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
            IsingPair::UP_UP,
        );
        assert!((spec.eta - 2f64.sqrt()).abs() < 1e-15);
        assert!((spec.a.norm() - 1.0).abs() < 1e-15);
        // iη/(D + iJ) evaluated literally.
        let literal = Complex64::new(0.0, spec.eta) / Complex64::new(1.0, 1.0);
        assert!((literal - spec.a).norm() < 1e-15);
    }

    #[test]
    fn vanishing_exchange_regularizes_phase() {
        let p = ModelParams::new(0.0, 1.0, 1.0, 0.0, 0.5, 1.0);
        let spec = block_spectrum(&p, IsingPair::UP_UP);
        assert!(spec.a_regularized);
        assert_eq!(spec.a, ONE);
        assert_eq!(spec.lambdas[1], spec.lambdas[2]);
    }

    #[test]
    fn degenerate_lambda1_lambda3_still_matches_as_multiset() {
        // λ1 = λ3 at s = 1 when JΔ/2 + J1 - h/2 - h + h/2 - η/2 = 0; pick Δ accordingly.
        let (j, j1, d, h) = (1.0, 0.3, 0.0, 0.8);
        let eta = f64::hypot(j, d);
        let delta = (h - j1 + 0.5 * eta) * 2.0 / j;
        let p = ModelParams::new(j, j1, delta, d, h, 1.0);
        let closed = block_spectrum(&p, IsingPair::UP_UP);
        assert!((closed.lambdas[0] - closed.lambdas[2]).abs() < 1e-12);
        let numeric = spectrum_oracle(&p, IsingPair::UP_UP);
        assert!(multiset_distance(&closed.lambdas, &numeric.lambdas) < 1e-10);
    }

    #[test]
    fn thermal_validation() {
        assert!(ModelParams::default().validate_thermal().is_ok());
        let err = ModelParams::default()
            .with_t(0.0)
            .validate_thermal()
            .unwrap_err();
        assert_eq!(err.to_string(), "T must be > 0 (got 0)");
        let nan = ModelParams {
            h: f64::NAN,
            ..ModelParams::default()
        };
        assert!(nan.validate().is_err());
    }

    fn params_strategy() -> impl Strategy<Value = ModelParams> {
        (
            -3.0f64..3.0,
            -3.0f64..3.0,
            -3.0f64..3.0,
            -3.0f64..3.0,
            -3.0f64..3.0,
        )
            .prop_map(|(j, j1, delta, d, h)| ModelParams::new(j, j1, delta, d, h, 1.0))
    }

    proptest! {
        #[test]
        fn closed_form_matches_diagonalization(p in params_strategy()) {
            for pair in IsingPair::ALL {
                let closed = block_spectrum(&p, pair);
                let numeric = spectrum_oracle(&p, pair);
                prop_assert!(multiset_distance(&closed.lambdas, &numeric.lambdas) < 1e-10);

                let h = block_hamiltonian(&p, pair);
                prop_assert!(h.hermiticity_defect() == 0.0);
                let trace: f64 = closed.lambdas.iter().sum();
                prop_assert!((trace - h.trace().re).abs() < 1e-12);
                prop_assert!(closed.lambdas[1] <= closed.lambdas[2]);
                prop_assert!(closed.eta >= p.j.abs() && closed.eta >= p.d.abs());
                prop_assert!(((closed.a * closed.a.conj()).re - 1.0).abs() < 1e-12);

                // Closed-form eigenvectors are orthonormal and diagonalize H.
                let v = closed.vector_matrix();
                prop_assert!((v.adjoint() * v - Mat4::identity()).max_abs() < 1e-10);
                let diag = v.adjoint() * h * v;
                prop_assert!(diag.off_diagonal_max() < 1e-10);
                for k in 0..4 {
                    prop_assert!((diag.0[k][k].re - closed.lambdas[k]).abs() < 1e-10);
                }

                let vn = numeric.vector_matrix();
                prop_assert!((vn.adjoint() * h * vn).off_diagonal_max() < 1e-10);
            }
            let ud = block_spectrum(&p, IsingPair::UP_DOWN).lambdas;
            let du = block_spectrum(&p, IsingPair::DOWN_UP).lambdas;
            prop_assert_eq!(ud, du);
        }
    }
}
