//! Transfer-matrix solution of the diamond chain under periodic boundary
//! conditions.
//!
//! Every exponential is taken relative to the smallest block eigenvalue over
//! all Ising neighbour configurations, so the stored weights are bounded by 4
//! and the true values are recovered by multiplying with `exp(log_scale)`.
//! The shift cancels in every density-matrix ratio.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMat, Mat2, Mat4, ZERO};
use crate::model::{block_spectrum, BlockSpectrum, IsingPair, IsingSpin, ModelParams};

/// Largest chain length accepted by [`finite_chain_oracle`].
pub const MAX_ORACLE_CHAIN: usize = 14;

/// Positions of the X pattern of a two-qubit density matrix that the
/// diamond-chain block populates (1-based as in matrix notation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XElement {
    E11,
    E22,
    E33,
    E44,
    E23,
    E32,
}

impl XElement {
    pub const ALL: [XElement; 6] = [
        XElement::E11,
        XElement::E22,
        XElement::E33,
        XElement::E44,
        XElement::E23,
        XElement::E32,
    ];

    /// Accepts 1-based indices.
    pub fn from_indices(i: usize, j: usize) -> Result<Self> {
        Ok(match (i, j) {
            (1, 1) => XElement::E11,
            (2, 2) => XElement::E22,
            (3, 3) => XElement::E33,
            (4, 4) => XElement::E44,
            (2, 3) => XElement::E23,
            (3, 2) => XElement::E32,
            _ => return Err(Error::OutsideXPattern(i, j)),
        })
    }

    /// 1-based `(row, col)`.
    pub fn indices(self) -> (usize, usize) {
        match self {
            XElement::E11 => (1, 1),
            XElement::E22 => (2, 2),
            XElement::E33 => (3, 3),
            XElement::E44 => (4, 4),
            XElement::E23 => (2, 3),
            XElement::E32 => (3, 2),
        }
    }
}

/// Block spectra for the three distinct values of `μ_i + μ_{i+1}` together
/// with shifted Boltzmann exponentials.
#[derive(Debug, Clone)]
pub(crate) struct BlockEnsemble {
    /// Indexed by [`pair_slot`]: `(½,½)`, mixed, `(-½,-½)`.
    spectra: [BlockSpectrum; 3],
    /// `exp(-β(λ_k - λ_min))` per slot and eigenvalue.
    boltzmann: [[f64; 4]; 3],
    /// `-β λ_min`.
    log_scale: f64,
}

fn pair_slot(pair: IsingPair) -> usize {
    match (pair.mu_i, pair.mu_ip1) {
        (IsingSpin::Up, IsingSpin::Up) => 0,
        (IsingSpin::Down, IsingSpin::Down) => 2,
        _ => 1,
    }
}

const SLOT_PAIRS: [IsingPair; 3] = [IsingPair::UP_UP, IsingPair::UP_DOWN, IsingPair::DOWN_DOWN];

impl BlockEnsemble {
    pub(crate) fn new(params: &ModelParams) -> Result<Self> {
        params.validate_thermal()?;
        let beta = params.beta();
        let spectra = SLOT_PAIRS.map(|pair| block_spectrum(params, pair));
        let lambda_min = spectra
            .iter()
            .flat_map(|s| s.lambdas)
            .fold(f64::INFINITY, f64::min);
        let boltzmann = std::array::from_fn(|slot| {
            spectra[slot]
                .lambdas
                .map(|l| (-beta * (l - lambda_min)).exp())
        });
        Ok(Self {
            spectra,
            boltzmann,
            log_scale: -beta * lambda_min,
        })
    }

    fn weight(&self, slot: usize) -> f64 {
        self.boltzmann[slot].iter().sum()
    }

    /// Shifted `ϱ_ij(μ, μ')` assembled from the block eigenvectors.
    fn element(&self, slot: usize, element: XElement) -> Complex64 {
        let (row, col) = element.indices();
        let spec = &self.spectra[slot];
        (0..4)
            .map(|k| {
                let v = &spec.vectors[k];
                v[row - 1] * v[col - 1].conj() * self.boltzmann[slot][k]
            })
            .sum()
    }

    /// Shifted block operator `exp(-β H_i)` as a full matrix.
    fn operator(&self, slot: usize) -> Mat4 {
        let spec = &self.spectra[slot];
        Mat4::from_fn(|i, j| {
            (0..4)
                .map(|k| spec.vectors[k][i] * spec.vectors[k][j].conj() * self.boltzmann[slot][k])
                .sum()
        })
    }
}

/// Boltzmann factor `w(μ_i, μ_{i+1}) = Σ_k exp(-β λ_k)`.
pub fn boltzmann_weight(params: &ModelParams, pair: IsingPair) -> Result<f64> {
    Ok(log_boltzmann_weight(params, pair)?.exp())
}

/// Natural logarithm of [`boltzmann_weight`], safe at any temperature.
pub fn log_boltzmann_weight(params: &ModelParams, pair: IsingPair) -> Result<f64> {
    params.validate_thermal()?;
    let beta = params.beta();
    let lambdas = block_spectrum(params, pair).lambdas;
    let lmin = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = lambdas.iter().map(|l| (-beta * (l - lmin)).exp()).sum();
    Ok(-beta * lmin + sum.ln())
}

/// The symmetric 2×2 transfer matrix `W` with its eigenvalues.
///
/// `w_pp`, `w_pm`, `w_mm`, `lambda_plus`, `lambda_minus` and `q` are all
/// scaled by `exp(-log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub w_pp: f64,
    pub w_pm: f64,
    pub w_mm: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub q: f64,
    pub log_scale: f64,
}

impl TransferMatrix {
    fn from_weights(w_pp: f64, w_pm: f64, w_mm: f64, log_scale: f64) -> Self {
        let q = (w_pp - w_mm).hypot(2.0 * w_pm);
        let lambda_plus = 0.5 * (w_pp + w_mm + q);
        // Product form avoids cancellation in (tr - Q)/2.
        let lambda_minus = (w_pp * w_mm - w_pm * w_pm) / lambda_plus;
        Self {
            w_pp,
            w_pm,
            w_mm,
            lambda_plus,
            lambda_minus,
            q,
            log_scale,
        }
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::from_real([[self.w_pp, self.w_pm], [self.w_pm, self.w_mm]])
    }

    /// `Λ₋/Λ₊`, which controls the approach to the thermodynamic limit.
    pub fn eigenvalue_ratio(&self) -> f64 {
        self.lambda_minus / self.lambda_plus
    }

    /// Normalized dominant eigenvector `(cos θ, sin θ)` of `W`.
    pub fn dominant_vector(&self) -> [f64; 2] {
        let c2 = 0.5 * (1.0 + (self.w_pp - self.w_mm) / self.q);
        let s2 = 0.5 * (1.0 - (self.w_pp - self.w_mm) / self.q);
        [c2.max(0.0).sqrt(), s2.max(0.0).sqrt()]
    }
}

pub fn transfer_matrix(params: &ModelParams) -> Result<TransferMatrix> {
    let ens = BlockEnsemble::new(params)?;
    Ok(transfer_from(&ens))
}

fn transfer_from(ens: &BlockEnsemble) -> TransferMatrix {
    TransferMatrix::from_weights(ens.weight(0), ens.weight(1), ens.weight(2), ens.log_scale)
}

/// `log Z_N` for a periodic chain of `n` blocks, `Z_N = Λ₊^N + Λ₋^N`.
pub fn partition_function(params: &ModelParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidChainLength {
            n,
            requirement: "N >= 1",
        });
    }
    let tm = transfer_matrix(params)?;
    let n_f = n as f64;
    let ratio_pow = tm.eigenvalue_ratio().powi(n as i32);
    Ok(n_f * (tm.lambda_plus.ln() + tm.log_scale) + ratio_pow.ln_1p())
}

/// The matrix `P_ij` of one density element over the four Ising neighbour
/// configurations, rows/columns ordered `(+½, -½)`. Entries carry the same
/// `exp(-log_scale)` factor as [`TransferMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrix {
    pub element: XElement,
    pub p: [[Complex64; 2]; 2],
    pub log_scale: f64,
}

/// Accepts 1-based `(i, j)` inside the X pattern.
pub fn element_matrix(params: &ModelParams, i: usize, j: usize) -> Result<ElementMatrix> {
    let element = XElement::from_indices(i, j)?;
    let ens = BlockEnsemble::new(params)?;
    Ok(element_from(&ens, element))
}

fn element_from(ens: &BlockEnsemble, element: XElement) -> ElementMatrix {
    let pp = ens.element(0, element);
    let pm = ens.element(1, element);
    let mm = ens.element(2, element);
    ElementMatrix {
        element,
        p: [[pp, pm], [pm, mm]],
        log_scale: ens.log_scale,
    }
}

/// Reduced two-qubit state of one Heisenberg dimer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    rho: Mat4,
}

impl ThermalState {
    /// Builds an X-shaped state from its independent entries without any
    /// physical checks; see [`ThermalState::validate`].
    pub fn from_elements(r11: f64, r22: f64, r33: f64, r44: f64, r23: Complex64) -> Self {
        let mut rho = Mat4::diagonal([r11, r22, r33, r44]);
        rho.0[1][2] = r23;
        rho.0[2][1] = r23.conj();
        Self { rho }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    pub fn element(&self, e: XElement) -> Complex64 {
        let (i, j) = e.indices();
        self.rho.0[i - 1][j - 1]
    }

    pub fn rho23(&self) -> Complex64 {
        self.rho.0[1][2]
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.rho).values[0]
    }

    /// Checks trace, positivity and the X pattern. Returns the first
    /// violation found.
    pub fn validate(&self, tol: f64) -> std::result::Result<(), String> {
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(format!("trace {tr} differs from 1"));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -tol {
            return Err(format!("minimum eigenvalue {min_eig:e} is negative"));
        }
        for i in 0..4 {
            for j in 0..4 {
                let in_pattern = i == j || (i, j) == (1, 2) || (i, j) == (2, 1);
                if !in_pattern && self.rho.0[i][j] != ZERO {
                    return Err(format!("entry ({},{}) outside the X pattern", i + 1, j + 1));
                }
            }
        }
        if self.rho.hermiticity_defect() > tol {
            return Err("state is not Hermitian".to_string());
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &ThermalState) -> f64 {
        (self.rho - other.rho).max_abs()
    }
}

/// Thermodynamic-limit reduced density matrix of one dimer,
/// `ρ_ij = ⟨v₊|P_ij|v₊⟩/Λ₊` written out in closed form.
pub fn thermal_state(params: &ModelParams) -> Result<ThermalState> {
    let ens = BlockEnsemble::new(params)?;
    let tm = transfer_from(&ens);
    let limit = |e: XElement| -> Complex64 {
        let [[pp, pm], [_, mm]] = element_from(&ens, e).p;
        ((pp + mm) * 0.5
            + pm * (2.0 * tm.w_pm / tm.q)
            + (pp - mm) * ((tm.w_pp - tm.w_mm) / (2.0 * tm.q)))
            / tm.lambda_plus
    };
    let mut rho = Mat4::zeros();
    for e in XElement::ALL {
        let (i, j) = e.indices();
        rho.0[i - 1][j - 1] = limit(e);
    }
    // Diagonal entries are real by construction; drop round-off imaginary parts.
    for k in 0..4 {
        rho.0[k][k].im = 0.0;
    }
    rho.0[2][1] = rho.0[1][2].conj();
    Ok(ThermalState { rho })
}

/// Result of the exhaustive finite-chain computation.
#[derive(Debug, Clone)]
pub struct FiniteChain {
    pub n: usize,
    /// `log Z_N` from the sum over all `2^N` Ising configurations.
    pub log_z: f64,
    /// `log Tr(W^N)` from an explicit matrix power.
    pub log_z_matrix: f64,
    /// Reduced state of the middle block from enumeration.
    pub state: ThermalState,
    /// Largest entrywise difference between the enumerated state and
    /// `Tr(P_ij W^{N-1}) / Tr(W^N)`.
    pub matrix_route_deviation: f64,
    /// Largest entrywise difference between the states of block 0 and the
    /// middle block (zero up to round-off by translation invariance).
    pub bond_spread: f64,
}

/// Periodic chain of `n ≤ 14` blocks solved by brute-force enumeration and,
/// independently, by explicit powers of the transfer matrix.
pub fn finite_chain_oracle(params: &ModelParams, n: usize) -> Result<FiniteChain> {
    if n == 0 || n > MAX_ORACLE_CHAIN {
        return Err(Error::InvalidChainLength {
            n,
            requirement: "1 <= N <= 14",
        });
    }
    let ens = BlockEnsemble::new(params)?;
    let weights = [ens.weight(0), ens.weight(1), ens.weight(2)];
    let operators = [ens.operator(0), ens.operator(1), ens.operator(2)];
    let middle = n / 2;

    let spin = |config: usize, site: usize| -> IsingSpin {
        IsingSpin::from_bit(config >> (site % n) & 1 == 0)
    };
    let slot_of = |config: usize, bond: usize| -> usize {
        pair_slot(IsingPair::new(spin(config, bond), spin(config, bond + 1)))
    };

    let mut z = 0.0;
    let mut acc_first = Mat4::zeros();
    let mut acc_middle = Mat4::zeros();
    for config in 0..(1usize << n) {
        let slots: Vec<usize> = (0..n).map(|b| slot_of(config, b)).collect();
        let product: f64 = slots.iter().map(|&s| weights[s]).product();
        z += product;
        for (bond, acc) in [(0usize, &mut acc_first), (middle, &mut acc_middle)] {
            let rest: f64 = slots
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != bond)
                .map(|(_, &s)| weights[s])
                .product();
            *acc = *acc + operators[slots[bond]] * rest;
        }
    }
    let state_middle = ThermalState {
        rho: acc_middle * (1.0 / z),
    };
    let state_first = ThermalState {
        rho: acc_first * (1.0 / z),
    };

    // Matrix-power route.
    let tm = transfer_from(&ens);
    let w = tm.matrix();
    let mut w_pow = CMat::<2>::identity();
    for _ in 0..(n - 1) {
        w_pow = w_pow * w;
    }
    let z_matrix = (w_pow * w).trace().re;
    let mut matrix_route_deviation = 0.0f64;
    for e in XElement::ALL {
        let p = element_from(&ens, e).p;
        let value = (CMat(p) * w_pow).trace() / z_matrix;
        matrix_route_deviation =
            matrix_route_deviation.max((value - state_middle.element(e)).norm());
    }

    let n_f = n as f64;
    Ok(FiniteChain {
        n,
        log_z: z.ln() + n_f * ens.log_scale,
        log_z_matrix: z_matrix.ln() + n_f * ens.log_scale,
        state: state_middle,
        matrix_route_deviation,
        bond_spread: state_first.max_deviation(&state_middle),
    })
}
