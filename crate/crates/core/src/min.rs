//! Measurement-induced nonlocality of two-qubit states.
//!
//! Two flavours are provided: `N₁`, the maximal trace-norm disturbance, and
//! `N₂`, the maximal squared Hilbert-Schmidt disturbance, both maximized over
//! von Neumann measurements on qubit `a` that leave its marginal unchanged.
//!
//! Bloch data use bare Pauli expectations throughout:
//! `x_i = Tr ρ(σ_i ⊗ 1)`, `y_j = Tr ρ(1 ⊗ σ_j)`, `t_ij = Tr ρ(σ_i ⊗ σ_j)`, so
//! `ρ = ¼[1 ⊗ 1 + x·σ ⊗ 1 + 1 ⊗ y·σ + Σ t_ij σ_i ⊗ σ_j]`. In these units the
//! Hilbert-Schmidt closed form carries an overall factor ¼ relative to the
//! orthonormal-operator form, while the trace-norm closed form needs none.
//! Both scalings were fixed against [`min_bruteforce`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, paulis, CMat, Mat2, Mat4, ONE, ZERO};
use crate::transfer::ThermalState;

/// `|x| ≤` this counts as a degenerate marginal on qubit `a`.
pub const DEGENERACY_TOL: f64 = 1e-12;

const X_PATTERN_TOL: f64 = 1e-14;
const DIAGONAL_TOL: f64 = 1e-12;

/// Local phase rotation `diag(1, e^{iγ_a}) ⊗ diag(1, e^{iγ_b})` applied as
/// `U ρ U†`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalPhase {
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl LocalPhase {
    pub fn unitary(&self) -> Mat4 {
        let phase = |gamma: f64| {
            Mat2::from_fn(|i, j| match (i, j) {
                (0, 0) => ONE,
                (1, 1) => Complex64::from_polar(1.0, gamma),
                _ => ZERO,
            })
        };
        kron(&phase(self.gamma_a), &phase(self.gamma_b))
    }

    pub fn apply(&self, rho: &Mat4) -> Mat4 {
        let u = self.unitary();
        u * *rho * u.adjoint()
    }
}

/// Bloch representation of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub t: [[f64; 3]; 3],
    /// Diagonal of `t`; meaningful when `t` is diagonal.
    pub c: [f64; 3],
    /// Rotation that was applied to make the coherences real.
    pub rotation: LocalPhase,
}

impl BlochForm {
    /// Pauli expectations of an arbitrary two-qubit matrix, no rotation.
    pub fn from_matrix(rho: &Mat4) -> Self {
        let sigma = paulis();
        let id = Mat2::identity();
        let expect = |op: Mat4| (*rho * op).trace().re;
        let x = std::array::from_fn(|i| expect(kron(&sigma[i], &id)));
        let y = std::array::from_fn(|j| expect(kron(&id, &sigma[j])));
        let t: [[f64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| expect(kron(&sigma[i], &sigma[j]))));
        Self {
            x,
            y,
            t,
            c: [t[0][0], t[1][1], t[2][2]],
            rotation: LocalPhase::default(),
        }
    }

    /// Rebuilds the density matrix from the Bloch data.
    pub fn reconstruct(&self) -> Mat4 {
        let sigma = paulis();
        let id = Mat2::identity();
        let mut m = Mat4::identity();
        for i in 0..3 {
            m = m + kron(&sigma[i], &id) * self.x[i] + kron(&id, &sigma[i]) * self.y[i];
            for j in 0..3 {
                m = m + kron(&sigma[i], &sigma[j]) * self.t[i][j];
            }
        }
        m * 0.25
    }

    pub fn x_norm(&self) -> f64 {
        norm3(&self.x)
    }

    pub fn off_diagonal_correlation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    worst = worst.max(self.t[i][j].abs());
                }
            }
        }
        worst
    }

    /// `T Tᵗ` as a real symmetric 3×3 matrix.
    fn ttt(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| self.t[i][k] * self.t[j][k]).sum())
        })
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Bloch form of an X-shaped state after rotating both coherences `ρ₂₃` and
/// `ρ₁₄` to be real and nonnegative, which makes `t` diagonal.
pub fn bloch_decompose(rho: &Mat4) -> Result<BlochForm> {
    for i in 0..4 {
        for j in 0..4 {
            let in_x = i == j || i + j == 3;
            let modulus = rho.0[i][j].norm();
            if !in_x && modulus > X_PATTERN_TOL {
                return Err(Error::NotXState {
                    row: i + 1,
                    col: j + 1,
                    modulus,
                });
            }
        }
    }
    let alpha = arg_or_zero(rho.0[1][2]);
    let beta = arg_or_zero(rho.0[0][3]);
    let rotation = LocalPhase {
        gamma_a: 0.5 * (beta + alpha),
        gamma_b: 0.5 * (beta - alpha),
    };
    let rotated = rotation.apply(rho);
    let mut form = BlochForm::from_matrix(&rotated);
    form.rotation = rotation;
    Ok(form)
}

fn arg_or_zero(z: Complex64) -> f64 {
    if z == ZERO {
        0.0
    } else {
        z.arg()
    }
}

/// Closed-form Hilbert-Schmidt MIN `N₂`.
///
/// With a non-degenerate marginal the only admissible measurement is along
/// `x̂`; otherwise the best direction is the least eigenvector of `T Tᵗ`.
pub fn min_hilbert_schmidt(b: &BlochForm) -> f64 {
    let m = b.ttt();
    let xn = b.x_norm();
    let kept = if xn > DEGENERACY_TOL {
        // Tr(P T Tᵗ) with P = 1 − x̂x̂ᵗ, diagonal of P written without cancellation.
        let x = b.x;
        let xn2 = xn * xn;
        let mut sum = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let p = if i == j {
                    (0..3).filter(|&k| k != i).map(|k| x[k] * x[k]).sum::<f64>() / xn2
                } else {
                    -x[i] * x[j] / xn2
                };
                sum += p * m[i][j];
            }
        }
        sum
    } else {
        let values = hermitian_eigen(&CMat::<3>::from_real(m)).values;
        values[1] + values[2]
    };
    0.25 * kept.max(0.0)
}

/// Closed-form trace-norm MIN `N₁` for states with a diagonal correlation
/// matrix. Vector norms in the formula are Euclidean.
pub fn min_trace(b: &BlochForm) -> Result<f64> {
    let off = b.off_diagonal_correlation();
    if off > DIAGONAL_TOL {
        return Err(Error::NonDiagonalCorrelations(off));
    }
    let c = b.c;
    let xn = b.x_norm();
    if xn <= DEGENERACY_TOL {
        return Ok(c.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let x = b.x;
    let alpha: f64 = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            c[i] * c[i] * (x[j] * x[j] + x[k] * x[k])
        })
        .sum();
    let beta_tilde: f64 = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            x[i] * x[i] * c[j] * c[j] * c[k] * c[k]
        })
        .sum();
    let chi_plus = alpha + 2.0 * beta_tilde.sqrt() * xn;
    if chi_plus <= 0.0 {
        return Ok(0.0);
    }
    // χ₊χ₋ = α² − 4β̃|x|², expanded so that the X-state case does not cancel.
    let u = x.map(|v| v * v);
    let s = c.map(|v| v * v);
    let mut product = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        product += u[i] * u[i] * (s[j] - s[k]).powi(2);
        product += 2.0 * u[i] * u[j] * (s[i] - s[k]) * (s[j] - s[k]);
    }
    let chi_minus = product.max(0.0) / chi_plus;
    Ok((chi_plus.sqrt() + chi_minus.sqrt()) / (2.0 * xn))
}

/// Both MIN values of a model state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinResult {
    pub n1: f64,
    pub n2: f64,
    /// Marginal of qubit `a` is maximally mixed, so the measurement basis had
    /// to be optimized rather than fixed.
    pub maximizer_degenerate: bool,
}

/// `N₁ = 2|ρ₂₃|` and `N₂ = 2|ρ₂₃|²` for the X states produced by the chain.
///
/// With a maximally mixed marginal (`maximizer_degenerate`) every basis is
/// admissible and the maximum over measurements is `max |cᵢ|`, which exceeds
/// `2|ρ₂₃|` whenever the zz correlation dominates. Use [`min_trace`] on the
/// [`bloch_decompose`]d state for that value.
pub fn min_xstate(state: &ThermalState) -> MinResult {
    let r = state.rho23().norm();
    let rho = state.matrix();
    let x3 = rho.0[0][0].re + rho.0[1][1].re - rho.0[2][2].re - rho.0[3][3].re;
    MinResult {
        n1: 2.0 * r,
        n2: 2.0 * r * r,
        maximizer_degenerate: x3.abs() <= DEGENERACY_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementNorm {
    Trace,
    /// Squared Hilbert-Schmidt norm.
    HilbertSchmidt,
}

pub const MIN_GRID_RESOLUTION: usize = 64;

/// Disturbance `‖ρ − Π_n(ρ)‖` caused by measuring qubit `a` along the unit
/// Bloch direction `n`.
pub fn measurement_disturbance(rho: &Mat4, n: [f64; 3], norm: MeasurementNorm) -> f64 {
    let sigma = paulis();
    let n_sigma = sigma[0] * n[0] + sigma[1] * n[1] + sigma[2] * n[2];
    let id = Mat2::identity();
    let half = Complex64::new(0.5, 0.0);
    let plus = kron(&(id + n_sigma).scale(half), &id);
    let minus = kron(&(id - n_sigma).scale(half), &id);
    let measured = plus * *rho * plus + minus * *rho * minus;
    let diff = *rho - measured;
    match norm {
        MeasurementNorm::Trace => diff.trace_norm_hermitian(),
        MeasurementNorm::HilbertSchmidt => diff.hs_norm_sq(),
    }
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// MIN straight from its definition, for any two-qubit state.
///
/// A non-degenerate marginal admits a single measurement, its eigenbasis.
/// A degenerate one is searched over a `grid_resolution × grid_resolution/2`
/// grid of directions on the upper hemisphere (antipodal directions give the
/// same measurement). The best grid-local maxima and samples are then
/// polished by a trust-region Newton ascent.
pub fn min_bruteforce(rho: &Mat4, norm: MeasurementNorm, grid_resolution: usize) -> Result<f64> {
    if grid_resolution < MIN_GRID_RESOLUTION {
        return Err(Error::GridTooCoarse {
            got: grid_resolution,
            min: MIN_GRID_RESOLUTION,
        });
    }
    let id = Mat2::identity();
    let sigma = paulis();
    let x: [f64; 3] = std::array::from_fn(|i| (*rho * kron(&sigma[i], &id)).trace().re);
    let xn = norm3(&x);
    if xn > DEGENERACY_TOL {
        return Ok(measurement_disturbance(rho, x.map(|v| v / xn), norm));
    }

    let f = |theta: f64, phi: f64| measurement_disturbance(rho, direction(theta, phi), norm);
    let n_phi = 2 * grid_resolution.div_ceil(2);
    let n_theta = grid_resolution / 2 + 1;
    let d_theta = std::f64::consts::FRAC_PI_2 / (n_theta - 1) as f64;
    let d_phi = 2.0 * std::f64::consts::PI / n_phi as f64;

    // Row 0 is the pole; all its φ samples are the same direction.
    let values: Vec<f64> = (0..n_theta * n_phi)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n_phi, k % n_phi);
            if i == 0 && j > 0 {
                f64::NEG_INFINITY
            } else {
                f(i as f64 * d_theta, j as f64 * d_phi)
            }
        })
        .collect();
    let at = |i: usize, j: usize| values[i * n_phi + j % n_phi];
    let is_local_max = |i: usize, j: usize| -> bool {
        let v = at(i, j);
        if i == 0 {
            return (0..n_phi).all(|jj| at(1, jj) <= v);
        }
        let above = if i + 1 < n_theta {
            at(i + 1, j)
        } else {
            // Across the equator direction (θ, φ) meets the antipode of (π − θ, φ + π).
            at(i - 1, j + n_phi / 2)
        };
        let below = if i == 1 { at(0, 0) } else { at(i - 1, j) };
        [above, below, at(i, j + 1), at(i, j + n_phi - 1)]
            .iter()
            .all(|&w| w <= v)
    };

    let mut maxima: Vec<(f64, usize, usize)> = (0..n_theta)
        .flat_map(|i| (0..n_phi).map(move |j| (i, j)))
        .filter(|&(i, j)| (i > 0 || j == 0) && is_local_max(i, j))
        .map(|(i, j)| (at(i, j), i, j))
        .collect();
    maxima.sort_by(|a, b| b.0.total_cmp(&a.0));
    // The optimum can sit between cells with no cell marking it as a local
    // maximum, so the highest raw samples are polished as well.
    let mut raw: Vec<(f64, usize, usize)> = (0..n_theta * n_phi)
        .filter(|&k| values[k].is_finite())
        .map(|k| (values[k], k / n_phi, k % n_phi))
        .collect();
    raw.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut starts: Vec<(f64, usize, usize)> = maxima.into_iter().take(POLISH_STARTS).collect();
    for s in raw.into_iter().take(POLISH_STARTS) {
        if !starts.iter().any(|t| (t.1, t.2) == (s.1, s.2)) {
            starts.push(s);
        }
    }

    let g = |n: [f64; 3]| measurement_disturbance(rho, n, norm);
    let best = starts
        .iter()
        .map(|&(value, i, j)| {
            polish(
                &g,
                value,
                direction(i as f64 * d_theta, j as f64 * d_phi),
                d_theta,
            )
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

const POLISH_STARTS: usize = 6;
const MAX_POLISH_ROUNDS: usize = 200;
const FD_STEP: f64 = 1e-4;
const ANGLE_TOL: f64 = 1e-9;

/// Trust-region Newton ascent in the tangent plane at `n`, with
/// finite-difference gradient and Hessian. Narrow ridges between nearly
/// equivalent directions defeat coordinate searches but not this.
fn polish(f: &impl Fn([f64; 3]) -> f64, start_value: f64, start: [f64; 3], radius0: f64) -> f64 {
    let (mut n, mut best, mut radius) = (start, start_value, radius0);
    for _ in 0..MAX_POLISH_ROUNDS {
        if radius < ANGLE_TOL {
            break;
        }
        let (u, v) = tangent_basis(&n);
        let at = |a: f64, b: f64| -> [f64; 3] {
            let m: [f64; 3] = std::array::from_fn(|k| n[k] + a * u[k] + b * v[k]);
            let mn = norm3(&m);
            m.map(|x| x / mn)
        };
        let h = FD_STEP;
        let g = |a: f64, b: f64| f(at(a, b));
        let (fpp, fpm, fmp, fmm) = (g(h, h), g(h, -h), g(-h, h), g(-h, -h));
        let (fa, fa_, fb, fb_) = (g(h, 0.0), g(-h, 0.0), g(0.0, h), g(0.0, -h));
        let grad = [(fa - fa_) / (2.0 * h), (fb - fb_) / (2.0 * h)];
        let haa = (fa - 2.0 * best + fa_) / (h * h);
        let hbb = (fb - 2.0 * best + fb_) / (h * h);
        let hab = (fpp - fpm - fmp + fmm) / (4.0 * h * h);

        let step = ascent_step(grad, [[haa, hab], [hab, hbb]], radius);
        let candidate = g(step[0], step[1]);
        if candidate > best {
            best = candidate;
            n = at(step[0], step[1]);
            if (step[0].hypot(step[1]) - radius).abs() < 1e-3 * radius {
                radius = (2.0 * radius).min(0.5);
            }
        } else {
            radius *= 0.25;
        }
    }
    best
}

/// Maximizing step of the local quadratic model within `radius`: Newton when
/// the Hessian is negative definite and the step fits, otherwise the better of
/// the Cauchy point and the direction of most positive curvature.
fn ascent_step(grad: [f64; 2], hess: [[f64; 2]; 2], radius: f64) -> [f64; 2] {
    let model = |s: [f64; 2]| {
        grad[0] * s[0]
            + grad[1] * s[1]
            + 0.5
                * (hess[0][0] * s[0] * s[0]
                    + 2.0 * hess[0][1] * s[0] * s[1]
                    + hess[1][1] * s[1] * s[1])
    };
    let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[0][1];
    if hess[0][0] < 0.0 && det > 0.0 {
        let newton = [
            -(hess[1][1] * grad[0] - hess[0][1] * grad[1]) / det,
            -(-hess[0][1] * grad[0] + hess[0][0] * grad[1]) / det,
        ];
        if newton[0].hypot(newton[1]) <= radius {
            return newton;
        }
    }
    let mut candidates = Vec::with_capacity(3);
    let gn = grad[0].hypot(grad[1]);
    if gn > 0.0 {
        let dir = [grad[0] / gn, grad[1] / gn];
        let curv = model([dir[0], dir[1]]) - gn;
        let len = if curv < 0.0 {
            (gn / (-2.0 * curv)).min(radius)
        } else {
            radius
        };
        candidates.push([dir[0] * len, dir[1] * len]);
    }
    // Largest eigenvalue of the symmetric Hessian and its eigenvector.
    let mean = 0.5 * (hess[0][0] + hess[1][1]);
    let spread = (0.25 * (hess[0][0] - hess[1][1]).powi(2) + hess[0][1] * hess[0][1]).sqrt();
    let top = mean + spread;
    if top > 0.0 {
        let e = if hess[0][1].abs() > 0.0 {
            [hess[0][1], top - hess[0][0]]
        } else if hess[0][0] >= hess[1][1] {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        let en = e[0].hypot(e[1]);
        let e = [e[0] / en * radius, e[1] / en * radius];
        candidates.push(e);
        candidates.push([-e[0], -e[1]]);
    }
    candidates
        .into_iter()
        .max_by(|a, b| model(*a).total_cmp(&model(*b)))
        .unwrap_or([0.0, 0.0])
}

/// Two unit vectors completing `n` to an orthonormal frame.
fn tangent_basis(n: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let dot: f64 = (0..3).map(|k| helper[k] * n[k]).sum();
    let mut u: [f64; 3] = std::array::from_fn(|k| helper[k] - dot * n[k]);
    let un = norm3(&u);
    u = u.map(|x| x / un);
    let v = [
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];
    (u, v)
}

/// Convenience: X state with both coherences, used by tests and the
/// self-test to sample beyond the thermal family.
pub fn x_state(diag: [f64; 4], rho23: Complex64, rho14: Complex64) -> Mat4 {
    let mut m = Mat4::diagonal(diag);
    m.0[1][2] = rho23;
    m.0[2][1] = rho23.conj();
    m.0[0][3] = rho14;
    m.0[3][0] = rho14.conj();
    m
}

/// `|Φ⁺⟩⟨Φ⁺|`.
pub fn bell_phi_plus() -> Mat4 {
    let half = Complex64::new(0.5, 0.0);
    x_state([0.5, 0.0, 0.0, 0.5], ZERO, half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::thermal_state;
    use crate::ModelParams;
    use proptest::prelude::*;

    #[test]
    fn maximally_mixed_has_no_bloch_data() {
        let b = bloch_decompose(&(Mat4::identity() * 0.25)).unwrap();
        assert_eq!(b.x, [0.0; 3]);
        assert_eq!(b.y, [0.0; 3]);
        assert!(b.t.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(min_hilbert_schmidt(&b), 0.0);
        assert_eq!(min_trace(&b).unwrap(), 0.0);
    }

    #[test]
    fn product_state_up_up() {
        let b = bloch_decompose(&Mat4::diagonal([1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(b.x, [0.0, 0.0, 1.0]);
        assert_eq!(b.c, [0.0, 0.0, 1.0]);
        assert_eq!(min_hilbert_schmidt(&b), 0.0);
        assert_eq!(min_trace(&b).unwrap(), 0.0);
    }

    #[test]
    fn bell_state_values_match_definition() {
        let rho = bell_phi_plus();
        let b = bloch_decompose(&rho).unwrap();
        assert_eq!(b.x_norm(), 0.0);
        assert!((b.c[0] - 1.0).abs() < 1e-15);
        assert!((b.c[1] + 1.0).abs() < 1e-15);
        assert!((b.c[2] - 1.0).abs() < 1e-15);

        // Definition-level values: measuring along z removes ρ₁₄ and ρ₄₁.
        let hs = min_bruteforce(&rho, MeasurementNorm::HilbertSchmidt, 64).unwrap();
        let tr = min_bruteforce(&rho, MeasurementNorm::Trace, 64).unwrap();
        assert!((hs - 0.5).abs() < 1e-9);
        assert!((tr - 1.0).abs() < 1e-9);
        assert!((min_hilbert_schmidt(&b) - 0.5).abs() < 1e-15);
        assert!((min_trace(&b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_branch_takes_largest_correlation() {
        let b = BlochForm {
            x: [0.0; 3],
            y: [0.0; 3],
            t: [[0.3, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.2]],
            c: [0.3, 0.5, 0.2],
            rotation: LocalPhase::default(),
        };
        assert_eq!(min_trace(&b).unwrap(), 0.5);
    }

    #[test]
    fn non_diagonal_correlations_are_rejected() {
        let mut b = BlochForm::from_matrix(&bell_phi_plus());
        b.t[0][1] = 0.1;
        assert!(matches!(
            min_trace(&b),
            Err(Error::NonDiagonalCorrelations(_))
        ));
    }

    #[test]
    fn non_x_input_is_rejected() {
        let mut m = Mat4::identity() * 0.25;
        m.0[0][1] = Complex64::new(0.1, 0.0);
        m.0[1][0] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            bloch_decompose(&m),
            Err(Error::NotXState { row: 1, col: 2, .. })
        ));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(min_bruteforce(&bell_phi_plus(), MeasurementNorm::Trace, 63).is_err());
    }

    #[test]
    fn thermal_state_matches_coherence_formulas() {
        let p = ModelParams::new(1.0, 1.0, 1.3, 0.7, 0.6, 0.3);
        let state = thermal_state(&p).unwrap();
        let r = state.rho23().norm();
        let b = bloch_decompose(state.matrix()).unwrap();
        assert!(b.off_diagonal_correlation() < 1e-15);
        assert!(b.x[0].abs() < 1e-15 && b.x[1].abs() < 1e-15);
        assert!((min_trace(&b).unwrap() - 2.0 * r).abs() < 1e-12);
        assert!((min_hilbert_schmidt(&b) - 2.0 * r * r).abs() < 1e-12);

        let result = min_xstate(&state);
        assert_eq!(result.n1, 2.0 * r);
        assert!((result.n2 - result.n1 * result.n1 / 2.0).abs() < 1e-15);

        // Non-degenerate marginal: z-basis dephasing, no search needed.
        let tr = min_bruteforce(state.matrix(), MeasurementNorm::Trace, 64).unwrap();
        let hs = min_bruteforce(state.matrix(), MeasurementNorm::HilbertSchmidt, 64).unwrap();
        assert!((tr - 2.0 * r).abs() < 1e-12);
        assert!((hs - 2.0 * r * r).abs() < 1e-12);
    }

    #[test]
    fn infinite_temperature_has_no_nonlocality() {
        let state = thermal_state(&ModelParams::default().with_t(1e14)).unwrap();
        let result = min_xstate(&state);
        assert!(result.n1 < 1e-13 && result.n2 < 1e-26);
        assert!(result.maximizer_degenerate);
    }

    #[test]
    fn werner_like_state_matches_degenerate_branch() {
        // p|Ψ⁻⟩⟨Ψ⁻| + (1-p)/4: x = y = 0, c = (-p, -p, -p).
        let p = 0.6;
        let rho = x_state(
            [
                (1.0 - p) / 4.0,
                (1.0 + p) / 4.0,
                (1.0 + p) / 4.0,
                (1.0 - p) / 4.0,
            ],
            Complex64::new(-p / 2.0, 0.0),
            ZERO,
        );
        let b = bloch_decompose(&rho).unwrap();
        let tr = min_bruteforce(&rho, MeasurementNorm::Trace, 256).unwrap();
        let hs = min_bruteforce(&rho, MeasurementNorm::HilbertSchmidt, 256).unwrap();
        assert!((tr - min_trace(&b).unwrap()).abs() < 1e-4);
        assert!((hs - min_hilbert_schmidt(&b)).abs() < 1e-4);
        assert!((tr - p).abs() < 1e-9);
    }

    #[test]
    fn reconstruction_round_trip() {
        let rho = x_state(
            [0.4, 0.1, 0.3, 0.2],
            Complex64::new(0.05, -0.12),
            Complex64::new(-0.1, 0.2),
        );
        let b = bloch_decompose(&rho).unwrap();
        let rotated = b.rotation.apply(&rho);
        assert!((b.reconstruct() - rotated).max_abs() < 1e-12);
        assert!(rotated.0[1][2].im.abs() < 1e-15 && rotated.0[1][2].re >= 0.0);
        assert!(rotated.0[0][3].im.abs() < 1e-15 && rotated.0[0][3].re >= 0.0);
        assert!(b.off_diagonal_correlation() < 1e-15);
    }

    fn x_state_strategy() -> impl Strategy<Value = Mat4> {
        (
            proptest::array::uniform4(0.01f64..1.0),
            0.0f64..1.0,
            0.0f64..1.0,
            -3.2f64..3.2,
            -3.2f64..3.2,
        )
            .prop_map(|(d, s23, s14, a23, a14)| {
                let total: f64 = d.iter().sum();
                let d = d.map(|v| v / total);
                let r23 = s23 * (d[1] * d[2]).sqrt();
                let r14 = s14 * (d[0] * d[3]).sqrt();
                x_state(
                    d,
                    Complex64::from_polar(r23, a23),
                    Complex64::from_polar(r14, a14),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_forms_match_bruteforce_nondegenerate(rho in x_state_strategy()) {
            let b = bloch_decompose(&rho).unwrap();
            prop_assume!(b.x_norm() > DEGENERACY_TOL);
            let tr = min_bruteforce(&rho, MeasurementNorm::Trace, 64).unwrap();
            let hs = min_bruteforce(&rho, MeasurementNorm::HilbertSchmidt, 64).unwrap();
            prop_assert!((min_trace(&b).unwrap() - tr).abs() < 1e-10);
            prop_assert!((min_hilbert_schmidt(&b) - hs).abs() < 1e-10);
        }

        #[test]
        fn local_phase_leaves_min_unchanged(rho in x_state_strategy(), ga in -3.0f64..3.0, gb in -3.0f64..3.0) {
            let rotated = LocalPhase { gamma_a: ga, gamma_b: gb }.apply(&rho);
            let b0 = bloch_decompose(&rho).unwrap();
            let b1 = bloch_decompose(&rotated).unwrap();
            prop_assert!((min_trace(&b0).unwrap() - min_trace(&b1).unwrap()).abs() < 1e-12);
            prop_assert!((min_hilbert_schmidt(&b0) - min_hilbert_schmidt(&b1)).abs() < 1e-12);
        }
    }
}
