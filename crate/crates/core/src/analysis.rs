//! Sweeps over model parameters and the diagnostics built on them:
//! finite-difference derivatives, critical-point location and threshold
//! boundaries of the nonzero-MIN region.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::min::min_xstate;
use crate::model::ModelParams;
use crate::transfer::{thermal_state, XElement};

/// Operational zero for MIN at finite temperature.
pub const DEFAULT_EPSILON: f64 = 1e-4;
/// Axis resolution of the boundary bisection.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-6;

/// A named coordinate of [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    J,
    J1,
    Delta,
    D,
    H,
    T,
}

impl Axis {
    pub const ALL: [Axis; 6] = [Axis::J, Axis::J1, Axis::Delta, Axis::D, Axis::H, Axis::T];

    pub fn name(self) -> &'static str {
        match self {
            Axis::J => "J",
            Axis::J1 => "J1",
            Axis::Delta => "delta",
            Axis::D => "D",
            Axis::H => "h",
            Axis::T => "T",
        }
    }

    pub fn get(self, p: &ModelParams) -> f64 {
        match self {
            Axis::J => p.j,
            Axis::J1 => p.j1,
            Axis::Delta => p.delta,
            Axis::D => p.d,
            Axis::H => p.h,
            Axis::T => p.t,
        }
    }

    pub fn set(self, p: &mut ModelParams, value: f64) {
        match self {
            Axis::J => p.j = value,
            Axis::J1 => p.j1 = value,
            Axis::Delta => p.delta = value,
            Axis::D => p.d = value,
            Axis::H => p.h = value,
            Axis::T => p.t = value,
        }
    }

    pub fn with(self, p: &ModelParams, value: f64) -> ModelParams {
        let mut q = *p;
        self.set(&mut q, value);
        q
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown axis '{s}' (expected one of J, J1, delta, D, h, T)"))
    }
}

/// Uniform grid `min, min + step, ..., max` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(axis: Axis, min: f64, max: f64, steps: usize) -> Self {
        Self {
            axis,
            min,
            max,
            steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidSweep(format!(
                "axis {} needs at least 2 steps",
                self.axis
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(Error::InvalidSweep(format!(
                "axis {} needs finite min < max (got {} .. {})",
                self.axis, self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.max
        } else {
            self.min + k as f64 * self.spacing()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.value(k)).collect()
    }
}

/// Pointwise quantity evaluated on a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    N1,
    N2,
    /// Central difference of `N₁` in Δ at every grid point.
    DN1DDelta,
    /// Modulus of one density-matrix element.
    Rho(XElement),
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::N1 => "N1".into(),
            Observable::N2 => "N2".into(),
            Observable::DN1DDelta => "dN1_dDelta".into(),
            Observable::Rho(e) => {
                let (i, j) = e.indices();
                format!("rho{i}{j}")
            }
        }
    }
}

impl FromStr for Observable {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "N1" => Ok(Observable::N1),
            "N2" => Ok(Observable::N2),
            "dN1_dDelta" => Ok(Observable::DN1DDelta),
            _ => {
                let digits = s
                    .strip_prefix("rho")
                    .filter(|d| d.len() == 2 && d.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| {
                        format!("unknown observable '{s}' (expected N1, N2, dN1_dDelta or rhoIJ)")
                    })?;
                let b = digits.as_bytes();
                XElement::from_indices((b[0] - b'0') as usize, (b[1] - b'0') as usize)
                    .map(Observable::Rho)
                    .map_err(|e| e.to_string())
            }
        }
    }
}

const POINTWISE_DERIVATIVE_STEP: f64 = 1e-5;

/// Value of `observable` at one parameter point.
pub fn evaluate(params: &ModelParams, observable: Observable) -> Result<f64> {
    match observable {
        Observable::N1 => Ok(min_xstate(&thermal_state(params)?).n1),
        Observable::N2 => Ok(min_xstate(&thermal_state(params)?).n2),
        Observable::Rho(e) => Ok(thermal_state(params)?.element(e).norm()),
        Observable::DN1DDelta => {
            let step = POINTWISE_DERIVATIVE_STEP * params.delta.abs().max(1.0);
            let up = Axis::Delta.with(params, params.delta + step);
            let down = Axis::Delta.with(params, params.delta - step);
            let n_up = min_xstate(&thermal_state(&up)?).n1;
            let n_down = min_xstate(&thermal_state(&down)?).n1;
            Ok((n_up - n_down) / (2.0 * step))
        }
    }
}

/// Convenience for the common case.
pub fn n1(params: &ModelParams) -> Result<f64> {
    evaluate(params, Observable::N1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// One or two axes; with two, the second varies fastest.
    pub axes: Vec<AxisRange>,
    pub fixed: ModelParams,
    pub observable: Observable,
}

impl SweepSpec {
    pub fn one(axis: AxisRange, fixed: ModelParams, observable: Observable) -> Self {
        Self {
            axes: vec![axis],
            fixed,
            observable,
        }
    }

    pub fn two(
        outer: AxisRange,
        inner: AxisRange,
        fixed: ModelParams,
        observable: Observable,
    ) -> Self {
        Self {
            axes: vec![outer, inner],
            fixed,
            observable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].axis == self.axes[1].axis {
            return Err(Error::InvalidSweep(format!(
                "axis {} given twice",
                self.axes[0].axis
            )));
        }
        for a in &self.axes {
            a.validate()?;
        }
        self.fixed.validate()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameters of the grid point with row-major index `k`.
    pub fn point(&self, k: usize) -> ModelParams {
        let mut p = self.fixed;
        let mut rem = k;
        for a in self.axes.iter().rev() {
            a.axis.set(&mut p, a.value(rem % a.steps));
            rem /= a.steps;
        }
        p
    }
}

/// Grid coordinates of one sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisGrid {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<AxisGrid>,
    /// Row-major, last axis fastest.
    pub values: Vec<f64>,
    pub observable: String,
    pub fixed: ModelParams,
    pub version: &'static str,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Evaluates the observable on every grid point. Points are computed in
/// parallel and written back in grid order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|k| evaluate(&spec.point(k), spec.observable))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSweep(format!(
            "non-finite value at grid index {bad}"
        )));
    }
    Ok(SweepResult {
        axes: spec
            .axes
            .iter()
            .map(|a| AxisGrid {
                axis: a.axis,
                values: a.values(),
            })
            .collect(),
        values,
        observable: spec.observable.label(),
        fixed: spec.fixed,
        version: VERSION,
    })
}

impl SweepResult {
    fn uniform_spacing(&self) -> Result<(f64, &[f64])> {
        if self.axes.len() != 1 {
            return Err(Error::NotOneDimensional(format!(
                "sweep has {} axes",
                self.axes.len()
            )));
        }
        let xs = &self.axes[0].values;
        if xs.len() < 2 {
            return Err(Error::NotOneDimensional(
                "fewer than two grid points".into(),
            ));
        }
        let step = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        let uniform = xs
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs().max(1e-300));
        if !uniform {
            return Err(Error::NotOneDimensional("grid is not uniform".into()));
        }
        Ok((step, xs))
    }
}

/// Finite-difference derivative along the single sweep axis: central
/// differences inside, one-sided at both ends.
pub fn derivative(result: &SweepResult) -> Result<SweepResult> {
    let (step, _) = result.uniform_spacing()?;
    let y = &result.values;
    let n = y.len();
    let values = (0..n)
        .map(|k| match k {
            0 => (y[1] - y[0]) / step,
            k if k == n - 1 => (y[n - 1] - y[n - 2]) / step,
            k => (y[k + 1] - y[k - 1]) / (2.0 * step),
        })
        .collect();
    Ok(SweepResult {
        axes: result.axes.clone(),
        values,
        observable: format!("d{}_d{}", result.observable, result.axes[0].axis),
        fixed: result.fixed,
        version: result.version,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub location: f64,
    pub peak_value: f64,
    /// Grid index of the raw `|derivative|` maximum.
    pub grid_index: usize,
}

const FLAT_THRESHOLD: f64 = 1e-9;

/// Peak of `|series|` refined by a parabola through the three points around
/// the grid maximum. The signed peak value is returned.
pub fn critical_point(result: &SweepResult) -> Result<CriticalPoint> {
    let (step, xs) = result.uniform_spacing()?;
    let y = &result.values;
    let (k, peak) =
        y.iter()
            .map(|v| v.abs())
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });
    if peak.is_nan() || peak < FLAT_THRESHOLD {
        return Err(Error::NoCriticalPoint(peak.max(0.0)));
    }
    if k == 0 || k == y.len() - 1 {
        return Ok(CriticalPoint {
            location: xs[k],
            peak_value: y[k],
            grid_index: k,
        });
    }
    let (a, b, c) = (y[k - 1].abs(), y[k].abs(), y[k + 1].abs());
    let denom = a - 2.0 * b + c;
    let (offset, refined) = if denom < 0.0 {
        let off = 0.5 * (a - c) / denom;
        (off, b - 0.25 * (a - c) * off)
    } else {
        (0.0, b)
    };
    Ok(CriticalPoint {
        location: xs[k] + offset * step,
        peak_value: refined.copysign(y[k]),
        grid_index: k,
    })
}

/// Scan geometry of a threshold boundary: one scan line per value of
/// `scan`, each searched along `along`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub scan: AxisRange,
    pub along: AxisRange,
}

/// Planes the boundary tracer accepts, as `(scan, along)`. The `(h, delta)`
/// plane is used at low temperature to locate the ground-state crossover.
pub const SUPPORTED_PLANES: [(Axis, Axis); 5] = [
    (Axis::J1, Axis::T),
    (Axis::H, Axis::T),
    (Axis::J1, Axis::H),
    (Axis::Delta, Axis::T),
    (Axis::H, Axis::Delta),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub scan: f64,
    pub along: f64,
    /// Final bisection bracket on the `along` axis.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanLine {
    pub scan: f64,
    /// Whether `N₁ > ε` at the start of the line.
    pub above_at_start: bool,
    /// Crossing locations along the line, ascending.
    pub crossings: Vec<f64>,
}

impl ScanLine {
    /// Length of the part of `[lo, hi]` where `N₁ > ε`.
    pub fn inside_length(&self, lo: f64, hi: f64) -> f64 {
        let mut inside = self.above_at_start;
        let mut last = lo;
        let mut total = 0.0;
        for &c in &self.crossings {
            if inside {
                total += c - last;
            }
            inside = !inside;
            last = c;
        }
        if inside {
            total += hi - last;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub epsilon: f64,
    pub plane: Plane,
    pub fixed: ModelParams,
    /// Crossing points ordered by scan value, then along value.
    pub points: Vec<BoundaryPoint>,
    pub lines: Vec<ScanLine>,
    /// Scan values whose lines showed no sign change.
    pub lines_without_crossing: Vec<f64>,
}

impl BoundaryCurve {
    /// Area of the `N₁ > ε` region inside the scan window (trapezoidal in
    /// the scan direction).
    pub fn enclosed_area(&self) -> f64 {
        let lengths: Vec<f64> = self
            .lines
            .iter()
            .map(|l| l.inside_length(self.plane.along.min, self.plane.along.max))
            .collect();
        let ds = self.plane.scan.spacing();
        lengths.windows(2).map(|w| 0.5 * (w[0] + w[1]) * ds).sum()
    }

    /// Parameters of a boundary point.
    pub fn params_at(&self, p: &BoundaryPoint) -> ModelParams {
        let q = self.plane.scan.axis.with(&self.fixed, p.scan);
        self.plane.along.axis.with(&q, p.along)
    }
}

/// Traces where `N₁` crosses `epsilon`. Each scan line is sampled on the
/// `along` grid; every sign change of `N₁ − ε` is then bisected down to
/// `tol` in the `along` coordinate.
pub fn threshold_boundary(
    plane: Plane,
    fixed: &ModelParams,
    epsilon: f64,
) -> Result<BoundaryCurve> {
    threshold_boundary_with_tol(plane, fixed, epsilon, DEFAULT_BISECTION_TOL)
}

pub fn threshold_boundary_with_tol(
    plane: Plane,
    fixed: &ModelParams,
    epsilon: f64,
    tol: f64,
) -> Result<BoundaryCurve> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let key = (plane.scan.axis, plane.along.axis);
    if !SUPPORTED_PLANES.contains(&key) {
        return Err(Error::UnsupportedPlane(
            key.0.name().into(),
            key.1.name().into(),
        ));
    }
    plane.scan.validate()?;
    plane.along.validate()?;
    fixed.validate()?;

    let lines = (0..plane.scan.steps)
        .into_par_iter()
        .map(|i| scan_line(&plane, fixed, plane.scan.value(i), epsilon, tol))
        .collect::<Result<Vec<(ScanLine, Vec<BoundaryPoint>)>>>()?;

    let mut points = Vec::new();
    let mut lines_without_crossing = Vec::new();
    let mut scan_lines = Vec::with_capacity(lines.len());
    for (line, pts) in lines {
        if pts.is_empty() {
            lines_without_crossing.push(line.scan);
        }
        points.extend(pts);
        scan_lines.push(line);
    }
    Ok(BoundaryCurve {
        epsilon,
        plane,
        fixed: *fixed,
        points,
        lines: scan_lines,
        lines_without_crossing,
    })
}

fn scan_line(
    plane: &Plane,
    fixed: &ModelParams,
    scan_value: f64,
    epsilon: f64,
    tol: f64,
) -> Result<(ScanLine, Vec<BoundaryPoint>)> {
    let base = plane.scan.axis.with(fixed, scan_value);
    let along = plane.along;
    let g = |x: f64| -> Result<f64> { Ok(n1(&along.axis.with(&base, x))? - epsilon) };

    let xs = along.values();
    let gs = xs.iter().map(|&x| g(x)).collect::<Result<Vec<f64>>>()?;
    let mut crossings = Vec::new();
    let mut points = Vec::new();
    for k in 0..xs.len() - 1 {
        if (gs[k] > 0.0) != (gs[k + 1] > 0.0) {
            let (mut lo, mut hi) = (xs[k], xs[k + 1]);
            let lo_above = gs[k] > 0.0;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if (g(mid)? > 0.0) == lo_above {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let at = 0.5 * (lo + hi);
            crossings.push(at);
            points.push(BoundaryPoint {
                scan: scan_value,
                along: at,
                bracket: (lo, hi),
            });
        }
    }
    Ok((
        ScanLine {
            scan: scan_value,
            above_at_start: gs[0] > 0.0,
            crossings,
        },
        points,
    ))
}
