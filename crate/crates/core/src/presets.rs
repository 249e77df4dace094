//! Named parameter sets for the standard plots. Each preset evaluates
//! deterministically and renders to a [`Table`].

use crate::analysis::{
    derivative, sweep, threshold_boundary, Axis, AxisRange, Observable, Plane, SweepSpec,
    DEFAULT_EPSILON,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::output::{params_record, Table};

/// What a preset computes.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetKind {
    /// One 1D sweep per family member. `derivative` replaces the observable
    /// by its finite-difference derivative along the axis.
    Curves {
        axis: AxisRange,
        family_axes: Vec<Axis>,
        family: Vec<Vec<f64>>,
        observable: Observable,
        derivative: bool,
    },
    /// 2D grid, last axis fastest.
    Density {
        outer: AxisRange,
        inner: AxisRange,
        observable: Observable,
    },
    /// One threshold boundary per value of D.
    Boundaries {
        plane: Plane,
        d_values: Vec<f64>,
        epsilon: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub base: ModelParams,
    pub kind: PresetKind,
}

pub const PRESET_NAMES: [&str; 15] = [
    "fig1a",
    "fig1b",
    "fig1c",
    "fig1d",
    "fig3",
    "fig4a",
    "fig4b",
    "fig5a",
    "fig5b",
    "fig5c",
    "fig5d",
    "fig6a",
    "fig6b",
    "fig7",
    "critical-line",
];

/// Δ grid of the anisotropy sweeps: spacing 0.005 on [−1, 2].
pub const DELTA_SWEEP: AxisRange = AxisRange {
    axis: Axis::Delta,
    min: -1.0,
    max: 2.0,
    steps: 601,
};

pub const FIG3_DELTAS: [f64; 5] = [0.5, 0.8, 1.0, 1.2, 2.0];
pub const FIG6_D_VALUES: [f64; 4] = [0.0, 0.5, 0.8, 1.0];
pub const FIG7_TEMPERATURES: [f64; 4] = [0.1, 0.2, 0.5, 1.0];

fn unit(d: f64, h: f64, t: f64) -> ModelParams {
    ModelParams::new(1.0, 1.0, 1.0, d, h, t)
}

fn delta_family(temperatures: [f64; 2], derivative: bool) -> PresetKind {
    let family = [0.0, 1.0, 2.0]
        .iter()
        .flat_map(|&d| temperatures.iter().map(move |&t| vec![d, t]))
        .collect();
    PresetKind::Curves {
        axis: DELTA_SWEEP,
        family_axes: vec![Axis::D, Axis::T],
        family,
        observable: Observable::N1,
        derivative,
    }
}

fn h25_family(derivative: bool) -> PresetKind {
    PresetKind::Curves {
        axis: AxisRange::new(Axis::Delta, -1.0, 3.0, 801),
        family_axes: vec![Axis::T],
        family: [0.1, 0.15, 0.2, 0.25].iter().map(|&t| vec![t]).collect(),
        observable: Observable::N1,
        derivative,
    }
}

fn delta_t_density() -> PresetKind {
    PresetKind::Density {
        outer: AxisRange::new(Axis::Delta, -1.0, 3.0, 101),
        inner: AxisRange::new(Axis::T, 0.01, 2.0, 100),
        observable: Observable::N1,
    }
}

fn j1_h_density() -> PresetKind {
    PresetKind::Density {
        outer: AxisRange::new(Axis::J1, -3.0, 3.0, 121),
        inner: AxisRange::new(Axis::H, 0.0, 4.0, 81),
        observable: Observable::N1,
    }
}

fn boundaries(scan: AxisRange) -> PresetKind {
    PresetKind::Boundaries {
        plane: Plane {
            scan,
            along: AxisRange::new(Axis::T, 0.02, 2.0, 100),
        },
        d_values: FIG6_D_VALUES.to_vec(),
        epsilon: DEFAULT_EPSILON,
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let (description, base, kind) = match name {
        "fig1a" => (
            "N1 versus delta, J=J1=h=1, D in {0,1,2}, T in {0.15,0.2}",
            unit(0.0, 1.0, 0.15),
            delta_family([0.15, 0.2], false),
        ),
        "fig1b" => (
            "dN1/ddelta versus delta, J=J1=h=1, D in {0,1,2}, T in {0.15,0.2}",
            unit(0.0, 1.0, 0.15),
            delta_family([0.15, 0.2], true),
        ),
        "fig1c" => (
            "N1 versus delta, J=J1=h=1, D in {0,1,2}, T in {0.1,0.25}",
            unit(0.0, 1.0, 0.1),
            delta_family([0.1, 0.25], false),
        ),
        "fig1d" => (
            "dN1/ddelta versus delta, J=J1=h=1, D in {0,1,2}, T in {0.1,0.25}",
            unit(0.0, 1.0, 0.1),
            delta_family([0.1, 0.25], true),
        ),
        "fig3" => (
            "N1 versus T, J=J1=h=1, D=0, delta in {0.5,0.8,1,1.2,2}",
            unit(0.0, 1.0, 0.2),
            PresetKind::Curves {
                axis: AxisRange::new(Axis::T, 0.01, 3.0, 300),
                family_axes: vec![Axis::Delta],
                family: FIG3_DELTAS.iter().map(|&d| vec![d]).collect(),
                observable: Observable::N1,
                derivative: false,
            },
        ),
        "fig4a" => (
            "N1 versus delta, J=J1=1, h=2.5, D=0, T in {0.1,0.15,0.2,0.25}",
            unit(0.0, 2.5, 0.1),
            h25_family(false),
        ),
        "fig4b" => (
            "dN1/ddelta versus delta, J=J1=1, h=2.5, D=0, T in {0.1,0.15,0.2,0.25}",
            unit(0.0, 2.5, 0.1),
            h25_family(true),
        ),
        "fig5a" => (
            "N1 over (delta, T), J=J1=1, h=1, D=0 (a zero-field variant is obtained with --h 0)",
            unit(0.0, 1.0, 0.2),
            delta_t_density(),
        ),
        "fig5b" => (
            "N1 over (delta, T), J=J1=1, h=1, D=1 (a zero-field variant is obtained with --h 0)",
            unit(1.0, 1.0, 0.2),
            delta_t_density(),
        ),
        "fig5c" => (
            "N1 over (J1, h), J=delta=1, T=0.5, D=0",
            unit(0.0, 1.0, 0.5),
            j1_h_density(),
        ),
        "fig5d" => (
            "N1 over (J1, h), J=delta=1, T=0.5, D=1",
            unit(1.0, 1.0, 0.5),
            j1_h_density(),
        ),
        "fig6a" => (
            "threshold boundary N1=epsilon in (J1, T), J=delta=h=1, D in {0,0.5,0.8,1}",
            unit(0.0, 1.0, 0.2),
            boundaries(AxisRange::new(Axis::J1, -3.0, 3.0, 61)),
        ),
        "fig6b" => (
            "threshold boundary N1=epsilon in (h, T), J=J1=delta=1, D in {0,0.5,0.8,1}",
            unit(0.0, 1.0, 0.2),
            boundaries(AxisRange::new(Axis::H, 0.0, 4.0, 81)),
        ),
        "fig7" => (
            "N1 versus h, J=J1=D=delta=1, T in {0.1,0.2,0.5,1}",
            unit(1.0, 1.0, 0.1),
            PresetKind::Curves {
                axis: AxisRange::new(Axis::H, 0.0, 4.0, 401),
                family_axes: vec![Axis::T],
                family: FIG7_TEMPERATURES.iter().map(|&t| vec![t]).collect(),
                observable: Observable::N1,
                derivative: false,
            },
        ),
        "critical-line" => (
            "threshold boundary N1=epsilon in (h, delta) at T=0.05, J=J1=1, D=0; \
             compare with the line delta = 3h - 3 for h < 2",
            unit(0.0, 1.0, 0.05),
            PresetKind::Boundaries {
                plane: Plane {
                    scan: AxisRange::new(Axis::H, 0.0, 2.0, 41),
                    along: AxisRange::new(Axis::Delta, -1.0, 4.0, 201),
                },
                d_values: vec![0.0],
                epsilon: DEFAULT_EPSILON,
            },
        ),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.into(),
                available: PRESET_NAMES.join(", "),
            })
        }
    };
    let name = PRESET_NAMES
        .iter()
        .find(|&&n| n == name)
        .copied()
        .unwrap_or("");
    Ok(Preset {
        name,
        description,
        base,
        kind,
    })
}

impl Preset {
    /// Replaces the resolution of the main axis (both axes for densities,
    /// the `along` axis for boundaries).
    pub fn with_steps(mut self, steps: usize) -> Self {
        match &mut self.kind {
            PresetKind::Curves { axis, .. } => axis.steps = steps,
            PresetKind::Density { outer, inner, .. } => {
                outer.steps = steps;
                inner.steps = steps;
            }
            PresetKind::Boundaries { plane, .. } => plane.along.steps = steps,
        }
        self
    }

    pub fn run(&self) -> Result<Table> {
        match &self.kind {
            PresetKind::Curves {
                axis,
                family_axes,
                family,
                observable,
                derivative: take_derivative,
            } => {
                let mut label = observable.label();
                let mut columns: Vec<String> =
                    family_axes.iter().map(|a| a.name().to_string()).collect();
                columns.push(axis.axis.name().into());
                let mut rows = Vec::new();
                for member in family {
                    let mut fixed = self.base;
                    for (a, &v) in family_axes.iter().zip(member) {
                        a.set(&mut fixed, v);
                    }
                    let mut result = sweep(&SweepSpec::one(*axis, fixed, *observable))?;
                    if *take_derivative {
                        result = derivative(&result)?;
                    }
                    label = result.observable.clone();
                    let xs = &result.axes[0].values;
                    for (x, y) in xs.iter().zip(&result.values) {
                        let mut row = member.clone();
                        row.push(*x);
                        row.push(*y);
                        rows.push(row);
                    }
                }
                columns.push(label);
                let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
                let mut table = self.table(&cols);
                table.rows = rows;
                Ok(table)
            }
            PresetKind::Density {
                outer,
                inner,
                observable,
            } => {
                let result = sweep(&SweepSpec::two(*outer, *inner, self.base, *observable))?;
                let mut table = Table::from(&result);
                table.meta.push(("preset".into(), self.name.into()));
                table
                    .meta
                    .push(("description".into(), self.description.into()));
                table
                    .meta
                    .push(("layout".into(), "row-major, last axis fastest".into()));
                Ok(table)
            }
            PresetKind::Boundaries {
                plane,
                d_values,
                epsilon,
            } => {
                let scan = plane.scan.axis.name();
                let along = plane.along.axis.name();
                let lo = format!("{along}_lo");
                let hi = format!("{along}_hi");
                let mut table = self
                    .table(&["D", scan, along, &lo, &hi])
                    .with_meta("epsilon", format!("{epsilon}"));
                for &d in d_values {
                    let fixed = Axis::D.with(&self.base, d);
                    let curve = threshold_boundary(*plane, &fixed, *epsilon)?;
                    table.meta.push((
                        format!("enclosed_area D={d}"),
                        format!("{:.16e}", curve.enclosed_area()),
                    ));
                    for p in &curve.points {
                        table.push(vec![d, p.scan, p.along, p.bracket.0, p.bracket.1]);
                    }
                }
                Ok(table)
            }
        }
    }

    fn table(&self, columns: &[&str]) -> Table {
        Table::new(columns)
            .with_meta("preset", self.name)
            .with_meta("description", self.description)
            .with_meta("base", params_record(&self.base))
    }
}

/// Evaluates a preset by name.
pub fn run_figure(name: &str, steps: Option<usize>) -> Result<Table> {
    let mut p = preset(name)?;
    if let Some(s) = steps {
        p = p.with_steps(s);
    }
    p.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_resolves() {
        for name in PRESET_NAMES {
            assert_eq!(preset(name).unwrap().name, name);
        }
    }

    #[test]
    fn unknown_preset_lists_available() {
        let err = preset("fig2").unwrap_err().to_string();
        assert!(err.contains("fig2") && err.contains("fig1a") && err.contains("fig7"));
    }

    #[test]
    fn fig1a_layout() {
        let t = run_figure("fig1a", Some(31)).unwrap();
        assert_eq!(t.columns, ["D", "T", "delta", "N1"]);
        assert_eq!(t.rows.len(), 6 * 31);
        let ds = t.column("D").unwrap();
        assert_eq!(ds[0], 0.0);
        assert_eq!(ds[6 * 31 - 1], 2.0);
    }

    #[test]
    fn fig1_grid_spacing() {
        assert!((DELTA_SWEEP.spacing() - 0.005).abs() < 1e-15);
    }

    #[test]
    fn derivative_preset_columns() {
        let t = run_figure("fig4b", Some(21)).unwrap();
        assert_eq!(t.columns, ["T", "delta", "dN1_ddelta"]);
    }

    #[test]
    fn density_preset_is_row_major() {
        let t = run_figure("fig5b", Some(5)).unwrap();
        assert_eq!(t.columns, ["delta", "T", "N1"]);
        assert_eq!(t.rows.len(), 25);
        assert_eq!(t.rows[1][0], t.rows[0][0]);
        assert!(t.rows[1][1] > t.rows[0][1]);
        assert!(t.to_csv().contains("D=1"));
    }

    #[test]
    fn presets_are_byte_identical_on_rerun() {
        for name in ["fig3", "fig6b"] {
            let a = run_figure(name, Some(20)).unwrap().to_csv();
            let b = run_figure(name, Some(20)).unwrap().to_csv();
            assert_eq!(a, b);
        }
    }
}
