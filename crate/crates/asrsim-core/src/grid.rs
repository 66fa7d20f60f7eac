//! (L, t1)-landscape grids: per-cell simulation pipeline, contour
//! attachment and the bistability disagreement mask.
//!
//! Cell evaluation is a pure function of the spec, so a driver may compute
//! cells in any order (or in parallel) and write them to pre-assigned
//! slots; the stored ordering is always row-major by (t1 row, L column).

use alloc::string::ToString;
use alloc::string::String;
use alloc::vec::Vec;

use crate::contour::{extract_contours, extract_level, Polyline, ScalarField};
use crate::integrator::{integrate, IntegrationConfig};
use crate::metrics::{report, Classification, EquilibriumReport};
use crate::model::{build_initial_state, derive_rates, InitialCondition, ModelParams};

/// Inclusive range sampled at `steps` equally spaced values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        assert!(steps >= 2, "axis needs at least 2 steps");
        assert!(max > min);
        AxisRange { min, max, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| {
                self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
            })
            .collect()
    }
}

/// Everything needed to produce one landscape.
///
/// `base` supplies every parameter except longevity and female fertility
/// end, which are overwritten per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub longevity_axis: AxisRange,
    pub fertility_end_axis: AxisRange,
    pub base: ModelParams,
    pub initial: InitialCondition,
    pub integration: IntegrationConfig,
    /// ASR levels for contour extraction.
    pub asr_levels: Vec<f64>,
}

/// Default contour levels: 0.2 steps across the plausible ASR span.
pub fn default_asr_levels() -> Vec<f64> {
    (1..=15).map(|i| i as f64 * 0.2).collect()
}

impl GridSpec {
    /// 41 x 31 default lattice over L in [10, 50], t1 in [30, 60].
    pub fn default_axes(base: ModelParams) -> Self {
        GridSpec {
            longevity_axis: AxisRange::new(10.0, 50.0, 41),
            fertility_end_axis: AxisRange::new(30.0, 60.0, 31),
            base,
            initial: InitialCondition::default(),
            // Only terminal states feed the landscape; keep trajectories thin.
            integration: IntegrationConfig {
                record_stride: 1024,
                ..Default::default()
            },
            asr_levels: default_asr_levels(),
        }
    }

    pub fn params_at(&self, longevity: f64, fertility_end: f64) -> ModelParams {
        ModelParams {
            longevity,
            female_fertility_end: fertility_end,
            ..self.base
        }
    }
}

/// What happened in one cell. Errors are recorded here rather than aborting
/// the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Simulated(EquilibriumReport),
    /// Cell violates t1 > L/2 and was not simulated.
    Invalid,
    Failed(String),
}

impl CellOutcome {
    pub fn classification(&self) -> Option<Classification> {
        match self {
            CellOutcome::Simulated(r) => Some(r.classification),
            _ => None,
        }
    }

    pub fn report(&self) -> Option<&EquilibriumReport> {
        match self {
            CellOutcome::Simulated(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub longevity: f64,
    pub fertility_end: f64,
    pub outcome: CellOutcome,
}

/// A populated landscape with its extracted contours.
#[derive(Debug, Clone)]
pub struct LandscapeGrid {
    pub longevity_values: Vec<f64>,
    pub fertility_end_values: Vec<f64>,
    /// Row-major by (t1 row, L column).
    pub cells: Vec<Cell>,
    /// (level, polylines) pairs over the converged-ASR field.
    pub asr_contours: Vec<(f64, Vec<Polyline>)>,
    /// R = 0.5 level set of the converged multiple-mater-fraction field.
    pub strategy_boundary: Vec<Polyline>,
}

impl LandscapeGrid {
    pub fn n_cols(&self) -> usize {
        self.longevity_values.len()
    }

    pub fn n_rows(&self) -> usize {
        self.fertility_end_values.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row * self.n_cols() + col]
    }

    /// Converged-cell scalar field; extinct, non-converged, invalid and
    /// failed cells are masked out.
    pub fn field<F: Fn(&EquilibriumReport) -> Option<f64>>(&self, pick: F) -> ScalarField {
        let values = self
            .cells
            .iter()
            .map(|c| match &c.outcome {
                CellOutcome::Simulated(r)
                    if matches!(
                        r.classification,
                        Classification::Guarding | Classification::MultipleMating
                    ) =>
                {
                    pick(r)
                }
                _ => None,
            })
            .collect();
        ScalarField::new(
            self.longevity_values.clone(),
            self.fertility_end_values.clone(),
            values,
        )
    }

    pub fn count(&self, class: Classification) -> usize {
        self.cells
            .iter()
            .filter(|c| c.outcome.classification() == Some(class))
            .count()
    }

    /// Cell whose (L, t1) centre is nearest to the query point.
    pub fn nearest_cell(&self, longevity: f64, fertility_end: f64) -> &Cell {
        self.cells
            .iter()
            .min_by(|a, b| {
                let sq = |c: &Cell| {
                    let dl = c.longevity - longevity;
                    let dt = c.fertility_end - fertility_end;
                    dl * dl + dt * dt
                };
                sq(a).partial_cmp(&sq(b)).unwrap()
            })
            .expect("grid has cells")
    }
}

/// Runs the full pipeline for one cell.
pub fn evaluate_cell(spec: &GridSpec, longevity: f64, fertility_end: f64) -> Cell {
    let outcome = if fertility_end <= longevity / 2.0 {
        CellOutcome::Invalid
    } else {
        let params = spec.params_at(longevity, fertility_end);
        match derive_rates(&params) {
            Err(e) => CellOutcome::Failed(e.to_string()),
            Ok(rates) => {
                let s0 = build_initial_state(&spec.initial, &params);
                match integrate(&s0, &params, &rates, &spec.integration) {
                    Err(e) => CellOutcome::Failed(e.to_string()),
                    Ok(traj) => CellOutcome::Simulated(report(&traj)),
                }
            }
        }
    };
    Cell {
        longevity,
        fertility_end,
        outcome,
    }
}

/// Cell coordinates in row-major order, matching `LandscapeGrid::cells`.
pub fn cell_coordinates(spec: &GridSpec) -> Vec<(f64, f64)> {
    let ls = spec.longevity_axis.values();
    let t1s = spec.fertility_end_axis.values();
    let mut out = Vec::with_capacity(ls.len() * t1s.len());
    for t1 in &t1s {
        for l in &ls {
            out.push((*l, *t1));
        }
    }
    out
}

/// Assembles a landscape from cells computed elsewhere (possibly in
/// parallel) in the order given by [`cell_coordinates`].
pub fn assemble_grid(spec: &GridSpec, cells: Vec<Cell>) -> LandscapeGrid {
    let longevity_values = spec.longevity_axis.values();
    let fertility_end_values = spec.fertility_end_axis.values();
    assert_eq!(cells.len(), longevity_values.len() * fertility_end_values.len());
    let mut grid = LandscapeGrid {
        longevity_values,
        fertility_end_values,
        cells,
        asr_contours: Vec::new(),
        strategy_boundary: Vec::new(),
    };
    let asr_field = grid.field(|r| r.asr);
    grid.asr_contours = extract_contours(&asr_field, &spec.asr_levels);
    let mm_field = grid.field(|r| r.mm_fraction);
    grid.strategy_boundary = extract_level(&mm_field, 0.5);
    grid
}

/// Single-threaded reference driver.
pub fn run_grid(spec: &GridSpec) -> LandscapeGrid {
    let cells = cell_coordinates(spec)
        .into_iter()
        .map(|(l, t1)| evaluate_cell(spec, l, t1))
        .collect();
    assemble_grid(spec, cells)
}

/// Marks cells whose classification differs across the per-R0 grids.
/// All grids must share the same axes.
///
/// Only decisive outcomes (guarding / multiple-mating / extinct) count:
/// a NonConverged, invalid, or failed cell says nothing about which
/// attractor the cell belongs to, so it can neither agree nor disagree.
pub fn disagreement_mask(grids: &[LandscapeGrid]) -> Vec<bool> {
    let decisive = |g: &LandscapeGrid, i: usize| match g.cells[i].outcome.classification() {
        Some(Classification::NonConverged) | None => None,
        other => other,
    };
    let Some(first) = grids.first() else {
        return Vec::new();
    };
    (0..first.cells.len())
        .map(|i| {
            let Some(c0) = decisive(first, i) else {
                return false;
            };
            grids[1..]
                .iter()
                .any(|g| decisive(g, i).is_some_and(|c| c != c0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_are_inclusive_and_even() {
        let v = AxisRange::new(10.0, 50.0, 41).values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 10.0);
        assert_eq!(v[40], 50.0);
        assert!((v[1] - 11.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_cells_are_marked_not_simulated() {
        let spec = GridSpec::default_axes(ModelParams::default());
        let cell = evaluate_cell(&spec, 50.0, 20.0);
        assert_eq!(cell.outcome, CellOutcome::Invalid);
    }

    #[test]
    fn small_grid_runs_and_assembles() {
        let mut spec = GridSpec::default_axes(ModelParams::default());
        spec.longevity_axis = AxisRange::new(25.0, 35.0, 2);
        spec.fertility_end_axis = AxisRange::new(40.0, 50.0, 2);
        let grid = run_grid(&spec);
        assert_eq!(grid.cells.len(), 4);
        assert_eq!(grid.n_cols(), 2);
        assert_eq!(grid.n_rows(), 2);
        for cell in &grid.cells {
            assert!(matches!(cell.outcome, CellOutcome::Simulated(_)));
        }
    }

    #[test]
    fn disagreement_mask_trivial_cases() {
        let mut spec = GridSpec::default_axes(ModelParams::default());
        spec.longevity_axis = AxisRange::new(25.0, 35.0, 2);
        spec.fertility_end_axis = AxisRange::new(40.0, 50.0, 2);
        let grid = run_grid(&spec);
        // A single grid never disagrees with itself.
        assert!(disagreement_mask(core::slice::from_ref(&grid))
            .iter()
            .all(|&b| !b));
        let twin = grid.clone();
        assert!(disagreement_mask(&[grid, twin]).iter().all(|&b| !b));
    }
}
