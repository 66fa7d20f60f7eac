//! Parallel landscape drivers: grid sweeps, the bistability scan, and the
//! strategy-boundary/ASR-contour alignment metric.

use asrsim_core::grid::{
    assemble_grid, cell_coordinates, disagreement_mask, evaluate_cell, GridSpec, LandscapeGrid,
};
use asrsim_core::metrics::EquilibriumReport;
use asrsim_core::sensitivity::{evaluate_sample, sample_matrix, LhsSpec, SampleRecord};
use rayon::prelude::*;

/// Builds a rayon pool with `workers` threads and runs `f` inside it.
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

/// Parallel version of `run_grid`: cells are independent tasks, and the
/// collected vector preserves (row, col) order, so results are deterministic
/// regardless of worker count.
pub fn run_grid_parallel(spec: &GridSpec, workers: usize) -> LandscapeGrid {
    let coords = cell_coordinates(spec);
    let cells = with_pool(workers, || {
        coords
            .par_iter()
            .map(|&(l, t1)| evaluate_cell(spec, l, t1))
            .collect()
    });
    assemble_grid(spec, cells)
}

/// Runs the grid once per initial multiple-mater fraction and marks cells
/// whose classification depends on it.
pub fn bistability_scan(
    spec: &GridSpec,
    r0_values: &[f64],
    workers: usize,
) -> (Vec<LandscapeGrid>, Vec<bool>) {
    let grids: Vec<LandscapeGrid> = r0_values
        .iter()
        .map(|&r0| {
            let mut s = spec.clone();
            s.initial.mm_fraction = r0;
            // A loose stopping threshold lets slowly-excluded cells stop
            // mid-transit, where the classified side still reflects the
            // initial condition — fake bistability. Tighten so such cells
            // come back NonConverged (indecisive) instead.
            s.integration.equilibrium_tol = s.integration.equilibrium_tol.min(1e-7);
            run_grid_parallel(&s, workers)
        })
        .collect();
    let mask = disagreement_mask(&grids);
    (grids, mask)
}

/// Parallel ensemble driver: rows are independent, collection preserves the
/// sample-matrix order.
pub fn run_ensemble_parallel(spec: &LhsSpec, workers: usize) -> Vec<SampleRecord> {
    let matrix = sample_matrix(spec);
    with_pool(workers, || {
        matrix
            .par_iter()
            .map(|row| evaluate_sample(spec, row))
            .collect()
    })
}

/// Median absolute difference between the ASR sampled along the strategy
/// boundary and the closest single constant-ASR level; `None` when the grid
/// has no boundary or no usable vertices.
pub fn boundary_alignment(grid: &LandscapeGrid) -> Option<f64> {
    let asr_field = grid.field(|r: &EquilibriumReport| r.asr);
    let samples: Vec<f64> = grid
        .strategy_boundary
        .iter()
        .flat_map(|pl| pl.points.iter())
        .filter_map(|&(x, y)| asr_field.bilinear(x, y))
        .collect();
    if samples.is_empty() {
        return None;
    }
    grid.asr_contours
        .iter()
        .map(|(level, _)| {
            let mut diffs: Vec<f64> = samples.iter().map(|a| (a - level).abs()).collect();
            diffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = diffs.len();
            if n % 2 == 1 {
                diffs[n / 2]
            } else {
                0.5 * (diffs[n / 2 - 1] + diffs[n / 2])
            }
        })
        .min_by(|a, b| a.partial_cmp(b).unwrap())
}
