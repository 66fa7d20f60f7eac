//! Latin-hypercube ensemble records and the partial-rank-correlation
//! sensitivity report.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::integrator::{integrate, IntegrationConfig};
use crate::lhs::latin_hypercube;
use crate::metrics::{report, Classification};
use crate::model::{build_initial_state, derive_rates, InitialCondition, ModelParams};
use crate::prcc::{partial_rank_correlation, strength_label, Prcc, PrccError};

/// Per-parameter sampling ranges, in the fixed column order
/// [L, s0, t1, t2, rho, nu, r, g, beta, sigma, k, R0].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterRanges {
    pub longevity: (f64, f64),
    pub juvenile_survival: (f64, f64),
    pub female_fertility_end: (f64, f64),
    pub male_retirement_age: (f64, f64),
    pub birth_rate: (f64, f64),
    pub crowding: (f64, f64),
    pub pairing_rate: (f64, f64),
    pub theft_success: (f64, f64),
    pub breakup_rate: (f64, f64),
    pub return_rate: (f64, f64),
    pub male_risk: (f64, f64),
    pub initial_mm_fraction: (f64, f64),
}

impl Default for ParameterRanges {
    fn default() -> Self {
        ParameterRanges {
            longevity: (10.0, 50.0),
            juvenile_survival: (1.0 / 3.0, 2.0 / 3.0),
            female_fertility_end: (40.0, 55.0),
            male_retirement_age: (60.0, 80.0),
            birth_rate: (0.25, 0.4),
            crowding: (1.0 / 1500.0, 1.0 / 500.0),
            pairing_rate: (0.5, 2.0),
            theft_success: (0.0, 0.225),
            breakup_rate: (0.0, 0.25),
            return_rate: (0.5, 2.0),
            male_risk: (1.0, 1.2),
            initial_mm_fraction: (0.0, 1.0),
        }
    }
}

impl ParameterRanges {
    pub fn as_array(&self) -> [(f64, f64); 12] {
        [
            self.longevity,
            self.juvenile_survival,
            self.female_fertility_end,
            self.male_retirement_age,
            self.birth_rate,
            self.crowding,
            self.pairing_rate,
            self.theft_success,
            self.breakup_rate,
            self.return_rate,
            self.male_risk,
            self.initial_mm_fraction,
        ]
    }
}

/// Sampled-input column names, matching `ParameterRanges::as_array`.
pub const INPUT_NAMES: [&str; 12] = [
    "L", "s0", "t1", "t2", "rho", "nu", "r", "g", "beta", "sigma", "k", "R0",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LhsSpec {
    pub n_samples: usize,
    pub seed: u64,
    pub ranges: ParameterRanges,
    /// Rows with equilibrium ASR outside this open interval are excluded.
    pub asr_filter: (f64, f64),
    /// Head counts of the shared initial condition; its multiple-mater
    /// fraction is overridden by the sampled R0.
    pub initial: InitialCondition,
    pub integration: IntegrationConfig,
}

impl Default for LhsSpec {
    fn default() -> Self {
        LhsSpec {
            n_samples: 10_000,
            seed: 0,
            ranges: ParameterRanges::default(),
            asr_filter: (1.0 / 3.0, 3.0),
            initial: InitialCondition::default(),
            // Only terminal states feed the records; keep trajectories thin.
            // The ensemble reads every sample at a fixed horizon: rows that
            // have not met the equilibrium threshold by t_max stay in the
            // analysis at their final state rather than being discarded.
            // Slow competitive exclusion takes tens of thousands of years in
            // parts of the sampled space, so a converged-only ensemble would
            // silently reweight the sample toward fast-converging corners.
            integration: IntegrationConfig {
                record_stride: 1024,
                equilibrium_tol: 1e-9,
                t_max: 3000.0,
                ..Default::default()
            },
        }
    }
}

/// Why a row was left out of the analysis. Rows that merely fail to meet the
/// equilibrium threshold by the horizon are kept at their final state.
#[derive(Debug, Clone, PartialEq)]
pub enum Exclusion {
    Extinct,
    AsrOutOfRange,
    Failed(String),
}

impl Exclusion {
    pub fn as_str(&self) -> &str {
        match self {
            Exclusion::Extinct => "extinct",
            Exclusion::AsrOutOfRange => "asr-out-of-range",
            Exclusion::Failed(msg) => msg,
        }
    }
}

/// One simulated ensemble row.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    /// Sampled inputs in `INPUT_NAMES` order.
    pub inputs: [f64; 12],
    pub delta: Option<f64>,
    pub mu: Option<f64>,
    pub asr: Option<f64>,
    pub mm_fraction: Option<f64>,
    pub classification: Option<Classification>,
    pub exclusion: Option<Exclusion>,
}

impl SampleRecord {
    pub fn retained(&self) -> bool {
        self.exclusion.is_none()
    }
}

/// Generates the deterministic LHS input matrix for `spec`.
pub fn sample_matrix(spec: &LhsSpec) -> Vec<[f64; 12]> {
    latin_hypercube(spec.n_samples, &spec.ranges.as_array(), spec.seed)
        .into_iter()
        .map(|row| {
            let mut a = [0.0; 12];
            a.copy_from_slice(&row);
            a
        })
        .collect()
}

/// Runs one ensemble row through the simulation pipeline.
pub fn evaluate_sample(spec: &LhsSpec, inputs: &[f64; 12]) -> SampleRecord {
    let params = ModelParams {
        longevity: inputs[0],
        juvenile_survival: inputs[1],
        female_fertility_end: inputs[2],
        male_retirement_age: inputs[3],
        birth_rate: inputs[4],
        crowding: inputs[5],
        pairing_rate: inputs[6],
        theft_success: inputs[7],
        breakup_rate: inputs[8],
        return_rate: inputs[9],
        male_risk: inputs[10],
    };
    let mut record = SampleRecord {
        inputs: *inputs,
        delta: None,
        mu: None,
        asr: None,
        mm_fraction: None,
        classification: None,
        exclusion: None,
    };
    let rates = match derive_rates(&params) {
        Ok(r) => r,
        Err(e) => {
            record.exclusion = Some(Exclusion::Failed(e.to_string()));
            return record;
        }
    };
    record.delta = Some(rates.juvenile_death);
    record.mu = Some(rates.adult_death);
    let ic = InitialCondition {
        mm_fraction: inputs[11],
        ..spec.initial
    };
    let s0 = build_initial_state(&ic, &params);
    let traj = match integrate(&s0, &params, &rates, &spec.integration) {
        Ok(t) => t,
        Err(e) => {
            record.exclusion = Some(Exclusion::Failed(e.to_string()));
            return record;
        }
    };
    let rep = report(&traj);
    record.asr = rep.asr;
    record.mm_fraction = rep.mm_fraction;
    record.classification = Some(rep.classification);
    record.exclusion = match rep.classification {
        Classification::Extinct => Some(Exclusion::Extinct),
        _ => match rep.asr {
            Some(a) if a > spec.asr_filter.0 && a < spec.asr_filter.1 => None,
            _ => Some(Exclusion::AsrOutOfRange),
        },
    };
    record
}

/// Single-threaded reference ensemble driver.
pub fn run_ensemble(spec: &LhsSpec) -> Vec<SampleRecord> {
    sample_matrix(spec)
        .iter()
        .map(|row| evaluate_sample(spec, row))
        .collect()
}

/// Analysis variables: the sampled inputs plus the derived death rates,
/// in the report's row order.
pub const ANALYSIS_VARIABLES: [&str; 14] = [
    "L", "s0", "delta", "mu", "t1", "t2", "rho", "nu", "r", "g", "beta", "sigma", "k", "R0",
];

#[derive(Debug, Clone, PartialEq)]
pub struct VariableReport {
    pub name: &'static str,
    /// PRCC against equilibrium ASR, controlling for all other variables.
    pub asr: Prcc,
    /// PRCC against the multiple-mater fraction R, same controls.
    pub mm: Prcc,
    /// Variants with delta and mu dropped from the control set.
    pub asr_without_death_rates: Prcc,
    pub mm_without_death_rates: Prcc,
}

impl VariableReport {
    pub fn asr_label(&self) -> &'static str {
        strength_label(self.asr.coefficient)
    }

    pub fn mm_label(&self) -> &'static str {
        strength_label(self.mm.coefficient)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub rows: Vec<VariableReport>,
    pub n_total: usize,
    pub n_retained: usize,
    pub n_extinct: usize,
    /// Retained rows read at the horizon without meeting the equilibrium
    /// threshold.
    pub n_non_converged: usize,
    pub n_asr_filtered: usize,
    pub n_failed: usize,
    /// PRCC of the multiple-mater fraction R against ASR, controlling for
    /// (delta, mu).
    pub strategy_vs_asr_basic: Prcc,
    /// Same, controlling additionally for (t1, t2, rho, k).
    pub strategy_vs_asr_extended: Prcc,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no retained records")]
    NoRetainedRecords,
    #[error("{variable}: {source}")]
    Prcc {
        variable: &'static str,
        source: PrccError,
    },
}

/// Builds the full sensitivity report from ensemble records.
pub fn analyze(records: &[SampleRecord]) -> Result<SensitivityReport, AnalysisError> {
    let retained: Vec<&SampleRecord> = records.iter().filter(|r| r.retained()).collect();
    if retained.is_empty() {
        return Err(AnalysisError::NoRetainedRecords);
    }
    let n = retained.len();

    // Column-major table of the 14 analysis variables over retained rows.
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(14);
    let pick = |idx: usize| -> Vec<f64> { retained.iter().map(|r| r.inputs[idx]).collect() };
    columns.push(pick(0)); // L
    columns.push(pick(1)); // s0
    columns.push(retained.iter().map(|r| r.delta.expect("retained")).collect());
    columns.push(retained.iter().map(|r| r.mu.expect("retained")).collect());
    for idx in 2..12 {
        columns.push(pick(idx));
    }
    let asr: Vec<f64> = retained.iter().map(|r| r.asr.expect("retained")).collect();
    let mm: Vec<f64> = retained
        .iter()
        .map(|r| r.mm_fraction.expect("retained"))
        .collect();

    let prcc_against = |target: &[f64],
                        var_idx: usize,
                        skip_death_rates: bool|
     -> Result<Prcc, AnalysisError> {
        let controls: Vec<&[f64]> = columns
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                *i != var_idx && !(skip_death_rates && (*i == 2 || *i == 3))
            })
            .map(|(_, col)| col.as_slice())
            .collect();
        partial_rank_correlation(&columns[var_idx], target, &controls).map_err(|source| {
            AnalysisError::Prcc {
                variable: ANALYSIS_VARIABLES[var_idx],
                source,
            }
        })
    };

    let mut rows = Vec::with_capacity(14);
    for (i, name) in ANALYSIS_VARIABLES.iter().enumerate() {
        rows.push(VariableReport {
            name,
            asr: prcc_against(&asr, i, false)?,
            mm: prcc_against(&mm, i, false)?,
            asr_without_death_rates: prcc_against(&asr, i, true)?,
            mm_without_death_rates: prcc_against(&mm, i, true)?,
        });
    }

    // Headline strategy-vs-ASR correlations.
    let basic_controls: Vec<&[f64]> = vec_controls(&columns, &[2, 3]);
    let strategy_vs_asr_basic = partial_rank_correlation(&mm, &asr, &basic_controls)
        .map_err(|source| AnalysisError::Prcc {
            variable: "R~ASR|delta,mu",
            source,
        })?;
    // delta, mu, t1, t2, rho, k.
    let extended_controls: Vec<&[f64]> = vec_controls(&columns, &[2, 3, 4, 5, 6, 12]);
    let strategy_vs_asr_extended = partial_rank_correlation(&mm, &asr, &extended_controls)
        .map_err(|source| AnalysisError::Prcc {
            variable: "R~ASR|extended",
            source,
        })?;

    let count = |f: &dyn Fn(&SampleRecord) -> bool| records.iter().filter(|r| f(r)).count();
    Ok(SensitivityReport {
        rows,
        n_total: records.len(),
        n_retained: n,
        n_extinct: count(&|r| matches!(r.exclusion, Some(Exclusion::Extinct))),
        n_non_converged: count(&|r| {
            r.retained() && r.classification == Some(Classification::NonConverged)
        }),
        n_asr_filtered: count(&|r| matches!(r.exclusion, Some(Exclusion::AsrOutOfRange))),
        n_failed: count(&|r| matches!(r.exclusion, Some(Exclusion::Failed(_)))),
        strategy_vs_asr_basic,
        strategy_vs_asr_extended,
    })
}

fn vec_controls<'a>(columns: &'a [Vec<f64>], indices: &[usize]) -> Vec<&'a [f64]> {
    indices.iter().map(|&i| columns[i].as_slice()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_matrix_is_deterministic_and_in_range() {
        let spec = LhsSpec {
            n_samples: 50,
            seed: 3,
            ..Default::default()
        };
        let a = sample_matrix(&spec);
        let b = sample_matrix(&spec);
        assert_eq!(a, b);
        let ranges = spec.ranges.as_array();
        for row in &a {
            for (v, (lo, hi)) in row.iter().zip(ranges.iter()) {
                assert!(v >= lo && v <= hi);
            }
        }
    }

    #[test]
    fn near_parity_row_is_retained() {
        // t1 = t2 with k = 1 puts the ASR near 1, comfortably inside the
        // filter window.
        let spec = LhsSpec::default();
        let inputs = [
            30.0, 0.5, 60.0, 60.0, 1.0 / 3.0, 1e-3, 2.0, 0.0, 0.0, 1.0, 1.0, 0.5,
        ];
        let rec = evaluate_sample(&spec, &inputs);
        assert!(rec.retained(), "excluded: {:?}", rec.exclusion);
        let asr = rec.asr.unwrap();
        assert!((asr - 1.0).abs() < 0.05, "asr {asr}");
    }

    #[test]
    fn extinct_row_is_excluded() {
        let spec = LhsSpec::default();
        let inputs = [
            10.0, 0.34, 40.0, 60.0, 0.25, 1e-3, 2.0, 0.0, 0.0, 1.0, 1.2, 0.5,
        ];
        let rec = evaluate_sample(&spec, &inputs);
        assert_eq!(rec.exclusion, Some(Exclusion::Extinct));
        assert!(rec.asr.is_none());
    }
}
