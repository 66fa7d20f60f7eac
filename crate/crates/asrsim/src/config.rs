//! JSON configuration documents for the CLI subcommands.
//!
//! Parsing is strict: unknown keys are rejected so typos surface instead of
//! silently reverting to defaults. Defaults for an empty grid config are the
//! baseline landscape settings (t2=60, k=1, s0=1/2, rho=1/3, nu=1/1000, r=2,
//! sigma=1, R0=0.5, g=0, beta=0). Parameter values are checked against the
//! published ranges unless `allow_out_of_range` is set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use asrsim_core::grid::{default_asr_levels, AxisRange, GridSpec};
use asrsim_core::sensitivity::{LhsSpec, ParameterRanges};
use asrsim_core::{InitialCondition, IntegrationConfig, ModelParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{field} = {value} outside the published range {low} to {high}; set allow_out_of_range to override")]
    OutOfRange {
        field: &'static str,
        value: f64,
        low: String,
        high: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Axis description mirroring [`AxisRange`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisConfig {
    fn to_range(self) -> AxisRange {
        AxisRange::new(self.min, self.max, self.steps)
    }
}

/// Model parameters other than the swept (L, t1) pair; every field is
/// optional and defaults to the baseline landscape value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub longevity: Option<f64>,
    pub juvenile_survival: Option<f64>,
    pub female_fertility_end: Option<f64>,
    pub male_retirement_age: Option<f64>,
    pub birth_rate: Option<f64>,
    pub crowding: Option<f64>,
    pub pairing_rate: Option<f64>,
    pub theft_success: Option<f64>,
    pub breakup_rate: Option<f64>,
    pub return_rate: Option<f64>,
    pub male_risk: Option<f64>,
}

impl ParamsConfig {
    pub fn resolve(&self) -> ModelParams {
        let d = ModelParams::default();
        ModelParams {
            longevity: self.longevity.unwrap_or(d.longevity),
            juvenile_survival: self.juvenile_survival.unwrap_or(d.juvenile_survival),
            female_fertility_end: self.female_fertility_end.unwrap_or(d.female_fertility_end),
            male_retirement_age: self.male_retirement_age.unwrap_or(d.male_retirement_age),
            birth_rate: self.birth_rate.unwrap_or(d.birth_rate),
            crowding: self.crowding.unwrap_or(d.crowding),
            pairing_rate: self.pairing_rate.unwrap_or(d.pairing_rate),
            theft_success: self.theft_success.unwrap_or(d.theft_success),
            breakup_rate: self.breakup_rate.unwrap_or(d.breakup_rate),
            return_rate: self.return_rate.unwrap_or(d.return_rate),
            male_risk: self.male_risk.unwrap_or(d.male_risk),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub adult_females: Option<f64>,
    pub adult_males: Option<f64>,
    pub mm_fraction: Option<f64>,
    pub juveniles: Option<f64>,
}

impl InitialConfig {
    pub fn resolve(&self) -> InitialCondition {
        let d = InitialCondition::default();
        InitialCondition {
            adult_females: self.adult_females.unwrap_or(d.adult_females),
            adult_males: self.adult_males.unwrap_or(d.adult_males),
            mm_fraction: self.mm_fraction.unwrap_or(d.mm_fraction),
            juveniles: self.juveniles.unwrap_or(d.juveniles),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub t_max: Option<f64>,
    pub equilibrium_tol: Option<f64>,
    pub extinction_threshold: Option<f64>,
    pub max_steps: Option<u64>,
    pub record_stride: Option<u64>,
}

impl IntegrationOverrides {
    pub fn resolve(&self, base: IntegrationConfig) -> IntegrationConfig {
        IntegrationConfig {
            rel_tol: self.rel_tol.unwrap_or(base.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(base.abs_tol),
            t_max: self.t_max.unwrap_or(base.t_max),
            equilibrium_tol: self.equilibrium_tol.unwrap_or(base.equilibrium_tol),
            extinction_threshold: self
                .extinction_threshold
                .unwrap_or(base.extinction_threshold),
            max_steps: self.max_steps.unwrap_or(base.max_steps),
            record_stride: self.record_stride.unwrap_or(base.record_stride),
        }
    }
}

/// Config document for the `grid` subcommand (and the bistability scan when
/// several `r0_values` are given).
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub longevity_axis: Option<AxisConfig>,
    pub fertility_end_axis: Option<AxisConfig>,
    pub params: ParamsConfig,
    pub initial: InitialConfig,
    pub integration: IntegrationOverrides,
    pub asr_levels: Option<Vec<f64>>,
    /// More than one value turns the run into a bistability scan.
    pub r0_values: Option<Vec<f64>>,
    pub output_dir: Option<String>,
    pub workers: Option<usize>,
    pub allow_out_of_range: bool,
    /// Fail the whole run (exit 3) on any cell error instead of recording it.
    pub strict: bool,
}

impl GridConfig {
    pub fn resolve(&self) -> Result<GridSpec, ConfigError> {
        let base = self.params.resolve();
        if !self.allow_out_of_range {
            check_param_ranges(&base)?;
        }
        let defaults = GridSpec::default_axes(base.clone());
        let mut spec = GridSpec {
            longevity_axis: self
                .longevity_axis
                .map(AxisConfig::to_range)
                .unwrap_or(defaults.longevity_axis),
            fertility_end_axis: self
                .fertility_end_axis
                .map(AxisConfig::to_range)
                .unwrap_or(defaults.fertility_end_axis),
            base,
            initial: self.initial.resolve(),
            integration: self.integration.resolve(defaults.integration),
            asr_levels: self
                .asr_levels
                .clone()
                .unwrap_or_else(default_asr_levels),
        };
        if let Some(r0) = self.r0_values.as_ref().and_then(|v| v.first()) {
            spec.initial.mm_fraction = *r0;
        }
        if spec.longevity_axis.steps < 2 || spec.fertility_end_axis.steps < 2 {
            return Err(ConfigError::Invalid(
                "each axis needs at least 2 steps".into(),
            ));
        }
        Ok(spec)
    }
}

/// Config document for the `run` subcommand: one simulation at one point.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub initial: InitialConfig,
    pub integration: IntegrationOverrides,
    pub output_dir: Option<String>,
    pub allow_out_of_range: bool,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<(ModelParams, InitialCondition, IntegrationConfig), ConfigError>
    {
        let params = self.params.resolve();
        if !self.allow_out_of_range {
            check_param_ranges(&params)?;
        }
        Ok((
            params,
            self.initial.resolve(),
            self.integration.resolve(IntegrationConfig::default()),
        ))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RangesConfig {
    pub longevity: Option<(f64, f64)>,
    pub juvenile_survival: Option<(f64, f64)>,
    pub female_fertility_end: Option<(f64, f64)>,
    pub male_retirement_age: Option<(f64, f64)>,
    pub birth_rate: Option<(f64, f64)>,
    pub crowding: Option<(f64, f64)>,
    pub pairing_rate: Option<(f64, f64)>,
    pub theft_success: Option<(f64, f64)>,
    pub breakup_rate: Option<(f64, f64)>,
    pub return_rate: Option<(f64, f64)>,
    pub male_risk: Option<(f64, f64)>,
    pub initial_mm_fraction: Option<(f64, f64)>,
}

impl RangesConfig {
    pub fn resolve(&self) -> ParameterRanges {
        let d = ParameterRanges::default();
        ParameterRanges {
            longevity: self.longevity.unwrap_or(d.longevity),
            juvenile_survival: self.juvenile_survival.unwrap_or(d.juvenile_survival),
            female_fertility_end: self
                .female_fertility_end
                .unwrap_or(d.female_fertility_end),
            male_retirement_age: self.male_retirement_age.unwrap_or(d.male_retirement_age),
            birth_rate: self.birth_rate.unwrap_or(d.birth_rate),
            crowding: self.crowding.unwrap_or(d.crowding),
            pairing_rate: self.pairing_rate.unwrap_or(d.pairing_rate),
            theft_success: self.theft_success.unwrap_or(d.theft_success),
            breakup_rate: self.breakup_rate.unwrap_or(d.breakup_rate),
            return_rate: self.return_rate.unwrap_or(d.return_rate),
            male_risk: self.male_risk.unwrap_or(d.male_risk),
            initial_mm_fraction: self.initial_mm_fraction.unwrap_or(d.initial_mm_fraction),
        }
    }
}

/// Config document for the `lhs` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LhsConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub ranges: RangesConfig,
    pub initial: InitialConfig,
    pub integration: IntegrationOverrides,
    pub output_dir: Option<String>,
    pub workers: Option<usize>,
}

impl Default for LhsConfig {
    fn default() -> Self {
        let d = LhsSpec::default();
        LhsConfig {
            n_samples: d.n_samples,
            seed: d.seed,
            ranges: RangesConfig::default(),
            initial: InitialConfig::default(),
            integration: IntegrationOverrides::default(),
            output_dir: None,
            workers: None,
        }
    }
}

impl LhsConfig {
    pub fn resolve(&self) -> Result<LhsSpec, ConfigError> {
        if self.n_samples < 10 {
            return Err(ConfigError::Invalid(format!(
                "n_samples must be at least 10, got {}",
                self.n_samples
            )));
        }
        let d = LhsSpec::default();
        Ok(LhsSpec {
            n_samples: self.n_samples,
            seed: self.seed,
            ranges: self.ranges.resolve(),
            asr_filter: d.asr_filter,
            initial: self.initial.resolve(),
            integration: self.integration.resolve(d.integration),
        })
    }
}

macro_rules! check_range {
    ($field:expr, $name:literal, $low:expr, $high:expr, $low_str:literal, $high_str:literal) => {
        if $field < $low || $field > $high {
            return Err(ConfigError::OutOfRange {
                field: $name,
                value: $field,
                low: $low_str.into(),
                high: $high_str.into(),
            });
        }
    };
}

/// Published parameter ranges; values outside them are rejected unless the
/// config sets `allow_out_of_range`.
pub fn check_param_ranges(p: &ModelParams) -> Result<(), ConfigError> {
    check_range!(p.longevity, "longevity (L)", 10.0, 50.0, "10", "50");
    check_range!(
        p.juvenile_survival,
        "juvenile_survival (s0)",
        1.0 / 3.0,
        2.0 / 3.0,
        "1/3",
        "2/3"
    );
    check_range!(
        p.female_fertility_end,
        "female_fertility_end (t1)",
        30.0,
        60.0,
        "30",
        "60"
    );
    check_range!(
        p.male_retirement_age,
        "male_retirement_age (t2)",
        60.0,
        80.0,
        "60",
        "80"
    );
    check_range!(p.birth_rate, "birth_rate (rho)", 0.25, 0.4, "1/4", "1/2.5");
    check_range!(
        p.crowding,
        "crowding (nu)",
        1.0 / 1500.0,
        1.0 / 500.0,
        "1/1500",
        "1/500"
    );
    check_range!(p.pairing_rate, "pairing_rate (r)", 0.5, 2.0, "0.5", "2");
    check_range!(p.theft_success, "theft_success (g)", 0.0, 0.225, "0", "0.225");
    check_range!(p.breakup_rate, "breakup_rate (beta)", 0.0, 0.25, "0", "1/4");
    check_range!(p.return_rate, "return_rate (sigma)", 0.5, 2.0, "0.5", "2");
    check_range!(p.male_risk, "male_risk (k)", 1.0, 1.2, "1", "1.2");
    Ok(())
}

pub fn parse_grid_config(doc: &str) -> Result<GridConfig, ConfigError> {
    Ok(serde_json::from_str(doc)?)
}

pub fn parse_run_config(doc: &str) -> Result<RunConfig, ConfigError> {
    Ok(serde_json::from_str(doc)?)
}

pub fn parse_lhs_config(doc: &str) -> Result<LhsConfig, ConfigError> {
    Ok(serde_json::from_str(doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_config_gives_baseline_defaults() {
        let cfg = parse_grid_config("{}").unwrap();
        let spec = cfg.resolve().unwrap();
        assert_eq!(spec.base.male_retirement_age, 60.0);
        assert_eq!(spec.base.male_risk, 1.0);
        assert_eq!(spec.base.juvenile_survival, 0.5);
        assert!((spec.base.birth_rate - 1.0 / 3.0).abs() < 1e-15);
        assert!((spec.base.crowding - 1e-3).abs() < 1e-18);
        assert_eq!(spec.base.pairing_rate, 2.0);
        assert_eq!(spec.base.return_rate, 1.0);
        assert_eq!(spec.base.theft_success, 0.0);
        assert_eq!(spec.base.breakup_rate, 0.0);
        assert_eq!(spec.initial.mm_fraction, 0.5);
        assert_eq!(spec.longevity_axis.steps, 41);
        assert_eq!(spec.fertility_end_axis.steps, 31);
    }

    #[test]
    fn unknown_key_is_named_in_the_error() {
        let err = parse_grid_config(r#"{"foo": 1}"#).unwrap_err();
        assert!(err.to_string().contains("foo"), "{err}");
    }

    #[test]
    fn out_of_range_survival_cites_the_bound() {
        let cfg = parse_grid_config(r#"{"params": {"juvenile_survival": 0.9}}"#).unwrap();
        let err = cfg.resolve().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("1/3") && msg.contains("2/3"), "{msg}");
    }

    #[test]
    fn out_of_range_accepted_with_override() {
        let cfg = parse_grid_config(
            r#"{"params": {"juvenile_survival": 0.9}, "allow_out_of_range": true}"#,
        )
        .unwrap();
        assert!(cfg.resolve().is_ok());
    }

    #[test]
    fn integration_overrides_apply() {
        let cfg = parse_grid_config(r#"{"integration": {"t_max": 123.0}}"#).unwrap();
        let spec = cfg.resolve().unwrap();
        assert_eq!(spec.integration.t_max, 123.0);
        // Untouched fields keep the grid defaults.
        assert_eq!(spec.integration.record_stride, 1024);
    }
}
