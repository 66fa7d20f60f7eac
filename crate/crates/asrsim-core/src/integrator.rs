//! Adaptive time integration of the compartment system to a classified
//! terminal condition.
//!
//! Dormand-Prince 5(4) embedded pair with standard step-size control, plus
//! two rules specific to this model: components that dip barely below zero
//! after an accepted step are clamped to zero, and steps producing a
//! component below `-abs_tol` are rejected and halved. Termination is
//! classified as equilibrium (scaled derivative norm), extinction (fertile
//! adults below threshold) or time-out.

use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{rhs, DerivedRates, ModelParams, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Relative local error tolerance.
    pub rel_tol: f64,
    /// Absolute local error tolerance, head counts.
    pub abs_tol: f64,
    /// Integration horizon, years.
    pub t_max: f64,
    /// Equilibrium threshold on ||rhs||_inf / (1 + ||state||_inf), 1/years.
    pub equilibrium_tol: f64,
    /// Fertile-adult head count below which the population is extinct.
    pub extinction_threshold: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: u64,
    /// Record every n-th accepted step (the initial and terminal states are
    /// always recorded). Bounds trajectory memory on long runs.
    pub record_stride: u64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        // The horizon and equilibrium threshold are sized for the slow
        // competitive-exclusion mode near the strategy boundary (rates down
        // to ~1e-4/yr): a much tighter threshold leaves wide bands of the
        // landscape timing out instead of classifying.
        IntegrationConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            t_max: 20_000.0,
            equilibrium_tol: 1e-5,
            extinction_threshold: 1.0,
            max_steps: 5_000_000,
            record_stride: 1,
        }
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// Scaled derivative norm fell below `equilibrium_tol`.
    Equilibrium,
    /// Fertile adults fell below `extinction_threshold`.
    Extinct,
    /// Reached `t_max` without meeting either condition.
    MaxTime,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub terminal: Terminal,
}

impl Trajectory {
    pub fn terminal_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn terminal_state(&self) -> &State {
        self.states.last().expect("trajectory is never empty")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("step size underflow at t = {t} (state {state:?})")]
    StepSizeUnderflow { t: f64, state: [f64; 7] },
    #[error("exceeded {0} steps")]
    MaxStepsExceeded(u64),
}

const MIN_STEP: f64 = 1e-12;

// Dormand-Prince 5(4) Butcher tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order solution weights (row 7 of A is the solution itself: FSAL pair).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Embedded 4th-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn inf_norm(v: &[f64; 7]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn check_terminal(s: &State, p: &ModelParams, d: &DerivedRates, cfg: &IntegrationConfig) -> Option<Terminal> {
    let dot = rhs(s, p, d).to_array();
    let scaled = inf_norm(&dot) / (1.0 + inf_norm(&s.to_array()));
    if scaled < cfg.equilibrium_tol {
        return Some(Terminal::Equilibrium);
    }
    if s.fertile_adults() < cfg.extinction_threshold {
        return Some(Terminal::Extinct);
    }
    None
}

/// Integrates from `s0` until equilibrium, extinction or `t_max`.
pub fn integrate(
    s0: &State,
    p: &ModelParams,
    d: &DerivedRates,
    cfg: &IntegrationConfig,
) -> Result<Trajectory, IntegrateError> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    times.push(0.0);
    states.push(*s0);

    if let Some(terminal) = check_terminal(s0, p, d, cfg) {
        return Ok(Trajectory {
            times,
            states,
            terminal,
        });
    }

    let mut t = 0.0;
    let mut y = s0.to_array();
    let mut h = 1e-3_f64.min(cfg.t_max);
    let mut steps: u64 = 0;
    let mut accepted: u64 = 0;
    let mut k = [[0.0_f64; 7]; 7];

    loop {
        if steps >= cfg.max_steps {
            return Err(IntegrateError::MaxStepsExceeded(cfg.max_steps));
        }
        steps += 1;
        if h < MIN_STEP {
            return Err(IntegrateError::StepSizeUnderflow { t, state: y });
        }
        if t + h > cfg.t_max {
            h = cfg.t_max - t;
        }

        k[0] = rhs(&State::from_array(y), p, d).to_array();
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..7 {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage + 1] = rhs(&State::from_array(ys), p, d).to_array();
        }

        let mut y5 = y;
        let mut err_norm: f64 = 0.0;
        let mut err = [0.0_f64; 7];
        for i in 0..7 {
            let mut dy5 = 0.0;
            let mut dy4 = 0.0;
            for s in 0..7 {
                dy5 += B5[s] * k[s][i];
                dy4 += B4[s] * k[s][i];
            }
            y5[i] += h * dy5;
            err[i] = h * (dy5 - dy4);
        }
        for i in 0..7 {
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y5[i].abs());
            err_norm = err_norm.max((err[i] / scale).abs());
        }

        let hard_negative = y5.iter().any(|&v| v < -cfg.abs_tol);
        if hard_negative {
            h *= 0.5;
            continue;
        }
        if err_norm > 1.0 {
            let shrink = 0.9 * libm::pow(err_norm, -0.2);
            h *= shrink.max(0.2);
            continue;
        }

        // Accepted: clamp harmless negative round-off to the boundary.
        for v in y5.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        t += h;
        y = y5;
        accepted += 1;
        let state = State::from_array(y);
        let terminal = check_terminal(&state, p, d, cfg);
        let done = terminal.is_some() || t >= cfg.t_max;
        if done || accepted % cfg.record_stride.max(1) == 0 {
            times.push(t);
            states.push(state);
        }
        if done {
            return Ok(Trajectory {
                times,
                states,
                terminal: terminal.unwrap_or(Terminal::MaxTime),
            });
        }

        let grow = if err_norm > 0.0 {
            (0.9 * libm::pow(err_norm, -0.2)).min(5.0)
        } else {
            5.0
        };
        h *= grow.max(0.2);
    }
}
