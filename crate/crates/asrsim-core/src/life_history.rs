//! Closed-form survivorship of the juvenile/adult age-structure reduction,
//! and numerical recovery of the base death rates (delta, mu) from
//! (longevity L, juvenile survival s0).
//!
//! The reduction tracks a cohort through juvenile decay at rate delta+gamma
//! (death plus maturation) and adult decay at rate mu. Its survivorship
//! S(t) and expected lifespan have closed forms, which the solver inverts.

use alloc::format;
use alloc::string::String;

use libm::exp;
use thiserror::Error;

use crate::root;

/// Rates of the survivorship reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivorshipParams {
    /// Maturation rate gamma, 1/years.
    pub maturation: f64,
    /// Juvenile death rate delta, 1/years.
    pub juvenile_death: f64,
    /// Adult death rate mu, 1/years.
    pub adult_death: f64,
}

/// Probabilities at age t for one individual starting as a juvenile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Survivorship {
    /// Still alive and juvenile, C(t).
    pub juvenile: f64,
    /// Alive and matured, A(t).
    pub adult: f64,
    /// Alive at all, S(t) = C(t) + A(t).
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LifeHistoryError {
    #[error("age must be nonnegative, got {0}")]
    NegativeAge(f64),
}

/// Evaluates C(t), A(t) and S(t) = C + A for a cohort of initial size 1.
///
/// C(t) = exp(-(delta+gamma) t). A(t) uses the two-exponential form, or its
/// analytic limit gamma t exp(-mu t) when delta+gamma is within relative
/// 1e-12 of mu, where the two-exponential form cancels catastrophically.
pub fn survivorship(
    t: f64,
    sp: &SurvivorshipParams,
) -> Result<Survivorship, LifeHistoryError> {
    if t < 0.0 {
        return Err(LifeHistoryError::NegativeAge(t));
    }
    let decay = sp.juvenile_death + sp.maturation;
    let juvenile = exp(-decay * t);
    let gap = decay - sp.adult_death;
    let adult = if gap.abs() < 1e-12 * (decay + sp.adult_death) {
        sp.maturation * t * exp(-sp.adult_death * t)
    } else {
        sp.maturation * (exp(-sp.adult_death * t) - juvenile) / gap
    };
    Ok(Survivorship {
        juvenile,
        adult,
        total: juvenile + adult,
    })
}

/// Expected time lived in the population: (gamma + mu)/(mu (delta + gamma)),
/// the integral of S(t) over all ages.
pub fn expected_lifespan(sp: &SurvivorshipParams) -> f64 {
    (sp.maturation + sp.adult_death)
        / (sp.adult_death * (sp.juvenile_death + sp.maturation))
}

/// Male life expectancy at birth under adult death rate k mu.
pub fn male_lifespan(sp: &SurvivorshipParams, risk: f64) -> f64 {
    let km = risk * sp.adult_death;
    (sp.maturation + km) / (km * (sp.juvenile_death + sp.maturation))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("inputs out of domain: longevity {longevity}, survival {survival}")]
    BadInputs { longevity: f64, survival: f64 },
    #[error("no (delta, mu) solution for longevity {longevity}, survival {survival}; searched {bracket}")]
    NoSolution {
        longevity: f64,
        survival: f64,
        bracket: String,
    },
}

/// Recovers (delta, mu) such that S(L/2) = s0 and the expected lifespan
/// equals L, with gamma = 2/L.
///
/// The lifespan constraint is eliminated in closed form,
/// delta(mu) = (gamma + mu)/(mu L) - gamma, which is positive exactly for
/// mu in (0, gamma). The survival constraint then becomes a 1-D root find
/// in mu, bracketed by a geometric scan and polished by Brent.
pub fn solve_delta_mu(longevity: f64, survival: f64) -> Result<(f64, f64), SolveError> {
    if !(longevity > 0.0) || !(survival > 0.0 && survival < 1.0) {
        return Err(SolveError::BadInputs {
            longevity,
            survival,
        });
    }
    let gamma = 2.0 / longevity;
    let t0 = longevity / 2.0;
    let delta_of = |mu: f64| (gamma + mu) / (mu * longevity) - gamma;
    let residual = |mu: f64| {
        let sp = SurvivorshipParams {
            maturation: gamma,
            juvenile_death: delta_of(mu),
            adult_death: mu,
        };
        survivorship(t0, &sp).expect("t0 >= 0").total - survival
    };

    // S(t0) runs from 0 (mu -> 0, delta -> inf) up to 2/e (mu -> gamma,
    // delta -> 0), so a sign change exists for any s0 below 2/e. Scan a
    // geometric grid of mu for the bracket.
    let lo_frac = 1e-9;
    let hi_frac = 1.0 - 1e-12;
    let n_scan = 128;
    let mut prev_mu = gamma * lo_frac;
    let mut prev_res = residual(prev_mu);
    let mut bracket = None;
    for i in 1..=n_scan {
        let frac = lo_frac * libm::pow(hi_frac / lo_frac, i as f64 / n_scan as f64);
        let mu = gamma * frac;
        let res = residual(mu);
        if prev_res == 0.0 {
            bracket = Some((prev_mu, prev_mu));
            break;
        }
        if res == 0.0 || res.signum() != prev_res.signum() {
            bracket = Some((prev_mu, mu));
            break;
        }
        prev_mu = mu;
        prev_res = res;
    }
    let (lo, hi) = bracket.ok_or_else(|| SolveError::NoSolution {
        longevity,
        survival,
        bracket: format!("mu in [{:e}, {:e}]", gamma * lo_frac, gamma * hi_frac),
    })?;
    let mu = if lo == hi {
        lo
    } else {
        root::brent(residual, lo, hi, 200).ok_or_else(|| SolveError::NoSolution {
            longevity,
            survival,
            bracket: format!("mu in [{lo:e}, {hi:e}]"),
        })?
    };
    let delta = delta_of(mu);
    if !(mu > 0.0) || !(delta > 0.0) {
        return Err(SolveError::NoSolution {
            longevity,
            survival,
            bracket: format!("solved mu {mu:e}, delta {delta:e} not positive"),
        });
    }
    Ok((delta, mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SP: SurvivorshipParams = SurvivorshipParams {
        maturation: 0.05,
        juvenile_death: 0.03,
        adult_death: 0.02,
    };

    #[test]
    fn survivorship_initial_conditions() {
        let s = survivorship(0.0, &SP).unwrap();
        assert_eq!(s.juvenile, 1.0);
        assert_eq!(s.adult, 0.0);
        assert_eq!(s.total, 1.0);
    }

    #[test]
    fn survivorship_rejects_negative_age() {
        assert!(survivorship(-1.0, &SP).is_err());
    }

    #[test]
    fn survivorship_long_time_limits() {
        // S -> 0 and A/S -> 1 as t grows, in the delta+gamma > mu regime.
        let s = survivorship(2000.0, &SP).unwrap();
        assert!(s.total < 1e-10);
        let s = survivorship(400.0, &SP).unwrap();
        assert!(s.adult / s.total > 1.0 - 1e-10);
    }

    #[test]
    fn degenerate_branch_is_continuous() {
        // delta+gamma == mu exactly hits the analytic-limit branch.
        let sp_eq = SurvivorshipParams {
            maturation: 0.05,
            juvenile_death: 0.03,
            adult_death: 0.08,
        };
        // Perturbation chosen outside the analytic-limit band but small
        // enough that the two-exponential form has not fully lost precision
        // to cancellation (~1e-8 relative error at this separation).
        let sp_near = SurvivorshipParams {
            adult_death: 0.08 * (1.0 + 1e-7),
            ..sp_eq
        };
        for t in [1.0, 10.0, 50.0] {
            let a = survivorship(t, &sp_eq).unwrap().adult;
            let b = survivorship(t, &sp_near).unwrap().adult;
            assert!((a - b).abs() < 1e-5 * a.max(b));
        }
    }

    #[test]
    fn expected_lifespan_formula() {
        // (0.05+0.02)/(0.02*0.08) = 43.75
        assert!((expected_lifespan(&SP) - 43.75).abs() < 1e-12);
        // delta == mu collapses to 1/mu.
        let sp = SurvivorshipParams {
            maturation: 0.1,
            juvenile_death: 0.04,
            adult_death: 0.04,
        };
        assert!((expected_lifespan(&sp) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn male_lifespan_values() {
        assert_eq!(male_lifespan(&SP, 1.0), expected_lifespan(&SP));
        // (0.05+0.024)/(0.024*0.08)
        assert!((male_lifespan(&SP, 1.2) - 38.541666666666664).abs() < 1e-12);
        // Strictly decreasing in the risk factor.
        let mut prev = male_lifespan(&SP, 0.5);
        for k in [0.8, 1.0, 1.5, 2.0, 5.0] {
            let cur = male_lifespan(&SP, k);
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn solver_residuals_on_grid() {
        for i in 0..5 {
            for j in 0..5 {
                let l = 10.0 + 10.0 * i as f64;
                let s0 = 1.0 / 3.0 + (1.0 / 3.0) * j as f64 / 4.0;
                let (delta, mu) = solve_delta_mu(l, s0).unwrap();
                let sp = SurvivorshipParams {
                    maturation: 2.0 / l,
                    juvenile_death: delta,
                    adult_death: mu,
                };
                let s = survivorship(l / 2.0, &sp).unwrap();
                assert!(
                    (s.total - s0).abs() <= 1e-10,
                    "survival residual at L={l}, s0={s0}: {}",
                    (s.total - s0).abs()
                );
                assert!(
                    (expected_lifespan(&sp) - l).abs() <= 1e-10 * l,
                    "lifespan residual at L={l}, s0={s0}"
                );
            }
        }
    }

    #[test]
    fn solver_rejects_infeasible_survival() {
        // S(t0) cannot exceed 2/e ~ 0.7358 for any positive delta.
        assert!(matches!(
            solve_delta_mu(30.0, 0.74),
            Err(SolveError::NoSolution { .. })
        ));
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        assert!(solve_delta_mu(-1.0, 0.5).is_err());
        assert!(solve_delta_mu(30.0, 1.5).is_err());
    }
}
