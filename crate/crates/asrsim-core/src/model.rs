//! Parameters, compartment state and the right-hand side of the
//! seven-compartment mating-strategy ODE system.

use thiserror::Error;

use crate::life_history::{self, SolveError};

/// Full parameter vector for one simulation.
///
/// Time is measured in years throughout; compartment contents are continuous
/// head counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Mean female longevity L (expected time in the population), years.
    pub longevity: f64,
    /// Proportion s0 surviving to the mean maturity age t0 = L/2.
    pub juvenile_survival: f64,
    /// Age t1 at which female fertility ends, years.
    pub female_fertility_end: f64,
    /// Age t2 of male retirement, years.
    pub male_retirement_age: f64,
    /// Birth rate rho of bonded/unreceptive females, births per female-year.
    pub birth_rate: f64,
    /// Crowding factor nu for density-dependent mortality, per head.
    pub crowding: f64,
    /// Couple-forming (recruitment) rate r, per possible pair per year.
    pub pairing_rate: f64,
    /// Paternity theft success rate g in [0, 1].
    pub theft_success: f64,
    /// Spontaneous pair-bond break-up rate beta, per pair per year.
    pub breakup_rate: f64,
    /// Return rate sigma of unreceptive females, per female per year.
    pub return_rate: f64,
    /// Male death-rate modifier k.
    pub male_risk: f64,
}

impl Default for ModelParams {
    /// Landscape baseline settings with a hunter-gatherer-like (L, t1).
    fn default() -> Self {
        ModelParams {
            longevity: 30.0,
            juvenile_survival: 0.5,
            female_fertility_end: 45.0,
            male_retirement_age: 60.0,
            birth_rate: 1.0 / 3.0,
            crowding: 1.0 / 1000.0,
            pairing_rate: 2.0,
            theft_success: 0.0,
            breakup_rate: 0.0,
            return_rate: 1.0,
            male_risk: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("juvenile_survival must lie in (0, 1), got {0}")]
    SurvivalOutOfRange(f64),
    #[error("theft_success must lie in [0, 1], got {0}")]
    TheftOutOfRange(f64),
    #[error("breakup_rate must be nonnegative, got {0}")]
    NegativeBreakup(f64),
    #[error("{name} = {value} must exceed half the longevity ({half_l})")]
    RetirementBeforeMaturity {
        name: &'static str,
        value: f64,
        half_l: f64,
    },
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let positive = [
            ("longevity", self.longevity),
            ("birth_rate", self.birth_rate),
            ("crowding", self.crowding),
            ("pairing_rate", self.pairing_rate),
            ("return_rate", self.return_rate),
            ("male_risk", self.male_risk),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        if !(self.juvenile_survival > 0.0 && self.juvenile_survival < 1.0) {
            return Err(ParamError::SurvivalOutOfRange(self.juvenile_survival));
        }
        if !(0.0..=1.0).contains(&self.theft_success) {
            return Err(ParamError::TheftOutOfRange(self.theft_success));
        }
        if !(self.breakup_rate >= 0.0) {
            return Err(ParamError::NegativeBreakup(self.breakup_rate));
        }
        let half_l = self.longevity / 2.0;
        if !(self.female_fertility_end > half_l) {
            return Err(ParamError::RetirementBeforeMaturity {
                name: "female_fertility_end",
                value: self.female_fertility_end,
                half_l,
            });
        }
        if !(self.male_retirement_age > half_l) {
            return Err(ParamError::RetirementBeforeMaturity {
                name: "male_retirement_age",
                value: self.male_retirement_age,
                half_l,
            });
        }
        Ok(())
    }
}

/// Base rates recovered from the life-history inputs; the coefficients of
/// the ODE system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Maturation rate gamma = 2/L, 1/years.
    pub maturation: f64,
    /// Base juvenile death rate delta, 1/years.
    pub juvenile_death: f64,
    /// Base adult death rate mu, 1/years.
    pub adult_death: f64,
    /// Female retirement rate tau = 2/(2 t1 - L), 1/years.
    pub female_retirement: f64,
    /// Male retirement rate lambda = 2/(2 t2 - L), 1/years.
    pub male_retirement: f64,
    /// Mean maturity age t0 = L/2, years.
    pub maturity_age: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Computes (gamma, delta, mu, tau, lambda, t0) from the life-history inputs.
///
/// delta and mu are obtained numerically so that the survivorship curve
/// matches the requested longevity and juvenile survival.
pub fn derive_rates(p: &ModelParams) -> Result<DerivedRates, RateError> {
    p.validate()?;
    let l = p.longevity;
    let (delta, mu) = life_history::solve_delta_mu(l, p.juvenile_survival)?;
    Ok(DerivedRates {
        maturation: 2.0 / l,
        juvenile_death: delta,
        adult_death: mu,
        female_retirement: 2.0 / (2.0 * p.female_fertility_end - l),
        male_retirement: 2.0 / (2.0 * p.male_retirement_age - l),
        maturity_age: l / 2.0,
    })
}

/// The seven compartments. `pairs` is counted in pairs; it contributes two
/// heads to the total population.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    /// Receptive fertile females F.
    pub receptive: f64,
    /// Searching (guarding) males G.
    pub guarders: f64,
    /// Multiple-mating males M.
    pub maters: f64,
    /// Guarded pairs F^G.
    pub pairs: f64,
    /// Unreceptive females F^M.
    pub unreceptive: f64,
    /// Guarded offspring C^G.
    pub guarded_young: f64,
    /// Unguarded offspring C^M.
    pub unguarded_young: f64,
}

impl State {
    pub const DIM: usize = 7;

    pub fn to_array(self) -> [f64; 7] {
        [
            self.receptive,
            self.guarders,
            self.maters,
            self.pairs,
            self.unreceptive,
            self.guarded_young,
            self.unguarded_young,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        State {
            receptive: a[0],
            guarders: a[1],
            maters: a[2],
            pairs: a[3],
            unreceptive: a[4],
            guarded_young: a[5],
            unguarded_young: a[6],
        }
    }

    /// Total population P, with each guarded pair counted as two heads.
    pub fn total_population(&self) -> f64 {
        self.receptive
            + self.guarders
            + self.maters
            + 2.0 * self.pairs
            + self.unreceptive
            + self.guarded_young
            + self.unguarded_young
    }

    /// Fertile adults F + G + M + 2 F^G + F^M; drives the extinction test.
    pub fn fertile_adults(&self) -> f64 {
        self.receptive + self.guarders + self.maters + 2.0 * self.pairs + self.unreceptive
    }

    pub fn is_nonnegative(&self) -> bool {
        self.to_array().iter().all(|&v| v >= 0.0)
    }
}

/// Time derivative of [`State`], same layout.
pub type StateDerivative = State;

/// The right-hand side of the seven-equation system.
///
/// The paternity-theft fraction g M/(M + F^G) is taken to be 0 when
/// M + F^G = 0: with no males in line for paternity there is no theft, which
/// removes the 0/0 singularity.
pub fn rhs(s: &State, p: &ModelParams, d: &DerivedRates) -> StateDerivative {
    let pop = s.total_population();
    let female_death = d.adult_death * (1.0 + p.crowding * pop);
    let male_death = d.adult_death * (p.male_risk + p.crowding * pop);
    let young_death = d.juvenile_death * (1.0 + p.crowding * pop);

    let in_line = s.maters + s.pairs;
    let theft = if in_line > 0.0 {
        p.theft_success * s.maters / in_line
    } else {
        0.0
    };

    let half_mature = 0.5 * d.maturation;
    let recruit_f = p.pairing_rate * (s.guarders + s.maters);

    State {
        receptive: half_mature * (s.guarded_young + s.unguarded_young)
            + (p.breakup_rate + d.male_retirement + male_death) * s.pairs
            + p.return_rate * s.unreceptive
            - (recruit_f + d.female_retirement + female_death) * s.receptive,
        guarders: half_mature * s.guarded_young
            + (p.breakup_rate + d.female_retirement + female_death) * s.pairs
            - (p.pairing_rate * s.receptive + d.male_retirement + male_death) * s.guarders,
        maters: half_mature * s.unguarded_young - (d.male_retirement + male_death) * s.maters,
        pairs: p.pairing_rate * s.receptive * s.guarders
            - (p.breakup_rate
                + d.female_retirement
                + d.male_retirement
                + d.adult_death * (1.0 + p.male_risk + 2.0 * p.crowding * pop))
                * s.pairs,
        unreceptive: p.pairing_rate * s.receptive * s.maters
            - (p.return_rate + d.female_retirement + female_death) * s.unreceptive,
        guarded_young: p.birth_rate * (1.0 - theft) * s.pairs
            - (d.maturation + young_death) * s.guarded_young,
        unguarded_young: p.birth_rate * (s.unreceptive + theft * s.pairs)
            - (d.maturation + young_death) * s.unguarded_young,
    }
}

/// Initial-condition parameterization used by landscapes and ensembles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    /// Receptive adult females F(0).
    pub adult_females: f64,
    /// Total adult males G(0) + M(0).
    pub adult_males: f64,
    /// Initial multiple-mater fraction R0 = M(0)/(M(0)+G(0)+F^G(0)).
    pub mm_fraction: f64,
    /// Total juveniles C^G(0) + C^M(0).
    pub juveniles: f64,
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition {
            adult_females: 500.0,
            adult_males: 500.0,
            mm_fraction: 0.5,
            juveniles: 1000.0,
        }
    }
}

/// Builds the starting state: males split by R0, juveniles split in
/// proportion to the male structure with a (1 -+ g) theft adjustment, then
/// rescaled so the juvenile total is preserved.
pub fn build_initial_state(ic: &InitialCondition, p: &ModelParams) -> State {
    let r0 = ic.mm_fraction;
    let guarded_w = (1.0 - r0) * (1.0 - p.theft_success);
    let unguarded_w = r0 * (1.0 + p.theft_success);
    let wsum = guarded_w + unguarded_w;
    let (cg, cm) = if wsum > 0.0 {
        (
            ic.juveniles * guarded_w / wsum,
            ic.juveniles * unguarded_w / wsum,
        )
    } else {
        // Both weights vanish only for g = 1 with R0 = 0; fall back to the
        // unadjusted male-structure split.
        (ic.juveniles * (1.0 - r0), ic.juveniles * r0)
    };
    State {
        receptive: ic.adult_females,
        guarders: ic.adult_males * (1.0 - r0),
        maters: ic.adult_males * r0,
        pairs: 0.0,
        unreceptive: 0.0,
        guarded_young: cg,
        unguarded_young: cm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn derive_rates_reference_point() {
        let p = ModelParams {
            longevity: 40.0,
            juvenile_survival: 0.5,
            female_fertility_end: 45.0,
            male_retirement_age: 60.0,
            ..Default::default()
        };
        let d = derive_rates(&p).unwrap();
        assert_eq!(d.maturation, 0.05);
        assert_eq!(d.maturity_age, 20.0);
        assert!(close(d.female_retirement, 1.0 / 25.0, 1e-15));
        assert!(close(d.male_retirement, 1.0 / 40.0, 1e-15));
        // Plug back into the constraint system.
        let sp = crate::life_history::SurvivorshipParams {
            maturation: d.maturation,
            juvenile_death: d.juvenile_death,
            adult_death: d.adult_death,
        };
        let s = crate::life_history::survivorship(d.maturity_age, &sp).unwrap();
        assert!(close(s.total, 0.5, 1e-10));
        assert!(close(
            crate::life_history::expected_lifespan(&sp),
            40.0,
            1e-10 * 40.0
        ));
    }

    #[test]
    fn derive_rates_direct_retirement_formulas() {
        let p = ModelParams {
            longevity: 30.0,
            juvenile_survival: 0.5,
            female_fertility_end: 45.0,
            male_retirement_age: 75.0,
            ..Default::default()
        };
        let d = derive_rates(&p).unwrap();
        assert!(close(d.female_retirement, 1.0 / 30.0, 1e-15));
        assert!(close(d.male_retirement, 1.0 / 60.0, 1e-15));
    }

    #[test]
    fn derive_rates_rejects_early_retirement() {
        let p = ModelParams {
            longevity: 40.0,
            female_fertility_end: 20.0,
            ..Default::default()
        };
        assert!(matches!(
            derive_rates(&p),
            Err(RateError::Params(ParamError::RetirementBeforeMaturity { .. }))
        ));
    }

    #[test]
    fn zero_state_is_fixed_point() {
        let p = ModelParams::default();
        let d = derive_rates(&p).unwrap();
        let dot = rhs(&State::default(), &p, &d);
        assert_eq!(dot, State::default());
    }

    #[test]
    fn multiple_mater_subsystem_absorbing_at_zero() {
        let p = ModelParams {
            theft_success: 0.0,
            ..Default::default()
        };
        let d = derive_rates(&p).unwrap();
        let s = State {
            receptive: 120.0,
            guarders: 60.0,
            maters: 0.0,
            pairs: 30.0,
            unreceptive: 0.0,
            guarded_young: 200.0,
            unguarded_young: 0.0,
        };
        let dot = rhs(&s, &p, &d);
        assert_eq!(dot.maters, 0.0);
        assert_eq!(dot.unreceptive, 0.0);
        assert_eq!(dot.unguarded_young, 0.0);
    }

    // Independent term-by-term transcription of the equation system, kept
    // deliberately separate from `rhs` as its oracle.
    fn rhs_oracle(s: &State, p: &ModelParams, d: &DerivedRates) -> [f64; 7] {
        let (f, g, m, fg, fm, cg, cm) = (
            s.receptive,
            s.guarders,
            s.maters,
            s.pairs,
            s.unreceptive,
            s.guarded_young,
            s.unguarded_young,
        );
        let (gamma, delta, mu, tau, lambda) = (
            d.maturation,
            d.juvenile_death,
            d.adult_death,
            d.female_retirement,
            d.male_retirement,
        );
        let (rho, nu, r, gg, beta, sigma, k) = (
            p.birth_rate,
            p.crowding,
            p.pairing_rate,
            p.theft_success,
            p.breakup_rate,
            p.return_rate,
            p.male_risk,
        );
        let pop = f + g + m + 2.0 * fg + fm + cg + cm;
        let theta = if m + fg > 0.0 { gg * m / (m + fg) } else { 0.0 };
        [
            0.5 * gamma * (cg + cm) + (beta + lambda + mu * (k + nu * pop)) * fg + sigma * fm
                - (r * (g + m) + tau + mu * (1.0 + nu * pop)) * f,
            0.5 * gamma * cg + (beta + tau + mu * (1.0 + nu * pop)) * fg
                - (r * f + lambda + mu * (k + nu * pop)) * g,
            0.5 * gamma * cm - (lambda + mu * (k + nu * pop)) * m,
            r * f * g - (beta + tau + lambda + mu * (1.0 + k + 2.0 * nu * pop)) * fg,
            r * f * m - (sigma + tau + mu * (1.0 + nu * pop)) * fm,
            rho * (1.0 - theta) * fg - (gamma + delta * (1.0 + nu * pop)) * cg,
            rho * (fm + theta * fg) - (gamma + delta * (1.0 + nu * pop)) * cm,
        ]
    }

    #[test]
    fn rhs_matches_independent_transcription() {
        let p = ModelParams {
            longevity: 32.0,
            juvenile_survival: 0.45,
            female_fertility_end: 48.0,
            male_retirement_age: 70.0,
            birth_rate: 0.35,
            crowding: 1.0 / 800.0,
            pairing_rate: 1.5,
            theft_success: 0.1,
            breakup_rate: 1.0 / 16.0,
            return_rate: 1.2,
            male_risk: 1.1,
        };
        let d = derive_rates(&p).unwrap();
        let s = State {
            receptive: 213.0,
            guarders: 87.5,
            maters: 140.25,
            pairs: 66.0,
            unreceptive: 48.0,
            guarded_young: 310.0,
            unguarded_young: 295.0,
        };
        let got = rhs(&s, &p, &d).to_array();
        let want = rhs_oracle(&s, &p, &d);
        for i in 0..7 {
            let scale = want[i].abs().max(1.0);
            assert!(
                (got[i] - want[i]).abs() <= 1e-12 * scale,
                "component {i}: {} vs {}",
                got[i],
                want[i]
            );
        }
    }

    #[test]
    fn rhs_is_pure() {
        let p = ModelParams::default();
        let d = derive_rates(&p).unwrap();
        let s = State {
            receptive: 10.0,
            guarders: 5.0,
            maters: 3.0,
            pairs: 2.0,
            unreceptive: 1.0,
            guarded_young: 7.0,
            unguarded_young: 4.0,
        };
        assert_eq!(rhs(&s, &p, &d).to_array(), rhs(&s, &p, &d).to_array());
    }

    #[test]
    fn initial_state_paper_values_no_theft() {
        let p = ModelParams {
            theft_success: 0.0,
            ..Default::default()
        };
        let ic = InitialCondition::default();
        let s = build_initial_state(&ic, &p);
        assert_eq!(s.receptive, 500.0);
        assert_eq!(s.guarders, 250.0);
        assert_eq!(s.maters, 250.0);
        assert_eq!(s.pairs, 0.0);
        assert_eq!(s.unreceptive, 0.0);
        assert_eq!(s.guarded_young, 500.0);
        assert_eq!(s.unguarded_young, 500.0);
    }

    #[test]
    fn initial_state_theft_ratio() {
        let p = ModelParams {
            theft_success: 0.1,
            ..Default::default()
        };
        let s = build_initial_state(&InitialCondition::default(), &p);
        // 500(1-g) : 500(1+g) at R0 = 0.5.
        assert!(close(s.guarded_young / s.unguarded_young, 0.9 / 1.1, 1e-14));
        assert!(close(s.guarded_young + s.unguarded_young, 1000.0, 1e-12));
    }

    #[test]
    fn initial_state_all_maters() {
        let p = ModelParams::default();
        let ic = InitialCondition {
            mm_fraction: 1.0,
            ..Default::default()
        };
        let s = build_initial_state(&ic, &p);
        assert_eq!(s.guarders, 0.0);
        assert_eq!(s.guarded_young, 0.0);
        assert_eq!(s.maters, 500.0);
        assert_eq!(s.unguarded_young, 1000.0);
    }
}
