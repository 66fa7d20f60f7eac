//! Scalar summaries of a terminal state: adult sex ratio, multiple-mater
//! fraction and dominant-strategy classification.

use crate::integrator::{Terminal, Trajectory};
use crate::model::State;

/// Dominant-strategy classification of an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Guarding,
    MultipleMating,
    Extinct,
    NonConverged,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Guarding => "guarding",
            Classification::MultipleMating => "multiple-mating",
            Classification::Extinct => "extinct",
            Classification::NonConverged => "non-converged",
        }
    }
}

/// Summary of one finished simulation. `asr` and `mm_fraction` are `None`
/// when undefined (extinction empties the relevant pools).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    pub asr: Option<f64>,
    pub mm_fraction: Option<f64>,
    pub population: f64,
    pub classification: Classification,
    pub terminal_state: State,
    pub terminal_time: f64,
}

/// Adult sex ratio (M + G + F^G) / (F + F^G + F^M); `None` when there are
/// no fertile females.
pub fn asr(s: &State) -> Option<f64> {
    let females = s.receptive + s.pairs + s.unreceptive;
    if females > 0.0 {
        Some((s.maters + s.guarders + s.pairs) / females)
    } else {
        None
    }
}

/// Multiple-mater fraction R = M / (M + G + F^G); `None` when there are no
/// fertile males.
pub fn mm_fraction(s: &State) -> Option<f64> {
    let males = s.maters + s.guarders + s.pairs;
    if males > 0.0 {
        Some(s.maters / males)
    } else {
        None
    }
}

/// Half-width of the knife-edge band around R = 0.5 that is surfaced as
/// non-converged rather than coerced to either strategy.
pub const TIE_BAND: f64 = 1e-6;

/// Classifies a terminal state given how the integration ended.
pub fn classify(terminal: Terminal, s: &State) -> Classification {
    match terminal {
        Terminal::Extinct => Classification::Extinct,
        Terminal::MaxTime => Classification::NonConverged,
        Terminal::Equilibrium => match mm_fraction(s) {
            Some(r) if (r - 0.5).abs() <= TIE_BAND => Classification::NonConverged,
            Some(r) if r < 0.5 => Classification::Guarding,
            Some(_) => Classification::MultipleMating,
            // Equilibrium with no fertile males at all: nothing to classify.
            None => Classification::NonConverged,
        },
    }
}

/// Builds the report for a finished trajectory.
pub fn report(traj: &Trajectory) -> EquilibriumReport {
    let s = *traj.terminal_state();
    let classification = classify(traj.terminal, &s);
    let defined = classification != Classification::Extinct;
    EquilibriumReport {
        asr: if defined { asr(&s) } else { None },
        mm_fraction: if defined { mm_fraction(&s) } else { None },
        population: s.total_population(),
        classification,
        terminal_state: s,
        terminal_time: traj.terminal_time(),
    }
}
