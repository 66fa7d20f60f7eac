//! Spearman partial rank correlation coefficients.
//!
//! Pipeline: rank-transform every column (average ranks on ties), regress
//! the ranked variable and the ranked target on the ranked controls by
//! least squares, and take the Pearson correlation of the two residual
//! vectors. p-values come from the usual t statistic with n - 2 - c
//! degrees of freedom.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;
use thiserror::Error;

use crate::special::t_two_sided_p;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prcc {
    pub coefficient: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrccError {
    #[error("need at least {needed} records, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("column lengths disagree")]
    LengthMismatch,
    #[error("a column is constant across the retained records")]
    DegenerateColumn,
    #[error("control design matrix is rank deficient")]
    RankDeficient,
}

/// Average ranks (1-based) with ties sharing their mean rank.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = mean_rank;
        }
        i = j + 1;
    }
    out
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

// Least-squares residual of `y` against the columns of `design` (which
// includes an intercept). Normal equations + Cholesky; fails on rank
// deficiency.
fn residualize(y: &[f64], design: &[Vec<f64>]) -> Result<Vec<f64>, PrccError> {
    let n = y.len();
    let p = design.len();
    let mut ata = vec![vec![0.0; p]; p];
    let mut atb = vec![0.0; p];
    for i in 0..p {
        for j in i..p {
            let mut s = 0.0;
            for k in 0..n {
                s += design[i][k] * design[j][k];
            }
            ata[i][j] = s;
            ata[j][i] = s;
        }
        let mut s = 0.0;
        for k in 0..n {
            s += design[i][k] * y[k];
        }
        atb[i] = s;
    }
    let coef = cholesky_solve(&mut ata, &mut atb)?;
    let mut res = y.to_vec();
    for (j, c) in coef.iter().enumerate() {
        for k in 0..n {
            res[k] -= c * design[j][k];
        }
    }
    Ok(res)
}

fn cholesky_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>, PrccError> {
    let p = b.len();
    let scale: f64 = (0..p).map(|i| a[i][i]).fold(0.0, f64::max);
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            if i == j {
                if s <= 1e-12 * scale.max(1e-300) {
                    return Err(PrccError::RankDeficient);
                }
                a[i][i] = sqrt(s);
            } else {
                a[i][j] = s / a[j][j];
            }
        }
    }
    // Forward then backward substitution.
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i][k] * b[k];
        }
        b[i] = s / a[i][i];
    }
    for i in (0..p).rev() {
        let mut s = b[i];
        for k in i + 1..p {
            s -= a[k][i] * b[k];
        }
        b[i] = s / a[i][i];
    }
    Ok(b.to_vec())
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / sqrt(sxx * syy)
}

/// Partial rank correlation of `x` with `y` given `controls`.
pub fn partial_rank_correlation(
    x: &[f64],
    y: &[f64],
    controls: &[&[f64]],
) -> Result<Prcc, PrccError> {
    let n = x.len();
    let c = controls.len();
    if y.len() != n || controls.iter().any(|col| col.len() != n) {
        return Err(PrccError::LengthMismatch);
    }
    if n < 3 + c {
        return Err(PrccError::TooFewSamples { needed: 3 + c, got: n });
    }
    if is_constant(x) || is_constant(y) || controls.iter().any(|col| is_constant(col)) {
        return Err(PrccError::DegenerateColumn);
    }

    let rx = ranks(x);
    let ry = ranks(y);
    // Design: intercept plus ranked controls.
    let mut design: Vec<Vec<f64>> = Vec::with_capacity(c + 1);
    design.push(vec![1.0; n]);
    for col in controls {
        design.push(ranks(col));
    }
    let ex = residualize(&rx, &design)?;
    let ey = residualize(&ry, &design)?;
    let r = pearson(&ex, &ey).clamp(-1.0, 1.0);

    let df = (n - 2 - c) as f64;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        t_two_sided_p(r * sqrt(df / (1.0 - r * r)), df)
    };
    Ok(Prcc {
        coefficient: r,
        p_value,
    })
}

/// Verbal strength band for a correlation magnitude.
pub fn strength_label(r: f64) -> &'static str {
    match r.abs() {
        v if v < 0.2 => "very weak",
        v if v < 0.4 => "weak",
        v if v < 0.6 => "moderate",
        v if v < 0.8 => "strong",
        _ => "very strong",
    }
}
