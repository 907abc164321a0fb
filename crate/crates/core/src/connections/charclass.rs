use alloc::vec::Vec;

use super::connection::{curvature, Connection};
use crate::forms::{trace, wedge, MatrixForm, MixedForm};
use crate::quadrature::bernoulli_numbers;
use crate::{Result, C64, CURVATURE_NORMALIZATION};

/// Which multiplicative or additive series to evaluate on `Ω = (i/2π) R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `tr exp Ω`.
    ChernCharacter,
    /// `exp tr log td(Ω)` with `td(x) = x / (1 − e^{−x})`.
    Todd,
    /// `tr Ω^l` alone.
    TracePower(usize),
}

/// A characteristic series truncated at a form degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharSeries {
    pub kind: SeriesKind,
    /// Highest form degree kept; `None` keeps everything up to the grid dimension.
    pub truncation_degree: Option<usize>,
}

impl CharSeries {
    pub fn new(kind: SeriesKind) -> Self {
        Self { kind, truncation_degree: None }
    }

    pub fn evaluate(&self, c: &Connection) -> Result<MixedForm> {
        let mut out = match self.kind {
            SeriesKind::ChernCharacter => chern_character(c)?,
            SeriesKind::Todd => todd_form(c)?,
            SeriesKind::TracePower(l) => {
                MixedForm::from_part(char_power(c, l)?.scale(CURVATURE_NORMALIZATION.powu(l as u32)))
            }
        };
        if let Some(t) = self.truncation_degree {
            for p in (t + 1)..out.parts().len() {
                let zero = MatrixForm::zeros(out.grid().clone(), p, 1);
                out.set_part(zero)?;
            }
        }
        Ok(out)
    }
}

/// Matrix powers `Ω, Ω², …` of the normalised curvature while their degree
/// fits the grid.
fn omega_powers(c: &Connection) -> Result<Vec<MatrixForm>> {
    let dim = c.grid().dim();
    let omega = curvature(c)?.scale(CURVATURE_NORMALIZATION);
    let mut powers = Vec::new();
    if dim < 2 {
        return Ok(powers);
    }
    powers.push(omega.clone());
    while 2 * (powers.len() + 1) <= dim {
        let next = wedge(powers.last().expect("non-empty"), &omega)?;
        powers.push(next);
    }
    Ok(powers)
}

/// `tr(R ∧ ⋯ ∧ R)` with `l` factors and no normalisation; the zero form of
/// degree `2l` when that exceeds the grid dimension.
pub fn char_power(c: &Connection, l: usize) -> Result<MatrixForm> {
    assert!(l >= 1, "trace powers start at l = 1");
    let r = curvature(c)?;
    if 2 * l > c.grid().dim() {
        return Ok(MatrixForm::zeros(c.grid().clone(), 2 * l, 1));
    }
    let mut p = r.clone();
    for _ in 1..l {
        p = wedge(&p, &r)?;
    }
    Ok(trace(&p))
}

/// `ch = Σ_k tr(Ω^k) / k!`, truncated at the grid dimension.
pub fn chern_character(c: &Connection) -> Result<MixedForm> {
    let grid = c.grid().clone();
    let mut out = MixedForm::zeros(grid.clone(), 1);
    out.set_part(MatrixForm::constant(grid, C64::new(c.rank() as f64, 0.0)))?;
    let mut factorial = 1.0;
    for (i, p) in omega_powers(c)?.iter().enumerate() {
        let k = i + 1;
        factorial *= k as f64;
        out.set_part(trace(p).scale(C64::new(1.0 / factorial, 0.0)))?;
    }
    Ok(out)
}

/// Coefficients `c_n` of `log td(x) = Σ c_n x^n`, `c_n = −B_n / (n · n!)`.
pub fn log_todd_coefficients(count: usize) -> Vec<f64> {
    let b = bernoulli_numbers(count);
    let mut factorial = 1.0;
    (1..=count)
        .map(|n| {
            factorial *= n as f64;
            -b[n] / (n as f64 * factorial)
        })
        .collect()
}

/// `exp(y)` for a scalar mixed form with vanishing degree-0 part.
pub fn mixed_exp(y: &MixedForm) -> Result<MixedForm> {
    let grid = y.grid().clone();
    let dim = grid.dim();
    let mut out = MixedForm::zeros(grid.clone(), 1);
    out.set_part(MatrixForm::constant(grid, C64::new(1.0, 0.0)))?;
    let mut term = out.clone();
    for k in 1..=dim {
        term = term.wedge(y)?.scale(C64::new(1.0 / k as f64, 0.0));
        if term.max_norm() == 0.0 {
            break;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Todd form `exp(Σ_n c_n tr Ω^n)`, truncated at the grid dimension.
pub fn todd_form(c: &Connection) -> Result<MixedForm> {
    let grid = c.grid().clone();
    let powers = omega_powers(c)?;
    let coeffs = log_todd_coefficients(powers.len().max(1));
    let mut log_td = MixedForm::zeros(grid, 1);
    for (i, p) in powers.iter().enumerate() {
        log_td.set_part(trace(p).scale(C64::new(coeffs[i], 0.0)))?;
    }
    mixed_exp(&log_td)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_todd_series_matches_hand_expansion() {
        let c = log_todd_coefficients(4);
        assert_relative_eq!(c[0], 0.5);
        assert_relative_eq!(c[1], -1.0 / 24.0, epsilon = 1e-16);
        assert_relative_eq!(c[2], 0.0);
        assert_relative_eq!(c[3], 1.0 / 2880.0, epsilon = 1e-17);
    }

    #[test]
    fn todd_series_exponentiates_to_x_over_one_minus_exp() {
        // Scalar check of the series at a small number.
        let x: f64 = 0.3;
        let c = log_todd_coefficients(12);
        let log: f64 = c.iter().enumerate().map(|(i, ci)| ci * x.powi(i as i32 + 1)).sum();
        assert_relative_eq!(log.exp(), x / (1.0 - (-x).exp()), epsilon = 1e-14);
    }
}
