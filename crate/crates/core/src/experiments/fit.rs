use serde::Serialize;

use super::table::Table;
use crate::error::{Error, Result};

/// Least-squares fit `y = a + b ln(x + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    /// Euclidean norm of the residual vector.
    pub residual: f64,
}

pub fn fit_log(table: &Table, x: &str, y: &str) -> Result<LogFit> {
    let xs = table.column(x)?;
    let ys = table.column(y)?;
    fit_log_points(&xs, &ys)
}

pub fn fit_log_points(xs: &[f64], ys: &[f64]) -> Result<LogFit> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} abscissae for {} ordinates", xs.len(), ys.len())));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidParameter(format!("a log fit needs at least 3 points, got {}", xs.len())));
    }
    if xs.iter().any(|&x| !(x > -1.0)) {
        return Err(Error::InvalidParameter("log fit abscissae must exceed -1".into()));
    }
    let u: Vec<f64> = xs.iter().map(|x| x.ln_1p()).collect();
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|v| (v - mu).powi(2)).sum();
    let suy: f64 = u.iter().zip(ys).map(|(v, w)| (v - mu) * (w - my)).sum();
    if !(suu > 1e-14 * n * (1.0 + mu * mu)) {
        return Err(Error::InvalidParameter("log fit grid is degenerate".into()));
    }
    let b = suy / suu;
    let a = my - b * mu;
    let residual = u.iter().zip(ys).map(|(v, w)| (w - a - b * v).powi(2)).sum::<f64>().sqrt();
    Ok(LogFit { a, b, residual })
}
