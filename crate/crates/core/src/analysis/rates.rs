use super::errors::{ErrorQuantity, ErrorReport};
use crate::error::{Error, Result};

/// Observed convergence rates of the four error quantities, in the order
/// of [`ErrorQuantity::ALL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRates {
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` for consecutive reports.
    pub pairwise: Vec<[f64; 4]>,
    /// Slope of the least-squares line through `(log h, log e)`.
    pub least_squares: [f64; 4],
}

impl ConvergenceRates {
    pub fn least_squares_of(&self, q: ErrorQuantity) -> f64 {
        self.least_squares[index(q)]
    }
}

fn index(q: ErrorQuantity) -> usize {
    ErrorQuantity::ALL.iter().position(|&x| x == q).expect("listed")
}

/// Rate between two `(h, e)` samples.
pub fn pair_rate(h: (f64, f64), e: (f64, f64)) -> f64 {
    (e.0 / e.1).ln() / (h.0 / h.1).ln()
}

/// Least-squares slope of `log e` against `log h`.
pub fn least_squares_rate(h: &[f64], e: &[f64]) -> Result<f64> {
    check(h, e)?;
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

fn check(h: &[f64], e: &[f64]) -> Result<()> {
    if h.len() != e.len() {
        return Err(Error::DimensionMismatch { what: "error samples", expected: h.len(), found: e.len() });
    }
    if h.len() < 2 {
        return Err(Error::InvalidArgument("rates need at least two levels".into()));
    }
    if h.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("mesh sizes must decrease strictly".into()));
    }
    if h.iter().chain(e).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidArgument("mesh sizes and errors must be positive and finite".into()));
    }
    Ok(())
}

/// Rates of all four quantities over reports ordered from coarse to fine.
pub fn convergence_rates(reports: &[ErrorReport]) -> Result<ConvergenceRates> {
    let h: Vec<f64> = reports.iter().map(|r| r.h).collect();
    let mut least_squares = [0.0; 4];
    for (i, q) in ErrorQuantity::ALL.iter().enumerate() {
        let e: Vec<f64> = reports.iter().map(|r| r.get(*q)).collect();
        least_squares[i] = least_squares_rate(&h, &e)?;
    }
    let pairwise = reports
        .windows(2)
        .map(|w| ErrorQuantity::ALL.map(|q| pair_rate((w[0].h, w[1].h), (w[0].get(q), w[1].get(q)))))
        .collect();
    Ok(ConvergenceRates { pairwise, least_squares })
}
