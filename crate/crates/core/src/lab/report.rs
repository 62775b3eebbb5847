//! Convergence tables, log-log rate fits and their serialized forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::KahlerConventions;
use crate::symbol::Symbol;

/// Gaps at or below this are treated as exact and left out of fits.
pub const MACHINE_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: u32,
    pub hbar: f64,
    pub measured: f64,
    pub reference: f64,
    pub gap: f64,
}

impl ConvergenceRow {
    /// Row with `gap = |measured - reference|`.
    pub fn new(m: u32, measured: f64, reference: f64) -> Self {
        Self::with_gap(m, measured, reference, (measured - reference).abs())
    }

    /// Row whose gap is a separately measured defect.
    pub fn with_gap(m: u32, measured: f64, reference: f64, gap: f64) -> Self {
        Self {
            m,
            hbar: 1.0 / m as f64,
            measured,
            reference,
            gap,
        }
    }
}

/// Least-squares line through `(log m, log gap)`.
///
/// `slope` is the decay exponent `p` of `gap ≈ K m^{-p}` (the negated
/// regression coefficient) and `intercept` is `log K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    pub window: Vec<u32>,
}

pub fn fit_rate(rows: &[ConvergenceRow], window: &[u32]) -> Result<RateFit> {
    let used: Vec<&ConvergenceRow> = rows
        .iter()
        .filter(|r| window.contains(&r.m) && r.gap > MACHINE_FLOOR)
        .collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable rows in the window, need at least 3",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let xs: Vec<f64> = used.iter().map(|r| (r.m as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|r| r.gap.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("window contains a single level".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(RateFit {
        slope: -b,
        intercept: a,
        r_squared,
        window: used.iter().map(|r| r.m).collect(),
    })
}

/// Upper half of a level list.
pub fn default_window(levels: &[u32]) -> Vec<u32> {
    levels[levels.len() / 2..].to_vec()
}

/// `max m^order · gap` over the window.
pub fn k_estimate(rows: &[ConvergenceRow], window: &[u32], order: i32) -> Option<f64> {
    rows.iter()
        .filter(|r| window.contains(&r.m))
        .map(|r| (r.m as f64).powi(order) * r.gap)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub experiment: String,
    pub f: Symbol,
    pub g: Option<Symbol>,
    pub conventions: KahlerConventions,
    pub rows: Vec<ConvergenceRow>,
    pub fit: Option<RateFit>,
    #[serde(rename = "K_estimate")]
    pub k_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x0: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is infallible");
        s.push('\n');
        s
    }

    /// `m,hbar,measured,reference,gap` with shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,hbar,measured,reference,gap\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:?},{:?},{:?},{:?}\n", r.m, r.hbar, r.measured, r.reference, r.gap));
        }
        out
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gap).collect()
    }
}
