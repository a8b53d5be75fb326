//! Distribution utilities: survival curves, the two-sample KS distance used
//! to measure how well rescaled distributions collapse, log-binned
//! percentile summaries and Pearson correlation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig6;

/// Points `(t, P(X > t))` at each distinct sample value `t`, ascending in `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub points: Vec<(f64, f64)>,
}

impl SurvivalCurve {
    /// `P(X > t)` for an arbitrary threshold.
    pub fn eval(&self, t: f64) -> f64 {
        // Index of the last point with threshold <= t.
        let idx = self.points.partition_point(|&(x, _)| x <= t);
        match idx {
            0 => 1.0,
            i => self.points[i - 1].1,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["threshold", "probability"])?;
        for &(t, p) in &self.points {
            w.write_record([sig6(t), sig6(p)])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn survival_curve(values: &[f64]) -> Result<SurvivalCurve> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let v = sorted(values);
    let n = v.len() as f64;
    let mut points = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let t = v[i];
        let mut j = i;
        while j < v.len() && v[j] == t {
            j += 1;
        }
        points.push((t, (v.len() - j) as f64 / n));
        i = j;
    }
    Ok(SurvivalCurve { points })
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_t |F_a(t) - F_b(t)|`.
pub fn collapse_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    // Advance past every copy of the next smallest value in both samples,
    // then compare the ECDFs right after that value.
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Percentile with linear interpolation between order statistics
/// (`h = (n - 1) p`). `sorted` must be ascending and non-empty.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Which central bands [`log_bin`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    /// Mass of the inner band, e.g. 0.25 for the 37.5th-62.5th percentiles.
    pub central: f64,
    /// Mass of the outer band, e.g. 0.90 for the 5th-95th percentiles.
    pub outer: f64,
}

impl BandSpec {
    pub const CENTRAL_25: BandSpec = BandSpec {
        central: 0.25,
        outer: 0.90,
    };
    pub const CENTRAL_50: BandSpec = BandSpec {
        central: 0.50,
        outer: 0.90,
    };

    fn validate(&self) -> Result<()> {
        let ok = |m: f64| m > 0.0 && m <= 1.0;
        if !ok(self.central) || !ok(self.outer) || self.central > self.outer {
            return Err(Error::InvalidArgument(format!(
                "band masses must satisfy 0 < central <= outer <= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for BandSpec {
    fn default() -> Self {
        Self::CENTRAL_25
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
    pub median: f64,
    pub central_band: (f64, f64),
    pub outer_band: (f64, f64),
}

/// Groups points into geometric bins of `bins_per_decade` per factor of ten,
/// starting at the smallest x. The last bin is closed so the largest x is
/// always covered. Empty bins are omitted.
pub fn log_bin(
    points: &[(f64, f64)],
    bins_per_decade: u32,
    bands: BandSpec,
) -> Result<Vec<BinSummary>> {
    if bins_per_decade == 0 {
        return Err(Error::InvalidArgument(
            "bins_per_decade must be >= 1".into(),
        ));
    }
    bands.validate()?;
    if let Some(&(x, _)) = points.iter().find(|(x, _)| *x <= 0.0 || !x.is_finite()) {
        return Err(Error::NonPositiveX(x));
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let per_decade = f64::from(bins_per_decade);
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let n_bins = ((x_max / x_min).log10() * per_decade).ceil().max(1.0) as usize;
    let edge = |k: usize| x_min * 10f64.powf(k as f64 / per_decade);

    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); n_bins];
    for &(x, y) in points {
        let k = ((x / x_min).log10() * per_decade).floor() as usize;
        bins[k.min(n_bins - 1)].push(y);
    }

    let c = (1.0 - bands.central) / 2.0;
    let o = (1.0 - bands.outer) / 2.0;
    Ok(bins
        .into_iter()
        .enumerate()
        .filter(|(_, ys)| !ys.is_empty())
        .map(|(k, ys)| {
            let ys = sorted(&ys);
            let q = |p| percentile_sorted(&ys, p);
            BinSummary {
                x_lo: edge(k),
                x_hi: edge(k + 1),
                n: ys.len(),
                median: q(0.5),
                central_band: (q(c), q(1.0 - c)),
                outer_band: (q(o), q(1.0 - o)),
            }
        })
        .collect())
}

pub fn write_bins_csv<W: Write>(bins: &[BinSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "x_lo", "x_hi", "n", "median", "c_lo", "c_hi", "o_lo", "o_hi",
    ])?;
    for b in bins {
        w.write_record([
            sig6(b.x_lo),
            sig6(b.x_hi),
            b.n.to_string(),
            sig6(b.median),
            sig6(b.central_band.0),
            sig6(b.central_band.1),
            sig6(b.outer_band.0),
            sig6(b.outer_band.1),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Sample Pearson correlation coefficient.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: x.len(),
        });
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::DegenerateVariance);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
