use super::{Column, SweepRow};
use crate::error::{Error, Result};

/// One interior strict local maximum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Grid index of the maximum.
    pub index: usize,
    /// Swept-parameter value at the maximum.
    pub location: f64,
    pub height: f64,
    /// Topographic prominence on the sampled grid.
    pub prominence: f64,
    /// Width at `height - prominence / 2`, linearly interpolated, in units of the swept parameter.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub column: Column,
    /// Peaks in ascending location order.
    pub peaks: Vec<Peak>,
}

impl PeakReport {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn max_prominence(&self) -> Option<f64> {
        self.peaks.iter().map(|p| p.prominence).reduce(f64::max)
    }

    /// The most prominent peak; the leftmost one on ties.
    pub fn most_prominent(&self) -> Option<&Peak> {
        self.peaks.iter().reduce(|best, p| {
            if p.prominence > best.prominence {
                p
            } else {
                best
            }
        })
    }
}

/// Peaks of one column of a sweep whose prominence exceeds `min_prominence`.
pub fn find_peaks(rows: &[SweepRow], column: Column, min_prominence: f64) -> Result<PeakReport> {
    let xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.get(column)).collect();
    Ok(PeakReport {
        column,
        peaks: find_peaks_in(&xs, &ys, min_prominence)?,
    })
}

/// Slice form of [`find_peaks`]. `xs` must be monotone (either direction).
pub fn find_peaks_in(xs: &[f64], ys: &[f64], min_prominence: f64) -> Result<Vec<Peak>> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParams(format!(
            "{} locations for {} values",
            xs.len(),
            ys.len()
        )));
    }
    if ys.len() < 3 {
        return Err(Error::InvalidParams(format!(
            "peak detection needs at least 3 rows, got {}",
            ys.len()
        )));
    }
    if min_prominence.is_nan() || min_prominence < 0.0 {
        return Err(Error::InvalidParams(format!(
            "minimum prominence {min_prominence} is negative"
        )));
    }
    if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
        return Err(Error::InvalidParams(format!("non-finite value at row {i}")));
    }

    let n = ys.len();
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        let h = ys[i];
        if !(ys[i - 1] < h && h > ys[i + 1]) {
            continue;
        }
        let (left_base, left_min) = flank(ys, i, (0..i).rev());
        let (right_base, right_min) = flank(ys, i, i + 1..n);
        let prominence = h - left_min.max(right_min);
        if prominence <= min_prominence {
            continue;
        }
        let line = h - prominence / 2.0;
        let left = crossing(xs, ys, line, (left_base..=i).rev());
        let right = crossing(xs, ys, line, i..=right_base);
        peaks.push(Peak {
            index: i,
            location: xs[i],
            height: h,
            prominence,
            width: (right - left).abs(),
        });
    }
    Ok(peaks)
}

/// Walks away from the peak at `i` until a strictly higher sample or the
/// boundary; returns the last index visited and the minimum seen.
fn flank(ys: &[f64], i: usize, walk: impl Iterator<Item = usize>) -> (usize, f64) {
    let mut base = i;
    let mut min = ys[i];
    for j in walk {
        if ys[j] > ys[i] {
            break;
        }
        base = j;
        min = min.min(ys[j]);
    }
    (base, min)
}

/// Location where the curve first drops to `line` while walking away from the
/// peak (the walk starts at the peak itself); falls back to the flank's last index.
fn crossing(xs: &[f64], ys: &[f64], line: f64, walk: impl Iterator<Item = usize>) -> f64 {
    let mut prev: Option<usize> = None;
    let mut last = None;
    for j in walk {
        last = Some(j);
        if let Some(k) = prev {
            // `k` is nearer the peak than `j`
            if ys[j] <= line && ys[k] > line {
                let t = (ys[k] - line) / (ys[k] - ys[j]);
                return xs[k] + t * (xs[j] - xs[k]);
            }
        }
        prev = Some(j);
    }
    last.map_or(f64::NAN, |j| xs[j])
}
