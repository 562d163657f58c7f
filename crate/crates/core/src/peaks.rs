//! Peak detection on one period `[-pi, pi)` of a periodic profile.
//!
//! Samples come from a uniform grid; maxima are refined by a parabola through
//! the three bracketing samples and the width is bisected on the continuous
//! profile at half prominence.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid accepted by the detector.
pub const MIN_GRID: usize = 256;

/// Profiles with `max - min <= UNIFORM_SPREAD * |max|` are flat.
pub const UNIFORM_SPREAD: f64 = 1e-9;

const BISECTION_STEPS: usize = 64;

/// One absorption maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Position in `[-pi, pi)`.
    pub kappa_x: f64,
    pub height: f64,
    /// Height above the higher of the two surrounding minima.
    pub prominence: f64,
    /// Full width at half prominence, `None` when the level is not crossed.
    pub fwhm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    /// Ascending in `kappa_x`.
    pub peaks: Vec<Peak>,
    /// Number of grid samples over the period.
    pub profile_resolution: usize,
    /// Set when the profile was flat and no peaks were searched for.
    pub uniform: bool,
}

impl PeakSet {
    pub fn uniform(profile_resolution: usize) -> Self {
        Self { peaks: Vec::new(), profile_resolution, uniform: true }
    }

    pub fn positions(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.kappa_x).collect()
    }

    /// Mean of the defined widths.
    pub fn mean_fwhm(&self) -> Option<f64> {
        let widths: Vec<f64> = self.peaks.iter().filter_map(|p| p.fwhm).collect();
        if widths.is_empty() {
            None
        } else {
            Some(widths.iter().sum::<f64>() / widths.len() as f64)
        }
    }

    /// Grid spacing `2 pi / n`.
    pub fn resolution(&self) -> f64 {
        2.0 * PI / self.profile_resolution as f64
    }
}

/// Map an angle into `[-pi, pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor();
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// `i`-th grid position.
pub fn grid_position(i: usize, n: usize) -> f64 {
    -PI + 2.0 * PI * i as f64 / n as f64
}

/// Local maxima of a periodic sequence as `(first, last)` index runs.
///
/// A run of equal samples counts once when both neighbours are lower.
fn local_maxima(y: &[f64]) -> Vec<(usize, usize)> {
    let n = y.len();
    // Start from the global minimum so no maximum plateau straddles the seam.
    let start = (0..n).min_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap_or(0);
    let at = |k: usize| y[(start + k) % n];
    let mut out = Vec::new();
    let mut k = 1;
    while k < n {
        if at(k) > at(k - 1) {
            let mut end = k;
            while end + 1 < n && at(end + 1) == at(k) {
                end += 1;
            }
            if at(end + 1) < at(k) {
                out.push(((start + k) % n, (start + end) % n));
            }
            k = end + 1;
        } else {
            k += 1;
        }
    }
    out
}

/// Height minus the higher of the lowest points reached on either side
/// before climbing above the peak (or going all the way round).
fn prominence(y: &[f64], first: usize, last: usize) -> f64 {
    let n = y.len();
    let h = y[first];
    let mut left_min = h;
    let mut i = first;
    for _ in 0..n {
        i = (i + n - 1) % n;
        if y[i] > h {
            break;
        }
        left_min = left_min.min(y[i]);
    }
    let mut right_min = h;
    let mut i = last;
    for _ in 0..n {
        i = (i + 1) % n;
        if y[i] > h {
            break;
        }
        right_min = right_min.min(y[i]);
    }
    h - left_min.max(right_min)
}

/// Vertex offset (in grid steps) of the parabola through three samples.
fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let curvature = left - 2.0 * mid + right;
    if curvature >= 0.0 || !curvature.is_finite() {
        return 0.0;
    }
    (0.5 * (left - right) / curvature).clamp(-0.5, 0.5)
}

fn bisect<F: Fn(f64) -> f64>(f: &F, level: f64, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (inside + outside);
        if f(mid) >= level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// Walk outwards from `from` (unwrapped index) in direction `dir` until a sample
/// falls below `level`; returns the bisected crossing in unwrapped coordinates.
fn crossing<F: Fn(f64) -> f64>(f: &F, y: &[f64], from: i64, dir: i64, level: f64) -> Option<f64> {
    let n = y.len() as i64;
    let h = 2.0 * PI / n as f64;
    let pos = |k: i64| -PI + h * k as f64;
    let mut k = from;
    for _ in 0..n {
        let next = k + dir;
        if y[next.rem_euclid(n) as usize] < level {
            return Some(bisect(f, level, pos(k), pos(next)));
        }
        k = next;
    }
    None
}

/// Detect peaks of `f` over one period.
///
/// `samples[i] = f(grid_position(i, n))` must be supplied by the caller; `f`
/// is used only to refine positions, heights and widths between samples.
pub fn find_peaks_periodic<F: Fn(f64) -> f64>(samples: &[f64], f: F, min_prominence: f64) -> Result<PeakSet> {
    let n = samples.len();
    if n < MIN_GRID {
        return Err(Error::InvalidRequest(format!("grid needs at least {MIN_GRID} samples, got {n}")));
    }
    if let Some(bad) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidRequest(format!("profile undefined at kappa_x = {}", grid_position(bad, n))));
    }
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    if spread <= UNIFORM_SPREAD * max.abs() {
        return Err(Error::UniformProfile { spread });
    }

    let step = 2.0 * PI / n as f64;
    let mut peaks = Vec::new();
    for (first, last) in local_maxima(samples) {
        let prom = prominence(samples, first, last);
        if prom < min_prominence * spread {
            continue;
        }
        let last_unwrapped = if last < first { last + n } else { last };
        let (x0, mut height, center) = if first == last {
            let l = samples[(first + n - 1) % n];
            let r = samples[(first + 1) % n];
            let offset = parabolic_offset(l, samples[first], r);
            let x = grid_position(first, n) + offset * step;
            let fx = f(x);
            if fx >= samples[first] {
                (x, fx, first as i64)
            } else {
                (grid_position(first, n), samples[first], first as i64)
            }
        } else {
            let mid = 0.5 * (first + last_unwrapped) as f64;
            let x = -PI + step * mid;
            let fx = f(x);
            (x, fx.max(samples[first]), first as i64)
        };
        if !height.is_finite() {
            height = samples[first];
        }
        let level = height - 0.5 * prom;
        let left = crossing(&f, samples, center, -1, level);
        let right = crossing(&f, samples, last_unwrapped as i64, 1, level);
        let fwhm = match (left, right) {
            (Some(l), Some(r)) if r > l => Some(r - l),
            _ => None,
        };
        peaks.push(Peak { kappa_x: wrap_angle(x0), height, prominence: prom, fwhm });
    }

    peaks.sort_by(|a, b| a.kappa_x.total_cmp(&b.kappa_x));
    // Refinement can only move a peak by half a step; anything closer than a
    // step to its neighbour (including across the seam) is the same maximum.
    let mut merged: Vec<Peak> = Vec::with_capacity(peaks.len());
    for p in peaks {
        match merged.last_mut() {
            Some(q) if p.kappa_x - q.kappa_x < step => {
                if p.height > q.height {
                    *q = p;
                }
            }
            _ => merged.push(p),
        }
    }
    if merged.len() > 1 {
        let (first, last) = (merged[0], merged[merged.len() - 1]);
        if first.kappa_x + 2.0 * PI - last.kappa_x < step {
            if last.height > first.height {
                merged[0] = last;
            }
            merged.pop();
            merged.sort_by(|a, b| a.kappa_x.total_cmp(&b.kappa_x));
        }
    }

    Ok(PeakSet { peaks: merged, profile_resolution: n, uniform: false })
}
