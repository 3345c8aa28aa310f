//! Design-rule mining over a Pareto front: single and two-segment linear
//! fits, breakpoint detection and the studied variable/objective pairs.

use crate::moea::Individual;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum points per segment when fitting a two-segment model.
pub const MIN_SEGMENT: usize = 10;

/// Fronts smaller than this are rejected for rule mining.
pub const MIN_FRONT: usize = 10;

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
}

/// Least-squares line through (xs, ys). `r2 = 1 - SSE/SST`; for constant ys
/// matched exactly the fit reports `r2 = 1`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit, InnovizationError> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 || xs.iter().all(|&x| x == xs[0]) {
        return Err(InnovizationError::DegenerateData);
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let sst: f64 = ys.iter().map(|&y| (y - mean_y) * (y - mean_y)).sum();
    let r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else if sse <= f64::EPSILON * nf {
        1.0
    } else {
        0.0
    };
    Ok(LineFit { slope, intercept, r2, n })
}

fn sse_of(xs: &[f64], ys: &[f64]) -> f64 {
    match linear_fit(xs, ys) {
        Ok(fit) => xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - (fit.slope * x + fit.intercept);
                r * r
            })
            .sum(),
        // all-equal x: model as the mean
        Err(_) => {
            let mean = ys.iter().sum::<f64>() / ys.len() as f64;
            ys.iter().map(|&y| (y - mean) * (y - mean)).sum()
        }
    }
}

/// Two-segment fit with a detected breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedFit {
    pub x_name: String,
    pub y_name: String,
    pub breakpoint: f64,
    pub left: LineFit,
    pub right: LineFit,
    pub residual_rms: f64,
    /// Fractional SSE improvement of the two-segment model over a single
    /// line; below 1% the data is effectively one line.
    pub sse_gain: f64,
    pub has_kink: bool,
}

/// Best two-segment breakpoint: candidates are midpoints between consecutive
/// distinct sorted x values, each segment at least `min_segment` points.
pub fn detect_breakpoint(
    xs: &[f64],
    ys: &[f64],
    min_segment: usize,
) -> Result<f64, InnovizationError> {
    let n = xs.len();
    if n < 2 * min_segment {
        return Err(InnovizationError::DegenerateData);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap_or(std::cmp::Ordering::Equal));
    let sx: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let sy: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    let mut best: Option<(f64, f64)> = None;
    for split in min_segment..=(n - min_segment) {
        if sx[split] == sx[split - 1] {
            continue;
        }
        let bp = 0.5 * (sx[split - 1] + sx[split]);
        let sse = sse_of(&sx[..split], &sy[..split]) + sse_of(&sx[split..], &sy[split..]);
        if best.map_or(true, |(_, s)| sse < s) {
            best = Some((bp, sse));
        }
    }
    best.map(|(bp, _)| bp).ok_or(InnovizationError::DegenerateData)
}

/// Fit a two-segment model at the detected breakpoint.
pub fn segmented_fit(
    x_name: &str,
    y_name: &str,
    xs: &[f64],
    ys: &[f64],
    min_segment: usize,
) -> Result<SegmentedFit, InnovizationError> {
    let bp = detect_breakpoint(xs, ys, min_segment)?;
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut rx = Vec::new();
    let mut ry = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if x <= bp {
            lx.push(x);
            ly.push(y);
        } else {
            rx.push(x);
            ry.push(y);
        }
    }
    let fit_side = |xs: &[f64], ys: &[f64]| {
        linear_fit(xs, ys).unwrap_or(LineFit {
            slope: 0.0,
            intercept: ys.iter().sum::<f64>() / ys.len().max(1) as f64,
            r2: 1.0,
            n: ys.len(),
        })
    };
    let left = fit_side(&lx, &ly);
    let right = fit_side(&rx, &ry);
    let seg_sse = sse_of(&lx, &ly) + sse_of(&rx, &ry);
    let single_sse = sse_of(xs, ys);
    let sse_gain = if single_sse > 0.0 { 1.0 - seg_sse / single_sse } else { 0.0 };
    // A single line that already explains the data to rounding noise cannot
    // have a kink, no matter how the ratio of two tiny SSEs comes out.
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let sst: f64 = ys.iter().map(|&y| (y - mean_y) * (y - mean_y)).sum();
    let single_misses = single_sse > 1e-9 * sst.max(f64::MIN_POSITIVE);
    Ok(SegmentedFit {
        x_name: x_name.to_string(),
        y_name: y_name.to_string(),
        breakpoint: bp,
        left,
        right,
        residual_rms: (seg_sse / xs.len() as f64).sqrt(),
        sse_gain,
        has_kink: single_misses && sse_gain >= 0.01,
    })
}

/// Single-line relation between two named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFit {
    pub x_name: String,
    pub y_name: String,
    pub fit: LineFit,
}

/// Range summary plus pinned-variable detection for one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std_dev: f64,
    /// True when the front-wide standard deviation is below 1% of the
    /// variable's bound span.
    pub pinned: bool,
}

/// The complete rule report mined from a front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleReport {
    pub front_size: usize,
    pub segmented: Vec<SegmentedFit>,
    pub linear: Vec<PairFit>,
    pub ranges: Vec<RangeSummary>,
    pub provenance: Option<Provenance>,
}

/// Where the mined front came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub generations: usize,
    pub pop_size: usize,
}

fn column(front: &[Individual], name: &str) -> Vec<f64> {
    front
        .iter()
        .map(|i| match name {
            "f1" => i.eval.f[0],
            "f2" => i.eval.f[1],
            "f3" => i.eval.f[2],
            "mA" => i.x.m_a,
            "mB" => i.x.m_b,
            "LA" => i.x.l_a,
            "LB" => i.x.l_b,
            "k" => i.x.k,
            "Hb" => i.x.h_b,
            "T1" => i.x.t1,
            "T2" => i.x.t2,
            "T3" => i.x.t3,
            "kHb" => i.x.k * i.x.h_b,
            other => panic!("unknown column {other}"),
        })
        .collect()
}

fn range_summary(name: &str, values: &[f64], span: f64) -> RangeSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std_dev = var.sqrt();
    RangeSummary {
        name: name.to_string(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std_dev,
        pinned: std_dev < 0.01 * span,
    }
}

/// The studied relations:
/// segmented fits f1->f2, f1->f3, f1->mB, f1->LB and f1->kHb; single lines
/// f2->T3 and f2->T2; range summaries for T1 (vs f3) and the pinned
/// candidates mA, LA.
pub fn build_report(
    front: &[Individual],
    bounds: &crate::problem::Bounds,
    provenance: Option<Provenance>,
) -> Result<RuleReport, InnovizationError> {
    if front.len() < MIN_FRONT {
        return Err(InnovizationError::InsufficientFront { size: front.len() });
    }
    let seg_pairs = [("f1", "f2"), ("f1", "f3"), ("f1", "mB"), ("f1", "LB"), ("f1", "kHb")];
    let mut segmented = Vec::new();
    for (xn, yn) in seg_pairs {
        segmented.push(segmented_fit(xn, yn, &column(front, xn), &column(front, yn), MIN_SEGMENT)?);
    }
    let lin_pairs = [("f2", "T3"), ("f2", "T2"), ("f1", "kHb")];
    let mut linear = Vec::new();
    for (xn, yn) in lin_pairs {
        linear.push(PairFit {
            x_name: xn.to_string(),
            y_name: yn.to_string(),
            fit: linear_fit(&column(front, xn), &column(front, yn))?,
        });
    }
    let spans: [(&str, f64); 3] = [
        ("mA", bounds.high[0] - bounds.low[0]),
        ("LA", bounds.high[2] - bounds.low[2]),
        ("T1", bounds.high[6] - bounds.low[6]),
    ];
    let ranges = spans
        .iter()
        .map(|(name, span)| range_summary(name, &column(front, name), *span))
        .collect();
    Ok(RuleReport { front_size: front.len(), segmented, linear, ranges, provenance })
}

impl RuleReport {
    /// Human-readable rendering of the mined rules.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Design-rule report ({} front members)\n", self.front_size));
        if let Some(p) = &self.provenance {
            out.push_str(&format!(
                "run: seed {}, pop {}, generations {}\n",
                p.seed, p.pop_size, p.generations
            ));
        }
        out.push_str("\nSegmented relations:\n");
        for s in &self.segmented {
            out.push_str(&format!(
                "  {} vs {}: breakpoint {:.4}{}\n    left  slope {:+.4} intercept {:+.4} R2 {:.4} (n={})\n    right slope {:+.4} intercept {:+.4} R2 {:.4} (n={})\n",
                s.y_name,
                s.x_name,
                s.breakpoint,
                if s.has_kink { "" } else { "  [no kink: two-segment gain < 1%]" },
                s.left.slope,
                s.left.intercept,
                s.left.r2,
                s.left.n,
                s.right.slope,
                s.right.intercept,
                s.right.r2,
                s.right.n,
            ));
        }
        out.push_str("\nLinear relations:\n");
        for l in &self.linear {
            out.push_str(&format!(
                "  {} = {:+.4} * {} {:+.4}   (R2 {:.4}, n={})\n",
                l.y_name, l.fit.slope, l.x_name, l.fit.intercept, l.fit.r2, l.fit.n
            ));
        }
        out.push_str("\nRange summaries:\n");
        for r in &self.ranges {
            out.push_str(&format!(
                "  {}: [{:.4}, {:.4}] mean {:.4} std {:.4}{}\n",
                r.name,
                r.min,
                r.max,
                r.mean,
                r.std_dev,
                if r.pinned { "  [pinned]" } else { "" }
            ));
        }
        out
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum InnovizationError {
    #[error("fewer than 2 distinct x values")]
    DegenerateData,
    #[error("front too small for rule mining ({size} members, need {MIN_FRONT})")]
    InsufficientFront { size: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_line_recovery() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_y_convention() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [5.0, 5.0, 5.0];
        let fit = linear_fit(&xs, &ys).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r2, 1.0);
    }

    #[test]
    fn degenerate_x_rejected() {
        assert_eq!(
            linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(InnovizationError::DegenerateData)
        );
        assert_eq!(linear_fit(&[1.0], &[1.0]), Err(InnovizationError::DegenerateData));
    }

    #[test]
    fn noisy_line_slope_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 3.0 * x - 2.0 + rng.gen_range(-0.01..0.01))
            .collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 3.0).abs() < 0.01);
    }

    #[test]
    fn synthetic_kink_recovered() {
        // Slope 1 below x = 5, slope -2 above.
        let xs: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| if x <= 5.0 { x } else { 5.0 - 2.0 * (x - 5.0) })
            .collect();
        let bp = detect_breakpoint(&xs, &ys, MIN_SEGMENT).unwrap();
        assert!((bp - 5.0).abs() <= 0.05, "breakpoint {bp}");
        let fit = segmented_fit("x", "y", &xs, &ys, MIN_SEGMENT).unwrap();
        assert!(fit.has_kink);
        assert_relative_eq!(fit.left.slope, 1.0, epsilon = 1e-6);
        assert_relative_eq!(fit.right.slope, -2.0, epsilon = 1e-6);
    }

    #[test]
    fn linear_data_flagged_as_no_kink() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x + 2.0).collect();
        let fit = segmented_fit("x", "y", &xs, &ys, MIN_SEGMENT).unwrap();
        assert!(!fit.has_kink);
    }

    #[test]
    fn segmented_sse_never_exceeds_single_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let xs: Vec<f64> = (0..80).map(|i| i as f64 * 0.1).collect();
            let ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let seg = segmented_fit("x", "y", &xs, &ys, MIN_SEGMENT).unwrap();
            // sse_gain = 1 - seg/single must be >= 0 up to rounding
            assert!(seg.sse_gain >= -1e-12);
        }
    }

    #[test]
    fn breakpoint_needs_enough_points() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys = xs.clone();
        assert_eq!(
            detect_breakpoint(&xs, &ys, MIN_SEGMENT),
            Err(InnovizationError::DegenerateData)
        );
    }

    #[test]
    fn fits_invariant_under_reordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut data: Vec<(f64, f64)> =
            (0..60).map(|i| (i as f64 * 0.1, rng.gen_range(0.0..1.0))).collect();
        let xs: Vec<f64> = data.iter().map(|d| d.0).collect();
        let ys: Vec<f64> = data.iter().map(|d| d.1).collect();
        let base = segmented_fit("x", "y", &xs, &ys, MIN_SEGMENT).unwrap();
        data.reverse();
        let xs2: Vec<f64> = data.iter().map(|d| d.0).collect();
        let ys2: Vec<f64> = data.iter().map(|d| d.1).collect();
        let rev = segmented_fit("x", "y", &xs2, &ys2, MIN_SEGMENT).unwrap();
        assert_eq!(base.breakpoint, rev.breakpoint);
        assert_relative_eq!(base.left.slope, rev.left.slope, epsilon = 1e-12);
    }
}
