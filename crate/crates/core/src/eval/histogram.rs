use super::{format_sig9, EvalError};

/// Default binning for angles in degrees.
pub const ANGLE_BINS: (usize, f64, f64) = (36, 0.0, 90.0);
/// Default binning for ratio differences.
pub const RATIO_BINS: (usize, f64, f64) = (20, 0.0, 1.0);

/// Uniform bins `[lo, hi)`, the last one closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Samples outside `[lo, hi]` or not finite.
    pub outside: usize,
}

pub fn histogram(values: &[f64], n_bins: usize, range: (f64, f64)) -> Result<Histogram, EvalError> {
    let (lo, hi) = range;
    if n_bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(EvalError::InvalidRange {
            lo,
            hi,
            bins: n_bins,
        });
    }
    if values.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let width = (hi - lo) / n_bins as f64;
    let bin_edges = (0..=n_bins)
        .map(|i| {
            if i == n_bins {
                hi
            } else {
                lo + width * i as f64
            }
        })
        .collect::<Vec<_>>();
    let mut counts = vec![0; n_bins];
    let mut outside = 0;
    for &v in values {
        if !(v >= lo && v <= hi) {
            outside += 1;
            continue;
        }
        let mut i = (((v - lo) / width).floor() as usize).min(n_bins - 1);
        // Keep bin membership consistent with the stored edges.
        if v < bin_edges[i] {
            i -= 1;
        } else if i + 1 < n_bins && v >= bin_edges[i + 1] {
            i += 1;
        }
        counts[i] += 1;
    }
    Ok(Histogram {
        bin_edges,
        counts,
        outside,
    })
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.outside
    }

    /// Centre of the most populated bin; the lowest wins ties.
    pub fn mode(&self) -> f64 {
        let (i, _) =
            self.counts.iter().enumerate().fold(
                (0, 0),
                |best, (i, &c)| if c > best.1 { (i, c) } else { best },
            );
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    /// `bin_lo,bin_hi,count` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                format_sig9(self.bin_edges[i]),
                format_sig9(self.bin_edges[i + 1]),
                c
            ));
        }
        out
    }
}
