//! Small numeric helpers shared across modules.

/// Neumaier-compensated accumulator.
///
/// Episode statistics sum thousands of log increments whose magnitudes vary
/// by orders of magnitude; a plain running sum loses the small terms once the
/// total grows. The compensation term recovers them.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    /// Fresh accumulator at zero.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one term.
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated total.
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Inclusive linear grid with `steps` points from `min` to `max`.
///
/// Endpoints are reproduced exactly (`steps = 1` collapses to `[min]`);
/// interior points are computed directly from the index, not by accumulation,
/// so the grid is bit-stable regardless of iteration order.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 1, "linspace needs at least one point");
    assert!(min.is_finite() && max.is_finite() && min <= max);
    if steps == 1 {
        return vec![min];
    }
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                max
            } else {
                min + (max - min) * (i as f64 / last)
            }
        })
        .collect()
}

/// Mean and population standard deviation of a slice (compensated sums).
///
/// Population form (divisor `n`) because the trials of one experiment are the
/// whole population being described, not a sample from a larger one.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mut acc = Kahan::new();
    for &v in values {
        acc.add(v);
    }
    let mean = acc.value() / n;
    let mut sq = Kahan::new();
    for &v in values {
        let d = v - mean;
        sq.add(d * d);
    }
    (mean, (sq.value() / n).max(0.0).sqrt())
}

/// Standard error of the mean of a slice (population std over sqrt n).
pub fn standard_error(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let (_, sd) = mean_std(values);
    sd / (values.len() as f64).sqrt()
}
