use serde::Serialize;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McStatistic {
    pub estimate: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_error: f64,
    pub n: u64,
}

impl McStatistic {
    /// Number of standard errors separating the estimate from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.estimate == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - target) / self.std_error
        }
    }

    pub fn within(&self, target: f64, std_errors: f64) -> bool {
        self.z_score(target).abs() <= std_errors
    }
}

/// Running mean and squared deviations (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Running {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Running) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn statistic(&self) -> McStatistic {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        McStatistic {
            estimate: self.mean,
            std_error: if self.n > 0 { (var / self.n as f64).sqrt() } else { f64::NAN },
            n: self.n,
        }
    }
}

/// Median of a sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
