//! Small statistics helpers: geometric means and the t-based confidence
//! interval used by the repetition protocol.

/// Geometric mean of strictly positive values.
pub fn geometric_mean(values: &[f64]) -> f64 {
    debug_assert!(values.iter().all(|&x| x > 0.0));
    let log_sum: f64 = values.iter().map(|x| x.ln()).sum();
    (log_sum / values.len() as f64).exp()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let var = values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
pub fn t_quantile_975(df: usize) -> f64 {
    const TABLE: [f64; 49] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179,
        2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
        2.060, 2.056, 2.052, 2.048, 2.045, 2.042, 2.040, 2.037, 2.035, 2.032, 2.030, 2.028,
        2.026, 2.024, 2.023, 2.021, 2.020, 2.018, 2.017, 2.015, 2.014, 2.013, 2.012, 2.011,
        2.010,
    ];
    match df {
        0 => f64::INFINITY,
        d if d <= TABLE.len() => TABLE[d - 1],
        _ => 1.96,
    }
}

/// 95% confidence interval on the geometric mean of positive samples,
/// computed in log space. Returns (lower, upper).
pub fn geometric_ci95(values: &[f64]) -> (f64, f64) {
    debug_assert!(values.len() >= 2);
    let logs: Vec<f64> = values.iter().map(|x| x.ln()).collect();
    let m = mean(&logs);
    let half = t_quantile_975(values.len() - 1) * sample_std(&logs) / (values.len() as f64).sqrt();
    ((m - half).exp(), (m + half).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geomean_of_one_and_four_is_two() {
        assert!((geometric_mean(&[1.0, 4.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn geomean_of_constant_is_the_constant() {
        assert!((geometric_mean(&[3.5, 3.5, 3.5]) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn t_quantile_matches_table_endpoints() {
        assert_eq!(t_quantile_975(1), 12.706);
        assert_eq!(t_quantile_975(49), 2.010);
        assert_eq!(t_quantile_975(200), 1.96);
    }

    #[test]
    fn ci_shrinks_with_more_samples() {
        let narrow: Vec<f64> = (0..50).map(|i| 10.0 + 0.1 * f64::from(i % 5)).collect();
        let (lo_many, hi_many) = geometric_ci95(&narrow);
        let (lo_few, hi_few) = geometric_ci95(&narrow[..5]);
        assert!(hi_many - lo_many < hi_few - lo_few);
        let gm = geometric_mean(&narrow);
        assert!(lo_many < gm && gm < hi_many);
    }
}
