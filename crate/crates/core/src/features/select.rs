//! Feature-selection tooling: Pearson correlation pruning and information
//! gain ratio. Works on arbitrary named columns so users can re-derive
//! schemas from their own raw feature inventories.

use crate::error::{Error, Result};

/// A named column-oriented sample matrix.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    /// One row per sample, one value per named column.
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }
}

/// Symmetric matrix of Pearson coefficients.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// Pearson correlation of every column pair. Zero-variance columns
/// correlate 0 with everything and 1 with themselves.
pub fn correlation_matrix(m: &FeatureMatrix) -> Result<CorrelationMatrix> {
    let n = m.rows.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let k = m.names.len();
    let columns: Vec<Vec<f64>> = (0..k).map(|i| m.column(i)).collect();
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let sds: Vec<f64> = columns
        .iter()
        .zip(&means)
        .map(|(c, &mean)| c.iter().map(|x| (x - mean).powi(2)).sum::<f64>().sqrt())
        .collect();

    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        values[i][i] = 1.0;
        for j in (i + 1)..k {
            let r = if sds[i] == 0.0 || sds[j] == 0.0 {
                0.0
            } else {
                let cov: f64 = columns[i]
                    .iter()
                    .zip(&columns[j])
                    .map(|(x, y)| (x - means[i]) * (y - means[j]))
                    .sum();
                cov / (sds[i] * sds[j])
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: m.names.clone(),
        values,
    })
}

/// Greedy scan in declaration order: a feature is dropped iff its absolute
/// correlation against ANY already-retained feature exceeds `threshold`.
/// Returns retained column indices in order.
pub fn prune_correlated(m: &CorrelationMatrix, threshold: f64) -> Vec<usize> {
    let mut retained: Vec<usize> = Vec::new();
    for candidate in 0..m.names.len() {
        let correlated = retained.iter().any(|&kept| m.get(kept, candidate).abs() > threshold);
        if !correlated {
            retained.push(candidate);
        }
    }
    retained
}

/// Information gain ratio of each column about the labels, with
/// equal-frequency discretization (at most `bins` bins, fewer when the
/// column has fewer distinct values). Columns with zero split entropy
/// score 0.
pub fn information_gain_ratio(
    m: &FeatureMatrix,
    labels: &[usize],
    bins: usize,
) -> Result<Vec<f64>> {
    let n = m.rows.len();
    if n != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{n} samples but {} labels",
            labels.len()
        )));
    }
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::SingleLabel);
    }

    let label_entropy = entropy_of_counts(&count_labels(labels));
    let scores = (0..m.names.len())
        .map(|i| {
            let assignments = equal_frequency_bins(&m.column(i), bins);
            let bin_count = assignments.iter().max().map_or(0, |&b| b + 1);
            if bin_count < 2 {
                return 0.0;
            }
            // split entropy H(X) and conditional H(Y|X)
            let mut bin_sizes = vec![0usize; bin_count];
            let mut bin_label_counts: Vec<Vec<usize>> = vec![Vec::new(); bin_count];
            for (&bin, &label) in assignments.iter().zip(labels) {
                bin_sizes[bin] += 1;
                let counts = &mut bin_label_counts[bin];
                if counts.len() <= label {
                    counts.resize(label + 1, 0);
                }
                counts[label] += 1;
            }
            let split_entropy = entropy_of_counts(&bin_sizes);
            if split_entropy == 0.0 {
                return 0.0;
            }
            let conditional: f64 = bin_label_counts
                .iter()
                .zip(&bin_sizes)
                .map(|(counts, &size)| size as f64 / n as f64 * entropy_of_counts(counts))
                .sum();
            ((label_entropy - conditional) / split_entropy).max(0.0)
        })
        .collect();
    Ok(scores)
}

fn count_labels(labels: &[usize]) -> Vec<usize> {
    let mut counts = Vec::new();
    for &label in labels {
        if counts.len() <= label {
            counts.resize(label + 1, 0);
        }
        counts[label] += 1;
    }
    counts
}

fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// Rank-based equal-frequency binning: sorts the column, fills bins to
/// (adaptively recomputed) target size, and never splits equal values
/// across bins. Returns a bin index per sample.
fn equal_frequency_bins(column: &[f64], bins: usize) -> Vec<usize> {
    let n = column.len();
    if n == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));

    let mut distinct = 1usize;
    for w in order.windows(2) {
        if column[w[0]] != column[w[1]] {
            distinct += 1;
        }
    }
    let target_bins = bins.max(1).min(distinct);

    let mut assignments = vec![0usize; n];
    let mut start = 0usize;
    for bin in 0..target_bins {
        if start >= n {
            break;
        }
        let remaining_bins = target_bins - bin;
        let take = (n - start).div_ceil(remaining_bins);
        let mut end = start + take;
        while end < n && column[order[end]] == column[order[end - 1]] {
            end += 1;
        }
        for &sample in &order[start..end] {
            assignments[sample] = bin;
        }
        start = end;
    }
    assignments
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn matrix(names: &[&str], rows: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix {
            names: names.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    #[test]
    fn duplicated_column_correlates_one() {
        let m = matrix(
            &["a", "b"],
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![5.0, 5.0]],
        );
        let c = correlation_matrix(&m).unwrap();
        assert!((c.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(c.get(0, 0), 1.0);
    }

    #[test]
    fn negated_column_correlates_minus_one() {
        let m = matrix(
            &["a", "b"],
            vec![vec![1.0, -1.0], vec![2.0, -2.0], vec![5.0, -5.0]],
        );
        let c = correlation_matrix(&m).unwrap();
        assert!((c.get(0, 1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_seeded_columns_have_low_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let rows: Vec<Vec<f64>> = (0..1000).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let c = correlation_matrix(&matrix(&["a", "b"], rows)).unwrap();
        assert!(c.get(0, 1).abs() < 0.1, "r = {}", c.get(0, 1));
    }

    #[test]
    fn zero_variance_column_correlates_zero() {
        let m = matrix(
            &["const", "x"],
            vec![vec![3.0, 1.0], vec![3.0, 2.0], vec![3.0, 9.0]],
        );
        let c = correlation_matrix(&m).unwrap();
        assert_eq!(c.get(0, 1), 0.0);
        assert_eq!(c.get(0, 0), 1.0);
    }

    #[test]
    fn fewer_than_two_samples_is_an_error() {
        let m = matrix(&["a"], vec![vec![1.0]]);
        assert!(correlation_matrix(&m).is_err());
    }

    #[test]
    fn identical_columns_prune_the_second() {
        let m = matrix(
            &["a", "b"],
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]],
        );
        let c = correlation_matrix(&m).unwrap();
        assert_eq!(prune_correlated(&c, 0.75), vec![0]);
    }

    // Greedy rule traced by hand: a retained; b dropped against a (0.8);
    // c checked against retained {a} only (0.1), so c is retained.
    #[test]
    fn chain_keeps_endpoints() {
        let c = CorrelationMatrix {
            names: vec!["a".into(), "b".into(), "c".into()],
            values: vec![
                vec![1.0, 0.8, 0.1],
                vec![0.8, 1.0, 0.8],
                vec![0.1, 0.8, 1.0],
            ],
        };
        assert_eq!(prune_correlated(&c, 0.75), vec![0, 2]);
    }

    #[test]
    fn negative_correlation_counts_by_magnitude() {
        let c = CorrelationMatrix {
            names: vec!["a".into(), "b".into()],
            values: vec![vec![1.0, -0.9], vec![-0.9, 1.0]],
        };
        assert_eq!(prune_correlated(&c, 0.75), vec![0]);
    }

    #[test]
    fn perfect_binary_predictor_scores_one() {
        // balanced binary label, feature equal to the label
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![f64::from(i % 2 == 0)]).collect();
        let labels: Vec<usize> = (0..40).map(|i| usize::from(i % 2 == 0)).collect();
        let igr = information_gain_ratio(&matrix(&["f"], rows), &labels, 10).unwrap();
        assert!((igr[0] - 1.0).abs() < 1e-12, "igr = {}", igr[0]);
    }

    #[test]
    fn constant_feature_scores_zero() {
        let rows: Vec<Vec<f64>> = (0..40).map(|_| vec![7.0]).collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let igr = information_gain_ratio(&matrix(&["f"], rows), &labels, 10).unwrap();
        assert_eq!(igr[0], 0.0);
    }

    #[test]
    fn independent_feature_scores_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<Vec<f64>> = (0..2000).map(|_| vec![rng.gen::<f64>()]).collect();
        let labels: Vec<usize> = (0..2000).map(|_| rng.gen_range(0..2)).collect();
        let igr = information_gain_ratio(&matrix(&["f"], rows), &labels, 10).unwrap();
        assert!(igr[0] < 0.05, "igr = {}", igr[0]);
    }

    #[test]
    fn single_label_is_an_error() {
        let rows = vec![vec![1.0], vec![2.0]];
        let labels = vec![0, 0];
        assert!(information_gain_ratio(&matrix(&["f"], rows), &labels, 10).is_err());
    }

    #[test]
    fn igr_is_invariant_under_monotone_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..100.0)).collect();
        let labels: Vec<usize> = values.iter().map(|&v| usize::from(v > 30.0)).collect();
        let raw = matrix(&["f"], values.iter().map(|&v| vec![v]).collect());
        let transformed = matrix(&["f"], values.iter().map(|&v| vec![(v + 1.0).ln()]).collect());
        let a = information_gain_ratio(&raw, &labels, 10).unwrap();
        let b = information_gain_ratio(&transformed, &labels, 10).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-12);
    }
}
