//! Soft-margin binary SVM trained with sequential minimal optimization.
//! Working-set selection is the maximal-KKT-violating pair under a fixed
//! ascending scan, so training is deterministic for a given input order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// RBF kernel `exp(-gamma * ||x - y||^2)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-gamma * dist2).exp())
}

/// A trained binary classifier: support vectors with signed dual
/// coefficients (alpha_i * y_i) and a bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
}

impl BinarySvm {
    /// Signed decision value; positive means the +1 class.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        let mut sum = self.bias;
        for (sv, coeff) in self.support_vectors.iter().zip(&self.dual_coeffs) {
            sum += coeff * rbf_kernel(sv, x, self.gamma)?;
        }
        Ok(sum)
    }

    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.decision(x)? > 0.0)
    }
}

/// Raw solver output: one alpha per training example plus the bias.
#[derive(Debug, Clone)]
pub struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

const MAX_PAIR_UPDATES: usize = 500_000;
const TAU: f64 = 1e-12;

/// Solves the C-SVC dual on a precomputed kernel matrix. `ys` are +-1.
pub fn smo_solve(kernel: &[Vec<f64>], ys: &[f64], c: f64, tol: f64) -> SmoSolution {
    let n = ys.len();
    let mut alphas = vec![0.0_f64; n];
    // gradient of the dual objective; -1 at alpha = 0
    let mut grad = vec![-1.0_f64; n];
    let mut iterations = 0;

    loop {
        // maximal violating pair:
        //   i = argmax { -y_t G_t : t in I_up }, j = argmin { -y_t G_t : t in I_low }
        let mut i = usize::MAX;
        let mut m_up = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            let v = -ys[t] * grad[t];
            let in_up = (ys[t] > 0.0 && alphas[t] < c) || (ys[t] < 0.0 && alphas[t] > 0.0);
            let in_low = (ys[t] > 0.0 && alphas[t] > 0.0) || (ys[t] < 0.0 && alphas[t] < c);
            if in_up && v > m_up {
                m_up = v;
                i = t;
            }
            if in_low && v < m_low {
                m_low = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || m_up - m_low <= tol || iterations >= MAX_PAIR_UPDATES
        {
            // decision bias from the midpoint of the KKT interval
            return SmoSolution {
                alphas,
                bias: (m_up + m_low) / 2.0,
                iterations,
            };
        }
        iterations += 1;

        // two-variable subproblem on (i, j); curvature along the feasible
        // direction is ||phi_i - phi_j||^2 for either label combination
        let yi = ys[i];
        let yj = ys[j];
        let quad = (kernel[i][i] + kernel[j][j] - 2.0 * kernel[i][j]).max(TAU);
        let old_ai = alphas[i];
        let old_aj = alphas[j];
        if yi != yj {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = old_ai - old_aj;
            alphas[i] += delta;
            alphas[j] += delta;
            if diff > 0.0 && alphas[j] < 0.0 {
                alphas[j] = 0.0;
                alphas[i] = diff;
            } else if diff <= 0.0 && alphas[i] < 0.0 {
                alphas[i] = 0.0;
                alphas[j] = -diff;
            }
            if diff > 0.0 && alphas[i] > c {
                alphas[i] = c;
                alphas[j] = c - diff;
            } else if diff <= 0.0 && alphas[j] > c {
                alphas[j] = c;
                alphas[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = old_ai + old_aj;
            alphas[i] -= delta;
            alphas[j] += delta;
            if sum > c && alphas[i] > c {
                alphas[i] = c;
                alphas[j] = sum - c;
            } else if sum <= c && alphas[j] < 0.0 {
                alphas[j] = 0.0;
                alphas[i] = sum;
            }
            if sum > c && alphas[j] > c {
                alphas[j] = c;
                alphas[i] = sum - c;
            } else if sum <= c && alphas[i] < 0.0 {
                alphas[i] = 0.0;
                alphas[j] = sum;
            }
        }

        let delta_i = (alphas[i] - old_ai) * yi;
        let delta_j = (alphas[j] - old_aj) * yj;
        for (t, g) in grad.iter_mut().enumerate() {
            *g += ys[t] * (kernel[i][t] * delta_i + kernel[j][t] * delta_j);
        }
    }
}

/// Trains an RBF binary SVM. `ys` must contain both classes as +-1.
pub fn smo_train(
    xs: &[Vec<f64>],
    ys: &[f64],
    c: f64,
    gamma: f64,
    tol: f64,
) -> Result<BinarySvm> {
    Ok(smo_train_detailed(xs, ys, c, gamma, tol)?.0)
}

/// Like [`smo_train`] but also returns the per-example alphas, for KKT
/// inspection.
pub fn smo_train_detailed(
    xs: &[Vec<f64>],
    ys: &[f64],
    c: f64,
    gamma: f64,
    tol: f64,
) -> Result<(BinarySvm, Vec<f64>)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let has_pos = ys.iter().any(|&y| y > 0.0);
    let has_neg = ys.iter().any(|&y| y < 0.0);
    if !has_pos || !has_neg {
        return Err(Error::SingleClass);
    }

    let n = xs.len();
    let mut kernel = vec![vec![0.0; n]; n];
    for a in 0..n {
        kernel[a][a] = 1.0;
        for b in (a + 1)..n {
            let k = rbf_kernel(&xs[a], &xs[b], gamma)?;
            kernel[a][b] = k;
            kernel[b][a] = k;
        }
    }

    let solution = smo_solve(&kernel, ys, c, tol);
    let mut support_vectors = Vec::new();
    let mut dual_coeffs = Vec::new();
    for t in 0..n {
        if solution.alphas[t] > 0.0 {
            support_vectors.push(xs[t].clone());
            dual_coeffs.push(solution.alphas[t] * ys[t]);
        }
    }
    Ok((
        BinarySvm {
            support_vectors,
            dual_coeffs,
            bias: solution.bias,
            gamma,
            c,
        },
        solution.alphas,
    ))
}

/// Checks the KKT bucket conditions of a solution on its training set:
/// margin >= 1 for zero alphas, == 1 for free alphas, <= 1 for bound ones,
/// all within `tol`. Returns the largest violation found.
pub fn kkt_violation(
    svm: &BinarySvm,
    alphas: &[f64],
    xs: &[Vec<f64>],
    ys: &[f64],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for ((x, &y), &alpha) in xs.iter().zip(ys).zip(alphas) {
        let margin = y * svm.decision(x)?;
        let violation = if alpha <= 0.0 {
            (1.0 - margin).max(0.0)
        } else if alpha >= svm.c {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(violation);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn xor_set() -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ],
            vec![-1.0, 1.0, 1.0, -1.0],
        )
    }

    #[test]
    fn kernel_identities() {
        let x = vec![0.3, 0.7, 0.1];
        let y = vec![0.5, 0.2, 0.9];
        assert_eq!(rbf_kernel(&x, &x, 1.3).unwrap(), 1.0);
        assert_eq!(rbf_kernel(&x, &y, 1.3).unwrap(), rbf_kernel(&y, &x, 1.3).unwrap());
        // gamma = 1 and unit squared distance
        let k = rbf_kernel(&[0.0], &[1.0], 1.0).unwrap();
        assert!((k - (-1.0f64).exp()).abs() < 1e-12);
        assert!(rbf_kernel(&[0.0], &[1.0, 2.0], 1.0).is_err());
    }

    // Two RBF points symmetric about 0.5 put the decision boundary there.
    #[test]
    fn midpoint_boundary_in_one_dimension() {
        let xs = vec![vec![0.0], vec![1.0]];
        let ys = vec![-1.0, 1.0];
        let svm = smo_train(&xs, &ys, 1e6, 1.0, 1e-3).unwrap();
        assert!(!svm.predict(&[0.25]).unwrap());
        assert!(svm.predict(&[0.75]).unwrap());
        // decision is antisymmetric around the midpoint
        let d = svm.decision(&[0.5]).unwrap();
        assert!(d.abs() < 1e-9, "midpoint decision {d}");
    }

    #[test]
    fn xor_is_separable_with_rbf() {
        let (xs, ys) = xor_set();
        let svm = smo_train(&xs, &ys, 10.0, 1.0, 1e-3).unwrap();
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(svm.predict(x).unwrap(), y > 0.0, "point {x:?}");
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let xs = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            smo_train(&xs, &[1.0, 1.0], 1.0, 1.0, 1e-3),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn kkt_holds_on_seeded_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for problem in 0..10 {
            let n = 60;
            let xs: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..5).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let ys: Vec<f64> = xs
                .iter()
                .map(|x| {
                    let score: f64 = x.iter().sum::<f64>() - 2.5 + rng.gen_range(-0.3..0.3);
                    if score > 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            if !ys.iter().any(|&y| y > 0.0) || !ys.iter().any(|&y| y < 0.0) {
                continue;
            }
            let tol = 1e-3;
            let (svm, alphas) = smo_train_detailed(&xs, &ys, 10.0, 0.5, tol).unwrap();
            let violation = kkt_violation(&svm, &alphas, &xs, &ys).unwrap();
            assert!(violation <= tol, "problem {problem}: violation {violation}");
        }
    }

    // Duplicating every example splits its dual mass across the copies but
    // leaves the decision function in place, as long as no alpha is at the
    // box bound (interior solutions aggregate back to the original one).
    #[test]
    fn duplicated_training_set_predicts_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut xs: Vec<Vec<f64>> = Vec::new();
        while xs.len() < 30 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
            // keep a clear margin band so large C stays interior
            if (x[0] + x[1] - 1.0).abs() > 0.15 {
                xs.push(x);
            }
        }
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| if x[0] + x[1] > 1.0 { 1.0 } else { -1.0 })
            .collect();
        let tol = 1e-4;
        let c = 1e5;
        let (single, alphas) = smo_train_detailed(&xs, &ys, c, 1.0, tol).unwrap();
        assert!(alphas.iter().all(|&a| a < c), "expected an interior solution");
        let mut xs2 = xs.clone();
        xs2.extend(xs.iter().cloned());
        let mut ys2 = ys.clone();
        ys2.extend(ys.iter().copied());
        let doubled = smo_train(&xs2, &ys2, c, 1.0, tol).unwrap();
        let mut probe = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| probe.gen_range(0.0..1.0)).collect();
            let a = single.decision(&x).unwrap();
            let b = doubled.decision(&x).unwrap();
            assert!((a - b).abs() < 0.05, "at {x:?}: {a} vs {b}");
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (xs, ys) = xor_set();
        let a = smo_train(&xs, &ys, 10.0, 1.0, 1e-3).unwrap();
        let b = smo_train(&xs, &ys, 10.0, 1.0, 1e-3).unwrap();
        assert_eq!(a, b);
    }
}
