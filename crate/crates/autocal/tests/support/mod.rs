//! Test-side reference implementations computed directly from defining
//! sums with plain double loops. They share no code with the crate, so
//! agreement is evidence, not tautology.

#![allow(dead_code)]

/// S_k: mean of (y - pi) over observations predicted at level k.
pub fn brute_increments(ys: &[f64], pis: &[f64], levels: &[f64]) -> Vec<f64> {
    let n = ys.len() as f64;
    levels
        .iter()
        .map(|&l| {
            let mut s = 0.0;
            for i in 0..ys.len() {
                if pis[i] == l {
                    s += ys[i] - pis[i];
                }
            }
            s / n
        })
        .collect()
}

pub fn brute_counts(pis: &[f64], levels: &[f64]) -> Vec<usize> {
    levels.iter().map(|&l| pis.iter().filter(|&&p| p == l).count()).collect()
}

pub fn brute_prefix(s: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut acc = 0.0;
    for &v in s {
        acc += v;
        out.push(acc);
    }
    out
}

pub fn brute_suffix(s: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; s.len()];
    let mut acc = 0.0;
    for k in (0..s.len()).rev() {
        acc += s[k];
        out[k] = acc;
    }
    out
}

/// U_k: response prefix share minus prediction prefix share up to level k.
pub fn brute_u(ys: &[f64], pis: &[f64], levels: &[f64]) -> Option<Vec<f64>> {
    let y_total: f64 = ys.iter().sum();
    let p_total: f64 = pis.iter().sum();
    if y_total <= 0.0 || p_total == 0.0 {
        return None;
    }
    Some(
        levels
            .iter()
            .map(|&l| {
                let mut y_pref = 0.0;
                let mut p_pref = 0.0;
                for i in 0..ys.len() {
                    if pis[i] <= l {
                        y_pref += ys[i];
                        p_pref += pis[i];
                    }
                }
                y_pref / y_total - p_pref / p_total
            })
            .collect(),
    )
}

/// Area proxy: sum over all but the last level of (upper tail probability)
/// times the increment.
pub fn brute_abc(s: &[f64], probs: &[f64]) -> f64 {
    let k = s.len();
    let mut total = 0.0;
    for i in 0..k.saturating_sub(1) {
        let head: f64 = probs[..=i].iter().sum();
        total += (1.0 - head) * s[i];
    }
    total
}

/// Quadratic form weighted by the probability of reaching level k.
pub fn brute_v2_weighted(s: &[f64], probs: &[f64]) -> f64 {
    let mut total = 0.0;
    for k in 0..s.len() {
        let below: f64 = probs[..k].iter().sum();
        total += (1.0 - below) * s[k] * s[k];
    }
    total
}

pub fn brute_v2_unweighted(s: &[f64]) -> f64 {
    s.iter().map(|&v| v * v).sum()
}

pub fn brute_chi2(s: &[f64], probs: &[f64], variances: &[f64], n: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..s.len() {
        total += s[k] * s[k] / (probs[k] * variances[k]);
    }
    n as f64 * total
}

/// All seven statistics in test order, from the defining sums.
pub fn brute_statistics(
    ys: &[f64],
    pis: &[f64],
    levels: &[f64],
    probs: &[f64],
    variances: &[f64],
) -> [f64; 7] {
    let n = ys.len();
    let rn = (n as f64).sqrt();
    let s = brute_increments(ys, pis, levels);
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let normalized: Vec<f64> = s
        .iter()
        .enumerate()
        .map(|(k, &v)| v / (probs[k] * variances[k]).sqrt())
        .collect();
    [
        rn * max_abs(&s),
        rn * max_abs(&normalized),
        rn * max_abs(&brute_prefix(&s)),
        rn * max_abs(&brute_suffix(&s)),
        n as f64 * brute_v2_weighted(&s, probs),
        n as f64 * brute_v2_unweighted(&s),
        brute_chi2(&s, probs, variances, n),
    ]
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Cholesky factorization succeeding is the positive-semidefiniteness
/// witness used on covariance matrices (after a tiny diagonal boost).
#[allow(clippy::needless_range_loop)]
pub fn cholesky_ok(matrix: &[Vec<f64>], boost: f64) -> bool {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += boost;
    }
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return false;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    true
}
