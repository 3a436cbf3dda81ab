//! Independent reference computations used to check the estimator.
#![allow(dead_code)]

/// Residual variance of a least-squares polynomial fit, solved through the
/// explicit Vandermonde normal equations with Gaussian elimination.
///
/// The abscissa `1..=n` is mapped affinely onto `[-1, 1]` first. This spans
/// the same polynomial space, so the residual is unchanged, but keeps the
/// normal matrix well conditioned enough for a double-precision solve.
pub fn normal_equations_variance(y: &[f64], order: usize) -> f64 {
    let n = y.len();
    let m = order + 1;
    let t: Vec<f64> = (1..=n)
        .map(|i| (2.0 * i as f64 - (n as f64 + 1.0)) / (n as f64 - 1.0))
        .collect();
    let mut ata = vec![vec![0.0f64; m]; m];
    let mut aty = vec![0.0f64; m];
    for (ti, yi) in t.iter().zip(y) {
        let pows: Vec<f64> = (0..m).map(|k| ti.powi(k as i32)).collect();
        for r in 0..m {
            aty[r] += pows[r] * yi;
            for c in 0..m {
                ata[r][c] += pows[r] * pows[c];
            }
        }
    }
    let coef = solve(ata, aty);
    let ssr: f64 = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| {
            let fit: f64 = coef.iter().enumerate().map(|(k, c)| c * ti.powi(k as i32)).sum();
            (yi - fit).powi(2)
        })
        .sum();
    ssr / n as f64
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Plain second-order DFA with linear detrending: segments from both ends,
/// closed-form line fit, naive sums throughout. Returns the slope of
/// `ln F2(a)` against `ln a`.
pub fn dfa2_exponent(x: &[f64], scales: &[usize]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut y = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for v in x {
        acc += v - mean;
        y.push(acc);
    }
    let n = y.len();
    let mut la = Vec::new();
    let mut lf = Vec::new();
    for &a in scales {
        let segs = n / a;
        let mut vars = Vec::new();
        for s in 0..segs {
            vars.push(line_residual(&y[s * a..(s + 1) * a]));
            vars.push(line_residual(&y[n - (s + 1) * a..n - s * a]));
        }
        let f2 = (vars.iter().sum::<f64>() / vars.len() as f64).sqrt();
        la.push((a as f64).ln());
        lf.push(f2.ln());
    }
    slope(&la, &lf)
}

fn line_residual(seg: &[f64]) -> f64 {
    let xs: Vec<f64> = (1..=seg.len()).map(|i| i as f64).collect();
    let b = slope(&xs, seg);
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = seg.iter().sum::<f64>() / seg.len() as f64;
    seg.iter()
        .zip(&xs)
        .map(|(yi, xi)| (yi - ym - b * (xi - xm)).powi(2))
        .sum::<f64>()
        / seg.len() as f64
}

pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let xm = x.iter().sum::<f64>() / x.len() as f64;
    let ym = y.iter().sum::<f64>() / y.len() as f64;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = x.iter().map(|a| (a - xm).powi(2)).sum();
    sxy / sxx
}
