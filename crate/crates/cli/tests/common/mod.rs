//! Independent reference implementations used by the acceptance checks.
//! Plain `Vec` arithmetic only, nothing shared with the library.

#![allow(dead_code, clippy::needless_range_loop)]

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    let mut t = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(r, c);
    for i in 0..r {
        for t in 0..k {
            let x = a[i][t];
            for j in 0..c {
                out[i][j] += x * b[t][j];
            }
        }
    }
    out
}

/// Sample covariance between the columns of `x` and of `y` (rows paired).
pub fn cross_cov(x: &Mat, y: &Mat) -> Mat {
    let n = x.len();
    let mean = |m: &Mat, j: usize| m.iter().map(|r| r[j]).sum::<f64>() / n as f64;
    let mx: Vec<f64> = (0..x[0].len()).map(|j| mean(x, j)).collect();
    let my: Vec<f64> = (0..y[0].len()).map(|j| mean(y, j)).collect();
    let mut c = zeros(mx.len(), my.len());
    for r in 0..n {
        for i in 0..mx.len() {
            for j in 0..my.len() {
                c[i][j] += (x[r][i] - mx[i]) * (y[r][j] - my[j]);
            }
        }
    }
    for row in &mut c {
        for v in row.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    c
}

/// Lower-triangular `L` with `L L^T = a`.
pub fn cholesky(a: &Mat) -> Mat {
    let n = a.len();
    let mut l = zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                assert!(d > 0.0, "matrix is not positive definite");
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    l
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn lower_inverse(l: &Mat) -> Mat {
    let n = l.len();
    let mut inv = zeros(n, n);
    for col in 0..n {
        for i in 0..n {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (0..i).map(|k| l[i][k] * inv[k][col]).sum();
            inv[i][col] = (rhs - s) / l[i][i];
        }
    }
    inv
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending.
pub fn jacobi_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.len();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

fn sym_inverse(a: &Mat) -> Mat {
    let li = lower_inverse(&cholesky(a));
    matmul(&transpose(&li), &li)
}

/// Canonical correlations from the generalized eigenproblem
/// `Cxy Cyy^-1 Cyx a = rho^2 Cxx a`, reduced with a Cholesky factor of `Cxx`.
pub fn cca_correlations(x: &Mat, y: &Mat) -> Vec<f64> {
    let cxx = cross_cov(x, x);
    let cyy = cross_cov(y, y);
    let cxy = cross_cov(x, y);
    let li = lower_inverse(&cholesky(&cxx));
    let inner = matmul(&matmul(&cxy, &sym_inverse(&cyy)), &transpose(&cxy));
    let mut m = matmul(&matmul(&li, &inner), &transpose(&li));
    // symmetrise away rounding
    let n = m.len();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    let k = x[0].len().min(y[0].len());
    jacobi_eigenvalues(&m).into_iter().take(k).map(|l| l.max(0.0).sqrt()).collect()
}

/// Textbook Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

/// Rank of each element by counting: 1 + #smaller + (#ties - 1) / 2.
pub fn brute_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&a| {
            let less = x.iter().filter(|&&b| b < a).count() as f64;
            let eq = x.iter().filter(|&&b| b == a).count() as f64;
            1.0 + less + (eq - 1.0) / 2.0
        })
        .collect()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&brute_ranks(x), &brute_ranks(y))
}

/// Two-sided exact binomial (p = 1/2) test on the discordant counts.
pub fn exact_mcnemar(b: u64, c: u64) -> f64 {
    let n = b + c;
    let k = b.min(c);
    let mut tail = 0.0;
    for i in 0..=k {
        let mut lchoose = 0.0f64;
        for t in 0..i {
            lchoose += ((n - t) as f64).ln() - ((t + 1) as f64).ln();
        }
        tail += (lchoose - n as f64 * std::f64::consts::LN_2).exp();
    }
    (2.0 * tail).min(1.0)
}

/// Standard normal CDF by composite Simpson integration of the density.
pub fn normal_cdf(z: f64) -> f64 {
    let a = z.abs();
    let steps = 20_000;
    let h = a / steps as f64;
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(0.0) + pdf(a);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(i as f64 * h);
    }
    let half = s * h / 3.0;
    if z >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Steiger's Z1* for dependent correlations with a shared variable, using
/// the back-transformed mean correlation.
pub fn steiger(r_a: f64, r_b: f64, r_ab: f64, n: usize) -> f64 {
    let fisher = |r: f64| 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    let (z1, z2) = (fisher(r_a), fisher(r_b));
    let zm = 0.5 * (z1 + z2);
    let rm = (zm.exp() - (-zm).exp()) / (zm.exp() + (-zm).exp());
    let rm2 = rm * rm;
    let psi = r_ab * (1.0 - 2.0 * rm2) - 0.5 * rm2 * (1.0 - 2.0 * rm2 - r_ab * r_ab);
    let s = psi / ((1.0 - rm2) * (1.0 - rm2));
    let z = (z1 - z2) * (n as f64 - 3.0).sqrt() / (2.0 - 2.0 * s).sqrt();
    2.0 * (1.0 - normal_cdf(z.abs()))
}
