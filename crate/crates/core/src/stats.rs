//! Significance tests for comparing two systems: Steiger's Z for two
//! dependent correlations and McNemar's test for paired classifications.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Discordant-pair count below which McNemar uses the exact binomial test.
pub const MCNEMAR_EXACT_CUTOFF: u64 = 25;

/// Two-tailed normal tail probability, kept strictly positive.
fn two_tailed_normal(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0)
}

/// Steiger's Z test of `H0: rho_a = rho_b` where both correlations share one
/// variable (e.g. human scores) and `rho_ab` correlates the two predictors.
///
/// Uses Fisher z values, the pooled correlation `rbar = tanh((z_a + z_b) / 2)`
/// and the asymptotic covariance
/// `psi = rho_ab (1 - 2 rbar^2) - rbar^2 (1 - 2 rbar^2 - rho_ab^2) / 2`.
pub fn steiger_test(rho_a: f64, rho_b: f64, rho_ab: f64, n: usize) -> Result<f64> {
    for r in [rho_a, rho_b, rho_ab] {
        if !r.is_finite() || r.abs() > 1.0 {
            return Err(Error::invalid(format!("correlation {r} outside [-1, 1]")));
        }
    }
    if rho_a.abs() == 1.0 || rho_b.abs() == 1.0 {
        return Err(Error::invalid("Fisher z is undefined for |rho| = 1"));
    }
    if n < 4 {
        return Err(Error::invalid("steiger test needs n >= 4"));
    }
    let (za, zb) = (rho_a.atanh(), rho_b.atanh());
    if za == zb {
        return Ok(1.0);
    }
    let rbar = ((za + zb) / 2.0).tanh();
    let r2 = rbar * rbar;
    let psi = rho_ab * (1.0 - 2.0 * r2) - 0.5 * r2 * (1.0 - 2.0 * r2 - rho_ab * rho_ab);
    let cov = psi / ((1.0 - r2) * (1.0 - r2));
    let denom = 2.0 - 2.0 * cov;
    if !(denom > 0.0) {
        return Err(Error::invalid("steiger variance is not positive"));
    }
    let z = (za - zb) * ((n as f64 - 3.0) / denom).sqrt();
    Ok(two_tailed_normal(z))
}

/// Per-item correctness of two systems on the same items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedOutcomes {
    a: Vec<bool>,
    b: Vec<bool>,
}

impl PairedOutcomes {
    pub fn new(a: Vec<bool>, b: Vec<bool>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid(format!(
                "paired outcomes differ in length: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::invalid("paired outcomes need at least one item"));
        }
        Ok(Self { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `(b, c)`: items only A got right, items only B got right.
    pub fn discordant(&self) -> (u64, u64) {
        self.a.iter().zip(&self.b).fold((0, 0), |(b, c), (&x, &y)| match (x, y) {
            (true, false) => (b + 1, c),
            (false, true) => (b, c + 1),
            _ => (b, c),
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// How [`mcnemar_test`] computed its p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McNemarMethod {
    NoDiscordance,
    ExactBinomial,
    ChiSquareCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McNemarResult {
    pub b: u64,
    pub c: u64,
    pub p_value: f64,
    pub method: McNemarMethod,
}

/// Exact two-tailed binomial test when `b + c < 25`, otherwise chi-square
/// with continuity correction.
pub fn mcnemar_test(o: &PairedOutcomes) -> McNemarResult {
    let (b, c) = o.discordant();
    let (p_value, method) = mcnemar_p(b, c);
    McNemarResult { b, c, p_value, method }
}

pub fn mcnemar_p(b: u64, c: u64) -> (f64, McNemarMethod) {
    let n = b + c;
    if n == 0 {
        return (1.0, McNemarMethod::NoDiscordance);
    }
    if n < MCNEMAR_EXACT_CUTOFF {
        let k = b.min(c);
        let mut tail = 0u64;
        let mut coeff = 1u64; // C(n, 0)
        for i in 0..=k {
            tail += coeff;
            coeff = coeff * (n - i) / (i + 1);
        }
        let p = 2.0 * tail as f64 / 2f64.powi(n as i32);
        (p.min(1.0), McNemarMethod::ExactBinomial)
    } else {
        let d = (b as f64 - c as f64).abs() - 1.0;
        let stat = d.max(0.0).powi(2) / n as f64;
        // chi-square(1) survival function
        let p = erfc((stat / 2.0).sqrt()).clamp(f64::MIN_POSITIVE, 1.0);
        (p, McNemarMethod::ChiSquareCorrected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_correlations_give_one() {
        assert_eq!(steiger_test(0.4, 0.4, 0.3, 50).unwrap(), 1.0);
    }

    #[test]
    fn steiger_is_symmetric() {
        let p1 = steiger_test(0.5, 0.3, 0.2, 100).unwrap();
        let p2 = steiger_test(0.3, 0.5, 0.2, 100).unwrap();
        assert!((p1 - p2).abs() <= 1e-12);
        assert!(p1 > 0.0 && p1 < 1.0);
    }

    #[test]
    fn steiger_rejects_degenerate_input() {
        assert!(steiger_test(1.0, 0.3, 0.2, 100).is_err());
        assert!(steiger_test(0.5, 0.3, 0.2, 3).is_err());
        assert!(steiger_test(0.5, 1.3, 0.2, 30).is_err());
    }

    #[test]
    fn mcnemar_no_discordance() {
        let o = PairedOutcomes::new(vec![true, false], vec![true, false]).unwrap();
        let r = mcnemar_test(&o);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.method, McNemarMethod::NoDiscordance);
    }

    #[test]
    fn mcnemar_balanced_discordance_is_one() {
        assert_eq!(mcnemar_p(6, 6).0, 1.0);
        assert_eq!(mcnemar_p(30, 30).0, 1.0);
    }

    #[test]
    fn mcnemar_exact_case() {
        // 2 * (C(12,0)+C(12,1)+C(12,2)) / 4096 = 2 * 79 / 4096
        let (p, m) = mcnemar_p(10, 2);
        assert_eq!(m, McNemarMethod::ExactBinomial);
        assert!((p - 158.0 / 4096.0).abs() < 1e-15);
    }

    #[test]
    fn mcnemar_switches_to_chi_square() {
        assert_eq!(mcnemar_p(20, 5).1, McNemarMethod::ChiSquareCorrected);
        assert_eq!(mcnemar_p(20, 4).1, McNemarMethod::ExactBinomial);
    }

    #[test]
    fn mcnemar_monotone_in_imbalance() {
        for n in [10u64, 24, 25, 60] {
            let ps: Vec<f64> = (0..=n / 2).rev().map(|c| mcnemar_p(n - c, c).0).collect();
            for w in ps.windows(2) {
                assert!(w[1] <= w[0], "n={n}: {ps:?}");
            }
        }
    }

    #[test]
    fn outcomes_validate_lengths() {
        assert!(PairedOutcomes::new(vec![true], vec![]).is_err());
        assert!(PairedOutcomes::new(vec![], vec![]).is_err());
    }
}
