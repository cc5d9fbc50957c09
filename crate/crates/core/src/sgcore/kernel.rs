use crate::embedstore::dot;
use crate::error::{Error, Result};

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-ln(sigmoid(x))`, stable for large `|x|`.
pub(crate) fn neg_log_sigmoid(x: f64) -> f64 {
    if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

#[inline]
pub(crate) fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Negative-sampling loss `-ln s(c.v) - sum_n ln s(-n.v)`.
pub fn sgns_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    neg_log_sigmoid(dot(center, context))
        + negatives
            .iter()
            .map(|n| neg_log_sigmoid(-dot(center, n)))
            .sum::<f64>()
}

/// One SGD step on the negative-sampling loss, visiting the positive target
/// and then each negative. The center receives the accumulated gradient
/// after all targets have been updated. `grad` is scratch space of the
/// vector length. Returns the loss before the step, or `None` when a
/// non-finite score shows up.
pub(crate) fn sgns_step<'a, I>(center: &mut [f64], grad: &mut [f64], targets: I, lr: f64) -> Option<f64>
where
    I: IntoIterator<Item = (&'a mut [f64], bool)>,
{
    grad.fill(0.0);
    let mut loss = 0.0;
    for (out, positive) in targets {
        let f = dot(center, out);
        if !f.is_finite() {
            return None;
        }
        let label = if positive { 1.0 } else { 0.0 };
        loss += if positive { neg_log_sigmoid(f) } else { neg_log_sigmoid(-f) };
        let g = (label - sigmoid(f)) * lr;
        axpy(grad, g, out);
        axpy(out, g, center);
    }
    axpy(center, 1.0, grad);
    Some(loss)
}

/// Applies one negative-sampling step to `center`, `context` and every
/// negative vector; returns the pre-step loss.
pub fn sg_pair_update(
    center: &mut [f64],
    context: &mut [f64],
    negatives: &mut [Vec<f64>],
    lr: f64,
) -> Result<f64> {
    let dim = center.len();
    if context.len() != dim || negatives.iter().any(|n| n.len() != dim) {
        return Err(Error::invalid("sg_pair_update vectors differ in length"));
    }
    if !(lr > 0.0) {
        return Err(Error::invalid("learning rate must be > 0"));
    }
    let mut grad = vec![0.0; dim];
    let targets = std::iter::once((context, true)).chain(negatives.iter_mut().map(|n| (n.as_mut_slice(), false)));
    sgns_step(center, &mut grad, targets, lr).ok_or(Error::NumericalBlowUp { ids: vec![] })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn saturated_positive_costs_nothing() {
        let c = [50.0, 0.0];
        let v = [50.0, 0.0];
        assert!(sgns_loss(&c, &v, &[]) < 1e-300);
    }

    #[test]
    fn no_negatives_is_the_positive_term() {
        let c = [0.3, -0.2, 0.5];
        let v = [0.1, 0.4, -0.7];
        let x: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
        let want = -(1.0 / (1.0 + (-x).exp())).ln();
        assert!((sgns_loss(&c, &v, &[]) - want).abs() < 1e-15);
        let mut cc = c;
        let mut vv = v;
        let got = sg_pair_update(&mut cc, &mut vv, &mut [], 0.1).unwrap();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn step_lowers_the_loss() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c: Vec<f64> = (0..8).map(|_| rng.random_range(-0.5..0.5)).collect();
        let mut v: Vec<f64> = (0..8).map(|_| rng.random_range(-0.5..0.5)).collect();
        let mut negs: Vec<Vec<f64>> = (0..3).map(|_| (0..8).map(|_| rng.random_range(-0.5..0.5)).collect()).collect();
        let before = sg_pair_update(&mut c, &mut v, &mut negs, 0.05).unwrap();
        let refs: Vec<&[f64]> = negs.iter().map(|n| n.as_slice()).collect();
        assert!(sgns_loss(&c, &v, &refs) < before);
    }

    #[test]
    fn non_finite_input_is_reported() {
        let mut c = [f64::INFINITY, 0.0];
        let mut v = [1.0, 0.0];
        assert!(matches!(
            sg_pair_update(&mut c, &mut v, &mut [], 0.1),
            Err(Error::NumericalBlowUp { .. })
        ));
    }

    #[test]
    fn stable_log_sigmoid() {
        assert!((neg_log_sigmoid(800.0)).abs() < 1e-300);
        assert!((neg_log_sigmoid(-800.0) - 800.0).abs() < 1e-9);
        assert!((neg_log_sigmoid(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
