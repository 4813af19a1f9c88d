//! Central-difference gradient oracle for the full network.

use crate::error::{Error, Result};
use crate::nn::model::{StanceModel, Workspace};
use crate::nn::params::Gradients;
use crate::nn::window::WindowView;
use crate::Scalar;

/// Central-difference estimate of `d(alpha_hat - target)^2 / d(theta)` for every
/// learnable scalar, using the deterministic (noise-free) forward pass.
pub fn finite_diff_grad<T: Scalar>(
    model: &StanceModel<T>,
    x: &WindowView<'_, T>,
    target: T,
    eps: T,
) -> Result<Gradients<T>> {
    if !(eps > T::zero() && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be > 0, got {eps}")));
    }
    model.validate()?;
    model.predict(x)?;
    let mut probe = model.clone();
    let mut ws = Workspace::new(model);
    let mut grads = model.params.zeros_like();
    let loss = |m: &StanceModel<T>, ws: &mut Workspace<T>| {
        let e = m.predict_with(x, ws) - target;
        e * e
    };
    for idx in 0..model.params.num_params() {
        let slot = probe.params.get_mut(idx).expect("index within num_params");
        let orig = *slot;
        *slot = orig + eps;
        let up = loss(&probe, &mut ws);
        *probe.params.get_mut(idx).unwrap() = orig - eps;
        let down = loss(&probe, &mut ws);
        *probe.params.get_mut(idx).unwrap() = orig;
        *grads.get_mut(idx).unwrap() = (up - down) / (T::two() * eps);
    }
    Ok(grads)
}

/// Central-difference gradient of a scalar function of a flat parameter vector.
pub fn central_difference<T: Scalar, F: FnMut(&[T]) -> T>(point: &[T], mut f: F, eps: T) -> Result<Vec<T>> {
    if !(eps > T::zero() && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be > 0, got {eps}")));
    }
    let mut probe = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        probe[i] = point[i] + eps;
        let up = f(&probe);
        probe[i] = point[i] - eps;
        let down = f(&probe);
        probe[i] = point[i];
        grad.push((up - down) / (T::two() * eps));
    }
    Ok(grad)
}

/// Largest `|analytic - numeric| / max(1, |numeric|)` over all coordinates.
pub fn max_relative_error<T: Scalar>(analytic: &Gradients<T>, numeric: &Gradients<T>) -> T {
    analytic
        .iter()
        .zip(numeric.iter())
        .map(|(a, n)| (a - n).abs() / n.abs().max(T::one()))
        .fold(T::zero(), |acc, e| acc.max(e))
}
