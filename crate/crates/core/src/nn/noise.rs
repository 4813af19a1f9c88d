use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::nn::window::WindowMatrix;
use crate::Scalar;

pub(crate) fn add_gaussian<T: Scalar, R: Rng>(buf: &mut [T], sigma: f64, rng: &mut R) -> Result<()> {
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidArgument(format!("noise sigma {sigma}: {e}")))?;
    for v in buf.iter_mut() {
        *v = *v + T::from_f64_lossy(normal.sample(rng));
    }
    Ok(())
}

/// Adds i.i.d. `N(0, sigma^2)` noise to every entry when `training` is set.
/// Inference mode returns the input unchanged.
pub fn gaussian_corrupt<T: Scalar>(
    x: &WindowMatrix<T>,
    sigma: f64,
    seed: u64,
    training: bool,
) -> Result<WindowMatrix<T>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise sigma must be >= 0, got {sigma}")));
    }
    if !x.view().is_finite() {
        return Err(Error::DataIntegrity("window contains non-finite values".into()));
    }
    let mut out = x.clone();
    if training && sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        add_gaussian(out.as_mut_slice(), sigma, &mut rng)?;
    }
    Ok(out)
}
