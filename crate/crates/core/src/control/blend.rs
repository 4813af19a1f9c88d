use crate::error::{Error, Result};

/// Interpolates between left- and right-stance model outputs,
/// `(1 - alpha) * left + alpha * right`. Out-of-range alphas are clamped and
/// counted.
#[derive(Debug, Clone, Default)]
pub struct Blender {
    clamped: usize,
}

impl Blender {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of calls whose alpha had to be clamped into `[0, 1]`.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn blend_into(&mut self, alpha: f64, left: &[f64], right: &[f64], out: &mut [f64]) -> Result<()> {
        if left.len() != right.len() || out.len() != left.len() {
            return Err(Error::InvalidArgument(format!(
                "blend needs equal lengths, got {}, {} and {}",
                left.len(),
                right.len(),
                out.len()
            )));
        }
        if alpha.is_nan() {
            return Err(Error::InvalidArgument("blend factor is NaN".into()));
        }
        let a = if (0.0..=1.0).contains(&alpha) {
            alpha
        } else {
            self.clamped += 1;
            log::warn!("blend factor {alpha} clamped into [0, 1]");
            alpha.clamp(0.0, 1.0)
        };
        for ((o, &l), &r) in out.iter_mut().zip(left).zip(right) {
            *o = (1.0 - a) * l + a * r;
        }
        Ok(())
    }

    pub fn blend(&mut self, alpha: f64, left: &[f64], right: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; left.len()];
        self.blend_into(alpha, left, right, &mut out)?;
        Ok(out)
    }
}

/// One-shot [`Blender::blend`].
pub fn blend(alpha: f64, left: &[f64], right: &[f64]) -> Result<Vec<f64>> {
    Blender::new().blend(alpha, left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoints_and_midpoint() {
        let l = [1.0, -2.0, 5.0];
        let r = [3.0, 4.0, -1.0];
        assert_eq!(blend(0.0, &l, &r).unwrap(), l);
        assert_eq!(blend(1.0, &l, &r).unwrap(), r);
        assert_eq!(blend(0.5, &[2.0], &[4.0]).unwrap(), [3.0]);
    }

    #[test]
    fn clamps_and_counts() {
        let mut b = Blender::new();
        assert_eq!(b.blend(1.5, &[0.0], &[2.0]).unwrap(), [2.0]);
        assert_eq!(b.blend(-0.1, &[0.0], &[2.0]).unwrap(), [0.0]);
        assert_eq!(b.blend(0.25, &[0.0], &[2.0]).unwrap(), [0.5]);
        assert_eq!(b.clamped(), 2);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(blend(0.5, &[1.0], &[1.0, 2.0]).is_err());
        assert!(blend(f64::NAN, &[1.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn affine_and_idempotent_on_equal_inputs(
            a in 0.0f64..=1.0,
            b in 0.0f64..=1.0,
            v in proptest::collection::vec(-100.0f64..100.0, 1..8),
            w in proptest::collection::vec(-100.0f64..100.0, 1..8),
        ) {
            let n = v.len().min(w.len());
            let (v, w) = (&v[..n], &w[..n]);
            let same = blend(a, v, v).unwrap();
            for (x, y) in same.iter().zip(v) {
                prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
            // affine in alpha: midpoint of two blends is the blend at the mid alpha
            let ba = blend(a, v, w).unwrap();
            let bb = blend(b, v, w).unwrap();
            let bm = blend(0.5 * (a + b), v, w).unwrap();
            for i in 0..n {
                prop_assert!((0.5 * (ba[i] + bb[i]) - bm[i]).abs() <= 1e-9);
            }
        }
    }
}
