use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the numerical kernels are generic over: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static {
    /// Converts an `f64` literal, panicking only if the target cannot represent it at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Default residual tolerance for iterative kernels; tightened to `1e-12` where the
    /// precision allows it.
    fn default_tol() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(64.0))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tol_respects_precision() {
        assert_eq!(f64::default_tol(), 1e-12);
        assert!(f32::default_tol() > f32::EPSILON);
    }
}
