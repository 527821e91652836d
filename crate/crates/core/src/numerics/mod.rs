//! Extended-precision evaluation of Γ, ζ and ξ on the real axis, plus the
//! Taylor data of ξ at ½ and of its even-variable reduction Ξ₁.

pub(crate) mod special;
mod xi_taylor;

use rug::Float;
use serde::Serialize;

use crate::ball::digits_to_bits;
use crate::error::{Error, Result};

pub use special::{bernoulli, eta_real, gamma_real, lngamma_positive, xi_real, zeta_real};
pub use xi_taylor::{
    central_difference_derivative, xi1_series, xi1_series_with, xi_series_at_half,
    xi_series_at_half_with, xi_sqrt_series, XiTaylorConfig,
    DEFAULT_COEFF_CAP,
};

/// Environment variable overriding the default number of decimal digits.
pub const DIGITS_ENV: &str = "TPLAB_DIGITS";

/// Working precision and truncation limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrecisionConfig {
    /// Decimal working precision.
    pub digits: u32,
    /// Cap on the number of terms of any series or product.
    pub max_terms: usize,
    /// Number of points of the central-difference cross-check.
    pub fd_stencil: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        let digits = std::env::var(DIGITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .filter(|&d| d >= 15)
            .unwrap_or(50);
        PrecisionConfig { digits, max_terms: 20_000, fd_stencil: 9 }
    }
}

impl PrecisionConfig {
    pub fn new(digits: u32) -> Result<Self> {
        PrecisionConfig { digits, ..PrecisionConfig::default() }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.digits < 15 {
            return Err(Error::InvalidParameter(format!("digits = {} < 15", self.digits)));
        }
        if self.max_terms < 8 {
            return Err(Error::InvalidParameter(format!("max_terms = {} < 8", self.max_terms)));
        }
        if self.fd_stencil < 3 {
            return Err(Error::InvalidParameter("fd_stencil must be at least 3".into()));
        }
        Ok(self)
    }

    /// Binary precision of results.
    pub fn bits(&self) -> u32 {
        digits_to_bits(self.digits)
    }

    /// Internal precision with guard bits.
    pub fn work_bits(&self) -> u32 {
        self.bits() + 32
    }

    pub fn with_digits(&self, digits: u32) -> Self {
        PrecisionConfig { digits, ..*self }
    }

    /// 10^(-digits + slack), the relative tolerance results must meet.
    pub fn rel_tolerance(&self, slack: i32) -> Float {
        use rug::ops::Pow;
        Float::with_val(64, Float::with_val(64, 10).pow(-(self.digits as i32) + slack))
    }
}

/// An exact real argument.
pub fn real(x: f64) -> Float {
    Float::with_val(64, x)
}

/// An exact real from a decimal string when representable, else rounded at
/// `bits`.
pub fn real_str(s: &str, bits: u32) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(bits, p))
}
