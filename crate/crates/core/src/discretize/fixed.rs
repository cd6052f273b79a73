use serde::{Deserialize, Serialize};

use super::DiscretizeError;

/// Signed 64-bit fixed point with `frac_bits` fractional bits.
///
/// Rounding is round-half-to-even; results that do not fit saturate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QFormat {
    frac_bits: u32,
}

impl Default for QFormat {
    fn default() -> Self {
        Self { frac_bits: 40 }
    }
}

impl QFormat {
    pub const TOTAL_BITS: u32 = 64;

    pub fn new(frac_bits: u32) -> Result<Self, DiscretizeError> {
        if !(8..=56).contains(&frac_bits) {
            return Err(DiscretizeError::InvalidFracBits(frac_bits));
        }
        Ok(Self { frac_bits })
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn int_bits(&self) -> u32 {
        Self::TOTAL_BITS - 1 - self.frac_bits
    }

    /// Weight of the least significant bit.
    pub fn lsb(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn max_value(&self) -> f64 {
        i64::MAX as f64 * self.lsb()
    }

    /// Nearest representable raw value, or `None` if out of range.
    pub fn try_to_raw(&self, x: f64) -> Option<i64> {
        let scaled = (x * (self.frac_bits as f64).exp2()).round_ties_even();
        // i64::MAX is not representable in f64; 2^63 is the first value out
        if scaled.is_finite() && scaled >= -(2f64.powi(63)) && scaled < 2f64.powi(63) {
            Some(scaled as i64)
        } else {
            None
        }
    }

    /// Nearest raw value, saturating at the format bounds; NaN maps to 0.
    pub fn to_raw(&self, x: f64) -> i64 {
        if x.is_nan() {
            return 0;
        }
        self.try_to_raw(x)
            .unwrap_or(if x > 0.0 { i64::MAX } else { i64::MIN })
    }

    pub fn from_raw(&self, raw: i64) -> f64 {
        raw as f64 * self.lsb()
    }

    pub fn quantize(&self, x: f64) -> f64 {
        self.from_raw(self.to_raw(x))
    }

    pub fn add(&self, a: i64, b: i64) -> i64 {
        a.saturating_add(b)
    }

    pub fn sub(&self, a: i64, b: i64) -> i64 {
        a.saturating_sub(b)
    }

    /// Product of two raw values, rounded half-to-even back to the format.
    pub fn mul(&self, a: i64, b: i64) -> i64 {
        let p = a as i128 * b as i128;
        let f = self.frac_bits;
        let q = p >> f;
        let rem = p - (q << f);
        let half = 1i128 << (f - 1);
        let q = if rem > half || (rem == half && q & 1 == 1) {
            q + 1
        } else {
            q
        };
        q.clamp(i64::MIN as i128, i64::MAX as i128) as i64
    }
}
