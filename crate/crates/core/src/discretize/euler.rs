use super::DiscretizeError;
use crate::tf::{Domain, Polynomial, RationalTF, TfError};

/// Substitutes `s = (z - 1) / Ts` and multiplies numerator and denominator by
/// `Ts^N`, `N` the larger of the two degrees.
pub fn euler_discretize(g: &RationalTF, ts: f64) -> Result<RationalTF, DiscretizeError> {
    match g.domain() {
        Domain::Continuous { delay } if delay > 0.0 => return Err(TfError::HasDelay.into()),
        Domain::Continuous { .. } => {}
        Domain::Discrete { .. } => return Err(DiscretizeError::NotContinuous),
    }
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(DiscretizeError::InvalidSampleTime(ts));
    }
    let n = g.num().degree().max(g.den().degree());
    let sub = |p: &Polynomial| {
        let zm1 = Polynomial::linear(-1.0);
        let mut acc = Polynomial::zero();
        for (i, &c) in p.coeffs().iter().enumerate() {
            if c != 0.0 {
                let term = zm1.pow(i as u32).scale(c * ts.powi((n - i) as i32));
                acc = &acc + &term;
            }
        }
        acc
    };
    Ok(RationalTF::new(
        sub(g.num()),
        sub(g.den()),
        Domain::Discrete { ts },
    )?)
}
