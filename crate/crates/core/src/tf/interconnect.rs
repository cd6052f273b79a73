use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Domain, FrequencyEval, Polynomial, RationalTF, TfError};

/// `g * h`. No pole-zero cancellation; delays add.
pub fn tf_series(g: &RationalTF, h: &RationalTF) -> Result<RationalTF, TfError> {
    let domain = combined_domain(g, h)?;
    RationalTF::new(g.num() * h.num(), g.den() * h.den(), domain)
}

/// `1 / g`. The result may be improper.
pub fn tf_inverse(g: &RationalTF) -> Result<RationalTF, TfError> {
    if g.has_delay() {
        return Err(TfError::HasDelay);
    }
    if g.num().is_zero() {
        return Err(TfError::ZeroNumerator);
    }
    RationalTF::new(g.den().clone(), g.num().clone(), g.domain())
}

/// Negative-feedback interconnection `g / (1 + g h)`.
///
/// A loop containing transport delay is not rational; it is returned in
/// factored form, which supports frequency evaluation only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum LoopTf {
    Rational(RationalTF),
    Factored {
        forward: RationalTF,
        feedback: RationalTF,
    },
}

impl LoopTf {
    pub fn as_rational(&self) -> Option<&RationalTF> {
        match self {
            LoopTf::Rational(tf) => Some(tf),
            LoopTf::Factored { .. } => None,
        }
    }

    pub fn is_factored(&self) -> bool {
        matches!(self, LoopTf::Factored { .. })
    }
}

impl FrequencyEval for LoopTf {
    fn response_at(&self, omega: f64) -> Result<Complex64, TfError> {
        match self {
            LoopTf::Rational(tf) => tf.response_at(omega),
            LoopTf::Factored { forward, feedback } => {
                let g = forward.response_at(omega)?;
                let h = feedback.response_at(omega)?;
                Ok(g / (1.0 + g * h))
            }
        }
    }
}

pub fn tf_feedback(g: &RationalTF, h: &RationalTF) -> Result<LoopTf, TfError> {
    let domain = combined_domain(g, h)?;
    let open = g.num() * h.num();
    let den_prod = g.den() * h.den();
    let closed = &den_prod + &open;
    // identically zero up to roundoff of the two products
    let scale = open.max_abs().max(den_prod.max_abs());
    if closed.max_abs() <= 64.0 * f64::EPSILON * scale {
        return Err(TfError::AlgebraicLoop);
    }
    if g.has_delay() || h.has_delay() {
        return Ok(LoopTf::Factored {
            forward: g.clone(),
            feedback: h.clone(),
        });
    }
    let num = g.num() * h.den();
    if num.is_zero() {
        return Ok(LoopTf::Rational(RationalTF::new(
            Polynomial::zero(),
            Polynomial::one(),
            domain,
        )?));
    }
    Ok(LoopTf::Rational(RationalTF::new(num, closed, domain)?))
}

fn combined_domain(g: &RationalTF, h: &RationalTF) -> Result<Domain, TfError> {
    let (a, b) = (g.domain(), h.domain());
    if !a.compatible(&b) {
        return Err(a.mismatch(&b));
    }
    Ok(match (a, b) {
        (Domain::Continuous { delay: x }, Domain::Continuous { delay: y }) => {
            Domain::Continuous { delay: x + y }
        }
        _ => a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tf::freq_eval;

    #[test]
    fn series_direct_product() {
        let g = RationalTF::s(&[1.0], &[0.0, 1.0]);
        let h = RationalTF::s(&[1.0], &[1.0, 1.0]);
        let p = tf_series(&g, &h).unwrap();
        assert_eq!(p.num().coeffs(), &[1.0]);
        assert_eq!(p.den().coeffs(), &[0.0, 1.0, 1.0]);

        let unit = RationalTF::s(&[1.0], &[1.0]);
        assert_eq!(tf_series(&g, &unit).unwrap(), g);
    }

    #[test]
    fn series_adds_delays_and_checks_domain() {
        let g = RationalTF::s(&[1.0], &[1.0, 1.0]).with_delay(0.1).unwrap();
        let h = RationalTF::s(&[1.0], &[1.0]).with_delay(0.2).unwrap();
        assert!((tf_series(&g, &h).unwrap().delay() - 0.3).abs() < 1e-15);

        let d = RationalTF::z(&[1.0], &[1.0], 0.1).unwrap();
        assert!(matches!(
            tf_series(&g, &d),
            Err(TfError::DomainMismatch(..))
        ));
        let d2 = RationalTF::z(&[1.0], &[1.0], 0.2).unwrap();
        assert!(tf_series(&d, &d2).is_err());
    }

    #[test]
    fn unity_feedback_of_integrator() {
        let g = RationalTF::s(&[1.0], &[0.0, 1.0]);
        let h = RationalTF::s(&[1.0], &[1.0]);
        let cl = tf_feedback(&g, &h).unwrap();
        let tf = cl.as_rational().unwrap();
        assert_eq!(tf.num().coeffs(), &[1.0]);
        assert_eq!(tf.den().coeffs(), &[1.0, 1.0]);
    }

    #[test]
    fn zero_forward_path() {
        let g = RationalTF::s(&[0.0], &[1.0]);
        let h = RationalTF::s(&[3.0], &[1.0, 1.0]);
        let cl = tf_feedback(&g, &h).unwrap();
        assert!(cl.as_rational().unwrap().num().is_zero());
    }

    #[test]
    fn algebraic_loop_detected() {
        let g = RationalTF::s(&[1.0], &[1.0]);
        let h = RationalTF::s(&[-1.0], &[1.0]);
        assert_eq!(tf_feedback(&g, &h), Err(TfError::AlgebraicLoop));
    }

    #[test]
    fn delayed_loop_is_factored() {
        let g = RationalTF::s(&[1.0], &[1.0, 1.0]).with_delay(0.2).unwrap();
        let h = RationalTF::s(&[2.5, 1.0], &[0.0, 1.0]);
        let cl = tf_feedback(&g, &h).unwrap();
        assert!(cl.is_factored());
        let w = 0.7;
        let gv = g.response_at(w).unwrap();
        let hv = h.response_at(w).unwrap();
        let v = freq_eval(&cl, &[w]).unwrap().values[0];
        assert!((v - gv / (1.0 + gv * hv)).norm() < 1e-14);
    }

    #[test]
    fn inverse_cases() {
        let g = RationalTF::s(&[1.0], &[1.0, 0.5]);
        let inv = tf_inverse(&g).unwrap();
        assert_eq!(inv.num().coeffs(), &[1.0, 0.5]);
        assert_eq!(tf_inverse(&inv).unwrap(), g);
        assert_eq!(
            tf_inverse(&RationalTF::s(&[0.0], &[1.0])),
            Err(TfError::ZeroNumerator)
        );
        assert_eq!(
            tf_inverse(&g.with_delay(0.1).unwrap()),
            Err(TfError::HasDelay)
        );
    }
}
