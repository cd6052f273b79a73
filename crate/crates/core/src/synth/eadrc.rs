use nalgebra::DMatrix;

use super::{AdrcGains, FilterSpec, PidParams, SynthError};
use crate::tf::{Domain, Polynomial, RationalTF};

/// Residual tolerance for the Cayley-Hamilton closure of the
/// characteristic-polynomial recursion.
const RESOLVENT_TOL: f64 = 1e-8;

fn require_order(g: &AdrcGains) -> Result<(), SynthError> {
    g.validate()?;
    if !(1..=2).contains(&g.n) {
        return Err(SynthError::UnsupportedOrder(g.n));
    }
    Ok(())
}

/// `k2 l1 + l2 + k1`, the normalizing constant of the second-order
/// equivalence.
fn second_order_scale(g: &AdrcGains) -> f64 {
    g.k(2) * g.l(1) + g.l(2) + g.k(1)
}

/// eADRC feedback transfer function in closed form for `n = 1` and `n = 2`.
///
/// ```text
/// n = 1:  ((k1 l1 + l2) s + k1 l2) / (b0 (s^2 + (k1 + l2) s))
/// n = 2:  ((k1 l1 + k2 l2 + l3) s^2 + (k1 l2 + k2 l3) s + k1 l3)
///         / (b0 (s^3 + (k2 + l1) s^2 + (l2 + k1 + l1 k2) s))
/// ```
pub fn build_eadrc_fb(g: &AdrcGains) -> Result<RationalTF, SynthError> {
    require_order(g)?;
    let inv_b0 = 1.0 / g.b0;
    let (num, den) = match g.n {
        1 => {
            let (k1, l1, l2) = (g.k(1), g.l(1), g.l(2));
            (vec![k1 * l2, k1 * l1 + l2], vec![0.0, k1 + l2, 1.0])
        }
        _ => {
            let (k1, k2) = (g.k(1), g.k(2));
            let (l1, l2, l3) = (g.l(1), g.l(2), g.l(3));
            (
                vec![k1 * l3, k1 * l2 + k2 * l3, k1 * l1 + k2 * l2 + l3],
                vec![0.0, l2 + k1 + l1 * k2, k2 + l1, 1.0],
            )
        }
    };
    Ok(RationalTF::new(
        Polynomial::new(num).scale(inv_b0),
        Polynomial::new(den),
        Domain::S,
    )?)
}

/// Output of the general resolvent construction.
#[derive(Clone, Debug)]
pub struct GeneralFeedback {
    pub tf: RationalTF,
    /// Closed-loop observer/controller matrix.
    pub a_cl: DMatrix<f64>,
    /// Relative Cayley-Hamilton residual of the recursion.
    pub residual: f64,
}

/// Closed-loop matrix `A - l c^T - (1/b0) b (k^T 1)` of the observer with the
/// control law substituted.
pub(crate) fn closed_loop_matrix(g: &AdrcGains) -> DMatrix<f64> {
    let n = g.n;
    let m = n + 1;
    let mut a = DMatrix::<f64>::zeros(m, m);
    for i in 0..n {
        a[(i, i + 1)] = 1.0;
    }
    for i in 0..m {
        a[(i, 0)] -= g.l[i];
    }
    // b = b0 e_{n-1}; (1/b0) b (k^T 1) only touches row n-1
    for j in 0..m {
        let w = if j < n { g.k[j] } else { 1.0 };
        a[(n - 1, j)] -= w;
    }
    a
}

/// eADRC feedback for any order via the resolvent
/// `(k^T 1) adj(sI - A_CL) l / (b0 det(sI - A_CL))`, with the adjugate and
/// characteristic polynomial from the Faddeev-LeVerrier recursion.
pub fn build_eadrc_fb_general(g: &AdrcGains) -> Result<RationalTF, SynthError> {
    Ok(eadrc_resolvent(g)?.tf)
}

pub fn eadrc_resolvent(g: &AdrcGains) -> Result<GeneralFeedback, SynthError> {
    g.validate()?;
    let m = g.n + 1;
    let a_cl = closed_loop_matrix(g);
    let w = nalgebra::DVector::from_iterator(m, g.k.iter().copied().chain(std::iter::once(1.0)));
    let l = nalgebra::DVector::from_column_slice(&g.l);
    let eye = DMatrix::<f64>::identity(m, m);

    // char poly c_m s^m + ... + c_0, c_m = 1
    let mut char_poly = vec![0.0; m + 1];
    char_poly[m] = 1.0;
    let mut num = vec![0.0; m];
    let mut mk = DMatrix::<f64>::zeros(m, m);
    let mut am = DMatrix::<f64>::zeros(m, m);
    for k in 1..=m {
        mk = &am + &eye * char_poly[m - k + 1];
        // coefficient of s^{m-k} in the adjugate
        num[m - k] = w.dot(&(&mk * &l)) / g.b0;
        am = &a_cl * &mk;
        char_poly[m - k] = -am.trace() / k as f64;
    }
    // A M_m + c_0 I must vanish; measured against the size of its terms,
    // since c_0 = 0 whenever the feedback has an integrator
    let closure = &am + &eye * char_poly[0];
    let scale = (a_cl.amax() * mk.amax())
        .max(char_poly[0].abs())
        .max(f64::MIN_POSITIVE);
    let residual = closure.amax() / scale;
    if residual > RESOLVENT_TOL {
        return Err(SynthError::ResolventResidual(residual));
    }
    let tf = RationalTF::new(Polynomial::new(num), Polynomial::new(char_poly), Domain::S)?;
    Ok(GeneralFeedback { tf, a_cl, residual })
}

/// Equivalence transfer function `C_EQ`, with `C_FB^A = C_FB^{PI/PID} C_EQ`.
///
/// For `n = 2` the factor `1/F_Y(s)` is kept explicit so that it multiplies
/// against the `F_Y(s)` inside the PID feedback without pre-cancellation.
pub fn build_ceq(g: &AdrcGains, fy: &FilterSpec) -> Result<RationalTF, SynthError> {
    require_order(g)?;
    match g.n {
        1 => Ok(RationalTF::new(
            Polynomial::one(),
            Polynomial::new(vec![1.0, 1.0 / (g.l(2) + g.k(1))]),
            Domain::S,
        )?),
        _ => {
            fy.validate()?;
            let c = second_order_scale(g);
            let den = Polynomial::new(vec![1.0, (g.k(2) + g.l(1)) / c, 1.0 / c]);
            Ok(RationalTF::new(fy.den(), den, Domain::S)?)
        }
    }
}

/// The low-pass filter `F_Yn` that the eADRC feedback puts behind a plain
/// PI/PID feedback: `C_EQ1` for `n = 1`, the second-order `F_Y2` for `n = 2`.
pub fn equivalence_filter(g: &AdrcGains) -> Result<FilterSpec, SynthError> {
    require_order(g)?;
    Ok(match g.n {
        1 => FilterSpec::FirstOrder {
            t: 1.0 / (g.l(2) + g.k(1)),
        },
        _ => {
            let c = second_order_scale(g);
            FilterSpec::SecondOrder {
                a2: 1.0 / c,
                a1: (g.k(2) + g.l(1)) / c,
            }
        }
    })
}

/// `C_EQ` with its `1/F_Y` factor cancelled at the filter level; equals the
/// transfer function of [`equivalence_filter`].
pub fn build_ceq_simplified(g: &AdrcGains) -> Result<RationalTF, SynthError> {
    Ok(equivalence_filter(g)?.tf())
}

/// PI (`n = 1`) or PID (`n = 2`) gains whose feedback, in series with `C_EQ`,
/// reproduces the eADRC feedback. `beta` is 1 and both filters are unity.
///
/// For `n = 2`, `Kp = (k1 l2 + k2 l3) / (b0 (k2 l1 + l2 + k1))`: the `s`
/// coefficient of the closed-form feedback numerator divided by the same
/// constant as `Ki` and `Kd`.
pub fn pid_from_adrc(g: &AdrcGains) -> Result<PidParams, SynthError> {
    require_order(g)?;
    match g.n {
        1 => {
            let (k1, l1, l2) = (g.k(1), g.l(1), g.l(2));
            let d = g.b0 * (l2 + k1);
            Ok(PidParams::pi((k1 * l1 + l2) / d, k1 * l2 / d))
        }
        _ => {
            let (k1, k2) = (g.k(1), g.k(2));
            let (l1, l2, l3) = (g.l(1), g.l(2), g.l(3));
            let d = g.b0 * second_order_scale(g);
            Ok(PidParams::pid(
                (k1 * l2 + k2 * l3) / d,
                k1 * l3 / d,
                (k1 * l1 + k2 * l2 + l3) / d,
                FilterSpec::Unity,
            ))
        }
    }
}
