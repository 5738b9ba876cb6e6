//! Basic hypergeometric series and the classical summation oracles.
//!
//! [`phi`] evaluates an r-phi-s series directly by term ratios. Parameters may
//! be plain rational monomials or conjugate pairs ((b,-b) and (g w, g w^2)
//! with w a cube root of unity), each pair counting as two parameters in the
//! ((-1)^n q^{n(n-1)/2})^{1+s-r} normalization. The pairs keep every
//! computation inside the rationals.
//!
//! The closed-form functions are kept separate from `phi` on purpose: the
//! verification suite wants both sides of every summation formula evaluated
//! independently.

use num_traits::{One, Signed, Zero};

use crate::error::{QError, QResult};
use crate::qobjects::{
    div_one_minus, mul_mono, mul_one_minus, poch_finite, poch_scaled, Monomial,
};
use crate::series::{coeff_int, coeff_ratio, exp_int, Coeff, Exp, Series};

/// One upper or lower parameter of a basic hypergeometric series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiParam {
    /// An ordinary rational monomial parameter a: contributes (a;q)_n.
    Plain(Monomial),
    /// A conjugate pair (b, -b) recorded by b^2: contributes (b^2;q^2)_n.
    PmPair(Monomial),
    /// A pair (g w, g w^2), w = e^{2 pi i/3}, with g = q^m: contributes
    /// prod_{k<n} (1 + q^{m+k} + q^{2(m+k)}).
    OmegaPair(Exp),
}

impl PhiParam {
    fn arity(&self) -> usize {
        match self {
            PhiParam::Plain(_) => 1,
            PhiParam::PmPair(_) | PhiParam::OmegaPair(_) => 2,
        }
    }

    /// Multiply `f` by this parameter's new factor when stepping n -> n+1.
    fn mul_step(&self, f: &mut Series, step: &Exp, n: i64) {
        match self {
            PhiParam::Plain(a) => {
                let e = a.exp + step * exp_int(n);
                mul_one_minus(f, &a.coeff, &e);
            }
            PhiParam::PmPair(b2) => {
                let e = b2.exp + step * exp_int(2 * n);
                mul_one_minus(f, &b2.coeff, &e);
            }
            PhiParam::OmegaPair(m) => {
                let e = m + step * exp_int(n);
                if e.is_zero() {
                    f.scale_coeffs(&coeff_int(3));
                } else {
                    // (1 - q^{3e}) / (1 - q^e)
                    let three_e = e * exp_int(3);
                    mul_one_minus(f, &Coeff::one(), &three_e);
                    div_one_minus(f, &Coeff::one(), &e).expect("e > 0");
                }
            }
        }
    }

    /// Divide `f` by this parameter's new factor when stepping n -> n+1.
    fn div_step(&self, f: &mut Series, step: &Exp, n: i64) -> QResult<()> {
        match self {
            PhiParam::Plain(a) => {
                let e = a.exp + step * exp_int(n);
                div_one_minus(f, &a.coeff, &e)
            }
            PhiParam::PmPair(b2) => {
                let e = b2.exp + step * exp_int(2 * n);
                div_one_minus(f, &b2.coeff, &e)
            }
            PhiParam::OmegaPair(m) => {
                let e = m + step * exp_int(n);
                if e.is_zero() {
                    f.scale_coeffs(&coeff_ratio(1, 3));
                    Ok(())
                } else {
                    let three_e = e * exp_int(3);
                    mul_one_minus(f, &Coeff::one(), &e);
                    div_one_minus(f, &Coeff::one(), &three_e)
                }
            }
        }
    }

    /// Smallest N >= 0 such that the factor vanishes past index N, if any.
    fn termination(&self, step: &Exp) -> Option<i64> {
        match self {
            PhiParam::Plain(a) => a.q_negative_power(step),
            PhiParam::PmPair(b2) => {
                let double = step * exp_int(2);
                b2.q_negative_power(&double)
            }
            PhiParam::OmegaPair(_) => None,
        }
    }
}

/// Parameters of an r-phi-s basic hypergeometric series over the base q^step.
#[derive(Clone, Debug)]
pub struct PhiSpec {
    pub upper: Vec<PhiParam>,
    pub lower: Vec<PhiParam>,
    pub step: Exp,
    pub z: Monomial,
}

impl PhiSpec {
    pub fn new(upper: Vec<PhiParam>, lower: Vec<PhiParam>, step: Exp, z: Monomial) -> Self {
        PhiSpec { upper, lower, step, z }
    }

    /// Constructor from plain monomial parameters only.
    pub fn plain(upper: Vec<Monomial>, lower: Vec<Monomial>, step: Exp, z: Monomial) -> Self {
        PhiSpec {
            upper: upper.into_iter().map(PhiParam::Plain).collect(),
            lower: lower.into_iter().map(PhiParam::Plain).collect(),
            step,
            z,
        }
    }

    /// Number of upper parameters r (pairs count twice).
    pub fn r(&self) -> usize {
        self.upper.iter().map(|p| p.arity()).sum()
    }

    /// Number of lower parameters s (pairs count twice).
    pub fn s(&self) -> usize {
        self.lower.iter().map(|p| p.arity()).sum()
    }

    /// Smallest N with an upper parameter exactly q^{-N step}. Ties take the
    /// smallest N, matching how the proofs instantiate q^{-n}.
    pub fn termination_order(&self) -> Option<i64> {
        self.upper.iter().filter_map(|p| p.termination(&self.step)).min()
    }

    fn check_poles(&self, n_max: Option<i64>) -> QResult<()> {
        for p in &self.lower {
            let hit = match p {
                PhiParam::Plain(a) => a.q_negative_power(&self.step),
                PhiParam::PmPair(b2) => {
                    let double = self.step * exp_int(2);
                    b2.q_negative_power(&double)
                }
                PhiParam::OmegaPair(_) => None,
            };
            if let Some(m) = hit {
                let in_range = match n_max {
                    Some(n) => m < n,
                    None => true,
                };
                if in_range {
                    return Err(QError::PoleInLowerParameter(format!(
                        "lower parameter q^(-{m}*step) vanishes inside the summation range"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Evaluate an r-phi-s series to the requested precision.
///
/// sum_n [prod (upper;q)_n / prod (q, lower;q)_n] ((-1)^n q^{n(n-1)/2})^{1+s-r} z^n
///
/// Either some upper parameter terminates the sum at q^{-N step}, or the
/// per-term minimal exponent must grow without bound so the precision cutoff
/// stops the loop (guarded by two consecutive terms past prec).
pub fn phi(spec: &PhiSpec, prec: &Exp) -> QResult<Series> {
    let extra = 1 + spec.s() as i64 - spec.r() as i64;
    let n_max = spec.termination_order();
    spec.check_poles(n_max)?;

    if n_max.is_none() {
        if extra < 0 {
            return Err(QError::NonTerminating(
                "r > s + 1 with no terminating upper parameter".into(),
            ));
        }
        if spec.z.is_zero() {
            return Ok(Series::monomial(&Coeff::one(), &Exp::zero(), prec));
        }
        if extra == 0 && !spec.z.exp.is_positive() {
            return Err(QError::NonTerminating(
                "argument exponent must be positive for a nonterminating series".into(),
            ));
        }
    }

    let hard_cap = 4 * (prec * exp_int(*prec.denom())).to_integer().unsigned_abs() as i64 + 64;

    let mut total = Series::monomial(&Coeff::zero(), &Exp::zero(), prec);
    let mut term = Series::monomial(&Coeff::one(), &Exp::zero(), prec);
    let mut beyond = 0u32;
    let mut n: i64 = 0;
    loop {
        total = total.add(&term);
        if n_max == Some(n) {
            break;
        }
        for p in &spec.upper {
            p.mul_step(&mut term, &spec.step, n);
        }
        // implicit (q^step; q^step)_n in the denominator
        let e = spec.step * exp_int(n + 1);
        div_one_minus(&mut term, &Coeff::one(), &e)?;
        for p in &spec.lower {
            p.div_step(&mut term, &spec.step, n)?;
        }
        if extra != 0 {
            // ratio of the normalization factors: ((-1) q^{step n})^extra
            let sign = if extra % 2 == 0 { Coeff::one() } else { -Coeff::one() };
            let shift = spec.step * exp_int(n * extra);
            term.mul_monomial(&sign, &shift);
        }
        mul_mono(&mut term, &spec.z);
        n += 1;

        if term.is_zero() {
            break;
        }
        if n_max.is_none() {
            match term.valuation() {
                Some(v) if v >= *prec => {
                    beyond += 1;
                    if beyond >= 2 {
                        break;
                    }
                }
                _ => beyond = 0,
            }
            if n > hard_cap {
                return Err(QError::NonTerminating(format!("no truncation after {n} terms")));
            }
        }
    }
    Ok(total.truncate(prec))
}

// ---------------------------------------------------------------------------
// Closed-form oracles
// ---------------------------------------------------------------------------

/// q-Chu-Vandermonde: 2phi1(q^{-n}, a; c; q, q) = (c/a;q)_n / (c;q)_n * a^n.
///
/// Limit-safe at a = 0 through the scaled product form.
pub fn chu_vandermonde_rhs(
    a: &Monomial,
    c: &Monomial,
    step: &Exp,
    n: i64,
    prec: &Exp,
) -> QResult<Series> {
    let mut out = poch_scaled(c, a, step, n, prec);
    div_poch(&mut out, c, step, n)?;
    Ok(out)
}

/// q-Pfaff-Saalschuetz closed form:
/// (q/b, q/c; q)_n / (alpha b, alpha c; q)_n * (alpha b c / q)^n.
///
/// Limit-safe at b = 0 and c = 0.
pub fn pfaff_rhs(
    alpha: &Monomial,
    b: &Monomial,
    c: &Monomial,
    step: &Exp,
    n: i64,
    prec: &Exp,
) -> QResult<Series> {
    let q_step = Monomial::q_pow(*step);
    let mut out = poch_scaled(&q_step, b, step, n, prec);
    out = out.mul(&poch_scaled(&q_step, c, step, n, prec));
    let scalar = alpha.pow(n).mul(&Monomial::q_pow(-step * exp_int(n)));
    mul_mono(&mut out, &scalar);
    div_poch(&mut out, &alpha.mul(b), step, n)?;
    div_poch(&mut out, &alpha.mul(c), step, n)?;
    Ok(out)
}

/// Closed form of 3phi2(q^{-2n}, q^{2n+2}, 0; -q^step, e; q^step, q^step)
/// from the terminating q-Whipple sum, for e in {-q^h, -q^{3h}, q^{3h}, q^h}
/// with h = step/2. Other (c, e) patterns are unsupported; the (beta, c)
/// generalization lives in [`whipple_general_rhs`].
pub fn whipple_rhs(c: &Monomial, e: &Monomial, step: &Exp, n: i64, prec: &Exp) -> QResult<Series> {
    if !c.is_zero() {
        return Err(QError::UnsupportedSpecialization(format!(
            "whipple_rhs implements only c = 0, got c = {c}"
        )));
    }
    let h = step / exp_int(2);
    let neg_one = -Coeff::one();
    let val = if e.coeff == neg_one && e.exp == h {
        // q^{h n(n+1)/2}
        let exp = h * exp_int(n) * exp_int(n + 1) / exp_int(2);
        Series::monomial(&Coeff::one(), &exp, prec)
    } else if e.coeff == neg_one && e.exp == h * exp_int(3) {
        // (1+q^h)/(1+q^{h(2n+1)}) q^{h n(n+3)/2}
        let exp = h * exp_int(n) * exp_int(n + 3) / exp_int(2);
        let mut s = Series::monomial(&Coeff::one(), &exp, prec);
        s.mul_binomial(&Coeff::one(), &h);
        let eh = h * exp_int(2 * n + 1);
        s.div_binomial(&Coeff::one(), &eh);
        s
    } else if e.coeff.is_one() && e.exp == h * exp_int(3) {
        // parity split with (1-q^h)/(1-q^{h(4m+1 or 4m+3)})
        let (sign, quad, denom_mult) = if n % 2 == 0 {
            let m = n / 2;
            (m % 2, 2 * m * m + 3 * m, 4 * m + 1)
        } else {
            let m = (n - 1) / 2;
            (m % 2, 2 * m * m + 5 * m + 2, 4 * m + 3)
        };
        let c0 = if sign == 0 { Coeff::one() } else { -Coeff::one() };
        let mut s = Series::monomial(&c0, &(h * exp_int(quad)), prec);
        s.mul_binomial(&neg_one, &h);
        let eh = h * exp_int(denom_mult);
        s.div_binomial(&neg_one, &eh);
        s
    } else if e.coeff.is_one() && e.exp == h {
        // pure monomials with a parity sign
        let (sign, quad) = if n % 2 == 0 {
            let m = n / 2;
            (m % 2, 2 * m * m + m)
        } else {
            let m = (n - 1) / 2;
            ((m + 1) % 2, 2 * m * m + 3 * m + 1)
        };
        let c0 = if sign == 0 { Coeff::one() } else { -Coeff::one() };
        Series::monomial(&c0, &(h * exp_int(quad)), prec)
    } else {
        return Err(QError::UnsupportedSpecialization(format!(
            "whipple_rhs: e = {e} does not match a known pattern for step {step}"
        )));
    };
    Ok(val)
}

/// Whipple closed form for the (beta, c) pattern of the generalized theorem:
/// (c q^{-ns}, b2 q^{s-ns}/c; q^{2s})_n / (c, b2 q^s/c; q^s)_n * q^{s n(n+1)/2}
/// with b2 = beta^2.
pub fn whipple_general_rhs(
    beta_sq: &Monomial,
    c: &Monomial,
    step: &Exp,
    n: i64,
    prec: &Exp,
) -> QResult<Series> {
    if c.is_zero() {
        return Err(QError::UnsupportedSpecialization(
            "whipple_general_rhs needs c != 0; use whipple_rhs".into(),
        ));
    }
    let double = step * exp_int(2);
    let shift = Monomial::q_pow(-step * exp_int(n));
    let base1 = c.mul(&shift);
    let base2 = beta_sq.mul(&Monomial::q_pow(*step)).mul(&shift).div(c);
    let mut out = poch_finite(&base1, &double, n, prec)?;
    out = out.mul(&poch_finite(&base2, &double, n, prec)?);
    let quad = step * exp_int(n) * exp_int(n + 1) / exp_int(2);
    out.mul_monomial(&Coeff::one(), &quad);
    div_poch(&mut out, c, step, n)?;
    let low2 = beta_sq.mul(&Monomial::q_pow(*step)).div(c);
    div_poch(&mut out, &low2, step, n)?;
    Ok(out)
}

/// Verma-Jain closed form at half-step h (the 4phi3 lives at base q^{2h}):
/// (-q^h, q^h a/c; q^h)_n (1+a) (-c)^n / ((-a, c; q^h)_n (1 + a q^{2hn})).
///
/// Limit-safe at c = 0, where it degenerates to
/// (1+q^{hn})/(1+q^{2hn}) q^{h n(n+1)/2} for a = 1.
pub fn verma_jain_rhs(
    a: &Monomial,
    c: &Monomial,
    halfstep: &Exp,
    n: i64,
    prec: &Exp,
) -> QResult<Series> {
    let neg_qh = Monomial::new(-Coeff::one(), *halfstep);
    let mut out = poch_finite(&neg_qh, halfstep, n, prec)?;
    // (q^h a/c; q^h)_n (-c)^n = (-1)^n prod_k (c - a q^{h(k+1)})
    let aqh = a.mul(&Monomial::q_pow(*halfstep));
    out = out.mul(&poch_scaled(&aqh, c, halfstep, n, prec));
    if n % 2 == 1 {
        out.scale_coeffs(&(-Coeff::one()));
    }
    mul_one_minus(&mut out, &(-a.coeff.clone()), &a.exp); // (1 + a)
    div_poch(&mut out, &a.neg(), halfstep, n)?;
    div_poch(&mut out, c, halfstep, n)?;
    let e = a.exp + halfstep * exp_int(2 * n);
    div_one_minus(&mut out, &(-a.coeff.clone()), &e)?; // 1/(1 + a q^{2hn})
    Ok(out)
}

/// Andrews' 4phi3 closed form, parameterized by the squares a^2, c^2 (the
/// bare parameters occur only in conjugate pairs, so only the squares are
/// rational in general):
/// 0 for odd n; c^n (q^s, a^2 q^{2s}/c^2; q^{2s})_{n/2} /
/// (a^2 q^{2s}, c^2 q^s; q^{2s})_{n/2} for even n. Limit-safe at c^2 = 0.
pub fn andrews_4phi3_rhs(
    a_sq: &Monomial,
    c_sq: &Monomial,
    step: &Exp,
    n: i64,
    prec: &Exp,
) -> QResult<Series> {
    if n % 2 == 1 {
        return Ok(Series::monomial(&Coeff::zero(), &Exp::zero(), prec));
    }
    let m = n / 2;
    let double = step * exp_int(2);
    let q_s = Monomial::q_pow(*step);
    let mut out = poch_finite(&q_s, &double, m, prec)?;
    let a2q = a_sq.mul(&Monomial::q_pow(double));
    out = out.mul(&poch_scaled(&a2q, c_sq, &double, m, prec));
    div_poch(&mut out, &a2q, &double, m)?;
    div_poch(&mut out, &c_sq.mul(&q_s), &double, m)?;
    Ok(out)
}

/// Andrews' "strange" 5phi4 closed form:
/// (1-a)(1-a^{1/3} q^{2n/3}) (q;q)_n (a^{1/3}; q^{1/3})_n /
/// ((1-a^{1/3})(1-a q^{2n}) (a;q)_n (q^{1/3};q^{1/3})_n) * (a q)^{n/3},
/// with a = 1 taken as the algebraic limit (1+q^{n/3}) q^{n/3} / (1+q^n).
///
/// a^{1/3} must itself be a rational monomial.
pub fn andrews_strange_rhs(alpha: &Monomial, step: &Exp, n: i64, prec: &Exp) -> QResult<Series> {
    let third = step / exp_int(3);
    if n == 0 {
        return Ok(Series::monomial(&Coeff::one(), &Exp::zero(), prec));
    }
    if alpha.is_one() {
        let e = third * exp_int(n);
        let mut out = Series::monomial(&Coeff::one(), &e, prec);
        out.mul_binomial(&Coeff::one(), &e);
        let en = step * exp_int(n);
        out.div_binomial(&Coeff::one(), &en);
        return Ok(out);
    }
    let a3 = alpha.cbrt().ok_or_else(|| {
        QError::UnsupportedSpecialization(format!("alpha^(1/3) of {alpha} is not a monomial"))
    })?;
    let q3 = Monomial::q_pow(third);
    let mut out = poch_finite(&Monomial::q_pow(*step), step, n, prec)?;
    out = out.mul(&poch_finite(&a3, &third, n, prec)?);
    mul_one_minus(&mut out, &alpha.coeff, &alpha.exp);
    let e = a3.exp + third * exp_int(2 * n);
    mul_one_minus(&mut out, &a3.coeff, &e);
    let scalar = a3.pow(n).mul(&Monomial::q_pow(third * exp_int(n)));
    mul_mono(&mut out, &scalar);
    div_one_minus(&mut out, &a3.coeff, &a3.exp)
        .map_err(|_| QError::UnsupportedSpecialization("alpha^(1/3) = 1 but alpha != 1".into()))?;
    let e = alpha.exp + step * exp_int(2 * n);
    div_one_minus(&mut out, &alpha.coeff, &e)?;
    div_poch(&mut out, alpha, step, n)?;
    div_poch(&mut out, &q3, &third, n)?;
    Ok(out)
}

/// Andrews' root-of-unity 5phi4 closed form with the mod-3 branch logic:
/// for alpha = 1 the resolved limit is 1 (n = 0 mod 3) and -1/2 otherwise;
/// for other alpha it vanishes off multiples of 3 and equals
/// (q;q)_n (alpha;q^3)_{n/3} alpha^{n/3} / ((alpha;q)_n (q^3;q^3)_{n/3})
/// at n = 3m.
pub fn andrews_rootunity_rhs(alpha: &Monomial, step: &Exp, n: i64, prec: &Exp) -> QResult<Series> {
    if alpha.is_one() {
        let c = if n % 3 == 0 { coeff_int(1) } else { coeff_ratio(-1, 2) };
        return Ok(Series::monomial(&c, &Exp::zero(), prec));
    }
    if n % 3 != 0 {
        return Ok(Series::monomial(&Coeff::zero(), &Exp::zero(), prec));
    }
    let m = n / 3;
    let triple = step * exp_int(3);
    let mut out = poch_finite(&Monomial::q_pow(*step), step, n, prec)?;
    out = out.mul(&poch_finite(alpha, &triple, m, prec)?);
    mul_mono(&mut out, &alpha.pow(m));
    div_poch(&mut out, alpha, step, n)?;
    div_poch(&mut out, &Monomial::q_pow(triple), &triple, m)?;
    Ok(out)
}

/// Divide `f` by (a; q^step)_n factor-by-factor (no dense inversion).
pub(crate) fn div_poch(f: &mut Series, a: &Monomial, step: &Exp, n: i64) -> QResult<()> {
    if a.is_zero() {
        return Ok(());
    }
    for k in 0..n {
        let e = a.exp + step * exp_int(k);
        div_one_minus(f, &a.coeff, &e).map_err(|_| {
            QError::UnsupportedSpecialization(format!(
                "zero factor (1 - {} q^{}) in a denominator Pochhammer",
                a.coeff, e
            ))
        })?;
    }
    Ok(())
}

/// Multiply `f` by (a; q^step)_n factor-by-factor.
pub(crate) fn mul_poch(f: &mut Series, a: &Monomial, step: &Exp, n: i64) {
    if a.is_zero() {
        return;
    }
    for k in 0..n {
        let e = a.exp + step * exp_int(k);
        mul_one_minus(f, &a.coeff, &e);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::exp_ratio;

    fn q_pow(e: i64) -> Monomial {
        Monomial::q_pow(exp_int(e))
    }

    fn assert_eq_series(lhs: &Series, rhs: &Series) {
        let order = lhs.prec().min(rhs.prec());
        if let Some(mm) = Series::equal_up_to(lhs, rhs, &order).unwrap() {
            panic!("mismatch: {}\n lhs={}\n rhs={}", mm, lhs, rhs);
        }
    }

    #[test]
    fn phi_terminates_on_unit_upper() {
        let spec = PhiSpec::plain(
            vec![Monomial::one(), q_pow(2)],
            vec![q_pow(3)],
            exp_int(1),
            q_pow(1),
        );
        let f = phi(&spec, &exp_int(20)).unwrap();
        assert_eq_series(&f, &Series::one(20));
    }

    #[test]
    fn phi_two_term_example() {
        // 2phi1(q^{-1}, q^2; q^3; q, q) = q^2 (1-q)/(1-q^3)
        let spec = PhiSpec::plain(
            vec![q_pow(-1), q_pow(2)],
            vec![q_pow(3)],
            exp_int(1),
            q_pow(1),
        );
        let f = phi(&spec, &exp_int(25)).unwrap();
        let mut g = Series::monomial(&Coeff::one(), &exp_int(2), &exp_int(25));
        g.mul_binomial(&(-Coeff::one()), &exp_int(1));
        g.div_binomial(&(-Coeff::one()), &exp_int(3));
        assert_eq_series(&f, &g);
        let oracle =
            chu_vandermonde_rhs(&q_pow(2), &q_pow(3), &exp_int(1), 1, &exp_int(25)).unwrap();
        assert_eq_series(&f, &oracle);
    }

    #[test]
    fn phi_nonterminating_needs_positive_argument() {
        let spec = PhiSpec::plain(vec![q_pow(1)], vec![], exp_int(1), Monomial::one());
        assert!(matches!(phi(&spec, &exp_int(10)), Err(QError::NonTerminating(_))));
    }

    #[test]
    fn phi_pole_detection() {
        let spec = PhiSpec::plain(
            vec![q_pow(-5), q_pow(1)],
            vec![q_pow(-2)],
            exp_int(1),
            q_pow(1),
        );
        assert!(matches!(phi(&spec, &exp_int(10)), Err(QError::PoleInLowerParameter(_))));
        // a pole beyond the termination order is harmless
        let spec = PhiSpec::plain(
            vec![q_pow(-2), q_pow(1)],
            vec![q_pow(-5)],
            exp_int(1),
            q_pow(1),
        );
        assert!(phi(&spec, &exp_int(10)).is_ok());
    }

    #[test]
    fn phi_matched_pair_cancellation() {
        let base = PhiSpec::plain(
            vec![q_pow(-6), q_pow(2)],
            vec![q_pow(3)],
            exp_int(1),
            q_pow(1),
        );
        let with_pair = PhiSpec::plain(
            vec![q_pow(-6), q_pow(2), Monomial::from_ints(-1, 2)],
            vec![q_pow(3), Monomial::from_ints(-1, 2)],
            exp_int(1),
            q_pow(1),
        );
        let f = phi(&base, &exp_int(40)).unwrap();
        let g = phi(&with_pair, &exp_int(40)).unwrap();
        assert_eq_series(&f, &g);
    }

    #[test]
    fn chu_vandermonde_oracle_matches_phi() {
        let step = exp_int(2);
        let cases: Vec<(Monomial, Monomial)> = vec![
            (q_pow(2), q_pow(3)),
            (Monomial::from_ints(-1, 2), q_pow(3)),
            (q_pow(4), Monomial::from_ints(-1, 2)),
            (Monomial::from_ints(-1, 0), q_pow(5)),
        ];
        for (a, c) in cases {
            for n in 0..=12 {
                let prec = exp_int(80);
                let oracle = chu_vandermonde_rhs(&a, &c, &step, n, &prec).unwrap();
                let spec = PhiSpec::plain(
                    vec![Monomial::q_pow(-step * exp_int(n)), a.clone()],
                    vec![c.clone()],
                    step,
                    Monomial::q_pow(step),
                );
                let direct = phi(&spec, &prec).unwrap();
                assert_eq_series(&direct, &oracle);
            }
        }
    }

    #[test]
    fn chu_zero_a_limit_matches_scaled_route() {
        let step = exp_int(1);
        let c = q_pow(3);
        for n in 0..8 {
            let prec = exp_int(60);
            let oracle = chu_vandermonde_rhs(&Monomial::zero(), &c, &step, n, &prec).unwrap();
            let mut expect = poch_scaled(&c, &Monomial::zero(), &step, n, &prec);
            div_poch(&mut expect, &c, &step, n).unwrap();
            assert_eq_series(&oracle, &expect);
        }
    }

    #[test]
    fn pfaff_oracle_matches_phi() {
        // (alpha, b, c, step) patterns, including the paper's shapes (q^2,-1,q)
        // and the half-exponent (1, q^{1/2}, -q^{1/2}).
        let cases: Vec<(Monomial, Monomial, Monomial, Exp)> = vec![
            (q_pow(2), Monomial::from_ints(-1, 0), q_pow(1), exp_int(2)),
            (q_pow(2), q_pow(1), Monomial::from_ints(-1, 1), exp_int(2)),
            (q_pow(1), q_pow(1), q_pow(2), exp_int(1)),
            (
                Monomial::one(),
                Monomial::q_pow(exp_ratio(1, 2)),
                Monomial::new(-Coeff::one(), exp_ratio(1, 2)),
                exp_int(1),
            ),
        ];
        for (alpha, b, c, step) in &cases {
            for n in 0..=12 {
                let prec = exp_int(70);
                let oracle = pfaff_rhs(alpha, b, c, step, n, &prec).unwrap();
                let upper = vec![
                    Monomial::q_pow(-step * exp_int(n)),
                    alpha.mul(&Monomial::q_pow(step * exp_int(n))),
                    alpha.mul(b).mul(c).mul(&Monomial::q_pow(-*step)),
                ];
                let lower = vec![alpha.mul(b), alpha.mul(c)];
                let spec = PhiSpec::plain(upper, lower, *step, Monomial::q_pow(*step));
                let direct = phi(&spec, &prec).unwrap();
                assert_eq_series(&direct, &oracle);
            }
        }
    }

    #[test]
    fn whipple_cases_match_phi() {
        let step = exp_int(2);
        for e in [
            Monomial::from_ints(-1, 1),
            Monomial::from_ints(-1, 3),
            Monomial::from_ints(1, 3),
            Monomial::from_ints(1, 1),
        ] {
            for n in 0..=12 {
                let prec = exp_int(130);
                let oracle = whipple_rhs(&Monomial::zero(), &e, &step, n, &prec).unwrap();
                let spec = PhiSpec::plain(
                    vec![
                        Monomial::q_pow(exp_int(-2 * n)),
                        Monomial::q_pow(exp_int(2 * n + 2)),
                        Monomial::zero(),
                    ],
                    vec![Monomial::from_ints(-1, 2), e.clone()],
                    step,
                    Monomial::q_pow(step),
                );
                let direct = phi(&spec, &prec).unwrap();
                assert_eq_series(&direct, &oracle);
            }
        }
        // frozen spot values
        let a13 =
            whipple_rhs(&Monomial::zero(), &Monomial::from_ints(-1, 1), &step, 2, &exp_int(20))
                .unwrap();
        assert_eq_series(&a13, &Series::monomial(&Coeff::one(), &exp_int(3), &exp_int(20)));
        let a18 =
            whipple_rhs(&Monomial::zero(), &Monomial::from_ints(-1, 3), &step, 0, &exp_int(20))
                .unwrap();
        assert_eq_series(&a18, &Series::one(20));
        let unsupported =
            whipple_rhs(&Monomial::zero(), &q_pow(2), &step, 1, &exp_int(20));
        assert!(matches!(unsupported, Err(QError::UnsupportedSpecialization(_))));
    }

    #[test]
    fn whipple_general_matches_phi() {
        let step = exp_int(2);
        let cases: Vec<(Monomial, Monomial)> = vec![
            (Monomial::from_ints(-1, 0), q_pow(1)), // beta = i, c = q
            (Monomial::from_ints(-1, 2), Monomial::from_ints(-1, 1)), // beta = qi, c = -q
            (q_pow(2), q_pow(1)),
            (q_pow(3), Monomial::from_ints(-1, 2)),
        ];
        for (b2, c) in cases {
            for n in 0..=10 {
                let prec = exp_int(140);
                let oracle = whipple_general_rhs(&b2, &c, &step, n, &prec).unwrap();
                let low2 = b2.mul(&Monomial::q_pow(step)).div(&c);
                let spec = PhiSpec::new(
                    vec![
                        PhiParam::Plain(Monomial::q_pow(exp_int(-2 * n))),
                        PhiParam::Plain(Monomial::q_pow(exp_int(2 * n + 2))),
                        PhiParam::PmPair(b2.clone()),
                    ],
                    vec![
                        PhiParam::Plain(c.clone()),
                        PhiParam::Plain(low2),
                        PhiParam::Plain(Monomial::from_ints(-1, 2)),
                    ],
                    step,
                    Monomial::q_pow(step),
                );
                let direct = phi(&spec, &prec).unwrap();
                assert_eq_series(&direct, &oracle);
            }
        }
    }

    #[test]
    fn verma_jain_matches_phi() {
        let h = exp_int(1);
        let cases: Vec<(Monomial, Monomial)> = vec![
            (Monomial::one(), Monomial::zero()),
            (Monomial::one(), q_pow(1)),
            (q_pow(1), q_pow(2)),
            (q_pow(2), Monomial::from_ints(-1, 1)),
        ];
        for (a, c) in cases {
            for n in 0..=10 {
                let prec = exp_int(120);
                let oracle = verma_jain_rhs(&a, &c, &h, n, &prec).unwrap();
                let a2 = a.mul(&a);
                let spec = PhiSpec::plain(
                    vec![
                        Monomial::q_pow(exp_int(-2 * n)),
                        a2.mul(&Monomial::q_pow(exp_int(2 * n))),
                        c.neg(),
                        c.neg().mul(&q_pow(1)),
                    ],
                    vec![a.neg().mul(&q_pow(1)), a.neg().mul(&q_pow(2)), c.mul(&c)],
                    exp_int(2),
                    Monomial::q_pow(exp_int(2)),
                );
                let direct = phi(&spec, &prec).unwrap();
                assert_eq_series(&direct, &oracle);
            }
        }
        // frozen: a=1, c=0, n=2 -> (1+q^2)/(1+q^4) q^3; n=1 -> (1+q)/(1+q^2) q
        for (n, e, bin, den) in [(2i64, 3i64, 2i64, 4i64), (1, 1, 1, 2)] {
            let v = verma_jain_rhs(&Monomial::one(), &Monomial::zero(), &h, n, &exp_int(40))
                .unwrap();
            let mut expect = Series::monomial(&Coeff::one(), &exp_int(e), &exp_int(40));
            expect.mul_binomial(&Coeff::one(), &exp_int(bin));
            expect.div_binomial(&Coeff::one(), &exp_int(den));
            assert_eq_series(&v, &expect);
        }
    }

    #[test]
    fn andrews_4phi3_matches_phi() {
        let step = exp_int(1);
        let cases: Vec<(Monomial, Monomial)> = vec![
            (Monomial::new(Coeff::one(), exp_int(-1)), Monomial::zero()), // a = q^{-1/2}, c = 0
            (q_pow(1), Monomial::from_ints(-1, 1)),
            (q_pow(2), Monomial::from_ints(-1, 2)),
            (q_pow(1), q_pow(3)),
        ];
        for (a2, c2) in cases {
            for n in 0..=12 {
                let prec = exp_int(120);
                let oracle = andrews_4phi3_rhs(&a2, &c2, &step, n, &prec).unwrap();
                let spec = PhiSpec::new(
                    vec![
                        PhiParam::Plain(Monomial::q_pow(exp_int(-n))),
                        PhiParam::Plain(a2.mul(&Monomial::q_pow(exp_int(n + 1)))),
                        PhiParam::PmPair(c2.clone()),
                    ],
                    vec![
                        PhiParam::PmPair(a2.mul(&Monomial::q_pow(exp_int(2)))),
                        PhiParam::Plain(c2.clone()),
                    ],
                    step,
                    Monomial::q_pow(step),
                );
                let direct = phi(&spec, &prec).unwrap();
                assert_eq_series(&direct, &oracle);
            }
        }
        // odd n vanishes; a = q^{-1/2}, c = 0, n = 2 gives -q
        let z = andrews_4phi3_rhs(&q_pow(1), &q_pow(1), &step, 5, &exp_int(20)).unwrap();
        assert!(z.is_zero());
        let v = andrews_4phi3_rhs(
            &Monomial::new(Coeff::one(), exp_int(-1)),
            &Monomial::zero(),
            &step,
            2,
            &exp_int(20),
        )
        .unwrap();
        assert_eq_series(&v, &Series::monomial(&(-Coeff::one()), &exp_int(1), &exp_int(20)));
    }

    #[test]
    fn andrews_strange_matches_phi() {
        let step = exp_int(1);
        for alpha in [q_pow(3), q_pow(6), Monomial::one()] {
            for n in 0..=12 {
                let prec = exp_int(90);
                let oracle = andrews_strange_rhs(&alpha, &step, n, &prec).unwrap();
                let a3 = alpha.cbrt().unwrap();
                let third = exp_ratio(1, 3);
                let spec = PhiSpec::new(
                    vec![
                        PhiParam::Plain(Monomial::q_pow(exp_int(-n))),
                        PhiParam::Plain(alpha.mul(&Monomial::q_pow(exp_int(n)))),
                        PhiParam::Plain(a3.mul(&Monomial::q_pow(third))),
                        PhiParam::Plain(a3.mul(&Monomial::q_pow(third * exp_int(2)))),
                        PhiParam::Plain(a3.mul(&q_pow(1))),
                    ],
                    vec![
                        PhiParam::PmPair(alpha.mul(&Monomial::q_pow(exp_int(2)))),
                        PhiParam::PmPair(alpha.mul(&q_pow(1))),
                    ],
                    step,
                    Monomial::q_pow(step),
                );
                let direct = phi(&spec, &prec).unwrap();
                assert_eq_series(&direct, &oracle);
            }
        }
    }

    #[test]
    fn andrews_rootunity_matches_phi() {
        let step = exp_int(1);
        // alpha = 1 (A3): the cancelled 4phi3 with an omega pair at m = 0
        for n in 0..=12 {
            let prec = exp_int(90);
            let oracle = andrews_rootunity_rhs(&Monomial::one(), &step, n, &prec).unwrap();
            let spec = PhiSpec::new(
                vec![
                    PhiParam::Plain(Monomial::q_pow(exp_int(-n))),
                    PhiParam::Plain(Monomial::q_pow(exp_int(n))),
                    PhiParam::OmegaPair(exp_int(0)),
                ],
                vec![PhiParam::Plain(Monomial::from_ints(-1, 0)), PhiParam::PmPair(q_pow(1))],
                step,
                Monomial::q_pow(step),
            );
            let direct = phi(&spec, &prec).unwrap();
            assert_eq_series(&direct, &oracle);
        }
        // alpha = q^3 (A12): full 5phi4 with an omega pair at m = 1
        for n in 0..=12 {
            let prec = exp_int(90);
            let alpha = q_pow(3);
            let oracle = andrews_rootunity_rhs(&alpha, &step, n, &prec).unwrap();
            let spec = PhiSpec::new(
                vec![
                    PhiParam::Plain(Monomial::q_pow(exp_int(-n))),
                    PhiParam::Plain(Monomial::q_pow(exp_int(n + 3))),
                    PhiParam::Plain(q_pow(1)),
                    PhiParam::OmegaPair(exp_int(1)),
                ],
                vec![
                    PhiParam::PmPair(q_pow(3)),
                    PhiParam::Plain(q_pow(2)),
                    PhiParam::Plain(Monomial::from_ints(-1, 2)),
                ],
                step,
                Monomial::q_pow(step),
            );
            let direct = phi(&spec, &prec).unwrap();
            assert_eq_series(&direct, &oracle);
        }
        // frozen A3 values: 1 at n = 0 mod 3, -1/2 otherwise
        for (n, num, den) in [(3i64, 1i64, 1i64), (1, -1, 2), (2, -1, 2), (0, 1, 1)] {
            let v = andrews_rootunity_rhs(&Monomial::one(), &step, n, &exp_int(10)).unwrap();
            let expect =
                Series::monomial(&coeff_ratio(num, den), &exp_int(0), &exp_int(10));
            assert_eq_series(&v, &expect);
        }
    }

    #[test]
    fn terminating_phi_is_polynomial() {
        // q-binomial theorem: 1phi0(q^{-N}; -; q, z) = (q^{-N} z; q)_N, a
        // polynomial; no coefficients may appear beyond its degree bound.
        for (n, m) in [(4i64, 5i64), (3, 4), (6, 7)] {
            let spec = PhiSpec::plain(vec![q_pow(-n)], vec![], exp_int(1), q_pow(m));
            let f = phi(&spec, &exp_int(200)).unwrap();
            let expect =
                poch_finite(&q_pow(m - n), &exp_int(1), n, &exp_int(200)).unwrap();
            assert_eq_series(&f, &expect);
            let bound = n * (m - n) + n * (n - 1) / 2;
            for (e, _) in f.terms() {
                assert!(e <= exp_int(bound), "term q^{e} beyond degree bound {bound}");
            }
        }
    }
}
