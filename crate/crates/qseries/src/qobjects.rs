//! q-Pochhammer symbols, conjugate-pair rewrites and the Jacobi triple product.
//!
//! Everything here evaluates to a truncated [`Series`]. Complex parameter
//! values never enter the coefficient ring: the rewrites
//! (b,-b;q)_n = (b^2;q^2)_n and (wq^m, w^2q^m;q)_n = prod (1+q^{m+k}+q^{2m+2k})
//! cover every conjugate pair the identities use, keeping all arithmetic
//! rational.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{QError, QResult};
use crate::series::{coeff_int, exp_int, Coeff, Exp, Series};

/// An exact rational coefficient times q raised to an exact rational exponent.
///
/// This is the universal parameter value: a, b, c, alpha, beta^2 and friends
/// are all monomials, including 0 (coeff 0, exp 0).
#[derive(Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Coeff,
    pub exp: Exp,
}

impl Monomial {
    pub fn new(coeff: Coeff, exp: Exp) -> Self {
        if coeff.is_zero() {
            Monomial { coeff, exp: Exp::zero() }
        } else {
            Monomial { coeff, exp }
        }
    }

    pub fn zero() -> Self {
        Monomial::new(Coeff::zero(), Exp::zero())
    }

    pub fn one() -> Self {
        Monomial::new(Coeff::one(), Exp::zero())
    }

    /// c * q^e with integer arguments.
    pub fn from_ints(c: i64, e: i64) -> Self {
        Monomial::new(coeff_int(c), exp_int(e))
    }

    /// q^e
    pub fn q_pow(e: Exp) -> Self {
        Monomial::new(Coeff::one(), e)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Exactly the monomial 1 (the degenerate (1;q)_inf base).
    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exp.is_zero()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(&self.coeff * &other.coeff, self.exp + other.exp)
    }

    pub fn neg(&self) -> Monomial {
        Monomial::new(-self.coeff.clone(), self.exp)
    }

    /// self / other; other must be nonzero.
    pub fn div(&self, other: &Monomial) -> Monomial {
        assert!(!other.is_zero(), "division by zero monomial");
        Monomial::new(&self.coeff / &other.coeff, self.exp - other.exp)
    }

    pub fn pow(&self, n: i64) -> Monomial {
        if self.is_zero() {
            assert!(n >= 0, "negative power of zero monomial");
            if n == 0 {
                return Monomial::one();
            }
            return Monomial::zero();
        }
        let mut c = Coeff::one();
        let base = if n >= 0 { self.coeff.clone() } else { Coeff::one() / &self.coeff };
        for _ in 0..n.unsigned_abs() {
            c *= &base;
        }
        Monomial::new(c, self.exp * exp_int(n))
    }

    /// Square root when the result is again a rational monomial.
    pub fn sqrt(&self) -> Option<Monomial> {
        if self.is_zero() {
            return Some(Monomial::zero());
        }
        if self.coeff.is_negative() {
            return None;
        }
        let num = self.coeff.numer().sqrt();
        let den = self.coeff.denom().sqrt();
        if &(&num * &num) != self.coeff.numer() || &(&den * &den) != self.coeff.denom() {
            return None;
        }
        let e = self.exp / exp_int(2);
        Some(Monomial::new(Coeff::new(num, den), e))
    }

    /// Cube root when the result is again a rational monomial.
    pub fn cbrt(&self) -> Option<Monomial> {
        if self.is_zero() {
            return Some(Monomial::zero());
        }
        let num = self.coeff.numer().cbrt();
        let den = self.coeff.denom().cbrt();
        if &(&num * &num * &num) != self.coeff.numer() || &(&den * &den * &den) != self.coeff.denom()
        {
            return None;
        }
        let e = self.exp / exp_int(3);
        Some(Monomial::new(Coeff::new(num, den), e))
    }

    /// As a series with the requested precision.
    pub fn to_series(&self, prec: &Exp) -> Series {
        Series::monomial(&self.coeff, &self.exp, prec)
    }

    /// Is this exactly q^{-N*step} for an integer N >= 0?
    pub fn q_negative_power(&self, step: &Exp) -> Option<i64> {
        if !self.coeff.is_one() {
            return None;
        }
        if self.exp.is_zero() {
            return Some(0);
        }
        if self.exp.is_positive() {
            return None;
        }
        let r = -self.exp / step;
        if r.is_integer() && !r.is_negative() {
            Some(r.to_integer())
        } else {
            None
        }
    }
}

fn fmt_monomial(m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if m.is_zero() {
        return write!(f, "0");
    }
    if m.exp.is_zero() {
        return write!(f, "{}", m.coeff);
    }
    if m.coeff.is_one() {
    } else if (-m.coeff.clone()).is_one() {
        write!(f, "-")?;
    } else {
        write!(f, "{}*", m.coeff)?;
    }
    if m.exp == Exp::one() {
        write!(f, "q")
    } else if m.exp.is_integer() {
        write!(f, "q^{}", m.exp)
    } else {
        write!(f, "q^({})", m.exp)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_monomial(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_monomial(self, f)
    }
}

// ---------------------------------------------------------------------------
// Finite and infinite Pochhammer symbols
// ---------------------------------------------------------------------------

/// (a; q^step)_n = prod_{k=0}^{n-1} (1 - a q^{step*k}) as a polynomial series.
///
/// n = 0 gives 1. n = -1 is allowed only for the (q^step; q^step)_{-1} = 1
/// convention that several Slater sums rely on.
pub fn poch_finite(a: &Monomial, step: &Exp, n: i64, prec: &Exp) -> QResult<Series> {
    if n < -1 {
        return Err(QError::UnsupportedNegativeIndex(format!("index {}", n)));
    }
    if n == -1 {
        if a.coeff.is_one() && a.exp == *step {
            return Ok(Series::monomial(&Coeff::one(), &Exp::zero(), prec));
        }
        return Err(QError::UnsupportedNegativeIndex(format!(
            "(a;q)_(-1) only defined for a = q^step, got a={}",
            a
        )));
    }
    let mut out = Series::monomial(&Coeff::one(), &Exp::zero(), prec);
    if a.is_zero() {
        return Ok(out);
    }
    for k in 0..n {
        let e = a.exp + step * exp_int(k);
        mul_one_minus(&mut out, &a.coeff, &e);
        if out.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// Multiply by (1 - c q^e) where e may be zero or negative (Laurent factors).
pub(crate) fn mul_one_minus(f: &mut Series, c: &Coeff, e: &Exp) {
    if c.is_zero() {
        return;
    }
    let neg = -c.clone();
    if e.is_positive() {
        f.mul_binomial(&neg, e);
    } else {
        f.mul_linear(&Coeff::one(), &Exp::zero(), &neg, e);
    }
}

/// Divide by (1 - c q^e); errors on the exactly-zero factor.
pub(crate) fn div_one_minus(f: &mut Series, c: &Coeff, e: &Exp) -> QResult<()> {
    if c.is_zero() {
        return Ok(());
    }
    if e.is_zero() && c.is_one() {
        return Err(QError::PoleInLowerParameter("factor (1 - q^0) is zero".into()));
    }
    let neg = -c.clone();
    if e.is_positive() {
        f.div_binomial(&neg, e);
    } else {
        f.div_linear(&Coeff::one(), &Exp::zero(), &neg, e);
    }
    Ok(())
}

/// Multiply by the monomial value in place.
pub(crate) fn mul_mono(f: &mut Series, m: &Monomial) {
    f.mul_monomial(&m.coeff, &m.exp);
}

/// (a; q^step)_inf = prod_{k>=0} (1 - a q^{step*k}), truncated at prec.
///
/// Requires a.exp >= 0 and, when a.exp = 0, a.coeff != 1 (the k = 0 factor is
/// then an honest constant unit). The degenerate base a = 1 gives the exact
/// zero series -- (1;q)_inf legitimately shows up in triple-product corner
/// cases, so it is a flagged value, not an error.
pub fn poch_inf(a: &Monomial, step: &Exp, prec: &Exp) -> QResult<Series> {
    if a.is_zero() {
        return Ok(Series::monomial(&Coeff::one(), &Exp::zero(), prec));
    }
    if a.exp.is_negative() {
        return Err(QError::DivergentProduct(format!("(({});q^{})_inf", a, step)));
    }
    if !step.is_positive() {
        return Err(QError::DivergentProduct(format!("step {} must be positive", step)));
    }
    if a.is_one() {
        // (1;q)_inf = 0 exactly: the zero series is the flagged value.
        return Ok(Series::monomial(&Coeff::zero(), &Exp::zero(), prec));
    }
    let mut out = Series::monomial(&Coeff::one(), &Exp::zero(), prec);
    let mut k = 0i64;
    loop {
        let e = a.exp + step * exp_int(k);
        if e >= *prec {
            break;
        }
        mul_one_minus(&mut out, &a.coeff, &e);
        k += 1;
    }
    Ok(out)
}

/// The literal product prod_{k=0}^{n-1} (a - c q^{step*k}).
///
/// For a != 0 this equals a^n (c/a; q^step)_n; at a = 0 it degenerates to
/// (-c)^n q^{step n(n-1)/2}. This is the limit-safe carrier for every
/// "(q/a;q)_n (alpha a)^n"-shaped factor, so corollary substitutions a -> 0
/// stay algebraic.
pub fn poch_scaled(c: &Monomial, a: &Monomial, step: &Exp, n: i64, prec: &Exp) -> Series {
    assert!(n >= 0, "poch_scaled needs n >= 0");
    let mut out = Series::monomial(&Coeff::one(), &Exp::zero(), prec);
    for k in 0..n {
        let e = c.exp + step * exp_int(k);
        out.mul_linear(&a.coeff, &a.exp, &(-c.coeff.clone()), &e);
        if out.is_zero() {
            break;
        }
    }
    out
}

/// (beta, -beta; q^step)_n rewritten as (beta^2; q^{2 step})_n.
///
/// `beta_sq` is the rational monomial beta^2 (e.g. -1 for beta = i).
pub fn pair_pm(beta_sq: &Monomial, step: &Exp, n: i64, prec: &Exp) -> Series {
    let double = step * exp_int(2);
    poch_finite(beta_sq, &double, n, prec).expect("n >= 0 pair")
}

/// (w q^m, w^2 q^m; q^step)_n with w = e^{2 pi i / 3}, rewritten as the
/// rational product prod_{k=0}^{n-1} (1 + q^{m+step*k} + q^{2(m+step*k)}).
///
/// At m = 0 the k = 0 factor is (1-w)(1-w^2) = 3.
pub fn pair_omega(m: &Exp, step: &Exp, n: i64, prec: &Exp) -> Series {
    assert!(!m.is_negative(), "pair_omega needs m >= 0");
    let mut out = Series::monomial(&Coeff::one(), &Exp::zero(), prec);
    for k in 0..n {
        let e = m + step * exp_int(k);
        if e.is_zero() {
            out.scale_coeffs(&coeff_int(3));
        } else {
            let mut f = out.clone();
            f.mul_binomial(&Coeff::one(), &e);
            let two_e = e * exp_int(2);
            out.mul_monomial(&Coeff::one(), &two_e);
            out = out.add(&f);
        }
    }
    out
}

/// Infinite omega pair (w q^m, w^2 q^m; q^step)_inf, truncated.
pub fn pair_omega_inf(m: &Exp, step: &Exp, prec: &Exp) -> Series {
    assert!(m.is_positive(), "infinite omega pair needs m > 0");
    let mut out = Series::monomial(&Coeff::one(), &Exp::zero(), prec);
    let mut k = 0i64;
    loop {
        let e = m + step * exp_int(k);
        if e >= *prec {
            break;
        }
        let mut f = out.clone();
        f.mul_binomial(&Coeff::one(), &e);
        let two_e = e * exp_int(2);
        out.mul_monomial(&Coeff::one(), &two_e);
        out = out.add(&f).truncate(prec);
        k += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Jacobi triple product
// ---------------------------------------------------------------------------

/// Bilateral theta sum  sum_{n in Z} q^{step*(n^2-n)/2} z^n, truncated at prec.
pub fn theta_sum_lhs(z: &Monomial, step: &Exp, prec: &Exp) -> QResult<Series> {
    if z.is_zero() {
        return Err(QError::DivergentProduct("theta sum needs z != 0".into()));
    }
    let mut total = Series::monomial(&Coeff::zero(), &Exp::zero(), prec);
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { 0 } else { -1 };
        let mut beyond = 0u32;
        loop {
            let nn = exp_int(n);
            let e = step * (nn * nn - nn) / exp_int(2) + z.exp * nn;
            if e < *prec {
                beyond = 0;
                let c = pow_coeff(&z.coeff, n);
                total = total.add(&Series::monomial(&c, &e, prec));
            } else {
                beyond += 1;
                // Quadratic leading exponent: two consecutive misses means
                // every later term is beyond prec too.
                if beyond >= 2 {
                    break;
                }
            }
            n += dir;
            if n.unsigned_abs() > 4_000_000 {
                return Err(QError::NonTerminating("theta window too large".into()));
            }
        }
    }
    Ok(total)
}

/// Triple product (-z, -q^step/z, q^step; q^step)_inf, truncated at prec.
pub fn triple_product_rhs(z: &Monomial, step: &Exp, prec: &Exp) -> QResult<Series> {
    if z.is_zero() {
        return Err(QError::DivergentProduct("triple product needs z != 0".into()));
    }
    if z.exp.is_negative() || z.exp > *step {
        return Err(QError::DivergentProduct(format!(
            "triple product window needs 0 <= exp(z) <= step, got z={} step={}",
            z, step
        )));
    }
    let f1 = poch_inf(&z.neg(), step, prec)?;
    let q_over_z = Monomial::q_pow(*step).div(z).neg();
    let f2 = poch_inf(&q_over_z, step, prec)?;
    let f3 = poch_inf(&Monomial::q_pow(*step), step, prec)?;
    Ok(f1.mul(&f2).mul(&f3))
}

fn pow_coeff(c: &Coeff, n: i64) -> Coeff {
    let mut out = Coeff::one();
    let base = if n >= 0 { c.clone() } else { Coeff::one() / c };
    for _ in 0..n.unsigned_abs() {
        out *= &base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{coeff_ratio, exp_ratio};

    fn assert_series_eq(f: &Series, terms: &[(i64, i64)], order: i64) {
        let mut g = Series::zero(order);
        for (e, c) in terms {
            g = g.add(&Series::monomial(&coeff_int(*c), &exp_int(*e), &exp_int(order)));
        }
        let order = f.prec().min(g.prec());
        if let Some(mm) = Series::equal_up_to(f, &g, &order).unwrap() {
            panic!("series mismatch: {}\n f={}\n g={}", mm, f, g);
        }
    }

    #[test]
    fn finite_poch_direct_expansion() {
        // (-q;q)_3 = (1+q)(1+q^2)(1+q^3)
        let a = Monomial::from_ints(-1, 1);
        let f = poch_finite(&a, &exp_int(1), 3, &exp_int(10)).unwrap();
        assert_series_eq(&f, &[(0, 1), (1, 1), (2, 1), (3, 2), (4, 1), (5, 1), (6, 1)], 10);
    }

    #[test]
    fn finite_poch_empty_and_convention() {
        let a = Monomial::from_ints(-7, 3);
        let f = poch_finite(&a, &exp_int(1), 0, &exp_int(5)).unwrap();
        assert_series_eq(&f, &[(0, 1)], 5);

        // (q;q)_{-1} = 1
        let q = Monomial::q_pow(exp_int(1));
        let f = poch_finite(&q, &exp_int(1), -1, &exp_int(5)).unwrap();
        assert_series_eq(&f, &[(0, 1)], 5);

        // but (a;q)_{-1} for other a is rejected
        let bad = poch_finite(&Monomial::from_ints(-1, 1), &exp_int(1), -1, &exp_int(5));
        assert!(matches!(bad, Err(QError::UnsupportedNegativeIndex(_))));
        let worse = poch_finite(&q, &exp_int(1), -2, &exp_int(5));
        assert!(matches!(worse, Err(QError::UnsupportedNegativeIndex(_))));
    }

    #[test]
    fn infinite_poch_pentagonal_prefix() {
        // (q;q)_inf = 1 - q - q^2 + q^5 + q^7 - ... through q^7
        let q = Monomial::q_pow(exp_int(1));
        let f = poch_inf(&q, &exp_int(1), &exp_int(8)).unwrap();
        assert_series_eq(&f, &[(0, 1), (1, -1), (2, -1), (5, 1), (7, 1)], 8);
    }

    #[test]
    fn infinite_poch_edge_cases() {
        let zero = Monomial::zero();
        let f = poch_inf(&zero, &exp_int(1), &exp_int(6)).unwrap();
        assert_series_eq(&f, &[(0, 1)], 6);

        // a = -1, step 2: 2(1+q^2)(1+q^4) through q^6
        let f = poch_inf(&Monomial::from_ints(-1, 0), &exp_int(2), &exp_int(6)).unwrap();
        assert_series_eq(&f, &[(0, 2), (2, 2), (4, 2)], 6);

        // divergent base
        let bad = poch_inf(&Monomial::new(coeff_int(1), exp_int(-1)), &exp_int(1), &exp_int(6));
        assert!(matches!(bad, Err(QError::DivergentProduct(_))));

        // (1;q)_inf = 0 exactly, flagged by the zero series
        let z = poch_inf(&Monomial::one(), &exp_int(1), &exp_int(6)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn scaled_poch_limits() {
        let q = Monomial::q_pow(exp_int(1));
        // a = 0: (-q)(-q^2) = q^3
        let f = poch_scaled(&q, &Monomial::zero(), &exp_int(1), 2, &exp_int(10));
        assert_series_eq(&f, &[(3, 1)], 10);
        // a = q, c = q, n = 1: q - q = 0
        let f = poch_scaled(&q, &q, &exp_int(1), 1, &exp_int(10));
        assert!(f.is_zero());
        // c = q, a = -1, n = 2: (-1-q)(-1-q^2) = 1+q+q^2+q^3
        let f = poch_scaled(&q, &Monomial::from_ints(-1, 0), &exp_int(1), 2, &exp_int(10));
        assert_series_eq(&f, &[(0, 1), (1, 1), (2, 1), (3, 1)], 10);
    }

    #[test]
    fn scaled_poch_matches_plain_for_nonzero_a() {
        // a^n (c/a; q)_n == poch_scaled(c, a, n) for a handful of monomials
        let cases = [
            (Monomial::from_ints(1, 1), Monomial::from_ints(-1, 1)),
            (Monomial::from_ints(-1, 2), Monomial::from_ints(2, 1)),
            (Monomial::new(coeff_ratio(1, 2), exp_int(1)), Monomial::from_ints(1, 2)),
        ];
        for (c, a) in cases {
            for n in 0..6 {
                let lhs = poch_scaled(&c, &a, &exp_int(1), n, &exp_int(20));
                let ratio = c.div(&a);
                let mut rhs = poch_finite(&ratio, &exp_int(1), n, &exp_int(20)).unwrap();
                let an = a.pow(n);
                rhs.mul_monomial(&an.coeff, &an.exp);
                let order = lhs.prec().min(rhs.prec());
                assert_eq!(Series::equal_up_to(&lhs, &rhs, &order).unwrap(), None);
            }
        }
    }

    #[test]
    fn pm_pair_values() {
        // beta^2 = -1, n = 2: (-1;q^2)_2 = 2(1+q^2)
        let f = pair_pm(&Monomial::from_ints(-1, 0), &exp_int(1), 2, &exp_int(8));
        assert_series_eq(&f, &[(0, 2), (2, 2)], 8);
        // beta^2 = -q^2, n = 1: 1 + q^2
        let f = pair_pm(&Monomial::from_ints(-1, 2), &exp_int(1), 1, &exp_int(8));
        assert_series_eq(&f, &[(0, 1), (2, 1)], 8);
        // beta^2 = 0
        let f = pair_pm(&Monomial::zero(), &exp_int(1), 5, &exp_int(8));
        assert_series_eq(&f, &[(0, 1)], 8);
    }

    #[test]
    fn pm_pair_consistency() {
        // (b;q)_n (-b;q)_n = (b^2;q^2)_n for rational b
        for (c, e) in [(1i64, 1i64), (-1, 1), (1, 2), (-1, 2), (-1, 0)] {
            let b = Monomial::from_ints(c, e);
            let b2 = b.mul(&b);
            for n in 0..6 {
                let lhs = poch_finite(&b, &exp_int(1), n, &exp_int(30))
                    .unwrap()
                    .mul(&poch_finite(&b.neg(), &exp_int(1), n, &exp_int(30)).unwrap());
                let rhs = pair_pm(&b2, &exp_int(1), n, &exp_int(30));
                let order = lhs.prec().min(rhs.prec());
                assert_eq!(Series::equal_up_to(&lhs, &rhs, &order).unwrap(), None);
            }
        }
    }

    #[test]
    fn omega_pair_values() {
        // m=0, n=1 -> 3
        let f = pair_omega(&exp_int(0), &exp_int(1), 1, &exp_int(8));
        assert_series_eq(&f, &[(0, 3)], 8);
        // m=1, n=1 -> 1+q+q^2
        let f = pair_omega(&exp_int(1), &exp_int(1), 1, &exp_int(8));
        assert_series_eq(&f, &[(0, 1), (1, 1), (2, 1)], 8);
        // m=0, n=2 -> 3(1+q+q^2)
        let f = pair_omega(&exp_int(0), &exp_int(1), 2, &exp_int(8));
        assert_series_eq(&f, &[(0, 3), (1, 3), (2, 3)], 8);
    }

    #[test]
    fn omega_pair_is_cubic_quotient() {
        // (q, qw, qw^2; q)_n = (q^3;q^3)_n, i.e. pair_omega(1,1,n) = (q^3;q^3)_n / (q;q)_n
        for n in 0..7 {
            let lhs = pair_omega(&exp_int(1), &exp_int(1), n, &exp_int(40));
            let qq = poch_finite(&Monomial::q_pow(exp_int(1)), &exp_int(1), n, &exp_int(40)).unwrap();
            let q3 = poch_finite(&Monomial::q_pow(exp_int(3)), &exp_int(3), n, &exp_int(40)).unwrap();
            let prod = lhs.mul(&qq);
            let order = prod.prec().min(q3.prec());
            assert_eq!(Series::equal_up_to(&prod, &q3, &order).unwrap(), None);
        }
    }

    #[test]
    fn functional_equation() {
        // (a;q)_{m+n} = (a;q)_m (a q^m;q)_n
        let bases = [
            Monomial::from_ints(-1, 1),
            Monomial::from_ints(1, 2),
            Monomial::new(coeff_ratio(2, 3), exp_int(1)),
        ];
        for a in bases {
            for m in 0..5i64 {
                for n in 0..5i64 {
                    let lhs = poch_finite(&a, &exp_int(1), m + n, &exp_int(40)).unwrap();
                    let shifted = Monomial::new(a.coeff.clone(), a.exp + exp_int(m));
                    let rhs = poch_finite(&a, &exp_int(1), m, &exp_int(40))
                        .unwrap()
                        .mul(&poch_finite(&shifted, &exp_int(1), n, &exp_int(40)).unwrap());
                    let order = lhs.prec().min(rhs.prec());
                    assert_eq!(Series::equal_up_to(&lhs, &rhs, &order).unwrap(), None);
                }
            }
        }
    }

    #[test]
    fn theta_sum_equals_triple_product() {
        // z = q, step 2: sum q^{n^2} = 1 + 2q + 2q^4 + 2q^9 + ...
        let z = Monomial::q_pow(exp_int(1));
        let lhs = theta_sum_lhs(&z, &exp_int(2), &exp_int(12)).unwrap();
        assert_series_eq(&lhs, &[(0, 1), (1, 2), (4, 2), (9, 2)], 12);
        let rhs = triple_product_rhs(&z, &exp_int(2), &exp_int(12)).unwrap();
        let order = lhs.prec().min(rhs.prec());
        assert_eq!(Series::equal_up_to(&lhs, &rhs, &order).unwrap(), None);
    }

    #[test]
    fn theta_degenerate_zero() {
        // z = -q^2 over base q^2 (exponent 1 in base units): terms cancel in
        // pairs n <-> -n-1 on the left, the right has a (1-1) factor.
        let z = Monomial::from_ints(-1, 2);
        let lhs = theta_sum_lhs(&z, &exp_int(2), &exp_int(20)).unwrap();
        assert!(lhs.is_zero());
        let rhs = triple_product_rhs(&z, &exp_int(2), &exp_int(20)).unwrap();
        assert!(rhs.is_zero());

        // z = -1: pairs n <-> 1-n cancel, right has (1;q)_inf.
        let z = Monomial::from_ints(-1, 0);
        let lhs = theta_sum_lhs(&z, &exp_int(1), &exp_int(20)).unwrap();
        assert!(lhs.is_zero());
        let rhs = triple_product_rhs(&z, &exp_int(1), &exp_int(20)).unwrap();
        assert!(rhs.is_zero());
    }

    #[test]
    fn sqrt_cbrt() {
        assert_eq!(
            Monomial::from_ints(1, 3).sqrt(),
            Some(Monomial::new(coeff_int(1), exp_ratio(3, 2)))
        );
        assert_eq!(Monomial::from_ints(4, 2).sqrt(), Some(Monomial::from_ints(2, 1)));
        assert_eq!(Monomial::from_ints(-1, 2).sqrt(), None);
        assert_eq!(Monomial::from_ints(8, 3).cbrt(), Some(Monomial::from_ints(2, 1)));
        assert_eq!(Monomial::from_ints(1, 1).cbrt(), Some(Monomial::new(coeff_int(1), exp_ratio(1, 3))));
    }
}
