//! Truncated formal power series in q with exact rational coefficients.
//!
//! A [`Series`] stores coefficients of u^k where u = q^{1/scale}, from
//! `min_exp` up to (exclusive) `prec`. Exponents below `min_exp` are exactly
//! zero; exponents at or above `prec` are *unknown*, not zero. Laurent ranges
//! (negative `min_exp`) are allowed: intermediate theorem terms routinely dip
//! below q^0 before the quadratic exponent takes over.
//!
//! Precision is tracked per value: multiplying by a series of positive
//! valuation gains headroom, which the identity machinery relies on when
//! sum-side terms have quadratically growing leading exponents.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::error::{QError, QResult};

/// Exact rational coefficient.
pub type Coeff = BigRational;
/// Exact rational exponent (numerators/denominators stay tiny).
pub type Exp = Rational64;

/// Build a coefficient from an integer.
pub fn coeff_int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Build a coefficient from a ratio of integers.
pub fn coeff_ratio(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Build an exponent from an integer.
pub fn exp_int(n: i64) -> Exp {
    Rational64::from_integer(n)
}

/// Build an exponent from a ratio of integers.
pub fn exp_ratio(num: i64, den: i64) -> Exp {
    Rational64::new(num, den)
}

/// A truncated formal power series in q^{1/scale}.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    /// Positive integer s: the series lives in u = q^{1/s}.
    scale: i64,
    /// Lowest stored u-exponent. For the zero series this equals `prec`.
    min_exp: i64,
    /// `coeffs[i]` is the coefficient of u^{min_exp + i}.
    coeffs: Vec<Coeff>,
    /// All u-exponents < prec are known; >= prec are unknown.
    prec: i64,
}

/// Outcome of [`Series::equal_up_to`] when the sides differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    /// Smallest q-exponent at which the coefficients differ.
    pub exponent: Exp,
    pub lhs: Coeff,
    pub rhs: Coeff,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "first mismatch at q^{}: lhs={} rhs={}",
            self.exponent, self.lhs, self.rhs
        )
    }
}

impl Series {
    // ------------------------------------------------------------------
    // Construction
    // ------------------------------------------------------------------

    /// The zero series known through u-exponents < prec at the given scale.
    pub fn zero_scaled(scale: i64, prec_u: i64) -> Self {
        assert!(scale >= 1, "scale must be positive");
        Series { scale, min_exp: prec_u, coeffs: Vec::new(), prec: prec_u }
    }

    /// The zero series with integer exponents, known below q^prec.
    pub fn zero(prec: i64) -> Self {
        Series::zero_scaled(1, prec)
    }

    /// The constant one, known below q^prec.
    pub fn one(prec: i64) -> Self {
        Series::monomial(&coeff_int(1), &exp_int(0), &exp_int(prec))
    }

    /// c * q^e known through q-exponents < prec.
    ///
    /// The scale is the least common denominator of `e` and `prec`.
    pub fn monomial(c: &Coeff, e: &Exp, prec: &Exp) -> Self {
        let scale = lcm64(*e.denom(), *prec.denom());
        let prec_u = rescale_exp(prec, scale);
        if c.is_zero() {
            return Series::zero_scaled(scale, prec_u);
        }
        let e_u = rescale_exp(e, scale);
        if e_u >= prec_u {
            return Series::zero_scaled(scale, prec_u);
        }
        Series { scale, min_exp: e_u, coeffs: vec![c.clone()], prec: prec_u }
    }

    /// Series from integer-exponent coefficients `coeffs[i]` of q^{min_exp+i}.
    pub fn from_coeffs(min_exp: i64, coeffs: Vec<Coeff>, prec: i64) -> Self {
        let mut s = Series { scale: 1, min_exp, coeffs, prec };
        s.normalize();
        s
    }

    // ------------------------------------------------------------------
    // Accessors
    // ------------------------------------------------------------------

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Tracked precision as a q-exponent.
    pub fn prec(&self) -> Exp {
        Exp::new(self.prec, self.scale)
    }

    /// Lowest nonzero q-exponent, or None for the zero series.
    pub fn valuation(&self) -> Option<Exp> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(Exp::new(self.min_exp, self.scale))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of q^e. Errors if e is at or beyond the tracked precision.
    pub fn coeff_at(&self, e: &Exp) -> QResult<Coeff> {
        if *e >= self.prec() {
            return Err(QError::InsufficientPrecision {
                needed: format!("q^{}", e),
                have: format!("prec q^{}", self.prec()),
            });
        }
        let scaled = e * Exp::from_integer(self.scale);
        if !scaled.is_integer() {
            return Ok(Coeff::zero());
        }
        let idx = scaled.to_integer() - self.min_exp;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Ok(Coeff::zero())
        } else {
            Ok(self.coeffs[idx as usize].clone())
        }
    }

    /// Iterate (q-exponent, coefficient) over stored nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (Exp, &Coeff)> + '_ {
        let scale = self.scale;
        let min = self.min_exp;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (Exp::new(min + i as i64, scale), c))
    }

    /// The constant term (coefficient of q^0), zero if none stored.
    pub fn constant_term(&self) -> Coeff {
        if self.prec <= 0 {
            return Coeff::zero();
        }
        self.coeff_at(&exp_int(0)).unwrap_or_else(|_| Coeff::zero())
    }

    // ------------------------------------------------------------------
    // Normalization
    // ------------------------------------------------------------------

    fn normalize(&mut self) {
        // Drop stored coefficients at or beyond prec.
        if self.min_exp >= self.prec {
            self.coeffs.clear();
        } else {
            let max_len = (self.prec - self.min_exp) as usize;
            if self.coeffs.len() > max_len {
                self.coeffs.truncate(max_len);
            }
        }
        // Trim leading and trailing zeros.
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.min_exp = self.prec;
        }
    }

    /// Reduce the scale to the smallest one representing all data exactly.
    pub fn canonical_scale(mut self) -> Self {
        if self.scale == 1 {
            return self;
        }
        let mut g = self.scale;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                g = g.gcd(&(self.min_exp + i as i64));
                if g == 1 {
                    return self;
                }
            }
        }
        // Exponents all divisible by g: knowing u-exponents < prec means
        // knowing new-unit exponents < ceil(prec / g).
        let new_scale = self.scale / g;
        let new_prec = div_ceil64(self.prec, g);
        let new_min = if self.coeffs.is_empty() { new_prec } else { self.min_exp / g };
        let mut coeffs = Vec::with_capacity(self.coeffs.len() / g as usize + 1);
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.min_exp + i as i64;
            if c.is_zero() {
                continue;
            }
            let idx = (e / g - new_min) as usize;
            while coeffs.len() <= idx {
                coeffs.push(Coeff::zero());
            }
            coeffs[idx] = c.clone();
        }
        let mut s = Series { scale: new_scale, min_exp: new_min, coeffs, prec: new_prec };
        s.normalize();
        s
    }

    /// Rewrite to a given multiple of the current scale.
    fn upscale(&self, new_scale: i64) -> Series {
        debug_assert!(new_scale % self.scale == 0);
        if new_scale == self.scale {
            return self.clone();
        }
        let f = new_scale / self.scale;
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * f as usize);
        for c in &self.coeffs {
            coeffs.push(c.clone());
            for _ in 1..f {
                coeffs.push(Coeff::zero());
            }
        }
        let mut s = Series {
            scale: new_scale,
            min_exp: self.min_exp * f,
            coeffs,
            prec: self.prec * f,
        };
        s.normalize();
        s
    }

    fn common_scale(f: &Series, g: &Series) -> (Series, Series) {
        if f.scale == g.scale {
            (f.clone(), g.clone())
        } else {
            let l = lcm64(f.scale, g.scale);
            (f.upscale(l), g.upscale(l))
        }
    }

    // ------------------------------------------------------------------
    // Ring operations
    // ------------------------------------------------------------------

    pub fn neg(&self) -> Series {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -c.clone();
        }
        out
    }

    pub fn add(&self, other: &Series) -> Series {
        let (a, b) = Series::common_scale(self, other);
        let prec = a.prec.min(b.prec);
        if a.is_zero() {
            let mut out = b;
            out.prec = prec;
            out.normalize();
            return out;
        }
        if b.is_zero() {
            let mut out = a;
            out.prec = prec;
            out.normalize();
            return out;
        }
        let min = a.min_exp.min(b.min_exp);
        let len = (prec - min).max(0) as usize;
        let mut coeffs = vec![Coeff::zero(); len];
        for (src, base) in [(&a, a.min_exp), (&b, b.min_exp)] {
            for (i, c) in src.coeffs.iter().enumerate() {
                let idx = base + i as i64 - min;
                if idx >= 0 && (idx as usize) < len && !c.is_zero() {
                    coeffs[idx as usize] += c;
                }
            }
        }
        let mut s = Series { scale: a.scale, min_exp: min, coeffs, prec };
        s.normalize();
        s
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Series) -> Series {
        let (a, b) = Series::common_scale(self, other);
        // Propagated precision: f*g is known below min(prec_f + val_g, prec_g + val_f).
        let prec = (a.prec + b.min_exp).min(b.prec + a.min_exp);
        if a.is_zero() || b.is_zero() {
            return Series::zero_scaled(a.scale, prec);
        }
        let min = a.min_exp + b.min_exp;
        let len = (prec - min).max(0) as usize;
        let mut coeffs = vec![Coeff::zero(); len];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let base = a.min_exp + i as i64 + b.min_exp - min;
            let room = len as i64 - base;
            if room <= 0 {
                break;
            }
            for (j, cb) in b.coeffs.iter().take(room as usize).enumerate() {
                if !cb.is_zero() {
                    coeffs[base as usize + j] += ca * cb;
                }
            }
        }
        let mut s = Series { scale: a.scale, min_exp: min, coeffs, prec };
        s.normalize();
        s
    }

    /// Multiply by the constant c in place.
    pub fn scale_coeffs(&mut self, c: &Coeff) {
        if c.is_zero() {
            self.coeffs.clear();
            self.min_exp = self.prec;
            return;
        }
        for x in &mut self.coeffs {
            *x *= c;
        }
    }

    /// Multiply by c * q^e in place. Gains precision headroom when e > 0.
    pub fn mul_monomial(&mut self, c: &Coeff, e: &Exp) {
        if c.is_zero() {
            let keep_prec = self.prec;
            self.coeffs.clear();
            self.min_exp = keep_prec;
            return;
        }
        let scale = lcm64(self.scale, *e.denom());
        if scale != self.scale {
            *self = self.upscale(scale);
        }
        let e_u = rescale_exp(e, self.scale);
        self.min_exp += e_u;
        self.prec += e_u;
        if !c.is_one() {
            for x in &mut self.coeffs {
                *x *= c;
            }
        }
    }

    /// In-place multiplication by (1 + c*q^e) with e > 0: a shift-and-add.
    pub fn mul_binomial(&mut self, c: &Coeff, e: &Exp) {
        if c.is_zero() {
            return;
        }
        assert!(e.is_positive(), "binomial exponent must be positive");
        let scale = lcm64(self.scale, *e.denom());
        if scale != self.scale {
            *self = self.upscale(scale);
        }
        let e_u = rescale_exp(e, self.scale);
        if self.coeffs.is_empty() {
            return;
        }
        let len = (self.prec - self.min_exp) as usize;
        let mut coeffs = std::mem::take(&mut self.coeffs);
        coeffs.resize(len.min(coeffs.len() + e_u as usize).max(coeffs.len()), Coeff::zero());
        if coeffs.len() < len {
            // room for shifted terms up to prec
            let needed = (coeffs.len() + e_u as usize).min(len);
            coeffs.resize(needed, Coeff::zero());
        }
        // coeffs[k] += c * coeffs[k - e]; iterate downward so each source is original.
        for k in (e_u as usize..coeffs.len()).rev() {
            let add = &coeffs[k - e_u as usize] * c;
            if !add.is_zero() {
                coeffs[k] += add;
            }
        }
        self.coeffs = coeffs;
        self.normalize();
    }

    /// In-place division by (1 + c*q^e) with e > 0: g[k] = f[k] - c*g[k-e].
    pub fn div_binomial(&mut self, c: &Coeff, e: &Exp) {
        if c.is_zero() {
            return;
        }
        assert!(e.is_positive(), "binomial exponent must be positive");
        let scale = lcm64(self.scale, *e.denom());
        if scale != self.scale {
            *self = self.upscale(scale);
        }
        let e_u = rescale_exp(e, self.scale);
        if self.coeffs.is_empty() {
            return;
        }
        let len = (self.prec - self.min_exp) as usize;
        let mut coeffs = std::mem::take(&mut self.coeffs);
        coeffs.resize(len, Coeff::zero());
        for k in e_u as usize..len {
            let sub = &coeffs[k - e_u as usize] * c;
            if !sub.is_zero() {
                coeffs[k] -= sub;
            }
        }
        self.coeffs = coeffs;
        self.normalize();
    }

    /// Multiply by a general two-term factor c1*q^{e1} + c2*q^{e2} in place.
    pub fn mul_linear(&mut self, c1: &Coeff, e1: &Exp, c2: &Coeff, e2: &Exp) {
        if c1.is_zero() {
            self.mul_monomial(c2, e2);
            return;
        }
        if c2.is_zero() {
            self.mul_monomial(c1, e1);
            return;
        }
        // Normalize to leading monomial times (1 + c*q^d), d > 0.
        let (lc, le, tc, te) = if e1 <= e2 { (c1, e1, c2, e2) } else { (c2, e2, c1, e1) };
        if le == te {
            let s = lc + tc;
            self.mul_monomial(&s, le);
            return;
        }
        let ratio = tc / lc;
        let d = te - le;
        self.mul_monomial(lc, le);
        self.mul_binomial(&ratio, &d);
    }

    /// Divide by a general two-term factor c1*q^{e1} + c2*q^{e2} in place.
    ///
    /// The lower-exponent monomial is peeled off and inverted exactly; this is
    /// the workhorse behind every 1/(1 - a q^k) step in term ratios.
    pub fn div_linear(&mut self, c1: &Coeff, e1: &Exp, c2: &Coeff, e2: &Exp) {
        assert!(
            !(c1.is_zero() && c2.is_zero()),
            "division by the zero factor"
        );
        if c1.is_zero() {
            let inv = Coeff::one() / c2;
            self.mul_monomial(&inv, &(-e2));
            return;
        }
        if c2.is_zero() {
            let inv = Coeff::one() / c1;
            self.mul_monomial(&inv, &(-e1));
            return;
        }
        let (lc, le, tc, te) = if e1 <= e2 { (c1, e1, c2, e2) } else { (c2, e2, c1, e1) };
        if le == te {
            let s = lc + tc;
            assert!(!s.is_zero(), "division by the zero factor");
            let inv = Coeff::one() / s;
            self.mul_monomial(&inv, &(-le));
            return;
        }
        let ratio = tc / lc;
        let d = te - le;
        let inv = Coeff::one() / lc;
        self.mul_monomial(&inv, &(-le));
        self.div_binomial(&ratio, &d);
    }

    /// Multiplicative inverse of a unit series (valuation 0, nonzero constant).
    ///
    /// Callers with a leading monomial must peel it first; see `div_unit`.
    pub fn invert_unit(&self) -> QResult<Series> {
        if self.is_zero() || self.min_exp != 0 {
            return Err(QError::NonUnit(format!(
                "valuation {:?}, need 0 with nonzero constant term",
                self.valuation()
            )));
        }
        let f0 = &self.coeffs[0];
        debug_assert!(!f0.is_zero());
        let len = (self.prec - self.min_exp) as usize;
        let inv0 = Coeff::one() / f0;
        let mut g: Vec<Coeff> = Vec::with_capacity(len);
        g.push(inv0.clone());
        for n in 1..len {
            // g_n = -(sum_{k=1..=n} f_k g_{n-k}) / f_0
            let mut acc = Coeff::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                let fk = &self.coeffs[k];
                if !fk.is_zero() && !g[n - k].is_zero() {
                    acc += fk * &g[n - k];
                }
            }
            if acc.is_zero() {
                g.push(Coeff::zero());
            } else {
                g.push(-(acc * &inv0));
            }
        }
        let mut s = Series { scale: self.scale, min_exp: 0, coeffs: g, prec: self.prec };
        s.normalize();
        Ok(s)
    }

    /// self / g for g with any leading monomial (peeled automatically).
    pub fn div_unit(&self, g: &Series) -> QResult<Series> {
        if g.is_zero() {
            return Err(QError::NonUnit("division by zero series".into()));
        }
        let val = g.valuation().expect("nonzero");
        let lead = g.coeff_at(&val).expect("below prec");
        let mut ghat = g.clone();
        let inv_lead = Coeff::one() / &lead;
        ghat.mul_monomial(&inv_lead, &(-val));
        let inv = ghat.invert_unit()?;
        let mut out = self.mul(&inv);
        out.mul_monomial(&inv_lead, &(-val));
        Ok(out)
    }

    /// Integer power by repeated squaring (negative powers invert first).
    pub fn pow(&self, n: i64) -> QResult<Series> {
        if n == 0 {
            return Ok(Series::one_like(self));
        }
        let base = if n < 0 {
            Series::one_like(self).div_unit(self)?
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        let mut result = Series::one_like(&base);
        let mut power = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&power);
            }
            e >>= 1;
            if e > 0 {
                power = power.mul(&power);
            }
        }
        Ok(result)
    }

    fn one_like(f: &Series) -> Series {
        Series {
            scale: f.scale,
            min_exp: 0,
            coeffs: vec![Coeff::one()],
            prec: f.prec.max(1),
        }
    }

    // ------------------------------------------------------------------
    // Substitutions
    // ------------------------------------------------------------------

    /// g(q) = f(q^r) for r > 0; precision scales by r.
    pub fn substitute_q_power(&self, r: &Exp) -> Series {
        assert!(r.is_positive(), "substitution exponent must be positive");
        // New exponents: (k/scale)*r = k*r_num / (scale*r_den).
        let new_scale_raw = self.scale * r.denom();
        let mut out = Series {
            scale: new_scale_raw,
            min_exp: self.min_exp * r.numer(),
            coeffs: Vec::new(),
            prec: mul_floor_ceil(self.prec, *r.numer()),
        };
        if self.coeffs.is_empty() {
            out.min_exp = out.prec;
        } else {
            let len = (out.prec - out.min_exp).max(0) as usize;
            let mut coeffs = vec![Coeff::zero(); len];
            for (i, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let idx = (i as i64) * r.numer();
                if idx >= 0 && (idx as usize) < len {
                    coeffs[idx as usize] = c.clone();
                }
            }
            out.coeffs = coeffs;
        }
        out.normalize();
        out.canonical_scale()
    }

    /// f(-q): flips the sign of odd-exponent coefficients.
    ///
    /// Requires integral exponents after scale reduction.
    pub fn substitute_q_neg(&self) -> QResult<Series> {
        let f = self.clone().canonical_scale();
        if f.scale != 1 {
            return Err(QError::FractionalExponent(format!(
                "q -> -q needs integer exponents, scale is {}",
                f.scale
            )));
        }
        let mut out = f;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let e = out.min_exp + i as i64;
            if e.rem_euclid(2) == 1 {
                *c = -c.clone();
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Truncate the tracked precision down to `order` (a q-exponent).
    pub fn truncate(&self, order: &Exp) -> Series {
        let scale = lcm64(self.scale, *order.denom());
        let mut f = self.upscale(scale);
        let cut = rescale_exp(order, scale);
        if cut < f.prec {
            f.prec = cut;
            f.normalize();
        }
        f
    }

    // ------------------------------------------------------------------
    // Comparison
    // ------------------------------------------------------------------

    /// Exact comparison of all coefficients of q^e with e < order.
    ///
    /// Returns Ok(None) when equal, Ok(Some(mismatch)) at the first
    /// difference, and an error if either side is not known that far.
    pub fn equal_up_to(f: &Series, g: &Series, order: &Exp) -> QResult<Option<Mismatch>> {
        if f.prec() < *order || g.prec() < *order {
            return Err(QError::InsufficientPrecision {
                needed: format!("q^{}", order),
                have: format!("q^{} and q^{}", f.prec(), g.prec()),
            });
        }
        let scale = lcm64(lcm64(f.scale, g.scale), *order.denom());
        let (a, b) = (f.upscale(scale), g.upscale(scale));
        let cut = rescale_exp(order, scale);
        let lo = a.min_exp.min(b.min_exp);
        for k in lo..cut {
            let ca = a.coeff_u(k);
            let cb = b.coeff_u(k);
            match (ca, cb) {
                (None, None) => {}
                (x, y) => {
                    let x = x.cloned().unwrap_or_else(Coeff::zero);
                    let y = y.cloned().unwrap_or_else(Coeff::zero);
                    if x != y {
                        return Ok(Some(Mismatch {
                            exponent: Exp::new(k, scale),
                            lhs: x,
                            rhs: y,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    fn coeff_u(&self, k: i64) -> Option<&Coeff> {
        let idx = k - self.min_exp;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            None
        } else {
            let c = &self.coeffs[idx as usize];
            if c.is_zero() {
                None
            } else {
                Some(c)
            }
        }
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(q^{})", self, self.prec())
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let show_coeff = !mag.is_one() || e.is_zero();
            if show_coeff {
                write!(f, "{}", mag)?;
            }
            if !e.is_zero() {
                if show_coeff {
                    write!(f, "*")?;
                }
                if e.is_integer() {
                    if e == Exp::one() {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{}", e)?;
                    }
                } else {
                    write!(f, "q^({})", e)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Compare exponents then coefficient; used for deterministic term ordering.
pub fn cmp_exp(a: &Exp, b: &Exp) -> Ordering {
    a.cmp(b)
}

fn lcm64(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

fn rescale_exp(e: &Exp, scale: i64) -> i64 {
    let r = e * Exp::from_integer(scale);
    debug_assert!(r.is_integer(), "exponent {} not representable at scale {}", e, scale);
    r.to_integer()
}

fn div_ceil64(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}

/// prec * r for positive integer r (used by substitute_q_power).
fn mul_floor_ceil(prec: i64, r_num: i64) -> i64 {
    prec * r_num
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(prec: i64) -> Series {
        // 1/(1-q)
        let mut one_minus_q = Series::one(prec);
        one_minus_q.mul_binomial(&coeff_int(-1), &exp_int(1));
        one_minus_q.invert_unit().unwrap()
    }

    #[test]
    fn monomial_basics() {
        let m = Series::monomial(&coeff_int(1), &exp_int(0), &exp_int(10));
        assert_eq!(m.coeff_at(&exp_int(0)).unwrap(), coeff_int(1));
        assert_eq!(m.coeff_at(&exp_int(9)).unwrap(), coeff_int(0));
        assert!(m.coeff_at(&exp_int(10)).is_err());

        let half = Series::monomial(&coeff_int(-1), &exp_ratio(1, 2), &exp_int(5));
        assert_eq!(half.scale(), 2);
        assert_eq!(half.coeff_at(&exp_ratio(1, 2)).unwrap(), coeff_int(-1));

        let z = Series::monomial(&coeff_int(0), &exp_int(0), &exp_int(8));
        assert!(z.is_zero());
        assert_eq!(z.prec(), exp_int(8));
    }

    #[test]
    fn telescoping_product() {
        // (1-q) * (1+q+q^2+...) = 1 through q^5
        let mut one_minus_q = Series::one(6);
        one_minus_q.mul_binomial(&coeff_int(-1), &exp_int(1));
        let g = geom(6);
        let p = one_minus_q.mul(&g);
        assert_eq!(Series::equal_up_to(&p, &Series::one(6), &exp_int(6)).unwrap(), None);
    }

    #[test]
    fn add_merges_scales() {
        let a = Series::monomial(&coeff_int(1), &exp_ratio(1, 2), &exp_int(4));
        let b = Series::monomial(&coeff_int(1), &exp_int(1), &exp_int(4));
        let s = a.add(&b);
        assert_eq!(s.scale(), 2);
        assert_eq!(s.coeff_at(&exp_ratio(1, 2)).unwrap(), coeff_int(1));
        assert_eq!(s.coeff_at(&exp_int(1)).unwrap(), coeff_int(1));
    }

    #[test]
    fn invert_scalar() {
        // 2 - 2q -> 1/2 + q/2 + q^2/2 + ...
        let mut f = Series::monomial(&coeff_int(2), &exp_int(0), &exp_int(6));
        f.mul_binomial(&coeff_int(-1), &exp_int(1));
        let inv = f.invert_unit().unwrap();
        for k in 0..6 {
            assert_eq!(inv.coeff_at(&exp_int(k)).unwrap(), coeff_ratio(1, 2));
        }
    }

    #[test]
    fn invert_requires_unit() {
        let f = Series::monomial(&coeff_int(1), &exp_int(1), &exp_int(5));
        assert!(matches!(f.invert_unit(), Err(QError::NonUnit(_))));
        let z = Series::zero(5);
        assert!(matches!(z.invert_unit(), Err(QError::NonUnit(_))));
    }

    #[test]
    fn substitution_roundtrip() {
        let f = geom(12);
        for r in [exp_int(2), exp_int(3), exp_ratio(1, 2)] {
            let g = f.substitute_q_power(&r);
            let back = g.substitute_q_power(&(Exp::one() / r));
            let order = back.prec().min(f.prec());
            assert_eq!(Series::equal_up_to(&back, &f, &order).unwrap(), None);
        }
    }

    #[test]
    fn substitute_simple() {
        // 1 + q at r=2 -> 1 + q^2 ; at r=1/2 -> 1 + q^(1/2)
        let mut f = Series::one(10);
        f.mul_binomial(&coeff_int(1), &exp_int(1));
        let g = f.substitute_q_power(&exp_int(2));
        assert_eq!(g.coeff_at(&exp_int(2)).unwrap(), coeff_int(1));
        assert_eq!(g.coeff_at(&exp_int(1)).unwrap(), coeff_int(0));
        let h = f.substitute_q_power(&exp_ratio(1, 2));
        assert_eq!(h.scale(), 2);
        assert_eq!(h.coeff_at(&exp_ratio(1, 2)).unwrap(), coeff_int(1));
    }

    #[test]
    fn q_neg_substitution() {
        let f = geom(8); // 1/(1-q)
        let g = f.substitute_q_neg().unwrap(); // 1/(1+q)
        let mut one_plus_q = Series::one(8);
        one_plus_q.mul_binomial(&coeff_int(1), &exp_int(1));
        let prod = g.mul(&one_plus_q);
        assert_eq!(Series::equal_up_to(&prod, &Series::one(8), &exp_int(8)).unwrap(), None);
    }

    #[test]
    fn equal_up_to_reports_first_mismatch() {
        let f = Series::one(60);
        let mut g = Series::one(60);
        g = g.add(&Series::monomial(&coeff_int(1), &exp_int(50), &exp_int(60)));
        assert_eq!(Series::equal_up_to(&f, &g, &exp_int(50)).unwrap(), None);
        let mm = Series::equal_up_to(&f, &g, &exp_int(51)).unwrap().unwrap();
        assert_eq!(mm.exponent, exp_int(50));
        assert_eq!(mm.lhs, coeff_int(0));
        assert_eq!(mm.rhs, coeff_int(1));
        assert!(Series::equal_up_to(&f, &g, &exp_int(61)).is_err());
    }

    #[test]
    fn mul_precision_propagation() {
        // f = q^2 + O(q^5), g known to q^10: product known below
        // min(5 + 0, 10 + 2) = 5, and gains headroom from f's valuation.
        let f = Series::monomial(&coeff_int(1), &exp_int(2), &exp_int(5));
        let g = geom(10);
        let p = f.mul(&g);
        assert_eq!(p.prec(), exp_int(5));
        assert_eq!(p.coeff_at(&exp_int(4)).unwrap(), coeff_int(1));
        assert_eq!(p.valuation(), Some(exp_int(2)));

        // monomial multiplication gains precision outright
        let mut m = Series::one(5);
        m.mul_monomial(&coeff_int(1), &exp_int(3));
        assert_eq!(m.prec(), exp_int(8));
    }

    #[test]
    fn binomial_ops_match_full_mul() {
        let f = geom(20);
        let mut fast = f.clone();
        fast.mul_binomial(&coeff_ratio(3, 2), &exp_int(4));
        let mut factor = Series::one(20);
        factor = factor.add(&Series::monomial(&coeff_ratio(3, 2), &exp_int(4), &exp_int(20)));
        let slow = f.mul(&factor);
        assert_eq!(Series::equal_up_to(&fast, &slow, &exp_int(20)).unwrap(), None);

        let mut undone = fast.clone();
        undone.div_binomial(&coeff_ratio(3, 2), &exp_int(4));
        assert_eq!(Series::equal_up_to(&undone, &f, &exp_int(20)).unwrap(), None);
    }

    #[test]
    fn div_linear_matches_invert() {
        // dividing by (q - q^3) == multiplying by q^{-1} / (1 - q^2)
        let f = geom(12);
        let mut fast = f.clone();
        fast.div_linear(&coeff_int(1), &exp_int(1), &coeff_int(-1), &exp_int(3));
        let mut denom = Series::monomial(&coeff_int(1), &exp_int(1), &exp_int(14));
        denom = denom.add(&Series::monomial(&coeff_int(-1), &exp_int(3), &exp_int(14)));
        let slow = f.div_unit(&denom).unwrap();
        let order = fast.prec().min(slow.prec());
        assert_eq!(Series::equal_up_to(&fast, &slow, &order).unwrap(), None);
    }
}
