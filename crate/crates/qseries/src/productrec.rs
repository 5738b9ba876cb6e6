//! Eta-quotient recognition: write a unit series as prod_{k>=1} (1-q^k)^{-a_k},
//! detect eventual periodicity of the exponents, and rebuild series from a
//! presentation. This is the "guess the product side" engine.
//!
//! The exponent profile comes from the logarithmic derivative: with
//! b_n the coefficient of q^n in q f'/f, the relation b_n = sum_{d|n} d a_d
//! inverts by Moebius to n a_n = sum_{d|n} mu(n/d) b_d. Everything stays in
//! exact rationals; a non-integral a_k is a useful signal that the input was
//! not an eta-quotient.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{QError, QResult};
use crate::qobjects::{poch_inf, Monomial};
use crate::series::{coeff_int, exp_int, Coeff, Exp, Series};

/// Exponents of the factorization prod (1-q^k)^{-a_k}, k = 1..=kmax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentProfile {
    /// a[k-1] is the exponent a_k.
    pub a: Vec<Coeff>,
    pub kmax: i64,
}

impl ExponentProfile {
    pub fn exponent(&self, k: i64) -> Coeff {
        if k >= 1 && (k as usize) <= self.a.len() {
            self.a[k as usize - 1].clone()
        } else {
            Coeff::zero()
        }
    }

    /// True when every exponent is an integer (an honest eta-quotient).
    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }
}

/// A periodic presentation: exponent e for every k = r (mod modulus), shown
/// as (q^r, q^{r+M}, ...; q^M)_inf factors. Residue M stands for k = 0 (mod M).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductPresentation {
    pub modulus: i64,
    /// (residue in 1..=modulus, exponent a_k for k = residue mod modulus).
    pub entries: Vec<(i64, Coeff)>,
}

impl ProductPresentation {
    /// The profile exponent at k implied by the presentation.
    pub fn exponent(&self, k: i64) -> Coeff {
        let mut r = k.rem_euclid(self.modulus);
        if r == 0 {
            r = self.modulus;
        }
        self.entries
            .iter()
            .find(|(res, _)| *res == r)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(Coeff::zero)
    }
}

impl fmt::Display for ProductPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let m = self.modulus;
        let fmt_group = |entries: &[(i64, Coeff)], f: &mut fmt::Formatter<'_>| -> fmt::Result {
            let mut first = true;
            for (r, e) in entries {
                if !first {
                    write!(f, " * ")?;
                }
                first = false;
                let mag = e.abs();
                write!(f, "(q^{r};q^{m})_inf")?;
                if !mag.is_one() {
                    write!(f, "^{mag}")?;
                }
            }
            Ok(())
        };
        let num: Vec<_> = self.entries.iter().filter(|(_, e)| e.is_negative()).cloned().collect();
        let den: Vec<_> = self.entries.iter().filter(|(_, e)| e.is_positive()).cloned().collect();
        if num.is_empty() {
            write!(f, "1 / [")?;
            fmt_group(&den, f)?;
            write!(f, "]")
        } else if den.is_empty() {
            fmt_group(&num, f)
        } else {
            fmt_group(&num, f)?;
            write!(f, " / [")?;
            fmt_group(&den, f)?;
            write!(f, "]")
        }
    }
}

/// Result of modulus detection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recognition {
    Product(ProductPresentation),
    /// No modulus up to the bound explains the profile; carries the raw
    /// profile so callers can print it. Two-theta sides land here.
    NoPeriodicity(ExponentProfile),
}

/// Extract the exponent profile of a unit series with integer exponents.
///
/// Requires constant term 1, scale 1 after reduction, and prec > kmax.
pub fn factor_exponents(f: &Series, kmax: i64) -> QResult<ExponentProfile> {
    let f = f.clone().canonical_scale();
    if f.scale() != 1 {
        return Err(QError::FractionalExponent(format!(
            "profile extraction needs integer exponents, scale is {}",
            f.scale()
        )));
    }
    if f.prec() <= exp_int(kmax) {
        return Err(QError::InsufficientPrecision {
            needed: format!("q^{}", kmax + 1),
            have: format!("q^{}", f.prec()),
        });
    }
    if f.is_zero() || f.valuation() != Some(Exp::zero()) || !f.constant_term().is_one() {
        return Err(QError::NonUnit(
            "profile extraction needs constant term exactly 1".into(),
        ));
    }
    // b_n = [q^n] (q f'/f): solve (q f') = b * f by forward substitution of
    // the convolution, i.e. b = (q f') * f^{-1}.
    let work = f.truncate(&exp_int(kmax + 1));
    let mut deriv_coeffs = Vec::with_capacity(kmax as usize + 1);
    for n in 0..=kmax {
        let c = work.coeff_at(&exp_int(n)).unwrap_or_else(|_| Coeff::zero());
        deriv_coeffs.push(c * coeff_int(n));
    }
    let qfp = Series::from_coeffs(0, deriv_coeffs, kmax + 1);
    let b = qfp.mul(&work.invert_unit()?);

    // Moebius inversion: n a_n = sum_{d|n} mu(n/d) b_d.
    let mu = moebius_table(kmax as usize);
    let mut a = Vec::with_capacity(kmax as usize);
    for n in 1..=kmax {
        let mut acc = Coeff::zero();
        for d in 1..=n {
            if n % d == 0 {
                let m = mu[(n / d) as usize];
                if m != 0 {
                    let bd = b.coeff_at(&exp_int(d)).unwrap_or_else(|_| Coeff::zero());
                    if m > 0 {
                        acc += bd;
                    } else {
                        acc -= bd;
                    }
                }
            }
        }
        a.push(acc / coeff_int(n));
    }
    Ok(ExponentProfile { a, kmax })
}

fn moebius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut is_prime = vec![true; n + 1];
    for p in 2..=n {
        if is_prime[p] {
            for k in (p..=n).step_by(p) {
                if k > p {
                    is_prime[k] = false;
                }
                mu[k] = -mu[k];
            }
            if let Some(p2) = p.checked_mul(p) {
                for k in (p2..=n + 1).step_by(p2) {
                    if k <= n {
                        mu[k] = 0;
                    }
                }
            }
        }
    }
    if !mu.is_empty() {
        mu[0] = 0;
    }
    mu
}

/// Find the smallest modulus M <= max_modulus such that a_k depends only on
/// k mod M over the observed window. Needs kmax >= 3 * max_modulus so that
/// each residue class is seen a few times.
pub fn detect_modulus(profile: &ExponentProfile, max_modulus: i64) -> QResult<Recognition> {
    if profile.kmax < 3 * max_modulus {
        return Err(QError::InsufficientPrecision {
            needed: format!("kmax >= {}", 3 * max_modulus),
            have: format!("kmax = {}", profile.kmax),
        });
    }
    'outer: for m in 1..=max_modulus {
        for k in 1..=profile.kmax {
            let k2 = k + m;
            if k2 <= profile.kmax && profile.exponent(k) != profile.exponent(k2) {
                continue 'outer;
            }
        }
        let mut entries = Vec::new();
        for r in 1..=m {
            let e = profile.exponent(r);
            if !e.is_zero() {
                entries.push((r, e));
            }
        }
        return Ok(Recognition::Product(ProductPresentation { modulus: m, entries }));
    }
    Ok(Recognition::NoPeriodicity(profile.clone()))
}

/// Expand prod (1-q^k)^{-a_k} back to a series, exactly:
/// exp( sum_k a_k sum_{m: km < prec} q^{km}/m ).
pub fn reconstruct_profile(profile: &ExponentProfile, prec: i64) -> Series {
    let a = |k: i64| profile.exponent(k);
    reconstruct_from(&a, prec)
}

/// Expand a periodic presentation back to a series (valid to any precision).
pub fn reconstruct_presentation(p: &ProductPresentation, prec: i64) -> Series {
    let a = |k: i64| p.exponent(k);
    reconstruct_from(&a, prec)
}

fn reconstruct_from(a: &dyn Fn(i64) -> Coeff, prec: i64) -> Series {
    if prec <= 0 {
        return Series::zero(prec);
    }
    // S = sum_k a_k sum_m q^{km}/m, then exp(S) by n g_n = sum k S_k g_{n-k}.
    let mut s = vec![Coeff::zero(); prec as usize];
    for k in 1..prec {
        let ak = a(k);
        if ak.is_zero() {
            continue;
        }
        let mut m = 1i64;
        while k * m < prec {
            s[(k * m) as usize] += &ak / coeff_int(m);
            m += 1;
        }
    }
    let mut g = vec![Coeff::zero(); prec as usize];
    g[0] = Coeff::one();
    for n in 1..prec as usize {
        let mut acc = Coeff::zero();
        for k in 1..=n {
            if !s[k].is_zero() && !g[n - k].is_zero() {
                acc += &s[k] * coeff_int(k as i64) * &g[n - k];
            }
        }
        g[n] = acc / coeff_int(n as i64);
    }
    Series::from_coeffs(0, g, prec)
}

/// A two-term theta decomposition f = T(r1;M) + c q^j T(r2;M) with
/// T(r;M) = (q^r, q^{M-r}, q^M; q^M)_inf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoThetaSplit {
    pub modulus: i64,
    pub r1: i64,
    pub r2: i64,
    pub shift: i64,
    pub coeff: Coeff,
}

impl fmt::Display for TwoThetaSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.modulus;
        write!(
            f,
            "(q^{}, q^{}, q^{m}; q^{m})_inf + {}*q^{}*(q^{}, q^{}, q^{m}; q^{m})_inf",
            self.r1,
            m - self.r1,
            self.coeff,
            self.shift,
            self.r2,
            m - self.r2
        )
    }
}

/// Triple product (q^r, q^{M-r}, q^M; q^M)_inf.
pub fn theta_triple(r: i64, modulus: i64, prec: i64) -> Series {
    let p = exp_int(prec);
    let step = exp_int(modulus);
    let f1 = poch_inf(&Monomial::q_pow(exp_int(r)), &step, &p).expect("positive base");
    let f2 = poch_inf(&Monomial::q_pow(exp_int(modulus - r)), &step, &p).expect("positive base");
    let f3 = poch_inf(&Monomial::q_pow(step), &step, &p).expect("positive base");
    f1.mul(&f2).mul(&f3)
}

/// Attempt the two-term theta split used by the discovery pipeline on sides
/// that are sums of two thetas rather than single quotients. Works on series
/// with constant term 1 and integer exponents.
pub fn two_theta_split(f: &Series, max_modulus: i64) -> Option<TwoThetaSplit> {
    let f = f.clone().canonical_scale();
    if f.scale() != 1 || !f.constant_term().is_one() {
        return None;
    }
    let prec_exp = f.prec();
    if !prec_exp.is_integer() {
        return None;
    }
    let prec = prec_exp.to_integer();
    for m in 2..=max_modulus {
        if prec < 2 * m + 2 {
            continue;
        }
        for r1 in 1..=m / 2 {
            let t1 = theta_triple(r1, m, prec);
            let g = f.sub(&t1);
            let Some(val) = g.valuation() else {
                // exactly one theta: report with a zero second term
                return Some(TwoThetaSplit { modulus: m, r1, r2: r1, shift: 0, coeff: Coeff::zero() });
            };
            if !val.is_integer() || val.is_negative() || val.is_zero() {
                continue;
            }
            let j = val.to_integer();
            let c = g.coeff_at(&val).ok()?;
            for r2 in 1..=m / 2 {
                let mut t2 = theta_triple(r2, m, prec - j);
                t2.mul_monomial(&c, &exp_int(j));
                let order = exp_int(prec.min(prec - j + j));
                let order = order.min(g.prec()).min(t2.prec());
                if let Ok(None) = Series::equal_up_to(&g, &t2, &order) {
                    return Some(TwoThetaSplit { modulus: m, r1, r2, shift: j, coeff: c });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qobjects::poch_inf;

    fn eta_inv_pow(residues: &[(i64, i64)], modulus: i64, prec: i64) -> Series {
        // prod over residues (q^r;q^M)_inf^{-e}
        let mut f = Series::one(prec);
        for (r, e) in residues {
            let p = poch_inf(&Monomial::q_pow(exp_int(*r)), &exp_int(modulus), &exp_int(prec))
                .unwrap();
            let powed = p.pow(-*e).unwrap();
            f = f.mul(&powed);
        }
        f
    }

    #[test]
    fn rogers_ramanujan_profile() {
        // 1/(q,q^4;q^5)_inf: a_k = 1 for k = 1,4 (mod 5), else 0
        let f = eta_inv_pow(&[(1, 1), (4, 1)], 5, 80);
        let profile = factor_exponents(&f, 70).unwrap();
        assert!(profile.is_integral());
        for k in 1..=70 {
            let expect = match k % 5 {
                1 | 4 => coeff_int(1),
                _ => Coeff::zero(),
            };
            assert_eq!(profile.exponent(k), expect, "a_{k}");
        }
        let rec = detect_modulus(&profile, 20).unwrap();
        match rec {
            Recognition::Product(p) => {
                assert_eq!(p.modulus, 5);
                assert_eq!(p.entries, vec![(1, coeff_int(1)), (4, coeff_int(1))]);
            }
            other => panic!("expected modulus 5, got {other:?}"),
        }
    }

    #[test]
    fn constant_one_profile() {
        let f = Series::one(50);
        let profile = factor_exponents(&f, 40).unwrap();
        assert!(profile.a.iter().all(|c| c.is_zero()));
        match detect_modulus(&profile, 13).unwrap() {
            Recognition::Product(p) => {
                assert_eq!(p.modulus, 1);
                assert!(p.entries.is_empty());
                assert_eq!(format!("{p}"), "1");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn euler_product_profile() {
        // (q;q)_inf itself: a_k = -1 for all k
        let f = poch_inf(&Monomial::q_pow(exp_int(1)), &exp_int(1), &exp_int(60)).unwrap();
        let profile = factor_exponents(&f, 50).unwrap();
        for k in 1..=50 {
            assert_eq!(profile.exponent(k), coeff_int(-1));
        }
        let back = reconstruct_profile(&profile, 51);
        let order = exp_int(51);
        assert_eq!(Series::equal_up_to(&back, &f.truncate(&order), &order).unwrap(), None);
    }

    #[test]
    fn odd_part_partitions() {
        // presentation M=2, {(1,1)}: 1/(q;q^2)_inf = 1+q+q^2+2q^3+2q^4+3q^5
        let p = ProductPresentation { modulus: 2, entries: vec![(1, coeff_int(1))] };
        let f = reconstruct_presentation(&p, 6);
        let expect: Vec<i64> = vec![1, 1, 1, 2, 2, 3];
        for (n, c) in expect.iter().enumerate() {
            assert_eq!(f.coeff_at(&exp_int(n as i64)).unwrap(), coeff_int(*c));
        }
    }

    #[test]
    fn profile_round_trip_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..20 {
            let kmax = 30;
            let mut a = Vec::new();
            for _ in 0..kmax {
                a.push(coeff_int(rng.gen_range(-3..=3)));
            }
            let profile = ExponentProfile { a, kmax };
            let f = reconstruct_profile(&profile, 120);
            let extracted = factor_exponents(&f, kmax).unwrap();
            assert_eq!(extracted, profile, "trial {trial}");
            // uniqueness: stability under a different extraction precision
            let extracted2 = factor_exponents(&f.truncate(&exp_int(90)), kmax).unwrap();
            assert_eq!(extracted2, profile, "trial {trial} at reduced precision");
        }
    }

    #[test]
    fn profile_requires_unit_and_precision() {
        let f = Series::monomial(&coeff_int(2), &exp_int(0), &exp_int(30));
        assert!(matches!(factor_exponents(&f, 10), Err(QError::NonUnit(_))));
        let f = Series::one(10);
        assert!(matches!(
            factor_exponents(&f, 10),
            Err(QError::InsufficientPrecision { .. })
        ));
        let profile = ExponentProfile { a: vec![Coeff::zero(); 10], kmax: 10 };
        assert!(matches!(
            detect_modulus(&profile, 12),
            Err(QError::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn non_integral_profile_flagged() {
        // sqrt of the partition generating function has half-integral a_k
        let p = ProductPresentation { modulus: 1, entries: vec![(1, coeff_int(1))] };
        let f = reconstruct_presentation(&p, 40);
        let root_profile = ExponentProfile {
            a: vec![crate::series::coeff_ratio(1, 2); 30],
            kmax: 30,
        };
        let g = reconstruct_profile(&root_profile, 40);
        let squared = g.mul(&g);
        let order = exp_int(31);
        assert_eq!(
            Series::equal_up_to(&squared, &f.truncate(&order), &order).unwrap(),
            None
        );
        let extracted = factor_exponents(&g, 30).unwrap();
        assert!(!extracted.is_integral());
    }

    #[test]
    fn two_theta_split_finds_decomposition() {
        // T(8;20) + q T(4;20), the numerator shape of one of the new identities
        let mut f = theta_triple(8, 20, 90);
        let mut second = theta_triple(4, 20, 89);
        second.mul_monomial(&Coeff::one(), &exp_int(1));
        f = f.add(&second);
        let split = two_theta_split(&f, 24).expect("split found");
        assert_eq!(
            (split.modulus, split.r1, split.r2, split.shift),
            (20, 8, 4, 1)
        );
        assert_eq!(split.coeff, coeff_int(1));
    }
}
