//! The identity catalog: a machine-readable record per identity, a parser for
//! the catalog file format, and evaluators producing both sides as series.
//!
//! The catalog is data, not code. One record per blank-line-separated block:
//!
//! ```text
//! id: S.58
//! alias: S.58a                    # optional second label
//! theorem: PFAFF_REDUCED          # source theorem for the cross-link
//! preset: q=q alpha=1 c=q^1/2 d=-q^1/2 a=0 b=0
//! post: neg subst(1/2)            # optional ops applied to the theorem sides
//! link: c0=1/2 c1=1/2 num=[bin(1;1)] den=[]   # optional affine/rational link
//! sum: sign=+ qexp=(1,0,0)/1 lead=1/2 start=1 extra=inv(n+1)
//!      num=[poch(q^2;q^2;n-1)] den=[poch(q;q;n), poch(q;q^2;n)]
//! prod: term=[1; num=[poch(-q^5;q^12), poch(-q^7;q^12), poch(q^12;q^12)]; den=[poch(q;q)]]
//! order: 200
//! ```
//!
//! `sum:` and `prod:` must appear on one line each. Monomials are written
//! `0`, `1`, `-1`, `q`, `-q^2`, `q^1/2`, `q^-1`; the exponent after `^` is a
//! full rational. A `sum` Pochhammer factor is `poch(base;step;len)` with len
//! one of n-1, n, n+1, 2n-1, 2n, 2n+1, 2n+2, 3n, 3n+1; `pmpair(b2;step;len)`
//! and `omegapair(q^m;step;len)` enter the same way. Product atoms are
//! infinite: `poch(base;step)`. Records with `theorem:`/`preset:` but no
//! `sum:`/`prod:` are preset-only rows used by the theorem test suite.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{QError, QResult};
use crate::qobjects::{div_one_minus, mul_one_minus, poch_inf, Monomial};
use crate::series::{coeff_int, exp_int, Coeff, Exp, Series};
use crate::transforms::{theorem_parts, ParamAssignment, Symbol, TheoremId, TheoremParts};

/// The shipped catalog (every identity derived in the source material).
pub const SHIPPED_CATALOG: &str = include_str!("../../../data/catalog.txt");

/// Pochhammer length slope*n + offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinExpr {
    pub slope: i64,
    pub offset: i64,
}

impl LinExpr {
    pub fn eval(&self, n: i64) -> i64 {
        self.slope * n + self.offset
    }
}

/// Conjugate-pair classification of a sum-side factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Plain,
    PmPair,
    OmegaPair,
}

/// One finite factor (base; q^step)_{len} on a sum side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PochFactorAst {
    pub base: Monomial,
    pub step: Exp,
    pub len: LinExpr,
    pub kind: PairKind,
}

impl PochFactorAst {
    /// The j-th binomial of the product, applied multiplicatively or as a
    /// division. Index j >= 0.
    fn apply_at(&self, f: &mut Series, j: i64, inv: bool) -> QResult<()> {
        match self.kind {
            PairKind::Plain => {
                let e = self.base.exp + self.step * exp_int(j);
                if inv {
                    div_one_minus(f, &self.base.coeff, &e)?;
                } else {
                    mul_one_minus(f, &self.base.coeff, &e);
                }
            }
            PairKind::PmPair => {
                let e = self.base.exp + self.step * exp_int(2 * j);
                if inv {
                    div_one_minus(f, &self.base.coeff, &e)?;
                } else {
                    mul_one_minus(f, &self.base.coeff, &e);
                }
            }
            PairKind::OmegaPair => {
                let e = self.base.exp + self.step * exp_int(j);
                if e.is_zero() {
                    let c = if inv { crate::series::coeff_ratio(1, 3) } else { coeff_int(3) };
                    f.scale_coeffs(&c);
                } else {
                    let three_e = e * exp_int(3);
                    if inv {
                        mul_one_minus(f, &Coeff::one(), &e);
                        div_one_minus(f, &Coeff::one(), &three_e)?;
                    } else {
                        mul_one_minus(f, &Coeff::one(), &three_e);
                        div_one_minus(f, &Coeff::one(), &e)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply the factors for length going from `from` to `to` (from <= to).
    fn apply_range(&self, f: &mut Series, from: i64, to: i64, inv: bool) -> QResult<()> {
        for j in from.max(0)..to {
            self.apply_at(f, j, inv)?;
        }
        Ok(())
    }

    /// Value-1 convention check for length -1: only (q^step; q^step)_{-1}.
    fn check_neg_len(&self, len: i64) -> QResult<()> {
        if len < -1 {
            return Err(QError::UnsupportedNegativeIndex(format!(
                "length {len} in catalog factor"
            )));
        }
        if len == -1
            && !(self.kind == PairKind::Plain
                && self.base.coeff.is_one()
                && self.base.exp == self.step)
        {
            return Err(QError::UnsupportedNegativeIndex(format!(
                "(a;q)_(-1) convention only applies to a = q^step, got {}",
                self.base
            )));
        }
        Ok(())
    }
}

/// Extra scalar factor (1 + q^{slope n + offset})^{+-1} on a sum side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtraFactor {
    pub invert: bool,
    pub lin: LinExpr,
}

/// The sum side: lead + sum_{n>=start} sign^n q^{(A n^2 + B n + C)/D} N/D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSideAst {
    pub sign_alternating: bool,
    /// (A, B, C, D) with the exponent (A n^2 + B n + C)/D.
    pub qexp: (i64, i64, i64, i64),
    pub num: Vec<PochFactorAst>,
    pub den: Vec<PochFactorAst>,
    pub extra: Option<ExtraFactor>,
    pub lead: Coeff,
    pub start: i64,
}

impl SumSideAst {
    fn q_exponent(&self, n: i64) -> Exp {
        let (a, b, c, d) = self.qexp;
        Exp::new(a * n * n + b * n + c, d)
    }
}

/// One product-side term: coeff * prod num_atoms / prod den_atoms, each atom
/// an infinite Pochhammer (base; q^step)_inf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTerm {
    pub coeff: Monomial,
    pub num: Vec<(Monomial, Exp)>,
    pub den: Vec<(Monomial, Exp)>,
}

/// The product side: a sum of one or two theta-product terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSideAst {
    pub terms: Vec<ProductTerm>,
}

/// Post-evaluation substitutions applied to theorem sides in the cross-link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PostOp {
    /// q -> q^r
    Subst(Exp),
    /// q -> -q
    Neg,
}

/// Cross-link normalization: catalog_sum = c0 + c1 * F * bare_sum where F is
/// the rational-function factor prod num / prod den of binomials (1 + c q^e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkSpec {
    pub c0: Coeff,
    pub c1: Coeff,
    pub mul_num: Vec<(Coeff, Exp)>,
    pub mul_den: Vec<(Coeff, Exp)>,
}

impl Default for LinkSpec {
    fn default() -> Self {
        LinkSpec { c0: Coeff::zero(), c1: Coeff::one(), mul_num: Vec::new(), mul_den: Vec::new() }
    }
}

/// One catalog record.
#[derive(Clone, Debug)]
pub struct IdentityEntry {
    pub label: String,
    pub alias: Option<String>,
    pub theorem: Option<TheoremId>,
    pub preset: Option<ParamAssignment>,
    pub post: Vec<PostOp>,
    pub link: LinkSpec,
    pub sum: Option<SumSideAst>,
    pub product: Option<ProductSideAst>,
    pub order: i64,
}

impl IdentityEntry {
    /// Records carrying both sides; preset-only rows are theorem test data.
    pub fn is_identity(&self) -> bool {
        self.sum.is_some() && self.product.is_some()
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluate the sum side by incremental term ratios.
pub fn eval_sum_side(e: &IdentityEntry, prec: i64) -> QResult<Series> {
    let sum = e
        .sum
        .as_ref()
        .ok_or_else(|| QError::MissingParameter(format!("{}: no sum side", e.label)))?;
    eval_sum_ast(sum, prec)
}

pub(crate) fn eval_sum_ast(sum: &SumSideAst, prec: i64) -> QResult<Series> {
    let prec_exp = exp_int(prec);
    let n0 = sum.start;
    // build the term at n = start
    let mut term = Series::monomial(&Coeff::one(), &sum.q_exponent(n0), &prec_exp);
    if sum.sign_alternating && n0 % 2 != 0 {
        term.scale_coeffs(&(-Coeff::one()));
    }
    for f in &sum.num {
        let len = f.len.eval(n0);
        f.check_neg_len(len)?;
        f.apply_range(&mut term, 0, len, false)?;
    }
    for f in &sum.den {
        let len = f.len.eval(n0);
        f.check_neg_len(len)?;
        f.apply_range(&mut term, 0, len, true)?;
    }
    if let Some(x) = &sum.extra {
        let e = exp_int(x.lin.eval(n0));
        if x.invert {
            div_one_minus(&mut term, &(-Coeff::one()), &e)?;
        } else {
            mul_one_minus(&mut term, &(-Coeff::one()), &e);
        }
    }

    let mut total = Series::monomial(&sum.lead, &Exp::zero(), &prec_exp);
    let cap = 8 * prec + 64;
    let mut beyond = 0u32;
    let mut n = n0;
    loop {
        total = total.add(&term);
        // ratio n -> n+1
        let dq = sum.q_exponent(n + 1) - sum.q_exponent(n);
        let c = if sum.sign_alternating { -Coeff::one() } else { Coeff::one() };
        term.mul_monomial(&c, &dq);
        for f in &sum.num {
            f.apply_range(&mut term, f.len.eval(n), f.len.eval(n + 1), false)?;
        }
        for f in &sum.den {
            f.apply_range(&mut term, f.len.eval(n), f.len.eval(n + 1), true)?;
        }
        if let Some(x) = &sum.extra {
            let e_old = exp_int(x.lin.eval(n));
            let e_new = exp_int(x.lin.eval(n + 1));
            if x.invert {
                mul_one_minus(&mut term, &(-Coeff::one()), &e_old);
                div_one_minus(&mut term, &(-Coeff::one()), &e_new)?;
            } else {
                div_one_minus(&mut term, &(-Coeff::one()), &e_old)?;
                mul_one_minus(&mut term, &(-Coeff::one()), &e_new);
            }
        }
        n += 1;
        if term.is_zero() {
            break;
        }
        match term.valuation() {
            Some(v) if v >= prec_exp => {
                beyond += 1;
                if beyond >= 2 {
                    break;
                }
            }
            _ => beyond = 0,
        }
        if n > n0 + cap {
            return Err(QError::NonTerminating(format!(
                "catalog sum fails to truncate after {} terms",
                n - n0
            )));
        }
    }
    Ok(total.truncate(&prec_exp))
}

/// Evaluate the product side: expand each term's atoms and combine.
pub fn eval_product_side(e: &IdentityEntry, prec: i64) -> QResult<Series> {
    let prod = e
        .product
        .as_ref()
        .ok_or_else(|| QError::MissingParameter(format!("{}: no product side", e.label)))?;
    eval_product_ast(prod, prec)
}

pub(crate) fn eval_product_ast(prod: &ProductSideAst, prec: i64) -> QResult<Series> {
    let prec_exp = exp_int(prec);
    let mut total = Series::monomial(&Coeff::zero(), &Exp::zero(), &prec_exp);
    for term in &prod.terms {
        let mut value = term.coeff.to_series(&prec_exp);
        for (base, step) in &term.num {
            value = value.mul(&poch_inf(base, step, &prec_exp)?);
        }
        for (base, step) in &term.den {
            let d = poch_inf(base, step, &prec_exp)?;
            value = value.div_unit(&d)?;
        }
        total = total.add(&value);
    }
    Ok(total.truncate(&prec_exp))
}

/// Check sum side == product side up to `order` (default: the entry's order).
pub fn verify_entry(e: &IdentityEntry, order: Option<i64>) -> QResult<Option<crate::series::Mismatch>> {
    let order = order.unwrap_or(e.order);
    let lhs = eval_sum_side(e, order)?;
    let rhs = eval_product_side(e, order)?;
    Series::equal_up_to(&lhs, &rhs, &exp_int(order))
}

/// Cross-link: re-derive both catalog sides from the entry's source theorem.
///
/// With parts (pre, bare, rhs) of the theorem at the preset and the entry's
/// post ops applied, checks
///   c0 + c1 * F * post(bare)        == catalog sum side
///   c0 + c1 * F * post(rhs / pre)   == catalog product side
/// at the given order.
pub fn cross_link_entry(e: &IdentityEntry, order: i64) -> QResult<()> {
    let (Some(theorem), Some(preset)) = (e.theorem, e.preset.as_ref()) else {
        return Err(QError::MissingParameter(format!(
            "{}: no source theorem/preset",
            e.label
        )));
    };
    // substitutions with r < 1 shrink precision: evaluate the theorem deep
    // enough that `order` survives.
    let mut shrink = Exp::one();
    for op in &e.post {
        if let PostOp::Subst(r) = op {
            shrink *= *r;
        }
    }
    let need = (exp_int(order) / shrink) + exp_int(2);
    let parts: TheoremParts = theorem_parts(theorem, preset, &need)?;
    let mut pre = parts.prefactor;
    let mut bare = parts.sum;
    let mut rhs = parts.rhs;
    for op in &e.post {
        match op {
            PostOp::Subst(r) => {
                pre = pre.substitute_q_power(r);
                bare = bare.substitute_q_power(r);
                rhs = rhs.substitute_q_power(r);
            }
            PostOp::Neg => {
                pre = pre.substitute_q_neg()?;
                bare = bare.substitute_q_neg()?;
                rhs = rhs.substitute_q_neg()?;
            }
        }
    }
    let ratio = rhs.div_unit(&pre)?;
    let order_exp = exp_int(order);

    let apply_link = |f: &Series| -> Series {
        let mut out = f.clone();
        for (c, e) in &e.link.mul_num {
            mul_one_minus(&mut out, &(-c.clone()), e);
        }
        for (c, e) in &e.link.mul_den {
            div_one_minus(&mut out, &(-c.clone()), e).expect("nonzero link factor");
        }
        out.scale_coeffs(&e.link.c1);
        out.add(&Series::monomial(&e.link.c0, &Exp::zero(), &out.prec()))
    };

    let lhs_link = apply_link(&bare);
    let rhs_link = apply_link(&ratio);
    let cat_sum = eval_sum_side(e, order)?;
    let cat_prod = eval_product_side(e, order)?;
    if let Some(mm) = Series::equal_up_to(&lhs_link, &cat_sum, &order_exp)? {
        return Err(QError::InadmissibleParameter(format!(
            "{}: sum cross-link mismatch: {mm}",
            e.label
        )));
    }
    if let Some(mm) = Series::equal_up_to(&rhs_link, &cat_prod, &order_exp)? {
        return Err(QError::InadmissibleParameter(format!(
            "{}: product cross-link mismatch: {mm}",
            e.label
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Cursor<'a> {
    text: &'a str,
    line: usize,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> QError {
        QError::SyntaxError { line: self.line, col: self.pos + 1, msg: msg.into() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> QResult<()> {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{tok}`")))
        }
    }

    fn try_eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn integer(&mut self) -> QResult<i64> {
        self.skip_ws();
        let s = self.rest();
        let mut len = 0;
        let bytes = s.as_bytes();
        if len < bytes.len() && (bytes[len] == b'-' || bytes[len] == b'+') {
            len += 1;
        }
        while len < bytes.len() && bytes[len].is_ascii_digit() {
            len += 1;
        }
        if len == 0 || (len == 1 && !bytes[0].is_ascii_digit()) {
            return Err(self.err("expected an integer"));
        }
        let v: i64 = s[..len].parse().map_err(|_| self.err("integer out of range"))?;
        self.pos += len;
        Ok(v)
    }

    fn rational(&mut self) -> QResult<Exp> {
        let num = self.integer()?;
        if self.rest().starts_with('/') {
            self.pos += 1;
            let den = self.integer()?;
            if den == 0 {
                return Err(self.err("zero denominator"));
            }
            Ok(Exp::new(num, den))
        } else {
            Ok(exp_int(num))
        }
    }

    /// Monomial grammar: 0 | [-] (INT | q [^ RAT] | INT q^ RAT ...)
    fn monomial(&mut self) -> QResult<Monomial> {
        self.skip_ws();
        let neg = self.try_eat("-");
        self.skip_ws();
        let mut coeff = Coeff::one();
        let mut has_coeff = false;
        if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            let r = self.rational()?;
            coeff = Coeff::new((*r.numer()).into(), (*r.denom()).into());
            has_coeff = true;
        }
        let mut exp = Exp::zero();
        if self.try_eat("q") {
            exp = Exp::one();
            if self.try_eat("^") {
                exp = self.rational()?;
            }
        } else if !has_coeff {
            return Err(self.err("expected a monomial"));
        }
        if neg {
            coeff = -coeff;
        }
        Ok(Monomial::new(coeff, exp))
    }

    fn lin_expr(&mut self) -> QResult<LinExpr> {
        self.skip_ws();
        let mut slope = 1i64;
        if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            slope = self.integer()?;
        }
        self.eat("n")?;
        let mut offset = 0i64;
        self.skip_ws();
        if self.rest().starts_with(['+', '-']) {
            offset = self.integer()?;
        }
        if !(1..=3).contains(&slope) || !(-1..=2).contains(&offset) {
            return Err(self.err(format!(
                "Pochhammer length {slope}n{offset:+} outside the supported shapes"
            )));
        }
        Ok(LinExpr { slope, offset })
    }

    fn ident(&mut self) -> QResult<&'a str> {
        self.skip_ws();
        let s = self.rest();
        let len = s
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.'))
            .unwrap_or(s.len());
        if len == 0 {
            return Err(self.err("expected an identifier"));
        }
        self.pos += len;
        Ok(&s[..len])
    }
}

fn parse_sum_factor(cur: &mut Cursor) -> QResult<PochFactorAst> {
    let kind_name = cur.ident()?;
    let kind = match kind_name {
        "poch" => PairKind::Plain,
        "pmpair" => PairKind::PmPair,
        "omegapair" => PairKind::OmegaPair,
        other => return Err(cur.err(format!("unknown factor kind `{other}`"))),
    };
    cur.eat("(")?;
    let base = cur.monomial()?;
    cur.eat(";")?;
    let step_mono = cur.monomial()?;
    if !step_mono.coeff.is_one() || !step_mono.exp.is_positive() {
        return Err(cur.err("factor step must be a positive power of q"));
    }
    cur.eat(";")?;
    let len = cur.lin_expr()?;
    cur.eat(")")?;
    if kind == PairKind::OmegaPair && (!base.coeff.is_one() || base.exp.is_negative()) {
        return Err(cur.err("omegapair base must be q^m with m >= 0"));
    }
    Ok(PochFactorAst { base, step: step_mono.exp, len, kind })
}

fn parse_factor_list(cur: &mut Cursor) -> QResult<Vec<PochFactorAst>> {
    cur.eat("[")?;
    let mut out = Vec::new();
    if cur.try_eat("]") {
        return Ok(out);
    }
    loop {
        out.push(parse_sum_factor(cur)?);
        if cur.try_eat("]") {
            return Ok(out);
        }
        cur.eat(",")?;
    }
}

fn parse_sum_line(cur: &mut Cursor) -> QResult<SumSideAst> {
    let mut sign_alternating = false;
    let mut qexp = None;
    let mut num = Vec::new();
    let mut den = Vec::new();
    let mut extra = None;
    let mut lead = Coeff::zero();
    let mut start = 0i64;
    while !cur.at_end() {
        let key = cur.ident()?;
        cur.eat("=")?;
        match key {
            "sign" => {
                if cur.try_eat("+") {
                    sign_alternating = false;
                } else if cur.try_eat("-") {
                    sign_alternating = true;
                } else {
                    return Err(cur.err("sign must be + or -"));
                }
            }
            "qexp" => {
                cur.eat("(")?;
                let a = cur.integer()?;
                cur.eat(",")?;
                let b = cur.integer()?;
                cur.eat(",")?;
                let c = cur.integer()?;
                cur.eat(")")?;
                cur.eat("/")?;
                let d = cur.integer()?;
                if !(d == 1 || d == 2) {
                    return Err(cur.err("qexp denominator must be 1 or 2"));
                }
                for n in 0..4 {
                    if (a * n * n + b * n + c) % d != 0 {
                        return Err(cur.err(format!(
                            "qexp ({a}n^2+{b}n+{c})/{d} is not integral at n={n}"
                        )));
                    }
                }
                qexp = Some((a, b, c, d));
            }
            "num" => num = parse_factor_list(cur)?,
            "den" => den = parse_factor_list(cur)?,
            "lead" => {
                let r = cur.rational()?;
                lead = Coeff::new((*r.numer()).into(), (*r.denom()).into());
            }
            "start" => start = cur.integer()?,
            "extra" => {
                let word = cur.ident()?;
                let invert = match word {
                    "inv" => true,
                    "mul" => false,
                    other => return Err(cur.err(format!("unknown extra kind `{other}`"))),
                };
                cur.eat("(")?;
                let lin = cur.lin_expr()?;
                cur.eat(")")?;
                extra = Some(ExtraFactor { invert, lin });
            }
            other => return Err(cur.err(format!("unknown sum key `{other}`"))),
        }
    }
    let qexp = qexp.ok_or_else(|| cur.err("sum line missing qexp"))?;
    // negative lengths below start must stay within the -1 convention
    for f in num.iter().chain(den.iter()) {
        let l0 = f.len.eval(start);
        if l0 < -1 {
            return Err(cur.err("factor length below -1 at the starting index"));
        }
    }
    Ok(SumSideAst { sign_alternating, qexp, num, den, extra, lead, start })
}

fn parse_prod_line(cur: &mut Cursor) -> QResult<ProductSideAst> {
    let mut terms = Vec::new();
    while !cur.at_end() {
        let key = cur.ident()?;
        if key != "term" {
            return Err(cur.err(format!("unknown prod key `{key}`")));
        }
        cur.eat("=")?;
        cur.eat("[")?;
        let coeff = cur.monomial()?;
        cur.eat(";")?;
        let mut num = Vec::new();
        let mut den = Vec::new();
        for _ in 0..2 {
            let side = cur.ident()?;
            cur.eat("=")?;
            cur.eat("[")?;
            let mut atoms = Vec::new();
            if !cur.try_eat("]") {
                loop {
                    let kind = cur.ident()?;
                    if kind != "poch" {
                        return Err(cur.err(format!("unknown product atom `{kind}`")));
                    }
                    cur.eat("(")?;
                    let base = cur.monomial()?;
                    cur.eat(";")?;
                    let step_mono = cur.monomial()?;
                    if !step_mono.coeff.is_one() || !step_mono.exp.is_positive() {
                        return Err(cur.err("atom step must be a positive power of q"));
                    }
                    cur.eat(")")?;
                    atoms.push((base, step_mono.exp));
                    if cur.try_eat("]") {
                        break;
                    }
                    cur.eat(",")?;
                }
            }
            match side {
                "num" => num = atoms,
                "den" => den = atoms,
                other => return Err(cur.err(format!("unknown product side `{other}`"))),
            }
            if !cur.try_eat(";") {
                break;
            }
        }
        cur.eat("]")?;
        terms.push(ProductTerm { coeff, num, den });
    }
    if terms.is_empty() || terms.len() > 2 {
        return Err(cur.err("product side needs one or two terms"));
    }
    Ok(ProductSideAst { terms })
}

fn parse_preset_line(cur: &mut Cursor) -> QResult<ParamAssignment> {
    let mut p = ParamAssignment::new();
    while !cur.at_end() {
        let key = cur.ident()?;
        cur.eat("=")?;
        if key == "q" {
            let m = cur.monomial()?;
            if !m.coeff.is_one() || !m.exp.is_positive() {
                return Err(cur.err("q substitution must be a positive power of q"));
            }
            p = p.with_qstep(m.exp);
        } else {
            let sym = Symbol::parse(key)
                .ok_or_else(|| cur.err(format!("unknown parameter `{key}`")))?;
            let m = cur.monomial()?;
            p.set(sym, m);
        }
    }
    Ok(p)
}

fn parse_post_line(cur: &mut Cursor) -> QResult<Vec<PostOp>> {
    let mut ops = Vec::new();
    while !cur.at_end() {
        let word = cur.ident()?;
        match word {
            "neg" => ops.push(PostOp::Neg),
            "subst" => {
                cur.eat("(")?;
                let r = cur.rational()?;
                if !r.is_positive() {
                    return Err(cur.err("substitution power must be positive"));
                }
                cur.eat(")")?;
                ops.push(PostOp::Subst(r));
            }
            other => return Err(cur.err(format!("unknown post op `{other}`"))),
        }
    }
    Ok(ops)
}

fn parse_link_line(cur: &mut Cursor) -> QResult<LinkSpec> {
    let mut link = LinkSpec::default();
    while !cur.at_end() {
        let key = cur.ident()?;
        cur.eat("=")?;
        match key {
            "c0" => {
                let r = cur.rational()?;
                link.c0 = Coeff::new((*r.numer()).into(), (*r.denom()).into());
            }
            "c1" => {
                let r = cur.rational()?;
                link.c1 = Coeff::new((*r.numer()).into(), (*r.denom()).into());
            }
            "num" | "den" => {
                cur.eat("[")?;
                let mut bins = Vec::new();
                if !cur.try_eat("]") {
                    loop {
                        let w = cur.ident()?;
                        if w != "bin" {
                            return Err(cur.err(format!("unknown link factor `{w}`")));
                        }
                        cur.eat("(")?;
                        let c = cur.rational()?;
                        cur.eat(";")?;
                        let e = cur.rational()?;
                        cur.eat(")")?;
                        if !e.is_positive() {
                            return Err(cur.err("link factor exponent must be positive"));
                        }
                        bins.push((Coeff::new((*c.numer()).into(), (*c.denom()).into()), e));
                        if cur.try_eat("]") {
                            break;
                        }
                        cur.eat(",")?;
                    }
                }
                if key == "num" {
                    link.mul_num = bins;
                } else {
                    link.mul_den = bins;
                }
            }
            other => return Err(cur.err(format!("unknown link key `{other}`"))),
        }
    }
    Ok(link)
}

/// Parse a catalog file into entries, rejecting duplicate labels.
pub fn parse_catalog(text: &str) -> QResult<Vec<IdentityEntry>> {
    let mut entries = Vec::new();
    let mut labels = BTreeSet::new();

    let mut block: Vec<(usize, &str)> = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    loop {
        let item = lines.next();
        let flush = match item {
            Some((_, raw)) => {
                let stripped = raw.split('#').next().unwrap_or("").trim_end();
                if stripped.trim().is_empty() {
                    true
                } else {
                    block.push((item.unwrap().0 + 1, stripped));
                    false
                }
            }
            None => true,
        };
        if flush && !block.is_empty() {
            let entry = parse_block(&block)?;
            if !labels.insert(entry.label.clone()) {
                return Err(QError::DuplicateLabel(entry.label));
            }
            if let Some(alias) = &entry.alias {
                if !labels.insert(alias.clone()) {
                    return Err(QError::DuplicateLabel(alias.clone()));
                }
            }
            entries.push(entry);
            block.clear();
        }
        if item.is_none() {
            break;
        }
    }
    Ok(entries)
}

fn parse_block(block: &[(usize, &str)]) -> QResult<IdentityEntry> {
    let mut label = None;
    let mut alias = None;
    let mut theorem = None;
    let mut preset = None;
    let mut post = Vec::new();
    let mut link = LinkSpec::default();
    let mut sum = None;
    let mut product = None;
    let mut order = None;

    for (line_no, line) in block {
        let Some((key, value)) = line.split_once(':') else {
            return Err(QError::SyntaxError {
                line: *line_no,
                col: 1,
                msg: "expected `key: value`".into(),
            });
        };
        let mut cur = Cursor { text: value, line: *line_no, pos: 0 };
        match key.trim() {
            "id" => label = Some(value.trim().to_string()),
            "alias" => alias = Some(value.trim().to_string()),
            "theorem" => {
                let name = value.trim();
                theorem = Some(TheoremId::parse(name).ok_or_else(|| QError::SyntaxError {
                    line: *line_no,
                    col: 1,
                    msg: format!("unknown theorem `{name}`"),
                })?);
            }
            "preset" => preset = Some(parse_preset_line(&mut cur)?),
            "post" => post = parse_post_line(&mut cur)?,
            "link" => link = parse_link_line(&mut cur)?,
            "sum" => sum = Some(parse_sum_line(&mut cur)?),
            "prod" => product = Some(parse_prod_line(&mut cur)?),
            "order" => order = Some(cur.integer()?),
            other => {
                return Err(QError::SyntaxError {
                    line: *line_no,
                    col: 1,
                    msg: format!("unknown record key `{other}`"),
                })
            }
        }
        if key.trim() != "id" && key.trim() != "alias" && key.trim() != "theorem" {
            let mut tail = cur;
            if !tail.at_end() {
                return Err(tail.err("trailing input"));
            }
        }
    }

    let label = label.ok_or_else(|| QError::SyntaxError {
        line: block[0].0,
        col: 1,
        msg: "record missing `id:`".into(),
    })?;
    Ok(IdentityEntry {
        label,
        alias,
        theorem,
        preset,
        post,
        link,
        sum,
        product,
        order: order.unwrap_or(200),
    })
}

/// Parse the shipped catalog.
pub fn shipped_entries() -> QResult<Vec<IdentityEntry>> {
    parse_catalog(SHIPPED_CATALOG)
}

/// Natural label ordering: split into text and numeric runs (S.9 < S.18).
pub fn label_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    let chunks = |s: &str| -> Vec<(bool, String)> {
        let mut out: Vec<(bool, String)> = Vec::new();
        for ch in s.chars() {
            let digit = ch.is_ascii_digit();
            match out.last_mut() {
                Some((d, run)) if *d == digit => run.push(ch),
                _ => out.push((digit, ch.to_string())),
            }
        }
        out
    };
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(cb.iter()) {
        let ord = match (x.0, y.0) {
            (true, true) => {
                let nx: u64 = x.1.parse().unwrap_or(u64::MAX);
                let ny: u64 = y.1.parse().unwrap_or(u64::MAX);
                nx.cmp(&ny)
            }
            _ => x.1.cmp(&y.1),
        };
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len())
}
