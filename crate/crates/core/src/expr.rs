//! Canonical rational expressions in the jet variables.
//!
//! A [`RationalExpr`] is a reduced fraction of two [`MPoly`]s: the gcd of
//! numerator and denominator is removed and the denominator is scaled so its
//! graded-lex leading coefficient is one. Two expressions represent the same
//! function exactly when they are structurally equal, which makes zero
//! testing decidable.

use crate::mpoly::{gcd, MPoly, Mono};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

/// Number of public jet variables: x, u, p = u', q = u''.
pub const JET_VARS: usize = 4;

/// A coordinate on second-order jet space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum JetVar {
    X,
    U,
    P,
    Q,
}

impl JetVar {
    pub const ALL: [JetVar; 4] = [JetVar::X, JetVar::U, JetVar::P, JetVar::Q];

    pub fn index(self) -> usize {
        match self {
            JetVar::X => 0,
            JetVar::U => 1,
            JetVar::P => 2,
            JetVar::Q => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JetVar::X => "x",
            JetVar::U => "u",
            JetVar::P => "p",
            JetVar::Q => "q",
        }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("division by the zero expression")]
    DivisionByZero,
    #[error("evaluation at a singular point: denominator vanishes")]
    SingularPoint,
}

/// Exact rational function in the jet variables, kept in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalExpr {
    num: MPoly,
    den: MPoly,
}

impl RationalExpr {
    /// Canonicalize `num/den`. Errors when `den` is the zero polynomial.
    pub fn reduced(num: MPoly, den: MPoly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalExpr {
                den: MPoly::one(num.nvars()),
                num,
            });
        }
        let g = gcd(&num, &den);
        let num = num.exact_div(&g).expect("gcd divides numerator");
        let den = den.exact_div(&g).expect("gcd divides denominator");
        let lc = den.leading_coeff();
        let inv = BigRational::one() / lc;
        Ok(RationalExpr {
            num: num.mul_scalar(&inv),
            den: den.mul_scalar(&inv),
        })
    }

    pub fn from_poly(num: MPoly) -> Self {
        RationalExpr {
            den: MPoly::one(num.nvars()),
            num,
        }
    }

    /// Assemble a fraction already known to be reduced, scaling the
    /// denominator monic.
    fn normalize_lc(num: MPoly, den: MPoly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RationalExpr {
                den: MPoly::one(num.nvars()),
                num,
            };
        }
        if den.is_one() {
            return RationalExpr { num, den };
        }
        let lc = den.leading_coeff();
        if lc.is_one() {
            return RationalExpr { num, den };
        }
        let inv = BigRational::one() / lc;
        RationalExpr {
            num: num.mul_scalar(&inv),
            den: den.mul_scalar(&inv),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(MPoly::zero(JET_VARS))
    }

    pub fn one() -> Self {
        Self::from_poly(MPoly::one(JET_VARS))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(MPoly::from_int(JET_VARS, n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::from_poly(MPoly::constant(JET_VARS, r))
    }

    pub fn var(v: JetVar) -> Self {
        Self::from_poly(MPoly::var(JET_VARS, v.index()))
    }

    pub(crate) fn from_poly_nvars(num: MPoly) -> Self {
        RationalExpr {
            den: MPoly::one(num.nvars()),
            num,
        }
    }

    pub(crate) fn zero_nvars(n: usize) -> Self {
        Self::from_poly_nvars(MPoly::zero(n))
    }

    pub(crate) fn one_nvars(n: usize) -> Self {
        Self::from_poly_nvars(MPoly::one(n))
    }

    pub(crate) fn var_nvars(n: usize, v: usize) -> Self {
        Self::from_poly_nvars(MPoly::var(n, v))
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub(crate) fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_constant() {
            let n = self.num.constant_value()?;
            let d = self.den.constant_value()?;
            Some(n / d)
        } else {
            None
        }
    }

    pub fn checked_div(&self, other: &RationalExpr) -> Result<RationalExpr, ExprError> {
        Ok(self * &other.recip()?)
    }

    pub fn recip(&self) -> Result<RationalExpr, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(RationalExpr::normalize_lc(
            self.den.clone(),
            self.num.clone(),
        ))
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn powi(&self, e: i64) -> Result<RationalExpr, ExprError> {
        let mag = e.unsigned_abs() as u32;
        let pos = RationalExpr {
            num: self.num.pow(mag),
            den: self.den.pow(mag),
        };
        if e >= 0 {
            Ok(pos)
        } else {
            pos.recip()
        }
    }

    /// Exact partial derivative (quotient rule), canonical.
    pub fn partial(&self, v: JetVar) -> RationalExpr {
        self.partial_idx(v.index())
    }

    pub(crate) fn partial_idx(&self, v: usize) -> RationalExpr {
        let dn = self.num.partial(v);
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return RationalExpr::reduced(dn, self.den.clone()).expect("den nonzero");
        }
        // d(n/d) = (n' e - n h)/(d e) with e = d/g, h = d'/g, g = gcd(d, d');
        // keeps the gcd that finishes canonicalization on small operands.
        let g = gcd(&self.den, &dd);
        let e = self.den.exact_div(&g).expect("gcd divides");
        let h = dd.exact_div(&g).expect("gcd divides");
        let num = dn.mul(&e).sub(&self.num.mul(&h));
        let den = self.den.mul(&e);
        RationalExpr::reduced(num, den).expect("den nonzero")
    }

    /// Exact evaluation; errors when the denominator vanishes at the point.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, ExprError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ExprError::SingularPoint);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Substitute an expression for each variable simultaneously.
    pub fn subst(&self, values: &[RationalExpr]) -> RationalExpr {
        assert_eq!(values.len(), self.nvars());
        let n = eval_poly_at_exprs(&self.num, values);
        let d = eval_poly_at_exprs(&self.den, values);
        n.checked_div(&d)
            .expect("substitution produced a vanishing denominator")
    }

    /// Substitute for a single variable, leaving the others in place.
    pub fn subst_var(&self, v: JetVar, value: &RationalExpr) -> RationalExpr {
        let mut values: Vec<RationalExpr> = (0..self.nvars())
            .map(|i| RationalExpr::var_nvars(self.nvars(), i))
            .collect();
        values[v.index()] = value.clone();
        self.subst(&values)
    }

    pub fn degree_in(&self, v: JetVar) -> (u32, u32) {
        (
            self.num.degree_in(v.index()),
            self.den.degree_in(v.index()),
        )
    }

    pub fn depends_on(&self, v: JetVar) -> bool {
        self.num.depends_on(v.index()) || self.den.depends_on(v.index())
    }

    pub(crate) fn depends_on_idx(&self, v: usize) -> bool {
        self.num.depends_on(v) || self.den.depends_on(v)
    }

    /// True when the expression is a polynomial of degree at most one in `v`.
    pub(crate) fn is_affine_in(&self, v: usize) -> bool {
        !self.den.depends_on(v) && self.num.degree_in(v) <= 1
    }

    pub(crate) fn extend_to(&self, n: usize) -> RationalExpr {
        RationalExpr {
            num: self.num.extend_to(n),
            den: self.den.extend_to(n),
        }
    }

    pub(crate) fn restrict_to(&self, n: usize) -> Option<RationalExpr> {
        Some(RationalExpr {
            num: self.num.restrict_to(n)?,
            den: self.den.restrict_to(n)?,
        })
    }

    pub(crate) fn swap_vars(&self, a: usize, b: usize) -> RationalExpr {
        RationalExpr::reduced(self.num.swap_vars(a, b), self.den.swap_vars(a, b))
            .expect("den nonzero")
    }

    /// Scale so the numerator's graded-lex leading coefficient is one.
    /// Used to normalize the homogeneous auxiliary functions.
    pub fn normalized_monic(&self) -> RationalExpr {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.num.leading_coeff();
        let inv = BigRational::one() / lc;
        RationalExpr {
            num: self.num.mul_scalar(&inv),
            den: self.den.mul_scalar(&inv),
        }
    }
}

fn eval_poly_at_exprs(p: &MPoly, values: &[RationalExpr]) -> RationalExpr {
    let nv = values
        .first()
        .map(|e| e.nvars())
        .unwrap_or(p.nvars());
    let mut acc = RationalExpr::zero_nvars(nv);
    for (m, c) in p.terms() {
        let mut term = RationalExpr::from_poly_nvars(MPoly::constant(nv, c.clone()));
        for (v, &e) in m.0.iter().enumerate() {
            if e > 0 {
                term = &term * &values[v].powi(e as i64).expect("positive power");
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// Addition of canonical fractions: cancel the denominator gcd first so
/// the finishing reduction only sees the shared part, and skip it entirely
/// for coprime denominators (the sum is already reduced then).
fn add_fractions(a: &RationalExpr, b: &RationalExpr, subtract: bool) -> RationalExpr {
    let combine = |x: &MPoly, y: &MPoly| if subtract { x.sub(y) } else { x.add(y) };
    if a.den == b.den {
        return RationalExpr::reduced(combine(&a.num, &b.num), a.den.clone())
            .expect("den nonzero");
    }
    if a.den.is_one() || b.den.is_one() || a.is_zero() || b.is_zero() {
        let num = combine(&a.num.mul(&b.den), &b.num.mul(&a.den));
        return RationalExpr::reduced(num, a.den.mul(&b.den)).expect("den nonzero");
    }
    let g = gcd(&a.den, &b.den);
    if g.is_one() {
        let num = combine(&a.num.mul(&b.den), &b.num.mul(&a.den));
        let den = a.den.mul(&b.den);
        // Coprime denominators leave nothing to cancel.
        return RationalExpr::normalize_lc(num, den);
    }
    let da = a.den.exact_div(&g).expect("gcd divides");
    let db = b.den.exact_div(&g).expect("gcd divides");
    let num = combine(&a.num.mul(&db), &b.num.mul(&da));
    if num.is_zero() {
        return RationalExpr::zero_nvars(a.nvars());
    }
    // Any surviving common factor divides g.
    let g2 = gcd(&num, &g);
    let num = num.exact_div(&g2).expect("gcd divides");
    let den = a.den.mul(&db).exact_div(&g2).expect("gcd divides");
    RationalExpr::normalize_lc(num, den)
}

impl Add for &RationalExpr {
    type Output = RationalExpr;
    fn add(self, other: &RationalExpr) -> RationalExpr {
        add_fractions(self, other, false)
    }
}

impl Sub for &RationalExpr {
    type Output = RationalExpr;
    fn sub(self, other: &RationalExpr) -> RationalExpr {
        add_fractions(self, other, true)
    }
}

impl Mul for &RationalExpr {
    type Output = RationalExpr;
    fn mul(self, other: &RationalExpr) -> RationalExpr {
        if self.is_zero() || other.is_zero() {
            return RationalExpr::zero_nvars(self.nvars());
        }
        // Cross-cancel: inputs are canonical, so the product of the reduced
        // parts is reduced (the coefficient ring is a UFD).
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.exact_div(&g1).expect("gcd divides");
        let n2 = other.num.exact_div(&g2).expect("gcd divides");
        let d1 = self.den.exact_div(&g2).expect("gcd divides");
        let d2 = other.den.exact_div(&g1).expect("gcd divides");
        RationalExpr::normalize_lc(n1.mul(&n2), d1.mul(&d2))
    }
}

impl Div for &RationalExpr {
    type Output = RationalExpr;
    fn div(self, other: &RationalExpr) -> RationalExpr {
        self.checked_div(other)
            .expect("division by the zero expression")
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

const VAR_NAMES: [&str; 5] = ["x", "u", "p", "q", "t"];

fn fmt_coeff_monomial(out: &mut String, c: &BigRational, m: &Mono, leading: bool) {
    let neg = c.is_negative();
    let abs = c.abs();
    if leading {
        if neg {
            out.push('-');
        }
    } else if neg {
        out.push('-');
    } else {
        out.push('+');
    }
    let unit_mono = m.is_unit();
    if !abs.is_one() || unit_mono {
        out.push_str(&abs.numer().to_string());
        if !abs.denom().is_one() {
            out.push('/');
            out.push_str(&abs.denom().to_string());
        }
        if !unit_mono {
            out.push('*');
        }
    }
    let mut first = true;
    for (v, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(VAR_NAMES.get(v).unwrap_or(&"?"));
        if e > 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

fn fmt_poly(p: &MPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    // Display order: total degree ascending, ties broken with the earlier
    // variable (x before u before p before q) first.
    let mut terms: Vec<(&Mono, &BigRational)> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| b.0.cmp(&a.0))
    });
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        fmt_coeff_monomial(&mut out, c, m, i == 0);
    }
    out
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = fmt_poly(&self.num);
        if self.den.is_one() {
            return f.write_str(&num);
        }
        let den = fmt_poly(&self.den);
        if self.num.num_terms() > 1 {
            write!(f, "({})/({})", num, den)
        } else {
            write!(f, "{}/({})", num, den)
        }
    }
}

/// Rational constants used for points and coefficients in tests and the CLI.
pub fn big_rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn e(s: &str) -> RationalExpr {
        parse(s).unwrap()
    }

    #[test]
    fn canonical_gcd_cancellation() {
        let a = e("(q^2-p^2)/(q-p)");
        assert_eq!(a, e("q+p"));
        assert!(a.den().is_one());
    }

    #[test]
    fn additive_inverse_and_reciprocal() {
        let p = RationalExpr::var(JetVar::P);
        assert!((&p + &(-&p)).is_zero());
        let inv = e("1/(1+p)");
        let prod = &inv * &e("1+p");
        assert!(prod.is_one());
    }

    #[test]
    fn binomial_identity() {
        let lhs = e("(x+u)^2");
        let rhs = e("x^2+2*x*u+u^2");
        assert!((&lhs - &rhs).is_zero());
    }

    #[test]
    fn partial_quotient_rule() {
        let f = e("3*q^2/(1+p)");
        assert_eq!(f.partial(JetVar::Q), e("6*q/(1+p)"));
        assert_eq!(f.partial(JetVar::P), e("-3*q^2/(1+p)^2"));
        assert!(RationalExpr::var(JetVar::X).partial(JetVar::U).is_zero());
    }

    #[test]
    fn mixed_partials_commute() {
        let f = e("(x*q^2 + u*p)/(1 + x*u + p^2)");
        for v in JetVar::ALL {
            for w in JetVar::ALL {
                assert_eq!(f.partial(v).partial(w), f.partial(w).partial(v));
            }
        }
    }

    #[test]
    fn eval_examples() {
        let f = e("3*q^2/(1+p)");
        let pt = [
            big_rational(0, 1),
            big_rational(0, 1),
            big_rational(1, 1),
            big_rational(2, 1),
        ];
        assert_eq!(f.eval(&pt).unwrap(), big_rational(6, 1));
        let g = e("x+u");
        let pt2 = [
            big_rational(2, 1),
            big_rational(3, 1),
            big_rational(0, 1),
            big_rational(0, 1),
        ];
        assert_eq!(g.eval(&pt2).unwrap(), big_rational(5, 1));
        let h = e("1/(1+p)");
        let sing = [
            big_rational(0, 1),
            big_rational(0, 1),
            big_rational(-1, 1),
            big_rational(0, 1),
        ];
        assert_eq!(h.eval(&sing), Err(ExprError::SingularPoint));
    }

    #[test]
    fn denominator_is_monic() {
        let a = e("q/(2+2*p)");
        assert_eq!(a.den().leading_coeff(), big_rational(1, 1));
        assert_eq!(a, e("1/2*q/(1+p)"));
    }

    #[test]
    fn display_round_trip() {
        for s in [
            "3*q^2/(1+p)",
            "(q+p)/(x*u)",
            "-2*p/(x*u^3)-1/(x^2*u^2)",
            "0",
            "x+u",
            "1-p+q^3",
            "3/2*q^2/p",
        ] {
            let v = e(s);
            let printed = v.to_string();
            assert_eq!(parse(&printed).unwrap(), v, "round trip of {printed}");
        }
    }

    #[test]
    fn subst_composes() {
        let f = e("q^2/(1+p)");
        let vals = [e("x"), e("u"), e("x*u"), e("x+u")];
        let g = f.subst(&vals);
        assert_eq!(g, e("(x+u)^2/(1+x*u)"));
    }
}
