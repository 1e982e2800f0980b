//! Univariate polynomials in one jet slot with rational-function
//! coefficients, used by the integration and Riccati machinery.
//!
//! A `UPoly` holds coefficients by ascending power of a distinguished
//! variable; the coefficients are `RationalExpr`s that must not depend on
//! that variable.

use crate::expr::RationalExpr;
use crate::mpoly::{lcm, MPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct UPoly {
    /// Index = power of the main variable.
    pub coeffs: Vec<RationalExpr>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn from_coeffs(mut coeffs: Vec<RationalExpr>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lead(&self) -> &RationalExpr {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn scale(&self, c: &RationalExpr) -> UPoly {
        UPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let zero = RationalExpr::zero_nvars(
                self.coeffs
                    .first()
                    .or(other.coeffs.first())
                    .map(|c| c.nvars())
                    .unwrap_or(crate::expr::JET_VARS),
            );
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = other.coeffs.get(i).unwrap_or(&zero);
            out.push(a + b);
        }
        UPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let neg = UPoly::from_coeffs(other.coeffs.iter().map(|c| -c).collect());
        self.add(&neg)
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let nv = self.coeffs[0].nvars();
        let mut out = vec![RationalExpr::zero_nvars(nv); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::from_coeffs(out)
    }

    /// Shift by `k` powers of the main variable (multiply by v^k).
    pub fn shift(&self, k: usize) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let nv = self.coeffs[0].nvars();
        let mut out = vec![RationalExpr::zero_nvars(nv); k];
        out.extend(self.coeffs.iter().cloned());
        UPoly::from_coeffs(out)
    }

    /// Formal derivative with respect to the main variable.
    pub fn derivative(&self) -> UPoly {
        if self.coeffs.len() <= 1 {
            return UPoly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &const_like(c, i as i64))
            .collect();
        UPoly::from_coeffs(out)
    }

    /// Euclidean division by a nonzero polynomial over the coefficient field.
    pub fn div_rem(&self, divisor: &UPoly) -> (UPoly, UPoly) {
        assert!(!divisor.is_zero());
        let mut rem = self.clone();
        let mut quot = UPoly::zero();
        let dd = divisor.degree().unwrap();
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            let c = rem.lead() / divisor.lead();
            let k = dr - dd;
            let mut t = UPoly::from_coeffs(vec![c]);
            t = t.shift(k);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(divisor));
        }
        (quot, rem)
    }

    /// Monic gcd over the coefficient field.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let inv = a.lead().recip().expect("nonzero lead");
            a.scale(&inv)
        }
    }

    /// Evaluate the polynomial at an expression value of the main variable.
    pub fn eval_expr(&self, value: &RationalExpr) -> RationalExpr {
        let nv = value.nvars();
        let mut acc = RationalExpr::zero_nvars(nv);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Reassemble into a single expression, with `v` the main variable slot.
    pub fn to_expr(&self, v: usize) -> RationalExpr {
        let nv = self
            .coeffs
            .first()
            .map(|c| c.nvars())
            .unwrap_or(crate::expr::JET_VARS);
        let var = RationalExpr::var_nvars(nv, v);
        self.eval_expr(&var)
    }
}

/// Constant in the same variable space as `like`.
pub(crate) fn const_like(like: &RationalExpr, n: i64) -> RationalExpr {
    RationalExpr::from_poly_nvars(MPoly::from_int(like.nvars(), n))
}

/// View an expression as a univariate polynomial in slot `v` over the field
/// of rational functions of the remaining variables: returns (numerator as
/// UPoly, denominator expression free of `v`). The denominator of the input
/// must not depend on `v` for the second form; when it does, the whole
/// expression is first rewritten over a `v`-free denominator by polynomial
/// division bookkeeping: num/den with den = den_vfree * den_v; here we simply
/// return numerator slices over the full denominator, so callers get
/// `expr = sum_k coeffs[k] v^k` exactly.
pub(crate) fn expr_as_upoly(expr: &RationalExpr, v: usize) -> Option<UPoly> {
    if expr.den().depends_on(v) {
        return None;
    }
    let den = RationalExpr::from_poly_nvars(expr.den().clone());
    let d = expr.num().degree_in(v);
    let mut coeffs = Vec::with_capacity(d as usize + 1);
    for k in 0..=d {
        let c = RationalExpr::from_poly_nvars(expr.num().coeff_of_power(v, k));
        coeffs.push(&c / &den);
    }
    Some(UPoly::from_coeffs(coeffs))
}

/// Split `expr` into numerator and denominator polynomials in `v` after
/// clearing: returns (N, D) with N/D = expr, both `UPoly`s whose
/// coefficients are free of `v`.
pub(crate) fn expr_as_upoly_fraction(expr: &RationalExpr, v: usize) -> (UPoly, UPoly) {
    let num = poly_to_upoly(expr.num(), v);
    let den = poly_to_upoly(expr.den(), v);
    (num, den)
}

fn poly_to_upoly(p: &MPoly, v: usize) -> UPoly {
    let d = p.degree_in(v);
    let coeffs = (0..=d)
        .map(|k| RationalExpr::from_poly_nvars(p.coeff_of_power(v, k)))
        .collect();
    UPoly::from_coeffs(coeffs)
}

/// Common denominator of a family of expressions (an MPoly).
pub(crate) fn common_denominator(exprs: &[&RationalExpr]) -> MPoly {
    let nv = exprs
        .first()
        .map(|e| e.nvars())
        .unwrap_or(crate::expr::JET_VARS);
    let mut acc = MPoly::one(nv);
    for e in exprs {
        acc = lcm(&acc, e.den());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn e(s: &str) -> RationalExpr {
        parse(s).unwrap()
    }

    #[test]
    fn upoly_round_trip() {
        // p-slot is index 2
        let f = e("q + x*p^2 + u*p");
        let up = expr_as_upoly(&f, 2).unwrap();
        assert_eq!(up.degree(), Some(2));
        assert_eq!(up.to_expr(2), f);
    }

    #[test]
    fn div_rem_and_gcd() {
        // In x (slot 0): (x^2 - u^2) / (x - u) = x + u
        let a = expr_as_upoly(&e("x^2 - u^2"), 0).unwrap();
        let b = expr_as_upoly(&e("x - u"), 0).unwrap();
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q.to_expr(0), e("x + u"));

        let g = a.gcd(&b);
        assert_eq!(g.to_expr(0), e("x - u"));
    }

    #[test]
    fn derivative_matches_kernel() {
        let f = e("x^3 + u*x");
        let up = expr_as_upoly(&f, 0).unwrap();
        assert_eq!(up.derivative().to_expr(0), e("3*x^2 + u"));
    }
}
