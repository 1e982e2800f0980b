//! Total derivative, the intermediate quantities s1, s2, s3, the four
//! relative invariants and the maximal-symmetry verdict.
//!
//! An equation u''' = f(x, u, u', u'') has a seven-dimensional point
//! symmetry group exactly when the four relative invariants computed here
//! all vanish identically; that is also the criterion for point-equivalence
//! to the canonical form u''' = 0.

use crate::expr::{JetVar, RationalExpr};
use serde::Serialize;
use std::fmt;

/// A scalar third-order ODE represented by its right-hand side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ode3 {
    f: RationalExpr,
}

impl Ode3 {
    pub fn new(f: RationalExpr) -> Self {
        Ode3 { f }
    }

    pub fn rhs(&self) -> &RationalExpr {
        &self.f
    }
}

/// Total derivative along solutions: g_x + p g_u + q g_p + f g_q.
pub fn total_derivative(g: &RationalExpr, f: &RationalExpr) -> RationalExpr {
    let p = RationalExpr::var(JetVar::P);
    let q = RationalExpr::var(JetVar::Q);
    let mut acc = g.partial(JetVar::X);
    acc = &acc + &(&p * &g.partial(JetVar::U));
    acc = &acc + &(&q * &g.partial(JetVar::P));
    let gq = g.partial(JetVar::Q);
    if !gq.is_zero() {
        acc = &acc + &(f * &gq);
    }
    acc
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Verdict {
    MaximallySymmetric,
    NotMaximallySymmetric,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::MaximallySymmetric => f.write_str("MaximallySymmetric"),
            Verdict::NotMaximallySymmetric => f.write_str("NotMaximallySymmetric"),
        }
    }
}

/// The torsion coefficients s1 = f_q, s2 = 2 f_q^2 + 9 f_p - 3 D_x f_q,
/// s3 = f_qq.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SQuantities {
    pub s1: RationalExpr,
    pub s2: RationalExpr,
    pub s3: RationalExpr,
}

/// The four relative invariants with their vanishing flags and the verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantReport {
    pub i1: RationalExpr,
    pub i2: RationalExpr,
    pub i3: RationalExpr,
    pub i4: RationalExpr,
    pub vanishing: [bool; 4],
    pub verdict: Verdict,
    /// 1-based index of the first nonvanishing invariant, when any.
    pub witness: Option<usize>,
}

impl InvariantReport {
    pub fn invariants(&self) -> [&RationalExpr; 4] {
        [&self.i1, &self.i2, &self.i3, &self.i4]
    }
}

impl Ode3 {
    pub fn s_quantities(&self) -> SQuantities {
        let f = &self.f;
        let fq = f.partial(JetVar::Q);
        let fp = f.partial(JetVar::P);
        let two = RationalExpr::from_int(2);
        let three = RationalExpr::from_int(3);
        let nine = RationalExpr::from_int(9);
        let dfq = total_derivative(&fq, f);
        let s2 = &(&(&two * &(&fq * &fq)) + &(&nine * &fp)) - &(&three * &dfq);
        SQuantities {
            s1: fq.clone(),
            s2,
            s3: fq.partial(JetVar::Q),
        }
    }

    /// Compute I1..I4. Both published forms (direct in f, and via s1, s2, s3)
    /// are evaluated and cross-checked before reporting.
    pub fn invariants(&self) -> InvariantReport {
        let f = &self.f;
        let fq = f.partial(JetVar::Q);
        let fp = f.partial(JetVar::P);
        let fu = f.partial(JetVar::U);
        let fqq = fq.partial(JetVar::Q);
        let fpp = fp.partial(JetVar::P);
        let fpq = fp.partial(JetVar::Q);
        let fuq = fu.partial(JetVar::Q);
        let dfq = total_derivative(&fq, f);
        let dfp = total_derivative(&fp, f);
        let ddfq = total_derivative(&dfq, f);

        let c = RationalExpr::from_int;

        // Direct forms.
        let i1 = fqq.partial(JetVar::Q);
        let i2 = &(&fqq * &fqq) + &(&c(6) * &fpq.partial(JetVar::Q));
        let i3 = {
            let cube = &(&fq * &fq) * &fq;
            let mut acc = &c(4) * &cube;
            acc = &acc + &(&(&c(18) * &fq) * &(&fp - &dfq));
            acc = &acc + &(&c(9) * &ddfq);
            acc = &acc - &(&c(27) * &dfp);
            &acc + &(&c(54) * &fu)
        };
        let i4 = {
            let bracket = &(&(&fq * &fq) + &(&c(9) * &fp)) - &(&c(3) * &dfq);
            let mut acc = &fqq * &bracket;
            acc = &acc - &(&c(9) * &fpp);
            acc = &acc + &(&c(18) * &fuq);
            &acc - &(&(&c(6) * &fq) * &fpq)
        };

        // Forms via the torsion coefficients.
        let s = self.s_quantities();
        let i1_s = s.s3.partial(JetVar::Q);
        let i2_s = &(&s.s3 * &s.s3) + &(&c(6) * &s.s3.partial(JetVar::P));
        let i3_s = {
            let ds2 = total_derivative(&s.s2, f);
            &(&(&(&c(2) * &s.s1) * &s.s2) - &(&c(3) * &ds2)) + &(&c(54) * &fu)
        };
        let i4_s = {
            let bracket = &s.s2 - &(&s.s1 * &s.s1);
            let mut acc = &s.s3 * &bracket;
            acc = &acc - &(&c(9) * &fpp);
            acc = &acc + &(&c(18) * &fuq);
            &acc - &(&(&c(6) * &s.s1) * &fpq)
        };

        assert_eq!(i1, i1_s, "I1 forms disagree");
        assert_eq!(i2, i2_s, "I2 forms disagree");
        assert_eq!(i3, i3_s, "I3 forms disagree");
        assert_eq!(i4, i4_s, "I4 forms disagree");

        let vanishing = [i1.is_zero(), i2.is_zero(), i3.is_zero(), i4.is_zero()];
        let witness = vanishing.iter().position(|v| !v).map(|k| k + 1);
        let verdict = if witness.is_none() {
            Verdict::MaximallySymmetric
        } else {
            Verdict::NotMaximallySymmetric
        };
        InvariantReport {
            i1,
            i2,
            i3,
            i4,
            vanishing,
            verdict,
            witness,
        }
    }

    pub fn classify(&self) -> Verdict {
        self.invariants().verdict
    }
}
