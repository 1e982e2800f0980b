//! Point transformations of the plane, their third prolongation along
//! solutions, exact linearization checks, and pullbacks.
//!
//! A transformation sends (x, u) to (phi(x, u), psi(x, u)). Prolonging it
//! through the jet space expresses the transformed third derivative along
//! solutions of u''' = f as `A + B*f`, with A and B depending only on the
//! transformation. Verification and pullback are exact rational identities
//! built from that split. The symbol standing for u''' during prolongation
//! is a fifth kernel variable that never escapes this module.

use crate::expr::{JetVar, RationalExpr};
use crate::jet::{total_derivative, Ode3};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("transformation components must depend on x and u only")]
    NotPointFunction,
    #[error("degenerate transformation: Jacobian phi_x*psi_u - phi_u*psi_x vanishes identically")]
    DegenerateJacobian,
    #[error("degenerate transformation: D_x phi vanishes identically")]
    DegenerateDxPhi,
}

/// Invertible change of variables (x, u) -> (phi, psi).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointTransform {
    phi: RationalExpr,
    psi: RationalExpr,
}

/// The prolonged derivatives of a transformation: ubar1 and ubar2 are the
/// transformed first and second derivatives; the transformed third
/// derivative along u''' = f equals `a + b*f`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Prolongation {
    pub ubar1: RationalExpr,
    pub ubar2: RationalExpr,
    pub a: RationalExpr,
    pub b: RationalExpr,
}

/// The auxiliary functions a1, a2, a3 induced by a transformation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AuxTriple {
    pub a1: RationalExpr,
    pub a2: RationalExpr,
    pub a3: RationalExpr,
}

impl PointTransform {
    /// Validates that phi, psi depend on (x, u) only and that the
    /// transformation is nondegenerate.
    pub fn new(phi: RationalExpr, psi: RationalExpr) -> Result<Self, TransformError> {
        for c in [&phi, &psi] {
            if c.depends_on(JetVar::P) || c.depends_on(JetVar::Q) {
                return Err(TransformError::NotPointFunction);
            }
        }
        let t = PointTransform { phi, psi };
        if t.jacobian().is_zero() {
            return Err(TransformError::DegenerateJacobian);
        }
        if t.dx_phi().is_zero() {
            return Err(TransformError::DegenerateDxPhi);
        }
        Ok(t)
    }

    pub fn identity() -> Self {
        PointTransform {
            phi: RationalExpr::var(JetVar::X),
            psi: RationalExpr::var(JetVar::U),
        }
    }

    pub fn phi(&self) -> &RationalExpr {
        &self.phi
    }

    pub fn psi(&self) -> &RationalExpr {
        &self.psi
    }

    /// phi_x psi_u - phi_u psi_x.
    pub fn jacobian(&self) -> RationalExpr {
        let px = self.phi.partial(JetVar::X);
        let pu = self.phi.partial(JetVar::U);
        let sx = self.psi.partial(JetVar::X);
        let su = self.psi.partial(JetVar::U);
        &(&px * &su) - &(&pu * &sx)
    }

    /// D_x phi = phi_x + p phi_u.
    pub fn dx_phi(&self) -> RationalExpr {
        let p = RationalExpr::var(JetVar::P);
        &self.phi.partial(JetVar::X) + &(&p * &self.phi.partial(JetVar::U))
    }

    /// True when the new independent variable depends on x alone.
    pub fn is_fibre_preserving(&self) -> bool {
        !self.phi.depends_on(JetVar::U)
    }

    /// Chain-rule prolongation through third order.
    pub fn prolong(&self) -> Prolongation {
        let dxphi = self.dx_phi();
        let dxpsi = {
            let p = RationalExpr::var(JetVar::P);
            &self.psi.partial(JetVar::X) + &(&p * &self.psi.partial(JetVar::U))
        };
        let ubar1 = &dxpsi / &dxphi;
        // ubar1 has no q, so the f-term of D_x contributes nothing here.
        let zero = RationalExpr::zero();
        let ubar2 = &total_derivative(&ubar1, &zero) / &dxphi;

        // Third derivative: carry the symbol t for u''' in a fifth slot.
        let n5 = 5;
        let t5 = RationalExpr::var_nvars(n5, 4);
        let ubar2_5 = ubar2.extend_to(n5);
        let dxphi_5 = dxphi.extend_to(n5);
        let p5 = RationalExpr::var_nvars(n5, 2);
        let q5 = RationalExpr::var_nvars(n5, 3);
        let mut d = ubar2_5.partial_idx(0);
        d = &d + &(&p5 * &ubar2_5.partial_idx(1));
        d = &d + &(&q5 * &ubar2_5.partial_idx(2));
        d = &d + &(&t5 * &ubar2_5.partial_idx(3));
        let ubar3 = &d / &dxphi_5;

        // Split as A + B*t.
        assert!(
            !ubar3.den().depends_on(4) && ubar3.num().degree_in(4) <= 1,
            "prolonged third derivative is affine in u'''"
        );
        let b5 = ubar3.partial_idx(4);
        let a5 = &ubar3 - &(&b5 * &t5);
        let a = a5.restrict_to(4).expect("A is free of the u''' symbol");
        let b = b5.restrict_to(4).expect("B is free of the u''' symbol");
        Prolongation { ubar1, ubar2, a, b }
    }

    /// True when the transformation maps every solution of u''' = f to a
    /// solution of ubar''' = 0.
    pub fn verify(&self, ode: &Ode3) -> bool {
        let pr = self.prolong();
        (&pr.a + &(&pr.b * ode.rhs())).is_zero()
    }

    /// The unique ODE mapped onto ubar''' = target by this transformation.
    /// Barred jet variables in `target` are substituted by the prolonged
    /// expressions; the map itself is never inverted.
    pub fn pullback(&self, target: &RationalExpr) -> Ode3 {
        let pr = self.prolong();
        let composed = if target.is_zero() {
            RationalExpr::zero()
        } else {
            target.subst(&[
                self.phi.clone(),
                self.psi.clone(),
                pr.ubar1.clone(),
                pr.ubar2.clone(),
            ])
        };
        let f = &(&composed - &pr.a) / &pr.b;
        debug_assert!((&(&pr.a + &(&pr.b * &f)) - &composed).is_zero());
        Ode3::new(f)
    }

    /// The auxiliary functions induced by the transformation: a1 = J/D_x phi,
    /// a3 = a1/D_x phi, a2 = D_x a1 / D_x phi with D_x taken along u''' = f.
    pub fn aux_triple(&self, f: &RationalExpr) -> AuxTriple {
        let dxphi = self.dx_phi();
        let a1 = &self.jacobian() / &dxphi;
        let a3 = &a1 / &dxphi;
        let a2 = &total_derivative(&a1, f) / &dxphi;
        AuxTriple { a1, a2, a3 }
    }

    /// Apply `self` after `inner` (composition of point maps).
    pub fn compose(&self, inner: &PointTransform) -> Result<PointTransform, TransformError> {
        let values = [
            inner.phi.clone(),
            inner.psi.clone(),
            RationalExpr::var(JetVar::P),
            RationalExpr::var(JetVar::Q),
        ];
        PointTransform::new(self.phi.subst(&values), self.psi.subst(&values))
    }
}

/// Residuals of the five-equation auxiliary system for a candidate triple:
///
/// ```text
/// D_x a3 + (1/3) f_q a3
/// D_x a2 - (1/2) a2^2/a3 + (1/18) a3 (2 f_q^2 + 9 f_p - 3 D_x f_q)
/// D_x a1 - (a2/a3) a1
/// (a1/a3)_pp
/// (a1^2/a3)_p
/// ```
///
/// All five vanish identically exactly when the triple solves the system.
pub fn aux_system_residuals(f: &RationalExpr, aux: &AuxTriple) -> [RationalExpr; 5] {
    let fq = f.partial(JetVar::Q);
    let fp = f.partial(JetVar::P);
    let dfq = total_derivative(&fq, f);
    let c = RationalExpr::from_int;
    let third = &RationalExpr::from_int(1) / &c(3);

    let r1 = &total_derivative(&aux.a3, f) + &(&(&third * &fq) * &aux.a3);

    let s2 = &(&(&c(2) * &(&fq * &fq)) + &(&c(9) * &fp)) - &(&c(3) * &dfq);
    let half = &RationalExpr::from_int(1) / &c(2);
    let r2 = {
        let quad = &(&half * &(&aux.a2 * &aux.a2)) / &aux.a3;
        let forcing = &(&(&RationalExpr::from_int(1) / &c(18)) * &aux.a3) * &s2;
        &(&total_derivative(&aux.a2, f) - &quad) + &forcing
    };

    let r3 = &total_derivative(&aux.a1, f) - &(&(&aux.a2 / &aux.a3) * &aux.a1);

    let ratio = &aux.a1 / &aux.a3;
    let r4 = ratio.partial(JetVar::P).partial(JetVar::P);
    let r5 = (&(&aux.a1 * &aux.a1) / &aux.a3).partial(JetVar::P);

    [r1, r2, r3, r4, r5]
}

/// The q-free remainder check from the structure of a2: for a valid triple,
/// a2 + (1/6) a3 f_qq q depends on (x, u, p) only.
pub fn a2_structure_is_q_free(f: &RationalExpr, aux: &AuxTriple) -> bool {
    let fqq = f.partial(JetVar::Q).partial(JetVar::Q);
    let sixth = &RationalExpr::from_int(1) / &RationalExpr::from_int(6);
    let q = RationalExpr::var(JetVar::Q);
    let rest = &aux.a2 + &(&(&(&sixth * &aux.a3) * &fqq) * &q);
    !rest.depends_on(JetVar::Q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Verdict;
    use crate::parser::parse;

    fn t(phi: &str, psi: &str) -> PointTransform {
        PointTransform::new(parse(phi).unwrap(), parse(psi).unwrap()).unwrap()
    }

    fn example_31_rhs() -> RationalExpr {
        parse("(6*p/u + 3/x)*q - 6*p^3/u^2 - 6*p^2/(x*u) - 6*p/x^2 - 6*u/x^3").unwrap()
    }

    #[test]
    fn identity_prolongation() {
        let pr = PointTransform::identity().prolong();
        assert_eq!(pr.ubar1, parse("p").unwrap());
        assert_eq!(pr.ubar2, parse("q").unwrap());
        assert!(pr.a.is_zero());
        assert!(pr.b.is_one());
    }

    #[test]
    fn degenerate_transformations_rejected() {
        assert_eq!(
            PointTransform::new(parse("x").unwrap(), parse("x").unwrap()),
            Err(TransformError::DegenerateJacobian)
        );
        assert_eq!(
            PointTransform::new(parse("u").unwrap(), parse("x").unwrap()).map(|_| ()),
            Ok(())
        );
        assert_eq!(
            PointTransform::new(parse("p").unwrap(), parse("u").unwrap()),
            Err(TransformError::NotPointFunction)
        );
        // phi depending on u alone makes D_x phi = p*phi_u, nonzero.
        assert!(PointTransform::new(parse("u").unwrap(), parse("x").unwrap()).is_ok());
    }

    #[test]
    fn example_31_transformation_linearizes() {
        let tr = t("x", "-1/(x*u)");
        let f = example_31_rhs();
        let pr = tr.prolong();
        assert_eq!(pr.b, parse("1/(x*u^2)").unwrap());
        assert!((&pr.a + &(&pr.b * &f)).is_zero());
        assert!(tr.verify(&Ode3::new(f)));
    }

    #[test]
    fn example_32_transformation_linearizes() {
        let tr = t("x+u", "-x");
        let f = parse("3*q^2/(1+p)").unwrap();
        assert!(tr.verify(&Ode3::new(f.clone())));
        // The identity does not kill a nonzero right-hand side.
        assert!(!PointTransform::identity().verify(&Ode3::new(f)));
    }

    #[test]
    fn pullbacks_reproduce_worked_examples() {
        let zero = RationalExpr::zero();
        assert!(PointTransform::identity().pullback(&zero).rhs().is_zero());

        let f31 = t("x", "-1/(x*u)").pullback(&zero);
        assert_eq!(*f31.rhs(), example_31_rhs());

        let f32 = t("x+u", "-x").pullback(&zero);
        assert_eq!(*f32.rhs(), parse("3*q^2/(1+p)").unwrap());
    }

    #[test]
    fn aux_triples_match_worked_examples() {
        let f31 = example_31_rhs();
        let aux = t("x", "-1/(x*u)").aux_triple(&f31);
        assert_eq!(aux.a1, parse("1/(x*u^2)").unwrap());
        assert_eq!(aux.a3, parse("1/(x*u^2)").unwrap());
        assert_eq!(aux.a2, parse("-2*p/(x*u^3) - 1/(x^2*u^2)").unwrap());

        let f32 = parse("3*q^2/(1+p)").unwrap();
        let aux = t("x+u", "-x").aux_triple(&f32);
        assert_eq!(aux.a1, parse("1/(1+p)").unwrap());
        assert_eq!(aux.a3, parse("1/(1+p)^2").unwrap());
        assert_eq!(aux.a2, parse("-q/(1+p)^3").unwrap());

        let aux = PointTransform::identity().aux_triple(&RationalExpr::zero());
        assert!(aux.a1.is_one());
        assert!(aux.a2.is_zero());
        assert!(aux.a3.is_one());
    }

    #[test]
    fn aux_system_holds_for_linearizing_transforms() {
        for (tr, f) in [
            (t("x", "-1/(x*u)"), example_31_rhs()),
            (t("x+u", "-x"), parse("3*q^2/(1+p)").unwrap()),
        ] {
            assert!(tr.verify(&Ode3::new(f.clone())));
            let aux = tr.aux_triple(&f);
            for (k, r) in aux_system_residuals(&f, &aux).iter().enumerate() {
                assert!(r.is_zero(), "equation {} residual: {}", k + 1, r);
            }
            assert!(a2_structure_is_q_free(&f, &aux));
        }
    }

    #[test]
    fn round_trip_classification() {
        let tr = t("x+u", "-x+2*u");
        let pulled = tr.pullback(&RationalExpr::zero());
        assert!(tr.verify(&pulled));
        assert_eq!(pulled.classify(), Verdict::MaximallySymmetric);
    }

    #[test]
    fn composition_substitutes() {
        let inner = t("x+u", "-x");
        let outer = t("x", "2*u");
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c.phi(), &parse("x+u").unwrap());
        assert_eq!(c.psi(), &parse("-2*x").unwrap());
    }
}
