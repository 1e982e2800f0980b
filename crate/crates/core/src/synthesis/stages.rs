//! The five synthesis stages and the pipeline that chains them.

use super::f1system::{solve_f1_system, F1Options, PdeEq};
use super::linsys;
use super::loginteg::{
    exp_integrate, laurent_antiderivative, rational_integrate, solve_multiplicative,
};
use super::{
    PartialAux, Stage, StageError, SynthesisOptions, SynthesisResult, SynthesisTrace,
};
use crate::expr::{JetVar, RationalExpr};
use crate::jet::{total_derivative, Ode3};
use crate::mpoly::MPoly;
use crate::transform::{AuxTriple, PointTransform};
use num_rational::BigRational;
use num_traits::Zero;

const X: usize = 0;
const U: usize = 1;
const P: usize = 2;
const Q: usize = 3;

fn half() -> RationalExpr {
    &RationalExpr::from_int(1) / &RationalExpr::from_int(2)
}

fn frac(n: i64, d: i64) -> RationalExpr {
    &RationalExpr::from_int(n) / &RationalExpr::from_int(d)
}

/// Coefficients of f as a quadratic in q; requires the vanishing of I1.
fn q_quadratic_parts(
    f: &RationalExpr,
) -> Result<(RationalExpr, RationalExpr, RationalExpr), StageError> {
    let fq = f.partial(JetVar::Q);
    if !fq.partial(JetVar::Q).partial(JetVar::Q).is_zero() {
        return Err(StageError::AnsatzExhausted(
            "right-hand side is not quadratic in u'' (I1 != 0)".into(),
        ));
    }
    let zero_q = RationalExpr::zero();
    let gamma = f.subst_var(JetVar::Q, &zero_q);
    let beta = fq.subst_var(JetVar::Q, &zero_q);
    let alpha = &fq.partial(JetVar::Q) * &half();
    Ok((alpha, beta, gamma))
}

/// Slice an expression with q-free denominator by powers of q.
fn q_slices(e: &RationalExpr, up_to: u32) -> Result<Vec<RationalExpr>, StageError> {
    if e.den().depends_on(Q) {
        return Err(StageError::AnsatzExhausted(format!(
            "expression has a q-dependent denominator: {}",
            e
        )));
    }
    let den = RationalExpr::from_poly_nvars(e.den().clone());
    let dmax = e.num().degree_in(Q).max(up_to);
    Ok((0..=dmax)
        .map(|k| &RationalExpr::from_poly_nvars(e.num().coeff_of_power(Q, k)) / &den)
        .collect())
}

/// Residual of the a3 equation D_x a3 = -(1/3) f_q a3.
pub(crate) fn a3_residual(f: &RationalExpr, a3: &RationalExpr) -> RationalExpr {
    let fq = f.partial(JetVar::Q);
    &total_derivative(a3, f) + &(&(&frac(1, 3) * &fq) * a3)
}

/// Residual of the a2 equation
/// D_x a2 = (1/2) a2^2/a3 - (1/18) a3 (2 f_q^2 + 9 f_p - 3 D_x f_q).
pub(crate) fn a2_residual(f: &RationalExpr, a3: &RationalExpr, a2: &RationalExpr) -> RationalExpr {
    let fq = f.partial(JetVar::Q);
    let fp = f.partial(JetVar::P);
    let dfq = total_derivative(&fq, f);
    let s2 = &(&(&RationalExpr::from_int(2) * &(&fq * &fq)) + &(&RationalExpr::from_int(9) * &fp))
        - &(&RationalExpr::from_int(3) * &dfq);
    let rhs = &(&(&half() * &(a2 * a2)) / a3) - &(&(&frac(1, 18) * a3) * &s2);
    &total_derivative(a2, f) - &rhs
}

/// Residual of the a1 equation D_x a1 = (a2/a3) a1.
pub(crate) fn a1_residual(
    f: &RationalExpr,
    a2: &RationalExpr,
    a3: &RationalExpr,
    a1: &RationalExpr,
) -> RationalExpr {
    &total_derivative(a1, f) - &(&(a2 / a3) * a1)
}

/// Solve D_x a3 = -(1/3) f_q a3 for a nonzero a3(x, u, p), normalized to
/// numerator leading coefficient one.
pub fn solve_a3(ode: &Ode3) -> Result<RationalExpr, StageError> {
    let (alpha, beta, _) = q_quadratic_parts(ode.rhs())?;
    // log a3: L_p = -(2/3) alpha; L_x + p L_u = -(1/3) beta.
    let r_p = &frac(-2, 3) * &alpha;
    let r_rest = &frac(-1, 3) * &beta;
    let a3 = solve_multiplicative(&r_p, &r_rest).map_err(StageError::AnsatzExhausted)?;
    debug_assert!(a3_residual(ode.rhs(), &a3).is_zero());
    Ok(a3)
}

struct A2Outcome {
    a2: RationalExpr,
    notes: Vec<String>,
}

fn solve_a2_inner(
    ode: &Ode3,
    a3: &RationalExpr,
    riccati_degree: u32,
    riccati_hint: Option<&RationalExpr>,
) -> Result<A2Outcome, StageError> {
    let f = ode.rhs();
    let (alpha, beta, gamma) = q_quadratic_parts(f)?;
    let fqq = f.partial(JetVar::Q).partial(JetVar::Q);
    let w = &(&frac(-1, 6) * a3) * &fqq;

    let s = Ode3::new(f.clone()).s_quantities();
    let s2s = q_slices(&s.s2, 2)?;
    let (s20, s21, s22) = (&s2s[0], &s2s[1], &s2s[2]);

    // q^2 component must hold identically for the chosen a3.
    let wp = w.partial_idx(P);
    let q2 = &(&(&wp + &(&alpha * &w)) - &(&(&half() * &(&w * &w)) / a3))
        + &(&(&frac(1, 18) * a3) * s22);
    if !q2.is_zero() {
        return Err(StageError::AnsatzExhausted(format!(
            "q^2 component of the a2 equation does not vanish: {}",
            q2
        )));
    }

    // q^1 component: A_p = h A + k, linear first-order in p.
    let h = &w / a3;
    let k = {
        let mut k = &(&frac(-1, 18) * a3) * s21;
        k = &k - &w.partial_idx(X);
        k = &k - &(&RationalExpr::var(JetVar::P) * &w.partial_idx(U));
        &k - &(&beta * &w)
    };
    let hsol = exp_integrate(&h, P).ok_or_else(|| {
        StageError::AnsatzExhausted(format!(
            "homogeneous p-factor of the a2 equation is not rational (log-derivative {})",
            h
        ))
    })?;
    let kpart = if k.is_zero() {
        RationalExpr::zero()
    } else {
        rational_integrate(&(&k / &hsol), P).ok_or_else(|| {
            StageError::NonrationalAntiderivative(format!(
                "particular p-part of the a2 equation: integral of {}",
                &k / &hsol
            ))
        })?
    };
    let m = &hsol * &kpart;

    // q^0 component with A = H (F1 + K): a system for F1(x, u) collected by
    // powers of p.
    let p_var = RationalExpr::var(JetVar::P);
    let coef_f1x = hsol.clone();
    let coef_f1u = &p_var * &hsol;
    let coef_f1sq = -&(&(&half() * &(&hsol * &hsol)) / a3);
    let coef_f1 = &(&hsol.partial_idx(X) + &(&p_var * &hsol.partial_idx(U)))
        - &(&(&hsol * &m) / a3);
    let coef_one = {
        let mut c = &m.partial_idx(X) + &(&p_var * &m.partial_idx(U));
        c = &c - &(&(&half() * &(&m * &m)) / a3);
        c = &c + &(&(&frac(1, 18) * a3) * s20);
        &c + &(&gamma * &w)
    };

    let pdes = collect_pdes(&[coef_f1x, coef_f1u, coef_f1sq, coef_f1, coef_one])?;
    let mut notes = Vec::new();
    let mut f1opts = F1Options {
        riccati_degree,
        riccati_hint,
        notes: &mut notes,
    };
    let f1 = solve_f1_system(&pdes, &mut f1opts)?;

    let a_part = &hsol * &(&f1 + &kpart);
    let a2 = &(&w * &RationalExpr::var(JetVar::Q)) + &a_part;
    let residual = a2_residual(f, a3, &a2);
    if !residual.is_zero() {
        return Err(StageError::AnsatzExhausted(format!(
            "assembled a2 leaves residual {}",
            residual
        )));
    }
    Ok(A2Outcome { a2, notes })
}

/// Solve the a2 equation given a3, following the structural form
/// a2 = -(1/6) a3 f_qq q + A(x, u, p).
pub fn solve_a2(ode: &Ode3, a3: &RationalExpr) -> Result<RationalExpr, StageError> {
    solve_a2_inner(ode, a3, SynthesisOptions::default().riccati_degree, None).map(|o| o.a2)
}

/// Collect the symbolic equation sum_j coef_j * symbol_j = 0 (symbols
/// F1_x, F1_u, F1^2, F1, 1; coefficients in (x, u, p)) into per-p-power
/// equations over (x, u).
fn collect_pdes(coefs: &[RationalExpr; 5]) -> Result<Vec<PdeEq>, StageError> {
    for c in coefs {
        if c.depends_on(JetVar::Q) {
            return Err(StageError::AnsatzExhausted(format!(
                "q-dependence survived the q-collection: {}",
                c
            )));
        }
    }
    let mut den = MPoly::one(4);
    for c in coefs {
        den = crate::mpoly::lcm(&den, c.den());
    }
    let cleared: Vec<MPoly> = coefs
        .iter()
        .map(|c| c.num().mul(&den.exact_div(c.den()).expect("lcm divisible")))
        .collect();
    let dmax = cleared.iter().map(|p| p.degree_in(P)).max().unwrap_or(0);
    let mut out = Vec::new();
    for kp in 0..=dmax {
        let parts: Vec<RationalExpr> = cleared
            .iter()
            .map(|p| RationalExpr::from_poly_nvars(p.coeff_of_power(P, kp)))
            .collect();
        let eq = PdeEq {
            dx: parts[0].clone(),
            du: parts[1].clone(),
            c2: parts[2].clone(),
            c1: parts[3].clone(),
            c0: parts[4].clone(),
        };
        out.push(eq);
    }
    Ok(out)
}

/// Solve D_x a1 = (a2/a3) a1 for a nonzero a1(x, u, p) and check the two
/// compatibility identities.
pub fn solve_a1(
    ode: &Ode3,
    a2: &RationalExpr,
    a3: &RationalExpr,
) -> Result<RationalExpr, StageError> {
    let f = ode.rhs();
    // Split a2 = W q + A; the q-slope must be q-free.
    let w = a2.partial(JetVar::Q);
    if w.depends_on(JetVar::Q) {
        return Err(StageError::AnsatzExhausted(
            "a2 is not affine in q".into(),
        ));
    }
    let a_part = a2 - &(&w * &RationalExpr::var(JetVar::Q));
    let r_p = &w / a3;
    let r_rest = &a_part / a3;
    let a1 = solve_multiplicative(&r_p, &r_rest).map_err(StageError::AnsatzExhausted)?;

    let ratio = &a1 / a3;
    let compat1 = ratio.partial(JetVar::P).partial(JetVar::P);
    if !compat1.is_zero() {
        return Err(StageError::CompatibilityViolated(format!(
            "(a1/a3)_pp = {}",
            compat1
        )));
    }
    let compat2 = (&(&a1 * &a1) / a3).partial(JetVar::P);
    if !compat2.is_zero() {
        return Err(StageError::CompatibilityViolated(format!(
            "(a1^2/a3)_p = {}",
            compat2
        )));
    }
    debug_assert!(a1_residual(f, a2, a3, &a1).is_zero());
    Ok(a1)
}

/// Integrate D_x phi = a1/a3 into phi(x, u).
pub fn solve_phi(a1: &RationalExpr, a3: &RationalExpr) -> Result<RationalExpr, StageError> {
    let r = a1 / a3;
    let rpp = r.partial(JetVar::P).partial(JetVar::P);
    if !rpp.is_zero() {
        return Err(StageError::CompatibilityViolated(format!(
            "(a1/a3)_pp = {} is nonzero",
            rpp
        )));
    }
    let r1 = r.partial(JetVar::P);
    let r0 = &r - &(&RationalExpr::var(JetVar::P) * &r1);
    if r0.partial_idx(U) != r1.partial_idx(X) {
        return Err(StageError::NotExact(format!(
            "phi_x = {} and phi_u = {} have mismatched cross-derivatives",
            r0, r1
        )));
    }
    let phi_a = laurent_antiderivative(&r0, X).ok_or_else(|| {
        StageError::NonrationalAntiderivative(format!("integral of {} in x", r0))
    })?;
    let rem = &r1 - &phi_a.partial_idx(U);
    debug_assert!(!rem.depends_on_idx(X));
    let phi_b = laurent_antiderivative(&rem, U).ok_or_else(|| {
        StageError::NonrationalAntiderivative(format!("integral of {} in u", rem))
    })?;
    let phi = &phi_a + &phi_b;
    debug_assert!({
        let dxphi = &phi.partial_idx(X) + &(&RationalExpr::var(JetVar::P) * &phi.partial_idx(U));
        (&dxphi - &r).is_zero()
    });
    Ok(phi)
}

/// Jacobian-equation residual phi_x psi_u - phi_u psi_x - a1^2/a3.
fn jacobian_residual(
    phi: &RationalExpr,
    psi: &RationalExpr,
    a1: &RationalExpr,
    a3: &RationalExpr,
) -> RationalExpr {
    let j = &(&phi.partial_idx(X) * &psi.partial_idx(U))
        - &(&phi.partial_idx(U) * &psi.partial_idx(X));
    &j - &(&(a1 * a1) / a3)
}

struct PsiOutcome {
    psi: RationalExpr,
    base_psi: RationalExpr,
    correction: Option<RationalExpr>,
    ansatz: String,
}

fn solve_psi_inner(
    ode: &Ode3,
    phi: &RationalExpr,
    a1: &RationalExpr,
    a3: &RationalExpr,
    max_degree: u32,
) -> Result<PsiOutcome, StageError> {
    let s = &(a1 * a1) / a3;
    if s.depends_on(JetVar::P) || s.depends_on(JetVar::Q) {
        return Err(StageError::CompatibilityViolated(format!(
            "a1^2/a3 = {} is not a function of (x, u)",
            s
        )));
    }
    let phi_u = phi.partial_idx(U);
    let phi_x = phi.partial_idx(X);

    let mut ansatz;
    let base = if phi_u.is_zero() {
        // Fibre-preserving: psi_u = S / phi_x, integrate in u.
        ansatz = "term-by-term integration of psi_u in u".to_string();
        let integrand = &s / &phi_x;
        match laurent_antiderivative(&integrand, U) {
            Some(psi0) => psi0,
            None => {
                ansatz = format!(
                    "undetermined coefficients over (x,u)-monomials of total degree <= {}",
                    max_degree
                );
                undetermined_psi(phi, &s, max_degree)?
            }
        }
    } else {
        ansatz = format!(
            "undetermined coefficients over (x,u)-monomials of total degree <= {}",
            max_degree
        );
        undetermined_psi(phi, &s, max_degree)?
    };
    debug_assert!(jacobian_residual(phi, &base, a1, a3).is_zero());

    let (psi, correction) = complete_psi(ode, phi, &base, max_degree)?;
    Ok(PsiOutcome {
        psi,
        base_psi: base,
        correction,
        ansatz,
    })
}

/// Particular solution of phi_x psi_u - phi_u psi_x = S over a monomial
/// basis in (x, u).
fn undetermined_psi(
    phi: &RationalExpr,
    s: &RationalExpr,
    max_degree: u32,
) -> Result<RationalExpr, StageError> {
    let phi_x = phi.partial_idx(X);
    let phi_u = phi.partial_idx(U);
    for negative in [false, true] {
        let basis = monomial_basis(max_degree, negative);
        let columns: Vec<RationalExpr> = basis
            .iter()
            .map(|m| &(&phi_x * &m.partial_idx(U)) - &(&phi_u * &m.partial_idx(X)))
            .collect();
        if let Some(coeffs) = match_linear_combination(&columns, s) {
            let mut psi = RationalExpr::zero();
            for (c, m) in coeffs.iter().zip(&basis) {
                if !c.is_zero() {
                    psi = &psi
                        + &(&RationalExpr::from_poly_nvars(MPoly::constant(4, c.clone())) * m);
                }
            }
            return Ok(psi);
        }
    }
    Err(StageError::CompletionFailed)
}

/// Monomials x^i u^j ordered by total degree, x-powers first; optionally a
/// Laurent variant with negative exponents.
fn monomial_basis(max_degree: u32, negative: bool) -> Vec<RationalExpr> {
    let d = max_degree as i64;
    let range: Vec<i64> = if negative {
        (-d..=d).collect()
    } else {
        (0..=d).collect()
    };
    let mut with_keys: Vec<((i64, i64, i64), RationalExpr)> = Vec::new();
    let x = RationalExpr::var(JetVar::X);
    let u = RationalExpr::var(JetVar::U);
    for &i in &range {
        for &j in &range {
            if i == 0 && j == 0 {
                continue;
            }
            if i.abs() + j.abs() > d {
                continue;
            }
            let m = &x.powi(i).expect("x power") * &u.powi(j).expect("u power");
            with_keys.push(((i.abs() + j.abs(), -i, -j), m));
        }
    }
    with_keys.sort_by(|a, b| a.0.cmp(&b.0));
    with_keys.into_iter().map(|(_, m)| m).collect()
}

/// Find rational constants c_j with sum_j c_j columns_j = rhs, matching
/// monomial coefficients after clearing denominators.
fn match_linear_combination(
    columns: &[RationalExpr],
    rhs: &RationalExpr,
) -> Option<Vec<BigRational>> {
    let mut den = rhs.den().clone();
    for c in columns {
        den = crate::mpoly::lcm(&den, c.den());
    }
    let cleared: Vec<MPoly> = columns
        .iter()
        .map(|c| c.num().mul(&den.exact_div(c.den()).expect("lcm divisible")))
        .collect();
    let rhs_cleared = rhs
        .num()
        .mul(&den.exact_div(rhs.den()).expect("lcm divisible"));
    // Union of monomial supports.
    let mut monos: Vec<crate::mpoly::Mono> = Vec::new();
    for p in cleared.iter().chain(std::iter::once(&rhs_cleared)) {
        for (m, _) in p.terms() {
            if !monos.contains(m) {
                monos.push(m.clone());
            }
        }
    }
    monos.sort();
    let zero = BigRational::zero();
    let matrix: Vec<Vec<BigRational>> = monos
        .iter()
        .map(|m| {
            cleared
                .iter()
                .map(|p| {
                    p.terms()
                        .find(|(pm, _)| *pm == m)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(|| zero.clone())
                })
                .collect()
        })
        .collect();
    let rhs_vec: Vec<BigRational> = monos
        .iter()
        .map(|m| {
            rhs_cleared
                .terms()
                .find(|(pm, _)| *pm == m)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| zero.clone())
        })
        .collect();
    linsys::solve(&matrix, &rhs_vec, &zero)
}

/// Verification-guided completion: if (phi, psi) leaves the residual
/// R = A + B f nonzero, add G(phi) to psi where the univariate G satisfies
/// G'''(phi) = -R. The correction never changes phi and keeps the Jacobian
/// equation intact.
fn complete_psi(
    ode: &Ode3,
    phi: &RationalExpr,
    psi0: &RationalExpr,
    max_degree: u32,
) -> Result<(RationalExpr, Option<RationalExpr>), StageError> {
    let t = PointTransform::new(phi.clone(), psi0.clone())
        .map_err(|e| StageError::AnsatzExhausted(format!("degenerate candidate: {e}")))?;
    let pr = t.prolong();
    let residual = &pr.a + &(&pr.b * ode.rhs());
    if residual.is_zero() {
        return Ok((psi0.clone(), None));
    }
    // G''' = sum_k d_k z^k; match R + sum_k d_k phi^k = 0.
    let columns: Vec<RationalExpr> = (0..=max_degree)
        .map(|k| phi.powi(k as i64).expect("phi power"))
        .collect();
    let target = -&residual;
    let coeffs = match_linear_combination(&columns, &target)
        .ok_or(StageError::CompletionFailed)?;
    // Integrate three times: d_k z^k -> d_k z^(k+3)/((k+1)(k+2)(k+3)).
    let mut correction = RationalExpr::zero();
    for (k, d) in coeffs.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        let k = k as i64;
        let denom = BigRational::from_integer((((k + 1) * (k + 2) * (k + 3)) as i64).into());
        let c = RationalExpr::from_rational(d / denom);
        correction = &correction + &(&c * &phi.powi(k + 3).expect("phi power"));
    }
    let psi = psi0 + &correction;
    let t = PointTransform::new(phi.clone(), psi.clone())
        .map_err(|e| StageError::AnsatzExhausted(format!("degenerate completion: {e}")))?;
    if !t.verify(ode) {
        return Err(StageError::CompletionFailed);
    }
    Ok((psi, Some(correction)))
}

/// Solve the psi equation and complete against the full verification.
pub fn solve_psi(
    ode: &Ode3,
    phi: &RationalExpr,
    a1: &RationalExpr,
    a3: &RationalExpr,
) -> Result<RationalExpr, StageError> {
    solve_psi_inner(ode, phi, a1, a3, SynthesisOptions::default().max_degree).map(|o| o.psi)
}

fn validate_hint(
    stage: Stage,
    residual: RationalExpr,
    trace: &mut SynthesisTrace,
    equation: String,
) -> Result<(), StageError> {
    if residual.is_zero() {
        trace.push(stage, equation, "user hint".into(), "hint accepted".into());
        Ok(())
    } else {
        let err = StageError::HintRejected {
            stage,
            residual: residual.to_string(),
        };
        trace.push_failure(stage, equation, "user hint".into(), &err);
        Err(err)
    }
}

pub(crate) fn run_pipeline(ode: &Ode3, options: &SynthesisOptions) -> SynthesisResult {
    let mut trace = SynthesisTrace::default();
    let mut partial = PartialAux::default();
    let f = ode.rhs();
    let fq = f.partial(JetVar::Q);

    let fail = |blocking: Stage,
                error: StageError,
                partial: PartialAux,
                mut trace: SynthesisTrace,
                equation: String,
                ansatz: String| {
        if !matches!(error, StageError::HintRejected { .. }) {
            trace.push_failure(blocking, equation, ansatz, &error);
        }
        SynthesisResult::Partial {
            aux: partial,
            trace,
            blocking,
            error,
        }
    };

    // Stage A3.
    let eq_a3 = format!("D_x(a3) = -(1/3)*({})*a3", fq);
    let a3 = match &options.hints.a3 {
        Some(hint) => {
            let mut residual = a3_residual(f, hint);
            if hint.is_zero() || hint.depends_on(JetVar::Q) {
                residual = RationalExpr::one(); // force rejection
            }
            match validate_hint(Stage::A3, residual, &mut trace, eq_a3.clone()) {
                Ok(()) => hint.clone(),
                Err(e) => return fail(Stage::A3, e, partial, trace, eq_a3, "user hint".into()),
            }
        }
        None => match solve_a3(ode) {
            Ok(a3) => {
                trace.push(
                    Stage::A3,
                    eq_a3.clone(),
                    "separable product of integer powers".into(),
                    format!("a3 = {}", a3),
                );
                a3
            }
            Err(e) => {
                return fail(
                    Stage::A3,
                    e,
                    partial,
                    trace,
                    eq_a3,
                    "separable product of integer powers".into(),
                )
            }
        },
    };
    partial.a3 = Some(a3.clone());

    // Stage A2.
    let eq_a2 = format!(
        "D_x(a2) = (1/2)*a2^2/({}) - (1/18)*({})*(2*f_q^2 + 9*f_p - 3*D_x(f_q))",
        a3, a3
    );
    let a2 = match &options.hints.a2 {
        Some(hint) => {
            let residual = a2_residual(f, &a3, hint);
            match validate_hint(Stage::A2, residual, &mut trace, eq_a2.clone()) {
                Ok(()) => hint.clone(),
                Err(e) => return fail(Stage::A2, e, partial, trace, eq_a2, "user hint".into()),
            }
        }
        None => {
            match solve_a2_inner(
                ode,
                &a3,
                options.riccati_degree,
                options.hints.f2.as_ref(),
            ) {
                Ok(out) => {
                    let mut ansatz = "a2 = -(1/6)*a3*f_qq*q + A(x,u,p)".to_string();
                    for n in &out.notes {
                        ansatz.push_str("; ");
                        ansatz.push_str(n);
                    }
                    trace.push(Stage::A2, eq_a2.clone(), ansatz, format!("a2 = {}", out.a2));
                    out.a2
                }
                Err(e) => {
                    return fail(
                        Stage::A2,
                        e,
                        partial,
                        trace,
                        eq_a2,
                        "a2 = -(1/6)*a3*f_qq*q + A(x,u,p)".into(),
                    )
                }
            }
        }
    };
    partial.a2 = Some(a2.clone());

    // Stage A1.
    let eq_a1 = format!("D_x(a1) = (({})/({}))*a1", a2, a3);
    let a1 = match solve_a1(ode, &a2, &a3) {
        Ok(a1) => {
            trace.push(
                Stage::A1,
                eq_a1.clone(),
                "separable product of integer powers; compatibility enforced".into(),
                format!("a1 = {}", a1),
            );
            a1
        }
        Err(e) => {
            return fail(
                Stage::A1,
                e,
                partial,
                trace,
                eq_a1,
                "separable product of integer powers".into(),
            )
        }
    };
    partial.a1 = Some(a1.clone());

    // Stage PHI.
    let ratio = &a1 / &a3;
    let eq_phi = format!("D_x(phi) = {}", ratio);
    let phi = match &options.hints.phi {
        Some(hint) => {
            let dxphi = &hint.partial_idx(X) + &(&RationalExpr::var(JetVar::P) * &hint.partial_idx(U));
            let residual = &dxphi - &ratio;
            match validate_hint(Stage::Phi, residual, &mut trace, eq_phi.clone()) {
                Ok(()) => hint.clone(),
                Err(e) => return fail(Stage::Phi, e, partial, trace, eq_phi, "user hint".into()),
            }
        }
        None => match solve_phi(&a1, &a3) {
            Ok(phi) => {
                trace.push(
                    Stage::Phi,
                    eq_phi.clone(),
                    "term-by-term antidifferentiation of the affine p-split".into(),
                    format!("phi = {}", phi),
                );
                phi
            }
            Err(e) => {
                return fail(
                    Stage::Phi,
                    e,
                    partial,
                    trace,
                    eq_phi,
                    "term-by-term antidifferentiation".into(),
                )
            }
        },
    };
    partial.phi = Some(phi.clone());

    // Stage PSI (+ completion).
    let s_expr = &(&a1 * &a1) / &a3;
    let eq_psi = format!("phi_x*psi_u - phi_u*psi_x = {}", s_expr);
    let outcome = match &options.hints.psi {
        Some(hint) => {
            let residual = jacobian_residual(&phi, hint, &a1, &a3);
            match validate_hint(Stage::Psi, residual, &mut trace, eq_psi.clone()) {
                Ok(()) => match complete_psi(ode, &phi, hint, options.max_degree) {
                    Ok((psi, correction)) => PsiOutcome {
                        psi,
                        base_psi: hint.clone(),
                        correction,
                        ansatz: "user hint".into(),
                    },
                    Err(e) => return fail(Stage::Psi, e, partial, trace, eq_psi, "user hint".into()),
                },
                Err(e) => return fail(Stage::Psi, e, partial, trace, eq_psi, "user hint".into()),
            }
        }
        None => match solve_psi_inner(ode, &phi, &a1, &a3, options.max_degree) {
            Ok(out) => out,
            Err(e) => {
                return fail(
                    Stage::Psi,
                    e,
                    partial,
                    trace,
                    eq_psi,
                    "integration / undetermined coefficients".into(),
                )
            }
        },
    };
    if options.hints.psi.is_none() {
        trace.push(
            Stage::Psi,
            eq_psi.clone(),
            outcome.ansatz.clone(),
            format!("psi = {}", outcome.base_psi),
        );
    }
    if let Some(correction) = &outcome.correction {
        trace.push(
            Stage::Completion,
            "A + B*f + G'''(phi) = 0".into(),
            format!(
                "polynomial G''' of degree <= {} in phi",
                options.max_degree
            ),
            format!("psi corrected by {}", correction),
        );
    }
    partial.psi = Some(outcome.psi.clone());

    // Final verification.
    let transform = match PointTransform::new(phi.clone(), outcome.psi.clone()) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                Stage::Verified,
                StageError::AnsatzExhausted(format!("degenerate final transformation: {e}")),
                partial,
                trace,
                "A + B*f = 0".into(),
                "exact verification".into(),
            )
        }
    };
    if !transform.verify(ode) {
        return fail(
            Stage::Verified,
            StageError::CompletionFailed,
            partial,
            trace,
            "A + B*f = 0".into(),
            "exact verification".into(),
        );
    }
    trace.push(
        Stage::Verified,
        "A + B*f = 0".into(),
        "exact verification".into(),
        format!("xbar = {}, ubar = {}", transform.phi(), transform.psi()),
    );
    SynthesisResult::Success {
        transform,
        aux: AuxTriple {
            a1,
            a2,
            a3,
        },
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn e(s: &str) -> RationalExpr {
        parse(s).unwrap()
    }

    fn ode(s: &str) -> Ode3 {
        Ode3::new(e(s))
    }

    fn example_31() -> Ode3 {
        ode("(6*p/u + 3/x)*q - 6*p^3/u^2 - 6*p^2/(x*u) - 6*p/x^2 - 6*u/x^3")
    }

    #[test]
    fn a3_stage_fixtures() {
        assert_eq!(solve_a3(&example_31()).unwrap(), e("1/(x*u^2)"));
        assert_eq!(solve_a3(&ode("3*q^2/(1+p)")).unwrap(), e("1/(1+p)^2"));
        assert!(solve_a3(&ode("x")).unwrap().is_one());
    }

    #[test]
    fn a2_stage_fixtures() {
        let o = example_31();
        let a3 = solve_a3(&o).unwrap();
        let a2 = solve_a2(&o, &a3).unwrap();
        assert_eq!(a2, e("-2*p/(x*u^3) - 1/(x^2*u^2)"));

        let o = ode("3*q^2/(1+p)");
        let a3 = solve_a3(&o).unwrap();
        let a2 = solve_a2(&o, &a3).unwrap();
        assert_eq!(a2, e("-q/(1+p)^3"));

        let o = ode("x");
        let a2 = solve_a2(&o, &RationalExpr::one()).unwrap();
        assert!(a2.is_zero());
    }

    #[test]
    fn a1_stage_fixtures() {
        let o = example_31();
        let a3 = solve_a3(&o).unwrap();
        let a2 = solve_a2(&o, &a3).unwrap();
        assert_eq!(solve_a1(&o, &a2, &a3).unwrap(), e("1/(x*u^2)"));

        let o = ode("3*q^2/(1+p)");
        let a3 = solve_a3(&o).unwrap();
        let a2 = solve_a2(&o, &a3).unwrap();
        assert_eq!(solve_a1(&o, &a2, &a3).unwrap(), e("1/(1+p)"));

        let o = ode("x");
        let one = RationalExpr::one();
        let zero = RationalExpr::zero();
        assert!(solve_a1(&o, &zero, &one).unwrap().is_one());
    }

    #[test]
    fn phi_stage_fixtures() {
        assert_eq!(
            solve_phi(&e("1/(x*u^2)"), &e("1/(x*u^2)")).unwrap(),
            e("x")
        );
        assert_eq!(
            solve_phi(&e("1/(1+p)"), &e("1/(1+p)^2")).unwrap(),
            e("x+u")
        );
        assert_eq!(solve_phi(&e("p"), &RationalExpr::one()).unwrap(), e("u"));
    }

    #[test]
    fn psi_stage_fixtures() {
        let o = example_31();
        let psi = solve_psi(&o, &e("x"), &e("1/(x*u^2)"), &e("1/(x*u^2)")).unwrap();
        assert_eq!(psi, e("-1/(x*u)"));

        let o = ode("x");
        let one = RationalExpr::one();
        let psi = solve_psi(&o, &e("x"), &one, &one).unwrap();
        assert_eq!(psi, e("u - 1/24*x^4"));
    }
}
