//! Reduction engine for the two-variable first-order systems produced by
//! the a2 stage.
//!
//! The unknown F(x, u) satisfies a small system of equations of the form
//! `dx F_x + du F_u + c2 F^2 + c1 F + c0 = 0`. The engine peels variables:
//! algebraic equations are solved directly, single-derivative linear
//! equations integrate to F = H (G + K) with a new unknown of one variable,
//! and pairs whose lower-order parts are proportional combine into a pure
//! transport equation that forces a travelling variable G(sigma x + tau u).
//! Every reduction ends in a univariate system whose Riccati representative
//! is handed to the bounded rational-solution search; candidates are checked
//! against the full system before being accepted.

use super::loginteg::{exp_integrate, rational_integrate};
use super::riccati::RiccatiEq;
use super::StageError;
use crate::expr::RationalExpr;
use crate::mpoly::{lcm, MPoly};

const X: usize = 0;
const U: usize = 1;

/// dx F_x + du F_u + c2 F^2 + c1 F + c0 = 0, coefficients in (x, u).
#[derive(Clone, Debug)]
pub(crate) struct PdeEq {
    pub dx: RationalExpr,
    pub du: RationalExpr,
    pub c2: RationalExpr,
    pub c1: RationalExpr,
    pub c0: RationalExpr,
}

impl PdeEq {
    fn is_zero(&self) -> bool {
        self.dx.is_zero()
            && self.du.is_zero()
            && self.c2.is_zero()
            && self.c1.is_zero()
            && self.c0.is_zero()
    }

    fn residual(&self, f: &RationalExpr) -> RationalExpr {
        let mut r = &self.dx * &f.partial_idx(X);
        r = &r + &(&self.du * &f.partial_idx(U));
        r = &r + &(&self.c2 * &(f * f));
        r = &r + &(&self.c1 * f);
        &r + &self.c0
    }
}

/// e1 G' + c2 G^2 + c1 G + c0 = 0 in a single variable stored in slot X.
#[derive(Clone, Debug)]
struct OdeEq {
    e1: RationalExpr,
    c2: RationalExpr,
    c1: RationalExpr,
    c0: RationalExpr,
}

impl OdeEq {
    fn is_zero(&self) -> bool {
        self.e1.is_zero() && self.c2.is_zero() && self.c1.is_zero() && self.c0.is_zero()
    }

    fn residual(&self, g: &RationalExpr) -> RationalExpr {
        let mut r = &self.e1 * &g.partial_idx(X);
        r = &r + &(&self.c2 * &(g * g));
        r = &r + &(&self.c1 * g);
        &r + &self.c0
    }
}

pub(crate) struct F1Options<'a> {
    pub riccati_degree: u32,
    pub riccati_hint: Option<&'a RationalExpr>,
    /// Human-readable notes appended while solving (for the trace).
    pub notes: &'a mut Vec<String>,
}

/// Solve the system for F(x, u). Residuals of every input equation vanish
/// for the returned solution.
pub(crate) fn solve_f1_system(
    eqs: &[PdeEq],
    opts: &mut F1Options,
) -> Result<RationalExpr, StageError> {
    let mut live: Vec<PdeEq> = eqs.iter().filter(|e| !e.is_zero()).cloned().collect();
    // Drop duplicate equations (proportional with constant factor are caught
    // later; exact duplicates are cheap to remove).
    live.dedup_by(|a, b| {
        a.dx == b.dx && a.du == b.du && a.c2 == b.c2 && a.c1 == b.c1 && a.c0 == b.c0
    });

    let verify_all = |f: &RationalExpr, eqs: &[PdeEq]| eqs.iter().all(|e| e.residual(f).is_zero());

    if live.is_empty() {
        return Ok(RationalExpr::zero());
    }

    // Algebraic equation: no derivatives.
    if let Some(eq) = live.iter().find(|e| e.dx.is_zero() && e.du.is_zero()) {
        let candidates = solve_algebraic(&eq.c2, &eq.c1, &eq.c0)?;
        for cand in candidates {
            if verify_all(&cand, &live) {
                opts.notes
                    .push(format!("algebraic constraint solved: F = {}", cand));
                return Ok(cand);
            }
        }
        return Err(StageError::AnsatzExhausted(
            "algebraic constraint has no solution consistent with the remaining equations".into(),
        ));
    }

    // Single-derivative linear equation: integrate it away.
    if let Some((idx, along)) = live.iter().enumerate().find_map(|(i, e)| {
        if !e.c2.is_zero() {
            return None;
        }
        match (e.dx.is_zero(), e.du.is_zero()) {
            (true, false) => Some((i, U)),
            (false, true) => Some((i, X)),
            _ => None,
        }
    }) {
        let eq = live.remove(idx);
        let f = reduce_single_derivative(&eq, along, &live, opts)?;
        return if verify_all(&f, eqs) {
            Ok(f)
        } else {
            Err(StageError::AnsatzExhausted(
                "single-derivative reduction produced an inconsistent candidate".into(),
            ))
        };
    }

    // Travelling-variable reduction from a transport consequence.
    if let Some((sigma, tau)) = find_transport(&live) {
        opts.notes.push(format!(
            "travelling variable s = {}*x + {}*u",
            sigma, tau
        ));
        let f = reduce_travelling(&live, &sigma, &tau, opts)?;
        return if verify_all(&f, eqs) {
            Ok(f)
        } else {
            Err(StageError::AnsatzExhausted(
                "travelling-variable reduction produced an inconsistent candidate".into(),
            ))
        };
    }

    // Last resort: one-variable ansatz F = G(x), then F = G(u).
    for along in [X, U] {
        if let Ok(f) = direct_ansatz(&live, along, opts) {
            if verify_all(&f, eqs) {
                return Ok(f);
            }
        }
    }

    Err(StageError::AnsatzExhausted(
        "no reduction applies to the derived system".into(),
    ))
}

/// Roots of c2 F^2 + c1 F + c0 = 0 over the rational-function field.
fn solve_algebraic(
    c2: &RationalExpr,
    c1: &RationalExpr,
    c0: &RationalExpr,
) -> Result<Vec<RationalExpr>, StageError> {
    if c2.is_zero() {
        if c1.is_zero() {
            return Err(StageError::AnsatzExhausted(
                "inconsistent constant equation".into(),
            ));
        }
        return Ok(vec![-(c0 / c1)]);
    }
    let four = RationalExpr::from_int(4);
    let disc = &(c1 * c1) - &(&(&four * c2) * c0);
    let mut out = Vec::new();
    if disc.is_zero() {
        out.push(-(c1 / &(&RationalExpr::from_int(2) * c2)));
        return Ok(out);
    }
    let num_rt = disc.num().sqrt();
    let den_rt = disc.den().sqrt();
    if let (Some(n), Some(d)) = (num_rt, den_rt) {
        let sqrt = &RationalExpr::from_poly_nvars(n) / &RationalExpr::from_poly_nvars(d);
        let two_c2 = &RationalExpr::from_int(2) * c2;
        out.push(&(&sqrt - c1) / &two_c2);
        out.push(&(&(-&sqrt) - c1) / &two_c2);
        Ok(out)
    } else {
        Err(StageError::AnsatzExhausted(
            "quadratic constraint needs an irrational root".into(),
        ))
    }
}

/// Integrate a linear equation with a single derivative, reducing the
/// unknown to one variable, and solve the reduced system.
fn reduce_single_derivative(
    eq: &PdeEq,
    along: usize,
    rest: &[PdeEq],
    opts: &mut F1Options,
) -> Result<RationalExpr, StageError> {
    let d = if along == U { &eq.du } else { &eq.dx };
    let h = -(&eq.c1 / d);
    let k = -(&eq.c0 / d);
    let hsol = exp_integrate(&h, along).ok_or_else(|| {
        StageError::AnsatzExhausted(format!(
            "homogeneous factor of the linear equation is not rational (log-derivative {})",
            h
        ))
    })?;
    let kpart = if k.is_zero() {
        RationalExpr::zero()
    } else {
        let integrand = &k / &hsol;
        let anti = rational_integrate(&integrand, along).ok_or_else(|| {
            StageError::NonrationalAntiderivative(format!(
                "particular part of the linear equation: integral of {}",
                integrand
            ))
        })?;
        anti
    };
    // F = H (G + K), G a function of the other variable.
    let other = if along == U { X } else { U };
    opts.notes.push(format!(
        "linear equation in {} integrated: F = ({})*(G + {})",
        ["x", "u"][along],
        hsol,
        kpart
    ));

    let mut tuples = Vec::new();
    for e in rest {
        // F_x = H_x (G+K) + H (G' if other==X else 0) + H K_x, similarly F_u.
        let hx = hsol.partial_idx(X);
        let hu = hsol.partial_idx(U);
        let kx = kpart.partial_idx(X);
        let ku = kpart.partial_idx(U);
        let h2 = &hsol * &hsol;
        let coef_gp = if other == X {
            &e.dx * &hsol
        } else {
            &e.du * &hsol
        };
        let coef_g2 = &e.c2 * &h2;
        let mut coef_g = &(&e.dx * &hx) + &(&e.du * &hu);
        coef_g = &coef_g + &(&(&RationalExpr::from_int(2) * &(&e.c2 * &h2)) * &kpart);
        coef_g = &coef_g + &(&e.c1 * &hsol);
        let mut coef_1 = &e.dx * &(&(&hx * &kpart) + &(&hsol * &kx));
        coef_1 = &coef_1 + &(&e.du * &(&(&hu * &kpart) + &(&hsol * &ku)));
        coef_1 = &coef_1 + &(&(&e.c2 * &h2) * &(&kpart * &kpart));
        coef_1 = &coef_1 + &(&(&e.c1 * &hsol) * &kpart);
        coef_1 = &coef_1 + &e.c0;
        tuples.push([coef_gp, coef_g2, coef_g, coef_1]);
    }
    let odes = collect_odes(&tuples, along, other)?;
    let g = solve_ode_system(&odes, opts)?;
    let g_in_place = if other == X { g } else { g.swap_vars(X, U) };
    Ok(&hsol * &(&g_in_place + &kpart))
}

/// Search the system for a pure transport consequence a F_x + b F_u = 0
/// with constant ratio, returning (sigma, tau) of the travelling variable
/// s = sigma x + tau u.
fn find_transport(eqs: &[PdeEq]) -> Option<(RationalExpr, RationalExpr)> {
    let transport_from = |a: &RationalExpr, b: &RationalExpr| -> Option<(RationalExpr, RationalExpr)> {
        if a.is_zero() && b.is_zero() {
            return None;
        }
        if a.is_zero() {
            // F_u = 0: s = x
            return Some((RationalExpr::one(), RationalExpr::zero()));
        }
        if b.is_zero() {
            return Some((RationalExpr::zero(), RationalExpr::one()));
        }
        let ratio = &(-&(b / a));
        ratio
            .constant_value()
            .map(|_| (ratio.clone(), RationalExpr::one()))
    };

    // Single equations that are already pure transport.
    for e in eqs {
        if e.c2.is_zero() && e.c1.is_zero() && e.c0.is_zero() {
            if let Some(st) = transport_from(&e.dx, &e.du) {
                return Some(st);
            }
        }
    }
    // Pairs with proportional lower-order parts.
    for i in 0..eqs.len() {
        for j in 0..eqs.len() {
            if i == j {
                continue;
            }
            let (a, b) = (&eqs[i], &eqs[j]);
            // mu with (c2,c1,c0)_i = mu (c2,c1,c0)_j
            let mu = if !b.c2.is_zero() {
                &a.c2 / &b.c2
            } else if !b.c1.is_zero() {
                &a.c1 / &b.c1
            } else if !b.c0.is_zero() {
                &a.c0 / &b.c0
            } else {
                continue;
            };
            let ok = (&a.c2 - &(&mu * &b.c2)).is_zero()
                && (&a.c1 - &(&mu * &b.c1)).is_zero()
                && (&a.c0 - &(&mu * &b.c0)).is_zero();
            if !ok {
                continue;
            }
            let ta = &a.dx - &(&mu * &b.dx);
            let tb = &a.du - &(&mu * &b.du);
            if let Some(st) = transport_from(&ta, &tb) {
                return Some(st);
            }
        }
    }
    None
}

/// Substitute F = G(sigma x + tau u) and solve the collected system.
fn reduce_travelling(
    eqs: &[PdeEq],
    sigma: &RationalExpr,
    tau: &RationalExpr,
    opts: &mut F1Options,
) -> Result<RationalExpr, StageError> {
    let x = RationalExpr::var_nvars(4, X);
    let u = RationalExpr::var_nvars(4, U);
    let s_of_xu = &(sigma * &x) + &(tau * &u);

    // Coefficients are rewritten in (x, s) with s stored in the u-slot.
    let rewrite: Box<dyn Fn(&RationalExpr) -> RationalExpr>;
    let param;
    let var;
    if tau.is_zero() {
        // s = sigma x; G is a function of x alone: collect u-powers directly.
        rewrite = Box::new(|e: &RationalExpr| e.clone());
        param = U;
        var = X;
    } else {
        // u = (s - sigma x)/tau
        let srepl = &(&u - &(sigma * &x)) / tau;
        rewrite = Box::new(move |e: &RationalExpr| {
            e.subst(&[
                RationalExpr::var_nvars(4, X),
                srepl.clone(),
                RationalExpr::var_nvars(4, 2),
                RationalExpr::var_nvars(4, 3),
            ])
        });
        param = X;
        var = U;
    }

    let mut tuples = Vec::new();
    for e in eqs {
        let coef_gp = &(&e.dx * sigma) + &(&e.du * tau);
        tuples.push([
            rewrite(&coef_gp),
            rewrite(&e.c2),
            rewrite(&e.c1),
            rewrite(&e.c0),
        ]);
    }
    let odes = collect_odes(&tuples, param, var)?;
    let g = solve_ode_system(&odes, opts)?;
    // g lives in slot X as a function of s; express in the original plane.
    Ok(g.subst_idx0(&s_of_xu))
}

/// One-variable ansatz F = G(along); the other variable only appears in the
/// coefficients and is collected.
fn direct_ansatz(
    eqs: &[PdeEq],
    along: usize,
    opts: &mut F1Options,
) -> Result<RationalExpr, StageError> {
    let other = if along == X { U } else { X };
    let mut tuples = Vec::new();
    for e in eqs {
        let d = if along == X { &e.dx } else { &e.du };
        tuples.push([d.clone(), e.c2.clone(), e.c1.clone(), e.c0.clone()]);
    }
    let odes = collect_odes(&tuples, other, along)?;
    let g = solve_ode_system(&odes, opts)?;
    Ok(if along == X { g } else { g.swap_vars(X, U) })
}

impl RationalExpr {
    /// Substitute an expression for slot X (used to map a univariate
    /// solution back to the plane).
    fn subst_idx0(&self, value: &RationalExpr) -> RationalExpr {
        let n = self.nvars();
        let mut values: Vec<RationalExpr> = (0..n).map(|i| RationalExpr::var_nvars(n, i)).collect();
        values[0] = value.clone();
        self.subst(&values)
    }
}

/// Clear denominators and slice each symbolic equation by powers of
/// `param`; the resulting coefficients must depend on `var` alone. The
/// returned equations live in slot X.
fn collect_odes(
    tuples: &[[RationalExpr; 4]],
    param: usize,
    var: usize,
) -> Result<Vec<OdeEq>, StageError> {
    let mut odes: Vec<OdeEq> = Vec::new();
    for tuple in tuples {
        let mut den = MPoly::one(4);
        for e in tuple {
            den = lcm(&den, e.den());
        }
        let cleared: Vec<MPoly> = tuple
            .iter()
            .map(|e| e.num().mul(&den.exact_div(e.den()).expect("lcm divisible")))
            .collect();
        let dmax = cleared.iter().map(|p| p.degree_in(param)).max().unwrap_or(0);
        for k in 0..=dmax {
            let mut parts = Vec::with_capacity(4);
            for p in &cleared {
                let slice = p.coeff_of_power(param, k);
                for v in 0..4 {
                    if v != var && slice.depends_on(v) {
                        return Err(StageError::AnsatzExhausted(format!(
                            "collected coefficient {} depends on more than the reduced variable",
                            RationalExpr::from_poly_nvars(slice.clone())
                        )));
                    }
                }
                let mut expr = RationalExpr::from_poly_nvars(slice);
                if var != X {
                    expr = expr.swap_vars(X, var);
                }
                parts.push(expr);
            }
            let ode = OdeEq {
                e1: parts[0].clone(),
                c2: parts[1].clone(),
                c1: parts[2].clone(),
                c0: parts[3].clone(),
            };
            if !ode.is_zero() {
                odes.push(ode);
            }
        }
    }
    Ok(odes)
}

/// Solve the univariate system: use an algebraic member if present,
/// otherwise the first genuine ODE becomes the Riccati representative whose
/// rational solutions are checked against the whole system.
fn solve_ode_system(odes: &[OdeEq], opts: &mut F1Options) -> Result<RationalExpr, StageError> {
    let live: Vec<&OdeEq> = odes.iter().filter(|e| !e.is_zero()).collect();
    if live.is_empty() {
        return Ok(RationalExpr::zero());
    }
    for e in &live {
        if e.e1.is_zero() && e.c2.is_zero() && e.c1.is_zero() {
            return Err(StageError::AnsatzExhausted(
                "inconsistent constant equation in the reduced system".into(),
            ));
        }
    }
    let verify_all = |g: &RationalExpr| live.iter().all(|e| e.residual(g).is_zero());

    if let Some(alg) = live.iter().find(|e| e.e1.is_zero()) {
        let candidates = solve_algebraic(&alg.c2, &alg.c1, &alg.c0)?;
        for cand in candidates {
            if verify_all(&cand) {
                return Ok(cand);
            }
        }
        return Err(StageError::AnsatzExhausted(
            "algebraic member of the reduced system is inconsistent".into(),
        ));
    }

    let lead = live[0];
    let riccati = RiccatiEq {
        var: X,
        c2: -(&lead.c2 / &lead.e1),
        c1: -(&lead.c1 / &lead.e1),
        c0: -(&lead.c0 / &lead.e1),
    };
    opts.notes
        .push(format!("Riccati equation {}", riccati.to_string_in("F2")));

    if let Some(hint) = opts.riccati_hint {
        let residual = riccati.residual(hint);
        if !residual.is_zero() {
            return Err(StageError::HintRejected {
                stage: super::Stage::A2,
                residual: residual.to_string(),
            });
        }
        if verify_all(hint) {
            opts.notes
                .push(format!("Riccati solved by hint F2 = {}", hint));
            return Ok(hint.clone());
        }
        return Err(StageError::HintRejected {
            stage: super::Stage::A2,
            residual: "hint solves the Riccati representative but not the full reduced system"
                .into(),
        });
    }

    let candidates = riccati.rational_solutions(opts.riccati_degree, 16);
    for cand in candidates {
        if verify_all(&cand) {
            opts.notes
                .push(format!("Riccati particular solution F2 = {}", cand));
            return Ok(cand);
        }
    }
    Err(StageError::RiccatiUnsolved(riccati.to_string_in("F2")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn e(s: &str) -> RationalExpr {
        parse(s).unwrap()
    }

    fn opts<'a>(notes: &'a mut Vec<String>) -> F1Options<'a> {
        F1Options {
            riccati_degree: 4,
            riccati_hint: None,
            notes,
        }
    }

    #[test]
    fn worked_system_from_first_example() {
        // F_u = -2F/u, F_x = (x/2) u^2 ... reduced: F = F2(x)/u^2 with
        // F2' = (x/2) F2^2 + 3/(2x^3); solution F = -1/(x^2 u^2).
        let eqs = vec![
            PdeEq {
                dx: e("0"),
                du: e("1"),
                c2: e("0"),
                c1: e("2/u"),
                c0: e("0"),
            },
            PdeEq {
                dx: e("1"),
                du: e("0"),
                c2: e("-1/2*x*u^2"),
                c1: e("0"),
                c0: e("-3/(2*x^3*u^2)"),
            },
        ];
        let mut notes = Vec::new();
        let f = solve_f1_system(&eqs, &mut opts(&mut notes)).unwrap();
        assert_eq!(f, e("-1/(x^2*u^2)"));
    }

    #[test]
    fn travelling_system_from_second_example() {
        // F_x = F^2/2, F_u = F^2/2  =>  F = F2(x+u) with F2' = F2^2/2;
        // first particular solution F2 = 0.
        let eqs = vec![
            PdeEq {
                dx: e("1"),
                du: e("0"),
                c2: e("-1/2"),
                c1: e("0"),
                c0: e("0"),
            },
            PdeEq {
                dx: e("0"),
                du: e("1"),
                c2: e("-1/2"),
                c1: e("0"),
                c0: e("0"),
            },
        ];
        let mut notes = Vec::new();
        let f = solve_f1_system(&eqs, &mut opts(&mut notes)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn algebraic_member() {
        // F + x = 0 together with F_u = 0.
        let eqs = vec![
            PdeEq {
                dx: e("0"),
                du: e("0"),
                c2: e("0"),
                c1: e("1"),
                c0: e("x"),
            },
            PdeEq {
                dx: e("0"),
                du: e("1"),
                c2: e("0"),
                c1: e("0"),
                c0: e("0"),
            },
        ];
        let mut notes = Vec::new();
        let f = solve_f1_system(&eqs, &mut opts(&mut notes)).unwrap();
        assert_eq!(f, e("-x"));
    }

    #[test]
    fn empty_system_defaults_to_zero() {
        let mut notes = Vec::new();
        assert!(solve_f1_system(&[], &mut opts(&mut notes))
            .unwrap()
            .is_zero());
    }
}
