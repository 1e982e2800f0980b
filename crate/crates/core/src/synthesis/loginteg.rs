//! Exact integration helpers that stay inside the rational class.
//!
//! `exp_integrate` solves W_v/W = r for a rational W by peeling integer
//! residues off the logarithmic derivative: whenever r contains a summand
//! n * g_v / g it contributes the factor g^n. `rational_integrate` computes
//! a rational antiderivative (Horowitz-Ostrogradsky reduction) and refuses
//! inputs whose integral needs logarithms. `laurent_antiderivative` is the
//! term-by-term power rule over monomial denominators.

use super::linsys;
use super::upoly::{common_denominator, const_like, expr_as_upoly_fraction, UPoly};
use crate::expr::RationalExpr;
use crate::mpoly::{gcd, MPoly};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Bound on the integer residues searched while peeling.
const RESIDUE_BOUND: i64 = 24;
const PEEL_ITERATIONS: usize = 64;

/// Solve W_v / W = r for a nonzero rational W, as a product of integer
/// powers of polynomials. `None` when no rational solution exists (residues
/// outside the search bound, non-integer residues, or a nonzero polynomial
/// part, all of which would force W outside the rational class).
pub(crate) fn exp_integrate(r: &RationalExpr, v: usize) -> Option<RationalExpr> {
    let nv = r.nvars();
    let mut rest = r.clone();
    let mut result = RationalExpr::one_nvars(nv);
    for _ in 0..PEEL_ITERATIONS {
        if rest.is_zero() {
            return Some(result);
        }
        if !rest.den().depends_on(v) {
            // Polynomial in v (or v-free and nonzero): exp of its integral
            // is not rational.
            return None;
        }
        let num = rest.num().clone();
        let den = rest.den().clone();
        let den_dv = den.partial(v);
        let mut progressed = false;
        for mag in 1..=RESIDUE_BOUND {
            for n in [mag, -mag] {
                let shifted = num.sub(&den_dv.mul_scalar(&BigRational::from_integer(
                    BigInt::from(n),
                )));
                let g = if shifted.is_zero() {
                    den.clone()
                } else {
                    gcd(&den, &shifted)
                };
                if g.degree_in(v) == 0 {
                    continue;
                }
                // Subtract n * g_v / g and record the factor g^n.
                let g_expr = RationalExpr::from_poly_nvars(g.clone());
                let contribution =
                    &const_like(&g_expr, n) * &(&RationalExpr::from_poly_nvars(g.partial(v)) / &g_expr);
                rest = &rest - &contribution;
                let factor = g_expr.powi(n).expect("nonzero factor");
                result = &result * &factor;
                progressed = true;
                break;
            }
            if progressed {
                break;
            }
        }
        if !progressed {
            return None;
        }
    }
    None
}

/// Rational antiderivative of `r` in variable `v`; `None` when the integral
/// has a logarithmic part.
pub(crate) fn rational_integrate(r: &RationalExpr, v: usize) -> Option<RationalExpr> {
    if r.is_zero() {
        return Some(r.clone());
    }
    let (num_up, den_up) = expr_as_upoly_fraction(r, v);
    // Split off the polynomial part.
    let (poly_part, rem) = num_up.div_rem(&den_up);
    let mut result = integrate_upoly(&poly_part, v);
    if rem.is_zero() {
        return Some(result);
    }

    // Horowitz-Ostrogradsky: with D = den, Q = gcd(D, D'), S = D/Q,
    //   rem/D = (P/Q)' + R/S,  deg P < deg Q, deg R < deg S,
    // and the integral is rational exactly when R = 0.
    let d = den_up.clone();
    let dp = d.derivative();
    let q = d.gcd(&dp);
    if q.degree() == Some(0) || q.is_zero() {
        // Squarefree denominator: any nonzero proper part integrates to logs.
        return None;
    }
    let (s, s_rem) = d.div_rem(&q);
    debug_assert!(s_rem.is_zero());
    // t = Q' S / Q is a polynomial.
    let (t, t_rem) = q.derivative().mul(&s).div_rem(&q);
    debug_assert!(t_rem.is_zero());

    let np = q.degree().unwrap();
    let ns = s.degree().unwrap_or(0);
    let n_unknowns = np + ns;
    if n_unknowns == 0 {
        return None;
    }
    let nvars = r.nvars();
    let zero = RationalExpr::zero_nvars(nvars);

    // rem = P' S - P t + R Q, unknowns: P coeffs (np), R coeffs (ns).
    let max_deg = rem
        .degree()
        .unwrap_or(0)
        .max(np.saturating_sub(1) + ns.saturating_sub(0))
        .max(np + ns);
    let rows = max_deg + 1;
    let mut matrix = vec![vec![zero.clone(); n_unknowns]; rows];
    let mut rhs = vec![zero.clone(); rows];
    for (k, c) in rem.coeffs.iter().enumerate() {
        rhs[k] = c.clone();
    }
    for j in 0..np {
        // Column for P_j: contribution of x^j in P.
        let mut basis = vec![zero.clone(); j + 1];
        basis[j] = RationalExpr::one_nvars(nvars);
        let pj = UPoly::from_coeffs(basis);
        let contrib = pj.derivative().mul(&s).sub(&pj.mul(&t));
        for (k, c) in contrib.coeffs.iter().enumerate() {
            if k < rows {
                matrix[k][j] = c.clone();
            }
        }
    }
    for j in 0..ns {
        let mut basis = vec![zero.clone(); j + 1];
        basis[j] = RationalExpr::one_nvars(nvars);
        let rj = UPoly::from_coeffs(basis);
        let contrib = rj.mul(&q);
        for (k, c) in contrib.coeffs.iter().enumerate() {
            if k < rows {
                matrix[k][np + j] = c.clone();
            }
        }
    }
    let solution = linsys::solve(&matrix, &rhs, &zero)?;
    // Logarithmic part must vanish.
    if solution[np..].iter().any(|c| !c.is_zero()) {
        return None;
    }
    let p_poly = UPoly::from_coeffs(solution[..np].to_vec());
    let rational_part = &p_poly.to_expr(v) / &q.to_expr(v);
    result = &result + &rational_part;
    Some(result)
}

fn integrate_upoly(p: &UPoly, v: usize) -> RationalExpr {
    let nv = p
        .coeffs
        .first()
        .map(|c| c.nvars())
        .unwrap_or(crate::expr::JET_VARS);
    let mut acc = RationalExpr::zero_nvars(nv);
    let var = RationalExpr::var_nvars(nv, v);
    for (k, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let scaled = c / &const_like(c, (k + 1) as i64);
        acc = &acc + &(&scaled * &var.powi(k as i64 + 1).unwrap());
    }
    acc
}

/// Term-by-term antiderivative over Laurent monomials: requires a monomial
/// denominator; an exponent of -1 in `v` (a logarithm) is an error.
pub(crate) fn laurent_antiderivative(r: &RationalExpr, v: usize) -> Option<RationalExpr> {
    if r.is_zero() {
        return Some(r.clone());
    }
    if r.den().num_terms() != 1 {
        return None;
    }
    let nv = r.nvars();
    let (dm, dc) = r.den().leading().expect("nonzero denominator");
    let dm = dm.clone();
    let dc = dc.clone();
    let mut acc = RationalExpr::zero_nvars(nv);
    for (m, c) in r.num().terms() {
        // Laurent exponents of the term.
        let mut exps: Vec<i64> = m
            .0
            .iter()
            .zip(&dm.0)
            .map(|(&a, &b)| a as i64 - b as i64)
            .collect();
        let e = exps[v];
        if e == -1 {
            return None;
        }
        exps[v] = e + 1;
        let coeff = (c / &dc) / BigRational::from_integer(BigInt::from(e + 1));
        let mut term = RationalExpr::from_poly_nvars(MPoly::constant(nv, coeff));
        for (i, &ex) in exps.iter().enumerate() {
            if ex != 0 {
                term = &term
                    * &RationalExpr::var_nvars(nv, i)
                        .powi(ex)
                        .expect("variable power");
            }
        }
        acc = &acc + &term;
    }
    Some(acc)
}

/// Solve the multiplicative system (log G)_p = r_p together with
/// (log G)_x + p (log G)_u = r_rest for a nonzero rational G(x, u, p),
/// normalized to numerator leading coefficient one.
pub(crate) fn solve_multiplicative(
    r_p: &RationalExpr,
    r_rest: &RationalExpr,
) -> Result<RationalExpr, String> {
    const X: usize = 0;
    const U: usize = 1;
    const P: usize = 2;
    let g0 = exp_integrate(r_p, P)
        .ok_or_else(|| format!("p-integration of {} leaves the rational class", r_p))?;
    // Remaining (x,u)-dependence: must be affine in p.
    let logder = |g: &RationalExpr| {
        let p = RationalExpr::var_nvars(g.nvars(), P);
        &(&g.partial_idx(X) + &(&p * &g.partial_idx(U))) / g
    };
    let rem = &(r_rest - &logder(&g0));
    let rem_pp = rem.partial_idx(P).partial_idx(P);
    if !rem_pp.is_zero() {
        return Err(format!(
            "q-free part is not affine in p after the p-integration: {}",
            rem
        ));
    }
    let r1 = rem.partial_idx(P);
    let r0 = &(rem - &(&RationalExpr::var_nvars(rem.nvars(), P) * &r1));
    // Exactness of the (x,u) gradient.
    if r0.partial_idx(U) != r1.partial_idx(X) {
        return Err(format!(
            "exactness check failed: d/du({}) != d/dx({})",
            r0, r1
        ));
    }
    let g1 = exp_integrate(r0, X)
        .ok_or_else(|| format!("x-integration of {} leaves the rational class", r0))?;
    let rem2 = &(&r1 - &(&g1.partial_idx(U) / &g1));
    if rem2.depends_on_idx(X) || rem2.depends_on_idx(P) {
        return Err(format!("u-part retains x or p dependence: {}", rem2));
    }
    let g2 = exp_integrate(rem2, U)
        .ok_or_else(|| format!("u-integration of {} leaves the rational class", rem2))?;
    let g = &(&g0 * &g1) * &g2;
    // Defining equations hold exactly by construction; check anyway.
    debug_assert!((&(&g.partial_idx(P) / &g) - r_p).is_zero());
    debug_assert!((&logder(&g) - r_rest).is_zero());
    Ok(g.normalized_monic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn e(s: &str) -> RationalExpr {
        parse(s).unwrap()
    }

    const X: usize = 0;
    const U: usize = 1;
    const P: usize = 2;

    #[test]
    fn exp_integrate_simple_powers() {
        // W_u/W = -2/u  =>  W = u^-2
        let w = exp_integrate(&e("-2/u"), U).unwrap();
        assert_eq!(w, e("1/u^2"));
        // W_x/W = -1/x  =>  W = 1/x
        let w = exp_integrate(&e("-1/x"), X).unwrap();
        assert_eq!(w, e("1/x"));
        // W_p/W = -2/(1+p)  =>  W = (1+p)^-2
        let w = exp_integrate(&e("-2/(1+p)"), P).unwrap();
        assert_eq!(w, e("1/(1+p)^2"));
    }

    #[test]
    fn exp_integrate_composite() {
        // W = x^2 (x+u)^-1: log-derivative in x is 2/x - 1/(x+u)
        let r = e("2/x - 1/(x+u)");
        let w = exp_integrate(&r, X).unwrap();
        assert_eq!(w, e("x^2/(x+u)"));
    }

    #[test]
    fn exp_integrate_rejects_nonrational() {
        // half-integer residue
        assert!(exp_integrate(&e("1/(2*x)"), X).is_none());
        // polynomial part
        assert!(exp_integrate(&e("p"), P).is_none());
        assert!(exp_integrate(&e("1"), X).is_none());
    }

    #[test]
    fn rational_integrate_cases() {
        // d/dx(-1/x) = 1/x^2
        assert_eq!(rational_integrate(&e("1/x^2"), X).unwrap(), e("-1/x"));
        // logarithm required
        assert!(rational_integrate(&e("1/x"), X).is_none());
        assert!(rational_integrate(&e("x/(x^2+1)"), X).is_none());
        // polynomial
        assert_eq!(
            rational_integrate(&e("3*x^2 + u"), X).unwrap(),
            e("x^3 + u*x")
        );
        // mixed
        assert_eq!(
            rational_integrate(&e("x + 2/x^3"), X).unwrap(),
            e("1/2*x^2 - 1/x^2")
        );
    }

    #[test]
    fn laurent_cases() {
        assert_eq!(
            laurent_antiderivative(&e("1/(x*u^2)"), U).unwrap(),
            e("-1/(x*u)")
        );
        assert_eq!(laurent_antiderivative(&e("1"), X).unwrap(), e("x"));
        assert!(laurent_antiderivative(&e("1/x"), X).is_none());
        // non-monomial denominator
        assert!(laurent_antiderivative(&e("1/(1+x)"), X).is_none());
    }

    #[test]
    fn multiplicative_solver_matches_worked_values() {
        // log a3: L_p = 0, L_x + p L_u = -2p/u - 1/x  =>  a3 = 1/(x u^2)
        let a3 = solve_multiplicative(&e("0"), &e("-2*p/u - 1/x")).unwrap();
        assert_eq!(a3, e("1/(x*u^2)"));

        // L_p = -2/(1+p), remainder zero  =>  (1+p)^-2
        let a3 = solve_multiplicative(&e("-2/(1+p)"), &e("0")).unwrap();
        assert_eq!(a3, e("1/(1+p)^2"));

        // trivial
        let one = solve_multiplicative(&e("0"), &e("0")).unwrap();
        assert!(one.is_one());
    }

    #[test]
    fn multiplicative_solver_exactness_failure() {
        // r0 = u (depends on u), r1 = 0: not exact.
        assert!(solve_multiplicative(&e("0"), &e("u")).is_err());
    }

    #[test]
    fn common_denominator_helper() {
        let a = e("1/x");
        let b = e("1/(x*u)");
        let exprs = [&a, &b];
        let d = common_denominator(&exprs);
        assert_eq!(d, e("x*u").num().clone());
    }
}
