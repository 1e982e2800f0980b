//! Bounded rational-solution search for scalar Riccati equations
//! F' = C2 F^2 + C1 F + C0 with rational-function coefficients in one
//! variable.
//!
//! Candidates are ratios of polynomials with numerator and denominator
//! degree at most the configured bound, the denominator monic. Equating the
//! cleared residual to zero gives a quadratic system in the unknown
//! coefficients, solved by linear elimination plus branching on the rational
//! roots of univariate equations. Constant candidates are tried first and
//! roots are ordered by absolute value, so the search is deterministic.

use crate::expr::RationalExpr;
use crate::mpoly::MPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Riccati equation in a single variable, stored in jet slot `var`.
/// Coefficients must depend on that slot only.
#[derive(Clone, Debug)]
pub(crate) struct RiccatiEq {
    pub var: usize,
    pub c2: RationalExpr,
    pub c1: RationalExpr,
    pub c0: RationalExpr,
}

impl RiccatiEq {
    /// Residual F' - C2 F^2 - C1 F - C0 for a candidate F.
    pub fn residual(&self, f: &RationalExpr) -> RationalExpr {
        let df = f.partial_idx(self.var);
        let mut r = &df - &(&self.c2 * &(f * f));
        r = &r - &(&self.c1 * f);
        &r - &self.c0
    }

    pub fn to_string_in(&self, name: &str) -> String {
        format!(
            "d{name}/dz = ({})*{name}^2 + ({})*{name} + ({})",
            self.c2, self.c1, self.c0
        )
    }

    /// Search for rational particular solutions, lowest-complexity first.
    /// Returns candidates in deterministic order, already residual-checked.
    pub fn rational_solutions(&self, degree_bound: u32, limit: usize) -> Vec<RationalExpr> {
        let mut found: Vec<RationalExpr> = Vec::new();
        let push = |f: RationalExpr, found: &mut Vec<RationalExpr>| {
            if found.iter().all(|g| g != &f) {
                found.push(f);
            }
        };

        // Constant candidates.
        for c in self.constant_candidates() {
            let f = RationalExpr::from_poly_nvars(MPoly::constant(self.c2.nvars(), c));
            if self.residual(&f).is_zero() {
                push(f, &mut found);
                if found.len() >= limit {
                    return found;
                }
            }
        }

        // Ratios with bounded degrees, denominator monic.
        let d = degree_bound as usize;
        for total in 1..=(2 * d) {
            for dq in 0..=total.min(d) {
                let dn = total - dq;
                if dn > d {
                    continue;
                }
                for sol in self.search_shape(dn, dq) {
                    if self.residual(&sol).is_zero() {
                        push(sol, &mut found);
                        if found.len() >= limit {
                            return found;
                        }
                    }
                }
            }
        }
        found
    }

    /// Common rational roots of the coefficient-wise constant equations
    /// C2 c^2 + C1 c + C0 = 0.
    fn constant_candidates(&self) -> Vec<BigRational> {
        // Clear denominators: residual numerator of c2 z^2-style system.
        // Build the polynomial system in one unknown c by collecting the
        // main-variable powers of C2 c^2 + C1 c + C0.
        let v = self.var;
        let exprs = [&self.c2, &self.c1, &self.c0];
        let mut den = MPoly::one(self.c2.nvars());
        for e in exprs {
            den = crate::mpoly::lcm(&den, e.den());
        }
        let cleared: Vec<MPoly> = exprs
            .iter()
            .map(|e| {
                e.num()
                    .mul(&den.exact_div(e.den()).expect("lcm divisible"))
            })
            .collect();
        let dmax = cleared.iter().map(|p| p.degree_in(v)).max().unwrap_or(0);
        // Each power of the main variable gives a quadratic in c.
        let mut gcd_poly: Option<Vec<BigRational>> = None;
        for k in 0..=dmax {
            let quad: Vec<BigRational> = cleared
                .iter()
                .rev() // order: c0 + c1*c + c2*c^2
                .map(|p| {
                    p.coeff_of_power(v, k)
                        .constant_value()
                        .expect("coefficients are v-only")
                })
                .collect();
            if quad.iter().all(|q| q.is_zero()) {
                continue;
            }
            gcd_poly = Some(match gcd_poly {
                None => quad,
                Some(g) => upoly_gcd_q(&g, &quad),
            });
        }
        match gcd_poly {
            None => vec![BigRational::zero()], // any constant works; take 0
            Some(g) => rational_roots(&g),
        }
    }

    /// Solve for F = N/Q with deg N = dn, deg Q = dq (Q monic).
    fn search_shape(&self, dn: usize, dq: usize) -> Vec<RationalExpr> {
        let v = self.var;
        let nv = self.c2.nvars();
        // Unknown space: n_0..n_dn, q_0..q_(dq-1); Q monic of degree dq.
        let n_unknowns = dn + 1 + dq;
        let uvars = n_unknowns;

        // Polynomials in (unknowns) x (main variable): represent as vectors
        // over the unknown-poly ring indexed by main-variable power.
        // N(z) = sum n_i z^i, Q(z) = z^dq + sum q_j z^j.
        let unknown = |i: usize| MPoly::var(uvars, i);
        let n_poly: Vec<MPoly> = (0..=dn).map(unknown).collect();
        let mut q_poly: Vec<MPoly> = (0..dq).map(|j| unknown(dn + 1 + j)).collect();
        q_poly.push(MPoly::one(uvars));

        // Clear coefficient denominators.
        let exprs = [&self.c2, &self.c1, &self.c0];
        let mut den = MPoly::one(nv);
        for e in exprs {
            den = crate::mpoly::lcm(&den, e.den());
        }
        let cleared: Vec<Vec<BigRational>> = exprs
            .iter()
            .map(|e| {
                let p = e
                    .num()
                    .mul(&den.exact_div(e.den()).expect("lcm divisible"));
                poly_coeffs_along(&p, v)
            })
            .collect();
        let den_coeffs = poly_coeffs_along(&den, v);

        // Residual numerator:
        //   den*(N' Q - N Q') - c2n N^2 - c1n N Q - c0n Q^2 = 0
        // where c*n are the cleared numerators; all as polynomials in the
        // main variable with MPoly-in-unknowns coefficients.
        let np = series_derivative(&n_poly);
        let qp = series_derivative(&q_poly);
        let wronskian = series_sub(
            &series_mul(&np, &q_poly),
            &series_mul(&n_poly, &qp),
        );
        let mut residual = series_mul_scalarpoly(&wronskian, &den_coeffs, uvars);
        let n2 = series_mul(&n_poly, &n_poly);
        residual = series_sub(&residual, &series_mul_scalarpoly(&n2, &cleared[0], uvars));
        let nq = series_mul(&n_poly, &q_poly);
        residual = series_sub(&residual, &series_mul_scalarpoly(&nq, &cleared[1], uvars));
        let q2 = series_mul(&q_poly, &q_poly);
        residual = series_sub(&residual, &series_mul_scalarpoly(&q2, &cleared[2], uvars));

        let equations: Vec<MPoly> = residual.into_iter().filter(|p| !p.is_zero()).collect();
        let solutions = solve_quadratic_system(&equations, uvars, 16);

        let mut out = Vec::new();
        for sol in solutions {
            // Reconstruct F = N/Q.
            let var = RationalExpr::var_nvars(nv, v);
            let mut num = RationalExpr::zero_nvars(nv);
            for (i, _) in n_poly.iter().enumerate() {
                let c = RationalExpr::from_poly_nvars(MPoly::constant(nv, sol[i].clone()));
                num = &num + &(&c * &var.powi(i as i64).unwrap());
            }
            let mut den_e = var.powi(dq as i64).unwrap();
            for j in 0..dq {
                let c = RationalExpr::from_poly_nvars(MPoly::constant(
                    nv,
                    sol[dn + 1 + j].clone(),
                ));
                den_e = &den_e + &(&c * &var.powi(j as i64).unwrap());
            }
            if den_e.is_zero() {
                continue;
            }
            out.push(&num / &den_e);
        }
        out
    }
}

fn poly_coeffs_along(p: &MPoly, v: usize) -> Vec<BigRational> {
    let d = p.degree_in(v);
    (0..=d)
        .map(|k| {
            p.coeff_of_power(v, k)
                .constant_value()
                .expect("coefficient is v-only")
        })
        .collect()
}

type Series = Vec<MPoly>;

fn series_mul(a: &Series, b: &Series) -> Series {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let nv = a[0].nvars();
    let mut out = vec![MPoly::zero(nv); a.len() + b.len() - 1];
    for (i, pa) in a.iter().enumerate() {
        if pa.is_zero() {
            continue;
        }
        for (j, pb) in b.iter().enumerate() {
            if pb.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&pa.mul(pb));
        }
    }
    out
}

fn series_sub(a: &Series, b: &Series) -> Series {
    let n = a.len().max(b.len());
    let nv = a
        .first()
        .or(b.first())
        .map(|p| p.nvars())
        .unwrap_or(0);
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| MPoly::zero(nv));
            let y = b.get(i).cloned().unwrap_or_else(|| MPoly::zero(nv));
            x.sub(&y)
        })
        .collect()
}

fn series_derivative(a: &Series) -> Series {
    if a.len() <= 1 {
        return vec![];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, p)| p.mul_scalar(&BigRational::from_integer(BigInt::from(i))))
        .collect()
}

fn series_mul_scalarpoly(a: &Series, scalar: &[BigRational], uvars: usize) -> Series {
    if a.is_empty() || scalar.is_empty() {
        return vec![];
    }
    let mut out = vec![MPoly::zero(uvars); a.len() + scalar.len() - 1];
    for (i, pa) in a.iter().enumerate() {
        for (j, c) in scalar.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&pa.mul_scalar(c));
        }
    }
    out
}

/// Backtracking solver for small polynomial systems of total degree <= 2:
/// eliminate through equations linear in the unknowns, branch on rational
/// roots of univariate equations, leave remaining unknowns at zero. Returns
/// up to `limit` solutions in deterministic order; an empty result means
/// either inconsistency or a system outside this solver's reach.
pub(crate) fn solve_quadratic_system(
    equations: &[MPoly],
    nvars: usize,
    limit: usize,
) -> Vec<Vec<BigRational>> {
    let mut solutions = Vec::new();
    let state: Vec<Option<BigRational>> = vec![None; nvars];
    recurse(
        equations.to_vec(),
        state,
        nvars,
        limit,
        &mut solutions,
        0,
    );
    solutions
}

fn recurse(
    mut eqs: Vec<MPoly>,
    state: Vec<Option<BigRational>>,
    nvars: usize,
    limit: usize,
    out: &mut Vec<Vec<BigRational>>,
    depth: usize,
) {
    if out.len() >= limit || depth > 64 {
        return;
    }
    // Normalize: drop zeros, detect contradictions.
    eqs.retain(|e| !e.is_zero());
    for e in &eqs {
        if e.is_constant() {
            return; // nonzero constant: dead branch
        }
    }
    if eqs.is_empty() {
        let full: Vec<BigRational> = state
            .iter()
            .map(|s| s.clone().unwrap_or_else(BigRational::zero))
            .collect();
        if !out.contains(&full) {
            out.push(full);
        }
        return;
    }

    // Linear equation: substitute.
    if let Some((idx, var, coeff)) = eqs.iter().enumerate().find_map(|(i, e)| {
        if e.total_degree() == 1 {
            // pick lowest-index unknown present
            let var = (0..nvars).find(|&v| e.degree_in(v) == 1)?;
            let coeff = e.coeff_of_power(var, 1).constant_value()?;
            Some((i, var, coeff))
        } else {
            None
        }
    }) {
        let eq = eqs.remove(idx);
        // var = -(rest)/coeff
        let rest = eq.coeff_of_power(var, 0);
        let value_poly = rest.mul_scalar(&(-BigRational::one() / coeff));
        let mut new_eqs: Vec<MPoly> = eqs
            .iter()
            .map(|e| e.subst(var, &value_poly))
            .collect();
        // Track the substitution as a pending definition: once everything
        // else is assigned, evaluate. Simplest: append the defining relation
        // and re-solve it when it becomes univariate; here we instead
        // eliminate now and back-substitute at the end via the recorded
        // linear definition.
        // To keep the state exact we add the definition as an equation
        // var - value = 0 once value has no unknowns, otherwise defer.
        if let Some(v) = value_poly.constant_value() {
            let mut st = state.clone();
            st[var] = Some(v);
            recurse(new_eqs, st, nvars, limit, out, depth + 1);
        } else {
            // Defer: solve the reduced system, then evaluate the definition.
            let reduced_solutions = {
                let mut sols = Vec::new();
                recurse(
                    std::mem::take(&mut new_eqs),
                    state.clone(),
                    nvars,
                    limit,
                    &mut sols,
                    depth + 1,
                );
                sols
            };
            for sol in reduced_solutions {
                if out.len() >= limit {
                    return;
                }
                let mut full = sol.clone();
                full[var] = value_poly.eval(&sol);
                if !out.contains(&full) {
                    out.push(full);
                }
            }
        }
        return;
    }

    // Univariate equation: branch on rational roots.
    if let Some((idx, var)) = eqs.iter().enumerate().find_map(|(i, e)| {
        let vars: Vec<usize> = (0..nvars).filter(|&v| e.depends_on(v)).collect();
        if vars.len() == 1 {
            Some((i, vars[0]))
        } else {
            None
        }
    }) {
        let eq = eqs[idx].clone();
        let coeffs: Vec<BigRational> = (0..=eq.degree_in(var))
            .map(|k| {
                eq.coeff_of_power(var, k)
                    .constant_value()
                    .expect("univariate equation")
            })
            .collect();
        for root in rational_roots(&coeffs) {
            if out.len() >= limit {
                return;
            }
            let value = MPoly::constant(nvars, root.clone());
            let new_eqs: Vec<MPoly> = eqs.iter().map(|e| e.subst(var, &value)).collect();
            let mut st = state.clone();
            st[var] = Some(root);
            recurse(new_eqs, st, nvars, limit, out, depth + 1);
        }
        return;
    }

    // Full quadratic coupling: outside this solver's reach.
}

/// Monic gcd of two univariate polynomials over Q given by ascending
/// coefficient vectors.
fn upoly_gcd_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
        while v.last().map(|x| x.is_zero()).unwrap_or(false) {
            v.pop();
        }
        v
    }
    fn rem(mut a: Vec<BigRational>, b: &[BigRational]) -> Vec<BigRational> {
        let db = b.len() - 1;
        let lb = b.last().unwrap().clone();
        while a.len() > db {
            let la = a.last().unwrap().clone();
            if la.is_zero() {
                a.pop();
                continue;
            }
            let k = a.len() - 1 - db;
            let q = la / &lb;
            for (i, bc) in b.iter().enumerate() {
                let delta = &q * bc;
                a[k + i] = &a[k + i] - delta;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        a
    }
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().cloned() {
        for c in &mut x {
            *c = &*c / &l;
        }
    }
    x
}

/// Rational roots of a univariate polynomial with rational coefficients,
/// ordered by absolute value (positive before negative on ties).
pub(crate) fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    // Strip trailing zeros.
    let mut c = coeffs.to_vec();
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    if c.is_empty() {
        return vec![BigRational::zero()]; // identically zero: pick 0
    }
    if c.len() == 1 {
        return vec![]; // nonzero constant
    }
    // Clear to integer coefficients.
    let mut den_lcm = BigInt::one();
    for x in &c {
        den_lcm = den_lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = c
        .iter()
        .map(|x| x.numer() * &den_lcm / x.denom())
        .collect();
    // Factor out powers of the variable: root 0.
    let mut roots = Vec::new();
    let first_nonzero = ints.iter().position(|x| !x.is_zero()).unwrap();
    if first_nonzero > 0 {
        roots.push(BigRational::zero());
    }
    let ints = &ints[first_nonzero..];
    if ints.len() >= 2 {
        let a0 = ints[0].clone();
        let an = ints.last().unwrap().clone();
        let p_divs = small_divisors(&a0);
        let q_divs = small_divisors(&an);
        let mut candidates: Vec<BigRational> = Vec::new();
        for p in &p_divs {
            for q in &q_divs {
                for sign in [1i32, -1] {
                    let cand = BigRational::new(
                        if sign > 0 { p.clone() } else { -p.clone() },
                        q.clone(),
                    );
                    if !candidates.contains(&cand) {
                        candidates.push(cand);
                    }
                }
            }
        }
        candidates.sort_by(|a, b| {
            a.abs()
                .cmp(&b.abs())
                .then_with(|| b.cmp(a)) // positive before negative
        });
        for cand in candidates {
            let mut acc = BigRational::zero();
            for coef in ints.iter().rev() {
                acc = acc * &cand + BigRational::from_integer(coef.clone());
            }
            if acc.is_zero() && !roots.contains(&cand) {
                roots.push(cand);
            }
        }
    }
    roots
}

/// Positive divisors; caps the enumeration for huge values to keep the
/// search bounded (candidates beyond the cap are simply not tried).
fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut divs = Vec::new();
    if let Ok(small) = u64::try_from(&n) {
        let mut d = 1u64;
        while (d as u128) * (d as u128) <= small as u128 && d <= 1_000_000 {
            if small % d == 0 {
                divs.push(BigInt::from(d));
                divs.push(BigInt::from(small / d));
            }
            d += 1;
        }
    } else {
        // Huge leading/constant coefficient: try 1 and the value itself.
        divs.push(BigInt::one());
        divs.push(n.clone());
    }
    divs.sort();
    divs.dedup();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn e(s: &str) -> RationalExpr {
        parse(s).unwrap()
    }

    fn riccati(c2: &str, c1: &str, c0: &str) -> RiccatiEq {
        RiccatiEq {
            var: 0,
            c2: e(c2),
            c1: e(c1),
            c0: e(c0),
        }
    }

    #[test]
    fn constant_zero_solution() {
        // F' = F^2/2
        let eq = riccati("1/2", "0", "0");
        let sols = eq.rational_solutions(4, 4);
        assert!(!sols.is_empty());
        assert!(sols[0].is_zero());
    }

    #[test]
    fn worked_riccati_from_first_example() {
        // F' = (x/2) F^2 + 3/(2 x^3); particular solution -1/x^2.
        let eq = riccati("x/2", "0", "3/(2*x^3)");
        let sols = eq.rational_solutions(4, 4);
        assert!(!sols.is_empty());
        assert_eq!(sols[0], e("-1/x^2"));
        for s in &sols {
            assert!(eq.residual(s).is_zero());
        }
    }

    #[test]
    fn airy_type_has_no_rational_solution() {
        // F' = F^2 + x has no rational solutions.
        let eq = riccati("1", "0", "x");
        assert!(eq.rational_solutions(3, 4).is_empty());
    }

    #[test]
    fn linear_case_polynomial_solution() {
        // F' = -F/x + 3x has the particular solution F = x^2 (c2 = 0).
        let eq = riccati("0", "-1/x", "3*x");
        let sols = eq.rational_solutions(3, 8);
        assert!(sols.iter().any(|s| s == &e("x^2")));
        for s in &sols {
            assert!(eq.residual(s).is_zero());
        }
    }

    #[test]
    fn rational_roots_ordering() {
        // (c+1)(c+3) = c^2 + 4c + 3
        let roots = rational_roots(&[
            BigRational::from_integer(3.into()),
            BigRational::from_integer(4.into()),
            BigRational::from_integer(1.into()),
        ]);
        assert_eq!(
            roots,
            vec![
                BigRational::from_integer((-1).into()),
                BigRational::from_integer((-3).into())
            ]
        );
    }

    #[test]
    fn quadratic_system_cascade() {
        // n0^2 + 4 n0 + 3 = 0, q1 (n0 + 3) = 0, q0 = 0.
        let n0 = MPoly::var(3, 0);
        let q1 = MPoly::var(3, 1);
        let q0 = MPoly::var(3, 2);
        let eq1 = n0
            .mul(&n0)
            .add(&n0.mul_scalar(&BigRational::from_integer(4.into())))
            .add(&MPoly::from_int(3, 3));
        let eq2 = q1.mul(&n0.add(&MPoly::from_int(3, 3)));
        let eq3 = q0.clone();
        let sols = solve_quadratic_system(&[eq1, eq2, eq3], 3, 8);
        assert!(!sols.is_empty());
        assert_eq!(sols[0][0], BigRational::from_integer((-1).into()));
    }
}
