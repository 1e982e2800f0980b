//! Shared fixtures for the integration suites: the worked right-hand
//! sides, a deterministic family of nondegenerate point transformations,
//! and seeded random expression generators.

use maxsym_core::{parse, PointTransform, RationalExpr};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn e(s: &str) -> RationalExpr {
    parse(s).unwrap()
}

/// Right-hand side of the first worked example (the nonlinear equation
/// linearized by (x, -1/(x u))).
pub fn example_31_rhs() -> RationalExpr {
    e("(6*p/u + 3/x)*q - 6*p^3/u^2 - 6*p^2/(x*u) - 6*p/x^2 - 6*u/x^3")
}

pub fn example_32_rhs() -> RationalExpr {
    e("3*q^2/(1+p)")
}

pub fn example_33_rhs() -> RationalExpr {
    e("3/2*q^2/p")
}

fn templates() -> Vec<PointTransform> {
    let specs: &[(&str, &str)] = &[
        ("x", "u"),
        ("x + 1", "2*u"),
        ("2*x", "u - 3"),
        ("x", "u + x"),
        ("x + u", "u"),
        ("u", "x"),
        ("x + u", "-x"),
        ("x - u", "u"),
        ("x + 2*u", "u - x"),
        ("x", "-1/(x*u)"),
        ("x", "1/u"),
        ("1/x", "u/x"),
        ("x", "x*u"),
        ("x", "u^2"),
        ("x^2", "u"),
        ("x", "u + x^2"),
    ];
    specs
        .iter()
        .map(|(phi, psi)| PointTransform::new(e(phi), e(psi)).expect("template nondegenerate"))
        .collect()
}

/// Deterministic family of nondegenerate transformations: the template
/// list followed by pairwise compositions (depth 2), deduplicated,
/// truncated to `count`.
pub fn generated_transforms(count: usize) -> Vec<PointTransform> {
    let base = templates();
    let mut out: Vec<PointTransform> = Vec::new();
    let mut push = |t: PointTransform, out: &mut Vec<PointTransform>| {
        if out
            .iter()
            .all(|s| s.phi() != t.phi() || s.psi() != t.psi())
        {
            out.push(t);
        }
    };
    for t in &base {
        push(t.clone(), &mut out);
    }
    'outer: for a in &base {
        for b in &base {
            if out.len() >= count {
                break 'outer;
            }
            if let Ok(c) = a.compose(b) {
                push(c, &mut out);
            }
        }
    }
    out.truncate(count);
    assert!(out.len() >= count, "template family too small");
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_poly(rng: &mut ChaCha8Rng, max_terms: usize, max_total_degree: i64) -> RationalExpr {
    let x = RationalExpr::var(maxsym_core::JetVar::X);
    let u = RationalExpr::var(maxsym_core::JetVar::U);
    let p = RationalExpr::var(maxsym_core::JetVar::P);
    let q = RationalExpr::var(maxsym_core::JetVar::Q);
    let vars = [x, u, p, q];
    let nterms = rng.gen_range(1..=max_terms);
    let mut acc = RationalExpr::zero();
    for _ in 0..nterms {
        let c: i64 = rng.gen_range(-5..=5);
        if c == 0 {
            continue;
        }
        let mut term = RationalExpr::from_int(c);
        let mut budget = max_total_degree;
        for v in &vars {
            let e: i64 = rng.gen_range(0..=budget.min(2));
            if e > 0 {
                term = &term * &v.powi(e).unwrap();
                budget -= e;
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// Random rational expression with a nonzero denominator.
pub fn random_expr(rng: &mut ChaCha8Rng) -> RationalExpr {
    let num = random_poly(rng, 3, 6);
    loop {
        let den = random_poly(rng, 2, 4);
        if !den.is_zero() {
            return &num / &den;
        }
    }
}

/// Small right-hand sides suitable for full invariant computations, which
/// differentiate twice along solutions: polynomial numerators of low total
/// degree over a denominator that is 1 or a short low-degree polynomial.
pub fn random_small_rhs(rng: &mut ChaCha8Rng) -> RationalExpr {
    let num = random_poly(rng, 3, 2);
    if rng.gen_bool(0.5) {
        return num;
    }
    loop {
        let den = random_poly(rng, 2, 1);
        if !den.is_zero() && !den.is_constant() {
            return &num / &den;
        }
    }
}

/// Random evaluation point avoiding the denominators of the given
/// expressions; resamples until all are defined.
pub fn random_point(rng: &mut ChaCha8Rng, avoid: &[&RationalExpr]) -> [BigRational; 4] {
    loop {
        let point: [BigRational; 4] = std::array::from_fn(|_| {
            BigRational::new(
                BigInt::from(rng.gen_range(-20i64..=20)),
                BigInt::from(rng.gen_range(1i64..=7)),
            )
        });
        if avoid.iter().all(|e| e.eval(&point).is_ok()) {
            return point;
        }
    }
}
