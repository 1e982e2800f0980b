//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms are kept in a map ordered by graded-lexicographic monomial order,
//! so equal polynomials are structurally equal. The number of variables is
//! dynamic: the jet kernel uses four slots (x, u, p, q), prolongation adds a
//! fifth internal slot, and the synthesis solvers allocate small spaces for
//! undetermined coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Exponent vector. Ordering is graded lex: total degree first, ties broken
/// lexicographically with the first variable most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise division; `None` when `other` does not divide `self`.
    fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Mono(out))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients. Stored coefficients
/// are never zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Mono, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono(vec![0; nvars]), c);
        }
        p
    }

    pub fn from_int(nvars: usize, n: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(n)))
    }

    /// The monomial `v^k` with coefficient one.
    pub fn var_pow(nvars: usize, v: usize, k: u32) -> Self {
        assert!(v < nvars);
        let mut exps = vec![0; nvars];
        exps[v] = k;
        let mut p = Self::zero(nvars);
        p.terms.insert(Mono(exps), BigRational::one());
        p
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        Self::var_pow(nvars, v, 1)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars);
            p.add_term(Mono(exps), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_unit() && c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(Mono::is_unit)
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn mul_term(&self, m: &Mono, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            out.terms.insert(ma.mul(m), ca * c);
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact partial derivative with respect to variable `v`.
    pub fn partial(&self, v: usize) -> MPoly {
        assert!(v < self.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[v] = e - 1;
            out.add_term(Mono(exps), c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term *= &point[v];
                }
            }
            acc += term;
        }
        acc
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    /// Coefficient of `v^k`, as a polynomial with the `v`-exponent cleared.
    pub fn coeff_of_power(&self, v: usize, k: u32) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[v] == k {
                let mut exps = m.0.clone();
                exps[v] = 0;
                out.add_term(Mono(exps), c.clone());
            }
        }
        out
    }

    /// All coefficients by powers of `v`, index = exponent.
    pub fn coeffs_in(&self, v: usize) -> Vec<MPoly> {
        let d = self.degree_in(v);
        (0..=d).map(|k| self.coeff_of_power(v, k)).collect()
    }

    /// Leading coefficient viewed as a univariate polynomial in `v`.
    pub fn lead_coeff_in(&self, v: usize) -> MPoly {
        self.coeff_of_power(v, self.degree_in(v))
    }

    /// Substitute polynomial `value` for variable `v`.
    pub fn subst(&self, v: usize, value: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, value.nvars);
        let d = self.degree_in(v);
        // Horner over the v-coefficients.
        let mut acc = MPoly::zero(self.nvars);
        for k in (0..=d).rev() {
            acc = acc.mul(value).add(&self.coeff_of_power(v, k));
        }
        acc
    }

    /// Reinterpret in a space with `n >= nvars` variables (new slots unused).
    pub fn extend_to(&self, n: usize) -> MPoly {
        assert!(n >= self.nvars);
        let mut out = MPoly::zero(n);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.resize(n, 0);
            out.terms.insert(Mono(exps), c.clone());
        }
        out
    }

    /// Drop trailing unused slots; `None` when a dropped slot is in use.
    pub fn restrict_to(&self, n: usize) -> Option<MPoly> {
        assert!(n <= self.nvars);
        let mut out = MPoly::zero(n);
        for (m, c) in &self.terms {
            if m.0[n..].iter().any(|&e| e > 0) {
                return None;
            }
            out.terms.insert(Mono(m.0[..n].to_vec()), c.clone());
        }
        Some(out)
    }

    /// Swap two variable slots.
    pub fn swap_vars(&self, a: usize, b: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.swap(a, b);
            out.terms.insert(Mono(exps), c.clone());
        }
        out
    }

    /// Exact division; `None` when the division does not come out even.
    pub fn exact_div(&self, divisor: &MPoly) -> Option<MPoly> {
        debug_assert_eq!(self.nvars, divisor.nvars);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(MPoly::zero(self.nvars));
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.mul_scalar(&(BigRational::one() / c)));
        }
        let (dm, dc) = divisor.leading().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.nvars);
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            let t = divisor.mul_term(&qm, &qc);
            quot.add_term(qm, qc);
            rem = rem.sub(&t);
        }
        Some(quot)
    }

    /// Scale to integer coefficients with content 1 and positive leading
    /// coefficient.
    pub fn integer_primitive(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * &den_lcm / c.denom();
            num_gcd = num_gcd.gcd(&n);
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        let mut scale = BigRational::new(den_lcm, num_gcd);
        if self.leading_coeff().is_negative() {
            scale = -scale;
        }
        self.mul_scalar(&scale)
    }

    /// Content with respect to variable `v`: the gcd of the `v`-coefficients.
    fn content_in(&self, v: usize) -> MPoly {
        let mut g = MPoly::zero(self.nvars);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Pseudo-remainder of `self` by `g` in variable `v`:
    /// `lc(g)^(deg(self)-deg(g)+1) * self mod g`.
    fn pseudo_rem(&self, g: &MPoly, v: usize) -> MPoly {
        let dg = g.degree_in(v);
        let df = self.degree_in(v);
        assert!(dg <= df && !g.is_zero());
        let lg = g.lead_coeff_in(v);
        let mut r = self.mul(&lg.pow(df - dg + 1));
        while !r.is_zero() && r.degree_in(v) >= dg {
            let dr = r.degree_in(v);
            let lr = r.lead_coeff_in(v);
            let q = lr
                .exact_div(&lg)
                .expect("pseudo-remainder coefficient division is exact");
            let shift = MPoly::var_pow(self.nvars, v, dr - dg);
            r = r.sub(&q.mul(&shift).mul(g));
            if r.degree_in(v) == dr && !r.coeff_of_power(v, dr).is_zero() {
                // no progress would loop forever
                unreachable!("pseudo-division failed to reduce degree");
            }
        }
        r
    }

    /// Perfect-square root, if one exists.
    pub fn sqrt(&self) -> Option<MPoly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading().unwrap();
        if lm.0.iter().any(|e| e % 2 != 0) {
            return None;
        }
        let lc_sqrt = rational_sqrt(lc)?;
        let half = Mono(lm.0.iter().map(|e| e / 2).collect());
        let mut root = MPoly::zero(self.nvars);
        root.terms.insert(half, lc_sqrt);
        loop {
            let rem = self.sub(&root.mul(&root));
            if rem.is_zero() {
                return Some(root);
            }
            let (rm, rc) = rem.leading().unwrap();
            let (sm, sc) = root.leading().unwrap();
            let qm = rm.div(sm)?;
            let qc = rc / (sc * BigRational::from_integer(BigInt::from(2)));
            if Mono::cmp(&qm, &root.terms.keys().next_back().unwrap().clone()) == Ordering::Greater
            {
                return None;
            }
            let before = root.clone();
            root.add_term(qm, qc);
            if root == before {
                return None;
            }
        }
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl MPoly {
    /// Componentwise-minimum exponent vector across all terms.
    fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let first = it.next().expect("nonzero polynomial").0.clone();
        let mins = it.fold(first, |mut acc, m| {
            for (a, b) in acc.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
            acc
        });
        Mono(mins)
    }

    fn div_monomial(&self, m: &Mono) -> MPoly {
        if m.is_unit() {
            return self.clone();
        }
        let mut out = MPoly::zero(self.nvars);
        for (mono, c) in &self.terms {
            out.terms
                .insert(mono.div(m).expect("monomial content divides"), c.clone());
        }
        out
    }

    fn mul_monomial(&self, m: &Mono) -> MPoly {
        if m.is_unit() {
            return self.clone();
        }
        let mut out = MPoly::zero(self.nvars);
        for (mono, c) in &self.terms {
            out.terms.insert(mono.mul(m), c.clone());
        }
        out
    }
}

/// Multivariate gcd over the rationals. The result has integer coefficients,
/// content 1 and positive leading coefficient; constants collapse to 1.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    debug_assert_eq!(a.nvars(), b.nvars());
    if a.is_zero() {
        return b.integer_primitive();
    }
    if b.is_zero() {
        return a.integer_primitive();
    }
    // Shared monomial factor comes off first; it also covers the pure
    // monomial cases without any polynomial work.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let shared = Mono(ma.0.iter().zip(&mb.0).map(|(x, y)| *x.min(y)).collect());
    if !shared.is_unit() || !ma.is_unit() || !mb.is_unit() {
        let a = a.div_monomial(&ma);
        let b = b.div_monomial(&mb);
        return gcd(&a, &b).mul_monomial(&shared);
    }
    let a = a.integer_primitive();
    let b = b.integer_primitive();
    if a.is_constant() || b.is_constant() {
        return MPoly::one(a.nvars());
    }
    if a == b {
        return a;
    }
    // Exact-divisibility shortcut: chains of fraction arithmetic mostly hit
    // pairs where one side divides the other.
    if a.num_terms() <= b.num_terms() && b.exact_div(&a).is_some() {
        return a;
    }
    if b.num_terms() < a.num_terms() && a.exact_div(&b).is_some() {
        return b;
    }
    // Main variable: common variable minimizing the smaller degree.
    let mut main = None;
    for v in 0..a.nvars() {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da > 0 && db > 0 {
            let key = da.min(db);
            if main.map(|(_, k)| key < k).unwrap_or(true) {
                main = Some((v, key));
            }
        }
    }
    let Some((v, _)) = main else {
        return MPoly::one(a.nvars());
    };

    let cont_a = a.content_in(v);
    let cont_b = b.content_in(v);
    let pp_a = a.exact_div(&cont_a).expect("content divides");
    let pp_b = b.exact_div(&cont_b).expect("content divides");
    let cont_gcd = gcd(&cont_a, &cont_b);

    let prs = subresultant_prs(&pp_a, &pp_b, v);
    let raw = match prs {
        Some(g) => g,
        None => return cont_gcd, // coprime primitive parts
    };
    let raw = raw.exact_div(&raw.content_in(v)).expect("content divides");
    raw.integer_primitive().mul(&cont_gcd)
}

/// Last nonzero element of the subresultant PRS, or `None` when the primitive
/// parts are coprime (constant final remainder).
fn subresultant_prs(f: &MPoly, g: &MPoly, v: usize) -> Option<MPoly> {
    let nv = f.nvars();
    let (mut a, mut b) = if f.degree_in(v) >= g.degree_in(v) {
        (f.clone(), g.clone())
    } else {
        (g.clone(), f.clone())
    };
    let mut gg = MPoly::one(nv);
    let mut h = MPoly::one(nv);
    loop {
        let delta = a.degree_in(v) - b.degree_in(v);
        let r = a.pseudo_rem(&b, v);
        if r.is_zero() {
            if b.degree_in(v) == 0 {
                return None;
            }
            return Some(b);
        }
        if r.degree_in(v) == 0 {
            return None;
        }
        let divisor = gg.mul(&h.pow(delta));
        let r = r
            .exact_div(&divisor)
            .expect("subresultant division is exact");
        a = b;
        b = r;
        gg = a.lead_coeff_in(v);
        // h = g^delta / h^(delta-1)
        h = if delta == 0 {
            h
        } else {
            gg.pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant h-update is exact")
        };
    }
}

/// Least common multiple, normalized like `gcd`.
pub fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero(a.nvars());
    }
    let g = gcd(a, b);
    a.exact_div(&g)
        .expect("gcd divides")
        .mul(b)
        .integer_primitive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    // 4-slot helpers: x=0, u=1, p=2, q=3
    fn x() -> MPoly {
        MPoly::var(4, 0)
    }
    fn u() -> MPoly {
        MPoly::var(4, 1)
    }
    fn p() -> MPoly {
        MPoly::var(4, 2)
    }
    fn q() -> MPoly {
        MPoly::var(4, 3)
    }

    #[test]
    fn grlex_ordering() {
        // q < p < u < x at equal degree; degree dominates.
        assert!(Mono(vec![0, 0, 0, 1]) < Mono(vec![0, 0, 1, 0]));
        assert!(Mono(vec![0, 0, 1, 0]) < Mono(vec![0, 1, 0, 0]));
        assert!(Mono(vec![1, 0, 0, 0]) > Mono(vec![0, 1, 0, 0]));
        assert!(Mono(vec![0, 0, 0, 2]) > Mono(vec![1, 0, 0, 0]));
    }

    #[test]
    fn arithmetic_basics() {
        let s = x().add(&u());
        let sq = s.mul(&s);
        let expanded = x()
            .mul(&x())
            .add(&x().mul(&u()).mul_scalar(&r(2)))
            .add(&u().mul(&u()));
        assert_eq!(sq, expanded);
        assert!(s.sub(&s).is_zero());
        assert_eq!(s.pow(2), sq);
    }

    #[test]
    fn partial_and_eval() {
        // d/dq (3 q^2 p) = 6 q p
        let f = q().pow(2).mul(&p()).mul_scalar(&r(3));
        let d = f.partial(3);
        assert_eq!(d, q().mul(&p()).mul_scalar(&r(6)));
        let pt = [r(0), r(0), r(1), r(2)];
        assert_eq!(f.eval(&pt), r(12));
    }

    #[test]
    fn exact_division() {
        let num = q().pow(2).sub(&p().pow(2));
        let den = q().sub(&p());
        let quot = num.exact_div(&den).unwrap();
        assert_eq!(quot, q().add(&p()));
        assert!(q().exact_div(&p()).is_none());
    }

    #[test]
    fn gcd_difference_of_squares() {
        let a = q().pow(2).sub(&p().pow(2));
        let b = q().sub(&p());
        let g = gcd(&a, &b);
        // normalized with positive leading coefficient (p > q in grlex)
        assert_eq!(g, p().sub(&q()));
    }

    #[test]
    fn gcd_multivariate_content() {
        // gcd(x*u*(x+u), x^2*(x+u)^2) = x*(x+u)
        let s = x().add(&u());
        let a = x().mul(&u()).mul(&s);
        let b = x().pow(2).mul(&s.pow(2));
        let g = gcd(&a, &b);
        assert_eq!(g, x().mul(&s));
    }

    #[test]
    fn gcd_coprime() {
        let g = gcd(&x().add(&u()), &p().add(&q()));
        assert!(g.is_one());
    }

    #[test]
    fn integer_primitive_normalizes() {
        let f = x().mul_scalar(&BigRational::new(BigInt::from(-2), BigInt::from(3)));
        let g = f.integer_primitive();
        assert_eq!(g, x());

        let h = x().mul_scalar(&r(4)).add(&u().mul_scalar(&r(6)));
        assert_eq!(
            h.integer_primitive(),
            x().mul_scalar(&r(2)).add(&u().mul_scalar(&r(3)))
        );
    }

    #[test]
    fn subst_horner() {
        // (q^2 + q + 1) with q := p+1
        let f = q().pow(2).add(&q()).add(&MPoly::one(4));
        let v = p().add(&MPoly::one(4));
        let s = f.subst(3, &v);
        let expect = v.pow(2).add(&v).add(&MPoly::one(4));
        assert_eq!(s, expect);
    }

    #[test]
    fn perfect_square_root() {
        let s = x().add(&u()).pow(2).mul_scalar(&r(9));
        let root = s.sqrt().unwrap();
        assert_eq!(root, x().add(&u()).mul_scalar(&r(3)));
        assert!(x().add(&u()).sqrt().is_none());
    }

    #[test]
    fn lcm_of_monomials() {
        let l = lcm(&x().mul(&u()), &u().mul(&p()));
        assert_eq!(l, x().mul(&u()).mul(&p()));
    }
}
