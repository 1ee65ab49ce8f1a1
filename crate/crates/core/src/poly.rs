//! Sparse multivariate polynomials over ℤ and ℚ with the operations a CAD
//! needs: dense views in one variable, exact division, gcd, principal
//! subresultant coefficients, resultants, discriminants and disc evaluation.
//!
//! Variables are indexed `0..nvars`; higher indices are "later" variables,
//! so the main variable of a polynomial is the highest index it involves.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::arith::Disc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("not univariate in variable {0}")]
    NotUnivariate(usize),
}

/// Exponent vector. Ordered lexicographically with the last variable most
/// significant, so the largest monomial carries the top power of the main
/// variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(SmallVec<[u32; 4]>);

impl Mono {
    pub fn one(n: usize) -> Self {
        Mono(SmallVec::from_elem(0, n))
    }

    pub fn var(n: usize, i: usize, e: u32) -> Self {
        let mut m = Self::one(n);
        m.0[i] = e;
        m
    }

    pub fn from_exps(e: &[u32]) -> Self {
        Mono(SmallVec::from_slice(e))
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn deg(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(o.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn checked_div(&self, o: &Mono) -> Option<Mono> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(o.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Mono(out))
    }

    fn with(&self, i: usize, e: u32) -> Mono {
        let mut m = self.clone();
        m.0[i] = e;
        m
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient rings: ℤ and ℚ.
pub trait Coeff: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn signum(&self) -> i32;
    /// Quotient when `o` divides `self` in the ring.
    fn exact_div(&self, o: &Self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn to_rational(&self) -> BigRational;
    fn pow(&self, e: u32) -> Self {
        num_traits::pow::pow(Wrap(self.clone()), e as usize).0
    }
}

#[derive(Clone)]
struct Wrap<C>(C);

impl<C: Coeff> std::ops::Mul for Wrap<C> {
    type Output = Wrap<C>;
    fn mul(self, o: Self) -> Self {
        Wrap(self.0.mul(&o.0))
    }
}

impl<C: Coeff> One for Wrap<C> {
    fn one() -> Self {
        Wrap(C::one())
    }
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn signum(&self) -> i32 {
        if Signed::is_negative(self) {
            -1
        } else if Zero::is_zero(self) {
            0
        } else {
            1
        }
    }
    fn exact_div(&self, o: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(o);
        if Zero::is_zero(&r) {
            Some(q)
        } else {
            None
        }
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn signum(&self) -> i32 {
        if Signed::is_negative(self) {
            -1
        } else if Zero::is_zero(self) {
            0
        } else {
            1
        }
    }
    fn exact_div(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn gcd(&self, o: &Self) -> Self {
        let n = Integer::gcd(self.numer(), o.numer());
        let d = Integer::lcm(self.denom(), o.denom());
        BigRational::new(n, d)
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Mono, C>,
}

pub type PolyZ = Poly<BigInt>;
pub type PolyQ = Poly<BigRational>;

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn from_i64(nvars: usize, v: i64) -> Self {
        Self::constant(nvars, C::from_i64(v))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Mono::var(nvars, i, 1), C::one())
    }

    pub fn monomial(m: Mono, c: C) -> Self {
        let mut p = Self::zero(m.0.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Mono, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars);
            p.add_term(m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn as_constant(&self) -> Option<C> {
        if self.is_zero() {
            Some(C::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Mono, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Degree in variable `i`; `None` for the zero polynomial.
    pub fn degree(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.deg(i)).max()
    }

    pub fn deg(&self, i: usize) -> u32 {
        self.degree(i).unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.deg(i) > 0)
    }

    /// Highest-index variable that occurs.
    pub fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&i| self.involves(i))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.0.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Largest term in the monomial order.
    pub fn leading_term(&self) -> Option<(&Mono, &C)> {
        self.terms.iter().next_back()
    }

    /// Sign of the leading term's coefficient.
    pub fn leading_sign(&self) -> i32 {
        self.leading_term().map_or(0, |(_, c)| c.signum())
    }

    pub fn neg(&self) -> Self {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut r = big.clone();
        for (m, c) in &small.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), &c.neg());
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.nvars);
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        let mut acc: BTreeMap<Mono, C> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                match acc.entry(m) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let s = e.get().add(&c);
                        *e.get_mut() = s;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { nvars: self.nvars, terms: acc }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        if c.is_one() {
            return self.clone();
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiply by `x_i^e`.
    pub fn shift_var(&self, i: usize, e: u32) -> Self {
        if e == 0 {
            return self.clone();
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.with(i, m.deg(i) + e), c.clone())).collect(),
        }
    }

    /// Coefficients with respect to `x_i`, index = power. Empty for zero.
    pub fn coeffs_in(&self, i: usize) -> Vec<Self> {
        let Some(d) = self.degree(i) else {
            return Vec::new();
        };
        let mut out = vec![Self::zero(self.nvars); d as usize + 1];
        for (m, c) in &self.terms {
            out[m.deg(i) as usize].terms.insert(m.with(i, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, i: usize, coeffs: &[Self]) -> Self {
        let mut p = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                debug_assert_eq!(m.deg(i), 0);
                p.terms.insert(m.with(i, k as u32), x.clone());
            }
        }
        p
    }

    pub fn leading_coeff(&self, i: usize) -> Self {
        self.coeffs_in(i).pop().unwrap_or_else(|| Self::zero(self.nvars))
    }

    /// Lowest-degree nonzero coefficient with respect to `x_i`.
    pub fn trailing_coeff(&self, i: usize) -> Self {
        self.coeffs_in(i).into_iter().find(|c| !c.is_zero()).unwrap_or_else(|| Self::zero(self.nvars))
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.deg(i);
            if e > 0 {
                p.add_term(m.with(i, e - 1), &c.mul(&C::from_i64(e as i64)));
            }
        }
        p
    }

    pub fn derivative_n(&self, i: usize, order: u32) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative(i))
    }

    /// Replace `x_i` by the constant `v`; the variable slot stays (unused).
    pub fn substitute(&self, i: usize, v: &C) -> Self {
        let coeffs = self.coeffs_in(i);
        let mut acc = Self::zero(self.nvars);
        for c in coeffs.iter().rev() {
            acc = acc.scale(v).add(c);
        }
        acc
    }

    /// Replace each variable `x_i` by `images[i]` (all with a common arity).
    pub fn compose(&self, images: &[Self]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let n = images.first().map_or(0, |p| p.nvars);
        let mut pows: Vec<Vec<Self>> = images.iter().map(|p| vec![Self::one(n), p.clone()]).collect();
        let mut acc = Self::zero(n);
        for (m, c) in &self.terms {
            let mut t = Self::constant(n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while pows[i].len() <= e as usize {
                    let next = pows[i].last().unwrap().mul(&images[i]);
                    pows[i].push(next);
                }
                t = t.mul(&pows[i][e as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Re-index variables: variable `i` becomes `map[i]` in a ring of `n` variables.
    /// Variables mapped to `None` must not occur.
    pub fn remap(&self, n: usize, map: &[Option<usize>]) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in &self.terms {
            let mut e = Mono::one(n);
            for (i, &d) in m.0.iter().enumerate() {
                if d > 0 {
                    let j = map[i].expect("remapped variable occurs in polynomial");
                    e.0[j] += d;
                }
            }
            p.add_term(e, c);
        }
        p
    }

    /// Keep only the listed variables, in the listed order.
    pub fn select_vars(&self, keep: &[usize]) -> Self {
        let mut map = vec![None; self.nvars];
        for (j, &i) in keep.iter().enumerate() {
            map[i] = Some(j);
        }
        self.remap(keep.len(), &map)
    }

    /// Embed into a ring with `n >= nvars` variables (new variables appended).
    pub fn extend_vars(&self, n: usize) -> Self {
        let map: Vec<Option<usize>> = (0..self.nvars).map(Some).collect();
        self.remap(n, &map)
    }

    pub fn eval(&self, vals: &[C]) -> C {
        assert!(vals.len() >= self.nvars);
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&vals[i].pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Exact quotient `self / d` when it exists in the coefficient ring.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.as_constant() {
            let mut q = Self::zero(self.nvars);
            for (m, x) in &self.terms {
                q.terms.insert(m.clone(), x.exact_div(&c)?);
            }
            return Some(q);
        }
        let (lm, lc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut r = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((m, c)) = r.leading_term() {
            let tm = m.checked_div(&lm)?;
            let tc = c.exact_div(&lc)?;
            for (dm, dc) in &d.terms {
                r.add_term(dm.mul(&tm), &dc.mul(&tc).neg());
            }
            q.terms.insert(tm, tc);
        }
        Some(q)
    }

    /// Divide by a known factor; panics if the division is not exact.
    pub fn div(&self, d: &Self) -> Self {
        self.div_exact(d).expect("inexact polynomial division")
    }

    /// gcd of all coefficients (as ring elements).
    pub fn coeff_content(&self) -> C {
        let mut g = C::zero();
        // no early exit at one: a later denominator can still lower it
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        g
    }
}

impl PolyQ {
    /// Write `self = s * z` with `z` an integer polynomial of content one whose
    /// leading term is positive.
    pub fn to_primitive_z(&self) -> (BigRational, PolyZ) {
        if self.is_zero() {
            return (<BigRational as One>::one(), PolyZ::zero(self.nvars));
        }
        let mut s = self.coeff_content();
        if self.leading_sign() < 0 {
            s = -s;
        }
        let z = PolyZ {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let q = c / &s;
                    debug_assert!(q.is_integer());
                    (m.clone(), q.to_integer())
                })
                .collect(),
        };
        (s, z)
    }

    /// Integer-primitive normal form with positive leading term.
    pub fn normalized(&self) -> PolyQ {
        self.to_primitive_z().1.to_q()
    }

    pub fn from_z(p: &PolyZ) -> PolyQ {
        p.to_q()
    }

    /// Enclosure of the value at the given discs. Rational coefficients are
    /// enclosed with relative precision `2^-p`.
    pub fn eval_discs(&self, args: &[Disc], p: u64) -> Disc {
        let k = args.len();
        assert!(self.main_var().map_or(true, |v| v < k), "disc evaluation arity mismatch");
        if k == 0 || self.is_constant() {
            let c = self.as_constant().unwrap();
            return Disc::from_rational(&c, p);
        }
        eval_rec(self, args, k - 1, p)
    }
}

fn eval_rec(f: &PolyQ, args: &[Disc], v: usize, p: u64) -> Disc {
    if let Some(c) = f.as_constant() {
        return Disc::from_rational(&c, p);
    }
    let coeffs = f.coeffs_in(v);
    let evald: Vec<Disc> = coeffs
        .iter()
        .map(|c| if v == 0 { Disc::from_rational(&c.as_constant().unwrap(), p) } else { eval_rec(c, args, v - 1, p) })
        .collect();
    crate::arith::horner(&evald, &args[v])
}

impl PolyZ {
    pub fn to_q(&self) -> PolyQ {
        PolyQ {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), BigRational::from_integer(c.clone()))).collect(),
        }
    }

    /// Divide out the integer content and make the leading term positive.
    pub fn primitive_int(&self) -> PolyZ {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.coeff_content();
        if self.leading_sign() < 0 {
            g = -g;
        }
        self.div_exact(&PolyZ::constant(self.nvars, g)).unwrap()
    }

    /// Content with respect to `x_i`: gcd of the coefficients in `x_i`.
    pub fn content_in(&self, i: usize) -> PolyZ {
        let coeffs = self.coeffs_in(i);
        let mut nonzero: Vec<&PolyZ> = coeffs.iter().filter(|c| !c.is_zero()).collect();
        if nonzero.is_empty() {
            return PolyZ::zero(self.nvars);
        }
        nonzero.sort_by_key(|c| (c.num_terms(), c.total_degree()));
        let mut g = nonzero[0].clone();
        for c in &nonzero[1..] {
            if g.is_constant() {
                break;
            }
            g = gcd_z(&g, c);
        }
        if g.is_constant() {
            // integer content of the coefficients
            let mut ig = <BigInt as Zero>::zero();
            for c in &nonzero {
                ig = Integer::gcd(&ig, &c.coeff_content());
            }
            return PolyZ::constant(self.nvars, ig);
        }
        g
    }

    pub fn primitive_part_in(&self, i: usize) -> PolyZ {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(i);
        let p = self.div(&c);
        if p.leading_sign() < 0 {
            p.neg()
        } else {
            p
        }
    }
}

/// gcd over ℤ[x], normalized to a positive leading term.
pub fn gcd_z(a: &PolyZ, b: &PolyZ) -> PolyZ {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    let n = a.nvars;
    let va = a.main_var();
    let vb = b.main_var();
    let v = match (va, vb) {
        (None, None) => {
            let g = Integer::gcd(&a.as_constant().unwrap(), &b.as_constant().unwrap());
            return PolyZ::constant(n, g);
        }
        (Some(x), None) | (None, Some(x)) => x,
        (Some(x), Some(y)) => x.max(y),
    };
    if !a.involves(v) {
        return gcd_z(a, &b.content_in(v));
    }
    if !b.involves(v) {
        return gcd_z(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let gc = gcd_z(&ca, &cb);
    let pa = a.div(&ca);
    let pb = b.div(&cb);
    let (pa, pb) = if pa.deg(v) >= pb.deg(v) { (pa, pb) } else { (pb, pa) };
    let chain = subresultant_prs(&to_dense(&pa, v), &to_dense(&pb, v));
    let last = chain.prs.last().unwrap();
    let g = if last.len() <= 1 {
        PolyZ::one(n)
    } else {
        from_dense(n, v, last).primitive_part_in(v)
    };
    normalize_sign(g.mul(&gc))
}

fn normalize_sign(p: PolyZ) -> PolyZ {
    if p.leading_sign() < 0 {
        p.neg()
    } else {
        p
    }
}

pub fn gcd_q(a: &PolyQ, b: &PolyQ) -> PolyQ {
    gcd_z(&a.to_primitive_z().1, &b.to_primitive_z().1).to_q()
}

type Dense = Vec<PolyZ>;

fn to_dense(p: &PolyZ, v: usize) -> Dense {
    p.coeffs_in(v)
}

fn from_dense(n: usize, v: usize, d: &[PolyZ]) -> PolyZ {
    PolyZ::from_coeffs_in(n, v, d)
}

fn dense_deg(a: &Dense) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

fn trim(a: &mut Dense) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
fn prem(a: &Dense, b: &Dense) -> Dense {
    let db = dense_deg(b).expect("prem by zero");
    let mut r = a.clone();
    trim(&mut r);
    let Some(da) = dense_deg(&r) else {
        return r;
    };
    if da < db {
        return r;
    }
    let lcb = &b[db];
    let mut e = (da - db + 1) as u32;
    while let Some(dr) = dense_deg(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lcb);
        }
        for (k, bc) in b.iter().enumerate().take(db + 1) {
            if !bc.is_zero() {
                r[k + shift] = r[k + shift].sub(&bc.mul(&lr));
            }
        }
        r[dr] = PolyZ::zero(lr.nvars());
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = lcb.pow(e);
        for c in r.iter_mut() {
            *c = c.mul(&f);
        }
    }
    r
}

struct Subresultants {
    /// The subresultant PRS, starting with the two inputs.
    prs: Vec<Dense>,
    /// Principal subresultant coefficients at the degrees of `prs[1..]`.
    scalars: Vec<PolyZ>,
}

/// Brown's subresultant PRS over ℤ[other variables]. Requires `deg f >= deg g >= 0`
/// and `g != 0`.
fn subresultant_prs(f: &Dense, g: &Dense) -> Subresultants {
    let mut f = f.clone();
    let mut g = g.clone();
    trim(&mut f);
    trim(&mut g);
    let nv = f[0].nvars();
    let n = dense_deg(&f).unwrap();
    let m = dense_deg(&g).unwrap();
    debug_assert!(n >= m);
    let one = PolyZ::one(nv);
    let mut prs = vec![f.clone(), g.clone()];
    let mut d = n - m;
    let b = if (d + 1) % 2 == 0 { one.clone() } else { one.neg() };
    let mut h = prem(&f, &g);
    for c in h.iter_mut() {
        *c = c.mul(&b);
    }
    trim(&mut h);
    let mut lc = g[m].clone();
    let mut c = lc.pow(d as u32);
    let mut scalars = vec![c.clone()];
    c = c.neg();
    let mut f_;
    let mut g_ = g;
    let mut m_ = m;
    while !h.is_empty() {
        let k = dense_deg(&h).unwrap();
        prs.push(h.clone());
        f_ = g_;
        g_ = h;
        d = m_ - k;
        m_ = k;
        let b = lc.neg().mul(&c.pow(d as u32));
        let mut r = prem(&f_, &g_);
        for x in r.iter_mut() {
            *x = x.div(&b);
        }
        trim(&mut r);
        h = r;
        lc = g_[k].clone();
        if d > 1 {
            let q = c.pow(d as u32 - 1);
            c = lc.neg().pow(d as u32).div(&q);
        } else {
            c = lc.neg();
        }
        scalars.push(c.neg());
    }
    Subresultants { prs, scalars }
}

/// Principal subresultant coefficients of `g` and `h` with respect to `x_var`
/// (Sylvester-minor convention). Returns `psc_0, ..., psc_{deg h}` when
/// `deg g > deg h`, and `psc_0, ..., psc_{d-1}` when both have degree `d`.
pub fn psc_sequence(g: &PolyQ, h: &PolyQ, var: usize) -> Vec<PolyQ> {
    let n = g.nvars();
    let dg = g.deg(var) as usize;
    let dh = h.deg(var) as usize;
    assert!(dg >= 1 && !h.is_zero() && dh <= dg, "psc_sequence needs deg g >= deg h");
    if dh == dg {
        // Row-reduce the h rows against the g rows: h' = lc(g) h - lc(h) g has lower
        // degree e, and psc_j(g, h) = lc(g)^(j-e) psc_j(g, h') for j <= e, zero above.
        let lg = g.leading_coeff(var);
        let hr = h.mul(&lg).sub(&g.mul(&h.leading_coeff(var)));
        let mut out = vec![PolyQ::zero(n); dg];
        if hr.is_zero() {
            return out;
        }
        let e = hr.deg(var) as usize;
        let inner = psc_sequence(g, &hr, var);
        for (j, pj) in inner.into_iter().enumerate() {
            out[j] = pj.div(&lg.pow((e - j) as u32));
        }
        return out;
    }
    let (sg, zg) = g.to_primitive_z();
    let (sh, zh) = h.to_primitive_z();
    let chain = subresultant_prs(&to_dense(&zg, var), &to_dense(&zh, var));
    let mut out = vec![PolyQ::zero(n); dh + 1];
    for (poly, s) in chain.prs[1..].iter().zip(chain.scalars.iter()) {
        let j = dense_deg(poly).unwrap();
        // psc_j(sg*G, sh*H) = sg^(dh-j) * sh^(dg-j) * psc_j(G, H)
        let f = Coeff::pow(&sg, (dh - j) as u32).mul(&Coeff::pow(&sh, (dg - j) as u32));
        out[j] = s.to_q().scale(&f);
    }
    out
}

/// Resultant with respect to `x_var`.
pub fn resultant(f: &PolyQ, g: &PolyQ, var: usize) -> Result<PolyQ, PolyError> {
    let n = f.nvars();
    let df = f.deg(var);
    let dg = g.deg(var);
    if f.is_zero() || g.is_zero() {
        return Ok(PolyQ::zero(n));
    }
    if df == 0 && dg == 0 {
        return Err(PolyError::NotUnivariate(var));
    }
    if dg == 0 {
        return Ok(g.pow(df));
    }
    if df == 0 {
        return Ok(f.pow(dg));
    }
    if df < dg {
        let r = resultant(g, f, var)?;
        return Ok(if (df * dg) % 2 == 1 { r.neg() } else { r });
    }
    let (sf, zf) = f.to_primitive_z();
    let (sg, zg) = g.to_primitive_z();
    let chain = subresultant_prs(&to_dense(&zf, var), &to_dense(&zg, var));
    let last = chain.prs.last().unwrap();
    if dense_deg(last).unwrap() > 0 {
        return Ok(PolyQ::zero(n));
    }
    let r = chain.scalars.last().unwrap().to_q();
    let f_ = Coeff::pow(&sf, dg).mul(&Coeff::pow(&sg, df));
    Ok(r.scale(&f_))
}

/// Discriminant `(-1)^(n(n-1)/2) Res(f, f') / lc(f)` with respect to `x_var`.
pub fn discriminant(f: &PolyQ, var: usize) -> Result<PolyQ, PolyError> {
    let n = f.deg(var);
    if n == 0 {
        return Err(PolyError::NotUnivariate(var));
    }
    if n == 1 {
        return Ok(PolyQ::one(f.nvars()));
    }
    let r = resultant(f, &f.derivative(var), var)?;
    let r = r.div(&f.leading_coeff(var));
    Ok(if (n * (n - 1) / 2) % 2 == 1 { r.neg() } else { r })
}

/// `f / gcd(f, df/dx_var)`, made primitive over the remaining variables.
pub fn squarefree_part(f: &PolyQ, var: usize) -> PolyQ {
    let (_, z) = f.to_primitive_z();
    if z.deg(var) == 0 {
        return z.to_q();
    }
    let pp = z.primitive_part_in(var);
    let g = gcd_z(&pp, &pp.derivative(var));
    pp.div(&g).primitive_part_in(var).to_q()
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i + 1)).collect();
        f.write_str(&self.to_string_with(&names))
    }
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<C: Coeff> Poly<C> {
    /// Render with the given variable names, highest terms first.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.signum() < 0;
            let a = if neg { c.neg() } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            let coef = a.to_string();
            let coef = if coef.contains('/') { format!("({coef})") } else { coef };
            if factors.is_empty() {
                out.push_str(&coef);
            } else if a.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&format!("{}*{}", coef, factors.join("*")));
            }
        }
        out
    }
}

/// Convenience constructor for tests and callers building polynomials from
/// `(coefficient, exponents)` pairs.
pub fn poly_q(nvars: usize, terms: &[(i64, &[u32])]) -> PolyQ {
    PolyQ::from_terms(nvars, terms.iter().map(|(c, e)| (Mono::from_exps(e), BigRational::from_integer(BigInt::from(*c)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Dyadic, GaussianDyadic};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qi(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn x(n: usize, i: usize) -> PolyQ {
        PolyQ::var(n, i)
    }

    fn c(n: usize, v: i64) -> PolyQ {
        PolyQ::from_i64(n, v)
    }

    /// Determinant over ℚ[x] by fraction-free cofactor expansion (small sizes).
    fn det(m: &[Vec<PolyQ>], n: usize) -> PolyQ {
        let k = m.len();
        if k == 0 {
            return PolyQ::one(n);
        }
        if k == 1 {
            return m[0][0].clone();
        }
        let mut acc = PolyQ::zero(n);
        for j in 0..k {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<PolyQ>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|(t, _)| *t != j).map(|(_, v)| v.clone()).collect()).collect();
            let term = m[0][j].mul(&det(&minor, n));
            acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    /// psc_j as a determinant of the leading square block of the j-th
    /// Sylvester submatrix.
    fn psc_oracle(a: &PolyQ, b: &PolyQ, var: usize, j: usize) -> PolyQ {
        let n = a.nvars();
        let ac = a.coeffs_in(var);
        let bc = b.coeffs_in(var);
        let (m, l) = (ac.len() - 1, bc.len() - 1);
        let size = m + l - 2 * j;
        let width = m + l - j;
        let mut rows = Vec::new();
        for i in 0..(l - j) {
            let mut row = vec![PolyQ::zero(n); width];
            for (t, cf) in ac.iter().rev().enumerate() {
                row[i + t] = cf.clone();
            }
            rows.push(row);
        }
        for i in 0..(m - j) {
            let mut row = vec![PolyQ::zero(n); width];
            for (t, cf) in bc.iter().rev().enumerate() {
                row[i + t] = cf.clone();
            }
            rows.push(row);
        }
        let sq: Vec<Vec<PolyQ>> = rows.iter().map(|r| r[..size].to_vec()).collect();
        det(&sq, n)
    }

    fn random_uni(rng: &mut ChaCha8Rng, deg: usize, sparse: bool) -> PolyQ {
        let mut terms = Vec::new();
        for e in 0..=deg {
            let mut v = rng.gen_range(-128i64..128);
            if e == deg && v == 0 {
                v = 1;
            }
            if sparse && e < deg && rng.gen_bool(0.5) {
                v = 0;
            }
            terms.push((Mono::from_exps(&[e as u32]), qi(v)));
        }
        PolyQ::from_terms(1, terms)
    }

    #[test]
    fn specialize_examples() {
        let n = 2;
        let f = x(n, 0).pow(2).add(&x(n, 1).pow(2));
        assert_eq!(f.substitute(1, &qi(0)), x(n, 0).pow(2));
        // z^2 + z(y+2x) + xy at x = 1/2
        let (xx, yy, zz) = (x(3, 0), x(3, 1), x(3, 2));
        let f = zz.pow(2).add(&zz.mul(&yy.add(&xx.scale(&qi(2))))).add(&xx.mul(&yy));
        let half = BigRational::new(1.into(), 2.into());
        let want = zz.pow(2).add(&zz.mul(&yy.add(&c(3, 1)))).add(&yy.scale(&half));
        assert_eq!(f.substitute(0, &half), want);
        let g = x(1, 0).mul(&x(1, 0).pow(4).sub(&c(1, 1)));
        assert!(g.substitute(0, &qi(1)).is_zero());
    }

    #[test]
    fn eval_on_discs_examples() {
        let z = Disc::new(GaussianDyadic::real(Dyadic::from_f64(1.5)), Dyadic::from_f64(0.25));
        let f = x(1, 0).pow(2).sub(&c(1, 2));
        let r = f.eval_discs(&[z.clone()], 53);
        // image of [5/4, 7/4] under x^2 - 2 is [-7/16, 17/16]
        assert!(r.contains_real_rational(&BigRational::new((-7).into(), 16.into())));
        assert!(r.contains_real_rational(&BigRational::new(17.into(), 16.into())));
        assert!(r.contains_real_rational(&BigRational::new((-1).into(), 16.into())));
        let five = c(2, 5).eval_discs(&[z.clone(), z.clone()], 53);
        assert_eq!(five, Disc::from_i64(5));
        let eps = Dyadic::pow2(-20);
        let a = Disc::new(GaussianDyadic::from_i64(1), eps.clone());
        let b = Disc::new(GaussianDyadic::from_i64(-1), eps.clone());
        let s = x(2, 0).add(&x(2, 1)).eval_discs(&[a, b], 53);
        assert_eq!(s, Disc::new(GaussianDyadic::zero(), eps.mul_pow2(1)));
    }

    #[test]
    fn eval_on_discs_contains_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = x(2, 0).pow(3).mul(&x(2, 1)).sub(&x(2, 1).pow(2).scale(&qi(3))).add(&c(2, 7));
        for _ in 0..200 {
            let a = Disc::new(
                GaussianDyadic::new(Dyadic::from_f64(rng.gen_range(-2.0..2.0)), Dyadic::from_f64(rng.gen_range(-1.0..1.0))),
                Dyadic::from_f64(rng.gen_range(0.0..0.5)),
            );
            let b = Disc::new(GaussianDyadic::from_i64(1), Dyadic::from_f64(0.125));
            let r = f.eval_discs(&[a.clone(), b.clone()], 53);
            for _ in 0..20 {
                let t = rng.gen_range(0.0..1.0f64);
                let ang = rng.gen_range(0.0..6.28f64);
                let pa = GaussianDyadic::new(
                    &a.center.re + &Dyadic::from_f64(a.radius.to_f64() * t * ang.cos() * 0.999),
                    &a.center.im + &Dyadic::from_f64(a.radius.to_f64() * t * ang.sin() * 0.999),
                );
                let pb = GaussianDyadic::real(&b.center.re + &Dyadic::from_f64(0.125 * (2.0 * t - 1.0)));
                let val = &(&(&(&pa * &pa) * &pa) * &pb) - &(&(&pb * &pb) * &GaussianDyadic::from_i64(3));
                let val = &val + &GaussianDyadic::from_i64(7);
                assert!(r.contains_point(&val));
            }
        }
    }

    #[test]
    fn psc_examples() {
        let z = x(1, 0);
        let p = psc_sequence(&z.pow(2).sub(&c(1, 1)), &z.scale(&qi(2)), 0);
        assert_eq!(p[0], c(1, -4));
        assert_eq!(p[0], psc_oracle(&z.pow(2).sub(&c(1, 1)), &z.scale(&qi(2)), 0, 0));
        let p = psc_sequence(&z.pow(2), &z.scale(&qi(2)), 0);
        assert!(p[0].is_zero());
        assert_eq!(p[1], c(1, 2));
        // (z - x)^2 and 2(z - x) over Q[x]; z is variable 1
        let d = x(2, 1).sub(&x(2, 0));
        let p = psc_sequence(&d.pow(2), &d.scale(&qi(2)), 1);
        assert!(p[0].is_zero());
        assert_eq!(p[1], c(2, 2));
    }

    #[test]
    fn psc_matches_sylvester_minors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for trial in 0..100 {
            let dg = rng.gen_range(1..=5);
            let dh = rng.gen_range(0..dg);
            let g = random_uni(&mut rng, dg, trial % 3 == 0);
            let mut h = random_uni(&mut rng, dh, trial % 3 == 1);
            if trial % 5 == 0 {
                // force a common factor
                let common = random_uni(&mut rng, 1, false);
                let g2 = g.mul(&common);
                h = h.mul(&common);
                if h.deg(0) >= g2.deg(0) {
                    continue;
                }
                let p = psc_sequence(&g2, &h, 0);
                for j in 0..=h.deg(0) as usize {
                    assert_eq!(p[j], psc_oracle(&g2, &h, 0, j), "trial {trial} j {j}");
                }
                continue;
            }
            let p = psc_sequence(&g, &h, 0);
            for j in 0..=dh {
                assert_eq!(p[j], psc_oracle(&g, &h, 0, j), "trial {trial} j {j}");
            }
        }
    }

    #[test]
    fn psc_equal_degrees_matches_minors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4321);
        for trial in 0..60 {
            let d = rng.gen_range(1..=4);
            let mut g = random_uni(&mut rng, d, trial % 2 == 0);
            let mut h = random_uni(&mut rng, d, trial % 3 == 0);
            if trial % 4 == 0 {
                let common = random_uni(&mut rng, 1, false);
                g = g.mul(&common);
                h = h.mul(&common);
            }
            if trial % 7 == 0 {
                // proportional inputs: every psc below the degree vanishes
                h = g.scale(&qi(-3));
            }
            let p = psc_sequence(&g, &h, 0);
            assert_eq!(p.len(), g.deg(0) as usize);
            for (j, pj) in p.iter().enumerate() {
                assert_eq!(*pj, psc_oracle(&g, &h, 0, j), "trial {trial} j {j}");
            }
        }
        // bivariate: equal degree in y with coefficients in Q[x]
        let (xx, yy) = (x(2, 0), x(2, 1));
        let g = yy.pow(2).sub(&xx);
        let h = yy.pow(2).scale(&qi(2)).add(&yy.mul(&xx)).sub(&c(2, 1));
        let p = psc_sequence(&g, &h, 1);
        for j in 0..2 {
            assert_eq!(p[j], psc_oracle(&g, &h, 1, j));
        }
    }

    #[test]
    fn psc_multivariate_matches_minors() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let mut rp = |deg_y: u32| {
                let mut terms = Vec::new();
                for ey in 0..=deg_y {
                    for ex in 0..=2u32 {
                        let v = rng.gen_range(-5i64..6);
                        terms.push((Mono::from_exps(&[ex, ey]), qi(v)));
                    }
                }
                terms.push((Mono::from_exps(&[0, deg_y]), qi(1)));
                PolyQ::from_terms(2, terms)
            };
            let g = rp(3);
            let h = rp(2);
            if g.deg(1) != 3 || h.deg(1) != 2 {
                continue;
            }
            let p = psc_sequence(&g, &h, 1);
            for j in 0..=2 {
                assert_eq!(p[j], psc_oracle(&g, &h, 1, j));
            }
        }
    }

    #[test]
    fn resultant_sign_and_equal_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let da = rng.gen_range(1..=4);
            let db = rng.gen_range(1..=4);
            let a = random_uni(&mut rng, da, false);
            let b = random_uni(&mut rng, db, false);
            let r = resultant(&a, &b, 0).unwrap();
            // Sylvester determinant
            let want = {
                let ac = a.coeffs_in(0);
                let bc = b.coeffs_in(0);
                let (m, l) = (ac.len() - 1, bc.len() - 1);
                let size = m + l;
                let mut rows = Vec::new();
                for i in 0..l {
                    let mut row = vec![PolyQ::zero(1); size];
                    for (t, cf) in ac.iter().rev().enumerate() {
                        row[i + t] = cf.clone();
                    }
                    rows.push(row);
                }
                for i in 0..m {
                    let mut row = vec![PolyQ::zero(1); size];
                    for (t, cf) in bc.iter().rev().enumerate() {
                        row[i + t] = cf.clone();
                    }
                    rows.push(row);
                }
                det(&rows, 1)
            };
            assert_eq!(r, want);
        }
        assert_eq!(resultant(&c(1, 2), &c(1, 3), 0), Err(PolyError::NotUnivariate(0)));
    }

    #[test]
    fn discriminant_example() {
        let (xx, yy, zz) = (x(3, 0), x(3, 1), x(3, 2));
        let f = zz.pow(2).add(&zz.mul(&yy.add(&xx.scale(&qi(2))))).add(&xx.mul(&yy));
        let d = discriminant(&f, 2).unwrap();
        assert_eq!(d, yy.pow(2).add(&xx.pow(2).scale(&qi(4))));
        let circle = x(2, 0).pow(2).add(&x(2, 1).pow(2)).sub(&c(2, 1));
        assert_eq!(discriminant(&circle, 1).unwrap(), x(2, 0).pow(2).sub(&c(2, 1)).scale(&qi(-4)));
    }

    #[test]
    fn content_sees_late_denominators() {
        let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
        // the fraction at either end of the term order
        for top in [true, false] {
            let mut cs = vec![qi(2), qi(3), qi(5)];
            if top {
                cs.push(half.clone());
            } else {
                cs.insert(0, half.clone());
            }
            let p = PolyQ::from_terms(1, cs.into_iter().enumerate().map(|(e, c)| (Mono::from_exps(&[e as u32]), c)));
            let (s, z) = p.to_primitive_z();
            assert_eq!(s.abs(), BigRational::new(BigInt::from(1), BigInt::from(2)));
            assert_eq!(z.to_q().scale(&s), p);
        }
    }

    #[test]
    fn resultant_of_circles() {
        let (xx, yy) = (x(2, 0), x(2, 1));
        let f = xx.pow(2).add(&yy.pow(2)).sub(&c(2, 1));
        let g = xx.sub(&c(2, 1)).pow(2).add(&yy.sub(&c(2, 1)).pow(2)).sub(&c(2, 1));
        let r = resultant(&f, &g, 1).unwrap();
        assert!(!r.involves(1));
        let sf = squarefree_part(&r, 0);
        // Intersections at (1,0) and (0,1): squarefree resultant is x(x-1) up to scale.
        assert_eq!(sf, xx.mul(&xx.sub(&c(2, 1))));
    }

    #[test]
    fn squarefree_examples() {
        let z = x(1, 0);
        assert_eq!(squarefree_part(&z.pow(2), 0), z);
        let f = z.sub(&c(1, 1)).pow(3).mul(&z.add(&c(1, 2))).scale(&qi(6));
        let s = squarefree_part(&f, 0);
        assert_eq!(s, z.sub(&c(1, 1)).mul(&z.add(&c(1, 2))));
        assert!(f.div_exact(&s).is_some());
        let p = psc_sequence(&s, &s.derivative(0), 0);
        assert!(!p[0].is_zero());
        // multivariate: (y - x)^2 (y + 1) made primitive in y
        let (xx, yy) = (x(2, 0), x(2, 1));
        let f = yy.sub(&xx).pow(2).mul(&yy.add(&c(2, 1))).mul(&xx.add(&c(2, 3)));
        assert_eq!(squarefree_part(&f, 1), yy.sub(&xx).mul(&yy.add(&c(2, 1))));
    }

    #[test]
    fn gcd_and_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let mut rp = || {
                let mut terms = Vec::new();
                for _ in 0..4 {
                    let e = [rng.gen_range(0..3u32), rng.gen_range(0..3u32)];
                    terms.push((Mono::from_exps(&e), qi(rng.gen_range(-4i64..5))));
                }
                PolyQ::from_terms(2, terms)
            };
            let a = rp();
            let b = rp();
            let g = rp();
            if g.is_constant() || a.is_zero() || b.is_zero() {
                continue;
            }
            let ga = a.mul(&g);
            let gb = b.mul(&g);
            let h = gcd_q(&ga, &gb);
            assert!(h.div_exact(&g.normalized()).is_some() || g.normalized().div_exact(&h).is_none());
            assert!(ga.div_exact(&h).is_some() && gb.div_exact(&h).is_some());
            assert_eq!(ga.div(&a), g);
        }
    }

    #[test]
    fn compose_linear_substitution() {
        // xy + xz + yz with y -> y + z
        let (xx, yy, zz) = (x(3, 0), x(3, 1), x(3, 2));
        let f = xx.mul(&yy).add(&xx.mul(&zz)).add(&yy.mul(&zz));
        let g = f.compose(&[xx.clone(), yy.add(&zz), zz.clone()]);
        let want = zz.pow(2).add(&zz.mul(&yy.add(&xx.scale(&qi(2))))).add(&xx.mul(&yy));
        assert_eq!(g, want);
    }

    #[test]
    fn display() {
        let (xx, yy) = (x(2, 0), x(2, 1));
        let f = yy.pow(2).sub(&xx.mul(&xx.pow(4).sub(&c(2, 1))));
        assert_eq!(f.to_string_with(&["x".into(), "y".into()]), "y^2 - x^5 + x");
    }
}
