//! Independent oracles for the acceptance suite: exact univariate arithmetic
//! over ℚ with Sturm sequences, and a 256-bit Durand–Kerner root finder.

#![allow(dead_code)]

use cadadj::arith::{Dyadic, GaussianDyadic, Round};
use cadadj::poly::PolyQ;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Dense univariate polynomial, lowest coefficient first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct U(pub Vec<Q>);

impl U {
    pub fn new(mut c: Vec<Q>) -> U {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        U(c)
    }

    pub fn from_ints(c: &[i64]) -> U {
        U::new(c.iter().map(|&v| q(v)).collect())
    }

    pub fn zero() -> U {
        U(vec![])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn lc(&self) -> &Q {
        self.0.last().unwrap()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut v = Q::zero();
        for c in self.0.iter().rev() {
            v = v * x + c;
        }
        v
    }

    pub fn add(&self, o: &U) -> U {
        let n = self.0.len().max(o.0.len());
        U::new((0..n).map(|i| self.0.get(i).cloned().unwrap_or_default() + o.0.get(i).cloned().unwrap_or_default()).collect())
    }

    pub fn neg(&self) -> U {
        U(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &U) -> U {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &U) -> U {
        if self.is_zero() || o.is_zero() {
            return U::zero();
        }
        let mut c = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        U::new(c)
    }

    pub fn scale(&self, s: &Q) -> U {
        U::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn derivative(&self) -> U {
        U::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }

    pub fn div_rem(&self, d: &U) -> (U, U) {
        assert!(!d.is_zero());
        let mut r = self.0.clone();
        let dd = d.0.len() - 1;
        if r.len() <= dd {
            return (U::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] / d.lc();
            for (j, b) in d.0.iter().enumerate() {
                r[k + j] -= &c * b;
            }
            quo[k] = c;
        }
        (U::new(quo), U::new(r))
    }

    pub fn monic(&self) -> U {
        if self.is_zero() {
            return U::zero();
        }
        let l = self.lc().clone();
        self.scale(&(Q::one() / l))
    }

    pub fn gcd(&self, o: &U) -> U {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree(&self) -> U {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// `∏ g_i^i`, returned as `(g_i, i)` with nonconstant `g_i` (Yun).
    pub fn squarefree_decomposition(&self) -> Vec<(U, usize)> {
        let mut out = Vec::new();
        let f = self.monic();
        let d = f.derivative();
        let a0 = f.gcd(&d);
        let mut b = f.div_rem(&a0).0;
        let mut c = d.div_rem(&a0).0;
        let mut dd = c.sub(&b.derivative());
        let mut i = 1;
        while b.deg() > 0 {
            let a = b.gcd(&dd);
            if a.deg() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = dd.div_rem(&a).0;
            dd = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// View a polynomial that involves only variable `var` as univariate.
    pub fn from_poly(p: &PolyQ, var: usize) -> U {
        let mut c: Vec<Q> = Vec::new();
        for (m, a) in p.terms() {
            for (i, &e) in m.exps().iter().enumerate() {
                assert!(i == var || e == 0, "polynomial involves another variable");
            }
            let e = m.exps()[var] as usize;
            if c.len() <= e {
                c.resize(e + 1, Q::zero());
            }
            c[e] += a;
        }
        U::new(c)
    }
}

fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub struct Sturm(Vec<U>);

impl Sturm {
    pub fn new(p: &U) -> Sturm {
        let mut s = vec![p.clone(), p.derivative()];
        while !s.last().unwrap().is_zero() {
            let n = s.len();
            let r = s[n - 2].div_rem(&s[n - 1]).1.neg();
            s.push(r);
        }
        s.pop();
        Sturm(s)
    }

    fn changes(&self, x: &Q) -> usize {
        let signs: Vec<i32> = self.0.iter().map(|p| sign(&p.eval(x))).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Q, b: &Q) -> usize {
        self.changes(a) - self.changes(b)
    }
}

/// Bound on the absolute value of every root.
pub fn root_bound(p: &U) -> Q {
    let l = p.lc().abs();
    let m = p.0.iter().map(|c| c.abs()).max().unwrap();
    Q::one() + m / l
}

/// A real root of a squarefree polynomial, as an isolating interval `(a, b]`.
#[derive(Clone, Debug)]
pub struct RealRoot {
    pub p: U,
    pub a: Q,
    pub b: Q,
}

impl RealRoot {
    pub fn mid(&self) -> Q {
        (&self.a + &self.b) / q(2)
    }

    pub fn width(&self) -> Q {
        &self.b - &self.a
    }

    pub fn bisect(&mut self, s: &Sturm) {
        let m = self.mid();
        if s.count(&self.a, &m) == 1 {
            self.b = m;
        } else {
            self.a = m;
        }
    }

    pub fn refine_to(&mut self, w: &Q) {
        let s = Sturm::new(&self.p);
        while &self.width() > w {
            self.bisect(&s);
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_f64(&self.mid())
    }

    /// `t(α) = 0`, decided exactly through `gcd(p, t)`.
    pub fn is_root_of(&self, t: &U) -> bool {
        if t.is_zero() {
            return true;
        }
        let g = self.p.gcd(t);
        g.deg() > 0 && Sturm::new(&g).count(&self.a, &self.b) == 1
    }

    /// Sign of `t(α)`, exactly.
    pub fn sign_of(&self, t: &U) -> i32 {
        if self.is_root_of(t) {
            return 0;
        }
        let mut r = self.clone();
        let sp = Sturm::new(&self.p);
        let st = Sturm::new(&t.squarefree());
        while st.count(&r.a, &r.b) > 0 {
            r.bisect(&sp);
        }
        sign(&t.eval(&r.b))
    }
}

/// All real roots of `p` (of its squarefree part), increasing.
pub fn real_roots(p: &U) -> Vec<RealRoot> {
    let p = p.squarefree();
    if p.deg() < 1 {
        return vec![];
    }
    let s = Sturm::new(&p);
    let bnd = root_bound(&p);
    let mut todo = vec![(-bnd.clone(), bnd)];
    let mut out = Vec::new();
    while let Some((a, b)) = todo.pop() {
        match s.count(&a, &b) {
            0 => {}
            1 => out.push(RealRoot { p: p.clone(), a, b }),
            _ => {
                let m = (&a + &b) / q(2);
                todo.push((a, m.clone()));
                todo.push((m, b));
            }
        }
    }
    out.sort_by(|x, y| x.a.cmp(&y.a));
    out
}

pub fn rat_f64(x: &Q) -> f64 {
    Dyadic::from_rational(x, 64, Round::Nearest).to_f64()
}

pub fn f64_rat(x: f64) -> Q {
    Q::from_float(x).unwrap()
}

/// Polynomial in `y` with coefficients in `x`: `c[k]` multiplies `y^k`.
pub fn as_bivariate(p: &PolyQ) -> Vec<U> {
    assert_eq!(p.nvars(), 2);
    let mut c: Vec<Vec<Q>> = Vec::new();
    for (m, a) in p.terms() {
        let (i, k) = (m.exps()[0] as usize, m.exps()[1] as usize);
        if c.len() <= k {
            c.resize(k + 1, Vec::new());
        }
        if c[k].len() <= i {
            c[k].resize(i + 1, Q::zero());
        }
        c[k][i] += a;
    }
    c.into_iter().map(U::new).collect()
}

/// `p(x0, y)` as a polynomial in `y`.
pub fn at_x(p: &[U], x0: &Q) -> U {
    U::new(p.iter().map(|c| c.eval(x0)).collect())
}

// ---- 256-bit Durand–Kerner ----

pub const ORACLE_BITS: u64 = 256;

fn rnd(z: GaussianDyadic) -> GaussianDyadic {
    z.round(ORACLE_BITS, Round::Nearest)
}

fn cdiv(a: &GaussianDyadic, b: &GaussianDyadic) -> GaussianDyadic {
    let den = b.norm_sq();
    let num = a * &b.conj();
    GaussianDyadic::new(
        Dyadic::div(&num.re, &den, ORACLE_BITS, Round::Nearest),
        Dyadic::div(&num.im, &den, ORACLE_BITS, Round::Nearest),
    )
}

/// Roots of a squarefree integer polynomial to about 256 bits.
pub fn durand_kerner(p: &U) -> Vec<GaussianDyadic> {
    let p = p.monic();
    let n = p.deg() as usize;
    let c: Vec<GaussianDyadic> = p
        .0
        .iter()
        .map(|x| GaussianDyadic::real(Dyadic::from_rational(x, ORACLE_BITS + 64, Round::Nearest)))
        .collect();
    let r = Dyadic::from_rational(&root_bound(&p), 64, Round::Up);
    let seed = GaussianDyadic::new(Dyadic::from_f64(0.4), Dyadic::from_f64(0.9));
    let mut z: Vec<GaussianDyadic> = Vec::with_capacity(n);
    let mut w = GaussianDyadic::one();
    for _ in 0..n {
        w = rnd(&w * &seed);
        z.push(rnd(w.scale(&r)));
    }
    let tol = r.ilog2().unwrap_or(0) - ORACLE_BITS as i64 + 16;
    for _ in 0..5000 {
        let mut done = true;
        for j in 0..n {
            let mut v = GaussianDyadic::zero();
            for a in c.iter().rev() {
                v = rnd(&(&v * &z[j]) + a);
            }
            let mut den = GaussianDyadic::one();
            for i in 0..n {
                if i != j {
                    den = rnd(&den * &(&z[j] - &z[i]));
                }
            }
            if den.is_zero() {
                z[j] = rnd(&z[j] + &GaussianDyadic::new(Dyadic::from_f64(1e-3), Dyadic::from_f64(1e-3)));
                done = false;
                continue;
            }
            let d = cdiv(&v, &den);
            z[j] = rnd(&z[j] - &d);
            if d.ilog2().is_some_and(|l| l > tol) {
                done = false;
            }
        }
        if done {
            return z;
        }
    }
    panic!("oracle root finder did not converge");
}

/// Roots of an integer polynomial with multiplicities.
pub fn oracle_roots(p: &U) -> Vec<(GaussianDyadic, usize)> {
    let mut out = Vec::new();
    for (g, m) in p.squarefree_decomposition() {
        for z in durand_kerner(&g) {
            out.push((z, m));
        }
    }
    out
}

/// `|z - c| <= r`, evaluated exactly on the dyadic values.
pub fn in_disc(z: &GaussianDyadic, c: &GaussianDyadic, r: &Dyadic) -> bool {
    (z - c).norm_sq() <= r * r
}
