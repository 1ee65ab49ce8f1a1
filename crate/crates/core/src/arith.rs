//! Dyadic rationals, Gaussian dyadics and circular complex intervals (discs).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Significant bits kept in disc radii after each operation.
pub const RADIUS_BITS: u64 = 64;

/// Significant bits of the certified square roots behind `min_abs`/`max_abs`.
const ABS_BITS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// A number `mant * 2^exp`, kept with an odd mantissa (zero is `0 * 2^0`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `floor(m / 2^k)` plus the direction-dependent correction.
fn shift_round(m: &BigInt, k: u64, dir: Round) -> BigInt {
    if k == 0 {
        return m.clone();
    }
    let (q, r) = m.div_mod_floor(&pow2(k));
    if r.is_zero() {
        return q;
    }
    match dir {
        Round::Down => q,
        Round::Up => q + 1,
        Round::Nearest => {
            if r.bits() == k {
                // r >= 2^(k-1)
                q + 1
            } else {
                q
            }
        }
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic { mant: mant >> tz, exp: exp + tz as i64 }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite double");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if e == 0 { (frac, -1074) } else { (frac | (1 << 52), e - 1075) };
        Self::new(BigInt::from(sign * m), e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.mant.is_zero() {
            0
        } else if self.mant.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)`; `None` for zero.
    pub fn ilog2(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64 - 1)
        }
    }

    /// `x * 2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), pow2((-self.exp) as u64))
        }
    }

    pub fn is_integer(&self) -> bool {
        self.is_zero() || self.exp >= 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = self.mant.bits();
        let (m, e) = if b > 60 {
            let k = b - 60;
            ((&self.mant >> k).to_f64().unwrap_or(0.0), self.exp + k as i64)
        } else {
            (self.mant.to_f64().unwrap_or(0.0), self.exp)
        };
        ldexp(m, e)
    }

    /// Round to at most `bits` significant bits in direction `dir`.
    pub fn round(&self, bits: u64, dir: Round) -> Self {
        let b = self.mant.bits();
        if b <= bits {
            return self.clone();
        }
        let k = b - bits;
        Self::new(shift_round(&self.mant, k, dir), self.exp + k as i64)
    }

    /// Round to an integer multiple of `2^e` in direction `dir`.
    pub fn round_to_exp(&self, e: i64, dir: Round) -> Self {
        if self.is_zero() || self.exp >= e {
            return self.clone();
        }
        let k = (e - self.exp) as u64;
        Self::new(shift_round(&self.mant, k, dir), e)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_round(&self.mant, (-self.exp) as u64, Round::Down)
        }
    }

    /// Dyadic approximation of a rational with `bits` significant bits.
    pub fn from_rational(q: &BigRational, bits: u64, dir: Round) -> Self {
        let n = q.numer();
        let d = q.denom();
        if n.is_zero() {
            return Self::zero();
        }
        if d.trailing_zeros() == Some(d.bits() - 1) {
            let e = -((d.bits() - 1) as i64);
            return Self::new(n.clone(), e).round(bits.max(1), dir);
        }
        let e = n.bits() as i64 - d.bits() as i64;
        let s = bits as i64 + 2 - e;
        let (num, den) = if s >= 0 {
            (n << s as u64, d.clone())
        } else {
            (n.clone(), d << (-s) as u64)
        };
        let (qt, r) = num.div_mod_floor(&den);
        let m = if r.is_zero() {
            qt
        } else {
            match dir {
                Round::Down => qt,
                Round::Up => qt + 1,
                Round::Nearest => {
                    if (r << 1u32) >= den {
                        qt + 1
                    } else {
                        qt
                    }
                }
            }
        };
        Self::new(m, -s)
    }

    /// `a / b` to `bits` significant bits, rounded in direction `dir`.
    pub fn div(a: &Dyadic, b: &Dyadic, bits: u64, dir: Round) -> Self {
        assert!(!b.is_zero(), "division by zero");
        if a.is_zero() {
            return Self::zero();
        }
        let s = (bits as i64 + b.mant.bits() as i64 - a.mant.bits() as i64 + 2).max(0) as u64;
        let num = &a.mant << s;
        let (q, r) = num.div_mod_floor(&b.mant);
        let q = if r.is_zero() {
            q
        } else {
            match dir {
                Round::Down => q,
                Round::Up => q + 1,
                Round::Nearest => {
                    let twice = (r << 1u32).abs();
                    if twice >= b.mant.abs() {
                        q + 1
                    } else {
                        q
                    }
                }
            }
        };
        Self::new(q, a.exp - s as i64 - b.exp)
    }

    /// Certified bound on `x^(1/n)` for `x >= 0` with about `bits` significant bits.
    pub fn nth_root(&self, n: u32, bits: u64, dir: Round) -> Self {
        assert!(!self.is_negative(), "root of a negative number");
        assert!(n >= 1);
        if self.is_zero() || n == 1 {
            return self.clone();
        }
        let nb = self.mant.bits() as i64;
        let want = n as i64 * (bits as i64 + 2);
        let mut t = (want - nb).max(0);
        t += (self.exp - t).rem_euclid(n as i64);
        let m = &self.mant << t as u64;
        let root = m.nth_root(n);
        let exact = num_traits::pow(root.clone(), n as usize) == m;
        let root = if !exact && dir == Round::Up { root + 1 } else { root };
        Self::new(root, (self.exp - t) / n as i64)
    }

    pub fn sqrt(&self, bits: u64, dir: Round) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let nb = self.mant.bits() as i64;
        let mut t = (2 * (bits as i64 + 2) - nb).max(0);
        t += (self.exp - t).rem_euclid(2);
        let m = &self.mant << t as u64;
        let root = m.sqrt();
        let exact = &root * &root == m;
        let root = if !exact && dir == Round::Up { root + 1 } else { root };
        Self::new(root, (self.exp - t) / 2)
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Exact decimal expansion (dyadics always have one).
    pub fn to_decimal_exact(&self) -> String {
        if self.exp >= 0 {
            return (&self.mant << self.exp as u64).to_string();
        }
        let k = (-self.exp) as usize;
        let digits = (self.mant.abs() * num_traits::pow(BigInt::from(5), k)).to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        let (int, frac) = if digits.len() > k {
            (digits[..digits.len() - k].to_string(), digits[digits.len() - k..].to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(k - digits.len()), digits))
        };
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

fn ldexp(m: f64, e: i64) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

/// Decimal rendering of a rational with `digits` significant digits.
pub fn rational_to_decimal(q: &BigRational, digits: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let q = q.abs();
    let n = q.numer();
    let d = q.denom();
    // Find k with 10^(k-1) <= q < 10^k.
    let mut k: i64 = n.to_string().len() as i64 - d.to_string().len() as i64;
    let ten = BigInt::from(10);
    let scaled = |k: i64| -> BigRational {
        if k >= 0 {
            &q / BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            &q * BigRational::from_integer(num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while scaled(k) >= BigRational::one() {
        k += 1;
    }
    while scaled(k - 1) < BigRational::one() {
        k -= 1;
    }
    // q = 0.d1d2... * 10^k
    let s = scaled(k) * BigRational::from_integer(num_traits::pow(ten, digits));
    let m = (s + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let mut ds = m.to_string();
    let mut k = k;
    if ds.len() > digits {
        ds.truncate(digits);
        k += 1;
    }
    let sign = if neg { "-" } else { "" };
    let body = if k <= 0 {
        format!("0.{}{}", "0".repeat((-k) as usize), ds)
    } else if (k as usize) >= ds.len() {
        format!("{}{}", ds, "0".repeat(k as usize - ds.len()))
    } else {
        format!("{}.{}", &ds[..k as usize], &ds[k as usize..])
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    format!("{sign}{body}")
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_exact())
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes by bit length first.
        let la = self.exp + self.mant.bits() as i64;
        let lb = other.exp + other.mant.bits() as i64;
        if la != lb {
            let ord = la.cmp(&lb);
            return if sa > 0 { ord } else { ord.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &rhs.mant << (rhs.exp - e) as u64;
        Dyadic::new(a + b, e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // product of odd mantissas is odd
        Dyadic { mant: &self.mant * &rhs.mant, exp: self.exp + rhs.exp }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -self.mant, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &'a $t) -> $t {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Dyadic, Add, add);
forward_owned!(Dyadic, Sub, sub);
forward_owned!(Dyadic, Mul, mul);

/// A Gaussian rational with dyadic components.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianDyadic {
    pub re: Dyadic,
    pub im: Dyadic,
}

impl GaussianDyadic {
    pub fn new(re: Dyadic, im: Dyadic) -> Self {
        GaussianDyadic { re, im }
    }

    pub fn real(re: Dyadic) -> Self {
        GaussianDyadic { re, im: Dyadic::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Dyadic::one())
    }

    pub fn from_i64(v: i64) -> Self {
        Self::real(Dyadic::from_i64(v))
    }

    pub fn from_complex64(z: Complex64) -> Self {
        GaussianDyadic { re: Dyadic::from_f64(z.re), im: Dyadic::from_f64(z.im) }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianDyadic { re: self.re.clone(), im: -&self.im }
    }

    /// Exact `|z|^2`.
    pub fn norm_sq(&self) -> Dyadic {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        GaussianDyadic { re: self.re.mul_pow2(k), im: self.im.mul_pow2(k) }
    }

    pub fn scale(&self, s: &Dyadic) -> Self {
        GaussianDyadic { re: &self.re * s, im: &self.im * s }
    }

    /// Componentwise rounding to `bits` significant bits.
    pub fn round(&self, bits: u64, dir: Round) -> Self {
        GaussianDyadic { re: self.re.round(bits, dir), im: self.im.round(bits, dir) }
    }

    pub fn round_to_exp(&self, e: i64, dir: Round) -> Self {
        GaussianDyadic { re: self.re.round_to_exp(e, dir), im: self.im.round_to_exp(e, dir) }
    }

    /// Lower bound on `|z|`.
    pub fn abs_lower(&self) -> Dyadic {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        self.norm_sq().round(2 * ABS_BITS + 2, Round::Down).sqrt(ABS_BITS, Round::Down)
    }

    /// Upper bound on `|z|`.
    pub fn abs_upper(&self) -> Dyadic {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        self.norm_sq().round(2 * ABS_BITS + 2, Round::Up).sqrt(ABS_BITS, Round::Up).round(ABS_BITS, Round::Up)
    }

    /// Largest `floor(log2)` of the component magnitudes.
    pub fn ilog2(&self) -> Option<i64> {
        match (self.re.ilog2(), self.im.ilog2()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

impl fmt::Debug for GaussianDyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{:?}", self.re)
        } else {
            write!(f, "({:?} + {:?}i)", self.re, self.im)
        }
    }
}

impl<'a> Add<&'a GaussianDyadic> for &'a GaussianDyadic {
    type Output = GaussianDyadic;
    fn add(self, rhs: &GaussianDyadic) -> GaussianDyadic {
        GaussianDyadic { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a GaussianDyadic> for &'a GaussianDyadic {
    type Output = GaussianDyadic;
    fn sub(self, rhs: &GaussianDyadic) -> GaussianDyadic {
        GaussianDyadic { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussianDyadic> for &'a GaussianDyadic {
    type Output = GaussianDyadic;
    fn mul(self, rhs: &GaussianDyadic) -> GaussianDyadic {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianDyadic::real(&self.re * &rhs.re);
        }
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        GaussianDyadic { re, im }
    }
}

impl Neg for &GaussianDyadic {
    type Output = GaussianDyadic;
    fn neg(self) -> GaussianDyadic {
        GaussianDyadic { re: -&self.re, im: -&self.im }
    }
}

forward_owned!(GaussianDyadic, Add, add);
forward_owned!(GaussianDyadic, Sub, sub);
forward_owned!(GaussianDyadic, Mul, mul);

/// The closed disc `{ z : |z - center| <= radius }`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Disc {
    pub center: GaussianDyadic,
    pub radius: Dyadic,
}

fn round_radius(r: Dyadic) -> Dyadic {
    r.round(RADIUS_BITS, Round::Up)
}

impl Disc {
    pub fn new(center: GaussianDyadic, radius: Dyadic) -> Self {
        debug_assert!(!radius.is_negative(), "negative radius");
        Disc { center, radius }
    }

    pub fn exact(center: GaussianDyadic) -> Self {
        Disc { center, radius: Dyadic::zero() }
    }

    pub fn real_point(x: Dyadic) -> Self {
        Self::exact(GaussianDyadic::real(x))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_i64(v: i64) -> Self {
        Self::real_point(Dyadic::from_i64(v))
    }

    /// Enclosure of a rational with radius at most `2^-p * max(1, |q|)`;
    /// dyadic rationals are represented exactly.
    pub fn from_rational(q: &BigRational, p: u64) -> Self {
        let d = q.denom();
        if d.is_one() {
            return Self::real_point(Dyadic::from_bigint(q.numer().clone()));
        }
        if d.trailing_zeros() == Some(d.bits() - 1) {
            let e = -((d.bits() - 1) as i64);
            return Self::real_point(Dyadic::new(q.numer().clone(), e));
        }
        let mag = (q.numer().bits() as i64 - d.bits() as i64).max(0);
        let e = mag - p as i64 - 2;
        let center = Dyadic::from_rational(q, (p as i64 + 4 + mag).max(8) as u64, Round::Nearest)
            .round_to_exp(e, Round::Nearest);
        Disc { center: GaussianDyadic::real(center), radius: Dyadic::pow2(e) }
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn dbl(&self) -> Self {
        Disc { center: self.center.clone(), radius: self.radius.mul_pow2(1) }
    }

    pub fn quad(&self) -> Self {
        Disc { center: self.center.clone(), radius: self.radius.mul_pow2(2) }
    }

    pub fn conj(&self) -> Self {
        Disc { center: self.center.conj(), radius: self.radius.clone() }
    }

    pub fn scale_radius(&self, k: i64) -> Self {
        Disc { center: self.center.clone(), radius: self.radius.mul_pow2(k) }
    }

    /// Certified lower bound on `|z|` over the disc.
    pub fn min_abs(&self) -> Dyadic {
        let c = self.center.abs_lower();
        let m = &c - &self.radius;
        if m.is_positive() {
            m.round(ABS_BITS, Round::Down)
        } else {
            Dyadic::zero()
        }
    }

    /// Certified upper bound on `|z|` over the disc.
    pub fn max_abs(&self) -> Dyadic {
        (&self.center.abs_upper() + &self.radius).round(ABS_BITS, Round::Up)
    }

    pub fn contains_zero(&self) -> bool {
        self.center.norm_sq() <= &self.radius * &self.radius
    }

    pub fn contains_point(&self, z: &GaussianDyadic) -> bool {
        (z - &self.center).norm_sq() <= &self.radius * &self.radius
    }

    pub fn contains_real_rational(&self, q: &BigRational) -> bool {
        let dx = q - self.center.re.to_rational();
        let im = self.center.im.to_rational();
        let r = self.radius.to_rational();
        &dx * &dx + &im * &im <= &r * &r
    }

    /// `other` lies inside `self`.
    pub fn contains(&self, other: &Disc) -> bool {
        if other.radius > self.radius {
            return false;
        }
        let gap = &self.radius - &other.radius;
        (&self.center - &other.center).norm_sq() <= &gap * &gap
    }

    pub fn intersects(&self, other: &Disc) -> bool {
        let s = &self.radius + &other.radius;
        (&self.center - &other.center).norm_sq() <= &s * &s
    }

    pub fn meets_real_axis(&self) -> bool {
        self.center.im.abs() <= self.radius
    }

    /// The disc lies inside `Δ(0, r)`.
    pub fn within_radius(&self, r: &Dyadic) -> bool {
        if self.radius > *r {
            return false;
        }
        let gap = r - &self.radius;
        self.center.norm_sq() <= &gap * &gap
    }

    /// The disc meets `Δ(0, r)`.
    pub fn meets_origin_disc(&self, r: &Dyadic) -> bool {
        let s = r + &self.radius;
        self.center.norm_sq() <= &s * &s
    }

    /// Lower and upper real bounds of the disc's shadow on the real axis.
    pub fn real_bounds(&self) -> (Dyadic, Dyadic) {
        (&self.center.re - &self.radius, &self.center.re + &self.radius)
    }

    /// Round the center to a granularity well below the radius, absorbing the
    /// rounding error into the radius. Keeps mantissas from growing in long
    /// evaluation chains.
    pub fn tidy(&self) -> Self {
        let Some(lr) = self.radius.ilog2() else {
            return self.clone();
        };
        let e = lr - RADIUS_BITS as i64;
        let c = self.center.round_to_exp(e, Round::Nearest);
        if c == self.center {
            return self.clone();
        }
        Disc { center: c, radius: round_radius(&self.radius + &Dyadic::pow2(e)) }
    }

    /// A disc of radius at least `2^e` containing `self`, with its center on
    /// a `2^(e-2)` grid.
    pub fn widen_to(&self, e: i64) -> Self {
        let floor = Dyadic::pow2(e);
        if self.radius >= floor {
            return self.clone();
        }
        let c = self.center.round_to_exp(e - 2, Round::Nearest);
        Disc { center: c, radius: round_radius(&floor + &Dyadic::pow2(e - 2)) }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn mul_dyadic(&self, s: &Dyadic) -> Self {
        Disc { center: self.center.scale(s), radius: round_radius(&self.radius * &s.abs()) }
    }
}

impl fmt::Debug for Disc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Δ({:?}, {:?})", self.center, self.radius)
    }
}

impl<'a> Add<&'a Disc> for &'a Disc {
    type Output = Disc;
    fn add(self, rhs: &Disc) -> Disc {
        let r = &self.radius + &rhs.radius;
        Disc { center: &self.center + &rhs.center, radius: round_radius(r) }
    }
}

impl<'a> Sub<&'a Disc> for &'a Disc {
    type Output = Disc;
    fn sub(self, rhs: &Disc) -> Disc {
        let r = &self.radius + &rhs.radius;
        Disc { center: &self.center - &rhs.center, radius: round_radius(r) }
    }
}

impl<'a> Mul<&'a Disc> for &'a Disc {
    type Output = Disc;
    fn mul(self, rhs: &Disc) -> Disc {
        let center = &self.center * &rhs.center;
        if self.radius.is_zero() && rhs.radius.is_zero() {
            return Disc::exact(center);
        }
        let mut r = &self.radius * &rhs.radius;
        if !rhs.radius.is_zero() {
            r = &r + &(&self.center.abs_upper() * &rhs.radius);
        }
        if !self.radius.is_zero() {
            r = &r + &(&rhs.center.abs_upper() * &self.radius);
        }
        Disc { center, radius: round_radius(r) }
    }
}

impl Neg for &Disc {
    type Output = Disc;
    fn neg(self) -> Disc {
        Disc { center: -&self.center, radius: self.radius.clone() }
    }
}

forward_owned!(Disc, Add, add);
forward_owned!(Disc, Sub, sub);
forward_owned!(Disc, Mul, mul);

/// Horner evaluation of `sum coeffs[i] z^i` in disc arithmetic.
pub fn horner(coeffs: &[Disc], z: &Disc) -> Disc {
    let mut acc = Disc::zero();
    for c in coeffs.iter().rev() {
        acc = (&(&acc * z) + c).tidy();
    }
    acc
}

/// The dyadic with the smallest denominator (then the smallest magnitude) in
/// the open interval `(a, b)`.
pub fn simplest_between(a: &Dyadic, b: &Dyadic) -> Dyadic {
    assert!(a < b, "empty interval");
    if a.is_negative() && b.is_positive() {
        return Dyadic::zero();
    }
    if !b.is_positive() {
        return -simplest_between(&-b, &-a);
    }
    let mut k = 0i64;
    loop {
        let m = &a.mul_pow2(k).floor() + BigInt::from(1);
        let q = Dyadic::new(m, -k);
        if q < *b {
            return q;
        }
        k += 1;
    }
}
