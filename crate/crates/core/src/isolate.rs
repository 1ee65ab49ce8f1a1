//! Certified root isolation for polynomials whose coefficients are only known
//! to lie in discs.
//!
//! [`interval_roots`] returns discs and multiplicities that hold for every
//! choice of coefficients inside the input discs, together with an escape
//! radius `R`: roots outside `Δ(0, R)` correspond to leading coefficients that
//! may vanish.

use crate::arith::{Disc, Dyadic, GaussianDyadic, Round};
use crate::numroots::approximate_roots_from;

/// Bits kept in the fractional powers of the multiplicity test.
const ROOT_BITS: u64 = 64;

/// Lower clamp on the working precision derived from the input radii.
pub const MIN_ISOLATION_PRECISION: u64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolationResult {
    pub discs: Vec<Disc>,
    pub mults: Vec<u32>,
    pub radius: Dyadic,
    /// `false` when no coefficient above the certified degree can be nonzero:
    /// no root escapes and any larger radius is equally valid.
    pub escapes: bool,
}

impl IsolationResult {
    /// Total number of roots, counted with multiplicity.
    pub fn degree(&self) -> u32 {
        self.mults.iter().sum()
    }

    /// Largest disc radius.
    pub fn max_radius(&self) -> Dyadic {
        self.discs.iter().map(|d| d.radius.clone()).max().unwrap_or_default()
    }
}

/// Taylor coefficients `F^(i)(s) / i!` for `i = 0..=N` by repeated synthetic
/// division in disc arithmetic.
pub fn taylor_discs(coeffs: &[Disc], s: &GaussianDyadic) -> Vec<Disc> {
    let z = Disc::exact(s.clone());
    let mut work: Vec<Disc> = coeffs.to_vec();
    let mut out = Vec::with_capacity(coeffs.len());
    while !work.is_empty() {
        // after the sweep work[0] is the remainder and work[1..] the quotient
        for i in (0..work.len() - 1).rev() {
            work[i] = (&work[i] + &(&work[i + 1] * &z)).tidy();
        }
        out.push(work.remove(0));
    }
    out
}

/// The multiplicity test on precomputed Taylor discs `w`: returns a radius `r`
/// such that every polynomial with Taylor coefficients in `w` has exactly `k`
/// roots in `Δ(s, r)`, or `None` if the bounds do not separate.
///
/// When all lower coefficients are exactly zero the max side is vacuous and
/// `r = min(min side / 2, tiny)`.
pub fn mult_bound(w: &[Disc], k: usize, tiny: &Dyadic) -> Option<Dyadic> {
    let n = w.len() - 1;
    assert!(k >= 1 && k <= n);
    let lo_k = w[k].min_abs();
    if lo_k.is_zero() {
        return None;
    }
    let nd = Dyadic::from_i64(n as i64);
    let mut upper_side: Option<Dyadic> = None;
    for (i, wi) in w.iter().enumerate().skip(k + 1) {
        let hi = wi.max_abs();
        if hi.is_zero() {
            continue;
        }
        let q = Dyadic::div(&lo_k, &(&nd * &hi), ROOT_BITS, Round::Down);
        let t = q.nth_root((i - k) as u32, ROOT_BITS, Round::Down);
        upper_side = Some(match upper_side {
            Some(u) => Dyadic::min(&u, &t),
            None => t,
        });
    }
    let mut lower_side = Dyadic::zero();
    for (i, wi) in w.iter().enumerate().take(k) {
        let hi = wi.max_abs();
        if hi.is_zero() {
            continue;
        }
        let q = Dyadic::div(&(&nd * &hi), &lo_k, ROOT_BITS, Round::Up);
        let t = q.nth_root((k - i) as u32, ROOT_BITS, Round::Up);
        lower_side = Dyadic::max(&lower_side, &t);
    }
    let r = if lower_side.is_zero() {
        match &upper_side {
            Some(u) => Dyadic::min(&u.half(), tiny),
            None => tiny.clone(),
        }
    } else {
        // strictly above the max side
        let bump = lower_side.mul_pow2(-(ROOT_BITS as i64) / 2);
        (&lower_side + &bump).round(ROOT_BITS, Round::Up)
    };
    match upper_side {
        Some(u) if r >= u => None,
        _ => Some(r),
    }
}

/// Multiplicity test for `F` around `s` with `k` roots.
pub fn mult_test(coeffs: &[Disc], s: &GaussianDyadic, k: usize) -> Option<Dyadic> {
    let w = taylor_discs(coeffs, s);
    mult_bound(&w, k, &Dyadic::pow2(-(ROOT_BITS as i64)))
}

/// `max_i log2 ρ(Z_i)` relative to the largest coefficient magnitude, as a
/// precision in bits. `None` if every disc is exact.
fn relative_precision(coeffs: &[Disc]) -> Option<u64> {
    let scale = coeffs.iter().filter_map(|z| z.center.ilog2()).max().unwrap_or(0);
    let worst = coeffs.iter().filter_map(|z| z.radius.ilog2()).max()?;
    Some((scale - worst).max(MIN_ISOLATION_PRECISION as i64) as u64)
}

/// Cauchy-type bound `1 + max_{i<d} |Z_i| / |Z_d|` on the roots of the
/// degree-`d` part.
fn cauchy_bound(coeffs: &[Disc], d: usize) -> Dyadic {
    let lo = coeffs[d].min_abs();
    let mut m = Dyadic::zero();
    for z in &coeffs[..d] {
        let hi = z.max_abs();
        if !hi.is_zero() {
            m = Dyadic::max(&m, &Dyadic::div(&hi, &lo, ROOT_BITS, Round::Up));
        }
    }
    (&m + &Dyadic::one()).round(ROOT_BITS, Round::Up)
}

/// Isolate the roots of `Z_N z^N + ... + Z_0` uniformly over all coefficient
/// selections. `fallback_prec` is used when every coefficient is exact; `hints`
/// are optional starting approximations for the `d` roots.
///
/// Returns `None` when certification fails at the given input accuracy; the
/// caller should tighten the coefficients and retry.
pub fn interval_roots(coeffs: &[Disc], fallback_prec: u64, hints: Option<&[GaussianDyadic]>) -> Option<IsolationResult> {
    let n = coeffs.len().checked_sub(1)?;
    let d = (0..=n).rev().find(|&i| !coeffs[i].contains_zero())?;
    let nd = Dyadic::from_i64(n as i64);
    let lo_d = coeffs[d].min_abs();

    // escape radius: no root of any selection in Δ(0, R) beyond the d lower ones
    let mut radius: Option<Dyadic> = None;
    for (i, zi) in coeffs.iter().enumerate().skip(d + 1) {
        let hi = zi.max_abs();
        if hi.is_zero() {
            continue;
        }
        let q = Dyadic::div(&lo_d, &(&nd * &hi), ROOT_BITS, Round::Down);
        let t = q.nth_root((i - d) as u32, ROOT_BITS, Round::Down);
        radius = Some(match radius {
            Some(r) => Dyadic::min(&r, &t),
            None => t,
        });
    }
    let escapes = radius.is_some();
    let mut inner = Dyadic::zero();
    for (i, zi) in coeffs.iter().enumerate().take(d) {
        let hi = zi.max_abs();
        if hi.is_zero() {
            continue;
        }
        let q = Dyadic::div(&(&nd * &hi), &lo_d, ROOT_BITS, Round::Up);
        inner = Dyadic::max(&inner, &q.nth_root((d - i) as u32, ROOT_BITS, Round::Up));
    }
    let radius = radius.unwrap_or_else(|| Dyadic::max(&cauchy_bound(coeffs, d), &inner).mul_pow2(2));
    if radius <= inner {
        return None;
    }
    if d == 0 {
        return Some(IsolationResult { discs: vec![], mults: vec![], radius, escapes });
    }

    let p = relative_precision(&coeffs[..=d]).unwrap_or(fallback_prec.max(MIN_ISOLATION_PRECISION));
    let centers: Vec<GaussianDyadic> = coeffs[..=d].iter().map(|z| z.center.clone()).collect();
    let hints = hints.filter(|h| h.len() == d);
    let approx = approximate_roots_from(&centers, p, hints);
    let tiny = Dyadic::pow2(-(p as i64));

    let mut cand: Vec<(GaussianDyadic, Dyadic, usize)> = Vec::with_capacity(d);
    for s in approx {
        let w = taylor_discs(coeffs, &s);
        let (k, r) = (1..=n).find_map(|k| mult_bound(&w, k, &tiny).map(|r| (k, r)))?;
        cand.push((s, r, k));
    }

    // connected components of the union of the candidate discs
    let discs: Vec<Disc> = cand.iter().map(|(s, r, _)| Disc::new(s.clone(), r.clone())).collect();
    let mut uf = UnionFind::new(d);
    for a in 0..d {
        for b in a + 1..d {
            if discs[a].intersects(&discs[b]) {
                uf.union(a, b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for j in 0..d {
        let root = uf.find(j);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(j);
    }

    let mut out = IsolationResult { discs: Vec::new(), mults: Vec::new(), radius, escapes };
    for g in groups {
        let size = g.len();
        if g.iter().any(|&j| cand[j].2 != size) {
            return None;
        }
        let best = *g.iter().min_by(|&&a, &&b| cand[a].1.cmp(&cand[b].1).then(a.cmp(&b))).unwrap();
        let disc = discs[best].clone();
        if !disc.within_radius(&out.radius) {
            return None;
        }
        out.discs.push(disc);
        out.mults.push(size as u32);
    }
    Some(out)
}

/// Disjoint-set forest with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
