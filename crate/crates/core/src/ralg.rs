//! Real algebraic vectors as towers of isolating discs.
//!
//! A level-`k` vector stores its parent (level `k-1`), the polynomial data of
//! its fiber, root isolation data `Θ` for that fiber and the index of its own
//! disc in `Θ`. Fiber polynomials are kept as lists of factors: each factor is
//! isolated on its own and discs of different factors that hold a common root
//! are merged, with common roots counted exactly through principal
//! subresultant coefficients.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::arith::{Disc, Dyadic, GaussianDyadic, Round};
use crate::isolate::{interval_roots, IsolationResult, UnionFind};
use crate::poly::{psc_sequence, PolyQ};

/// Hard ceiling on working precision; reaching it is reported as an error.
pub const PRECISION_CAP: u64 = 1 << 20;

/// Starting precision when nothing better is known.
pub const DEFAULT_PRECISION: u64 = 53;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RalgError {
    #[error("factor {factor} vanishes identically over the base point (level {level})")]
    IdenticallyZero { level: usize, factor: usize },
    #[error("working precision exceeded the cap of {0} bits")]
    PrecisionCap(u64),
}

pub type Result<T> = std::result::Result<T, RalgError>;

static NEXT_KEY: AtomicU64 = AtomicU64::new(1);

fn fresh_key() -> u64 {
    NEXT_KEY.fetch_add(1, Ordering::Relaxed)
}

/// Root isolation data for a factored fiber polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theta {
    /// Merged discs, one per distinct root of the product of the factors.
    pub discs: Vec<Disc>,
    /// Multiplicities as roots of the product.
    pub mults: Vec<u32>,
    pub radius: Dyadic,
    /// Isolation of each factor on its own.
    pub factors: Vec<IsolationResult>,
    /// `(factor, disc)` pairs behind each merged disc.
    pub members: Vec<Vec<(usize, usize)>>,
}

impl Theta {
    pub fn isolation(&self) -> IsolationResult {
        IsolationResult {
            discs: self.discs.clone(),
            mults: self.mults.clone(),
            radius: self.radius.clone(),
            escapes: true,
        }
    }

    /// Indices of discs meeting the real axis, in increasing order.
    pub fn real_indices(&self) -> Vec<usize> {
        (0..self.discs.len()).filter(|&j| self.discs[j].meets_real_axis()).collect()
    }

    pub fn max_radius(&self) -> Dyadic {
        self.discs.iter().map(|d| d.radius.clone()).max().unwrap_or_default()
    }

    /// Doubled discs inside `Δ(0, R/2)`, pairwise disjoint, and disjoint from
    /// the conjugates of real-meeting doubled discs.
    pub fn separation_holds(&self) -> bool {
        separation_holds(&self.discs, &self.radius)
    }
}

fn separation_holds(discs: &[Disc], radius: &Dyadic) -> bool {
    let half = radius.half();
    let dbl: Vec<Disc> = discs.iter().map(Disc::dbl).collect();
    if !dbl.iter().all(|d| d.within_radius(&half)) {
        return false;
    }
    for a in 0..dbl.len() {
        for b in a + 1..dbl.len() {
            if dbl[a].intersects(&dbl[b]) {
                return false;
            }
            if (dbl[a].meets_real_axis() || dbl[b].meets_real_axis()) && dbl[a].conj().intersects(&dbl[b]) {
                return false;
            }
        }
    }
    true
}

/// Polynomial data of a fiber over a fixed base point: the factors, their
/// coefficients in the main variable and exact facts about them at the base.
pub struct Fiber {
    pub factors: Vec<PolyQ>,
    coeffs: Vec<Vec<PolyQ>>,
    /// Degree of each factor after dropping coefficients that vanish at the base.
    pub degs: Vec<usize>,
    mu: Mutex<Vec<Option<usize>>>,
    common: Mutex<HashMap<(usize, usize), usize>>,
}

impl fmt::Debug for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fiber").field("factors", &self.factors).field("degs", &self.degs).finish()
    }
}

impl Fiber {
    fn level(&self) -> usize {
        self.factors[0].nvars() - 1
    }

    /// Factor `i` with vanishing leading coefficients removed.
    pub fn trimmed(&self, i: usize) -> PolyQ {
        let l = self.level();
        PolyQ::from_coeffs_in(l + 1, l, &self.coeffs[i][..=self.degs[i]])
    }
}

/// One level of an algebraic vector.
#[derive(Debug)]
pub struct Node {
    /// Identity of the represented value; preserved by refinement.
    pub key: u64,
    pub level: usize,
    pub parent: AlgVec,
    pub fiber: Arc<Fiber>,
    pub theta: Arc<Theta>,
    /// Index of the isolating disc in `theta`.
    pub index: usize,
    /// Working precision this level was built with.
    pub prec: u64,
}

/// A point of `ℝ^k` with real algebraic coordinates, `k = level()`.
#[derive(Clone, Debug, Default)]
pub struct AlgVec(Option<Arc<Node>>);

impl AlgVec {
    pub fn empty() -> Self {
        AlgVec(None)
    }

    pub fn level(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.level)
    }

    pub fn node(&self) -> Option<&Arc<Node>> {
        self.0.as_ref()
    }

    pub fn parent(&self) -> AlgVec {
        self.0.as_ref().map_or_else(AlgVec::empty, |n| n.parent.clone())
    }

    pub fn key(&self) -> u64 {
        self.0.as_ref().map_or(0, |n| n.key)
    }

    pub fn prec(&self) -> u64 {
        self.0.as_ref().map_or(0, |n| n.prec)
    }

    /// Isolating disc of the last coordinate.
    pub fn disc(&self) -> Option<&Disc> {
        self.0.as_ref().map(|n| &n.theta.discs[n.index])
    }

    /// Isolating discs of all coordinates, from the first.
    pub fn discs(&self) -> Vec<Disc> {
        self.levels().iter().map(|n| n.theta.discs[n.index].clone()).collect()
    }

    /// Multiplicity of the last coordinate as a root of its fiber polynomial.
    pub fn mult(&self) -> u32 {
        self.0.as_ref().map_or(0, |n| n.theta.mults[n.index])
    }

    /// Largest disc radius in any `Θ` of the tower.
    pub fn rho(&self) -> Dyadic {
        self.levels().iter().map(|n| n.theta.max_radius()).max().unwrap_or_default()
    }

    /// Nodes from level 1 up.
    pub fn levels(&self) -> Vec<Arc<Node>> {
        let mut out = Vec::with_capacity(self.level());
        let mut cur = self.0.clone();
        while let Some(n) = cur {
            cur = n.parent.0.clone();
            out.push(n);
        }
        out.reverse();
        out
    }

    /// Rebuild a tower from per-level nodes, re-linking parents where needed.
    /// Each node must represent the same value as the node its parent pointer
    /// currently refers to.
    pub fn from_levels(levels: &[Arc<Node>]) -> AlgVec {
        let mut acc = AlgVec::empty();
        for n in levels {
            let same = match (&n.parent.0, &acc.0) {
                (Some(a), Some(b)) => Arc::ptr_eq(a, b),
                (None, None) => true,
                _ => false,
            };
            acc = if same {
                AlgVec(Some(n.clone()))
            } else {
                AlgVec(Some(Arc::new(Node {
                    key: n.key,
                    level: n.level,
                    parent: acc,
                    fiber: n.fiber.clone(),
                    theta: n.theta.clone(),
                    index: n.index,
                    prec: n.prec,
                })))
            };
        }
        acc
    }

    /// Floating-point approximation of the coordinates.
    pub fn approx(&self) -> Vec<f64> {
        self.discs().iter().map(|d| d.center.re.to_f64()).collect()
    }
}

/// Output of [`Ralg::alg_roots`].
#[derive(Clone, Debug)]
pub struct Roots {
    pub theta: Arc<Theta>,
    /// Refined representation of the base point.
    pub base: AlgVec,
    /// Real roots in increasing order, as vectors one level up.
    pub roots: Vec<AlgVec>,
    pub prec: u64,
}

/// Shared state for algebraic-vector computations: precision cap and caches of
/// exact facts. Safe to share between threads.
pub struct Ralg {
    cap: u64,
    zero_cache: Mutex<HashMap<(u64, PolyQ), bool>>,
    psc_cache: Mutex<HashMap<(PolyQ, PolyQ), Arc<Vec<PolyQ>>>>,
}

impl Default for Ralg {
    fn default() -> Self {
        Self::with_cap(PRECISION_CAP)
    }
}

impl Ralg {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: u64) -> Self {
        Ralg { cap, zero_cache: Mutex::new(HashMap::new()), psc_cache: Mutex::new(HashMap::new()) }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Build the fiber of `factors` over `base`. Factors live in `level + 1`
    /// variables with the last one as the main variable.
    pub fn fiber(&self, base: &AlgVec, factors: Vec<PolyQ>) -> Result<Arc<Fiber>> {
        let l = base.level();
        assert!(!factors.is_empty(), "fiber without factors");
        let mut coeffs = Vec::with_capacity(factors.len());
        let mut degs = Vec::with_capacity(factors.len());
        for (i, f) in factors.iter().enumerate() {
            assert_eq!(f.nvars(), l + 1, "factor arity must be level + 1");
            let cs = f.coeffs_in(l);
            let mut d = None;
            for j in (0..cs.len()).rev() {
                if !self.zero_test(base, &drop_last(&cs[j]))? {
                    d = Some(j);
                    break;
                }
            }
            let Some(d) = d else {
                return Err(RalgError::IdenticallyZero { level: l + 1, factor: i });
            };
            coeffs.push(cs);
            degs.push(d);
        }
        let n = factors.len();
        Ok(Arc::new(Fiber { factors, coeffs, degs, mu: Mutex::new(vec![None; n]), common: Mutex::new(HashMap::new()) }))
    }

    /// Root isolation data of the product of `factors` over `base`, its real
    /// roots, and a refinement of `base`.
    pub fn alg_roots(&self, base: &AlgVec, factors: Vec<PolyQ>, p: u64) -> Result<Roots> {
        let fiber = self.fiber(base, factors)?;
        self.alg_roots_fiber(base, &fiber, p, None, false)
    }

    /// `strict` forces a refinement of the base on the first pass; otherwise a
    /// base already built at precision `>= p` is used as is.
    pub fn alg_roots_fiber(
        &self,
        base: &AlgVec,
        fiber: &Arc<Fiber>,
        p: u64,
        hints: Option<&Theta>,
        strict: bool,
    ) -> Result<Roots> {
        let l = base.level();
        let mut pp = p.max(crate::numroots::MIN_PRECISION);
        let mut base = base.clone();
        let mut first = true;
        loop {
            if pp > self.cap {
                return Err(RalgError::PrecisionCap(self.cap));
            }
            if l > 0 && (strict || !first || base.prec() < pp) {
                base = self.refine(&base, pp)?;
            }
            first = false;
            if let Some(theta) = self.try_isolate(&base, fiber, pp, hints)? {
                let theta = Arc::new(theta);
                let roots = theta
                    .real_indices()
                    .into_iter()
                    .map(|j| {
                        AlgVec(Some(Arc::new(Node {
                            key: fresh_key(),
                            level: l + 1,
                            parent: base.clone(),
                            fiber: fiber.clone(),
                            theta: theta.clone(),
                            index: j,
                            prec: pp,
                        })))
                    })
                    .collect();
                return Ok(Roots { theta, base, roots, prec: pp });
            }
            pp *= 2;
        }
    }

    fn try_isolate(&self, base: &AlgVec, fiber: &Fiber, pp: u64, hints: Option<&Theta>) -> Result<Option<Theta>> {
        let quads: Vec<Disc> = base.discs().iter().map(Disc::quad).collect();
        let mut isos = Vec::with_capacity(fiber.factors.len());
        for (i, cs) in fiber.coeffs.iter().enumerate() {
            let z: Vec<Disc> = cs
                .iter()
                .map(|a| match a.as_constant() {
                    Some(c) => Disc::from_rational(&c, pp),
                    None => a.eval_discs(&quads, pp),
                })
                .collect();
            // coefficients far more accurate than pp only slow the root finder down;
            // keep up to twice pp so refinements still profit from precise bases
            let top = z.iter().filter_map(|d| d.center.ilog2()).max().unwrap_or(0);
            let z: Vec<Disc> = z.iter().map(|d| d.widen_to(top - 2 * pp as i64)).collect();
            let hint: Option<Vec<GaussianDyadic>> = hints
                .and_then(|t| t.factors.get(i))
                .filter(|iso| iso.mults.iter().all(|&m| m == 1))
                .map(|iso| iso.discs.iter().map(|d| d.center.clone()).collect());
            let Some(iso) = interval_roots(&z, pp, hint.as_deref()) else {
                return Ok(None);
            };
            let d = fiber.degs[i];
            if iso.degree() as usize != d {
                return Ok(None);
            }
            let m = iso.discs.len();
            if d > m && d - m != self.mu(base, fiber, i)? {
                return Ok(None);
            }
            isos.push(iso);
        }
        self.merge(base, fiber, isos)
    }

    /// Merge per-factor discs that hold a common root.
    fn merge(&self, base: &AlgVec, fiber: &Fiber, isos: Vec<IsolationResult>) -> Result<Option<Theta>> {
        let mut offs = Vec::with_capacity(isos.len());
        let mut flat: Vec<(usize, usize)> = Vec::new();
        for (i, iso) in isos.iter().enumerate() {
            offs.push(flat.len());
            flat.extend((0..iso.discs.len()).map(|a| (i, a)));
        }
        let mut uf = UnionFind::new(flat.len());
        for i in 0..isos.len() {
            for j in i + 1..isos.len() {
                let (di, dj) = (&isos[i].discs, &isos[j].discs);
                let mut hits_i = vec![0usize; di.len()];
                let mut hits_j = vec![0usize; dj.len()];
                let mut count = 0usize;
                for (a, da) in di.iter().enumerate() {
                    for (b, db) in dj.iter().enumerate() {
                        if da.intersects(db) {
                            hits_i[a] += 1;
                            hits_j[b] += 1;
                            count += isos[i].mults[a].min(isos[j].mults[b]) as usize;
                            uf.union(offs[i] + a, offs[j] + b);
                        }
                    }
                }
                if hits_i.iter().chain(&hits_j).any(|&h| h > 1) {
                    return Ok(None);
                }
                if count > 0 && count != self.common(base, fiber, i, j)? {
                    return Ok(None);
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; flat.len()];
        for t in 0..flat.len() {
            let r = uf.find(t);
            if slot[r] == usize::MAX {
                slot[r] = classes.len();
                classes.push(Vec::new());
            }
            classes[slot[r]].push(t);
        }
        let disc_of = |t: usize| &isos[flat[t].0].discs[flat[t].1];
        let mut merged: Vec<(Disc, u32, Vec<(usize, usize)>)> = Vec::with_capacity(classes.len());
        for (c, class) in classes.iter().enumerate() {
            let members: Vec<&Disc> = class.iter().map(|&t| disc_of(t)).collect();
            let disc = enclose(&members);
            if class.len() > 1 {
                for t in 0..flat.len() {
                    if slot[uf.find(t)] != c && disc.intersects(disc_of(t)) {
                        return Ok(None);
                    }
                }
            }
            let mult = class.iter().map(|&t| isos[flat[t].0].mults[flat[t].1]).sum();
            merged.push((disc, mult, class.iter().map(|&t| flat[t]).collect()));
        }
        merged.sort_by(|a, b| a.0.center.re.cmp(&b.0.center.re).then(a.0.center.im.cmp(&b.0.center.im)));
        // factors whose roots cannot escape do not bound the radius
        let radius = match isos.iter().filter(|iso| iso.escapes).map(|iso| iso.radius.clone()).min() {
            Some(r) => r,
            None => isos.iter().map(|iso| iso.radius.clone()).max().unwrap(),
        };
        let discs: Vec<Disc> = merged.iter().map(|m| m.0.clone()).collect();
        if !discs.iter().all(|d| d.within_radius(&radius)) || !separation_holds(&discs, &radius) {
            return Ok(None);
        }
        Ok(Some(Theta {
            discs,
            mults: merged.iter().map(|m| m.1).collect(),
            radius,
            factors: isos,
            members: merged.into_iter().map(|m| m.2).collect(),
        }))
    }

    /// Number of repeated roots of factor `i` over the base: `deg - #distinct`.
    fn mu(&self, base: &AlgVec, fiber: &Fiber, i: usize) -> Result<usize> {
        if let Some(m) = fiber.mu.lock().unwrap()[i] {
            return Ok(m);
        }
        let l = base.level();
        let g = fiber.trimmed(i);
        let psc = self.psc(&g, &g.derivative(l), l);
        let m = self.vanishing_prefix(base, &psc)?;
        fiber.mu.lock().unwrap()[i] = Some(m);
        Ok(m)
    }

    /// Degree of the gcd of factors `i` and `j` over the base.
    fn common(&self, base: &AlgVec, fiber: &Fiber, i: usize, j: usize) -> Result<usize> {
        if let Some(&c) = fiber.common.lock().unwrap().get(&(i, j)) {
            return Ok(c);
        }
        let l = base.level();
        let (mut a, mut b) = (fiber.trimmed(i), fiber.trimmed(j));
        if a.deg(l) < b.deg(l) {
            std::mem::swap(&mut a, &mut b);
        }
        let c = if b.deg(l) == 0 {
            0
        } else {
            let psc = self.psc(&a, &b, l);
            let c = self.vanishing_prefix(base, &psc)?;
            if c == psc.len() {
                b.deg(l) as usize
            } else {
                c
            }
        };
        fiber.common.lock().unwrap().insert((i, j), c);
        Ok(c)
    }

    fn psc(&self, g: &PolyQ, h: &PolyQ, var: usize) -> Arc<Vec<PolyQ>> {
        let key = (g.clone(), h.clone());
        if let Some(v) = self.psc_cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = Arc::new(psc_sequence(g, h, var));
        self.psc_cache.lock().unwrap().insert(key, v.clone());
        v
    }

    fn vanishing_prefix(&self, base: &AlgVec, psc: &[PolyQ]) -> Result<usize> {
        let mut c = 0;
        for pj in psc {
            if !self.zero_test(base, &drop_last(pj))? {
                break;
            }
            c += 1;
        }
        Ok(c)
    }

    /// A refinement of `v`: same value, every disc of every level at most half
    /// its old radius and inside the old doubled disc.
    pub fn refine(&self, v: &AlgVec, p: u64) -> Result<AlgVec> {
        let node = v.node().expect("refine needs a vector of level >= 1");
        let mut pp = p.max(node.prec + node.prec / 4 + 4);
        loop {
            if pp > self.cap {
                return Err(RalgError::PrecisionCap(self.cap));
            }
            let out = self.alg_roots_fiber(&node.parent, &node.fiber, pp, Some(&node.theta), true)?;
            if let Some(map) = match_discs(&node.theta, &out.theta, true) {
                return Ok(AlgVec(Some(Arc::new(Node {
                    key: node.key,
                    level: node.level,
                    parent: out.base,
                    fiber: node.fiber.clone(),
                    theta: out.theta,
                    index: map[node.index],
                    prec: out.prec,
                }))));
            }
            pp = out.prec * 2;
        }
    }

    /// Decide `h(v) = 0` exactly. `h` may have more variables than `v` has
    /// levels as long as the extra ones do not occur.
    pub fn zero_test(&self, v: &AlgVec, h: &PolyQ) -> Result<bool> {
        if h.is_zero() {
            return Ok(true);
        }
        if h.is_constant() {
            return Ok(false);
        }
        let top = h.main_var().unwrap();
        assert!(top < v.level(), "polynomial has more variables than the vector");
        let mut v = v.clone();
        while v.level() > top + 1 {
            v = v.parent();
        }
        let h = if h.nvars() == top + 1 { h.clone() } else { h.select_vars(&(0..=top).collect::<Vec<_>>()) };
        let key = (v.key(), h);
        if let Some(&b) = self.zero_cache.lock().unwrap().get(&key) {
            return Ok(b);
        }
        let b = self.zero_test_at(&v, &key.1)?;
        self.zero_cache.lock().unwrap().insert(key, b);
        Ok(b)
    }

    /// `h` involves the last variable of `v`.
    fn zero_test_at(&self, v: &AlgVec, h: &PolyQ) -> Result<bool> {
        let node = v.node().unwrap().clone();
        let eval_prec = node.prec.max(DEFAULT_PRECISION);
        if !h.eval_discs(&v.discs(), eval_prec).contains_zero() {
            return Ok(false);
        }
        let members = &node.theta.members[node.index];
        for &(f, _) in members {
            if h.div_exact(&node.fiber.factors[f]).is_some() {
                return Ok(true);
            }
        }
        let mut w = v.clone();
        for _ in 0..2 {
            w = self.refine(&w, w.prec() * 2)?;
            if !h.eval_discs(&w.discs(), w.prec()).contains_zero() {
                return Ok(false);
            }
        }
        // exact decision: isolate a defining factor together with h over the parent
        let wk = node.theta.discs[node.index].dbl();
        let g = node.fiber.factors[members[0].0].clone();
        let mut parent = node.parent.clone();
        let fiber = match self.fiber(&parent, vec![g, h.clone()]) {
            Ok(f) => f,
            Err(RalgError::IdenticallyZero { factor: 1, .. }) => return Ok(true),
            Err(e) => return Err(e),
        };
        let mut pp = node.prec.max(DEFAULT_PRECISION);
        loop {
            let out = self.alg_roots_fiber(&parent, &fiber, pp, None, false)?;
            let th = &out.theta;
            if let Some(a) = th.factors[0].discs.iter().position(|d| wk.contains(d)) {
                let m = th.members.iter().find(|ms| ms.contains(&(0, a))).unwrap();
                return Ok(m.iter().any(|&(f, _)| f == 1));
            }
            parent = out.base;
            pp = out.prec * 2;
            if pp > self.cap {
                return Err(RalgError::PrecisionCap(self.cap));
            }
        }
    }

    /// Sign of `h(v)`.
    pub fn sign_at(&self, v: &AlgVec, h: &PolyQ) -> Result<i32> {
        if let Some(c) = h.as_constant() {
            return Ok(if c.is_zero() { 0 } else if c.is_positive() { 1 } else { -1 });
        }
        if self.zero_test(v, h)? {
            return Ok(0);
        }
        let top = h.main_var().unwrap();
        let mut w = v.clone();
        while w.level() > top + 1 {
            w = w.parent();
        }
        loop {
            let val = h.eval_discs(&w.discs(), w.prec().max(DEFAULT_PRECISION));
            if !val.contains_zero() {
                return Ok(val.center.re.signum());
            }
            w = self.refine(&w, w.prec() * 2)?;
        }
    }

    /// Refine `v` until `done` holds for it, doubling precision each round.
    pub fn refine_until(&self, v: &AlgVec, mut done: impl FnMut(&AlgVec) -> bool) -> Result<AlgVec> {
        let mut w = v.clone();
        while !done(&w) {
            w = self.refine(&w, w.prec() * 2)?;
        }
        Ok(w)
    }
}

/// Drop the last variable of a polynomial that does not involve it.
fn drop_last(p: &PolyQ) -> PolyQ {
    let n = p.nvars();
    debug_assert!(!p.involves(n - 1));
    p.select_vars(&(0..n - 1).collect::<Vec<_>>())
}

/// Smallest disc (around the tightest member's center) containing all members.
fn enclose(members: &[&Disc]) -> Disc {
    if members.len() == 1 {
        return members[0].clone();
    }
    let c = members.iter().min_by(|a, b| a.radius.cmp(&b.radius)).unwrap();
    let mut r = c.radius.clone();
    for m in members {
        let reach = &(&m.center - &c.center).abs_upper() + &m.radius;
        r = Dyadic::max(&r, &reach);
    }
    Disc::new(c.center.clone(), r.round(crate::arith::RADIUS_BITS, Round::Up))
}

/// Match each old disc to a new one inside its double with a smaller radius
/// (at most half of it when `halving`) and equal multiplicity.
fn match_discs(old: &Theta, new: &Theta, halving: bool) -> Option<Vec<usize>> {
    if old.discs.len() != new.discs.len() {
        return None;
    }
    let mut used = vec![false; new.discs.len()];
    let mut map = Vec::with_capacity(old.discs.len());
    for (j, d) in old.discs.iter().enumerate() {
        let big = d.dbl();
        let bound = if halving { d.radius.half() } else { d.radius.clone() };
        let hit = new.discs.iter().enumerate().position(|(t, n)| {
            !used[t] && new.mults[t] == old.mults[j] && big.contains(n) && if halving { n.radius <= bound } else { n.radius < bound }
        })?;
        used[hit] = true;
        map.push(hit);
    }
    Some(map)
}

/// `new` is a refinement of `old`: same levels, and at every level each disc
/// shrank strictly and stayed inside the old doubled disc, with the isolating
/// disc mapped to the isolating disc.
pub fn refines(new: &AlgVec, old: &AlgVec) -> bool {
    let (a, b) = (new.levels(), old.levels());
    if a.len() != b.len() {
        return false;
    }
    a.iter().zip(&b).all(|(n, o)| match match_discs(&o.theta, &n.theta, false) {
        Some(map) => map[o.index] == n.index,
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::poly_q;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn uni(cs: &[i64]) -> PolyQ {
        let terms: Vec<(i64, Vec<u32>)> = cs.iter().enumerate().map(|(e, &c)| (c, vec![e as u32])).collect();
        let t: Vec<(i64, &[u32])> = terms.iter().map(|(c, e)| (*c, e.as_slice())).collect();
        poly_q(1, &t)
    }

    fn sqrt2(ctx: &Ralg) -> AlgVec {
        let r = ctx.alg_roots(&AlgVec::empty(), vec![uni(&[-2, 0, 1])], 53).unwrap();
        r.roots[1].clone()
    }

    /// Exact bisection oracle for a real root of an integer polynomial in an interval.
    fn bisect(f: &PolyQ, mut lo: BigRational, mut hi: BigRational, steps: usize) -> (BigRational, BigRational) {
        let s = |x: &BigRational| f.eval(&[x.clone()]) > BigRational::from_integer(BigInt::from(0));
        let slo = s(&lo);
        for _ in 0..steps {
            let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            if s(&mid) == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn roots_of_x2_minus_2() {
        let ctx = Ralg::new();
        let r = ctx.alg_roots(&AlgVec::empty(), vec![uni(&[-2, 0, 1])], 53).unwrap();
        assert_eq!(r.theta.mults, vec![1, 1]);
        assert_eq!(r.roots.len(), 2);
        let (lo, hi) = bisect(&uni(&[-2, 0, 1]), q(1, 1), q(2, 1), 400);
        let w = r.roots[1].disc().unwrap();
        assert!(w.contains_real_rational(&lo) && w.contains_real_rational(&hi));
        assert!(r.theta.separation_holds());
        assert!(r.roots[0].approx()[0] < 0.0);
    }

    #[test]
    fn degree_drop_over_zero() {
        let ctx = Ralg::new();
        // alpha = 0 as the root of x1, f = x1*x2^2 + x2 - x1
        let v = ctx.alg_roots(&AlgVec::empty(), vec![uni(&[0, 1])], 53).unwrap().roots[0].clone();
        let f = poly_q(2, &[(1, &[1, 2]), (1, &[0, 1]), (-1, &[1, 0])]);
        let r = ctx.alg_roots(&v, vec![f], 53).unwrap();
        assert_eq!(r.theta.mults, vec![1]);
        assert_eq!(r.roots.len(), 1);
        assert!(r.roots[0].disc().unwrap().contains_zero());
        assert_eq!(r.roots[0].node().unwrap().fiber.degs, vec![1]);
    }

    #[test]
    fn double_root_over_zero() {
        let ctx = Ralg::new();
        // y^2 + 4x^2 over x = 0: one double root
        let v = ctx.alg_roots(&AlgVec::empty(), vec![uni(&[0, 1])], 53).unwrap().roots[0].clone();
        let g = poly_q(2, &[(1, &[0, 2]), (4, &[2, 0])]);
        let r = ctx.alg_roots(&v, vec![g], 53).unwrap();
        assert_eq!(r.theta.mults, vec![2]);
        assert_eq!(r.roots.len(), 1);
    }

    #[test]
    fn identically_zero_is_reported() {
        let ctx = Ralg::new();
        let v = ctx.alg_roots(&AlgVec::empty(), vec![uni(&[0, 1])], 53).unwrap().roots[0].clone();
        let f = poly_q(2, &[(1, &[1, 1]), (1, &[1, 0])]);
        assert_eq!(ctx.alg_roots(&v, vec![f], 53).unwrap_err(), RalgError::IdenticallyZero { level: 2, factor: 0 });
    }

    #[test]
    fn common_roots_between_factors_merge() {
        let ctx = Ralg::new();
        // (x - 1)(x + 2) and (x - 1)(x^2 + 1): the root 1 is shared
        let a = uni(&[-2, 1, 1]);
        let b = uni(&[-1, 1, -1, 1]);
        let r = ctx.alg_roots(&AlgVec::empty(), vec![a, b], 53).unwrap();
        assert_eq!(r.roots.len(), 2);
        let j = r.theta.real_indices()[1];
        assert_eq!(r.theta.mults[j], 2);
        assert_eq!(r.theta.members[j].len(), 2);
        assert_eq!(r.theta.discs.len(), 4);
    }

    #[test]
    fn zero_test_examples() {
        let ctx = Ralg::new();
        let s = sqrt2(&ctx);
        assert!(ctx.zero_test(&s, &uni(&[-2, 0, 1])).unwrap());
        assert!(!ctx.zero_test(&s, &uni(&[-1, 1])).unwrap());
        // alpha^3 = 2 implies alpha^9 = 8
        let c = ctx.alg_roots(&AlgVec::empty(), vec![uni(&[-2, 0, 0, 1])], 53).unwrap().roots[0].clone();
        let mut h = vec![0i64; 10];
        h[0] = -8;
        h[9] = 1;
        assert!(ctx.zero_test(&c, &uni(&h)).unwrap());
        // x^6 - 4 vanishes as well; x^6 - 4 + x - x does not reduce to a multiple syntactically
        assert!(ctx.zero_test(&c, &uni(&[-4, 0, 0, 0, 0, 0, 1])).unwrap());
        assert!(!ctx.zero_test(&c, &uni(&[-4, 0, 0, 0, 0, 1, 1])).unwrap());
    }

    #[test]
    fn sign_examples() {
        let ctx = Ralg::new();
        let s = sqrt2(&ctx);
        assert_eq!(ctx.sign_at(&s, &uni(&[-2, 0, 1])).unwrap(), 0);
        assert_eq!(ctx.sign_at(&s, &uni(&[0, 1])).unwrap(), 1);
        // root of x^5 - x - 1, sign of x^5 - x - 1 - 1/1000 there
        let f = uni(&[-1, -1, 0, 0, 0, 1]);
        let a = ctx.alg_roots(&AlgVec::empty(), vec![f.clone()], 53).unwrap().roots[0].clone();
        let g = f.sub(&PolyQ::constant(1, q(1, 1000)));
        assert_eq!(ctx.sign_at(&a, &g).unwrap(), -1);
    }

    #[test]
    fn refinement_halves_and_chains() {
        let ctx = Ralg::new();
        let s = sqrt2(&ctx);
        let r1 = ctx.refine(&s, 64).unwrap();
        let r2 = ctx.refine(&r1, 64).unwrap();
        let r3 = ctx.refine(&r2, 64).unwrap();
        assert!(refines(&r1, &s) && refines(&r2, &r1) && refines(&r3, &r2));
        assert!(refines(&r2, &s) && refines(&r3, &s) && refines(&r3, &r1));
        assert_eq!(r3.key(), s.key());
        let (lo, hi) = bisect(&uni(&[-2, 0, 1]), q(1, 1), q(2, 1), 400);
        for v in [&s, &r1, &r2, &r3] {
            let w = v.disc().unwrap();
            assert!(w.contains_real_rational(&lo) && w.contains_real_rational(&hi));
        }
        // refining at the construction precision still shrinks
        let again = ctx.refine(&s, s.prec()).unwrap();
        assert!(again.disc().unwrap().radius < s.disc().unwrap().radius);
    }

    #[test]
    fn level_two_vector_and_rebuild() {
        let ctx = Ralg::new();
        let s = sqrt2(&ctx);
        // y^2 - x over x = sqrt 2: y = ±2^(1/4)
        let f = poly_q(2, &[(1, &[0, 2]), (-1, &[1, 0])]);
        let r = ctx.alg_roots(&s, vec![f], 53).unwrap();
        assert_eq!(r.roots.len(), 2);
        let top = r.roots[1].clone();
        let a = top.approx();
        assert!((a[0] - 2f64.sqrt()).abs() < 1e-9 && (a[1] - 2f64.powf(0.25)).abs() < 1e-9);
        let refined = ctx.refine(&top, 128).unwrap();
        assert!(refines(&refined, &top));
        // y^4 = 2 at the point, y^2 = x too
        assert!(ctx.zero_test(&refined, &poly_q(2, &[(1, &[0, 4]), (-2, &[0, 0])])).unwrap());
        assert!(ctx.zero_test(&refined, &poly_q(2, &[(1, &[0, 2]), (-1, &[1, 0])])).unwrap());
        assert!(!ctx.zero_test(&refined, &poly_q(2, &[(1, &[0, 2]), (1, &[1, 0])])).unwrap());
        // swapping in a refined parent keeps the value
        let p2 = ctx.refine(&s, 200).unwrap();
        let mut lv = top.levels();
        lv[0] = p2.node().unwrap().clone();
        let rebuilt = AlgVec::from_levels(&lv);
        assert_eq!(rebuilt.parent().key(), s.key());
        assert!(rebuilt.parent().disc().unwrap().radius < s.disc().unwrap().radius);
        assert_eq!(ctx.sign_at(&rebuilt, &poly_q(2, &[(1, &[0, 1])])).unwrap(), 1);
    }
}
