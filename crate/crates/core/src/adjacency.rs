//! Adjacency points between cells whose dimensions differ by one, and the
//! topology derived from them: closures, full adjacency, connected components.
//!
//! In a well-based decomposition the closure of a cell is the union of the
//! cells reachable from it by descending codimension-one adjacencies, so
//! codimension-one pairs determine everything else.

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::{simplest_between, Disc};
use crate::cad::{decompose, lift, CadError, CellTree, Coord, InputSystem, Options, SamplePoint};
use crate::isolate::UnionFind;
use crate::par;
use crate::ralg::{AlgVec, Ralg, RalgError};

/// A point of `higher` close to the sample point of `lower`: every algebraic
/// coordinate of the lower sample lies within the doubled isolating disc of
/// the corresponding coordinate, every rational one is reproduced exactly.
#[derive(Clone, Debug)]
pub struct AdjacencyPoint {
    pub higher: usize,
    pub lower: usize,
    pub point: SamplePoint,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AdjacencyError {
    #[error("refinement did not separate the sections of cells {higher} and {lower} within the precision cap")]
    RefinementStall { higher: usize, lower: usize },
    #[error(transparent)]
    Cad(#[from] CadError),
}

#[derive(Clone, Debug, Default)]
pub struct AdjacencyOptions {
    pub precision: u64,
    pub parallel: bool,
    /// Only compute adjacencies among cells whose projections lie in the
    /// closure of the projection of the solution set.
    pub restrict: bool,
}

impl From<&Options> for AdjacencyOptions {
    fn from(o: &Options) -> Self {
        AdjacencyOptions { precision: o.precision, parallel: o.parallel, restrict: false }
    }
}

/// A rational in `dbl(w)` strictly above (or below) every real point of `w`.
fn beside(w: &Disc, above: bool) -> BigRational {
    let (x, r) = (&w.center.re, &w.radius);
    let r3 = &(r + r) + r;
    let q = if above {
        simplest_between(&(x + r), &(x + &r3.half()))
    } else {
        simplest_between(&(x - &r3.half()), &(x - r))
    };
    let q = q.to_rational();
    debug_assert!(w.dbl().contains_real_rational(&q));
    q
}

fn stall_or_cad(e: RalgError, higher: usize, lower: usize, level: usize, point: &SamplePoint) -> AdjacencyError {
    match e {
        RalgError::PrecisionCap(_) => AdjacencyError::RefinementStall { higher, lower },
        RalgError::IdenticallyZero { .. } => {
            AdjacencyError::Cad(CadError::NotWellBased { level, path: Vec::new(), point: point.to_string() })
        }
    }
}

/// Sector/section pairs inside the stack over `base` (`None` for level 1).
fn same_stack(tree: &CellTree, base: Option<usize>) -> Vec<AdjacencyPoint> {
    let stack = tree.stack(base);
    let sample = base.map_or_else(SamplePoint::default, |c| tree.spt(c));
    let mut out = Vec::new();
    for (t, &s) in stack.iter().enumerate() {
        if t % 2 == 1 {
            continue;
        }
        for (nb, above) in [(t.checked_sub(1), true), (Some(t + 1).filter(|&u| u < stack.len()), false)] {
            if let Some(nb) = nb {
                let w = tree.section_disc(stack[nb]).expect("section without node");
                let point = sample.push_rational(beside(w, above));
                out.push(AdjacencyPoint { higher: s, lower: stack[nb], point });
            }
        }
    }
    out
}

/// Pairs between the stacks over `c` and `c_lower`, given an adjacency point
/// for `(c, c_lower)`.
fn cross_stack(ctx: &Ralg, tree: &CellTree, adp: &AdjacencyPoint, prec: u64) -> Result<Vec<AdjacencyPoint>, AdjacencyError> {
    let (c, cl) = (adp.higher, adp.lower);
    let k = tree.cell(c).level();
    let lower = tree.stack(Some(cl));
    let upper = tree.stack(Some(c));
    let walls: Vec<Disc> = lower.iter().skip(1).step_by(2).map(|&s| tree.section_disc(s).unwrap().dbl()).collect();
    let escape = tree.cell(cl).rts.as_ref().map(|t| t.radius.half());

    let stack = lift(ctx, &tree.polys, k, &adp.point, prec).map_err(|e| stall_or_cad(e, c, cl, k + 1, &adp.point))?;
    let mut out = Vec::new();
    // landing position of each section: 0 = -inf, j = j-th lower section, s+1 = +inf
    let s = walls.len();
    let mut land = vec![0usize];
    for (i, v) in stack.sections.iter().enumerate() {
        let mut v: AlgVec = v.clone();
        let pos = loop {
            let w = v.disc().unwrap();
            if let Some(j) = walls.iter().position(|d| d.contains(w)) {
                break j + 1;
            }
            let gone = match &escape {
                Some(r) => !w.meets_origin_disc(r),
                None => false,
            };
            if gone {
                break if w.center.re.is_negative() { 0 } else { s + 1 };
            }
            v = ctx.refine(&v, v.prec() * 2).map_err(|e| stall_or_cad(e, c, cl, k + 1, &adp.point))?;
        };
        if (1..=s).contains(&pos) {
            out.push(AdjacencyPoint {
                higher: upper[2 * i + 1],
                lower: lower[2 * pos - 1],
                point: adp.point.push_section(v),
            });
        }
        land.push(pos);
    }
    land.push(s + 1);
    let mut base = adp.point.clone();
    base.alg = stack.base;
    for i in 1..land.len() {
        for t in land[i - 1] + 1..=land[i] {
            let sl = lower[2 * (t - 1)];
            let q = tree.cell(sl).witness.clone().expect("sector without witness");
            out.push(AdjacencyPoint { higher: upper[2 * (i - 1)], lower: sl, point: base.push_rational(q) });
        }
    }
    Ok(out)
}

/// Adjacency points for all codimension-one pairs, level by level.
///
/// In restricted mode, the pairs at level `k` are only computed among cells
/// in the closure of the level-`k` cells that have a solution cell above them.
pub fn adjacency_points(ctx: &Ralg, tree: &CellTree, opts: &AdjacencyOptions) -> Result<Vec<AdjacencyPoint>, AdjacencyError> {
    let n = tree.n();
    let above = opts.restrict.then(|| solution_above(tree));
    let mut level = same_stack(tree, None);
    let mut all = Vec::new();
    let mut keep = vec![true; tree.cells.len()];
    for k in 1..=n {
        if let Some(above) = &above {
            let seeds: Vec<usize> = tree.cells_at(k).map(|c| c.id).filter(|&c| above[c]).collect();
            keep = descending_closure(tree.cells.len(), &level, &seeds);
            level.retain(|a| keep[a.higher] && keep[a.lower]);
        }
        if k == n {
            break;
        }
        let bases: Vec<usize> = tree.cells_at(k).map(|c| c.id).filter(|&c| keep[c]).collect();
        let same = par::map(&bases, opts.parallel, |&c| same_stack(tree, Some(c)));
        let cross = par::map(&level, opts.parallel, |a| cross_stack(ctx, tree, a, opts.precision));
        let mut next: Vec<AdjacencyPoint> = same.into_iter().flatten().collect();
        for r in cross {
            next.extend(r?);
        }
        all.append(&mut level);
        level = next;
    }
    all.append(&mut level);
    all.sort_by_key(|a| (a.higher, a.lower));
    Ok(all)
}

fn solution_above(tree: &CellTree) -> Vec<bool> {
    let m = tree.cells.len();
    let mut above = vec![false; m];
    // children always have larger ids than their parent
    for id in (0..m).rev() {
        let c = tree.cell(id);
        above[id] = if c.children.is_empty() { c.truth } else { c.children.iter().any(|&ch| above[ch]) };
    }
    above
}

fn descending_closure(m: usize, edges: &[AdjacencyPoint], seeds: &[usize]) -> Vec<bool> {
    let mut down = vec![Vec::new(); m];
    for a in edges {
        down[a.higher].push(a.lower);
    }
    let mut mark = vec![false; m];
    let mut todo = seeds.to_vec();
    while let Some(c) = todo.pop() {
        if !std::mem::replace(&mut mark[c], true) {
            todo.extend(down[c].iter().copied());
        }
    }
    mark
}

/// Codimension-one adjacency graph of top-level cells with derived queries.
#[derive(Clone, Debug)]
pub struct AdjacencyGraph {
    /// `(higher, lower)` pairs, sorted.
    pub edges: Vec<(usize, usize)>,
    down: Vec<Vec<usize>>,
    dims: Vec<usize>,
}

impl AdjacencyGraph {
    /// `dims[c]` is the dimension of cell `c`; edges go from higher to lower.
    pub fn new(dims: Vec<usize>, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut down = vec![Vec::new(); dims.len()];
        for &(h, l) in &edges {
            assert_eq!(dims[h], dims[l] + 1, "edge {h}-{l} does not drop one dimension");
            down[h].push(l);
        }
        AdjacencyGraph { edges, down, dims }
    }

    pub fn below(&self, c: usize) -> &[usize] {
        &self.down[c]
    }

    /// `c` and every cell reachable by descending edges, sorted.
    pub fn closure_cells(&self, c: usize) -> Vec<usize> {
        self.closure_of_set(&[c])
    }

    pub fn closure_of_set(&self, cs: &[usize]) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        let mut todo: Vec<usize> = cs.to_vec();
        while let Some(c) = todo.pop() {
            if seen.insert(c) {
                todo.extend(self.down[c].iter().copied());
            }
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Unordered pairs `(a, b)`, `a < b`, one in the closure of the other.
    pub fn full_adjacency(&self, cells: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &c in cells {
            for d in self.closure_cells(c) {
                if d != c {
                    out.push((c.min(d), c.max(d)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Components of `subset` under full adjacency restricted to `subset`.
    pub fn connected_components(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let m = self.dims.len();
        let mut member = vec![usize::MAX; m];
        for (t, &c) in subset.iter().enumerate() {
            member[c] = t;
        }
        let mut uf = UnionFind::new(subset.len());
        // reach[c]: subset members in the closure of c, as union-find elements
        let mut order: Vec<usize> = (0..m).filter(|&c| !self.down[c].is_empty() || member[c] != usize::MAX).collect();
        order.sort_by_key(|&c| self.dims[c]);
        let mut reach: Vec<Vec<usize>> = vec![Vec::new(); m];
        for c in order {
            let mut r: Vec<usize> = Vec::new();
            for &l in &self.down[c] {
                r.extend(reach[l].iter().copied());
            }
            if member[c] != usize::MAX {
                for &x in &r {
                    uf.union(member[c], x);
                }
                r = vec![member[c]];
            } else {
                r.iter_mut().for_each(|x| *x = uf.find(*x));
                r.sort_unstable();
                r.dedup();
            }
            reach[c] = r;
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (t, &c) in subset.iter().enumerate() {
            groups.entry(uf.find(t)).or_default().push(c);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.iter_mut().for_each(|g| g.sort_unstable());
        out.sort();
        out
    }
}

/// Decomposition plus adjacency.
pub struct Adjacency {
    pub points: Vec<AdjacencyPoint>,
    /// Codimension-one pairs among top-level cells.
    pub graph: AdjacencyGraph,
}

pub fn cad_adjacency(ctx: &Ralg, sys: &InputSystem, opts: &AdjacencyOptions) -> Result<(CellTree, Adjacency), AdjacencyError> {
    let copts = Options { precision: opts.precision, parallel: opts.parallel };
    let tree = decompose(ctx, sys, &copts)?;
    let adj = adjacency(ctx, &tree, opts)?;
    Ok((tree, adj))
}

pub fn adjacency(ctx: &Ralg, tree: &CellTree, opts: &AdjacencyOptions) -> Result<Adjacency, AdjacencyError> {
    let points = adjacency_points(ctx, tree, opts)?;
    let n = tree.n();
    let dims: Vec<usize> = tree.cells.iter().map(|c| c.dim).collect();
    let edges = points.iter().filter(|a| tree.cell(a.higher).level() == n).map(|a| (a.higher, a.lower)).collect();
    Ok(Adjacency { graph: AdjacencyGraph::new(dims, edges), points })
}

/// Whether an adjacency point is close to the lower cell's sample point in
/// the required sense. Algebraic coordinates are refined until the answer
/// is certain.
pub fn condition_holds(ctx: &Ralg, tree: &CellTree, adp: &AdjacencyPoint) -> Result<bool, RalgError> {
    let low = tree.spt(adp.lower);
    let b = &adp.point;
    if b.len() != low.len() {
        return Ok(false);
    }
    let low_discs = low.alg.discs();
    for i in 0..low.len() {
        match (low.coord(i), b.coord(i)) {
            (Coord::Rat(a), Coord::Rat(q)) => {
                if a != q {
                    return Ok(false);
                }
            }
            (Coord::Rat(_), Coord::Alg(_)) => return Ok(false),
            (Coord::Alg(t), Coord::Rat(q)) => {
                if !low_discs[t - 1].dbl().contains_real_rational(q) {
                    return Ok(false);
                }
            }
            (Coord::Alg(t), Coord::Alg(u)) => {
                let target = low_discs[t - 1].dbl();
                let mut v = truncate(&b.alg, u);
                loop {
                    let w = v.disc().unwrap();
                    if target.contains(w) {
                        break;
                    }
                    if !target.intersects(w) {
                        return Ok(false);
                    }
                    v = ctx.refine(&v, v.prec() * 2)?;
                }
            }
        }
    }
    Ok(true)
}

/// Whether every projection factor has the same sign at the adjacency point
/// as at the sample point of the higher cell. Necessary for the point to lie
/// in that cell, since cells are sign-invariant for the projection factors.
pub fn signs_match_cell(ctx: &Ralg, tree: &CellTree, adp: &AdjacencyPoint) -> Result<bool, RalgError> {
    let spt = tree.spt(adp.higher);
    let k = tree.cell(adp.higher).level();
    for level in &tree.polys.levels[..k] {
        for f in level {
            let a = ctx.sign_at(&spt.alg, &spt.specialize(f, None))?;
            let b = ctx.sign_at(&adp.point.alg, &adp.point.specialize(f, None))?;
            if a != b {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn truncate(v: &AlgVec, level: usize) -> AlgVec {
    let mut v = v.clone();
    while v.level() > level {
        v = v.parent();
    }
    v
}
