//! Projection, the cell tree of the induced decomposition, sample points and
//! classification against the input system.
//!
//! Stack positions are 1-based: odd positions are sectors, even positions are
//! sections, so a stack with `r` sections has positions `1..=2r+1`.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{simplest_between, Dyadic, Round};
use crate::par;
use crate::poly::{discriminant, gcd_q, resultant, squarefree_part, PolyQ};
use crate::ralg::{AlgVec, Node, Ralg, RalgError, Theta, DEFAULT_PRECISION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Rel {
    /// Whether `s rel 0` holds for a sign `s`.
    pub fn holds(self, s: i32) -> bool {
        match self {
            Rel::Lt => s < 0,
            Rel::Le => s <= 0,
            Rel::Eq => s == 0,
            Rel::Ne => s != 0,
            Rel::Ge => s >= 0,
            Rel::Gt => s > 0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

/// `poly rel 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub poly: PolyQ,
    pub rel: Rel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(usize),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn eval(&self, atoms: &[bool]) -> bool {
        match self {
            Formula::Atom(i) => atoms[*i],
            Formula::And(fs) => fs.iter().all(|f| f.eval(atoms)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(atoms)),
        }
    }
}

/// A quantifier-free system over ordered variables; the last variable is the
/// innermost (lifted last).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSystem {
    pub vars: Vec<String>,
    pub atoms: Vec<Atom>,
    pub formula: Formula,
}

impl InputSystem {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Truth value given the sign of every atom polynomial.
    pub fn holds(&self, signs: &[i32]) -> bool {
        let t: Vec<bool> = self.atoms.iter().zip(signs).map(|(a, &s)| a.rel.holds(s)).collect();
        self.formula.eval(&t)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CadError {
    #[error("not well-based: a level-{level} polynomial vanishes identically over cell {path:?} at ({point})")]
    NotWellBased { level: usize, path: Vec<u32>, point: String },
    #[error("working precision exceeded the cap of {0} bits")]
    PrecisionCap(u64),
    #[error("substitution is not an invertible linear change of variables")]
    SingularSubstitution,
}

impl From<RalgError> for CadError {
    fn from(e: RalgError) -> Self {
        match e {
            RalgError::PrecisionCap(b) => CadError::PrecisionCap(b),
            RalgError::IdenticallyZero { level, .. } => {
                CadError::NotWellBased { level, path: Vec::new(), point: String::new() }
            }
        }
    }
}

/// Replace every variable `x_i` by the linear form `images[i]`.
pub fn apply_linear_substitution(sys: &InputSystem, images: &[PolyQ]) -> Result<InputSystem, CadError> {
    let n = sys.nvars();
    if images.len() != n || images.iter().any(|p| p.nvars() != n || p.total_degree() > 1) {
        return Err(CadError::SingularSubstitution);
    }
    let mut m: Vec<Vec<BigRational>> = images
        .iter()
        .map(|p| {
            (0..n)
                .map(|j| {
                    let c = p.coeffs_in(j);
                    c.get(1).and_then(|c| c.as_constant()).unwrap_or_else(BigRational::zero)
                })
                .collect()
        })
        .collect();
    if !invertible(&mut m) {
        return Err(CadError::SingularSubstitution);
    }
    let atoms = sys.atoms.iter().map(|a| Atom { poly: a.poly.compose(images), rel: a.rel }).collect();
    Ok(InputSystem { vars: sys.vars.clone(), atoms, formula: sys.formula.clone() })
}

fn invertible(m: &mut [Vec<BigRational>]) -> bool {
    let n = m.len();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return false;
        };
        m.swap(c, p);
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[r][j] -= t;
            }
        }
    }
    true
}

/// Per-level bound polynomials. `levels[k]` lists pairwise coprime,
/// square-free, primitive factors in `k + 1` variables whose product is the
/// level-`k+1` polynomial; an empty list marks a level without polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPolys {
    pub levels: Vec<Vec<PolyQ>>,
}

impl LevelPolys {
    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn product(&self, k: usize) -> Option<PolyQ> {
        let fs = &self.levels[k];
        let first = fs.first()?;
        Some(fs[1..].iter().fold(first.clone(), |a, b| a.mul(b)))
    }
}

/// Reduced projection: leading and trailing coefficients, discriminants and
/// pairwise resultants of a coprime square-free basis, level by level.
pub fn project_and_normalize(sys: &InputSystem) -> LevelPolys {
    let n = sys.nvars();
    let mut pending: Vec<Vec<PolyQ>> = vec![Vec::new(); n];
    for a in &sys.atoms {
        push_poly(&mut pending, &a.poly);
    }
    let mut levels = vec![Vec::new(); n];
    for k in (0..n).rev() {
        let basis = coprime_basis(std::mem::take(&mut pending[k]), k);
        for (i, b) in basis.iter().enumerate() {
            push_poly(&mut pending, &b.leading_coeff(k));
            if let Some(t) = b.coeffs_in(k).into_iter().find(|c| !c.is_zero()) {
                push_poly(&mut pending, &t);
            }
            if b.deg(k) >= 2 {
                push_poly(&mut pending, &discriminant(b, k).expect("main variable occurs"));
            }
            for c in &basis[i + 1..] {
                push_poly(&mut pending, &resultant(b, c, k).expect("main variable occurs"));
            }
        }
        let keep: Vec<usize> = (0..=k).collect();
        levels[k] = basis.iter().map(|b| b.select_vars(&keep)).collect();
    }
    LevelPolys { levels }
}

/// Split `p` into its content and primitive part with respect to its main
/// variable and file the square-free primitive part at that level.
fn push_poly(pending: &mut [Vec<PolyQ>], p: &PolyQ) {
    if p.is_constant() {
        return;
    }
    let m = p.main_var().unwrap();
    let (_, z) = p.to_primitive_z();
    let c = z.content_in(m);
    if !c.is_constant() {
        push_poly(pending, &c.to_q());
    }
    let sf = squarefree_part(&z.div(&c).to_q(), m).normalized();
    if !pending[m].contains(&sf) {
        pending[m].push(sf);
    }
}

fn coprime_basis(polys: Vec<PolyQ>, k: usize) -> Vec<PolyQ> {
    let mut basis: Vec<PolyQ> = Vec::new();
    for p in polys {
        let mut p = p;
        let mut i = 0;
        while i < basis.len() && p.deg(k) > 0 {
            let g = gcd_q(&p, &basis[i]);
            if g.deg(k) > 0 {
                let rest = basis[i].div(&g);
                p = p.div(&g);
                basis[i] = g.normalized();
                if rest.deg(k) > 0 {
                    basis.push(rest.normalized());
                }
            }
            i += 1;
        }
        if p.deg(k) > 0 {
            basis.push(p.normalized());
        }
    }
    basis
}

/// `PT(v, w, I, J)`: algebraic coordinates at `alg_indices`, rational ones at
/// `rat_indices` (0-based coordinate indices).
#[derive(Clone, Debug, Default)]
pub struct SamplePoint {
    pub alg: AlgVec,
    pub rat: Vec<BigRational>,
    pub alg_indices: Vec<usize>,
    pub rat_indices: Vec<usize>,
}

/// One coordinate of a sample point.
pub enum Coord<'a> {
    /// Algebraic, as the level (1-based) in the algebraic vector.
    Alg(usize),
    Rat(&'a BigRational),
}

impl SamplePoint {
    pub fn len(&self) -> usize {
        self.alg_indices.len() + self.rat_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, i: usize) -> Coord<'_> {
        if let Some(t) = self.alg_indices.iter().position(|&j| j == i) {
            Coord::Alg(t + 1)
        } else {
            let t = self.rat_indices.iter().position(|&j| j == i).expect("coordinate out of range");
            Coord::Rat(&self.rat[t])
        }
    }

    /// `f` with the rational coordinates substituted, as a polynomial in the
    /// algebraic coordinates followed by `x_extra` if given.
    pub fn specialize(&self, f: &PolyQ, extra: Option<usize>) -> PolyQ {
        let mut g = f.clone();
        for (&j, q) in self.rat_indices.iter().zip(&self.rat) {
            if j < g.nvars() && g.involves(j) {
                g = g.substitute(j, q);
            }
        }
        let mut keep: Vec<usize> = self.alg_indices.iter().copied().filter(|&j| j < g.nvars()).collect();
        keep.extend(extra);
        g.select_vars(&keep)
    }

    /// Extend by a rational coordinate.
    pub fn push_rational(&self, q: BigRational) -> SamplePoint {
        let mut s = self.clone();
        s.rat_indices.push(self.len());
        s.rat.push(q);
        s
    }

    /// Extend by an algebraic coordinate; `v` is one level above `self.alg`.
    pub fn push_section(&self, v: AlgVec) -> SamplePoint {
        let mut s = self.clone();
        s.alg_indices.push(self.len());
        s.alg = v;
        s
    }

    pub fn approx(&self) -> Vec<f64> {
        let a = self.alg.approx();
        (0..self.len())
            .map(|i| match self.coord(i) {
                Coord::Alg(t) => a[t - 1],
                Coord::Rat(q) => rat_to_f64(q),
            })
            .collect()
    }
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    Dyadic::from_rational(q, 64, Round::Nearest).to_f64()
}

impl fmt::Display for SamplePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.approx().iter().map(|x| format!("{x:.6}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub index_path: Vec<u32>,
    pub dim: usize,
    /// Rational coordinate at the cell's own level, for sectors.
    pub witness: Option<BigRational>,
    /// Algebraic vector ending in the cell's own coordinate, for sections.
    pub node: Option<Arc<Node>>,
    /// Root isolation data of the fiber polynomial above the sample point;
    /// `None` above the top level or when the fiber has no polynomial.
    pub rts: Option<Arc<Theta>>,
    /// The cell lies in the solution set (top-level cells only).
    pub truth: bool,
}

impl Cell {
    pub fn level(&self) -> usize {
        self.index_path.len()
    }

    pub fn is_section(&self) -> bool {
        self.index_path.last().is_some_and(|p| p % 2 == 0)
    }

    pub fn position(&self) -> u32 {
        *self.index_path.last().unwrap()
    }
}

/// The decomposition as a tree of stacks. Cell ids are depth-first order;
/// `roots` are the level-1 cells.
#[derive(Clone, Debug)]
pub struct CellTree {
    pub polys: LevelPolys,
    pub cells: Vec<Cell>,
    pub roots: Vec<usize>,
}

impl CellTree {
    pub fn n(&self) -> usize {
        self.polys.n()
    }

    pub fn cell(&self, id: usize) -> &Cell {
        &self.cells[id]
    }

    /// Children of `id`, or the level-1 cells for `None`.
    pub fn stack(&self, id: Option<usize>) -> &[usize] {
        match id {
            Some(c) => &self.cells[c].children,
            None => &self.roots,
        }
    }

    pub fn cells_at(&self, level: usize) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter().filter(move |c| c.level() == level)
    }

    /// Ancestor chain from level 1 down to `id` inclusive.
    pub fn path(&self, id: usize) -> Vec<usize> {
        let mut p = vec![id];
        while let Some(q) = self.cells[*p.last().unwrap()].parent {
            p.push(q);
        }
        p.reverse();
        p
    }

    pub fn spt(&self, id: usize) -> SamplePoint {
        sample_along(&self.cells, &self.path(id))
    }

    /// Isolating disc of the cell's own coordinate, for sections.
    pub fn section_disc(&self, id: usize) -> Option<&crate::arith::Disc> {
        self.cells[id].node.as_ref().map(|n| &n.theta.discs[n.index])
    }
}

fn sample_along(cells: &[Cell], path: &[usize]) -> SamplePoint {
    let mut nodes = Vec::new();
    let mut sp = SamplePoint::default();
    for (i, &c) in path.iter().enumerate() {
        let cell = &cells[c];
        match (&cell.node, &cell.witness) {
            (Some(n), _) => {
                nodes.push(n.clone());
                sp.alg_indices.push(i);
            }
            (None, Some(q)) => {
                sp.rat.push(q.clone());
                sp.rat_indices.push(i);
            }
            (None, None) => unreachable!("cell without sample coordinate"),
        }
    }
    sp.alg = AlgVec::from_levels(&nodes);
    sp
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Initial working precision in bits.
    pub precision: u64,
    pub parallel: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { precision: DEFAULT_PRECISION, parallel: true }
    }
}

/// Real roots and sector witnesses of a fiber.
pub struct Stack {
    pub rts: Option<Arc<Theta>>,
    /// Refined representation of the base point's algebraic part.
    pub base: AlgVec,
    pub sections: Vec<AlgVec>,
    pub witnesses: Vec<BigRational>,
}

/// Factors of the level-`k+1` polynomial specialized at `sample`; `Err(i)`
/// when factor `i` vanishes identically.
pub fn fiber_factors(polys: &LevelPolys, k: usize, sample: &SamplePoint) -> Result<Vec<PolyQ>, usize> {
    let mut out = Vec::new();
    for (i, f) in polys.levels[k].iter().enumerate() {
        let g = sample.specialize(f, Some(k));
        if g.is_zero() {
            return Err(i);
        }
        if !g.is_constant() {
            out.push(g);
        }
    }
    Ok(out)
}

/// Isolate the real roots of the level-`k+1` polynomial over `sample` and
/// pick sector witnesses.
pub fn lift(ctx: &Ralg, polys: &LevelPolys, k: usize, sample: &SamplePoint, prec: u64) -> Result<Stack, RalgError> {
    let level = sample.alg.level();
    let factors =
        fiber_factors(polys, k, sample).map_err(|factor| RalgError::IdenticallyZero { level: level + 1, factor })?;
    if factors.is_empty() {
        return Ok(Stack {
            rts: None,
            base: sample.alg.clone(),
            sections: Vec::new(),
            witnesses: vec![BigRational::zero()],
        });
    }
    let out = ctx.alg_roots(&sample.alg, factors, prec)?;
    let witnesses = sector_witnesses(&out.theta);
    Ok(Stack { rts: Some(out.theta), base: out.base, sections: out.roots, witnesses })
}

/// Outer bounds of the real section of a disc, if it meets the real axis.
fn real_section(d: &crate::arith::Disc) -> Option<(Dyadic, Dyadic)> {
    let r2 = &d.radius * &d.radius;
    let y2 = &d.center.im * &d.center.im;
    if y2 > r2 {
        return None;
    }
    let s = (&r2 - &y2).sqrt(128, Round::Up);
    Some((&d.center.re - &s, &d.center.re + &s))
}

/// Rationals `-R < q_1 < α_1 < ... < α_r < q_{r+1} < R` outside every doubled disc.
pub fn sector_witnesses(theta: &Theta) -> Vec<BigRational> {
    let mut blocked: Vec<(Dyadic, Dyadic)> = theta.discs.iter().filter_map(|d| real_section(&d.dbl())).collect();
    blocked.sort();
    let real = theta.real_indices();
    let r = &theta.radius;
    let mut bounds = vec![-r];
    for &j in &real {
        let (a, b) = real_section(&theta.discs[j].dbl()).unwrap();
        bounds.push(a);
        bounds.push(b);
    }
    bounds.push(r.clone());
    bounds
        .chunks(2)
        .map(|gap| free_point(&gap[0], &gap[1], &blocked).expect("no room between isolating discs").to_rational())
        .collect()
}

/// Simplest dyadic in `(lo, hi)` outside all blocked closed intervals.
fn free_point(lo: &Dyadic, hi: &Dyadic, blocked: &[(Dyadic, Dyadic)]) -> Option<Dyadic> {
    let mut start = lo.clone();
    for (a, b) in blocked {
        if b <= &start || a >= hi {
            continue;
        }
        if a > &start {
            return Some(simplest_between(&start, a));
        }
        start = Dyadic::max(&start, b);
        if &start >= hi {
            return None;
        }
    }
    (start < *hi).then(|| simplest_between(&start, hi))
}

struct Builder<'a> {
    ctx: &'a Ralg,
    polys: &'a LevelPolys,
    prec: u64,
    cells: Vec<Cell>,
}

impl Builder<'_> {
    fn push(&mut self, parent: Option<usize>, index_path: Vec<u32>, dim: usize, witness: Option<BigRational>, node: Option<Arc<Node>>) -> usize {
        let id = self.cells.len();
        self.cells.push(Cell { id, parent, children: Vec::new(), index_path, dim, witness, node, rts: None, truth: false });
        if let Some(p) = parent {
            self.cells[p].children.push(id);
        }
        id
    }

    fn build(&mut self, path: &mut Vec<usize>) -> Result<(), CadError> {
        let k = path.len();
        if k == self.polys.n() {
            return Ok(());
        }
        let id = *path.last().unwrap();
        let sample = sample_along(&self.cells, path);
        let stack = lift(self.ctx, self.polys, k, &sample, self.prec).map_err(|e| match e {
            RalgError::IdenticallyZero { .. } => CadError::NotWellBased {
                level: k + 1,
                path: self.cells[id].index_path.clone(),
                point: sample.to_string(),
            },
            RalgError::PrecisionCap(b) => CadError::PrecisionCap(b),
        })?;
        // the refined base replaces the stored ancestors' representations
        let refined = stack.base.levels();
        let mut t = 0;
        for &a in path.iter() {
            if self.cells[a].node.is_some() {
                self.cells[a].node = Some(refined[t].clone());
                t += 1;
            }
        }
        self.cells[id].rts = stack.rts.clone();
        self.children(Some(id), &stack, path)
    }

    fn children(&mut self, parent: Option<usize>, stack: &Stack, path: &mut Vec<usize>) -> Result<(), CadError> {
        let (base_path, base_dim) = match parent {
            Some(p) => (self.cells[p].index_path.clone(), self.cells[p].dim),
            None => (Vec::new(), 0),
        };
        for pos in 1..=(2 * stack.sections.len() + 1) as u32 {
            let mut ip = base_path.clone();
            ip.push(pos);
            let child = if pos % 2 == 1 {
                let q = stack.witnesses[(pos / 2) as usize].clone();
                self.push(parent, ip, base_dim + 1, Some(q), None)
            } else {
                let v = &stack.sections[(pos / 2 - 1) as usize];
                self.push(parent, ip, base_dim, None, v.node().cloned())
            };
            path.push(child);
            self.build(path)?;
            path.pop();
        }
        Ok(())
    }
}

/// Sample points and root isolation data for every cell.
pub fn sample_points(ctx: &Ralg, polys: &LevelPolys, opts: &Options) -> Result<CellTree, CadError> {
    assert!(polys.n() > 0, "no variables");
    let stack = lift(ctx, polys, 0, &SamplePoint::default(), opts.precision).map_err(|e| match e {
        RalgError::IdenticallyZero { .. } => CadError::NotWellBased { level: 1, path: Vec::new(), point: String::new() },
        RalgError::PrecisionCap(b) => CadError::PrecisionCap(b),
    })?;
    let positions: Vec<u32> = (1..=(2 * stack.sections.len() + 1) as u32).collect();
    let subtrees = par::map(&positions, opts.parallel, |&pos| -> Result<Vec<Cell>, CadError> {
        let mut b = Builder { ctx, polys, prec: opts.precision, cells: Vec::new() };
        let root = if pos % 2 == 1 {
            b.push(None, vec![pos], 1, Some(stack.witnesses[(pos / 2) as usize].clone()), None)
        } else {
            b.push(None, vec![pos], 0, None, stack.sections[(pos / 2 - 1) as usize].node().cloned())
        };
        b.build(&mut vec![root])?;
        Ok(b.cells)
    });
    let mut cells = Vec::new();
    let mut roots = Vec::new();
    for sub in subtrees {
        let sub = sub?;
        let off = cells.len();
        roots.push(off);
        cells.extend(sub.into_iter().map(|mut c| {
            c.id += off;
            c.parent = c.parent.map(|p| p + off);
            c.children.iter_mut().for_each(|x| *x += off);
            c
        }));
    }
    Ok(CellTree { polys: polys.clone(), cells, roots })
}

/// Set the truth flag of every top-level cell.
pub fn classify_cells(ctx: &Ralg, tree: &mut CellTree, sys: &InputSystem, parallel: bool) -> Result<(), CadError> {
    let n = tree.n();
    let leaves: Vec<usize> = tree.cells.iter().filter(|c| c.level() == n).map(|c| c.id).collect();
    let t: &CellTree = tree;
    let truth = par::map(&leaves, parallel, |&id| -> Result<bool, RalgError> {
        let sp = t.spt(id);
        let mut signs = Vec::with_capacity(sys.atoms.len());
        for a in &sys.atoms {
            signs.push(ctx.sign_at(&sp.alg, &sp.specialize(&a.poly, None))?);
        }
        Ok(sys.holds(&signs))
    });
    for (id, b) in leaves.into_iter().zip(truth) {
        tree.cells[id].truth = b?;
    }
    Ok(())
}

/// Decompose `sys`: projection, sample points and classification.
pub fn decompose(ctx: &Ralg, sys: &InputSystem, opts: &Options) -> Result<CellTree, CadError> {
    let polys = project_and_normalize(sys);
    let mut tree = sample_points(ctx, &polys, opts)?;
    classify_cells(ctx, &mut tree, sys, opts.parallel)?;
    Ok(tree)
}
