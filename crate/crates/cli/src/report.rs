//! Driving the pipeline and rendering its results as JSON, DOT or text.

use std::fmt::Write as _;
use std::time::Instant;

use cadadj::adjacency::{adjacency, Adjacency, AdjacencyError, AdjacencyOptions};
use cadadj::arith::{rational_to_decimal, Dyadic};
use cadadj::cad::{apply_linear_substitution, decompose, CadError, CellTree, Coord, InputSystem, Options};
use cadadj::par;
use cadadj::ralg::{Ralg, RalgError};
use serde::Serialize;
use thiserror::Error;

use crate::parse::{parse_poly_list, parse_system, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum AdjacencyMode {
    /// Pairs of cells whose dimensions differ by one.
    #[default]
    Codim1,
    /// All pairs with one cell in the closure of the other.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ComponentScope {
    /// Connected components of the solution set.
    #[default]
    Set,
    /// Connected components of its complement.
    Complement,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Variable order; empty means the identifiers in sorted order.
    pub vars: Vec<String>,
    pub precision: u64,
    pub adjacency: AdjacencyMode,
    pub restrict: bool,
    pub format: Format,
    /// Images of the variables under a linear change of coordinates.
    pub subst: Option<String>,
    pub components: ComponentScope,
    pub timings: bool,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            vars: Vec::new(),
            precision: 53,
            adjacency: AdjacencyMode::Codim1,
            restrict: false,
            format: Format::Json,
            subst: None,
            components: ComponentScope::Set,
            timings: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Cad(#[from] CadError),
    #[error(transparent)]
    Adjacency(AdjacencyError),
}

impl From<AdjacencyError> for RunError {
    fn from(e: AdjacencyError) -> Self {
        match e {
            AdjacencyError::Cad(c) => RunError::Cad(c),
            e => RunError::Adjacency(e),
        }
    }
}

impl From<RalgError> for RunError {
    fn from(e: RalgError) -> Self {
        RunError::Cad(e.into())
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) | RunError::Config(_) => 2,
            RunError::Cad(CadError::NotWellBased { .. }) => 3,
            RunError::Cad(CadError::SingularSubstitution) => 2,
            RunError::Cad(CadError::PrecisionCap(_)) | RunError::Adjacency(_) => 4,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let e = match self {
            RunError::Parse(ParseError::Syntax { line, col, msg }) => {
                json!({"kind": "SyntaxError", "line": line, "column": col, "message": msg})
            }
            RunError::Parse(ParseError::UnknownVariable { line, col, name }) => {
                json!({"kind": "UnknownVariable", "line": line, "column": col, "name": name})
            }
            RunError::Config(m) => json!({"kind": "InvalidConfig", "message": m}),
            RunError::Cad(CadError::NotWellBased { level, path, point }) => {
                json!({"kind": "NotWellBased", "level": level, "index_path": path, "point": point})
            }
            RunError::Cad(CadError::PrecisionCap(b)) => json!({"kind": "PrecisionCap", "bits": b}),
            RunError::Cad(CadError::SingularSubstitution) => json!({"kind": "SingularSubstitution"}),
            RunError::Adjacency(AdjacencyError::RefinementStall { higher, lower }) => {
                json!({"kind": "RefinementStall", "higher": higher, "lower": lower})
            }
            RunError::Adjacency(AdjacencyError::Cad(_)) => unreachable!("converted on construction"),
        };
        json!({ "error": e })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoordOut {
    Rational {
        value: String,
        decimal: String,
    },
    Algebraic {
        /// Defining polynomial in the algebraic coordinates up to this one.
        polynomial: String,
        center_re: String,
        center_im: String,
        radius: String,
        /// The center, to as many significant digits (at most 30) as the
        /// radius certifies.
        decimal: String,
    },
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CellOut {
    pub id: usize,
    pub index_path: Vec<u32>,
    pub dim: usize,
    pub in_set: bool,
    pub sample: Vec<CoordOut>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Counts {
    /// Top-level cells.
    #[serde(rename = "N_CELL")]
    pub n_cell: usize,
    /// Top-level cells in the solution set.
    #[serde(rename = "N_CELL_SET")]
    pub n_cell_set: usize,
    /// Reported adjacency pairs.
    #[serde(rename = "N_ADJ")]
    pub n_adj: usize,
    /// Reported pairs with both cells in the solution set.
    #[serde(rename = "N_ADJ_SET")]
    pub n_adj_set: usize,
    #[serde(rename = "N_CC")]
    pub n_cc: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Timings {
    /// Seconds spent on the decomposition and its sample points.
    pub t_sp: f64,
    /// Seconds spent on adjacency.
    pub t_adj: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub vars: Vec<String>,
    pub cells: Vec<CellOut>,
    pub adjacencies: Vec<[usize; 2]>,
    pub components: Vec<Vec<usize>>,
    pub counts: Counts,
    /// Only filled when requested, so that default output is reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

/// Everything a run computes, for callers that need more than the report.
pub struct Run {
    pub system: InputSystem,
    pub tree: CellTree,
    pub adjacency: Adjacency,
    pub report: Report,
}

pub fn prepare(cfg: &RunConfig, text: &str) -> Result<InputSystem, RunError> {
    if cfg.precision < 24 {
        return Err(RunError::Config("precision must be at least 24 bits".into()));
    }
    for (i, v) in cfg.vars.iter().enumerate() {
        if cfg.vars[..i].contains(v) {
            return Err(RunError::Config(format!("variable `{v}` listed twice")));
        }
    }
    let sys = parse_system(text, &cfg.vars)?;
    match &cfg.subst {
        None => Ok(sys),
        Some(s) => {
            let images = parse_poly_list(s, &sys.vars)?;
            if images.len() != sys.vars.len() {
                return Err(RunError::Config(format!(
                    "substitution has {} images for {} variables",
                    images.len(),
                    sys.vars.len()
                )));
            }
            Ok(apply_linear_substitution(&sys, &images)?)
        }
    }
}

pub fn run(cfg: &RunConfig, text: &str) -> Result<Run, RunError> {
    let system = prepare(cfg, text)?;
    run_system(cfg, system)
}

pub fn run_system(cfg: &RunConfig, system: InputSystem) -> Result<Run, RunError> {
    let ctx = Ralg::new();
    let t0 = Instant::now();
    let tree = decompose(&ctx, &system, &Options { precision: cfg.precision, parallel: cfg.parallel })?;
    let t1 = Instant::now();
    let aopts = AdjacencyOptions { precision: cfg.precision, parallel: cfg.parallel, restrict: cfg.restrict };
    let adj = adjacency(&ctx, &tree, &aopts)?;
    let t2 = Instant::now();

    let n = tree.n();
    let top: Vec<usize> = tree.cells_at(n).map(|c| c.id).collect();
    let in_set: Vec<usize> = top.iter().copied().filter(|&c| tree.cell(c).truth).collect();
    let pairs: Vec<(usize, usize)> = match cfg.adjacency {
        AdjacencyMode::Codim1 => adj.graph.edges.clone(),
        AdjacencyMode::Full => adj.graph.full_adjacency(&top),
    };
    let subset: Vec<usize> = match cfg.components {
        ComponentScope::Set => in_set.clone(),
        ComponentScope::Complement => top.iter().copied().filter(|&c| !tree.cell(c).truth).collect(),
    };
    let components = adj.graph.connected_components(&subset);
    let truth = |c: usize| tree.cell(c).truth;
    let counts = Counts {
        n_cell: top.len(),
        n_cell_set: in_set.len(),
        n_adj: pairs.len(),
        n_adj_set: pairs.iter().filter(|&&(a, b)| truth(a) && truth(b)).count(),
        n_cc: components.len(),
    };
    let samples = par::map(&top, cfg.parallel, |&c| render_sample(&tree, &system.vars, c));
    let cells = top
        .iter()
        .zip(samples)
        .map(|(&c, sample)| {
            let cell = tree.cell(c);
            CellOut { id: c, index_path: cell.index_path.clone(), dim: cell.dim, in_set: cell.truth, sample }
        })
        .collect();
    let timings = cfg.timings.then(|| Timings {
        t_sp: (t1 - t0).as_secs_f64(),
        t_adj: (t2 - t1).as_secs_f64(),
    });
    let report = Report {
        vars: system.vars.clone(),
        cells,
        adjacencies: pairs.iter().map(|&(a, b)| [a, b]).collect(),
        components,
        counts,
        timings,
    };
    Ok(Run { system, tree, adjacency: adj, report })
}

const DIGITS: usize = 30;

/// Significant digits of `center` that a disc of radius `radius` certifies;
/// zero when the disc reaches the origin.
fn certified_digits(center: &Dyadic, radius: &Dyadic) -> usize {
    match (center.ilog2(), radius.ilog2()) {
        (_, None) => DIGITS,
        (None, Some(_)) => 0,
        (Some(c), Some(r)) if c <= r + 1 => 0,
        (Some(c), Some(r)) => (((c - r) as f64 * std::f64::consts::LOG10_2).floor().max(1.0) as usize).min(DIGITS),
    }
}

fn render_sample(tree: &CellTree, vars: &[String], id: usize) -> Vec<CoordOut> {
    let sp = tree.spt(id);
    let nodes = sp.alg.levels();
    let names: Vec<String> = sp.alg_indices.iter().map(|&i| vars[i].clone()).collect();
    (0..sp.len())
        .map(|i| match sp.coord(i) {
            Coord::Rat(q) => CoordOut::Rational { value: q.to_string(), decimal: rational_to_decimal(q, DIGITS) },
            Coord::Alg(t) => {
                let node = &nodes[t - 1];
                let d = &node.theta.discs[node.index];
                let f = &node.fiber.factors[node.theta.members[node.index][0].0];
                let digits = certified_digits(&d.center.re, &d.radius);
                CoordOut::Algebraic {
                    polynomial: f.to_string_with(&names[..t]),
                    center_re: d.center.re.to_decimal_exact(),
                    center_im: d.center.im.to_decimal_exact(),
                    radius: d.radius.to_decimal_exact(),
                    decimal: if digits == 0 { "0".to_string() } else { rational_to_decimal(&d.center.re.to_rational(), digits) },
                }
            }
        })
        .collect()
}

pub fn emit_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Undirected graph, one node per cell labelled `id:dim`, solution cells filled.
pub fn emit_dot(report: &Report) -> String {
    let mut s = String::from("graph cad {\n");
    for c in &report.cells {
        let style = if c.in_set { ", style=filled, fillcolor=lightblue" } else { "" };
        writeln!(s, "  {} [label=\"{}:{}\"{}];", c.id, c.id, c.dim, style).unwrap();
    }
    for [a, b] in &report.adjacencies {
        writeln!(s, "  {a} -- {b};").unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn emit_text(report: &Report) -> String {
    let mut s = String::new();
    let c = &report.counts;
    writeln!(s, "variables: {}", report.vars.join(", ")).unwrap();
    writeln!(
        s,
        "cells: {} ({} in set), adjacencies: {} ({} in set), components: {}",
        c.n_cell, c.n_cell_set, c.n_adj, c.n_adj_set, c.n_cc
    )
    .unwrap();
    if let Some(t) = &report.timings {
        writeln!(s, "time: sample points {:.3}s, adjacency {:.3}s", t.t_sp, t.t_adj).unwrap();
    }
    for cell in &report.cells {
        let coords: Vec<&str> = cell
            .sample
            .iter()
            .map(|x| match x {
                CoordOut::Rational { decimal, .. } | CoordOut::Algebraic { decimal, .. } => decimal.as_str(),
            })
            .collect();
        let path: Vec<String> = cell.index_path.iter().map(|i| i.to_string()).collect();
        writeln!(
            s,
            "cell {} [{}] dim {}{}: ({})",
            cell.id,
            path.join(","),
            cell.dim,
            if cell.in_set { " *" } else { "" },
            coords.join(", ")
        )
        .unwrap();
    }
    for [a, b] in &report.adjacencies {
        writeln!(s, "adjacent {a} {b}").unwrap();
    }
    for (k, comp) in report.components.iter().enumerate() {
        let ids: Vec<String> = comp.iter().map(|i| i.to_string()).collect();
        writeln!(s, "component {}: {}", k + 1, ids.join(" ")).unwrap();
    }
    s
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => emit_json(report),
        Format::Dot => emit_dot(report),
        Format::Text => emit_text(report),
    }
}
