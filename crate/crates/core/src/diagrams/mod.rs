//! Bichrome diagrams in Morse slice form.
//!
//! A diagram is a list of rows read bottom to top. Each row is a list of elementary events
//! laid side by side; the outputs of one row are the inputs of the next. Closed red
//! components carry a cohomology value on their meridian; blue edges carry a module.

mod build;
mod kirby;

pub use build::*;
pub use kirby::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::modules_catalog::{dual_module, is_typical_simple, parse_module, tensor_module, trivial_module, WeightModule};
use crate::qalgebra::UqAlgebra;
use crate::scalars::{format_rational, frac, parse_rational, RootOfUnityConfig, Rational, C64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Direction of travel along the horizontal part of a cup or cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrow {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Id,
    /// Crossing whose bottom-left to top-right strand passes over.
    Over,
    /// Crossing whose bottom-left to top-right strand passes under.
    Under,
    Cup(Arrow),
    Cap(Arrow),
    Coupon(usize),
}

impl Event {
    pub fn token(&self) -> String {
        match self {
            Event::Id => "id".into(),
            Event::Over => "over".into(),
            Event::Under => "under".into(),
            Event::Cup(Arrow::Left) => "cup<".into(),
            Event::Cup(Arrow::Right) => "cup>".into(),
            Event::Cap(Arrow::Left) => "cap<".into(),
            Event::Cap(Arrow::Right) => "cap>".into(),
            Event::Coupon(k) => format!("coupon:{k}"),
        }
    }

    pub fn from_token(s: &str) -> Option<Event> {
        Some(match s.trim() {
            "id" | "|" => Event::Id,
            "over" => Event::Over,
            "under" => Event::Under,
            "cup<" => Event::Cup(Arrow::Left),
            "cup>" => Event::Cup(Arrow::Right),
            "cap<" => Event::Cap(Arrow::Left),
            "cap>" => Event::Cap(Arrow::Right),
            t => Event::Coupon(t.strip_prefix("coupon:")?.parse().ok()?),
        })
    }

    pub fn arity(&self, coupons: &[Coupon]) -> Option<(usize, usize)> {
        Some(match self {
            Event::Id => (1, 1),
            Event::Over | Event::Under => (2, 2),
            Event::Cup(_) => (0, 2),
            Event::Cap(_) => (2, 0),
            Event::Coupon(k) => {
                let c = coupons.get(*k)?;
                (c.inputs.len(), c.outputs.len())
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Color {
    /// Red component of the surgery link.
    Surgery,
    /// Red component of the graph.
    Red,
    /// Blue edge colored by a module expression such as `typical(1/3)`.
    Blue(String),
}

impl Color {
    pub fn token(&self) -> String {
        match self {
            Color::Surgery => "surgery".into(),
            Color::Red => "red".into(),
            Color::Blue(s) => s.clone(),
        }
    }

    pub fn from_token(s: &str) -> Color {
        match s.trim() {
            "surgery" => Color::Surgery,
            "red" => Color::Red,
            t => Color::Blue(t.to_string()),
        }
    }

    pub fn is_red(&self) -> bool {
        !matches!(self, Color::Blue(_))
    }
}

/// A coupon leg: module expression and whether the edge runs upward through the leg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub color: String,
    pub up: bool,
}

/// A blue coupon colored by a matrix from the tensor product of its bottom legs to that of
/// its top legs. A downward leg contributes the dual of its module.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupon {
    pub inputs: Vec<Leg>,
    pub outputs: Vec<Leg>,
    pub matrix: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BichromeDiagram {
    pub ell: u32,
    pub rows: Vec<Vec<Event>>,
    pub colors: Vec<Color>,
    pub coupons: Vec<Coupon>,
    /// Meridian values of red components; blue edges take their module degree.
    pub omega: BTreeMap<usize, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub edge: usize,
    pub up: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Point { level: usize, pos: usize, up: bool },
    Cross { crossing: usize, over: bool },
    /// Cup or cap; `pivot` is the exponent of the `g` bead placed there.
    Turn { pivot: i8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LegEnd {
    pub coupon: usize,
    pub output: bool,
    pub leg: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInfo {
    pub closed: bool,
    /// Sites in the order of the orientation. Closed edges start at the base point.
    pub sites: Vec<Site>,
    pub tail: Option<LegEnd>,
    pub head: Option<LegEnd>,
}

impl EdgeInfo {
    pub fn points(&self) -> Vec<usize> {
        self.sites.iter().enumerate().filter(|(_, s)| matches!(s, Site::Point { .. })).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub row: usize,
    pub pos: usize,
    pub over_type: bool,
    pub left: Slot,
    pub right: Slot,
    pub sign: i64,
}

impl Crossing {
    pub fn over(&self) -> Slot {
        if self.over_type { self.left } else { self.right }
    }

    pub fn under(&self) -> Slot {
        if self.over_type { self.right } else { self.left }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub levels: Vec<Vec<Slot>>,
    pub edges: Vec<EdgeInfo>,
    pub crossings: Vec<Crossing>,
}

fn perr(row: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { row, col, msg: msg.into() }
}

struct Place {
    event: usize,
    offset: usize,
    /// First position of the event on this side.
    start: usize,
}

impl BichromeDiagram {
    pub fn cfg(&self) -> Result<RootOfUnityConfig> {
        RootOfUnityConfig::new(self.ell)
    }

    pub fn num_edges(&self) -> usize {
        self.colors.len()
    }

    fn row_places(&self, r: usize) -> (Vec<Place>, Vec<Place>) {
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for (ei, ev) in self.rows[r].iter().enumerate() {
            let (a, b) = ev.arity(&self.coupons).unwrap_or((0, 0));
            let (si, so) = (ins.len(), outs.len());
            for o in 0..a {
                ins.push(Place { event: ei, offset: o, start: si });
            }
            for o in 0..b {
                outs.push(Place { event: ei, offset: o, start: so });
            }
        }
        (ins, outs)
    }

    /// Level widths; fails on mismatched slices or open boundary.
    pub fn widths(&self) -> Result<Vec<usize>> {
        let mut w = vec![0usize];
        let mut placed = vec![false; self.coupons.len()];
        for (r, row) in self.rows.iter().enumerate() {
            let mut ins = 0;
            let mut outs = 0;
            for (c, ev) in row.iter().enumerate() {
                let (a, b) = ev.arity(&self.coupons).ok_or_else(|| perr(r, c, "unknown coupon"))?;
                if let Event::Coupon(k) = ev {
                    if std::mem::replace(&mut placed[*k], true) {
                        return Err(perr(r, c, format!("coupon {k} is placed twice")));
                    }
                }
                ins += a;
                outs += b;
                if ins > w[r] {
                    return Err(perr(r, c, format!("row consumes {ins} strands but only {} arrive", w[r])));
                }
            }
            if ins != w[r] {
                return Err(perr(r, row.len(), format!("row consumes {ins} strands but {} arrive", w[r])));
            }
            w.push(outs);
        }
        if *w.last().unwrap() != 0 {
            return Err(perr(self.rows.len(), 0, "diagram has open strands at the top"));
        }
        Ok(w)
    }

    /// Strands, orientations, edge numbering and traversal order, with colors validated.
    pub fn topology(&self) -> Result<Topology> {
        let top = self.trace()?;
        let nedges = top.edges.len();
        let levels = &top.levels;
        let edges = &top.edges;
        let nrows = self.rows.len();
        if self.colors.len() != nedges {
            return Err(perr(0, 0, format!("diagram has {nedges} edges but {} colors", self.colors.len())));
        }
        // coupon legs must be blue and match the edge colors
        for r in 0..nrows {
            let mut ii = 0;
            let mut oo = 0;
            for (c, ev) in self.rows[r].iter().enumerate() {
                if let Event::Coupon(k) = ev {
                    let cp = &self.coupons[*k];
                    for (o, leg) in cp.inputs.iter().enumerate() {
                        let s = levels[r][ii + o];
                        check_leg(&self.colors[s.edge], leg, r, c)?;
                    }
                    for (o, leg) in cp.outputs.iter().enumerate() {
                        check_leg(&self.colors[levels[r + 1][oo + o].edge], leg, r, c)?;
                    }
                }
                let (a, b) = ev.arity(&self.coupons).unwrap();
                ii += a;
                oo += b;
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if self.colors[i].is_red() && !e.closed {
                return Err(perr(0, 0, format!("red edge {i} meets a coupon; coupons are blue only")));
            }
        }
        for k in self.omega.keys() {
            if *k >= nedges {
                return Err(perr(0, 0, format!("omega given for missing component {k}")));
            }
        }
        Ok(top)
    }

    /// Topology of the uncolored diagram.
    pub fn trace(&self) -> Result<Topology> {
        let widths = self.widths()?;
        let nrows = self.rows.len();
        let mut offset = vec![0usize; nrows + 2];
        for t in 0..=nrows {
            offset[t + 1] = offset[t] + widths[t];
        }
        let npts = offset[nrows + 1];
        let pid = |t: usize, p: usize| offset[t] + p;
        let mut parent: Vec<usize> = (0..npts).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        let union = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra] = rb;
            }
        };
        // direction constraints: (point, up, row, col)
        let mut fixed: Vec<(usize, bool, usize, usize)> = Vec::new();
        let mut same: Vec<(usize, usize, usize, usize)> = Vec::new();
        let mut places = Vec::with_capacity(nrows);
        for r in 0..nrows {
            let (ins, outs) = self.row_places(r);
            let mut ii = 0;
            let mut oo = 0;
            for (c, ev) in self.rows[r].iter().enumerate() {
                match ev {
                    Event::Id => {
                        union(&mut parent, pid(r, ii), pid(r + 1, oo));
                        same.push((pid(r, ii), pid(r + 1, oo), r, c));
                    }
                    Event::Over | Event::Under => {
                        union(&mut parent, pid(r, ii), pid(r + 1, oo + 1));
                        union(&mut parent, pid(r, ii + 1), pid(r + 1, oo));
                        same.push((pid(r, ii), pid(r + 1, oo + 1), r, c));
                        same.push((pid(r, ii + 1), pid(r + 1, oo), r, c));
                    }
                    Event::Cup(a) => {
                        union(&mut parent, pid(r + 1, oo), pid(r + 1, oo + 1));
                        let left_up = *a == Arrow::Left;
                        fixed.push((pid(r + 1, oo), left_up, r, c));
                        fixed.push((pid(r + 1, oo + 1), !left_up, r, c));
                    }
                    Event::Cap(a) => {
                        union(&mut parent, pid(r, ii), pid(r, ii + 1));
                        let left_up = *a == Arrow::Right;
                        fixed.push((pid(r, ii), left_up, r, c));
                        fixed.push((pid(r, ii + 1), !left_up, r, c));
                    }
                    Event::Coupon(k) => {
                        let cp = &self.coupons[*k];
                        for (o, leg) in cp.inputs.iter().enumerate() {
                            fixed.push((pid(r, ii + o), leg.up, r, c));
                        }
                        for (o, leg) in cp.outputs.iter().enumerate() {
                            fixed.push((pid(r + 1, oo + o), leg.up, r, c));
                        }
                    }
                }
                let (a, b) = ev.arity(&self.coupons).unwrap();
                ii += a;
                oo += b;
            }
            places.push((ins, outs));
        }
        // orientations
        let mut dir: Vec<Option<bool>> = vec![None; npts];
        for &(p, up, r, c) in &fixed {
            match dir[p] {
                Some(d) if d != up => return Err(perr(r, c, "inconsistent orientation")),
                _ => dir[p] = Some(up),
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b, r, c) in &same {
                match (dir[a], dir[b]) {
                    (Some(x), Some(y)) if x != y => return Err(perr(r, c, "inconsistent orientation")),
                    (Some(x), None) => {
                        dir[b] = Some(x);
                        changed = true;
                    }
                    (None, Some(y)) => {
                        dir[a] = Some(y);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        // edge numbering in order of creation
        let mut edge_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut levels: Vec<Vec<Slot>> = vec![Vec::new(); nrows + 1];
        for t in 1..=nrows {
            for p in 0..widths[t] {
                let root = find(&mut parent, pid(t, p));
                let n = edge_of_root.len();
                let e = *edge_of_root.entry(root).or_insert(n);
                let up = dir[pid(t, p)].ok_or_else(|| perr(t - 1, 0, "strand without orientation"))?;
                levels[t].push(Slot { edge: e, up });
            }
        }
        let nedges = edge_of_root.len();
        // crossings
        let mut crossings = Vec::new();
        let mut crossing_at: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for r in 0..nrows {
            let mut ii = 0;
            for ev in &self.rows[r] {
                if matches!(ev, Event::Over | Event::Under) {
                    let left = levels[r][ii];
                    let right = levels[r][ii + 1];
                    let geo = if *ev == Event::Over { 1 } else { -1 };
                    let sign = if left.up == right.up { geo } else { -geo };
                    crossing_at.insert((r, ii), crossings.len());
                    crossings.push(Crossing { row: r, pos: ii, over_type: *ev == Event::Over, left, right, sign });
                }
                ii += ev.arity(&self.coupons).unwrap().0;
            }
        }
        // traversal
        let mut edges: Vec<Option<EdgeInfo>> = vec![None; nedges];
        let walk = |start_t: usize, start_p: usize, start_up: bool| -> Result<(Vec<Site>, Option<LegEnd>, bool)> {
            let mut sites = Vec::new();
            let (mut t, mut p, mut up) = (start_t, start_p, start_up);
            let mut steps = 0usize;
            loop {
                sites.push(Site::Point { level: t, pos: p, up });
                steps += 1;
                if steps > npts + 2 {
                    return Err(perr(t, p, "traversal does not terminate"));
                }
                if up {
                    let pl = &places[t].0[p];
                    let ev = self.rows[t][pl.event];
                    // output start of the event
                    let ostart = places[t].1.iter().position(|q| q.event == pl.event);
                    match ev {
                        Event::Id => {
                            t += 1;
                            p = ostart.unwrap();
                        }
                        Event::Over | Event::Under => {
                            let c = crossing_at[&(t, pl.start)];
                            let from_left = pl.offset == 0;
                            let over = from_left == (ev == Event::Over);
                            sites.push(Site::Cross { crossing: c, over });
                            t += 1;
                            p = ostart.unwrap() + if from_left { 1 } else { 0 };
                        }
                        Event::Cap(a) => {
                            sites.push(Site::Turn { pivot: if a == Arrow::Right { 1 } else { 0 } });
                            p = if pl.offset == 0 { pl.start + 1 } else { pl.start };
                            up = false;
                        }
                        Event::Coupon(k) => {
                            return Ok((sites, Some(LegEnd { coupon: k, output: false, leg: pl.offset }), false));
                        }
                        Event::Cup(_) => unreachable!(),
                    }
                } else {
                    let pl = &places[t - 1].1[p];
                    let ev = self.rows[t - 1][pl.event];
                    let istart = places[t - 1].0.iter().position(|q| q.event == pl.event);
                    match ev {
                        Event::Id => {
                            t -= 1;
                            p = istart.unwrap();
                        }
                        Event::Over | Event::Under => {
                            let is = istart.unwrap();
                            let c = crossing_at[&(t - 1, is)];
                            // left output connects to the right input
                            let to_right = pl.offset == 0;
                            let over = !to_right == (ev == Event::Over);
                            sites.push(Site::Cross { crossing: c, over });
                            t -= 1;
                            p = is + if to_right { 1 } else { 0 };
                        }
                        Event::Cup(a) => {
                            sites.push(Site::Turn { pivot: if a == Arrow::Right { -1 } else { 0 } });
                            p = if pl.offset == 0 { pl.start + 1 } else { pl.start };
                            up = true;
                        }
                        Event::Coupon(k) => {
                            return Ok((sites, Some(LegEnd { coupon: k, output: true, leg: pl.offset }), false));
                        }
                        Event::Cap(_) => unreachable!(),
                    }
                }
                if t == start_t && p == start_p && up == start_up {
                    return Ok((sites, None, true));
                }
            }
        };
        // open edges start at their tail leg
        for r in 0..nrows {
            let mut ii = 0;
            let mut oo = 0;
            for ev in &self.rows[r] {
                if let Event::Coupon(k) = ev {
                    let cp = &self.coupons[*k];
                    for (o, leg) in cp.outputs.iter().enumerate() {
                        if leg.up {
                            let s = levels[r + 1][oo + o];
                            let (sites, head, _) = walk(r + 1, oo + o, true)?;
                            edges[s.edge] = Some(EdgeInfo {
                                closed: false,
                                sites,
                                tail: Some(LegEnd { coupon: *k, output: true, leg: o }),
                                head,
                            });
                        }
                    }
                    for (o, leg) in cp.inputs.iter().enumerate() {
                        if !leg.up {
                            let s = levels[r][ii + o];
                            let (sites, head, _) = walk(r, ii + o, false)?;
                            edges[s.edge] = Some(EdgeInfo {
                                closed: false,
                                sites,
                                tail: Some(LegEnd { coupon: *k, output: false, leg: o }),
                                head,
                            });
                        }
                    }
                }
                let (a, b) = ev.arity(&self.coupons).unwrap();
                ii += a;
                oo += b;
            }
        }
        // closed edges start at the first upward point of the sweep
        for t in 1..=nrows {
            for p in 0..widths[t] {
                let s = levels[t][p];
                if edges[s.edge].is_none() && s.up {
                    let (sites, head, closed) = walk(t, p, true)?;
                    if !closed || head.is_some() {
                        return Err(perr(t - 1, p, "edge neither closed nor ending at a coupon"));
                    }
                    edges[s.edge] = Some(EdgeInfo { closed: true, sites, tail: None, head: None });
                }
            }
        }
        let edges: Vec<EdgeInfo> = edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| perr(0, 0, format!("edge {i} could not be traversed"))))
            .collect::<Result<_>>()?;
        Ok(Topology { levels, edges, crossings })
    }

    /// Cohomology value on the meridian of an edge: the given value for red components,
    /// the module degree for blue edges.
    pub fn meridian(&self, edge: usize) -> Result<Rational> {
        match &self.colors[edge] {
            Color::Blue(expr) => color_degree(expr),
            _ => Ok(frac(self.omega.get(&edge).copied().unwrap_or_else(Rational::zero))),
        }
    }

    pub fn meridians(&self) -> Result<Vec<Rational>> {
        (0..self.num_edges()).map(|e| self.meridian(e)).collect()
    }

    pub fn red_components(&self) -> Vec<usize> {
        (0..self.num_edges()).filter(|e| self.colors[*e].is_red()).collect()
    }

    pub fn surgery_components(&self) -> Vec<usize> {
        (0..self.num_edges()).filter(|e| self.colors[*e] == Color::Surgery).collect()
    }

    /// Equivariance of every coupon on `E`, `F`, `K`.
    pub fn validate_coupons(&self, alg: &UqAlgebra) -> Result<()> {
        for (k, cp) in self.coupons.iter().enumerate() {
            let side = |legs: &[Leg]| -> Result<WeightModule> {
                let mut acc: Option<WeightModule> = None;
                for leg in legs {
                    let m = parse_module(alg, &leg.color)?;
                    let m = if leg.up { m } else { dual_module(alg, &m)? };
                    acc = Some(match acc {
                        None => m,
                        Some(a) => tensor_module(&alg.cfg, &a, &m)?,
                    });
                }
                match acc {
                    Some(a) => Ok(a),
                    None => trivial_module(&alg.cfg, Rational::zero()),
                }
            };
            let vin = side(&cp.inputs)?;
            let vout = side(&cp.outputs)?;
            if cp.matrix.nrows() != vout.dim() || cp.matrix.ncols() != vin.dim() {
                return Err(Error::InvalidConfig(format!(
                    "coupon {k} matrix is {}x{}, expected {}x{}",
                    cp.matrix.nrows(),
                    cp.matrix.ncols(),
                    vout.dim(),
                    vin.dim()
                )));
            }
            if frac(vin.degree) != frac(vout.degree) {
                return Err(Error::DegreeMismatch(format!("coupon {k} joins degrees {} and {}", vin.degree, vout.degree)));
            }
            let m = &cp.matrix;
            let r = [(&vin.e, &vout.e), (&vin.f, &vout.f), (&vin.k, &vout.k)]
                .iter()
                .map(|(a, b)| linalg::max_abs(&(m * *a - *b * m)))
                .fold(0.0, f64::max);
            let scale = linalg::max_abs(m).max(1.0);
            if r > 1e-9 * scale {
                return Err(Error::NotIntertwiner { residual: r });
            }
        }
        Ok(())
    }
}

fn check_leg(color: &Color, leg: &Leg, row: usize, col: usize) -> Result<()> {
    match color {
        Color::Blue(s) if s.replace(' ', "") == leg.color.replace(' ', "") => Ok(()),
        Color::Blue(s) => Err(perr(row, col, format!("coupon leg colored {} meets edge colored {s}", leg.color))),
        _ => Err(perr(row, col, "coupon leg on a red edge")),
    }
}

/// Degree of a module expression without building the module.
pub fn color_degree(expr: &str) -> Result<Rational> {
    let s = expr.trim();
    let bad = || Error::Parse { row: 0, col: 0, msg: format!("unknown module expression `{s}`") };
    let open = s.find('(').ok_or_else(bad)?;
    if !s.ends_with(')') {
        return Err(bad());
    }
    let inner = &s[open + 1..s.len() - 1];
    match &s[..open] {
        "typical" | "trivial" => Ok(frac(parse_rational(inner).ok_or_else(bad)?)),
        "dual" => Ok(frac(-color_degree(inner)?)),
        "tensor" => {
            let (a, b) = split_top(inner).ok_or_else(bad)?;
            Ok(frac(color_degree(a)? + color_degree(b)?))
        }
        _ => Err(bad()),
    }
}

fn split_top(inner: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&inner[..i], &inner[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Projectivity of a module expression: a simple typical factor makes the whole product
/// projective.
pub fn color_is_projective(cfg: &RootOfUnityConfig, expr: &str) -> bool {
    let s = expr.trim();
    let Some(open) = s.find('(') else { return false };
    if !s.ends_with(')') {
        return false;
    }
    let inner = &s[open + 1..s.len() - 1];
    match &s[..open] {
        "typical" => parse_rational(inner).is_some_and(|a| is_typical_simple(cfg, a)),
        "dual" => color_is_projective(cfg, inner),
        "tensor" => split_top(inner).is_some_and(|(a, b)| color_is_projective(cfg, a) || color_is_projective(cfg, b)),
        _ => false,
    }
}

/// Whether every simple module of degree `a` is typical and simple, i.e. `a` lies outside
/// the non-semisimple set.
pub fn is_semisimple_degree(cfg: &RootOfUnityConfig, a: Rational) -> bool {
    (0..cfg.ell as i64).all(|k| is_typical_simple(cfg, frac(a) + k))
}

/// `lk[i][j]` sums the signs of crossings where edge `j` passes over edge `i`. The diagonal
/// is the writhe.
pub fn linking_matrix(top: &Topology) -> Vec<Vec<i64>> {
    let n = top.edges.len();
    let mut lk = vec![vec![0i64; n]; n];
    for c in &top.crossings {
        lk[c.under().edge][c.over().edge] += c.sign;
    }
    // off-diagonal entries count each pair once from each side
    for i in 0..n {
        for j in 0..n {
            if i != j && top.edges[i].closed && top.edges[j].closed {
                debug_assert_eq!(lk[i][j], lk[j][i]);
            }
        }
    }
    lk
}

/// Signature of an integer symmetric matrix.
pub fn signature(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 0;
    }
    let a = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| m[i][j] as f64);
    let e = nalgebra::SymmetricEigen::new(a);
    e.eigenvalues.iter().map(|v| if *v > 1e-9 { 1 } else if *v < -1e-9 { -1 } else { 0 }).sum()
}

/// Linking matrix restricted to the surgery components.
pub fn surgery_matrix(d: &BichromeDiagram, top: &Topology) -> Vec<Vec<i64>> {
    let lk = linking_matrix(top);
    let s = d.surgery_components();
    s.iter().map(|&i| s.iter().map(|&j| lk[i][j]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    /// `omega(l_i)` for each closed red component.
    pub parallels: BTreeMap<usize, Rational>,
    /// `4 omega(l_i)` modulo 1 for each closed red component.
    pub residues: BTreeMap<usize, Rational>,
    pub compatible: bool,
    /// Whether `omega` vanishes on every surgery parallel, so that it extends over the
    /// surgered manifold.
    pub extends: bool,
}

pub fn compatibility_report(d: &BichromeDiagram, top: &Topology) -> Result<CompatibilityReport> {
    let w = d.meridians()?;
    for (e, c) in d.colors.iter().enumerate() {
        if let (Color::Blue(expr), Some(given)) = (c, d.omega.get(&e)) {
            let deg = color_degree(expr)?;
            if frac(*given) != deg {
                return Err(Error::Incompatible { component: e, residue: frac(*given - deg) });
            }
        }
    }
    let lk = linking_matrix(top);
    let mut parallels = BTreeMap::new();
    let mut residues = BTreeMap::new();
    let mut compatible = true;
    let mut extends = true;
    for i in d.red_components() {
        let par: Rational = (0..w.len()).map(|k| w[k] * lk[i][k]).fold(Rational::zero(), |a, b| a + b);
        let res = frac(par * 4);
        if !res.is_zero() {
            compatible = false;
        }
        if d.colors[i] == Color::Surgery && !frac(par).is_zero() {
            extends = false;
        }
        parallels.insert(i, frac(par));
        residues.insert(i, res);
    }
    Ok(CompatibilityReport { parallels, residues, compatible, extends })
}

/// Fails with the first incompatible component.
pub fn check_compatibility(d: &BichromeDiagram, top: &Topology) -> Result<CompatibilityReport> {
    let r = compatibility_report(d, top)?;
    if let Some((c, res)) = r.residues.iter().find(|(_, v)| !v.is_zero()) {
        return Err(Error::Incompatible { component: *c, residue: *res });
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibilityClass {
    GraphAdmissible,
    GAdmissible,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    /// Blue edges colored by projective modules.
    pub blue_cuts: Vec<usize>,
    /// Red components whose degree is semisimple.
    pub red_cuts: Vec<usize>,
    pub class: AdmissibilityClass,
}

pub fn check_admissibility(d: &BichromeDiagram) -> Result<Admissibility> {
    let cfg = d.cfg()?;
    let mut blue_cuts = Vec::new();
    let mut red_cuts = Vec::new();
    for (e, c) in d.colors.iter().enumerate() {
        match c {
            Color::Blue(expr) if color_is_projective(&cfg, expr) => blue_cuts.push(e),
            Color::Blue(_) => {}
            _ => {
                if is_semisimple_degree(&cfg, d.meridian(e)?) {
                    red_cuts.push(e);
                }
            }
        }
    }
    let class = if !blue_cuts.is_empty() {
        AdmissibilityClass::GraphAdmissible
    } else if !red_cuts.is_empty() {
        AdmissibilityClass::GAdmissible
    } else {
        AdmissibilityClass::None
    };
    Ok(Admissibility { blue_cuts, red_cuts, class })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConfigFile {
    ell: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CouponFile {
    inputs: Vec<Leg>,
    outputs: Vec<Leg>,
    /// Row-major entries as `[re, im]`.
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiagramFile {
    config: ConfigFile,
    rows: Vec<Vec<String>>,
    colors: Vec<String>,
    #[serde(default)]
    coupons: Vec<CouponFile>,
    #[serde(default)]
    omega: BTreeMap<String, String>,
}

/// Parse the JSON form and validate the slices.
pub fn parse_diagram(text: &str) -> Result<BichromeDiagram> {
    let file: DiagramFile = serde_json::from_str(text).map_err(|e| perr(e.line(), e.column(), e.to_string()))?;
    let mut coupons = Vec::new();
    for (k, c) in file.coupons.iter().enumerate() {
        let nr = c.matrix.len();
        let nc = c.matrix.first().map_or(0, |r| r.len());
        if c.matrix.iter().any(|r| r.len() != nc) {
            return Err(perr(0, 0, format!("coupon {k} matrix rows differ in length")));
        }
        let m = CMat::from_fn(nr, nc, |i, j| C64::new(c.matrix[i][j][0], c.matrix[i][j][1]));
        coupons.push(Coupon { inputs: c.inputs.clone(), outputs: c.outputs.clone(), matrix: m });
    }
    let mut rows = Vec::new();
    for (r, row) in file.rows.iter().enumerate() {
        let mut evs = Vec::new();
        for (c, tok) in row.iter().enumerate() {
            evs.push(Event::from_token(tok).ok_or_else(|| perr(r, c, format!("unknown event `{tok}`")))?);
        }
        rows.push(evs);
    }
    let mut omega = BTreeMap::new();
    for (k, v) in &file.omega {
        let i: usize = k.trim().parse().map_err(|_| perr(0, 0, format!("bad component index `{k}`")))?;
        let q = parse_rational(v).ok_or_else(|| perr(0, 0, format!("bad rational `{v}`")))?;
        omega.insert(i, q);
    }
    let d = BichromeDiagram {
        ell: file.config.ell,
        rows,
        colors: file.colors.iter().map(|s| Color::from_token(s)).collect(),
        coupons,
        omega,
    };
    d.topology()?;
    Ok(d)
}

pub fn serialize_diagram(d: &BichromeDiagram) -> String {
    let file = DiagramFile {
        config: ConfigFile { ell: d.ell },
        rows: d.rows.iter().map(|r| r.iter().map(|e| e.token()).collect()).collect(),
        colors: d.colors.iter().map(|c| c.token()).collect(),
        coupons: d
            .coupons
            .iter()
            .map(|c| CouponFile {
                inputs: c.inputs.clone(),
                outputs: c.outputs.clone(),
                matrix: (0..c.matrix.nrows())
                    .map(|i| (0..c.matrix.ncols()).map(|j| [c.matrix[(i, j)].re, c.matrix[(i, j)].im]).collect())
                    .collect(),
            })
            .collect(),
        omega: d.omega.iter().map(|(k, v)| (k.to_string(), format_rational(*v))).collect(),
    };
    serde_json::to_string_pretty(&file).expect("diagram serializes")
}

/// Identity coupon on a single module, used to split an edge.
pub fn identity_coupon(alg: &UqAlgebra, color: &str, up: bool) -> Result<Coupon> {
    let n = parse_module(alg, color)?.dim();
    Ok(Coupon {
        inputs: vec![Leg { color: color.into(), up }],
        outputs: vec![Leg { color: color.into(), up }],
        matrix: CMat::identity(n, n).map(|z| z * C64::one()),
    })
}
