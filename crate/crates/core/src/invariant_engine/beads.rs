//! Bead placement along edges and assembly of the evaluation network.
//!
//! Every crossing contributes a sum `sum_t a_t (x) b_t` with `a_t` on the over strand and
//! `b_t` on the under strand; cups and caps contribute powers of the pivot. Beads on an
//! edge multiply against the orientation, so the first bead met along the edge acts first.

use super::{Engine, Network};
use crate::diagrams::{linking_matrix, BichromeDiagram, Color, LegEnd, Site, Topology};
use crate::error::{Error, Result};
use crate::exponents::ExponentPoly;
use crate::linalg::CMat;
use crate::modules_catalog::WeightModule;
use crate::qalgebra::{Element, LElement};
use crate::scalars::{frac, Rational, C64};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Where to open the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Cut {
    #[default]
    Closed,
    /// Open a blue edge at an upward point on the outer face (index into its sites); the
    /// first such point by default.
    Blue { edge: usize, point: Option<usize> },
    /// Open a closed red component at an upward point on the outer face; the first such
    /// point by default.
    Red { edge: usize, point: Option<usize> },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalOptions {
    pub cut: Cut,
    /// Base point of a closed edge, as an index into its sites. Must be a point site.
    pub base_points: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    Scalar(C64),
    Endomorphism { edge: usize, matrix: CMat },
    Central { edge: usize, element: Element },
}

#[derive(Debug, Clone)]
pub enum BeadKind {
    /// One element per term of the crossing's sum.
    Crossing { crossing: usize, elements: Arc<Vec<LElement>> },
    Pivot(i8),
}

#[derive(Debug, Clone)]
pub struct Bead {
    pub kind: BeadKind,
    /// Cartan exponent shared by all terms.
    pub c: Rational,
}

/// Beads of every edge, aligned with its sites.
#[derive(Debug, Clone)]
pub struct BeadPlan {
    pub degrees: Vec<Rational>,
    pub ranks: Vec<usize>,
    pub beads: Vec<Vec<Option<Bead>>>,
    /// Quadratic Cartan exponent accumulated crossing by crossing.
    pub quad: ExponentPoly,
}

impl BeadPlan {
    /// Sum of the Cartan exponents on edge `e`.
    pub fn total_exponent(&self, e: usize) -> Rational {
        self.beads[e].iter().flatten().map(|b| b.c).sum()
    }
}

/// Exponents collected by the bead sweep against the closed form from linking numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub sweep: ExponentPoly,
    pub formula: ExponentPoly,
    /// Per closed red component: (sweep total, polarization of the formula at omega).
    pub linear: BTreeMap<usize, (Rational, Rational)>,
    pub quadratic_match: bool,
    /// Every linear total agrees with the polarization up to an even integer.
    pub linear_match: bool,
}

impl ExponentReport {
    pub fn passed(&self) -> bool {
        self.quadratic_match && self.linear_match
    }
}

fn reduced(mut x: LElement) -> LElement {
    x.x.degree = frac(x.x.degree);
    x
}

fn rotate<T: Clone>(v: &[T], k: usize) -> Vec<T> {
    v[k..].iter().chain(v[..k].iter()).cloned().collect()
}

fn is_point(s: &Site) -> bool {
    matches!(s, Site::Point { .. })
}

/// Upward point at the left end of its level: nothing separates it from the outer face, so
/// the diagram is the right closure of the tangle obtained by opening it there.
pub fn is_outer_point(s: &Site) -> bool {
    matches!(s, Site::Point { pos: 0, up: true, .. })
}

/// Site index of the cut on edge `e`.
pub fn cut_site(top: &Topology, e: usize, point: Option<usize>) -> Result<usize> {
    let sites = &top.edges[e].sites;
    let p = match point {
        Some(p) => p,
        None => sites
            .iter()
            .position(is_outer_point)
            .ok_or_else(|| Error::NotAdmissible(format!("edge {e} never reaches the outer face going up")))?,
    };
    match sites.get(p) {
        Some(s) if is_outer_point(s) => Ok(p),
        _ => Err(Error::NotAdmissible(format!("site {p} of edge {e} is not an upward point on the outer face"))),
    }
}

impl Engine {
    pub fn bead_plan(&self, d: &BichromeDiagram, top: &Topology) -> Result<BeadPlan> {
        let degrees = d.meridians()?;
        let n = d.num_edges();
        let mut quad = ExponentPoly::zero(n);
        let mut per_crossing: Vec<[(Arc<Vec<LElement>>, Rational); 2]> = Vec::with_capacity(top.crossings.len());
        let mut ranks = Vec::with_capacity(top.crossings.len());
        for cr in &top.crossings {
            let (o, u) = (cr.over(), cr.under());
            let d_o = if o.up { degrees[o.edge] } else { -degrees[o.edge] };
            let d_u = if u.up { degrees[u.edge] } else { -degrees[u.edge] };
            let mut flips = 0;
            let table = if cr.over_type { self.factors(d_o, d_u)? } else { self.factors(d_o, -d_u)? };
            let mut over: Vec<LElement> = Vec::with_capacity(table.len());
            let mut under: Vec<LElement> = Vec::with_capacity(table.len());
            for (a, b) in table.iter() {
                over.push(reduced(if o.up { a.clone() } else { self.alg.antipode_l(a) }));
                let b = if cr.over_type { b.clone() } else { self.alg.antipode_inv_l(b) };
                under.push(reduced(if u.up { b } else { self.alg.antipode_l(&b) }));
            }
            if !cr.over_type {
                flips += 1;
            }
            if !o.up {
                flips += 1;
            }
            if !u.up {
                flips += 1;
            }
            quad.add_monomial(o.edge, u.edge, if flips % 2 == 0 { 2 } else { -2 });
            let c_over = over.first().map(|x| x.c).unwrap_or_else(Rational::zero);
            let c_under = under.first().map(|x| x.c).unwrap_or_else(Rational::zero);
            ranks.push(table.len());
            per_crossing.push([(Arc::new(over), c_over), (Arc::new(under), c_under)]);
        }
        let mut beads = Vec::with_capacity(n);
        for info in &top.edges {
            let row: Vec<Option<Bead>> = info
                .sites
                .iter()
                .map(|s| match s {
                    Site::Point { .. } => None,
                    Site::Turn { pivot: 0 } => None,
                    Site::Turn { pivot } => Some(Bead { kind: BeadKind::Pivot(*pivot), c: Rational::zero() }),
                    Site::Cross { crossing, over } => {
                        let (els, c) = &per_crossing[*crossing][if *over { 0 } else { 1 }];
                        Some(Bead { kind: BeadKind::Crossing { crossing: *crossing, elements: els.clone() }, c: *c })
                    }
                })
                .collect();
            beads.push(row);
        }
        Ok(BeadPlan { degrees, ranks, beads, quad })
    }

    /// Compare the Cartan exponents found by the bead sweep with `Q_D` from the linking matrix.
    pub fn exponent_check(&self, d: &BichromeDiagram) -> Result<ExponentReport> {
        let top = d.topology()?;
        let plan = self.bead_plan(d, &top)?;
        let lk = linking_matrix(&top);
        let n = d.num_edges();
        let mut formula = ExponentPoly::zero(n);
        for k in 0..n {
            formula.quad[k][k] = 2 * lk[k][k];
            for s in 0..n {
                if s != k {
                    formula.quad[k][s] = 2 * (lk[k][s] + lk[s][k]);
                }
            }
        }
        let mut sweep = plan.quad.clone();
        let pol = formula.polarization_coeffs(&plan.degrees);
        let mut linear = BTreeMap::new();
        let mut linear_match = true;
        for e in 0..n {
            let total = plan.total_exponent(e);
            sweep.lin[e] = total;
            formula.lin[e] = pol[e];
            if d.colors[e].is_red() && top.edges[e].closed {
                let diff = (total - pol[e]) / 2;
                if !diff.is_integer() {
                    linear_match = false;
                }
                linear.insert(e, (total, pol[e]));
            }
        }
        Ok(ExponentReport {
            quadratic_match: sweep.quadratic_part() == formula.quadratic_part(),
            sweep,
            formula,
            linear,
            linear_match,
        })
    }

    /// Contract the bead network of `d`, opened according to `opts.cut`.
    pub fn evaluate(&self, d: &BichromeDiagram, opts: &EvalOptions) -> Result<Evaluation> {
        let top = d.topology()?;
        let plan = self.bead_plan(d, &top)?;
        let alg = &self.alg;
        let mut net = Network::new();
        let bonds: Vec<usize> = plan.ranks.iter().map(|r| net.label(*r)).collect();
        let mut modules: BTreeMap<usize, Arc<WeightModule>> = BTreeMap::new();
        for (e, c) in d.colors.iter().enumerate() {
            if let Color::Blue(expr) = c {
                modules.insert(e, self.module(expr)?);
            }
        }
        // labels of coupon legs
        let mut leg_labels: BTreeMap<LegEnd, usize> = BTreeMap::new();
        for (e, info) in top.edges.iter().enumerate() {
            let dim = modules.get(&e).map(|m| m.dim());
            for end in [info.tail, info.head].into_iter().flatten() {
                let dim = dim.ok_or_else(|| Error::InvalidConfig(format!("edge {e} ends at a coupon but is not blue")))?;
                if leg_labels.contains_key(&end) {
                    return Err(Error::InvalidConfig(format!("coupon {} leg {} is used twice", end.coupon, end.leg)));
                }
                leg_labels.insert(end, net.label(dim));
            }
        }
        let mut open: Vec<usize> = Vec::new();
        let mut open_degree = Rational::zero();
        let mut open_dim = 0;
        for (e, info) in top.edges.iter().enumerate() {
            let beads = &plan.beads[e];
            let mut start = 0usize;
            if let Some(&b) = opts.base_points.get(&e) {
                if info.closed {
                    if b >= info.sites.len() || !is_point(&info.sites[b]) {
                        return Err(Error::InvalidConfig(format!("site {b} of edge {e} is not a point")));
                    }
                    start = b;
                }
            }
            match &d.colors[e] {
                Color::Blue(_) => {
                    let v = &modules[&e];
                    let cut_here = match opts.cut {
                        Cut::Blue { edge, point } if edge == e => Some(cut_site(&top, e, point)?),
                        _ => None,
                    };
                    let n = v.dim();
                    if info.closed {
                        let s = cut_here.unwrap_or(start);
                        let mut seq = rotate(beads, s);
                        if cut_here.is_some() {
                            seq.push(Some(closing_pivot()));
                        }
                        let first = net.label(n);
                        let last = self.blue_chain(&mut net, v, &seq, &bonds, first)?;
                        if cut_here.is_some() {
                            open = vec![last, first];
                            open_dim = n;
                        } else {
                            connect(&mut net, last, first, n);
                        }
                    } else {
                        let tail = leg_labels[&info.tail.unwrap()];
                        let head = leg_labels[&info.head.unwrap()];
                        match cut_here {
                            None => {
                                let last = self.blue_chain(&mut net, v, beads, &bonds, tail)?;
                                connect(&mut net, last, head, n);
                            }
                            Some(p) => {
                                let mut before = beads[..p].to_vec();
                                before.push(Some(closing_pivot()));
                                let out = self.blue_chain(&mut net, v, &before, &bonds, tail)?;
                                let inp = net.label(n);
                                let last = self.blue_chain(&mut net, v, &beads[p..], &bonds, inp)?;
                                connect(&mut net, last, head, n);
                                open = vec![out, inp];
                                open_dim = n;
                            }
                        }
                    }
                }
                _ => {
                    if !info.closed {
                        return Err(Error::InvalidConfig(format!("red edge {e} is not closed")));
                    }
                    let alpha = plan.degrees[e];
                    let total = plan.total_exponent(e);
                    if !total.is_integer() {
                        return Err(Error::FractionalResidue { component: e, exponent: total });
                    }
                    let cut_here = match opts.cut {
                        Cut::Red { edge, point } if edge == e => Some(cut_site(&top, e, point)?),
                        _ => None,
                    };
                    let seq = rotate(beads, cut_here.unwrap_or(start));
                    let first = net.label(alg.dim);
                    net.add(vec![first], alg.one(alpha).coeffs);
                    let last = self.red_chain(&mut net, alpha, &seq, &bonds, first)?;
                    if cut_here.is_some() {
                        let pc = alg.m(&alg.pivot_inv(alpha), &alg.k_pow(alpha, total.to_integer()));
                        let out = net.label(alg.dim);
                        net.add_matrix(out, last, &alg.left_matrix(&pc));
                        open = vec![out];
                        open_degree = alpha;
                    } else {
                        let kc = alg.left_matrix(&alg.k_pow(alpha, total.to_integer()));
                        let mu = self.gi.mu_vector(alg);
                        let phi: Vec<C64> = (0..alg.dim).map(|q| (0..alg.dim).map(|r| mu[r] * kc[(r, q)]).sum()).collect();
                        net.add(vec![last], phi);
                    }
                }
            }
        }
        for (k, cp) in d.coupons.iter().enumerate() {
            let mut labels = Vec::new();
            let mut used = 0;
            for (output, legs) in [(true, &cp.outputs), (false, &cp.inputs)] {
                for leg in 0..legs.len() {
                    if let Some(l) = leg_labels.get(&LegEnd { coupon: k, output, leg }) {
                        labels.push(*l);
                        used += 1;
                    }
                }
            }
            if used == 0 {
                continue;
            }
            if used != cp.outputs.len() + cp.inputs.len() {
                return Err(Error::InvalidConfig(format!("coupon {k} has dangling legs")));
            }
            let mut data = Vec::with_capacity(cp.matrix.len());
            for r in 0..cp.matrix.nrows() {
                for c in 0..cp.matrix.ncols() {
                    data.push(cp.matrix[(r, c)]);
                }
            }
            net.add(labels, data);
        }
        match opts.cut {
            Cut::Closed => Ok(Evaluation::Scalar(net.contract(&[])?.data[0])),
            Cut::Blue { edge, .. } => {
                if open.is_empty() {
                    return Err(Error::NotAdmissible(format!("edge {edge} is not a blue edge")));
                }
                let r = net.contract(&open)?;
                Ok(Evaluation::Endomorphism { edge, matrix: CMat::from_row_slice(open_dim, open_dim, &r.data) })
            }
            Cut::Red { edge, .. } => {
                if open.is_empty() {
                    return Err(Error::NotAdmissible(format!("edge {edge} is not a red component")));
                }
                let r = net.contract(&open)?;
                Ok(Evaluation::Central { edge, element: Element { degree: open_degree, coeffs: r.data } })
            }
        }
    }

    /// Chain of module beads starting at label `from`; returns the label after the last bead.
    fn blue_chain(&self, net: &mut Network, v: &WeightModule, beads: &[Option<Bead>], bonds: &[usize], from: usize) -> Result<usize> {
        let n = v.dim();
        let mut cur = from;
        for b in beads.iter().flatten() {
            let nxt = net.label(n);
            match &b.kind {
                BeadKind::Pivot(p) => net.add_matrix(nxt, cur, &v.pivot_power(&self.alg.cfg, *p as i64)),
                BeadKind::Crossing { crossing, elements } => {
                    let mut data = Vec::with_capacity(elements.len() * n * n);
                    for x in elements.iter() {
                        let m = v.rho_l(&self.alg, x)?;
                        for r in 0..n {
                            for c in 0..n {
                                data.push(m[(r, c)]);
                            }
                        }
                    }
                    net.add(vec![bonds[*crossing], nxt, cur], data);
                }
            }
            cur = nxt;
        }
        Ok(cur)
    }

    /// Chain of left multiplications in `U_alpha` with the Cartan parts pushed to the left.
    fn red_chain(&self, net: &mut Network, alpha: Rational, beads: &[Option<Bead>], bonds: &[usize], from: usize) -> Result<usize> {
        let alg = &self.alg;
        let n = alg.dim;
        let mut cur = from;
        let mut acc = Rational::zero();
        for b in beads.iter().flatten() {
            let nxt = net.label(n);
            match &b.kind {
                BeadKind::Pivot(p) => net.add_matrix(nxt, cur, &alg.left_matrix(&alg.pivot_power(alpha, *p as i64))),
                BeadKind::Crossing { crossing, elements } => {
                    let mut data = Vec::with_capacity(elements.len() * n * n);
                    for x in elements.iter() {
                        if frac(x.x.degree) != frac(alpha) {
                            return Err(Error::DegreeMismatch(format!(
                                "bead of degree {} on a component of degree {}",
                                x.x.degree, alpha
                            )));
                        }
                        let m = alg.left_matrix(&alg.weight_phase(&x.x, -acc));
                        for r in 0..n {
                            for c in 0..n {
                                data.push(m[(r, c)]);
                            }
                        }
                    }
                    net.add(vec![bonds[*crossing], nxt, cur], data);
                }
            }
            acc += b.c;
            cur = nxt;
        }
        Ok(cur)
    }
}

/// `g^-1` on the arrival side of a cut, removing the closing arc of the right closure.
fn closing_pivot() -> Bead {
    Bead { kind: BeadKind::Pivot(-1), c: Rational::zero() }
}

/// Identity bond from `from` to `to`, also when the two are the same label.
fn connect(net: &mut Network, from: usize, to: usize, dim: usize) {
    let id = CMat::identity(dim, dim);
    if from == to {
        let m = net.label(dim);
        net.add_matrix(m, from, &id);
        net.add_matrix(from, m, &id);
    } else {
        net.add_matrix(to, from, &id);
    }
}
