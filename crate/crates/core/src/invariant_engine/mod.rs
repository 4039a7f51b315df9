//! Bead evaluation of bichrome diagrams: the graded Hennings invariant `H`, the modified
//! invariant `H'` through a blue or a red cut, and an independent Reshetikhin-Turaev style
//! evaluation with Kirby colors used as an oracle.

mod beads;
mod network;
mod kirby_suite;
mod oracle;

pub use beads::*;
pub use network::*;
pub use kirby_suite::*;
pub use oracle::*;

use crate::diagrams::{
    check_admissibility, check_compatibility, disjoint_union, signature, surgery_matrix, AdmissibilityClass,
    BichromeDiagram, Color,
};
use crate::error::{Error, Result};
use crate::integrals::{modified_integral, GIntegral, ModifiedIntegralData};
use crate::modules_catalog::{parse_module, WeightModule};
use crate::qalgebra::{LElement, UqAlgebra};
use crate::scalars::{frac, Rational, C64};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::Instant;

type FactorTable = Arc<Vec<(LElement, LElement)>>;

/// Algebra, integrals and read-only caches for one root of unity.
pub struct Engine {
    pub alg: UqAlgebra,
    /// Integral normalized so that `delta * delta-bar = 1`.
    pub gi: GIntegral,
    /// Integral with the closed-form `eta`.
    pub gi_closed_form: GIntegral,
    pub delta: C64,
    pub delta_bar: C64,
    factors: Mutex<HashMap<(Rational, Rational), FactorTable>>,
    modified: Mutex<HashMap<Rational, Arc<ModifiedIntegralData>>>,
    modules: Mutex<HashMap<String, Arc<WeightModule>>>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine").field("ell", &self.alg.ell).field("delta", &self.delta).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantPath {
    PlainH,
    ModifiedGraphCut,
    ModifiedRedCut,
}

impl InvariantPath {
    pub fn name(&self) -> &'static str {
        match self {
            InvariantPath::PlainH => "plain_H",
            InvariantPath::ModifiedGraphCut => "modified_graph_cut",
            InvariantPath::ModifiedRedCut => "modified_red_cut",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub value: C64,
    pub path: InvariantPath,
    pub signature: i64,
    pub delta_used: C64,
    /// `4 omega(l_i)` modulo 1 per closed red component.
    pub residues: BTreeMap<usize, Rational>,
    pub admissibility: AdmissibilityClass,
    pub cut_edge: Option<usize>,
    /// Centrality residual of the cut element on the red-cut path.
    pub centrality_residual: Option<f64>,
    pub elapsed_ms: f64,
}

/// Which edge to open for the modified invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutChoice {
    Blue(usize),
    Red(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectedSumReport {
    /// `H'` of the disjoint union.
    pub lhs: C64,
    /// `H'` of the first times `H` of the second.
    pub rhs: C64,
    pub difference: f64,
}

impl Engine {
    pub fn new(ell: u32) -> Result<Self> {
        let alg = UqAlgebra::from_ell(ell)?;
        let gi = GIntegral::hennings(&alg)?;
        let gi_closed_form = GIntegral::new(&alg)?;
        let (delta, delta_bar) = gi.deltas(&alg)?;
        Ok(Self {
            alg,
            gi,
            gi_closed_form,
            delta,
            delta_bar,
            factors: Mutex::new(HashMap::new()),
            modified: Mutex::new(HashMap::new()),
            modules: Mutex::new(HashMap::new()),
        })
    }

    pub fn ell(&self) -> u32 {
        self.alg.ell as u32
    }

    /// Full R-matrix factors at the degree pair `(a, b)`.
    pub fn factors(&self, a: Rational, b: Rational) -> Result<FactorTable> {
        let key = (frac(a), frac(b));
        if let Some(f) = self.factors.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(self.alg.r_matrix(key.0, key.1)?.lfactors());
        self.factors.lock().unwrap().insert(key, f.clone());
        Ok(f)
    }

    pub fn modified_data(&self, degree: Rational) -> Result<Arc<ModifiedIntegralData>> {
        let key = frac(degree);
        if let Some(m) = self.modified.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(ModifiedIntegralData::compute(&self.alg, &self.gi, key)?);
        self.modified.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    pub fn module(&self, expr: &str) -> Result<Arc<WeightModule>> {
        let key = expr.replace(' ', "");
        if let Some(m) = self.modules.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(parse_module(&self.alg, &key)?);
        self.modules.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    fn check_ell(&self, d: &BichromeDiagram) -> Result<()> {
        if d.ell as usize != self.alg.ell {
            return Err(Error::InvalidConfig(format!("diagram is at ell = {}, engine at ell = {}", d.ell, self.alg.ell)));
        }
        Ok(())
    }

    pub fn signature_of(&self, d: &BichromeDiagram) -> Result<i64> {
        Ok(signature(&surgery_matrix(d, &d.topology()?)))
    }

    /// `F_mu` of a closed diagram: the symmetrized integral on every closed red component.
    pub fn f_mu(&self, d: &BichromeDiagram) -> Result<C64> {
        self.check_ell(d)?;
        match self.evaluate(d, &EvalOptions::default())? {
            Evaluation::Scalar(x) => Ok(x),
            _ => unreachable!("closed evaluation yields a scalar"),
        }
    }

    fn delta_power(&self, s: i64) -> C64 {
        self.delta.powi(-s as i32)
    }

    /// `H = delta^-s F_mu`.
    pub fn hennings_invariant(&self, d: &BichromeDiagram) -> Result<InvariantReport> {
        self.check_ell(d)?;
        let start = Instant::now();
        let top = d.topology()?;
        let comp = check_compatibility(d, &top)?;
        let s = signature(&surgery_matrix(d, &top));
        let f = self.f_mu(d)?;
        Ok(InvariantReport {
            value: self.delta_power(s) * f,
            path: InvariantPath::PlainH,
            signature: s,
            delta_used: self.delta,
            residues: comp.residues,
            admissibility: check_admissibility(d)?.class,
            cut_edge: None,
            centrality_residual: None,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    /// Default cut: the first projective blue edge reaching the outer face, else the first
    /// such red component at a semisimple degree.
    pub fn default_cut(&self, d: &BichromeDiagram) -> Result<CutChoice> {
        let adm = check_admissibility(d)?;
        let top = d.topology()?;
        let outer = |e: usize| top.edges[e].sites.iter().any(is_outer_point);
        if let Some(e) = adm.blue_cuts.iter().copied().find(|e| outer(*e)) {
            return Ok(CutChoice::Blue(e));
        }
        if let Some(e) = adm.red_cuts.iter().copied().find(|e| top.edges[*e].closed && outer(*e)) {
            return Ok(CutChoice::Red(e));
        }
        Err(Error::NotAdmissible(
            "no projective blue edge and no red component at a semisimple degree on the outer face".into(),
        ))
    }

    /// `H' = delta^-s F'_mu` through the given cut.
    pub fn modified_invariant(&self, d: &BichromeDiagram, cut: Option<CutChoice>) -> Result<InvariantReport> {
        self.check_ell(d)?;
        let start = Instant::now();
        let top = d.topology()?;
        let comp = check_compatibility(d, &top)?;
        let adm = check_admissibility(d)?;
        let s = signature(&surgery_matrix(d, &top));
        let cut = match cut {
            Some(c) => c,
            None => self.default_cut(d)?,
        };
        let (f, path, edge, residual) = match cut {
            CutChoice::Blue(e) => (self.blue_cut_value(d, e, None)?, InvariantPath::ModifiedGraphCut, e, None),
            CutChoice::Red(e) => {
                let (v, r) = self.red_cut_value(d, e)?;
                (v, InvariantPath::ModifiedRedCut, e, Some(r))
            }
        };
        Ok(InvariantReport {
            value: self.delta_power(s) * f,
            path,
            signature: s,
            delta_used: self.delta,
            residues: comp.residues,
            admissibility: adm.class,
            cut_edge: Some(edge),
            centrality_residual: residual,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    /// `t_V` of the endomorphism obtained by opening blue edge `e` at one of its points.
    pub fn blue_cut_value(&self, d: &BichromeDiagram, e: usize, point: Option<usize>) -> Result<C64> {
        let Some(Color::Blue(expr)) = d.colors.get(e) else {
            return Err(Error::NotAdmissible(format!("edge {e} is not blue")));
        };
        let v = self.module(expr)?;
        let data = self.modified_data(v.degree).map_err(|_| {
            Error::NotAdmissible(format!("edge {e} colored {expr} does not sit in a semisimple degree"))
        })?;
        match self.evaluate(d, &EvalOptions { cut: Cut::Blue { edge: e, point }, ..Default::default() })? {
            Evaluation::Endomorphism { matrix, .. } => data.m_trace(&self.alg, &matrix, &v),
            _ => unreachable!("blue cut yields an endomorphism"),
        }
    }

    /// `mu'` of the central element obtained by opening red component `e`, and the
    /// centrality residual.
    pub fn red_cut_value(&self, d: &BichromeDiagram, e: usize) -> Result<(C64, f64)> {
        if !d.colors.get(e).is_some_and(|c| c.is_red()) {
            return Err(Error::NotAdmissible(format!("edge {e} is not red")));
        }
        let a = d.meridian(e)?;
        let data = self
            .modified_data(a)
            .map_err(|_| Error::NotSemisimpleDegree { component: e, degree: frac(a) })?;
        match self.evaluate(d, &EvalOptions { cut: Cut::Red { edge: e, point: None }, ..Default::default() })? {
            Evaluation::Central { element, .. } => {
                let r = self.alg.centrality_residual(&element);
                Ok((modified_integral(&self.alg, &self.gi, &data, &element)?, r))
            }
            _ => unreachable!("red cut yields an element"),
        }
    }

    /// `H'(d1 # d2)` on the disjoint union against `H'(d1) H(d2)`.
    pub fn connected_sum_check(&self, d1: &BichromeDiagram, d2: &BichromeDiagram) -> Result<ConnectedSumReport> {
        let cut = self.default_cut(d1)?;
        let u = disjoint_union(d1, d2)?;
        let lhs = self.modified_invariant(&u, Some(cut))?.value;
        let rhs = self.modified_invariant(d1, Some(cut))?.value * self.hennings_invariant(d2)?.value;
        Ok(ConnectedSumReport { lhs, rhs, difference: (lhs - rhs).norm() })
    }
}

#[cfg(test)]
mod tests;
