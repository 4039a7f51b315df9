//! Reference evaluation through representations: every surgery component is colored by the
//! Kirby color `sum_i d(V_i) V_i` of its degree, and the diagram is swept bottom to top
//! with braidings, dualities and coupon maps acting on a state vector.

use super::Engine;
use crate::diagrams::{
    check_compatibility, is_semisimple_degree, signature, surgery_matrix, Arrow, BichromeDiagram, Color, Event, Site,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::modules_catalog::{braiding, coev, coev_prime, dual_module, ev, ev_prime, WeightModule};
use crate::scalars::{frac, C64};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub value: C64,
    pub colorings: usize,
    pub signature: i64,
    pub cut_edge: usize,
}

/// State on the tensor product of the slots of one level, with `lead` leading entries.
struct State {
    data: Vec<C64>,
    dims: Vec<usize>,
    lead: usize,
}

impl State {
    /// Replace slots `pos..pos+a` by the image under `m` (rows: outputs, columns: inputs).
    fn apply(&mut self, pos: usize, a: usize, m: &CMat, out_dims: &[usize]) {
        let left: usize = self.lead * self.dims[..pos].iter().product::<usize>();
        let mid: usize = self.dims[pos..pos + a].iter().product();
        let right: usize = self.dims[pos + a..].iter().product();
        let nout = m.nrows();
        debug_assert_eq!(m.ncols(), mid);
        let mut out = vec![C64::zero(); left * nout * right];
        for l in 0..left {
            for i in 0..mid {
                for r in 0..right {
                    let x = self.data[(l * mid + i) * right + r];
                    if x.is_zero() {
                        continue;
                    }
                    for o in 0..nout {
                        let c = m[(o, i)];
                        if !c.is_zero() {
                            out[(l * nout + o) * right + r] += c * x;
                        }
                    }
                }
            }
        }
        self.data = out;
        self.dims.splice(pos..pos + a, out_dims.iter().copied());
    }

    /// Open slot `pos`: the incoming value becomes the leading row index and a fresh basis
    /// vector, indexed by the leading column, continues upward.
    fn open(&mut self, pos: usize) {
        let n = self.dims[pos];
        let left: usize = self.dims[..pos].iter().product();
        let right: usize = self.dims[pos + 1..].iter().product();
        let width = left * n * right;
        let mut out = vec![C64::zero(); n * n * width];
        for l in 0..left {
            for o in 0..n {
                for r in 0..right {
                    let x = self.data[(l * n + o) * right + r];
                    for i in 0..n {
                        out[(o * n + i) * width + (l * n + i) * right + r] = x;
                    }
                }
            }
        }
        self.data = out;
        self.lead = n * n;
    }
}

impl Engine {
    /// Kirby-colored evaluation `delta^-s sum_c prod_k d(c_k) t_V(F_c)` on a diagram without red
    /// graph components, opened at the first upward point of a projective blue edge on the outer face.
    pub fn cgp_oracle(&self, d: &BichromeDiagram, cut_edge: Option<usize>) -> Result<OracleReport> {
        let top = d.topology()?;
        check_compatibility(d, &top)?;
        if d.colors.contains(&Color::Red) {
            return Err(Error::NotAdmissible("the oracle handles surgery and blue components only".into()));
        }
        let surgery = d.surgery_components();
        let mut kirby: Vec<(Vec<Arc<WeightModule>>, Vec<C64>)> = Vec::new();
        for &k in &surgery {
            let a = d.meridian(k)?;
            if !is_semisimple_degree(&self.alg.cfg, a) {
                return Err(Error::NotSemisimpleDegree { component: k, degree: frac(a) });
            }
            let data = self.modified_data(a)?;
            kirby.push((data.decomposition.modules.iter().cloned().map(Arc::new).collect(), data.modified_dims.clone()));
        }
        let cut = match cut_edge {
            Some(e) => e,
            None => (0..d.num_edges())
                .find(|e| matches!(&d.colors[*e], Color::Blue(x) if self.module(x).is_ok_and(|v| self.modified_data(v.degree).is_ok())))
                .ok_or_else(|| Error::NotAdmissible("no blue edge in a semisimple degree".into()))?,
        };
        let Color::Blue(expr) = &d.colors[cut] else {
            return Err(Error::NotAdmissible(format!("edge {cut} is not blue")));
        };
        let vcut = self.module(expr)?;
        let tdata = self.modified_data(vcut.degree)?;
        let (cut_level, cut_pos) = match top.edges[cut].sites[super::cut_site(&top, cut, None)?] {
            Site::Point { level, pos, .. } => (level, pos),
            _ => unreachable!("cut sites are points"),
        };
        let closing = vcut.pivot_power(&self.alg.cfg, -1);

        let mut blue: BTreeMap<usize, Arc<WeightModule>> = BTreeMap::new();
        for (e, c) in d.colors.iter().enumerate() {
            if let Color::Blue(x) = c {
                blue.insert(e, self.module(x)?);
            }
        }
        let total: usize = kirby.iter().map(|(m, _)| m.len()).product();
        let mut sum = C64::zero();
        let mut choice = vec![0usize; surgery.len()];
        for _ in 0..total {
            let mut weight = C64::one();
            let mut colors: BTreeMap<usize, Arc<WeightModule>> = blue.clone();
            for (s, &k) in surgery.iter().enumerate() {
                colors.insert(k, kirby[s].0[choice[s]].clone());
                weight *= kirby[s].1[choice[s]];
            }
            let f = self.sweep(d, &top, &colors, (cut_level, cut_pos))?;
            sum += weight * tdata.m_trace(&self.alg, &(&closing * f), &vcut)?;
            for s in 0..choice.len() {
                choice[s] += 1;
                if choice[s] < kirby[s].0.len() {
                    break;
                }
                choice[s] = 0;
            }
        }
        let sig = signature(&surgery_matrix(d, &top));
        Ok(OracleReport { value: self.delta.powi(-sig as i32) * sum, colorings: total, signature: sig, cut_edge: cut })
    }

    fn sweep(
        &self,
        d: &BichromeDiagram,
        top: &crate::diagrams::Topology,
        colors: &BTreeMap<usize, Arc<WeightModule>>,
        cut: (usize, usize),
    ) -> Result<CMat> {
        let alg = &self.alg;
        let cfg = &alg.cfg;
        let mut duals: BTreeMap<usize, WeightModule> = BTreeMap::new();
        for (e, v) in colors {
            duals.insert(*e, dual_module(alg, v)?);
        }
        let module = |e: usize, up: bool| -> &WeightModule { if up { &colors[&e] } else { &duals[&e] } };
        let mut st = State { data: vec![C64::one()], dims: Vec::new(), lead: 1 };
        for (r, row) in d.rows.iter().enumerate() {
            if r == cut.0 {
                st.open(cut.1);
            }
            let ins = &top.levels[r];
            let outs = &top.levels[r + 1];
            let (mut ii, mut oo) = (0usize, 0usize);
            for ev_ in row {
                let (a, b) = ev_.arity(&d.coupons).expect("validated diagram");
                let odims: Vec<usize> = outs[oo..oo + b].iter().map(|s| module(s.edge, s.up).dim()).collect();
                let m = match ev_ {
                    Event::Id => None,
                    Event::Over | Event::Under => {
                        let x = module(ins[ii].edge, ins[ii].up);
                        let y = module(ins[ii + 1].edge, ins[ii + 1].up);
                        Some(if *ev_ == Event::Over {
                            braiding(alg, x, y)?
                        } else {
                            linalg::inverse(&braiding(alg, y, x)?, 1e-8)?
                        })
                    }
                    Event::Cup(arrow) => {
                        let s = outs[oo];
                        let v = &colors[&s.edge];
                        Some(if *arrow == Arrow::Left { coev(v) } else { coev_prime(cfg, v) })
                    }
                    Event::Cap(arrow) => {
                        let s = ins[ii];
                        let v = &colors[&s.edge];
                        Some(if *arrow == Arrow::Right { ev_prime(cfg, v) } else { ev(v) })
                    }
                    Event::Coupon(k) => Some(d.coupons[*k].matrix.clone()),
                };
                // positions shift as earlier events of the row have already been replaced
                if let Some(m) = m {
                    st.apply(oo, a, &m, &odims);
                }
                ii += a;
                oo += b;
            }
        }
        if st.lead == 1 {
            return Err(Error::InvalidConfig("cut point was never reached".into()));
        }
        let n = (st.lead as f64).sqrt().round() as usize;
        Ok(CMat::from_row_slice(n, n, &st.data))
    }
}
