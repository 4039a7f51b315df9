//! Kirby moves on diagrams, with the induced transport of meridian values.

use super::{build::framed_unknot, Arrow, BichromeDiagram, Color, Event, Slot, Topology};
use crate::error::{Error, Result};
use crate::scalars::{frac, Rational};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KirbyMove {
    /// Reverse the orientation of a closed red component.
    K0(usize),
    /// Add a disjoint `+1`-framed unknot.
    KIPlus,
    /// Add a disjoint `-1`-framed unknot.
    KIMinus,
    /// Slide `slid` over the surgery component `over` along a framing parallel.
    KII { over: usize, slid: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveResult {
    pub diagram: BichromeDiagram,
    /// New index of every old edge.
    pub edge_map: Vec<usize>,
}

fn not_applicable(msg: impl Into<String>) -> Error {
    Error::MoveNotApplicable(msg.into())
}

fn require_closed_red(d: &BichromeDiagram, top: &Topology, e: usize) -> Result<()> {
    if e >= d.num_edges() {
        return Err(not_applicable(format!("component {e} does not exist")));
    }
    if !d.colors[e].is_red() || !top.edges[e].closed {
        return Err(not_applicable(format!("component {e} is not a closed red component")));
    }
    Ok(())
}

/// Input and output slots of every event, row by row.
pub fn event_slots(d: &BichromeDiagram, top: &Topology) -> Vec<Vec<(Vec<Slot>, Vec<Slot>)>> {
    let mut out = Vec::with_capacity(d.rows.len());
    for (r, row) in d.rows.iter().enumerate() {
        let mut ii = 0;
        let mut oo = 0;
        let mut evs = Vec::with_capacity(row.len());
        for ev in row {
            let (a, b) = ev.arity(&d.coupons).expect("validated diagram");
            evs.push((top.levels[r][ii..ii + a].to_vec(), top.levels[r + 1][oo..oo + b].to_vec()));
            ii += a;
            oo += b;
        }
        out.push(evs);
    }
    out
}

pub fn kirby_move(d: &BichromeDiagram, mv: KirbyMove) -> Result<MoveResult> {
    let top = d.topology()?;
    let n = d.num_edges();
    match mv {
        KirbyMove::K0(i) => {
            require_closed_red(d, &top, i)?;
            let slots = event_slots(d, &top);
            let mut out = d.clone();
            for (r, row) in out.rows.iter_mut().enumerate() {
                for (c, ev) in row.iter_mut().enumerate() {
                    let (ins, outs) = &slots[r][c];
                    let flip = |a: Arrow| if a == Arrow::Left { Arrow::Right } else { Arrow::Left };
                    match ev {
                        Event::Cup(a) if outs[0].edge == i => *ev = Event::Cup(flip(*a)),
                        Event::Cap(a) if ins[0].edge == i => *ev = Event::Cap(flip(*a)),
                        _ => {}
                    }
                }
            }
            let w = d.meridian(i)?;
            out.omega.insert(i, frac(-w));
            out.topology()?;
            Ok(MoveResult { diagram: out, edge_map: (0..n).collect() })
        }
        KirbyMove::KIPlus | KirbyMove::KIMinus => {
            let f = if mv == KirbyMove::KIPlus { 1 } else { -1 };
            let u = framed_unknot(d.ell, f, Color::Surgery, Some(Rational::zero()))?;
            let mut out = d.clone();
            out.rows.extend(u.rows);
            out.colors.push(Color::Surgery);
            out.omega.insert(n, Rational::zero());
            out.topology()?;
            Ok(MoveResult { diagram: out, edge_map: (0..n).collect() })
        }
        KirbyMove::KII { over, slid } => handle_slide(d, &top, over, slid),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Old(usize),
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lab {
    label: Label,
    up: bool,
}

fn cup_event(left_up: bool) -> Event {
    Event::Cup(if left_up { Arrow::Left } else { Arrow::Right })
}

fn cap_event(left_up: bool) -> Event {
    Event::Cap(if left_up { Arrow::Right } else { Arrow::Left })
}

struct Doubled {
    rows: Vec<Vec<Event>>,
    /// Labels at each original level.
    labels: Vec<Vec<Lab>>,
    /// New level index of each original level.
    level_index: Vec<usize>,
}

/// Replace edge `i` by itself and its blackboard parallel, which runs on the right of the
/// direction of travel. `reverse` orients the parallel against `i`.
fn double(d: &BichromeDiagram, top: &Topology, i: usize, reverse: bool) -> Doubled {
    let dbl = |s: &Slot| -> Vec<Lab> {
        if s.edge != i {
            return vec![Lab { label: Label::Old(s.edge), up: s.up }];
        }
        let me = Lab { label: Label::Old(i), up: s.up };
        let par = Lab { label: Label::Parallel, up: s.up != reverse };
        if s.up {
            vec![me, par]
        } else {
            vec![par, me]
        }
    };
    let slots = event_slots(d, top);
    let mut rows = Vec::new();
    let mut labels = vec![Vec::new()];
    let mut level_index = vec![0];
    for (r, row) in d.rows.iter().enumerate() {
        let mut per_event: Vec<Vec<Vec<Event>>> = Vec::with_capacity(row.len());
        for (c, ev) in row.iter().enumerate() {
            let (ins, outs) = &slots[r][c];
            let din: Vec<Lab> = ins.iter().flat_map(dbl).collect();
            let dout: Vec<Lab> = outs.iter().flat_map(dbl).collect();
            let layers = match ev {
                Event::Id => vec![vec![Event::Id; din.len()]],
                Event::Over | Event::Under => {
                    let x = *ev;
                    let (l2, r2) = (ins[0].edge == i, ins[1].edge == i);
                    match (l2, r2) {
                        (false, false) => vec![vec![x]],
                        (true, false) => vec![vec![Event::Id, x], vec![x, Event::Id]],
                        (false, true) => vec![vec![x, Event::Id], vec![Event::Id, x]],
                        (true, true) => vec![
                            vec![Event::Id, x, Event::Id],
                            vec![x, x],
                            vec![Event::Id, x, Event::Id],
                        ],
                    }
                }
                Event::Cup(_) if outs[0].edge == i => {
                    vec![vec![cup_event(dout[0].up)], vec![Event::Id, cup_event(dout[1].up), Event::Id]]
                }
                Event::Cap(_) if ins[0].edge == i => {
                    vec![vec![Event::Id, cap_event(din[1].up), Event::Id], vec![cap_event(din[0].up)]]
                }
                other => vec![vec![*other]],
            };
            per_event.push(layers);
        }
        let depth = per_event.iter().map(|l| l.len()).max().unwrap_or(1);
        let out_widths: Vec<usize> = slots[r].iter().map(|(_, o)| o.iter().map(|s| dbl(s).len()).sum()).collect();
        for layer in 0..depth {
            let mut new_row = Vec::new();
            for (k, lays) in per_event.iter().enumerate() {
                match lays.get(layer) {
                    Some(l) => new_row.extend(l.iter().copied()),
                    None => new_row.extend(std::iter::repeat_n(Event::Id, out_widths[k])),
                }
            }
            rows.push(new_row);
        }
        labels.push(top.levels[r + 1].iter().flat_map(dbl).collect());
        level_index.push(rows.len());
    }
    Doubled { rows, labels, level_index }
}

fn handle_slide(d: &BichromeDiagram, top: &Topology, i: usize, j: usize) -> Result<MoveResult> {
    require_closed_red(d, top, i)?;
    if d.colors[i] != Color::Surgery {
        return Err(not_applicable(format!("component {i} is not a surgery component")));
    }
    if j >= d.num_edges() || j == i {
        return Err(not_applicable(format!("cannot slide component {j} over {i}")));
    }
    // find a level where the parallel of i sits next to j
    let probe = double(d, top, i, false);
    let mut site = None;
    'outer: for (lvl, labs) in probe.labels.iter().enumerate() {
        for p in 0..labs.len().saturating_sub(1) {
            let (a, b) = (labs[p].label, labs[p + 1].label);
            if (a == Label::Parallel && b == Label::Old(j)) || (a == Label::Old(j) && b == Label::Parallel) {
                let same = labs[p].up == labs[p + 1].up;
                site = Some((lvl, p, same));
                break 'outer;
            }
        }
    }
    let Some((lvl, p, same)) = site else {
        return Err(not_applicable(format!("component {j} never runs next to the parallel of {i}")));
    };
    // the band needs opposite orientations; reverse the parallel if they agree
    let reverse = same;
    let dbl = if reverse { double(d, top, i, true) } else { probe };
    let at = dbl.level_index[lvl];
    let labs = &dbl.labels[lvl];
    let width = labs.len();
    let left_up = labs[p].up;
    let mut cap_row = vec![Event::Id; p];
    cap_row.push(cap_event(left_up));
    cap_row.extend(std::iter::repeat_n(Event::Id, width - p - 2));
    let mut cup_row = vec![Event::Id; p];
    cup_row.push(cup_event(left_up));
    cup_row.extend(std::iter::repeat_n(Event::Id, width - p - 2));
    let mut rows = dbl.rows.clone();
    rows.insert(at, cup_row);
    rows.insert(at, cap_row);

    let mut nd = BichromeDiagram {
        ell: d.ell,
        rows,
        colors: Vec::new(),
        coupons: d.coupons.clone(),
        omega: BTreeMap::new(),
    };
    let ntop = nd.trace()?;
    // map new edges to old labels through the original levels
    let mut old_of_new: Vec<Option<usize>> = vec![None; ntop.edges.len()];
    for (l, labs) in dbl.labels.iter().enumerate() {
        let idx = dbl.level_index[l];
        let nl = if idx > at { idx + 2 } else { idx };
        for (pos, lab) in labs.iter().enumerate() {
            let e = ntop.levels[nl][pos].edge;
            let old = match lab.label {
                Label::Old(x) => x,
                Label::Parallel => j,
            };
            match old_of_new[e] {
                None => old_of_new[e] = Some(old),
                Some(o) if o == old => {}
                Some(_) => return Err(Error::InvalidConfig("handle slide produced inconsistent edges".into())),
            }
        }
    }
    let old_of_new: Vec<usize> = old_of_new
        .into_iter()
        .map(|o| o.ok_or_else(|| Error::InvalidConfig("handle slide lost an edge".into())))
        .collect::<Result<_>>()?;
    let mut edge_map = vec![usize::MAX; d.num_edges()];
    for (e, &o) in old_of_new.iter().enumerate() {
        edge_map[o] = e;
    }
    let alpha = d.meridian(i)?;
    let beta = d.meridian(j)?;
    nd.colors = old_of_new.iter().map(|&o| d.colors[o].clone()).collect();
    for (e, &o) in old_of_new.iter().enumerate() {
        if !d.colors[o].is_red() {
            continue;
        }
        let w = if o == i {
            if reverse { alpha + beta } else { alpha - beta }
        } else {
            d.meridian(o)?
        };
        nd.omega.insert(e, frac(w));
    }
    nd.topology()?;
    Ok(MoveResult { diagram: nd, edge_map })
}
