//! Constructors for common diagrams: braid closures with kinks, lens-space presentations,
//! knot presentations in several isotopic forms, and seeded random surgery diagrams.

use super::{linking_matrix, Arrow, BichromeDiagram, Color, Event};
use crate::error::{Error, Result};
use crate::scalars::{frac, rat, RootOfUnityConfig, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

/// Builds rows one event at a time, padding with identity strands and tracking the
/// orientation of every position.
#[derive(Debug, Clone, Default)]
pub struct RowBuilder {
    rows: Vec<Vec<Event>>,
    dirs: Vec<bool>,
}

impl RowBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn width(&self) -> usize {
        self.dirs.len()
    }

    pub fn dirs(&self) -> &[bool] {
        &self.dirs
    }

    fn push(&mut self, pos: usize, ev: Event, consumed: usize) {
        let mut row = vec![Event::Id; pos];
        row.push(ev);
        row.extend(std::iter::repeat_n(Event::Id, self.dirs.len() - pos - consumed));
        self.rows.push(row);
    }

    pub fn identity(&mut self) {
        self.rows.push(vec![Event::Id; self.dirs.len()]);
    }

    pub fn cross(&mut self, pos: usize, over: bool) {
        self.push(pos, if over { Event::Over } else { Event::Under }, 2);
        self.dirs.swap(pos, pos + 1);
    }

    /// Cup producing two new positions at `pos`; `left_up` orients the left leg.
    pub fn cup(&mut self, pos: usize, left_up: bool) {
        self.push(pos, Event::Cup(if left_up { Arrow::Left } else { Arrow::Right }), 0);
        self.dirs.splice(pos..pos, [left_up, !left_up]);
    }

    pub fn cap(&mut self, pos: usize) {
        let left_up = self.dirs[pos];
        assert_ne!(left_up, self.dirs[pos + 1], "cap joins strands of equal orientation");
        self.push(pos, Event::Cap(if left_up { Arrow::Right } else { Arrow::Left }), 2);
        self.dirs.drain(pos..pos + 2);
    }

    /// Kink on the strand at `pos` adding `+1` or `-1` to the writhe.
    pub fn curl(&mut self, pos: usize, positive: bool) {
        let up = self.dirs[pos];
        // the loop opens on the right; its left leg runs against the strand
        self.cup(pos + 1, !up);
        self.cross(pos, !positive);
        self.cap(pos);
    }

    pub fn coupon(&mut self, pos: usize, k: usize, inputs: usize, outputs: &[bool]) {
        self.push(pos, Event::Coupon(k), inputs);
        self.dirs.splice(pos..pos + inputs, outputs.iter().copied());
    }

    pub fn rows(self) -> Vec<Vec<Event>> {
        self.rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BraidOp {
    /// Crossing of the strands at `pos` and `pos + 1`.
    Cross { pos: usize, over: bool },
    Curl { pos: usize, positive: bool },
}

/// A braid word with kinks, closed to a link by strands returning on the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Braid {
    pub strands: usize,
    pub ops: Vec<BraidOp>,
}

impl Braid {
    pub fn new(strands: usize) -> Self {
        Self { strands, ops: Vec::new() }
    }

    pub fn sigma(mut self, pos: usize, over: bool) -> Self {
        self.ops.push(BraidOp::Cross { pos, over });
        self
    }

    /// Two crossings of the same type: a clasp linking the two strands once.
    pub fn clasp(self, pos: usize, over: bool) -> Self {
        self.sigma(pos, over).sigma(pos, over)
    }

    pub fn curl(mut self, pos: usize, positive: bool) -> Self {
        self.ops.push(BraidOp::Curl { pos, positive });
        self
    }

    pub fn curls(mut self, pos: usize, n: i64) -> Self {
        for _ in 0..n.abs() {
            self.ops.push(BraidOp::Curl { pos, positive: n > 0 });
        }
        self
    }

    /// `perm[k]` is the top position of the strand starting at bottom position `k`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for op in &self.ops {
            if let BraidOp::Cross { pos, .. } = op {
                at.swap(*pos, pos + 1);
            }
        }
        let mut perm = vec![0; self.strands];
        for (top, start) in at.iter().enumerate() {
            perm[*start] = top;
        }
        perm
    }

    /// Components of the closure as cycles of strands, ordered by their smallest strand.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let perm = self.permutation();
        let mut seen = vec![false; self.strands];
        let mut out = Vec::new();
        for s in 0..self.strands {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut k = s;
            while !seen[k] {
                seen[k] = true;
                cyc.push(k);
                k = perm[k];
            }
            out.push(cyc);
        }
        out
    }

    /// Rows of the closure: nested cups, the braid, nested caps.
    pub fn closure_rows(&self) -> Vec<Vec<Event>> {
        let m = self.strands;
        let mut b = RowBuilder::new();
        for k in 0..m {
            b.cup(k, true);
        }
        for op in &self.ops {
            match *op {
                BraidOp::Cross { pos, over } => b.cross(pos, over),
                BraidOp::Curl { pos, positive } => b.curl(pos, positive),
            }
        }
        for k in (0..m).rev() {
            b.cap(k);
        }
        b.rows()
    }

    /// Closure with one color and optional meridian value per cycle of [`Braid::cycles`].
    pub fn closure(&self, ell: u32, colors: &[Color], omega: &[Option<Rational>]) -> Result<BichromeDiagram> {
        let cycles = self.cycles();
        if colors.len() != cycles.len() || omega.len() != cycles.len() {
            return Err(Error::InvalidConfig(format!(
                "braid closure has {} components but {} colors and {} values",
                cycles.len(),
                colors.len(),
                omega.len()
            )));
        }
        let mut d = BichromeDiagram {
            ell,
            rows: self.closure_rows(),
            colors: Vec::new(),
            coupons: Vec::new(),
            omega: BTreeMap::new(),
        };
        let top = d.trace()?;
        let m = self.strands;
        let mut colors_by_edge = vec![Color::Red; top.edges.len()];
        for (c, cyc) in cycles.iter().enumerate() {
            let e = top.levels[m][cyc[0]].edge;
            colors_by_edge[e] = colors[c].clone();
            if let Some(w) = omega[c] {
                d.omega.insert(e, w);
            }
        }
        d.colors = colors_by_edge;
        d.topology()?;
        Ok(d)
    }

    /// Edge index of each cycle in the closure.
    pub fn cycle_edges(&self, d: &BichromeDiagram) -> Result<Vec<usize>> {
        let top = d.trace()?;
        Ok(self.cycles().iter().map(|c| top.levels[self.strands][c[0]].edge).collect())
    }
}

pub fn empty_diagram(ell: u32) -> BichromeDiagram {
    BichromeDiagram { ell, rows: Vec::new(), colors: Vec::new(), coupons: Vec::new(), omega: BTreeMap::new() }
}

/// Unknot with blackboard framing `framing` (made of kinks).
pub fn framed_unknot(ell: u32, framing: i64, color: Color, omega: Option<Rational>) -> Result<BichromeDiagram> {
    Braid::new(1).curls(0, framing).closure(ell, &[color], &[omega])
}

/// `L(p, 1)` as a `p`-framed unknot, optionally clasped once with a blue unknot colored
/// `typical(beta)`. Without the blue unknot the surgery component is edge 0; with it the blue
/// unknot is edge 0, on the outer face, and the surgery component is edge 1.
pub fn lens_space(ell: u32, p: i64, alpha: Rational, beta: Option<Rational>) -> Result<BichromeDiagram> {
    match beta {
        None => framed_unknot(ell, p, Color::Surgery, Some(alpha)),
        Some(b) => Braid::new(2).curls(1, p).clasp(0, true).closure(
            ell,
            &[Color::Blue(format!("typical({})", crate::scalars::format_rational(b))), Color::Surgery],
            &[None, Some(alpha)],
        ),
    }
}

/// Surgery values `alpha = (k - beta) / p` that make `omega` extend over `L(p, 1)` with a blue
/// unknot of degree `beta` clasped once.
pub fn lens_alpha(p: i64, beta: Rational, k: i64) -> Rational {
    frac((Rational::from_integer(k) - beta) / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnotType {
    Trefoil,
    FigureEight,
}

/// Several isotopic presentations of a knot with blackboard framing 0.
pub fn knot_presentations(knot: KnotType) -> Vec<Braid> {
    match knot {
        KnotType::Trefoil => {
            let base = Braid::new(2).sigma(0, true).sigma(0, true).sigma(0, true).curls(0, -3);
            // Reidemeister II pair inserted between crossings
            let r2 = Braid::new(2)
                .sigma(0, true)
                .sigma(0, true)
                .sigma(0, false)
                .sigma(0, true)
                .sigma(0, true)
                .curls(1, -3);
            // Markov stabilization compensated by a kink of opposite sign
            let markov = Braid::new(3).sigma(0, true).sigma(0, true).sigma(0, true).sigma(1, true).curls(2, -4);
            // kinks spread over both strands
            let spread = Braid::new(2).curl(0, false).sigma(0, true).curl(0, false).sigma(0, true).sigma(0, true).curl(1, false);
            vec![base, r2, markov, spread]
        }
        KnotType::FigureEight => {
            let base = Braid::new(3).sigma(0, true).sigma(1, false).sigma(0, true).sigma(1, false);
            // conjugated by a crossing
            let conj = Braid::new(3)
                .sigma(1, true)
                .sigma(0, true)
                .sigma(1, false)
                .sigma(0, true)
                .sigma(1, false)
                .sigma(1, false);
            let markov = Braid::new(4)
                .sigma(0, true)
                .sigma(1, false)
                .sigma(0, true)
                .sigma(1, false)
                .sigma(2, false)
                .curls(3, 1);
            let r2 = Braid::new(3)
                .sigma(0, true)
                .sigma(1, true)
                .sigma(1, false)
                .sigma(1, false)
                .sigma(0, true)
                .sigma(1, false);
            vec![base, conj, markov, r2]
        }
    }
}

/// Disjoint union: the second diagram sits above the first. Edges of `b` are shifted by the
/// number of edges of `a`.
pub fn disjoint_union(a: &BichromeDiagram, b: &BichromeDiagram) -> Result<BichromeDiagram> {
    if a.ell != b.ell {
        return Err(Error::InvalidConfig("disjoint union of diagrams at different ell".into()));
    }
    let ne = a.num_edges();
    let nc = a.coupons.len();
    let mut rows = a.rows.clone();
    rows.extend(b.rows.iter().map(|r| {
        r.iter()
            .map(|e| match e {
                Event::Coupon(k) => Event::Coupon(k + nc),
                x => *x,
            })
            .collect()
    }));
    let mut colors = a.colors.clone();
    colors.extend(b.colors.iter().cloned());
    let mut coupons = a.coupons.clone();
    coupons.extend(b.coupons.iter().cloned());
    let mut omega = a.omega.clone();
    omega.extend(b.omega.iter().map(|(k, v)| (k + ne, *v)));
    let d = BichromeDiagram { ell: a.ell, rows, colors, coupons, omega };
    d.topology()?;
    Ok(d)
}

/// Solve `A x = b` over the rationals; `None` when `A` is singular.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(r, v)| r.iter().copied().chain([*v]).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                let src = m[col].clone();
                for (x, s) in m[r].iter_mut().zip(src) {
                    *x -= f * s;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

pub fn determinant(a: &[Vec<i64>]) -> Rational {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|x| Rational::from_integer(*x)).collect()).collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else { return Rational::zero() };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            let src = m[col].clone();
            for (x, s) in m[r].iter_mut().zip(src) {
                *x -= f * s;
            }
        }
    }
    det
}

/// A degree that is typical and semisimple, drawn from small generic fractions.
pub fn random_generic_degree<R: Rng>(rng: &mut R, cfg: &RootOfUnityConfig) -> Rational {
    loop {
        let den = [7i64, 11, 13, 17][rng.random_range(0..4)];
        let a = rat(rng.random_range(1..den), den);
        if super::is_semisimple_degree(cfg, a) {
            return a;
        }
    }
}

/// Options for [`random_surgery_diagram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub max_surgery: usize,
    pub blue: bool,
    pub red_graph: bool,
    /// Zero class on every red component; blue is then ignored.
    pub trivial_class: bool,
    /// Upper bound on the number of braid operations.
    pub max_ops: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self { max_surgery: 2, blue: false, red_graph: false, trivial_class: false, max_ops: usize::MAX }
    }
}

/// A random surgery diagram: closure of a pure braid made of clasps with random kinks.
/// Meridian values are solved so that `omega` extends over the surgered manifold (surgery
/// parallels vanish) and red graph components satisfy compatibility. Blue components carry
/// generic typical modules.
pub fn random_surgery_diagram<R: Rng>(rng: &mut R, ell: u32, spec: RandomSpec) -> Result<BichromeDiagram> {
    let cfg = RootOfUnityConfig::new(ell)?;
    for _ in 0..1000 {
        let ns = rng.random_range(1..=spec.max_surgery.max(1));
        let mut kinds: Vec<u8> = vec![0; ns];
        if spec.blue && !spec.trivial_class {
            kinds.push(1);
        }
        if spec.red_graph {
            kinds.push(2);
        }
        // shuffle the strand order
        for i in (1..kinds.len()).rev() {
            let j = rng.random_range(0..=i);
            kinds.swap(i, j);
        }
        // cuts need a strand on the outer face: the blue one, if any, goes leftmost
        if let Some(b) = kinds.iter().position(|k| *k == 1) {
            kinds.swap(0, b);
        }
        let m = kinds.len();
        let mut braid = Braid::new(m);
        let nops = rng.random_range(m..=2 * m + 1).min(spec.max_ops.max(1));
        for _ in 0..nops {
            if m > 1 && rng.random_bool(0.6) {
                let pos = rng.random_range(0..m - 1);
                let over = rng.random_bool(0.5);
                braid = braid.clasp(pos, over);
            } else {
                let pos = rng.random_range(0..m);
                braid = braid.curl(pos, rng.random_bool(0.5));
            }
        }
        let colors_kind: Vec<u8> = braid.cycles().iter().map(|c| kinds[c[0]]).collect();
        let colors: Vec<Color> = colors_kind
            .iter()
            .map(|k| match k {
                0 => Color::Surgery,
                1 => {
                    let b = random_generic_degree(rng, &cfg);
                    Color::Blue(format!("typical({})", crate::scalars::format_rational(b)))
                }
                _ => Color::Red,
            })
            .collect();
        let placeholder = vec![None; colors.len()];
        let mut d = braid.closure(ell, &colors, &placeholder)?;
        let top = d.topology()?;
        let lk = linking_matrix(&top);
        let red: Vec<usize> = d.red_components();
        let lr: Vec<Vec<i64>> = red.iter().map(|&i| red.iter().map(|&j| lk[i][j]).collect()).collect();
        if determinant(&lr).is_zero() {
            continue;
        }
        if spec.trivial_class {
            for &i in &red {
                d.omega.insert(i, Rational::zero());
            }
            return Ok(d);
        }
        let w = d.meridians()?;
        let blue: Vec<usize> = (0..d.num_edges()).filter(|e| !d.colors[*e].is_red()).collect();
        let rhs: Vec<Rational> = red
            .iter()
            .map(|&i| {
                let target = if d.colors[i] == Color::Surgery {
                    Rational::from_integer(rng.random_range(-2..=2))
                } else {
                    rat(rng.random_range(-4..=4), 4)
                };
                blue.iter().fold(target, |acc, &b| acc - w[b] * lk[i][b])
            })
            .collect();
        let a: Vec<Vec<Rational>> = lr.iter().map(|r| r.iter().map(|x| Rational::from_integer(*x)).collect()).collect();
        let Some(sol) = solve_rational(&a, &rhs) else { continue };
        for (k, &i) in red.iter().enumerate() {
            d.omega.insert(i, frac(sol[k]));
        }
        // without a blue edge the modified invariant needs a red cut at a semisimple degree
        let outer = top.levels[m][0].edge;
        if !kinds.contains(&1) && !super::is_semisimple_degree(&cfg, d.omega[&outer]) {
            continue;
        }
        return Ok(d);
    }
    Err(Error::InvalidConfig("could not generate a random surgery diagram".into()))
}

/// Named diagrams exercised by the exponent and invariant checks: unknots, knot presentations,
/// lens spaces with and without a blue unknot, Hopf links and seeded random surgery diagrams.
pub fn corpus(ell: u32) -> Result<Vec<(String, BichromeDiagram)>> {
    let zero = Some(Rational::zero());
    let mut out = vec![("empty".to_string(), empty_diagram(ell))];
    for f in [1, -1, 0] {
        out.push((format!("unknot_{f}"), framed_unknot(ell, f, Color::Surgery, zero)?));
    }
    for (name, knot) in [("trefoil", KnotType::Trefoil), ("figure_eight", KnotType::FigureEight)] {
        for (i, b) in knot_presentations(knot).iter().enumerate() {
            out.push((format!("{name}_{i}"), b.closure(ell, &[Color::Red], &[Some(rat(1, 4))])?));
        }
    }
    let beta = rat(1, 7);
    for p in 1..=5 {
        out.push((format!("lens_p{p}"), lens_space(ell, p, lens_alpha(p, beta, 1), Some(beta))?));
        out.push((format!("lens_plain_p{p}"), lens_space(ell, p, Rational::zero(), None)?));
    }
    let blue = Color::Blue("typical(2/7)".into());
    let w = Some(rat(2, 7));
    out.push((
        "hopf_blue_outer".into(),
        Braid::new(2).curls(1, -1).clasp(0, true).closure(ell, &[blue.clone(), Color::Red], &[None, w])?,
    ));
    out.push((
        "hopf_red_outer".into(),
        Braid::new(2).curls(0, -1).clasp(0, true).closure(ell, &[Color::Red, blue], &[w, None])?,
    ));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for k in 0..12 {
        let spec = RandomSpec {
            max_surgery: 2,
            blue: k % 2 == 0,
            red_graph: k % 3 == 0,
            trivial_class: k % 4 == 3,
            max_ops: 5,
        };
        out.push((format!("random_{k}"), random_surgery_diagram(&mut rng, ell, spec)?));
    }
    Ok(out)
}

/// Hopf link drawn with the first unknot low on the left and the second high on the right,
/// so that each component reaches the outer face with an upward point. Colors and classes are
/// given per component; `curls` adds kinks to each.
pub fn staggered_hopf(ell: u32, components: [(Color, Option<Rational>); 2], curls: [i64; 2]) -> Result<BichromeDiagram> {
    let mut b = RowBuilder::new();
    b.cup(0, true);
    for _ in 0..curls[0].unsigned_abs() {
        b.curl(0, curls[0] > 0);
    }
    b.cup(2, true);
    for _ in 0..curls[1].unsigned_abs() {
        b.curl(2, curls[1] > 0);
    }
    b.cross(1, true);
    b.cross(1, true);
    b.cap(0);
    b.cap(0);
    let rows = b.rows();
    let probe = BichromeDiagram { ell, rows: rows.clone(), colors: vec![Color::Surgery; 2], coupons: Vec::new(), omega: BTreeMap::new() };
    let top = probe.topology()?;
    let first = top.levels[1][0].edge;
    let order = if first == 0 { [0, 1] } else { [1, 0] };
    let mut colors = vec![Color::Surgery; 2];
    let mut omega = BTreeMap::new();
    for (k, (c, w)) in components.into_iter().enumerate() {
        let e = order[k];
        if c.is_red() {
            omega.insert(e, frac(w.unwrap_or_else(Rational::zero)));
        }
        colors[e] = c;
    }
    Ok(BichromeDiagram { ell, rows, colors, coupons: Vec::new(), omega })
}
