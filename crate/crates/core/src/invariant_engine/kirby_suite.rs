//! Randomized Kirby invariance checks for `H` and `H'`.

use super::Engine;
use crate::diagrams::{kirby_move, random_surgery_diagram, BichromeDiagram, KirbyMove, RandomSpec};
use crate::error::{Error, Result};
use crate::scalars::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MoveKind {
    K0,
    KIPlus,
    KIMinus,
    KII,
}

impl MoveKind {
    pub const ALL: [MoveKind; 4] = [MoveKind::K0, MoveKind::KIPlus, MoveKind::KIMinus, MoveKind::KII];

    pub fn name(&self) -> &'static str {
        match self {
            MoveKind::K0 => "K0",
            MoveKind::KIPlus => "KI+",
            MoveKind::KIMinus => "KI-",
            MoveKind::KII => "KII",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WhichInvariant {
    H,
    HPrime,
}

impl WhichInvariant {
    pub fn name(&self) -> &'static str {
        match self {
            WhichInvariant::H => "H",
            WhichInvariant::HPrime => "H'",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirbySuiteConfig {
    pub seed: u64,
    pub pairs_per_move: usize,
    pub tol: f64,
    /// Moved diagrams with more crossings are skipped.
    pub max_crossings: usize,
    /// Negative control: apply the signature correction with the wrong sign. The suite is
    /// expected to fail.
    pub flip_signature_sign: bool,
}

impl Default for KirbySuiteConfig {
    fn default() -> Self {
        Self { seed: 1, pairs_per_move: 50, tol: 1e-8, max_crossings: 14, flip_signature_sign: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoveStats {
    pub invariant: WhichInvariant,
    pub kind: MoveKind,
    pub pairs: usize,
    /// Pairs whose value is clearly nonzero.
    pub nonzero: usize,
    pub failures: usize,
    pub max_difference: f64,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KirbySuiteReport {
    pub ell: u32,
    pub seed: u64,
    pub tol: f64,
    pub stats: Vec<MoveStats>,
    pub diagrams: usize,
}

impl KirbySuiteReport {
    pub fn passed(&self, pairs_per_move: usize) -> bool {
        self.stats.iter().all(|s| s.failures == 0 && s.pairs >= pairs_per_move)
    }
}

fn relative_difference(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

fn random_move<R: Rng>(rng: &mut R, d: &BichromeDiagram, kind: MoveKind) -> Option<KirbyMove> {
    match kind {
        MoveKind::KIPlus => Some(KirbyMove::KIPlus),
        MoveKind::KIMinus => Some(KirbyMove::KIMinus),
        MoveKind::K0 => {
            let red = d.red_components();
            (!red.is_empty()).then(|| KirbyMove::K0(red[rng.random_range(0..red.len())]))
        }
        MoveKind::KII => {
            let over = d.surgery_components();
            if over.is_empty() || d.num_edges() < 2 {
                return None;
            }
            let i = over[rng.random_range(0..over.len())];
            let others: Vec<usize> = (0..d.num_edges()).filter(|j| *j != i).collect();
            Some(KirbyMove::KII { over: i, slid: others[rng.random_range(0..others.len())] })
        }
    }
}

impl Engine {
    fn invariant_value(&self, d: &BichromeDiagram, which: WhichInvariant, flip: bool) -> Result<C64> {
        let r = match which {
            WhichInvariant::H => self.hennings_invariant(d)?,
            WhichInvariant::HPrime => self.modified_invariant(d, None)?,
        };
        Ok(if flip { r.value * r.delta_used.powi(2 * r.signature as i32) } else { r.value })
    }

    /// Compare each invariant before and after random moves until every move type has
    /// `pairs_per_move` comparisons. `H` is exercised on diagrams in the trivial class, where it
    /// does not vanish, and `H'` on diagrams with generic classes.
    pub fn kirby_suite(&self, cfg: &KirbySuiteConfig) -> Result<KirbySuiteReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut stats = Vec::new();
        let mut diagrams = 0;
        for which in [WhichInvariant::H, WhichInvariant::HPrime] {
            for kind in MoveKind::ALL {
                stats.push(MoveStats {
                    invariant: which,
                    kind,
                    pairs: 0,
                    nonzero: 0,
                    failures: 0,
                    max_difference: 0.0,
                    skipped: 0,
                });
            }
        }
        let budget = 40 * cfg.pairs_per_move.max(1);
        for round in 0..budget {
            if stats.iter().all(|s| s.pairs >= cfg.pairs_per_move) {
                break;
            }
            let which = if round % 2 == 0 { WhichInvariant::H } else { WhichInvariant::HPrime };
            let spec = RandomSpec {
                max_surgery: 2,
                blue: which == WhichInvariant::HPrime && rng.random_bool(0.5),
                red_graph: rng.random_bool(0.25),
                trivial_class: which == WhichInvariant::H,
                max_ops: 4,
            };
            let d = random_surgery_diagram(&mut rng, self.ell(), spec)?;
            let base = match self.invariant_value(&d, which, cfg.flip_signature_sign) {
                Ok(v) => v,
                Err(Error::NotAdmissible(_)) | Err(Error::NotSemisimpleDegree { .. }) => continue,
                Err(e) => return Err(e),
            };
            diagrams += 1;
            for kind in MoveKind::ALL {
                let slot = stats.iter_mut().find(|s| s.invariant == which && s.kind == kind).expect("slot");
                if slot.pairs >= cfg.pairs_per_move {
                    continue;
                }
                let Some(mv) = random_move(&mut rng, &d, kind) else { continue };
                let moved = match kirby_move(&d, mv) {
                    Ok(m) => m.diagram,
                    Err(Error::MoveNotApplicable(_)) => {
                        slot.skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                if moved.topology()?.crossings.len() > cfg.max_crossings {
                    slot.skipped += 1;
                    continue;
                }
                let value = match self.invariant_value(&moved, which, cfg.flip_signature_sign) {
                    Ok(v) => v,
                    // reversing the outer component can leave no cut on the outer face
                    Err(Error::NotAdmissible(_)) => {
                        slot.skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let diff = relative_difference(base, value);
                slot.pairs += 1;
                if base.norm() > 1e-6 {
                    slot.nonzero += 1;
                }
                slot.max_difference = slot.max_difference.max(diff);
                // NaN counts as a failure
                if diff.is_nan() || diff > cfg.tol {
                    slot.failures += 1;
                }
            }
        }
        Ok(KirbySuiteReport { ell: self.ell(), seed: cfg.seed, tol: cfg.tol, stats, diagrams })
    }
}
