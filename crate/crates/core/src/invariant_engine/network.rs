//! Dense tensor networks with planned pairwise contraction.

use crate::error::{Error, Result};
use crate::scalars::C64;
use nalgebra::DMatrix;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Row-major dense tensor whose axes carry bond labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub labels: Vec<usize>,
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

impl Node {
    pub fn new(labels: Vec<usize>, dims: Vec<usize>, data: Vec<C64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        debug_assert_eq!(labels.len(), dims.len());
        Self { labels, dims, data }
    }

    pub fn scalar(x: C64) -> Self {
        Self { labels: Vec::new(), dims: Vec::new(), data: vec![x] }
    }

    pub fn size(&self) -> usize {
        self.data.len()
    }

    /// Axes reordered to `order` (a permutation of the labels).
    pub fn permuted(&self, order: &[usize]) -> Node {
        let axes: Vec<usize> = order.iter().map(|l| self.labels.iter().position(|x| x == l).expect("label")).collect();
        if axes.iter().enumerate().all(|(i, a)| i == *a) {
            return self.clone();
        }
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let new_dims: Vec<usize> = axes.iter().map(|a| self.dims[*a]).collect();
        let new_strides: Vec<usize> = axes.iter().map(|a| strides[*a]).collect();
        let mut out = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; n];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            out.push(self.data[src]);
            for k in (0..n).rev() {
                idx[k] += 1;
                src += new_strides[k];
                if idx[k] < new_dims[k] {
                    break;
                }
                src -= new_strides[k] * new_dims[k];
                idx[k] = 0;
            }
        }
        Node { labels: order.to_vec(), dims: new_dims, data: out }
    }
}

/// Contract every shared label of `a` and `b`.
pub fn contract_pair(a: &Node, b: &Node) -> Node {
    let shared: Vec<usize> = a.labels.iter().copied().filter(|l| b.labels.contains(l)).collect();
    let fa: Vec<usize> = a.labels.iter().copied().filter(|l| !shared.contains(l)).collect();
    let fb: Vec<usize> = b.labels.iter().copied().filter(|l| !shared.contains(l)).collect();
    let dim_of = |n: &Node, l: usize| n.dims[n.labels.iter().position(|x| *x == l).unwrap()];
    let m: usize = fa.iter().map(|l| dim_of(a, *l)).product();
    let k: usize = shared.iter().map(|l| dim_of(a, *l)).product();
    let n: usize = fb.iter().map(|l| dim_of(b, *l)).product();
    let pa = a.permuted(&[fa.clone(), shared.clone()].concat());
    let pb = b.permuted(&[shared.clone(), fb.clone()].concat());
    let ma = DMatrix::from_row_slice(m, k, &pa.data);
    let mb = DMatrix::from_row_slice(k, n, &pb.data);
    let c = ma * mb;
    let data: Vec<C64> = c.transpose().as_slice().to_vec();
    let mut labels = fa.clone();
    labels.extend(&fb);
    let mut dims: Vec<usize> = fa.iter().map(|l| dim_of(a, *l)).collect();
    dims.extend(fb.iter().map(|l| dim_of(b, *l)));
    Node { labels, dims, data }
}

#[derive(Debug, Clone, Default)]
pub struct Network {
    pub nodes: Vec<Node>,
    label_dims: Vec<usize>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn label(&mut self, dim: usize) -> usize {
        self.label_dims.push(dim);
        self.label_dims.len() - 1
    }

    pub fn label_dim(&self, l: usize) -> usize {
        self.label_dims[l]
    }

    pub fn add(&mut self, labels: Vec<usize>, data: Vec<C64>) {
        let dims: Vec<usize> = labels.iter().map(|l| self.label_dims[*l]).collect();
        assert_eq!(dims.iter().product::<usize>(), data.len(), "node data does not match its labels");
        let set: BTreeSet<usize> = labels.iter().copied().collect();
        assert_eq!(set.len(), labels.len(), "node repeats a label");
        self.nodes.push(Node::new(labels, dims, data));
    }

    /// Matrix node `[out, in]` from a dense matrix.
    pub fn add_matrix(&mut self, out: usize, inp: usize, m: &crate::linalg::CMat) {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        self.add(vec![out, inp], data);
    }

    /// Contract everything, leaving `open` as the axes of the result in that order.
    pub fn contract(self, open: &[usize]) -> Result<Node> {
        let nodes = self.nodes;
        // every non-open label must occur exactly twice
        let mut count = vec![0usize; self.label_dims.len()];
        for n in &nodes {
            for l in &n.labels {
                count[*l] += 1;
            }
        }
        for (l, c) in count.iter().enumerate() {
            let want = if open.contains(&l) { 1 } else { 2 };
            if *c != want && *c != 0 {
                return Err(Error::InvalidConfig(format!("bond {l} appears {c} times in the network")));
            }
        }
        let order = plan(&nodes, &self.label_dims);
        let mut slots: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
        for (i, j) in order {
            let a = slots[i].take().expect("planned node");
            let b = slots[j].take().expect("planned node");
            slots.push(Some(contract_pair(&a, &b)));
        }
        let mut nodes: Vec<Node> = slots.into_iter().flatten().collect();
        let result = match nodes.pop() {
            Some(n) => n,
            None => Node::scalar(C64::one()),
        };
        if result.labels.len() != open.len() || open.iter().any(|l| !result.labels.contains(l)) {
            return Err(Error::InvalidConfig("open bonds of the network do not match the request".into()));
        }
        Ok(result.permuted(open))
    }
}

/// Best pairwise contraction order found by greedy searches with a few cost functions and
/// randomized restarts; indices refer to the node list extended by each intermediate.
fn plan(nodes: &[Node], label_dims: &[usize]) -> Vec<(usize, usize)> {
    let sets: Vec<(BTreeSet<usize>, f64)> =
        nodes.iter().map(|n| (n.labels.iter().copied().collect(), n.size() as f64)).collect();
    let trials = if nodes.len() <= 6 { 0 } else { 48 };
    let mut rng = ChaCha8Rng::seed_from_u64(nodes.len() as u64);
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    for t in 0..3 + trials {
        let rule = t % 3;
        let noise = if t < 3 { 0.0 } else { 1.0 };
        let (cost, order) = greedy(&sets, label_dims, rule, noise, &mut rng);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, order));
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

fn greedy(
    start: &[(BTreeSet<usize>, f64)],
    label_dims: &[usize],
    rule: usize,
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<(usize, usize)>) {
    let mut all: Vec<(BTreeSet<usize>, f64)> = start.to_vec();
    let mut live: Vec<usize> = (0..start.len()).collect();
    let mut order = Vec::new();
    let mut flops = 0.0;
    while live.len() > 1 {
        let mut best: Option<(usize, usize, f64, f64)> = None;
        let mut any_shared = false;
        for (x, &i) in live.iter().enumerate() {
            for &j in &live[x + 1..] {
                let sh: f64 = all[i].0.intersection(&all[j].0).map(|l| label_dims[*l] as f64).product();
                let shares = all[i].0.intersection(&all[j].0).next().is_some();
                if !shares {
                    continue;
                }
                any_shared = true;
                let out = all[i].1 * all[j].1 / (sh * sh);
                let work = all[i].1 * all[j].1 / sh;
                let mut score = match rule {
                    0 => out,
                    1 => out - all[i].1 - all[j].1,
                    _ => work,
                };
                if noise > 0.0 {
                    let g: f64 = rng.random::<f64>();
                    score = if score >= 0.0 { score * (1.0 + noise * g) } else { score * (1.0 - 0.5 * noise * g) };
                }
                if best.is_none_or(|b| score < b.2) {
                    best = Some((i, j, score, work));
                }
            }
        }
        let (i, j, work) = match best {
            Some((i, j, _, w)) => (i, j, w),
            None => {
                debug_assert!(!any_shared);
                let mut idx = live.clone();
                idx.sort_by(|a, b| all[*a].1.total_cmp(&all[*b].1));
                (idx[0], idx[1], all[idx[0]].1 * all[idx[1]].1)
            }
        };
        flops += work;
        let labels: BTreeSet<usize> = all[i].0.symmetric_difference(&all[j].0).copied().collect();
        let size = labels.iter().map(|l| label_dims[*l] as f64).product();
        all.push((labels, size));
        live.retain(|k| *k != i && *k != j);
        live.push(all.len() - 1);
        order.push((i, j));
    }
    (flops, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;

    fn c(x: f64, y: f64) -> C64 {
        C64::new(x, y)
    }

    #[test]
    fn permutation_round_trip() {
        let data: Vec<C64> = (0..24).map(|k| c(k as f64, 0.0)).collect();
        let n = Node::new(vec![0, 1, 2], vec![2, 3, 4], data);
        let p = n.permuted(&[2, 0, 1]);
        assert_eq!(p.dims, vec![4, 2, 3]);
        // entry (i0, i1, i2) = 12 i0 + 4 i1 + i2
        assert_eq!(p.data[3 * 6 + 3 + 2], c(12.0 + 8.0 + 3.0, 0.0));
        assert_eq!(p.permuted(&[0, 1, 2]), n);
    }

    #[test]
    fn chain_of_matrices_matches_dense_product() {
        let a = CMat::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64 * 0.5));
        let b = CMat::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0));
        let d = CMat::from_fn(3, 3, |i, j| c(1.0 / (1.0 + i as f64 + j as f64), -(i as f64)));
        let mut net = Network::new();
        let l: Vec<usize> = (0..4).map(|_| net.label(3)).collect();
        net.add_matrix(l[1], l[0], &a);
        net.add_matrix(l[2], l[1], &b);
        net.add_matrix(l[3], l[2], &d);
        let r = net.contract(&[l[3], l[0]]).unwrap();
        let want = &d * &b * &a;
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.data[i * 3 + j] - want[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_ring_is_a_trace() {
        let a = CMat::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0));
        let b = CMat::from_fn(2, 2, |i, j| c(1.0, (i * j) as f64));
        let mut net = Network::new();
        let x = net.label(2);
        let y = net.label(2);
        net.add_matrix(y, x, &a);
        net.add_matrix(x, y, &b);
        let s = net.contract(&[]).unwrap();
        assert!((s.data[0] - (&b * &a).trace()).norm() < 1e-12);
    }

    #[test]
    fn disconnected_pieces_multiply() {
        let mut net = Network::new();
        let x = net.label(2);
        let y = net.label(2);
        let id = CMat::identity(2, 2);
        net.add_matrix(x, y, &id);
        net.add_matrix(y, x, &id);
        let u = net.label(3);
        net.add(vec![u], vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)]);
        let r = net.contract(&[u]).unwrap();
        assert_eq!(r.data, vec![c(2.0, 0.0), c(4.0, 0.0), c(0.0, 2.0)]);
    }
}
