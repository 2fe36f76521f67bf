//! Complete binary forests, their Łukasiewicz paths, bridges and the block
//! sampler built on them.
//!
//! Nodes are listed in depth-first preorder. A node with two children is
//! an up step, a leaf a down step, so a forest of `k` trees with `n` nodes
//! is a path of length `n` that first reaches `-k` at its last step.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::BlockSizes;

/// Sequence of steps in `{+1, -1}` or `{+1, 0, -1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePath {
    pub steps: Vec<i8>,
}

impl LatticePath {
    pub fn new(steps: Vec<i8>) -> Result<Self> {
        if steps.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::MalformedPath("steps must lie in {-1, 0, 1}".into()));
        }
        Ok(Self { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.steps.iter().all(|&s| s != 0)
    }

    pub fn end(&self) -> i64 {
        self.steps.iter().map(|&s| s as i64).sum()
    }

    /// Heights `H_0 = 0, ..., H_len`.
    pub fn heights(&self) -> Vec<i64> {
        let mut h = Vec::with_capacity(self.steps.len() + 1);
        let mut cur = 0i64;
        h.push(0);
        for &s in &self.steps {
            cur += s as i64;
            h.push(cur);
        }
        h
    }

    /// First times `tau_{-1}, ..., tau_{-k}` at which the path reaches `-1, ..., -k`.
    pub fn first_passages(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(k);
        let mut cur = 0i64;
        for (t, &s) in self.steps.iter().enumerate() {
            cur += s as i64;
            if cur == -(out.len() as i64) - 1 && out.len() < k {
                out.push(t + 1);
            }
        }
        out
    }

    /// Number of trees if this is a first-passage path (reaching its final
    /// level `-k < 0` for the first time at the last step).
    pub fn first_passage_level(&self) -> Result<usize> {
        if !self.is_binary() {
            return Err(Error::MalformedPath("forest paths use steps +1 and -1 only".into()));
        }
        let end = self.end();
        if end >= 0 {
            return Err(Error::MalformedPath(format!("path ends at {end}, not below 0")));
        }
        let k = (-end) as usize;
        let h = self.heights();
        if h[..h.len() - 1].iter().any(|&v| v <= end) {
            return Err(Error::MalformedPath(format!("path reaches {end} before its end")));
        }
        Ok(k)
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.steps {
            f.write_str(match s {
                1 => "U",
                0 => "Z",
                _ => "D",
            })?;
        }
        Ok(())
    }
}

impl FromStr for LatticePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .trim()
            .chars()
            .map(|c| match c {
                'U' => Ok(1),
                'Z' => Ok(0),
                'D' => Ok(-1),
                other => Err(Error::Parse(format!("unknown step {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(steps)
    }
}

/// Rooted complete binary tree, stored as the preorder sequence of
/// "has two children" flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryTree {
    internal: Vec<bool>,
}

impl BinaryTree {
    pub fn leaf() -> Self {
        Self { internal: vec![false] }
    }

    pub fn join(left: &BinaryTree, right: &BinaryTree) -> Self {
        let mut internal = Vec::with_capacity(1 + left.size() + right.size());
        internal.push(true);
        internal.extend_from_slice(&left.internal);
        internal.extend_from_slice(&right.internal);
        Self { internal }
    }

    pub fn size(&self) -> usize {
        self.internal.len()
    }

    pub fn preorder(&self) -> &[bool] {
        &self.internal
    }
}

/// Ordered forest of complete binary trees, optionally with a marked node
/// in the first tree (given by its preorder index).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForest {
    pub trees: Vec<BinaryTree>,
    pub mark: Option<usize>,
}

impl BinaryForest {
    pub fn new(trees: Vec<BinaryTree>, mark: Option<usize>) -> Result<Self> {
        if trees.is_empty() {
            return Err(invalid("a forest needs at least one tree"));
        }
        if let Some(m) = mark {
            if m >= trees[0].size() {
                return Err(invalid(format!("mark {m} outside the first tree")));
            }
        }
        Ok(Self { trees, mark })
    }

    pub fn node_count(&self) -> usize {
        self.trees.iter().map(BinaryTree::size).sum()
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub fn tree_sizes(&self) -> Vec<usize> {
        self.trees.iter().map(BinaryTree::size).collect()
    }
}

/// Łukasiewicz path of a forest (the mark is ignored).
pub fn forest_to_path(f: &BinaryForest) -> LatticePath {
    let steps = f
        .trees
        .iter()
        .flat_map(|t| t.internal.iter().map(|&i| if i { 1 } else { -1 }))
        .collect();
    LatticePath { steps }
}

/// Inverse of [`forest_to_path`].
pub fn path_to_forest(w: &LatticePath) -> Result<BinaryForest> {
    let k = w.first_passage_level()?;
    let taus = w.first_passages(k);
    let mut trees = Vec::with_capacity(k);
    let mut start = 0;
    for &tau in &taus {
        trees.push(BinaryTree { internal: w.steps[start..tau].iter().map(|&s| s == 1).collect() });
        start = tau;
    }
    BinaryForest::new(trees, None)
}

/// Cyclic shift of the increments: `rot(w, r) = w[r..] ++ w[..r]`.
pub fn rot_discrete(w: &LatticePath, r: usize) -> Result<LatticePath> {
    if r > w.len() {
        return Err(invalid(format!("rotation {r} exceeds path length {}", w.len())));
    }
    let r = if w.is_empty() { 0 } else { r % w.len() };
    let mut steps = Vec::with_capacity(w.len());
    steps.extend_from_slice(&w.steps[r..]);
    steps.extend_from_slice(&w.steps[..r]);
    Ok(LatticePath { steps })
}

/// Bridge of a marked forest: its path rotated to start at the mark.
pub fn marked_forest_to_bridge(f: &BinaryForest) -> Result<LatticePath> {
    let mark = f.mark.ok_or_else(|| invalid("forest has no mark"))?;
    rot_discrete(&forest_to_path(f), mark)
}

/// First index in `0..len` (mod `len`) of the minimum of the heights.
fn first_argmin(w: &LatticePath) -> usize {
    let h = w.heights();
    let mut best = 0;
    for (j, &v) in h.iter().enumerate() {
        if v < h[best] {
            best = j;
        }
    }
    if w.is_empty() {
        0
    } else {
        best % w.len()
    }
}

/// Inverse of [`marked_forest_to_bridge`], rotating at the first argmin.
pub fn bridge_to_marked_forest(b: &LatticePath) -> Result<BinaryForest> {
    if !b.is_binary() || b.end() >= 0 {
        return Err(Error::MalformedPath("a bridge has steps +1/-1 and ends below 0".into()));
    }
    let m = first_argmin(b);
    let mut f = path_to_forest(&rot_discrete(b, m)?)?;
    f.mark = Some((b.len() - m) % b.len());
    Ok(f)
}

/// Excursions above the running minimum: `(tau_{-j}, tau_{-j-1} - tau_{-j} - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionSet {
    pub intervals: Vec<(usize, usize)>,
}

impl ExcursionSet {
    pub fn lengths(&self) -> Vec<usize> {
        self.intervals.iter().map(|&(_, l)| l).collect()
    }
}

pub fn excursion_lengths(w: &LatticePath) -> Result<ExcursionSet> {
    let k = w.first_passage_level()?;
    let mut start = 0;
    let intervals = w
        .first_passages(k)
        .into_iter()
        .map(|tau| {
            let iv = (start, tau - start - 1);
            start = tau;
            iv
        })
        .collect();
    Ok(ExcursionSet { intervals })
}

fn check_bridge_params(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n (n={n}, k={k})")));
    }
    if !(n - k).is_multiple_of(2) {
        return Err(Error::Parity(format!("n={n} and k={k} differ in parity")));
    }
    Ok(())
}

/// Uniform path with `(n-k)/2` up steps and `(n+k)/2` down steps.
pub fn sample_uniform_bridge<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<LatticePath> {
    check_bridge_params(n, k)?;
    let ups = (n - k) / 2;
    let mut steps = vec![-1i8; n];
    for s in steps.iter_mut().take(ups) {
        *s = 1;
    }
    steps.shuffle(rng);
    Ok(LatticePath { steps })
}

/// Rotations `r` of a bridge ending at `-k` that turn it into a
/// first-passage path; there are exactly `k` of them.
pub fn first_passage_rotations(b: &LatticePath) -> Vec<usize> {
    let n = b.len();
    let k = -b.end();
    let h = b.heights();
    // suffix_min[i] = min of h[i..n] (h[n] excluded).
    let mut suffix_min = vec![i64::MAX; n + 1];
    for i in (0..n).rev() {
        suffix_min[i] = suffix_min[i + 1].min(h[i]);
    }
    let mut out = Vec::new();
    let mut prefix_min = i64::MAX;
    for r in 0..n {
        let before_ok = prefix_min > h[r];
        let after = if r == 0 { suffix_min[1] } else { suffix_min[r + 1].min(h[n]) };
        if before_ok && after > h[r] - k {
            out.push(r);
        }
        prefix_min = prefix_min.min(h[r]);
    }
    out
}

/// Uniform path of length `n` first reaching `-k` at its end.
pub fn sample_first_passage_path<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<LatticePath> {
    let b = sample_uniform_bridge(n, k, rng)?;
    let good = first_passage_rotations(&b);
    let r = good[rng.random_range(0..good.len())];
    rot_discrete(&b, r)
}

/// Uniform marked forest with `k` trees and `n` nodes.
pub fn sample_marked_forest<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<BinaryForest> {
    bridge_to_marked_forest(&sample_uniform_bridge(n, k, rng)?)
}

/// Block sizes of the remaining holes when `n = nb + nt` and `n_l = nt - nb`
/// holes remain, via tree sizes of a uniform marked forest: block `j` has
/// `|t_j| - 1` sites.
pub fn sample_block_sizes_via_forest<R: Rng + ?Sized>(n: usize, n_l: usize, rng: &mut R) -> Result<BlockSizes> {
    let b = sample_uniform_bridge(n, n_l, rng)?;
    let m = first_argmin(&b);
    let h = b.heights();
    // Heights of rot(b, m), read directly off the bridge.
    let mut deltas = Vec::with_capacity(n_l);
    let mut last = 0;
    for t in 1..=n {
        let v = if m + t <= n { h[m + t] - h[m] } else { h[n] - h[m] + h[m + t - n] };
        if v == -(deltas.len() as i64) - 1 {
            deltas.push(t - last - 1);
            last = t;
        }
    }
    Ok(BlockSizes { deltas })
}

/// All complete binary trees with `size` nodes.
pub fn enumerate_trees(size: usize) -> Vec<BinaryTree> {
    let mut by_size: Vec<Vec<BinaryTree>> = vec![Vec::new(); size + 1];
    for s in (1..=size).step_by(2) {
        if s == 1 {
            by_size[1].push(BinaryTree::leaf());
            continue;
        }
        let mut trees = Vec::new();
        for ls in (1..s - 1).step_by(2) {
            let rs = s - 1 - ls;
            for l in &by_size[ls] {
                for r in &by_size[rs] {
                    trees.push(BinaryTree::join(l, r));
                }
            }
        }
        by_size[s] = trees;
    }
    std::mem::take(&mut by_size[size])
}

/// All forests of `k` complete binary trees with `n` nodes in total.
pub fn enumerate_forests(n: usize, k: usize) -> Result<Vec<BinaryForest>> {
    check_bridge_params(n, k)?;
    let trees: Vec<Vec<BinaryTree>> = (0..=n).map(|s| if s % 2 == 1 { enumerate_trees(s) } else { Vec::new() }).collect();
    let mut out = Vec::new();
    fn rec(left: usize, k: usize, trees: &[Vec<BinaryTree>], cur: &mut Vec<BinaryTree>, out: &mut Vec<BinaryForest>) {
        if cur.len() == k {
            if left == 0 {
                out.push(BinaryForest { trees: cur.clone(), mark: None });
            }
            return;
        }
        for s in (1..=left).step_by(2) {
            for t in &trees[s] {
                cur.push(t.clone());
                rec(left - s, k, trees, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &trees, &mut Vec::new(), &mut out);
    Ok(out)
}

/// All forests of [`enumerate_forests`] with each possible mark.
pub fn enumerate_marked_forests(n: usize, k: usize) -> Result<Vec<BinaryForest>> {
    Ok(enumerate_forests(n, k)?
        .into_iter()
        .flat_map(|f| {
            (0..f.trees[0].size()).map(move |m| BinaryForest { trees: f.trees.clone(), mark: Some(m) })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Seed;

    fn path(s: &str) -> LatticePath {
        s.parse().unwrap()
    }

    #[test]
    fn small_encodings() {
        let leaf = BinaryForest::new(vec![BinaryTree::leaf()], None).unwrap();
        assert_eq!(forest_to_path(&leaf).to_string(), "D");
        let cherry = BinaryTree::join(&BinaryTree::leaf(), &BinaryTree::leaf());
        let f = BinaryForest::new(vec![cherry.clone()], None).unwrap();
        assert_eq!(forest_to_path(&f).to_string(), "UDD");
        assert_eq!(path_to_forest(&path("UDD")).unwrap(), f);
        assert!(matches!(path_to_forest(&path("DUD")), Err(Error::MalformedPath(_))));
        assert!(matches!(path_to_forest(&path("UD")), Err(Error::MalformedPath(_))));
        let marked = BinaryForest::new(vec![BinaryTree::leaf()], Some(0)).unwrap();
        assert_eq!(marked_forest_to_bridge(&marked).unwrap().to_string(), "D");
        assert!(BinaryForest::new(vec![cherry], Some(3)).is_err());
    }

    #[test]
    fn rotations() {
        let w = path("UDD");
        assert_eq!(rot_discrete(&w, 0).unwrap(), w);
        assert_eq!(rot_discrete(&w, 1).unwrap().to_string(), "DDU");
        assert_eq!(rot_discrete(&w, 3).unwrap(), w);
        assert_eq!(rot_discrete(&rot_discrete(&w, 2).unwrap(), 1).unwrap(), w);
        assert!(rot_discrete(&w, 4).is_err());
    }

    #[test]
    fn excursions() {
        assert_eq!(excursion_lengths(&path("D")).unwrap().intervals, vec![(0, 0)]);
        assert_eq!(excursion_lengths(&path("UDD")).unwrap().lengths(), vec![2]);
        assert_eq!(excursion_lengths(&path("DUDDD")).unwrap().intervals, vec![(0, 0), (1, 2), (4, 0)]);
    }

    #[test]
    fn cycle_lemma_counts() {
        let mut rng = Seed(8).rng();
        for _ in 0..200 {
            let b = sample_uniform_bridge(21, 5, &mut rng).unwrap();
            let good = first_passage_rotations(&b);
            assert_eq!(good.len(), 5);
            for r in good {
                assert!(rot_discrete(&b, r).unwrap().first_passage_level().is_ok());
            }
        }
    }

    #[test]
    fn block_sampler_matches_forest_route() {
        let mut a = Seed(3).rng();
        let mut b = Seed(3).rng();
        for _ in 0..200 {
            let direct = sample_block_sizes_via_forest(30, 6, &mut a).unwrap();
            let f = sample_marked_forest(30, 6, &mut b).unwrap();
            let via: Vec<usize> = f.tree_sizes().iter().map(|s| s - 1).collect();
            assert_eq!(direct.deltas, via);
            assert_eq!(direct.total(), 24);
        }
    }

    #[test]
    fn parameter_errors() {
        let mut rng = Seed(1).rng();
        assert!(matches!(sample_uniform_bridge(4, 1, &mut rng), Err(Error::Parity(_))));
        assert!(sample_block_sizes_via_forest(4, 0, &mut rng).is_err());
        let d = sample_block_sizes_via_forest(2, 2, &mut rng).unwrap();
        assert_eq!(d.deltas, vec![0, 0]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(7).len(), 5);
        assert_eq!(enumerate_forests(5, 3).unwrap().len(), 3);
        assert_eq!(enumerate_marked_forests(5, 3).unwrap().len(), 5);
    }
}
