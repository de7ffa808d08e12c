//! Feynman diagrams: a tree `T1`, a conjugated tree `T2` and a Wick matching
//! of the unbarred leaves with the barred ones.
//!
//! The momentum constraints are one equation per scalar component, identical
//! for every component, so they are solved once over the rationals. Unknowns
//! are the node momenta of both trees followed by the external `s`.

use num_traits::Zero;
use rayon::prelude::*;

use crate::diagrams::linalg::{nullspace, Q};
use crate::diagrams::tree::{enumerate_trees, FlatNode, Tree};
use crate::error::{invalid, Result};

/// Largest `k` accepted by [`enumerate_diagrams`].
pub const MAX_DIAGRAM_ORDER: usize = 4;

/// Internal vertex of a diagram, with its node and children as node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub node: usize,
    pub children: [usize; 3],
    pub sign: i8,
}

/// Solution space of the momentum constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraints {
    /// Per node, coefficients over `(w_1, ..., w_m, s)` where the `w` are free momenta.
    pub coeffs: Vec<Vec<Q>>,
    /// Number of free momenta `m` (equal to `k` unless degenerate).
    pub n_free: usize,
    /// Set when `s` is forced or the number of free momenta differs from `k`.
    pub degenerate: Option<String>,
}

impl Constraints {
    /// Same solution space with free momenta `w = U w'` for a square integer `U`.
    pub fn transformed(&self, u: &[Vec<i64>]) -> Self {
        let m = self.n_free;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut out: Vec<Q> = (0..m)
                    .map(|j| (0..m).map(|i| c[i] * Q::from_integer(u[i][j])).sum())
                    .collect();
                out.push(c[m]);
                out
            })
            .collect();
        Self {
            coeffs,
            n_free: m,
            degenerate: self.degenerate.clone(),
        }
    }

    /// `x_v = p_{c1} - p_v` and `y_v = p_{c2} - p_v` as affine forms.
    pub fn factors(&self, v: &Vertex) -> (Vec<Q>, Vec<Q>) {
        let p = &self.coeffs[v.node];
        let sub = |c: &Vec<Q>| c.iter().zip(p).map(|(a, b)| a - b).collect::<Vec<Q>>();
        (
            sub(&self.coeffs[v.children[0]]),
            sub(&self.coeffs[v.children[1]]),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeynmanDiagram {
    pub k: usize,
    pub left: Tree,
    pub right: Tree,
    /// Nodes of `T1` then of the conjugated `T2`, each in preorder.
    pub nodes: Vec<FlatNode>,
    /// Vertices in node order; vertex `i` carries time variable `l_i`.
    pub vertices: Vec<Vertex>,
    /// `(unbarred leaf, barred leaf)` node pairs.
    pub pairing: Vec<(usize, usize)>,
    pub constraints: Constraints,
    /// Some vertex has `s1 = s` or `s2 = s` forced, so the exclusion in the
    /// interaction sum kills the diagram.
    pub vanishing: bool,
}

impl FeynmanDiagram {
    pub fn left_root(&self) -> usize {
        0
    }

    pub fn right_root(&self) -> usize {
        self.nodes
            .iter()
            .skip(1)
            .position(|n| n.parent.is_none())
            .map_or(0, |p| p + 1)
    }

    pub fn is_degenerate(&self) -> bool {
        self.constraints.degenerate.is_some()
    }
}

fn solve(
    nodes: &[FlatNode],
    right_root: usize,
    pairing: &[(usize, usize)],
    k: usize,
) -> Constraints {
    let n = nodes.len();
    let cols = n + 1;
    let mut rows = Vec::new();
    let unit = |entries: &[(usize, i64)]| {
        let mut r = vec![Q::zero(); cols];
        for &(c, v) in entries {
            r[c] += Q::from_integer(v);
        }
        r
    };
    for (i, node) in nodes.iter().enumerate() {
        if let Some([a, b, c]) = node.children {
            rows.push(unit(&[(i, 1), (a, -1), (b, -1), (c, 1)]));
        }
    }
    rows.push(unit(&[(0, 1), (n, -1)]));
    rows.push(unit(&[(right_root, 1), (n, -1)]));
    for &(p, m) in pairing {
        rows.push(unit(&[(p, 1), (m, -1)]));
    }
    let (basis, pivots) = nullspace(&rows, cols);
    let s_free = !pivots.contains(&n);
    let n_free = basis.len() - usize::from(s_free);
    let degenerate = if !s_free {
        Some("external momentum forced to zero".to_string())
    } else if n_free != k {
        Some(format!("{n_free} free momenta, expected {k}"))
    } else {
        None
    };
    let coeffs = (0..n)
        .map(|i| {
            let mut c: Vec<Q> = basis[..n_free].iter().map(|b| b[i]).collect();
            c.push(if s_free { basis[n_free][i] } else { Q::zero() });
            c
        })
        .collect();
    Constraints {
        coeffs,
        n_free,
        degenerate,
    }
}

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All diagrams for one tree pair, one per matching.
pub fn pair_diagrams(left: &Tree, right: &Tree) -> Vec<FeynmanDiagram> {
    let k = left.order() + right.order();
    let mut nodes = left.flatten(1);
    let offset = nodes.len();
    let right_root = offset;
    nodes.extend(right.flatten(-1).into_iter().map(|mut n| {
        n.parent = n.parent.map(|p| p + offset);
        n.children = n.children.map(|c| c.map(|i| i + offset));
        n
    }));
    let vertices: Vec<Vertex> = nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| {
            n.children.map(|children| Vertex {
                node: i,
                children,
                sign: n.sign,
            })
        })
        .collect();
    let leaves = |sign: i8| -> Vec<usize> {
        (0..nodes.len())
            .filter(|&i| nodes[i].children.is_none() && nodes[i].sign == sign)
            .collect()
    };
    let (plus, minus) = (leaves(1), leaves(-1));
    debug_assert_eq!(plus.len(), k + 1);
    debug_assert_eq!(minus.len(), k + 1);
    permutations(k + 1)
        .into_iter()
        .map(|perm| {
            let pairing: Vec<(usize, usize)> = plus
                .iter()
                .zip(&perm)
                .map(|(&p, &j)| (p, minus[j]))
                .collect();
            let constraints = solve(&nodes, right_root, &pairing, k);
            let vanishing = vertices.iter().any(|v| {
                let (x, y) = constraints.factors(v);
                x.iter().all(Zero::is_zero) || y.iter().all(Zero::is_zero)
            });
            FeynmanDiagram {
                k,
                left: left.clone(),
                right: right.clone(),
                nodes: nodes.clone(),
                vertices: vertices.clone(),
                pairing,
                constraints,
                vanishing,
            }
        })
        .collect()
}

/// Every diagram of order `k`: tree pairs with `k1 + k2 = k` in order of `k1`,
/// then matchings in lexicographic order. Degenerate and vanishing diagrams are
/// kept and flagged.
pub fn enumerate_diagrams(k: usize) -> Result<Vec<FeynmanDiagram>> {
    if !(1..=MAX_DIAGRAM_ORDER).contains(&k) {
        return Err(invalid(
            "k",
            format!("diagram order must lie in [1, {MAX_DIAGRAM_ORDER}], got {k}"),
        ));
    }
    let mut pairs = Vec::new();
    for k1 in 0..=k {
        let right = enumerate_trees(k - k1)?;
        for t1 in enumerate_trees(k1)? {
            for t2 in &right {
                pairs.push((t1.clone(), t2.clone()));
            }
        }
    }
    let per_pair: Vec<Vec<FeynmanDiagram>> =
        pairs.par_iter().map(|(a, b)| pair_diagrams(a, b)).collect();
    Ok(per_pair.into_iter().flatten().collect())
}

/// `(k + 1)! sum_{k1 + k2 = k} |Gamma(k1)| |Gamma(k2)|`.
pub fn diagram_count(k: usize) -> Result<usize> {
    let fact: usize = (1..=k + 1).product();
    let mut pairs = 0;
    for k1 in 0..=k {
        pairs += enumerate_trees(k1)?.len() * enumerate_trees(k - k1)?.len();
    }
    Ok(pairs * fact)
}

/// Node momenta at integer free momenta `w` and external `s` (one component).
pub fn momenta(c: &Constraints, w: &[i64], s: i64) -> Vec<Q> {
    c.coeffs
        .iter()
        .map(|row| {
            let mut acc = row[c.n_free] * Q::from_integer(s);
            for (a, &x) in row.iter().zip(w) {
                acc += a * Q::from_integer(x);
            }
            acc
        })
        .collect()
}
