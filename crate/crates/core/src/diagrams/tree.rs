//! Interaction trees `Gamma(n)`.
//!
//! A tree of order `n` is a leaf (`n = 0`) or a vertex with three ordered
//! subtrees whose orders sum to `n - 1`. The third child enters the
//! interaction conjugated, so children carry signs `(sigma, sigma, -sigma)`
//! relative to a parent of sign `sigma`.

use std::fmt;

use crate::error::{invalid, Result};

/// Largest order accepted by [`enumerate_trees`].
pub const MAX_TREE_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf,
    Vertex(Box<[Tree; 3]>),
}

impl Tree {
    /// Number of internal vertices.
    pub fn order(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Vertex(c) => 1 + c.iter().map(Tree::order).sum::<usize>(),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Vertex(c) => c.iter().map(Tree::n_leaves).sum(),
        }
    }

    /// Preorder node table with signs, rooted at sign `root_sign`.
    pub fn flatten(&self, root_sign: i8) -> Vec<FlatNode> {
        let mut out = Vec::new();
        fn walk(t: &Tree, sign: i8, parent: Option<usize>, out: &mut Vec<FlatNode>) -> usize {
            let id = out.len();
            out.push(FlatNode {
                sign,
                parent,
                children: None,
            });
            if let Tree::Vertex(c) = t {
                let a = walk(&c[0], sign, Some(id), out);
                let b = walk(&c[1], sign, Some(id), out);
                let d = walk(&c[2], -sign, Some(id), out);
                out[id].children = Some([a, b, d]);
            }
            id
        }
        walk(self, root_sign, None, &mut out);
        out
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf => write!(f, "o"),
            Tree::Vertex(c) => write!(f, "[{} {} {}]", c[0], c[1], c[2]),
        }
    }
}

/// One node of a flattened tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatNode {
    /// `+1` for `a`, `-1` for `conj(a)`.
    pub sign: i8,
    pub parent: Option<usize>,
    pub children: Option<[usize; 3]>,
}

/// All trees of order `n`, children ordered by composition then by recursion order.
pub fn enumerate_trees(n: usize) -> Result<Vec<Tree>> {
    if n > MAX_TREE_ORDER {
        return Err(invalid(
            "n",
            format!("tree order must be <= {MAX_TREE_ORDER}, got {n}"),
        ));
    }
    let mut table: Vec<Vec<Tree>> = vec![vec![Tree::Leaf]];
    for order in 1..=n {
        let mut trees = Vec::new();
        for n1 in 0..order {
            for n2 in 0..order - n1 {
                let n3 = order - 1 - n1 - n2;
                for a in &table[n1] {
                    for b in &table[n2] {
                        for c in &table[n3] {
                            trees.push(Tree::Vertex(Box::new([a.clone(), b.clone(), c.clone()])));
                        }
                    }
                }
            }
        }
        table.push(trees);
    }
    Ok(table.swap_remove(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// `|Gamma(n)| = sum_{n1+n2+n3=n-1} |Gamma(n1)||Gamma(n2)||Gamma(n3)|`.
    fn count_oracle(n: usize) -> u64 {
        let mut c = vec![1u64];
        for m in 1..=n {
            let mut acc = 0;
            for a in 0..m {
                for b in 0..m - a {
                    acc += c[a] * c[b] * c[m - 1 - a - b];
                }
            }
            c.push(acc);
        }
        c[n]
    }

    #[test]
    fn counts_match_recursion() {
        assert_eq!(
            (0..=4)
                .map(|n| enumerate_trees(n).unwrap().len())
                .collect::<Vec<_>>(),
            vec![1, 1, 3, 12, 55]
        );
        for n in 0..=MAX_TREE_ORDER {
            let trees = enumerate_trees(n).unwrap();
            assert_eq!(trees.len() as u64, count_oracle(n));
            let distinct: HashSet<_> = trees.iter().collect();
            assert_eq!(distinct.len(), trees.len());
            for t in &trees {
                assert_eq!(t.order(), n);
                assert_eq!(t.n_leaves(), 2 * n + 1);
            }
        }
        assert!(enumerate_trees(MAX_TREE_ORDER + 1).is_err());
    }

    #[test]
    fn signs_follow_conjugation_rule() {
        for t in enumerate_trees(3).unwrap() {
            let flat = t.flatten(1);
            assert_eq!(flat[0].sign, 1);
            let mut plus = 0;
            for node in &flat {
                if let Some([a, b, c]) = node.children {
                    assert_eq!(flat[a].sign, node.sign);
                    assert_eq!(flat[b].sign, node.sign);
                    assert_eq!(flat[c].sign, -node.sign);
                } else if node.sign > 0 {
                    plus += 1;
                }
            }
            // n + 1 unbarred and n barred leaves
            assert_eq!(plus, 4);
        }
    }
}
