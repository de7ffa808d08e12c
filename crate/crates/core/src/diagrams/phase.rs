//! Phase forms: the total phase `sum_v sigma_v l_v omega_v` rewritten as
//! `sum_ij alpha_ij (l_i - l_j) z_i.z_j`.
//!
//! Every `omega_v = -2 x_v.y_v` factors through the vertex momenta
//! `x_v = s1 - s`, `y_v = s2 - s`. One factor per vertex is taken as the free
//! variable `z_v`; the choice is accepted when the `z` are independent and every
//! remaining factor is a combination of the other `z` with no `s` term. Then the
//! coefficient of `l_v` is `-2 sigma_v z_v.sum_j beta_vj z_j`, which matches the
//! template exactly when `alpha_vj = -sigma_v beta_vj` is skew.

use std::fmt;

use num_traits::Zero;

use crate::diagrams::diagram::{Constraints, FeynmanDiagram, Vertex};
use crate::diagrams::linalg::{inverse, rank, Q};
use crate::error::{Error, Result};

/// How `F2` membership is read for skew matrices.
pub const F2_READING: &str = "alpha has support confined to one index i0: alpha_ij = 0 whenever i != i0 and j != i0 \
(row and column i0 are the only nonzero row and column, up to the mirrored pair forced by skew symmetry); rank 2";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `z_v = x_v = s1 - s`
    X,
    /// `z_v = y_v = s2 - s`
    Y,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseForm {
    pub k: usize,
    pub choice: Vec<Factor>,
    /// Per node, coefficients over `(z_1, ..., z_k, s)`.
    pub basis: Vec<Vec<Q>>,
    pub alpha: Vec<Vec<Q>>,
    pub rank: usize,
}

impl PhaseForm {
    /// `sum_ij alpha_ij (l_i - l_j) z_i z_j` for scalar `z`.
    pub fn evaluate(&self, l: &[Q], z: &[Q]) -> Q {
        let mut acc = Q::zero();
        for i in 0..self.k {
            for j in 0..self.k {
                acc += self.alpha[i][j] * (l[i] - l[j]) * z[i] * z[j];
            }
        }
        acc
    }

    pub fn is_skew(&self) -> bool {
        (0..self.k).all(|i| (0..self.k).all(|j| (self.alpha[i][j] + self.alpha[j][i]).is_zero()))
    }

    pub fn has_zero_row(&self) -> bool {
        self.alpha.iter().any(|r| r.iter().all(Zero::is_zero))
    }

    pub fn is_f2(&self) -> bool {
        is_f2_matrix(&self.alpha)
    }
}

impl fmt::Display for PhaseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .alpha
            .iter()
            .map(|r| {
                r.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

fn is_f2_matrix(alpha: &[Vec<Q>]) -> bool {
    let k = alpha.len();
    let nonzero = alpha.iter().flatten().any(|a| !a.is_zero());
    nonzero
        && (0..k)
            .any(|i0| (0..k).all(|i| (0..k).all(|j| i == i0 || j == i0 || alpha[i][j].is_zero())))
}

/// Rewrites `(w, s)` forms over `(z, s)` given `z = F w + S s`.
struct ZBasis {
    f_inv: Vec<Vec<Q>>,
    s_part: Vec<Q>,
}

impl ZBasis {
    fn new(z: &[Vec<Q>]) -> Option<Self> {
        let k = z.len();
        let f: Vec<Vec<Q>> = z.iter().map(|r| r[..k].to_vec()).collect();
        Some(Self {
            f_inv: inverse(&f)?,
            s_part: z.iter().map(|r| r[k]).collect(),
        })
    }

    /// `a.w + c s = (a F^-1) z + (c - a F^-1 S) s`.
    fn rewrite(&self, form: &[Q]) -> Vec<Q> {
        let k = self.f_inv.len();
        let mut out: Vec<Q> = (0..k)
            .map(|j| (0..k).map(|i| form[i] * self.f_inv[i][j]).sum())
            .collect();
        let s: Q = (0..k).map(|j| out[j] * self.s_part[j]).sum();
        out.push(form[k] - s);
        out
    }
}

fn describe(v: usize, g: &[Q]) -> String {
    let k = g.len() - 1;
    let terms: Vec<String> = g[..k]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| format!("{c}*z{}", j + 1))
        .chain((!g[k].is_zero()).then(|| format!("{}*s", g[k])))
        .collect();
    format!(
        "vertex {}: cofactor = {}",
        v + 1,
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    )
}

/// Phase form of a diagram with the given constraint solution.
///
/// Factor choices are tried in a fixed order (vertex 1 is the most
/// significant, `X` before `Y`).
pub fn phase_form_with(diagram: &FeynmanDiagram, constraints: &Constraints) -> Result<PhaseForm> {
    if let Some(reason) = &constraints.degenerate {
        return Err(Error::DegenerateDiagram(reason.clone()));
    }
    let k = diagram.k;
    let factors: Vec<(Vec<Q>, Vec<Q>)> = diagram
        .vertices
        .iter()
        .map(|v| constraints.factors(v))
        .collect();
    let mut last_residue = String::from("no factor choice gives independent variables");
    for mask in 0..(1usize << k) {
        let choice: Vec<Factor> = (0..k)
            .map(|v| {
                if mask >> (k - 1 - v) & 1 == 1 {
                    Factor::Y
                } else {
                    Factor::X
                }
            })
            .collect();
        let (z, other): (Vec<Vec<Q>>, Vec<Vec<Q>>) = factors
            .iter()
            .zip(&choice)
            .map(|((x, y), c)| match c {
                Factor::X => (x.clone(), y.clone()),
                Factor::Y => (y.clone(), x.clone()),
            })
            .unzip();
        let Some(zb) = ZBasis::new(&z) else { continue };
        let cof: Vec<Vec<Q>> = other.iter().map(|g| zb.rewrite(g)).collect();
        if let Some(v) = (0..k).find(|&v| !cof[v][k].is_zero() || !cof[v][v].is_zero()) {
            last_residue = describe(v, &cof[v]);
            continue;
        }
        let alpha: Vec<Vec<Q>> = diagram
            .vertices
            .iter()
            .zip(&cof)
            .map(|(v, g)| {
                g[..k]
                    .iter()
                    .map(|b| -Q::from_integer(v.sign.into()) * b)
                    .collect()
            })
            .collect();
        let form = PhaseForm {
            k,
            choice,
            basis: constraints.coeffs.iter().map(|c| zb.rewrite(c)).collect(),
            rank: rank(&alpha),
            alpha,
        };
        if !form.is_skew() {
            return Err(Error::PhaseResidue(format!(
                "coefficient matrix {form} is not skew"
            )));
        }
        return Ok(form);
    }
    Err(Error::PhaseResidue(last_residue))
}

/// Phase form in the basis found during enumeration.
pub fn phase_form(diagram: &FeynmanDiagram) -> Result<PhaseForm> {
    phase_form_with(diagram, &diagram.constraints)
}

/// `sum_v sigma_v l_v omega_v` evaluated directly from scalar node momenta,
/// with `omega = |s1|^2 + |s2|^2 - |s3|^2 - |s|^2`.
pub fn vertex_phase_sum(vertices: &[Vertex], momenta: &[Q], l: &[Q]) -> Q {
    vertices
        .iter()
        .zip(l)
        .map(|(v, &lv)| {
            let [a, b, c] = v.children;
            let sq = |i: usize| momenta[i] * momenta[i];
            let omega = sq(a) + sq(b) - sq(c) - sq(v.node);
            Q::from_integer(v.sign.into()) * lv * omega
        })
        .sum()
}

/// Indices of the diagrams in `F2` (see [`F2_READING`]).
pub fn classify_f2(diagrams: &[FeynmanDiagram], forms: &[PhaseForm]) -> Vec<usize> {
    diagrams
        .iter()
        .zip(forms)
        .enumerate()
        .filter(|(_, (_, f))| f.is_f2())
        .map(|(i, _)| i)
        .collect()
}

/// Summary of all diagrams of one order.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CensusRow {
    pub k: usize,
    /// `|Gamma(k)|`
    pub n_trees: usize,
    pub n_diagrams: usize,
    pub n_vanishing: usize,
    pub n_degenerate: usize,
    /// Non-vanishing diagrams whose phase does not fit the template.
    pub n_residue: usize,
    /// Non-vanishing diagrams with a phase form.
    pub n_phase_forms: usize,
    pub n_f2: usize,
    pub n_skew: usize,
    pub n_zero_row: usize,
    /// Over phase forms; zero when there are none.
    pub min_rank: usize,
    pub max_rank: usize,
}

/// Enumerates the diagrams of order `k` and tabulates their phase forms.
pub fn census(k: usize) -> Result<(CensusRow, Vec<(FeynmanDiagram, Result<PhaseForm>)>)> {
    let diagrams = crate::diagrams::diagram::enumerate_diagrams(k)?;
    let n_trees = crate::diagrams::tree::enumerate_trees(k)?.len();
    let mut row = CensusRow {
        k,
        n_trees,
        n_diagrams: diagrams.len(),
        n_vanishing: 0,
        n_degenerate: 0,
        n_residue: 0,
        n_phase_forms: 0,
        n_f2: 0,
        n_skew: 0,
        n_zero_row: 0,
        min_rank: usize::MAX,
        max_rank: 0,
    };
    let mut out = Vec::with_capacity(diagrams.len());
    for d in diagrams {
        let form = phase_form(&d);
        if d.is_degenerate() {
            row.n_degenerate += 1;
        } else if d.vanishing {
            row.n_vanishing += 1;
        } else {
            match &form {
                Ok(f) => {
                    row.n_phase_forms += 1;
                    row.n_f2 += usize::from(f.is_f2());
                    row.n_skew += usize::from(f.is_skew());
                    row.n_zero_row += usize::from(f.has_zero_row());
                    row.min_rank = row.min_rank.min(f.rank);
                    row.max_rank = row.max_rank.max(f.rank);
                }
                Err(_) => row.n_residue += 1,
            }
        }
        out.push((d, form));
    }
    if row.min_rank == usize::MAX {
        row.min_rank = 0;
    }
    Ok((row, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::diagram::{enumerate_diagrams, momenta};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(v: i64) -> Q {
        Q::from_integer(v)
    }

    fn live(k: usize) -> Vec<(FeynmanDiagram, PhaseForm)> {
        enumerate_diagrams(k)
            .unwrap()
            .into_iter()
            .filter(|d| !d.vanishing)
            .map(|d| {
                let f = phase_form(&d).unwrap();
                (d, f)
            })
            .collect()
    }

    #[test]
    fn second_moment_of_first_order_term() {
        // T1 = T2 = one vertex, leaves paired straight across
        let ds = enumerate_diagrams(2).unwrap();
        let d = ds
            .iter()
            .find(|d| d.left.order() == 1 && d.pairing == vec![(1, 5), (2, 6), (7, 3)])
            .unwrap();
        let f = phase_form(d).unwrap();
        assert_eq!(f.alpha, vec![vec![q(0), q(-1)], vec![q(1), q(0)]]);
        assert_eq!(f.choice, vec![Factor::X, Factor::Y]);
        // z1 = s1 - s, z2 = s2 - s
        assert_eq!(f.basis[1], vec![q(1), q(0), q(1)]);
        assert_eq!(f.basis[2], vec![q(0), q(1), q(1)]);
        // the phase is (l1 - l2) omega with omega = -2 z1 z2
        let (l, z) = ([q(3), q(-2)], [q(5), q(7)]);
        assert_eq!(f.evaluate(&l, &z), (l[0] - l[1]) * q(-2) * z[0] * z[1]);
        assert!(f.is_f2());
    }

    #[test]
    fn every_live_form_fits_the_template() {
        for k in 2..=3 {
            for (_, f) in live(k) {
                assert!(f.is_skew());
                assert!(!f.has_zero_row());
                assert!(f.rank >= 2 && f.rank % 2 == 0);
            }
        }
    }

    #[test]
    fn round_trip_reproduces_vertex_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 2..=3 {
            for (d, f) in live(k) {
                for _ in 0..4 {
                    let z: Vec<Q> = (0..k).map(|_| q(rng.gen_range(-9..=9))).collect();
                    let s = q(rng.gen_range(-9..=9));
                    let l: Vec<Q> = (0..k).map(|_| q(rng.gen_range(-20..=20))).collect();
                    let p: Vec<Q> = f
                        .basis
                        .iter()
                        .map(|b| (0..k).map(|j| b[j] * z[j]).sum::<Q>() + b[k] * s)
                        .collect();
                    assert_eq!(f.evaluate(&l, &z), vertex_phase_sum(&d.vertices, &p, &l));
                }
            }
        }
    }

    fn unimodular(k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
        let mut u: Vec<Vec<i64>> = (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
        for _ in 0..6 {
            let (a, b) = (rng.gen_range(0..k), rng.gen_range(0..k));
            if a == b {
                u.swap(a, (a + 1) % k);
                continue;
            }
            let c = rng.gen_range(-2..=2);
            for j in 0..k {
                u[a][j] += c * u[b][j];
            }
        }
        u
    }

    #[test]
    fn rank_and_f2_survive_basis_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 2..=4 {
            let ds = enumerate_diagrams(k).unwrap();
            for d in ds.iter().filter(|d| !d.vanishing).step_by(7) {
                let f = phase_form(d).unwrap();
                let c = d.constraints.transformed(&unimodular(k, &mut rng));
                assert_ne!(c, d.constraints);
                let g = phase_form_with(d, &c).unwrap();
                assert_eq!(f.rank, g.rank);
                assert_eq!(f.is_f2(), g.is_f2());
                // momenta agree at corresponding points
                let w = [2, -1, 4, 3];
                let p = momenta(&d.constraints, &w[..k], 1);
                let zf: Vec<Q> = (0..k)
                    .map(|i| {
                        let (x, y) = d.constraints.factors(&d.vertices[i]);
                        let form = if f.choice[i] == Factor::X { x } else { y };
                        (0..k).map(|j| form[j] * q(w[j])).sum::<Q>() + form[k]
                    })
                    .collect();
                let pz: Vec<Q> = f
                    .basis
                    .iter()
                    .map(|b| (0..k).map(|j| b[j] * zf[j]).sum::<Q>() + b[k])
                    .collect();
                assert_eq!(p, pz);
            }
        }
    }

    #[test]
    fn census_shape() {
        let (row, _) = census(2).unwrap();
        assert_eq!((row.n_trees, row.n_diagrams), (3, 42));
        assert_eq!(row.n_phase_forms, row.n_f2);
        let (row, _) = census(3).unwrap();
        assert!(row.n_f2 > 0 && row.n_residue == 0 && row.min_rank >= 2);
        assert!(classify_f2(&[], &[]).is_empty());
    }

    #[test]
    fn degenerate_input_is_rejected() {
        let d = &enumerate_diagrams(2).unwrap()[0];
        let mut c = d.constraints.clone();
        c.degenerate = Some("test".into());
        assert!(matches!(
            phase_form_with(d, &c),
            Err(Error::DegenerateDiagram(_))
        ));
    }
}
