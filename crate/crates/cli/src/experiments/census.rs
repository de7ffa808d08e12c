//! Interaction trees, Feynman diagrams and their phase forms.

use oracle::{dp_diagrams, dp_trees};
use wavekin_core::diagrams::{
    census, enumerate_trees, vertex_phase_sum, PhaseForm, F2_READING, MAX_DIAGRAM_ORDER, Q,
};

use crate::config::Materialized;
use crate::error::{invalid, Result};
use crate::output::{Cell, Check, Outcome, Table};

/// Counting oracles written without reference to the enumerators.
mod oracle {
    /// `|Gamma(n)|` from `t(n) = sum_{a+b+c=n-1} t(a) t(b) t(c)`.
    pub fn dp_trees(n: usize) -> Vec<u64> {
        let mut t = vec![1u64];
        for m in 1..=n {
            let mut sum = 0;
            for a in 0..m {
                for b in 0..m - a {
                    sum += t[a] * t[b] * t[m - 1 - a - b];
                }
            }
            t.push(sum);
        }
        t
    }

    /// Tree pairs of total order `k` times the `(k + 1)!` leaf matchings.
    pub fn dp_diagrams(k: usize) -> u64 {
        let t = dp_trees(k);
        let pairs: u64 = (0..=k).map(|a| t[a] * t[k - a]).sum();
        pairs * (1..=k as u64 + 1).product::<u64>()
    }
}

/// Expected `|Gamma(n)|` for `n = 0..3`.
pub const TREE_COUNTS: [u64; 4] = [1, 1, 3, 12];

fn q(v: i64) -> Q {
    Q::from_integer(v)
}

/// The form equals `c (l1 - l2) omega` with `omega = -2 z1 z2` and `c = +-1`,
/// and agrees with the vertex phases at the momenta it parametrizes.
fn is_first_order_form(form: &PhaseForm, vertices: &[wavekin_core::diagrams::Vertex]) -> bool {
    if form.k != 2 || form.rank != 2 {
        return false;
    }
    let probes = [
        ([3, -2], [5, 7], 2),
        ([1, 4], [-3, 2], -1),
        ([-6, 0], [2, 9], 5),
    ];
    let mut sign = None;
    for (l, z, s) in probes {
        let (l, z) = ([q(l[0]), q(l[1])], [q(z[0]), q(z[1])]);
        let got = form.evaluate(&l, &z);
        let omega = q(-2) * z[0] * z[1];
        let base = (l[0] - l[1]) * omega;
        let c = if got == base {
            1
        } else if got == -base {
            -1
        } else {
            return false;
        };
        if *sign.get_or_insert(c) != c {
            return false;
        }
        let p: Vec<Q> = form
            .basis
            .iter()
            .map(|b| b[0] * z[0] + b[1] * z[1] + b[2] * q(s))
            .collect();
        if vertex_phase_sum(vertices, &p, &l) != got {
            return false;
        }
    }
    true
}

pub fn run(cfg: &Materialized) -> Result<Outcome> {
    let orders = cfg.sweep().orders.clone().unwrap_or_default();
    if let Some(&k) = orders.iter().find(|&&k| k > MAX_DIAGRAM_ORDER) {
        return Err(invalid(format!(
            "diagram order {k} exceeds the supported maximum {MAX_DIAGRAM_ORDER}"
        )));
    }
    let mut table = Table::new(
        "census",
        &[
            "k",
            "n_trees",
            "n_diagrams",
            "n_vanishing",
            "n_degenerate",
            "n_residue",
            "n_phase_forms",
            "n_f2",
            "n_skew",
            "n_zero_row",
            "min_rank",
            "max_rank",
        ],
    );
    let mut forms = Table::new(
        "phase_forms",
        &[
            "k", "diagram", "left", "right", "pairing", "alpha", "rank", "f2",
        ],
    );
    let mut out = Outcome::default();
    let max_k = orders.iter().copied().max().unwrap_or(0);
    let trees = dp_trees(max_k);
    for &k in &orders {
        if k == 0 {
            // a bare pair of leaves: no vertices, no phase
            let n = enumerate_trees(0)?.len();
            out.checks.push(Check::new(
                "trees_k0",
                n as u64 == trees[0] && n as u64 == TREE_COUNTS[0],
                format!(
                    "|Gamma(0)| = {n} (recursion oracle {}, expected {})",
                    trees[0], TREE_COUNTS[0]
                ),
            ));
            let mut row = vec![Cell::from(0usize), n.into()];
            row.extend((2..table.header.len()).map(|_| Cell::from("")));
            table.push(row);
            continue;
        }
        let (row, diagrams) = census(k)?;
        table.push(vec![
            k.into(),
            row.n_trees.into(),
            row.n_diagrams.into(),
            row.n_vanishing.into(),
            row.n_degenerate.into(),
            row.n_residue.into(),
            row.n_phase_forms.into(),
            row.n_f2.into(),
            row.n_skew.into(),
            row.n_zero_row.into(),
            row.min_rank.into(),
            row.max_rank.into(),
        ]);
        let n = row.n_trees as u64;
        out.checks.push(Check::new(
            &format!("trees_k{k}"),
            n == trees[k] && TREE_COUNTS.get(k).is_none_or(|&e| n == e),
            format!(
                "|Gamma({k})| = {} (recursion oracle {}{})",
                row.n_trees,
                trees[k],
                TREE_COUNTS
                    .get(k)
                    .map_or(String::new(), |e| format!(", expected {e}"))
            ),
        ));
        out.checks.push(Check::new(
            &format!("diagrams_k{k}"),
            row.n_diagrams as u64 == dp_diagrams(k),
            format!("{} diagrams (oracle {})", row.n_diagrams, dp_diagrams(k)),
        ));
        if (1..=3).contains(&k) {
            let ok = row.n_residue == 0
                && row.n_skew == row.n_phase_forms
                && row.n_zero_row == 0
                && (row.n_phase_forms == 0 || row.min_rank >= 2);
            out.checks.push(Check::new(
                &format!("phase_forms_k{k}"),
                ok,
                format!(
                    "{} live diagrams: {} skew, {} with a zero row, {} with residue, rank {}..{} ({} vanishing, {} degenerate)",
                    row.n_phase_forms,
                    row.n_skew,
                    row.n_zero_row,
                    row.n_residue,
                    row.min_rank,
                    row.max_rank,
                    row.n_vanishing,
                    row.n_degenerate
                ),
            ));
        }
        if (2..=3).contains(&k) {
            out.checks.push(Check::new(
                &format!("f2_nonempty_k{k}"),
                row.n_f2 > 0,
                format!("{} of {} phase forms in F2", row.n_f2, row.n_phase_forms),
            ));
        }
        let mut first_order = (0usize, 0usize);
        for (i, (d, form)) in diagrams.iter().enumerate() {
            let Ok(form) = form else { continue };
            if d.vanishing || d.is_degenerate() {
                continue;
            }
            // second moment of the first-order term: one vertex in each tree
            if k == 2 && d.left.order() == 1 {
                first_order.0 += 1;
                first_order.1 += usize::from(is_first_order_form(form, &d.vertices));
            }
            let pairing: Vec<String> = d.pairing.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            forms.push(vec![
                k.into(),
                i.into(),
                d.left.to_string().into(),
                d.right.to_string().into(),
                pairing.join(" ").into(),
                form.to_string().into(),
                form.rank.into(),
                i64::from(form.is_f2()).into(),
            ]);
        }
        if k == 2 {
            out.checks.push(Check::new(
                "first_order_structure",
                first_order.0 > 0 && first_order.0 == first_order.1,
                format!(
                    "{} of {} live k = 2 forms with one vertex per tree equal +-(l1 - l2) omega with omega = -2 z1.z2 and match the vertex phases",
                    first_order.1, first_order.0
                ),
            ));
        }
    }
    out.notes.push(format!("F2 reading: {F2_READING}"));
    out.summarize("f2_reading", F2_READING);
    out.tables.push(table);
    out.tables.push(forms);
    Ok(out)
}
