//! Scheme-dominance comparison over a sweep grid: per-cell winners, win
//! counts, and pairwise dominance verdicts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::sweep::{SchemeKind, SweepRow};

/// Winner of one lattice cell: the feasible scheme with the highest sum
/// rate; ties resolve by scheme name order.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub e1: f64,
    pub e2: f64,
    pub winner: Option<SchemeKind>,
    pub rates: BTreeMap<SchemeKind, Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub cells: Vec<CellOutcome>,
    pub wins: BTreeMap<SchemeKind, usize>,
    /// Pairwise strict-win counts among cells where both schemes are
    /// feasible: `(a, b, a_wins, b_wins)`.
    pub pairwise: Vec<(SchemeKind, SchemeKind, usize, usize)>,
}

/// Folds sweep rows (any scheme mix) into the per-cell comparison.
pub fn build_report(rows: &[SweepRow]) -> CompareReport {
    let mut by_cell: BTreeMap<(u64, u64), Vec<&SweepRow>> = BTreeMap::new();
    for row in rows {
        by_cell
            .entry((row.e1.to_bits(), row.e2.to_bits()))
            .or_default()
            .push(row);
    }

    let mut schemes: Vec<SchemeKind> = rows.iter().map(|r| r.scheme).collect();
    schemes.sort();
    schemes.dedup();

    let mut cells = Vec::with_capacity(by_cell.len());
    let mut wins: BTreeMap<SchemeKind, usize> = schemes.iter().map(|&s| (s, 0)).collect();
    let mut pair_wins: BTreeMap<(SchemeKind, SchemeKind), usize> = BTreeMap::new();

    for group in by_cell.values() {
        let e1 = group[0].e1;
        let e2 = group[0].e2;
        let mut rates: BTreeMap<SchemeKind, Option<f64>> = BTreeMap::new();
        for row in group {
            rates.insert(row.scheme, row.feasible.then(|| row.sum_rate.unwrap_or(0.0)));
        }
        let winner = rates
            .iter()
            .filter_map(|(&s, &r)| r.map(|v| (s, v)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)))
            .map(|(s, _)| s);
        if let Some(w) = winner {
            *wins.entry(w).or_default() += 1;
        }
        for (i, &a) in schemes.iter().enumerate() {
            for &b in &schemes[i + 1..] {
                if let (Some(Some(ra)), Some(Some(rb))) = (rates.get(&a), rates.get(&b)) {
                    if ra > rb {
                        *pair_wins.entry((a, b)).or_default() += 1;
                    } else if rb > ra {
                        *pair_wins.entry((b, a)).or_default() += 1;
                    }
                }
            }
        }
        cells.push(CellOutcome { e1, e2, winner, rates });
    }

    let mut pairwise = Vec::new();
    for (i, &a) in schemes.iter().enumerate() {
        for &b in &schemes[i + 1..] {
            let ab = pair_wins.get(&(a, b)).copied().unwrap_or(0);
            let ba = pair_wins.get(&(b, a)).copied().unwrap_or(0);
            pairwise.push((a, b, ab, ba));
        }
    }
    CompareReport { cells, wins, pairwise }
}

impl CompareReport {
    /// True when each scheme of the pair strictly wins somewhere.
    pub fn mutual_non_dominance(&self, a: SchemeKind, b: SchemeKind) -> Option<bool> {
        self.pairwise
            .iter()
            .find(|&&(x, y, _, _)| (x == a && y == b) || (x == b && y == a))
            .map(|&(_, _, x, y)| x > 0 && y > 0)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cell winners (e1, e2 -> winner):");
        for cell in &self.cells {
            let name = cell.winner.map(|w| w.name()).unwrap_or("none feasible");
            let rates: Vec<String> = cell
                .rates
                .iter()
                .map(|(s, r)| match r {
                    Some(v) => format!("{}={v:.4}", s.name()),
                    None => format!("{}=infeasible", s.name()),
                })
                .collect();
            let _ = writeln!(
                out,
                "  ({:.6}, {:.6}) -> {:<14} [{}]",
                cell.e1,
                cell.e2,
                name,
                rates.join(", ")
            );
        }
        let _ = writeln!(out, "win counts:");
        for (scheme, count) in &self.wins {
            let _ = writeln!(out, "  {:<7} {count}", scheme.name());
        }
        for &(a, b, ab, ba) in &self.pairwise {
            let verdict = if ab > 0 && ba > 0 {
                format!(
                    "{} and {} do not dominate each other ({} wins {ab}, {} wins {ba})",
                    a.name(),
                    b.name(),
                    a.name(),
                    b.name()
                )
            } else if ab > 0 {
                format!("{} dominates {} on this grid ({ab} strict wins)", a.name(), b.name())
            } else if ba > 0 {
                format!("{} dominates {} on this grid ({ba} strict wins)", b.name(), a.name())
            } else {
                format!("{} and {} tie everywhere on this grid", a.name(), b.name())
            };
            let _ = writeln!(out, "verdict: {verdict}");
        }
        out
    }
}
