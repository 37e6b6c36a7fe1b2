use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::BasePoint;
use crate::error::{domain, Error, Result};
use crate::scalar::TorusValue;
use crate::skew::{FibreKind, FibrePoint, SkewPoint, SkewSystem};

/// Row-stochastic cell-to-cell transition matrix on an `nx x ny` grid of
/// the torus. Cell `(ix, iy)` has index `ix * ny + iy`; rows are sparse and
/// sorted by column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlamMatrix {
    pub nx: usize,
    pub ny: usize,
    pub samples_per_cell: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl UlamMatrix {
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_of(&self, x: f64, y: f64) -> usize {
        let ix = ((x * self.nx as f64) as usize).min(self.nx - 1);
        let iy = ((y * self.ny as f64) as usize).min(self.ny - 1);
        ix * self.ny + iy
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, w)| w).sum())
            .collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.pushforward(&vec![1.0; self.cells()])
    }

    /// `P v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(c, w)| w * v[c]).sum())
            .collect()
    }

    /// `mu P`
    pub fn pushforward(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cells()];
        for (r, &m) in self.rows.iter().zip(mu) {
            for &(c, w) in r {
                out[c] += m * w;
            }
        }
        out
    }
}

/// Offsets of the plastic-number Kronecker lattice, a low-discrepancy set
/// that shears well. A square sub-grid aliases under `y -> y + x`.
fn lattice(count: usize) -> Vec<(f64, f64)> {
    const PLASTIC: f64 = 1.324_717_957_244_746;
    let (a1, a2) = (1.0 / PLASTIC, 1.0 / (PLASTIC * PLASTIC));
    (1..=count)
        .map(|k| ((0.5 + a1 * k as f64).fract(), (0.5 + a2 * k as f64).fract()))
        .collect()
}

/// Builds the Ulam matrix of one skew step. Every cell is sampled at the
/// same `samples_per_cell` lattice offsets.
pub fn ulam_discretize(
    sys: &SkewSystem,
    nx: usize,
    ny: usize,
    samples_per_cell: usize,
) -> Result<UlamMatrix> {
    if !sys.base.is_rotation() || sys.fibre != FibreKind::Torus {
        return Err(domain(
            "Ulam grids need a circle rotation base and the circle fibre",
        ));
    }
    if nx < 2 || ny < 2 || samples_per_cell == 0 {
        return Err(Error::Precondition(format!(
            "grid {nx}x{ny} with {samples_per_cell} samples per cell is too small"
        )));
    }
    let offsets = lattice(samples_per_cell);
    let total = samples_per_cell as f64;
    let mut matrix = UlamMatrix {
        nx,
        ny,
        samples_per_cell,
        rows: Vec::new(),
    };
    let rows: Vec<Vec<(usize, f64)>> = (0..nx * ny)
        .into_par_iter()
        .map(|cell| {
            let (ix, iy) = (cell / ny, cell % ny);
            let mut landed = Vec::with_capacity(offsets.len());
            for &(u, v) in &offsets {
                let x = (ix as f64 + u) / nx as f64;
                let y = (iy as f64 + v) / ny as f64;
                let p = SkewPoint::new(
                    BasePoint::Circle(TorusValue::new(x)),
                    FibrePoint::Torus(TorusValue::new(y)),
                );
                let q = sys.step(&p)?;
                let x1 = q.base.circle().map(TorusValue::to_f64).unwrap_or(0.0);
                let y1 = q.fibre.torus().map(TorusValue::to_f64).unwrap_or(0.0);
                landed.push(matrix.cell_of(x1, y1));
            }
            landed.sort_unstable();
            let mut row: Vec<(usize, f64)> = Vec::new();
            for c in landed {
                match row.last_mut() {
                    Some((last, w)) if *last == c => *w += 1.0,
                    _ => row.push((c, 1.0)),
                }
            }
            for entry in &mut row {
                entry.1 /= total;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    matrix.rows = rows;
    Ok(matrix)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlamSupport {
    /// Cells of the detected invariant set, ascending; empty when none.
    pub cells: Vec<usize>,
    /// `max |P v - v|` for the indicator `v` of `cells`.
    pub residual: f64,
    pub closed_classes: usize,
    /// Every cell is its own closed class, so any cell qualifies.
    pub degenerate: bool,
    pub note: String,
}

/// Looks for a proper invariant union of cells: the indicator `v` of the
/// returned set satisfies `P v = v` up to `tol`, and `v - |v|/n` is a fixed
/// vector orthogonal to the uniform one.
///
/// Closed communicating classes of the transition graph are taken in order
/// of their smallest cell index while their union covers at most half the
/// grid.
pub fn invariant_vector_support(matrix: &UlamMatrix, tol: f64) -> UlamSupport {
    let n = matrix.cells();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for (r, row) in matrix.rows.iter().enumerate() {
        for &(c, w) in row {
            if w > 0.0 {
                graph.add_edge(nodes[r], nodes[c], ());
            }
        }
    }
    let mut class_of = vec![0usize; n];
    let sccs = tarjan_scc(&graph);
    for (k, comp) in sccs.iter().enumerate() {
        for node in comp {
            class_of[node.index()] = k;
        }
    }
    let mut closed: Vec<Vec<usize>> = sccs
        .iter()
        .enumerate()
        .filter(|(k, comp)| {
            comp.iter().all(|node| {
                matrix.rows[node.index()]
                    .iter()
                    .all(|&(c, w)| w <= 0.0 || class_of[c] == *k)
            })
        })
        .map(|(_, comp)| {
            let mut cells: Vec<usize> = comp.iter().map(|node| node.index()).collect();
            cells.sort_unstable();
            cells
        })
        .collect();
    closed.sort_by_key(|cells| cells[0]);
    let closed_classes = closed.len();

    let empty = |note: &str| UlamSupport {
        cells: Vec::new(),
        residual: 0.0,
        closed_classes,
        degenerate: false,
        note: note.into(),
    };
    if closed_classes <= 1 {
        return empty("no grid-scale invariant set found");
    }
    let degenerate = closed.iter().all(|c| c.len() == 1);
    let mut cells = Vec::new();
    if degenerate {
        cells.push(closed[0][0]);
    } else {
        for class in &closed {
            if cells.len() + class.len() > n / 2 {
                break;
            }
            cells.extend_from_slice(class);
        }
        cells.sort_unstable();
    }
    if cells.is_empty() {
        return empty("no grid-scale invariant set of at most half the grid found");
    }
    let mut v = vec![0.0; n];
    for &c in &cells {
        v[c] = 1.0;
    }
    let residual = matrix
        .apply(&v)
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > tol {
        return UlamSupport {
            residual,
            ..empty("candidate union of closed classes is not a fixed vector")
        };
    }
    UlamSupport {
        cells,
        residual,
        closed_classes,
        degenerate,
        note: if degenerate {
            "degenerate: every cell is invariant, any single cell qualifies".into()
        } else {
            "grid-aligned invariant set".into()
        },
    }
}
