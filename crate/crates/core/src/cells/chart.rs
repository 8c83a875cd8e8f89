//! Graded pieces of the deformation complex and explicit cell charts.

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use super::{GradedRep, Representation};
use crate::error::{Error, Result};
use crate::linalg::{q, q_frac, Matrix, Q};
use crate::quiver::Quiver;
use crate::torus::candidate_characters;

/// Entry `(row, col)` of `Hom(V_{i,n}, V_{i,n-k})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UCoord {
    pub vertex: usize,
    pub level: i64,
    pub row: usize,
    pub col: usize,
}

/// Entry `(row, col)` of `Hom(V_{i,n}, V_{j,n+w_a-k})` for `a: i -> j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RCoord {
    pub arrow: usize,
    pub level: i64,
    pub row: usize,
    pub col: usize,
}

/// `ad: u_k -> R_k` in the coordinate bases.
#[derive(Debug, Clone)]
pub struct GradedPieces {
    pub k: i64,
    pub u_basis: Vec<UCoord>,
    pub r_basis: Vec<RCoord>,
    pub ad: Matrix,
}

/// `u_k` is ordered by vertex, level, row-major; `R_k` by arrow, level,
/// row-major. `ad(x) = x_j M_{a,n} - M_{a,n-k} x_i`.
pub fn graded_pieces(quiver: &Quiver, rep: &GradedRep, k: i64) -> GradedPieces {
    let mut u_basis = Vec::new();
    for v in 0..quiver.vertex_count() {
        for n in rep.levels(v) {
            let (rows, cols) = (rep.dim(v, n - k), rep.dim(v, n));
            for row in 0..rows {
                for col in 0..cols {
                    u_basis.push(UCoord { vertex: v, level: n, row, col });
                }
            }
        }
    }
    let mut r_basis = Vec::new();
    for (a, arrow) in quiver.arrows().iter().enumerate() {
        for n in rep.levels(arrow.source) {
            let (rows, cols) = (rep.dim(arrow.target, n + rep.weights.scalar(a) - k), rep.dim(arrow.source, n));
            for row in 0..rows {
                for col in 0..cols {
                    r_basis.push(RCoord { arrow: a, level: n, row, col });
                }
            }
        }
    }
    let r_index = |a: usize, n: i64, row: usize, col: usize| {
        r_basis
            .iter()
            .position(|c| c.arrow == a && c.level == n && c.row == row && c.col == col)
            .expect("coordinate of a nonzero block")
    };
    let mut ad = Matrix::zeros(r_basis.len(), u_basis.len());
    for (ci, u) in u_basis.iter().enumerate() {
        for (a, arrow) in quiver.arrows().iter().enumerate() {
            let w = rep.weights.scalar(a);
            // x_{j, n'+w_a} M_{a,n'} with n' + w_a = u.level: row u.row picks row u.col of M.
            if arrow.target == u.vertex {
                let n0 = u.level - w;
                let m = rep.block(quiver, a, n0);
                for c in 0..m.cols() {
                    let coeff = m.get(u.col, c);
                    if !coeff.is_zero() {
                        let ri = r_index(a, n0, u.row, c);
                        let v = ad.get(ri, ci) + coeff;
                        ad.set(ri, ci, v);
                    }
                }
            }
            // -M_{a,n-k} x_{i,n}: column u.col becomes -(column u.row of M).
            if arrow.source == u.vertex {
                let m = rep.block(quiver, a, u.level - k);
                for r in 0..m.rows() {
                    let coeff = m.get(r, u.row);
                    if !coeff.is_zero() {
                        let ri = r_index(a, u.level, r, u.col);
                        let v = ad.get(ri, ci) - coeff;
                        ad.set(ri, ci, v);
                    }
                }
            }
        }
    }
    GradedPieces { k, u_basis, r_basis, ad }
}

#[derive(Debug, Clone)]
pub struct DegreePiece {
    pub pieces: GradedPieces,
    /// Indices into `pieces.r_basis` of the free coordinates.
    pub complement: Vec<usize>,
}

/// The affine chart `M + (+)_{k>0} R'_k` of the attracting cell.
#[derive(Debug, Clone)]
pub struct CellChart {
    pub base: GradedRep,
    pub degrees: Vec<DegreePiece>,
    pub total_dim: usize,
}

impl CellChart {
    /// Free coordinates with their degree, degrees ascending.
    pub fn free_coordinates(&self) -> Vec<(i64, RCoord)> {
        self.degrees.iter().flat_map(|d| d.complement.iter().map(move |&i| (d.pieces.k, d.pieces.r_basis[i]))).collect()
    }

    /// The chart point with the given values of the free coordinates.
    pub fn materialize(&self, quiver: &Quiver, values: &[Q]) -> Result<Representation> {
        let coords = self.free_coordinates();
        if values.len() != coords.len() {
            return Err(Error::validation(format!(
                "chart has {} coordinates, got {} values",
                coords.len(),
                values.len()
            )));
        }
        let mut rep = self.base.to_representation(quiver);
        for ((k, c), value) in coords.iter().zip(values) {
            let arrow = &quiver.arrows()[c.arrow];
            let ro = self.base.offset(arrow.target, c.level + self.base.weights.scalar(c.arrow) - k);
            let co = self.base.offset(arrow.source, c.level);
            rep.maps[c.arrow].set(ro + c.row, co + c.col, value.clone());
        }
        Ok(rep)
    }

    /// A chart point with small random rational coordinates.
    pub fn sample<R: Rng>(&self, quiver: &Quiver, rng: &mut R) -> Result<Representation> {
        let values: Vec<Q> = (0..self.total_dim).map(|_| q_frac(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
        self.materialize(quiver, &values)
    }

    /// `F_{i,n} = (+)_{m <= n} V_{i,m}`, which every chart point preserves.
    pub fn standard_filtration(&self, quiver: &Quiver) -> super::Filtration {
        let dims = self.base.total_dims(quiver);
        let steps = (0..quiver.vertex_count())
            .map(|v| {
                self.base
                    .levels(v)
                    .into_iter()
                    .map(|n| {
                        let top = self.base.offset(v, n) + self.base.dim(v, n);
                        (n, Matrix::from_fn(dims[v], top, |r, c| if r == c { q(1) } else { Q::zero() }))
                    })
                    .collect()
            })
            .collect();
        super::Filtration { steps }
    }
}

/// Greedy coordinate complements `R'_k` of `ad(u_k)` for every `k > 0`.
pub fn choose_complements(quiver: &Quiver, rep: &GradedRep) -> Result<CellChart> {
    let mut degrees = Vec::new();
    for chi in candidate_characters(quiver, &rep.weights, &rep.beta) {
        let k = chi.0[0];
        if k <= 0 {
            continue;
        }
        let pieces = graded_pieces(quiver, rep, k);
        if pieces.r_basis.is_empty() {
            continue;
        }
        if pieces.ad.rank() != pieces.u_basis.len() {
            return Err(Error::inconsistency(format!(
                "ad is not injective in degree {k}; the base point is not stable"
            )));
        }
        let complement = pieces.ad.column_complement();
        if !complement.is_empty() {
            degrees.push(DegreePiece { pieces, complement });
        }
    }
    let total_dim = degrees.iter().map(|d| d.complement.len()).sum();
    Ok(CellChart { base: rep.clone(), degrees, total_dim })
}

/// One arrow of the cell pattern: entries of the base point, `*` for free
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternMatrix {
    pub arrow: String,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellTable {
    pub beta: String,
    pub dimension: usize,
    pub matrices: Vec<PatternMatrix>,
}

impl CellTable {
    pub fn free_count(&self, arrow: usize) -> usize {
        self.matrices[arrow].rows.iter().flatten().filter(|e| *e == "*").count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}  dim {}\n", self.beta, self.dimension);
        for m in &self.matrices {
            let width = m.rows.iter().flatten().map(String::len).max().unwrap_or(1);
            for (r, row) in m.rows.iter().enumerate() {
                let head = if r == 0 { format!("{:>4} ", m.arrow) } else { " ".repeat(5) };
                let cells: Vec<String> = row.iter().map(|e| format!("{e:>width$}")).collect();
                out.push_str(&format!("{head}[ {} ]\n", cells.join(" ")));
            }
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let mats: Vec<String> = self
            .matrices
            .iter()
            .map(|m| {
                let body: Vec<String> = m
                    .rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| if e == "*" { "\\ast".to_string() } else { e.clone() })
                            .collect::<Vec<_>>()
                            .join(" & ")
                    })
                    .collect();
                format!("\\begin{{pmatrix}} {} \\end{{pmatrix}}", body.join(" \\\\ "))
            })
            .collect();
        format!("{} & {} & {} \\\\", self.beta, self.dimension, mats.join(", "))
    }
}

/// Pattern of the chart: base entries, with `*` at each free coordinate.
pub fn emit_cell_table(quiver: &Quiver, chart: &CellChart) -> CellTable {
    let base = chart.base.to_representation(quiver);
    let mut grid: Vec<Vec<Vec<String>>> = base
        .maps
        .iter()
        .map(|m| (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c).to_string()).collect()).collect())
        .collect();
    for (k, c) in chart.free_coordinates() {
        let arrow = &quiver.arrows()[c.arrow];
        let ro = chart.base.offset(arrow.target, c.level + chart.base.weights.scalar(c.arrow) - k);
        let co = chart.base.offset(arrow.source, c.level);
        grid[c.arrow][ro + c.row][co + c.col] = "*".to_string();
    }
    CellTable {
        beta: chart.base.beta.describe(quiver),
        dimension: chart.total_dim,
        matrices: quiver
            .arrows()
            .iter()
            .zip(grid)
            .map(|(a, rows)| PatternMatrix { arrow: a.name.clone(), rows })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{build_fixed_rep_auto, kronecker_stable};
    use crate::kronecker::{kronecker_setup, label1_beta, Label1};
    use crate::torus::attractor_dims;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chart(code: &str) -> (Quiver, CellChart) {
        let (q, _, _, w) = kronecker_setup(2, 1);
        let beta = label1_beta(&Label1::parse(2, 1, code).unwrap(), &w);
        let rep = build_fixed_rep_auto(&q, &w, &beta, 0).unwrap();
        let chart = choose_complements(&q, &rep).unwrap();
        (q, chart)
    }

    #[test]
    fn normal_form_cell_is_open() {
        let (q, c) = chart("3232");
        assert_eq!(c.total_dim, 6);
        let table = emit_cell_table(&q, &c);
        assert_eq!(table.free_count(0), 6);
        assert_eq!(table.free_count(1) + table.free_count(2), 0);
        assert!(table.to_latex().contains("\\ast"));
    }

    #[test]
    fn closed_cell_is_a_point() {
        let (q, c) = chart("1231");
        assert_eq!(c.total_dim, 0);
        assert!(emit_cell_table(&q, &c).matrices.iter().all(|m| !m.rows.iter().flatten().any(|e| e == "*")));
    }

    #[test]
    fn degree_pieces_have_weight_dimensions() {
        let (q, c) = chart("2132");
        let dims = attractor_dims(&q, &c.base.weights, &c.base.beta).unwrap();
        assert_eq!(c.total_dim as u32, dims.att_plus);
        for d in &c.degrees {
            let p = &d.pieces;
            assert_eq!(d.complement.len(), p.r_basis.len() - p.u_basis.len());
        }
    }

    #[test]
    fn samples_are_stable() {
        let (q, c) = chart("3232");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let n = c.sample(&q, &mut rng).unwrap();
            assert!(kronecker_stable(&q, &n).unwrap());
        }
        assert!(c.materialize(&q, &[]).is_err());
    }
}
