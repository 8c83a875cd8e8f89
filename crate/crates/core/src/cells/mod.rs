//! Concrete fixed representations and explicit attractor cells.

mod chart;
mod filtration;

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covering::{shift, support_quiver, Character, CoveringDimVector, WeightAssignment};
use crate::error::{Error, Result};
use crate::linalg::{q, Matrix};
use crate::quiver::Quiver;

pub use chart::{
    choose_complements, emit_cell_table, graded_pieces, CellChart, CellTable, DegreePiece, GradedPieces, PatternMatrix,
    RCoord, UCoord,
};
pub use filtration::{kronecker_stable, twisted_filtration_check, Filtration, FiltrationCheck};

/// A representation of a quiver over the rationals; `maps[a]` is `d_t x d_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub dims: Vec<usize>,
    pub maps: Vec<Matrix>,
}

impl Representation {
    pub fn new(quiver: &Quiver, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        let rep = Representation { dims, maps };
        rep.check(quiver)?;
        Ok(rep)
    }

    pub fn zero(quiver: &Quiver, dims: Vec<usize>) -> Self {
        let maps = quiver.arrows().iter().map(|a| Matrix::zeros(dims[a.target], dims[a.source])).collect();
        Representation { dims, maps }
    }

    fn check(&self, quiver: &Quiver) -> Result<()> {
        if self.dims.len() != quiver.vertex_count() || self.maps.len() != quiver.arrow_count() {
            return Err(Error::validation("representation does not match the quiver"));
        }
        for (m, a) in self.maps.iter().zip(quiver.arrows()) {
            if m.shape() != (self.dims[a.target], self.dims[a.source]) {
                return Err(Error::validation(format!(
                    "matrix of arrow `{}` has shape {:?}, expected {:?}",
                    a.name,
                    m.shape(),
                    (self.dims[a.target], self.dims[a.source])
                )));
            }
        }
        Ok(())
    }
}

/// Dimensions of `Hom(M, N)` and `Ext^1(M, N)` as kernel and cokernel of
/// `(A_i) -> (A_{t(a)} M_a - N_a A_{s(a)})_a`.
pub fn hom_ext(quiver: &Quiver, m: &Representation, n: &Representation) -> Result<(usize, usize)> {
    m.check(quiver)?;
    n.check(quiver)?;
    let hr = happel_ringel(quiver, m, n);
    let rank = hr.rank();
    Ok((hr.cols() - rank, hr.rows() - rank))
}

/// The matrix of the Happel-Ringel map; variables are entries of the `A_i`
/// (vertex order, row-major), equations entries of the arrow components.
pub fn happel_ringel(quiver: &Quiver, m: &Representation, n: &Representation) -> Matrix {
    let mut var_offset = Vec::with_capacity(m.dims.len());
    let mut vars = 0;
    for i in 0..m.dims.len() {
        var_offset.push(vars);
        vars += n.dims[i] * m.dims[i];
    }
    let mut eq_offset = Vec::with_capacity(quiver.arrow_count());
    let mut eqs = 0;
    for a in quiver.arrows() {
        eq_offset.push(eqs);
        eqs += n.dims[a.target] * m.dims[a.source];
    }
    let mut out = Matrix::zeros(eqs, vars);
    for (idx, a) in quiver.arrows().iter().enumerate() {
        let (s, t) = (a.source, a.target);
        let (ms, nt) = (m.dims[s], n.dims[t]);
        let ma = &m.maps[idx];
        let na = &n.maps[idx];
        for p in 0..nt {
            for c in 0..ms {
                let row = eq_offset[idx] + p * ms + c;
                // (A_t M_a)_{p,c} = sum_k (A_t)_{p,k} (M_a)_{k,c}
                for k in 0..m.dims[t] {
                    let coeff = ma.get(k, c);
                    if !coeff.is_zero() {
                        let col = var_offset[t] + p * m.dims[t] + k;
                        let v = out.get(row, col) + coeff;
                        out.set(row, col, v);
                    }
                }
                // (N_a A_s)_{p,c} = sum_k (N_a)_{p,k} (A_s)_{k,c}
                for k in 0..n.dims[s] {
                    let coeff = na.get(p, k);
                    if !coeff.is_zero() {
                        let col = var_offset[s] + k * ms + c;
                        let v = out.get(row, col) - coeff;
                        out.set(row, col, v);
                    }
                }
            }
        }
    }
    out
}

/// A rank-one fixed point: graded vertex spaces `V_{i,n}` and level-respecting
/// blocks `M_{a,n}: V_{i,n} -> V_{j,n+w_a}` keyed by `(arrow, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRep {
    pub beta: CoveringDimVector,
    pub weights: WeightAssignment,
    pub blocks: BTreeMap<(usize, i64), Matrix>,
}

impl GradedRep {
    pub fn new(
        quiver: &Quiver,
        beta: CoveringDimVector,
        weights: WeightAssignment,
        blocks: BTreeMap<(usize, i64), Matrix>,
    ) -> Result<Self> {
        if weights.rank() != 1 || beta.rank() != 1 {
            return Err(Error::validation("graded representations need a rank-one torus"));
        }
        let rep = GradedRep { beta, weights, blocks };
        for (&(a, n), m) in &rep.blocks {
            let arrow = &quiver.arrows()[a];
            let want = (rep.dim(arrow.target, n + rep.weights.scalar(a)), rep.dim(arrow.source, n));
            if m.shape() != want {
                return Err(Error::validation(format!(
                    "block ({}, {n}) has shape {:?}, expected {want:?}",
                    arrow.name,
                    m.shape()
                )));
            }
        }
        Ok(rep)
    }

    pub fn dim(&self, vertex: usize, level: i64) -> usize {
        self.beta.get(vertex, &Character::scalar(level)) as usize
    }

    /// Levels of `vertex` in increasing order.
    pub fn levels(&self, vertex: usize) -> Vec<i64> {
        self.beta.levels(vertex).into_iter().map(|c| c.0[0]).collect()
    }

    /// Offset of `V_{i,n}` inside `V_i = (+)_n V_{i,n}`, levels ascending.
    pub fn offset(&self, vertex: usize, level: i64) -> usize {
        self.levels(vertex).into_iter().take_while(|&m| m < level).map(|m| self.dim(vertex, m)).sum()
    }

    pub fn total_dims(&self, quiver: &Quiver) -> Vec<usize> {
        (0..quiver.vertex_count()).map(|v| self.levels(v).iter().map(|&n| self.dim(v, n)).sum()).collect()
    }

    /// `M_{a,n}`; zero when no block is stored.
    pub fn block(&self, quiver: &Quiver, arrow: usize, level: i64) -> Matrix {
        self.blocks.get(&(arrow, level)).cloned().unwrap_or_else(|| {
            let a = &quiver.arrows()[arrow];
            Matrix::zeros(self.dim(a.target, level + self.weights.scalar(arrow)), self.dim(a.source, level))
        })
    }

    /// The underlying representation of `Q`.
    pub fn to_representation(&self, quiver: &Quiver) -> Representation {
        let dims = self.total_dims(quiver);
        let mut rep = Representation::zero(quiver, dims);
        for (&(a, n), m) in &self.blocks {
            let arrow = &quiver.arrows()[a];
            let ro = self.offset(arrow.target, n + self.weights.scalar(a));
            let co = self.offset(arrow.source, n);
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    rep.maps[a].set(ro + r, co + c, m.get(r, c).clone());
                }
            }
        }
        rep
    }

    /// The lift `N` to `Q(w)`, shifted by `chi` and placed on the given list
    /// of covering vertices (zero outside the shifted support).
    fn lift_on(
        &self,
        quiver: &Quiver,
        points: &[(usize, Character)],
        arrows: &[(usize, Character)],
        chi: i64,
    ) -> Representation {
        // s_{-chi}(N) puts V_{i,n} at level n + chi.
        let dims: Vec<usize> = points.iter().map(|(v, c)| self.dim(*v, c.0[0] - chi)).collect();
        let maps = arrows.iter().map(|(a, c)| self.block(quiver, *a, c.0[0] - chi)).collect();
        Representation { dims, maps }
    }

    /// `(hom, ext)` of `N` against `s_{-chi}(N)` over the full covering
    /// subquiver on the union of both supports.
    pub fn covering_hom_ext(&self, quiver: &Quiver, chi: i64) -> Result<(usize, usize)> {
        let shifted = shift(&self.beta, &Character::scalar(-chi));
        let mut union = self.beta.clone();
        for ((v, c), _) in shifted.iter() {
            if self.beta.get(*v, c) == 0 {
                union.add(*v, c.clone(), 1);
            }
        }
        let sq = support_quiver(quiver, &self.weights, &union)?;
        let n = self.lift_on(quiver, &sq.points, &sq.arrows, 0);
        let shifted = self.lift_on(quiver, &sq.points, &sq.arrows, chi);
        hom_ext(&sq.quiver, &n, &shifted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Partial identities in every block, searching over diagonal offsets.
    Unit,
    /// Small random integer entries, retried with successive seeds.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub retries: u64,
    pub max_unit_fillings: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { retries: 16, max_unit_fillings: 4096 }
    }
}

fn block_keys(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
) -> Vec<(usize, i64, usize, usize)> {
    let mut keys = Vec::new();
    for (a, arrow) in quiver.arrows().iter().enumerate() {
        for n in beta.levels(arrow.source).into_iter().map(|c| c.0[0]) {
            let cols = beta.get(arrow.source, &Character::scalar(n)) as usize;
            let rows = beta.get(arrow.target, &Character::scalar(n + weights.scalar(a))) as usize;
            if rows > 0 && cols > 0 {
                keys.push((a, n, rows, cols));
            }
        }
    }
    keys
}

fn partial_identity(rows: usize, cols: usize, offset: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for k in 0..rows.min(cols) {
        if rows <= cols {
            m.set(k, k + offset, q(1));
        } else {
            m.set(k + offset, k, q(1));
        }
    }
    m
}

/// Schur property of the underlying representation and, for real roots,
/// rigidity of the covering lift.
pub fn certify(quiver: &Quiver, rep: &GradedRep) -> Result<bool> {
    let m = rep.to_representation(quiver);
    let (end, _) = hom_ext(quiver, &m, &m)?;
    if end != 1 {
        return Ok(false);
    }
    let (hom, ext) = rep.covering_hom_ext(quiver, 0)?;
    let euler = hom as i64 - ext as i64;
    Ok(hom == 1 && (euler != 1 || ext == 0))
}

/// A concrete fixed point realizing `beta`, certified by [`certify`].
pub fn build_fixed_rep(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
    strategy: Strategy,
    opts: &BuildOptions,
) -> Result<GradedRep> {
    if weights.rank() != 1 {
        return Err(Error::validation("fixed representations are built for rank-one tori"));
    }
    let keys = block_keys(quiver, weights, beta);
    match strategy {
        Strategy::Unit => {
            let choices: Vec<usize> = keys.iter().map(|&(_, _, r, c)| r.max(c) - r.min(c) + 1).collect();
            let combos = choices.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
            if combos.is_none_or(|n| n > opts.max_unit_fillings) {
                return Err(Error::unsupported("too many partial-identity fillings; use the random strategy"));
            }
            let mut pick = vec![0usize; keys.len()];
            loop {
                let blocks =
                    keys.iter().zip(&pick).map(|(&(a, n, r, c), &o)| ((a, n), partial_identity(r, c, o))).collect();
                let rep = GradedRep::new(quiver, beta.clone(), weights.clone(), blocks)?;
                if certify(quiver, &rep)? {
                    return Ok(rep);
                }
                let mut pos = 0;
                loop {
                    if pos == pick.len() {
                        return Err(Error::unsupported(
                            "no partial-identity filling is a Schur representation; use the random strategy",
                        ));
                    }
                    pick[pos] += 1;
                    if pick[pos] < choices[pos] {
                        break;
                    }
                    pick[pos] = 0;
                    pos += 1;
                }
            }
        }
        Strategy::Random { seed } => {
            for attempt in 0..opts.retries {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
                let blocks = keys
                    .iter()
                    .map(|&(a, n, r, c)| ((a, n), Matrix::from_fn(r, c, |_, _| q(rng.gen_range(-3..=3)))))
                    .collect();
                let rep = GradedRep::new(quiver, beta.clone(), weights.clone(), blocks)?;
                if certify(quiver, &rep)? {
                    return Ok(rep);
                }
            }
            Err(Error::inconsistency(format!("no certified representation after {} random attempts", opts.retries)))
        }
    }
}

/// Unit strategy first, random with `seed` as the fallback.
pub fn build_fixed_rep_auto(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
    seed: u64,
) -> Result<GradedRep> {
    let opts = BuildOptions::default();
    match build_fixed_rep(quiver, weights, beta, Strategy::Unit, &opts) {
        Ok(rep) => Ok(rep),
        Err(e) if e.kind() == crate::error::ErrorKind::Unsupported => {
            build_fixed_rep(quiver, weights, beta, Strategy::Random { seed }, &opts)
        }
        Err(e) => Err(e),
    }
}
