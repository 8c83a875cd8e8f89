//! Twisted filtrations and stability of Kronecker representations over the
//! algebraic closure.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{GradedRep, Representation};
use crate::covering::{Character, CoveringDimVector, WeightAssignment};
use crate::error::{Error, Result};
use crate::linalg::{q, Matrix, Span, Q};
use crate::poly::Poly;
use crate::quiver::Quiver;

/// Per vertex, `(n, spanning columns of F_{i,n})` with `n` increasing; the
/// filtration is constant between listed levels and zero below the first.
#[derive(Debug, Clone)]
pub struct Filtration {
    pub steps: Vec<Vec<(i64, Matrix)>>,
}

#[derive(Debug, Clone)]
pub struct FiltrationCheck {
    pub compatible: bool,
    /// The associated graded representation, when compatible.
    pub graded: Option<GradedRep>,
}

fn span_of(m: &Matrix) -> Span {
    let mut s = Span::new(m.rows());
    for c in 0..m.cols() {
        s.insert(m.column(c));
    }
    s
}

/// `F_{i,level}` as a span.
fn step_at(steps: &[(i64, Matrix)], dim: usize, level: i64) -> Span {
    steps.iter().take_while(|(n, _)| *n <= level).last().map(|(_, m)| span_of(m)).unwrap_or_else(|| Span::new(dim))
}

/// Columns of `top` completing a basis of `span(bottom)` to one of `span(top)`.
fn quotient_basis(bottom: &Span, top: &Matrix) -> Vec<Vec<Q>> {
    let mut s = bottom.clone();
    (0..top.cols()).map(|c| top.column(c)).filter(|v| s.insert(v.clone())).collect()
}

/// Checks `N_a(F_{i,n}) in F_{j,n+w_a}` and returns `gr^F N` when it holds.
pub fn twisted_filtration_check(
    quiver: &Quiver,
    rep: &Representation,
    filtration: &Filtration,
    weights: &WeightAssignment,
) -> Result<FiltrationCheck> {
    if weights.rank() != 1 {
        return Err(Error::validation("twisted filtrations need a rank-one torus"));
    }
    if filtration.steps.len() != quiver.vertex_count() {
        return Err(Error::validation("filtration does not match the quiver"));
    }
    for (v, steps) in filtration.steps.iter().enumerate() {
        let mut prev: Option<(i64, Span)> = None;
        for (n, m) in steps {
            if m.rows() != rep.dims[v] {
                return Err(Error::validation(format!("filtration step at level {n} has the wrong ambient dimension")));
            }
            let span = span_of(m);
            if let Some((pn, ps)) = &prev {
                if pn >= n {
                    return Err(Error::validation("filtration levels must increase"));
                }
                if !contains_span(&span, ps) {
                    return Err(Error::validation(format!(
                        "filtration at vertex {} is not nested at level {n}",
                        quiver.vertex_name(v)
                    )));
                }
            }
            prev = Some((*n, span));
        }
    }
    for (a, arrow) in quiver.arrows().iter().enumerate() {
        let w = weights.scalar(a);
        for (n, m) in &filtration.steps[arrow.source] {
            let target = step_at(&filtration.steps[arrow.target], rep.dims[arrow.target], n + w);
            for c in 0..m.cols() {
                if !target.contains(&rep.maps[a].apply(&m.column(c))) {
                    return Ok(FiltrationCheck { compatible: false, graded: None });
                }
            }
        }
    }

    // Graded pieces V_{i,n} = F_{i,n} / F_{i,n-1} with chosen lifts.
    let mut lifts: BTreeMap<(usize, i64), Vec<Vec<Q>>> = BTreeMap::new();
    let mut beta = CoveringDimVector::empty(1);
    for (v, steps) in filtration.steps.iter().enumerate() {
        let mut below = Span::new(rep.dims[v]);
        for (n, m) in steps {
            let basis = quotient_basis(&below, m);
            if !basis.is_empty() {
                beta.add(v, Character::scalar(*n), basis.len() as u32);
                lifts.insert((v, *n), basis);
            }
            below = span_of(m);
        }
    }
    let mut blocks = BTreeMap::new();
    for (a, arrow) in quiver.arrows().iter().enumerate() {
        let w = weights.scalar(a);
        for (&(v, n), src) in lifts.range((arrow.source, i64::MIN)..=(arrow.source, i64::MAX)) {
            debug_assert_eq!(v, arrow.source);
            let Some(dst) = lifts.get(&(arrow.target, n + w)) else { continue };
            // Express N_a(x) modulo F_{j,n+w_a-1} in the lifts of level n+w_a.
            let lower_vecs = lower_basis(&filtration.steps[arrow.target], n + w - 1);
            let mut system_cols: Vec<Vec<Q>> = dst.clone();
            system_cols.extend(lower_vecs);
            let dim_t = rep.dims[arrow.target];
            let system = Matrix::from_fn(dim_t, system_cols.len(), |r, c| system_cols[c][r].clone());
            let mut block = Matrix::zeros(dst.len(), src.len());
            for (c, x) in src.iter().enumerate() {
                let image = rep.maps[a].apply(x);
                let coeffs = system
                    .solve(&image)
                    .ok_or_else(|| Error::inconsistency("image of a filtration step escapes the twisted step"))?;
                for (r, value) in coeffs.into_iter().take(dst.len()).enumerate() {
                    block.set(r, c, value);
                }
            }
            if !block.is_zero() {
                blocks.insert((a, n), block);
            }
        }
    }
    let graded = if beta.is_zero() { None } else { Some(GradedRep::new(quiver, beta, weights.clone(), blocks)?) };
    Ok(FiltrationCheck { compatible: true, graded })
}

fn contains_span(big: &Span, small: &Span) -> bool {
    small.basis().iter().all(|v| big.contains(v))
}

fn lower_basis(steps: &[(i64, Matrix)], level: i64) -> Vec<Vec<Q>> {
    steps
        .iter()
        .take_while(|(n, _)| *n <= level)
        .last()
        .map(|(_, m)| (0..m.cols()).map(|c| m.column(c)).collect())
        .unwrap_or_default()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Stability of a representation of `K(m)` with dimension vector
/// `(2, 2r+1)` and `theta_i > theta_j`, over the algebraic closure.
///
/// Stable iff `[A_1 ... A_m]` has full row rank and `[A_1 x, ..., A_m x]`
/// has rank at least `r+1` for every nonzero `x`; the second condition is
/// tested at `x = (0,1)` and, on `x = (1,t)`, through the gcd of the maximal
/// relevant minors.
pub fn kronecker_stable(quiver: &Quiver, rep: &Representation) -> Result<bool> {
    let arrows = quiver.arrows();
    let shaped = quiver.vertex_count() == 2
        && arrows.iter().all(|a| a.source == 0 && a.target == 1)
        && rep.dims.len() == 2
        && rep.dims[0] == 2
        && rep.dims[1] % 2 == 1;
    if !shaped {
        return Err(Error::unsupported("closure stability is implemented for Kronecker dimension vectors (2, 2r+1)"));
    }
    rep.check(quiver)?;
    let rows = rep.dims[1];
    let r = rows / 2;
    if rows == 1 {
        // (2,1): stable iff no nonzero x is killed by every arrow.
        let stacked = Matrix::from_fn(arrows.len(), 2, |a, c| rep.maps[a].get(0, c).clone());
        return Ok(stacked.rank() == 2);
    }
    let mut all = rep.maps[0].clone();
    for m in &rep.maps[1..] {
        all = all.hstack(m)?;
    }
    if all.rank() != rows {
        return Ok(false);
    }
    let at = |x0: &Q, x1: &Q| {
        Matrix::from_fn(rows, arrows.len(), |row, a| rep.maps[a].get(row, 0) * x0 + rep.maps[a].get(row, 1) * x1)
    };
    if at(&Q::zero(), &q(1)).rank() < r + 1 {
        return Ok(false);
    }
    if arrows.len() < r + 1 {
        return Ok(false);
    }
    let samples: Vec<Q> = (0..=(r as i64 + 1)).map(q).collect();
    let evaluated: Vec<Matrix> = samples.iter().map(|t| at(&q(1), t)).collect();
    let mut g = Poly::zero();
    for rs in combinations(rows, r + 1) {
        for cs in combinations(arrows.len(), r + 1) {
            let mut points = Vec::with_capacity(samples.len());
            for (t, m) in samples.iter().zip(&evaluated) {
                let minor = Matrix::from_fn(r + 1, r + 1, |i, j| m.get(rs[i], cs[j]).clone());
                points.push((t.clone(), minor.determinant()?));
            }
            g = g.gcd(&Poly::interpolate(&points));
            if g.degree() == Some(0) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{build_fixed_rep_auto, choose_complements, hom_ext};
    use crate::kronecker::{kronecker_setup, label1_beta, Label1};

    #[test]
    fn minors_detect_a_common_root() {
        let k3 = Quiver::kronecker(3);
        let a1 = Matrix::from_rows(&[vec![1, 0], vec![0, 1], vec![0, 0]]);
        let a2 = Matrix::from_rows(&[vec![0, 0], vec![1, 0], vec![0, 1]]);
        let a3 = Matrix::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 1]]);
        let good = Representation::new(&k3, vec![2, 3], vec![a1, a2, a3]).unwrap();
        assert!(kronecker_stable(&k3, &good).unwrap());
        // Full rank and fine at (0,1), but x = (1,-1) spans a line.
        let b1 = Matrix::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 0]]);
        let b2 = Matrix::from_rows(&[vec![0, 0], vec![1, 1], vec![0, 0]]);
        let b3 = Matrix::from_rows(&[vec![0, 0], vec![0, 0], vec![1, 1]]);
        let bad = Representation::new(&k3, vec![2, 3], vec![b1, b2, b3]).unwrap();
        assert!(!kronecker_stable(&k3, &bad).unwrap());
    }

    #[test]
    fn standard_filtration_recovers_base() {
        let (q, _, _, w) = kronecker_setup(2, 1);
        let beta = label1_beta(&Label1::parse(2, 1, "3132").unwrap(), &w);
        let rep = build_fixed_rep_auto(&q, &w, &beta, 0).unwrap();
        let chart = choose_complements(&q, &rep).unwrap();
        let point = chart.materialize(&q, &vec![crate::linalg::q(2); chart.total_dim]).unwrap();
        let check = twisted_filtration_check(&q, &point, &chart.standard_filtration(&q), &w).unwrap();
        assert!(check.compatible);
        let gr = check.graded.unwrap();
        assert_eq!(gr.beta, rep.beta);
        let (hom, _) = hom_ext(&q, &gr.to_representation(&q), &rep.to_representation(&q)).unwrap();
        assert_eq!(hom, 1);
    }

    #[test]
    fn trivial_filtration_is_compatible() {
        let (q, _, _, w) = kronecker_setup(2, 1);
        let beta = label1_beta(&Label1::parse(2, 1, "3232").unwrap(), &w);
        let rep = build_fixed_rep_auto(&q, &w, &beta, 0).unwrap().to_representation(&q);
        let trivial = Filtration { steps: rep.dims.iter().map(|&d| vec![(0, Matrix::identity(d))]).collect() };
        let check = twisted_filtration_check(&q, &rep, &trivial, &w).unwrap();
        assert!(check.compatible);
        let gr = check.graded.unwrap();
        assert!(gr.blocks.is_empty());
        assert_eq!(gr.beta.support_len(), 2);
    }

    #[test]
    fn rejects_non_nested_input() {
        let (q, _, _, w) = kronecker_setup(2, 1);
        let rep = Representation::zero(&q, vec![2, 3]);
        let e1 = Matrix::from_rows(&[vec![1], vec![0]]);
        let e2 = Matrix::from_rows(&[vec![0], vec![1]]);
        let bad = Filtration { steps: vec![vec![(0, e1), (1, e2)], vec![(0, Matrix::identity(3))]] };
        assert!(twisted_filtration_check(&q, &rep, &bad, &w).is_err());
    }
}
