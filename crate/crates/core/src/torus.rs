//! Tangent weight spaces at torus-fixed points and attractor dimensions.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{enumerate_compatible, Character, CoveringDimVector, WeightAssignment};
use crate::error::{Error, Result};
use crate::quiver::{check_shapes, is_coprime, DimensionVector, Quiver, StabilityCondition};

/// A fixed-point component `F_beta` with its tangent data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedComponent {
    pub beta: CoveringDimVector,
    /// Nonzero tangent weights with multiplicities.
    pub weight_table: BTreeMap<Character, u32>,
    pub dim_component: u32,
    pub att_plus: u32,
    pub att_minus: u32,
    pub isolated: bool,
}

/// A one-parameter subgroup `lambda` of the torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OneParamSubgroup {
    pub exponents: Vec<i64>,
    pub bound: i64,
}

impl OneParamSubgroup {
    pub fn pair(&self, chi: &Character) -> i64 {
        chi.pair(&self.exponents)
    }
}

/// Cross term `sum_a sum_xi beta_{s(a),xi} beta_{t(a),xi+w_a-chi} - sum_i sum_xi beta_{i,xi} beta_{i,xi-chi}`.
fn cross_term(quiver: &Quiver, weights: &WeightAssignment, beta: &CoveringDimVector, chi: &Character) -> i64 {
    let mut total = 0i64;
    for ((v, xi), b) in beta.iter() {
        total -= b as i64 * beta.get(*v, &xi.sub(chi)) as i64;
        for (idx, a) in quiver.arrows().iter().enumerate() {
            if a.source == *v {
                let target = xi.add(weights.weight(idx)).sub(chi);
                total += b as i64 * beta.get(a.target, &target) as i64;
            }
        }
    }
    total
}

fn check_rank(weights: &WeightAssignment, beta: &CoveringDimVector, chi: &Character) -> Result<()> {
    if beta.rank() != weights.rank() || chi.rank() != weights.rank() {
        return Err(Error::validation("character ranks do not match the torus"));
    }
    Ok(())
}

/// `dim (T M)_chi = delta(chi, 0) - <beta, s_{-chi}(beta)>_{Q(w)}`.
pub fn weight_dimension(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
    chi: &Character,
) -> Result<u32> {
    check_rank(weights, beta, chi)?;
    let value = cross_term(quiver, weights, beta, chi) + i64::from(chi.is_zero());
    u32::try_from(value).map_err(|_| {
        Error::inconsistency(format!(
            "weight space of {chi} would have dimension {value}; the class carries no stable representation"
        ))
    })
}

/// Every character at which `weight_dimension` can be nonzero, including zero.
pub fn candidate_characters(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
) -> BTreeSet<Character> {
    let mut out = BTreeSet::from([Character::zero(beta.rank())]);
    for ((v, xi), _) in beta.iter() {
        for ((v2, xi2), _) in beta.iter() {
            if v == v2 {
                out.insert(xi.sub(xi2));
            }
            for (idx, a) in quiver.arrows().iter().enumerate() {
                if a.source == *v && a.target == *v2 {
                    out.insert(xi.add(weights.weight(idx)).sub(xi2));
                }
            }
        }
    }
    out
}

/// Nonzero tangent weights with their multiplicities.
pub fn weight_support(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
) -> Result<BTreeMap<Character, u32>> {
    let mut out = BTreeMap::new();
    for chi in candidate_characters(quiver, weights, beta) {
        let dim = weight_dimension(quiver, weights, beta, &chi)?;
        if dim > 0 && !chi.is_zero() {
            out.insert(chi, dim);
        }
    }
    Ok(out)
}

/// `lambda_i = (R+1)^(n-i)` with `R` the largest maximum norm in `chars`.
pub fn choose_1psg<'a, I>(chars: I, rank: usize) -> Result<OneParamSubgroup>
where
    I: IntoIterator<Item = &'a Character>,
{
    let mut bound = 0i64;
    for chi in chars {
        if chi.rank() != rank {
            return Err(Error::validation(format!("character {chi} is not of rank {rank}")));
        }
        if chi.is_zero() {
            return Err(Error::validation("the zero character cannot be separated"));
        }
        bound = bound.max(chi.norm());
    }
    let base = bound + 1;
    let exponents = (0..rank)
        .map(|k| {
            base.checked_pow((rank - 1 - k) as u32)
                .ok_or_else(|| Error::unsupported("one-parameter subgroup exponents overflow"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OneParamSubgroup { exponents, bound })
}

/// Attractor data `(d^+, d^-, dim F_beta)` of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AttractorDims {
    pub att_plus: u32,
    pub att_minus: u32,
    pub dim_component: u32,
}

/// Attractor dimensions for a rank-one torus.
pub fn attractor_dims(quiver: &Quiver, weights: &WeightAssignment, beta: &CoveringDimVector) -> Result<AttractorDims> {
    if weights.rank() != 1 {
        return Err(Error::validation(
            "attractor dimensions need a rank-one torus; reduce along a one-parameter subgroup first",
        ));
    }
    let lambda = OneParamSubgroup { exponents: vec![1], bound: 0 };
    attractor_dims_along(quiver, weights, beta, &lambda)
}

/// Attractor dimensions for the action of `lambda`: each tangent weight `chi`
/// is replaced by `<lambda, chi>`.
pub fn attractor_dims_along(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
    lambda: &OneParamSubgroup,
) -> Result<AttractorDims> {
    let zero = Character::zero(weights.rank());
    let dim_component = weight_dimension(quiver, weights, beta, &zero)?;
    let (mut att_plus, mut att_minus) = (0, 0);
    for (chi, dim) in weight_support(quiver, weights, beta)? {
        match lambda.pair(&chi).signum() {
            1 => att_plus += dim,
            -1 => att_minus += dim,
            _ => {
                return Err(Error::inconsistency(format!(
                    "one-parameter subgroup is orthogonal to the tangent weight {chi}"
                )))
            }
        }
    }
    Ok(AttractorDims { att_plus, att_minus, dim_component })
}

/// Whether the component is an isolated point with no negative tangent
/// weights, so that its attractor is open.
pub fn generic_normal_form_test(quiver: &Quiver, weights: &WeightAssignment, beta: &CoveringDimVector) -> Result<bool> {
    let dims = attractor_dims(quiver, weights, beta)?;
    Ok(dims.dim_component == 0 && dims.att_minus == 0)
}

/// The full fixed-point run for coprime `(d, theta)`.
#[derive(Debug, Clone)]
pub struct FixedPointRun {
    pub dimension: i64,
    pub lambda: OneParamSubgroup,
    pub components: Vec<FixedComponent>,
}

/// Enumerates components and computes their tangent data. Higher-rank tori
/// are reduced through `choose_1psg` on the union of all tangent weights.
pub fn fixed_components(
    quiver: &Quiver,
    weights: &WeightAssignment,
    d: &DimensionVector,
    theta: &StabilityCondition,
    use_existence_filter: bool,
) -> Result<FixedPointRun> {
    check_shapes(quiver, d, theta)?;
    if d.is_zero() {
        return Err(Error::validation("dimension vector must be nonzero"));
    }
    if !is_coprime(quiver, d, theta)? {
        return Err(Error::unsupported(format!("{d} is not coprime for the given stability")));
    }
    let classes = enumerate_compatible(quiver, weights, d, theta, use_existence_filter)?;
    let tables = classes
        .par_iter()
        .map(|beta| {
            let zero = Character::zero(weights.rank());
            Ok((weight_support(quiver, weights, beta)?, weight_dimension(quiver, weights, beta, &zero)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let all: BTreeSet<&Character> = tables.iter().flat_map(|(t, _)| t.keys()).collect();
    let lambda = choose_1psg(all, weights.rank())?;
    let mut components = Vec::with_capacity(classes.len());
    for (beta, (weight_table, dim_component)) in classes.into_iter().zip(tables) {
        let (mut att_plus, mut att_minus) = (0, 0);
        for (chi, &dim) in &weight_table {
            if lambda.pair(chi) > 0 {
                att_plus += dim;
            } else {
                att_minus += dim;
            }
        }
        components.push(FixedComponent {
            beta,
            weight_table,
            dim_component,
            att_plus,
            att_minus,
            isolated: dim_component == 0,
        });
    }
    Ok(FixedPointRun { dimension: 1 - quiver.euler_raw(d.entries(), d.entries()), lambda, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::shift;

    fn k3() -> (Quiver, WeightAssignment) {
        let q = Quiver::kronecker(3);
        let w = WeightAssignment::generic_rank_one(&q);
        (q, w)
    }

    fn star(w: &WeightAssignment) -> CoveringDimVector {
        CoveringDimVector::rank_one([(0, 0, 2), (1, w.scalar(0), 1), (1, w.scalar(1), 1), (1, w.scalar(2), 1)])
    }

    #[test]
    fn star_attractors() {
        let (q, w) = k3();
        let dims = attractor_dims(&q, &w, &star(&w)).unwrap();
        assert_eq!(dims, AttractorDims { att_plus: 3, att_minus: 3, dim_component: 0 });
        let total: u32 = weight_support(&q, &w, &star(&w)).unwrap().values().sum();
        assert_eq!(total, 6);
        assert!(!generic_normal_form_test(&q, &w, &star(&w)).unwrap());
    }

    #[test]
    fn unit_vector_has_no_weights() {
        let (q, w) = k3();
        let beta = CoveringDimVector::rank_one([(0, 0, 1)]);
        assert!(weight_support(&q, &w, &beta).unwrap().is_empty());
        assert_eq!(weight_dimension(&q, &w, &beta, &Character::scalar(0)).unwrap(), 0);
    }

    #[test]
    fn negative_dimension_is_an_error() {
        let (q, w) = k3();
        let bad = CoveringDimVector::rank_one([(0, 0, 2), (1, 289, 1), (1, 17, 2)]);
        let err = weight_dimension(&q, &w, &bad, &Character::scalar(0)).unwrap_err();
        assert_eq!(err.kind(), crate::error::ErrorKind::Inconsistency);
    }

    #[test]
    fn one_parameter_subgroups() {
        let c = [Character(vec![1, -1]), Character(vec![0, 2])];
        let l = choose_1psg(&c, 2).unwrap();
        assert_eq!(l, OneParamSubgroup { exponents: vec![3, 1], bound: 2 });
        assert_eq!(l.pair(&c[0]), 2);
        assert_eq!(l.pair(&c[1]), 2);
        let c = [Character::scalar(-4), Character::scalar(9)];
        assert_eq!(choose_1psg(&c, 1).unwrap().exponents, vec![1]);
        assert!(choose_1psg(&[Character(vec![0, 0])], 2).is_err());
    }

    #[test]
    fn golden_run_balances() {
        let (q, w) = k3();
        let run =
            fixed_components(&q, &w, &DimensionVector(vec![2, 3]), &StabilityCondition(vec![1, 0]), true).unwrap();
        assert_eq!(run.dimension, 6);
        assert_eq!(run.components.len(), 13);
        for c in &run.components {
            assert!(c.isolated);
            assert_eq!(c.att_plus + c.att_minus + c.dim_component, 6);
            let shifted = shift(&c.beta, &Character::scalar(5));
            assert_eq!(weight_support(&q, &w, &shifted).unwrap(), c.weight_table);
        }
        let mut plus: Vec<u32> = run.components.iter().map(|c| c.att_plus).collect();
        plus.sort();
        assert_eq!(plus, vec![0, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5, 6]);
        let open: Vec<_> =
            run.components.iter().filter(|c| generic_normal_form_test(&q, &w, &c.beta).unwrap()).collect();
        assert_eq!(open.len(), 1);
        assert_eq!(open[0].att_plus, 6);
    }

    #[test]
    fn arrow_torus_agrees_with_rank_one_reduction() {
        let q = Quiver::kronecker(3);
        let w = WeightAssignment::arrow_torus(&q);
        let run =
            fixed_components(&q, &w, &DimensionVector(vec![2, 3]), &StabilityCondition(vec![1, 0]), true).unwrap();
        assert_eq!(run.components.len(), 13);
        for c in &run.components {
            assert_eq!(c.att_plus + c.att_minus + c.dim_component, 6);
            let along = attractor_dims_along(&q, &w, &c.beta, &run.lambda).unwrap();
            assert_eq!((along.att_plus, along.att_minus), (c.att_plus, c.att_minus));
        }
        assert!(attractor_dims(&q, &w, &run.components[0].beta).is_err());
    }
}
