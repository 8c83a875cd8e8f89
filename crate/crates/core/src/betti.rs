//! Poincaré polynomials: per-component providers and assembly over the
//! Białynicki-Birula decomposition.

use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::covering::{support_quiver, WeightAssignment};
use crate::error::{Error, Result};
use crate::existence::{brute_force_stable_count_with, p1_stable_configurations, CountOptions};
use crate::linalg::Q;
use crate::poly::Poly;
use crate::quiver::{Quiver, StabilityCondition};
use crate::torus::FixedComponent;

/// `sum_j b_j t^(2j)`; only even degrees occur.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PoincarePolynomial {
    betti: Vec<u64>,
}

impl PoincarePolynomial {
    pub fn from_betti(mut betti: Vec<u64>) -> Self {
        while betti.last() == Some(&0) {
            betti.pop();
        }
        PoincarePolynomial { betti }
    }

    pub fn one() -> Self {
        PoincarePolynomial { betti: vec![1] }
    }

    pub fn zero() -> Self {
        PoincarePolynomial { betti: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.betti.is_empty()
    }

    /// `b_j`, the coefficient of `t^(2j)`.
    pub fn betti(&self, j: usize) -> u64 {
        self.betti.get(j).copied().unwrap_or(0)
    }

    pub fn betti_numbers(&self) -> &[u64] {
        &self.betti
    }

    /// Coefficient of `t^degree`; zero in odd degrees.
    pub fn coefficient(&self, degree: usize) -> u64 {
        if degree % 2 == 1 {
            0
        } else {
            self.betti(degree / 2)
        }
    }

    /// Degree in `t`, or `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.betti.len().checked_sub(1).map(|j| 2 * j)
    }

    /// Multiplication by `t^(2k)`.
    pub fn shifted(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut betti = vec![0; k];
        betti.extend_from_slice(&self.betti);
        PoincarePolynomial { betti }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.betti.len().max(other.betti.len());
        Self::from_betti((0..n).map(|j| self.betti(j) + other.betti(j)).collect())
    }

    /// Value at `t^2 = q`.
    pub fn evaluate_q(&self, q: u128) -> u128 {
        self.betti.iter().rev().fold(0u128, |acc, &b| acc * q + b as u128)
    }

    /// Value at `t = 1`, the Euler characteristic.
    pub fn euler_characteristic(&self) -> u64 {
        self.betti.iter().sum()
    }

    /// `t^(2D) P(1/t) = P(t)`.
    pub fn satisfies_duality(&self, dim: usize) -> bool {
        self.betti.len() <= dim + 1 && (0..=dim).all(|j| self.betti(j) == self.betti(dim - j))
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (j, &b) in self.betti.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let deg = 2 * j;
            let power = match (deg, latex) {
                (0, _) => String::new(),
                (d, true) if d >= 10 => format!("t^{{{d}}}"),
                (d, _) => format!("t^{d}"),
            };
            terms.push(match (b, deg) {
                (_, 0) => b.to_string(),
                (1, _) => power,
                _ => format!("{b}{power}"),
            });
        }
        terms.join(" + ")
    }

    /// Plain text, e.g. `1 + t^2 + 3t^4`.
    pub fn to_text(&self) -> String {
        self.render(false)
    }

    /// LaTeX, e.g. `1 + t^2 + 3t^4 + t^{10}`.
    pub fn to_latex(&self) -> String {
        self.render(true)
    }
}

impl fmt::Display for PoincarePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for PoincarePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.betti.serialize(s)
    }
}

/// `b_j(x) = 1 + sum_{nu=1}^{min(j, x-3-j)} C(x-1, j)` for `j = 0..=x-3`,
/// evaluated exactly in this form (the summand does not involve `nu`).
pub fn kirwan_subspace_poincare(x: usize) -> Result<PoincarePolynomial> {
    if x < 3 || x.is_multiple_of(2) {
        return Err(Error::validation(format!("x = {x} must be odd and at least 3")));
    }
    let betti = (0..=x - 3).map(|j| 1 + j.min(x - 3 - j) as u64 * binomial(x as u64 - 1, j as u64)).collect();
    Ok(PoincarePolynomial::from_betti(betti))
}

fn field_sizes() -> impl Iterator<Item = usize> {
    [2usize, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49].into_iter()
}

/// The Poincaré polynomial of `((P^1)^x)^{st} / PGL_2` recovered from point
/// counts over `x - 2` finite fields.
pub fn kirwan_oracle_poincare(x: usize) -> Result<PoincarePolynomial> {
    if x < 3 || x.is_multiple_of(2) {
        return Err(Error::validation(format!("x = {x} must be odd and at least 3")));
    }
    let dim = x - 3;
    let counts = field_sizes()
        .take(dim + 1)
        .map(|q| Ok((q as u64, p1_stable_configurations(x, q)?)))
        .collect::<Result<Vec<_>>>()?;
    interpolate_from_counts(&counts, dim)
}

/// Printed closed form against the point-count oracle for one `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KirwanReport {
    pub x: usize,
    pub closed_form: PoincarePolynomial,
    pub point_count: PoincarePolynomial,
    pub agree: bool,
}

pub fn kirwan_report(x: usize) -> Result<KirwanReport> {
    let closed_form = kirwan_subspace_poincare(x)?;
    let point_count = kirwan_oracle_poincare(x)?;
    let agree = closed_form == point_count;
    Ok(KirwanReport { x, closed_form, point_count, agree })
}

/// The unique polynomial of degree at most `dim` in `q = t^2` through the
/// counts `(q, |X(F_q)|)`.
pub fn interpolate_from_counts(counts: &[(u64, u128)], dim: usize) -> Result<PoincarePolynomial> {
    let mut qs: Vec<u64> = counts.iter().map(|c| c.0).collect();
    qs.sort_unstable();
    qs.dedup();
    if qs.len() != counts.len() {
        return Err(Error::inconsistency("repeated field size among the counts"));
    }
    if counts.len() < dim + 1 {
        return Err(Error::inconsistency(format!(
            "{} counts cannot determine a polynomial of degree {dim}",
            counts.len()
        )));
    }
    let points: Vec<(Q, Q)> =
        counts.iter().map(|&(q, n)| (Q::from_integer(BigInt::from(q)), Q::from_integer(BigInt::from(n)))).collect();
    let poly = Poly::interpolate(&points);
    if poly.degree().is_some_and(|d| d > dim) {
        return Err(Error::inconsistency(format!("point counts are not given by a polynomial of degree {dim}")));
    }
    let mut betti = Vec::new();
    for c in poly.coeffs() {
        if !c.is_integer() || c.is_negative() {
            return Err(Error::inconsistency(format!("interpolated coefficient {c} is not a nonnegative integer")));
        }
        betti.push(c.to_integer().to_u64().ok_or_else(|| Error::inconsistency("interpolated coefficient overflows"))?);
    }
    Ok(PoincarePolynomial::from_betti(betti))
}

/// Which provider determined a component polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "provider", rename_all = "kebab-case")]
pub enum Provider {
    Point,
    SubspaceStar { x: usize },
    Interpolated { fields: Vec<u64> },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentPoincare {
    pub provider: Provider,
    pub polynomial: Option<PoincarePolynomial>,
}

/// Number of dimension-one leaves when the support is a star with a
/// two-dimensional center pointing to leaves of dimension one or two, and the
/// center has the larger stability weight.
fn subspace_star(quiver: &Quiver, dims: &[u32], theta: &[i64]) -> Option<usize> {
    let center =
        (0..dims.len()).find(|&c| dims[c] == 2 && quiver.arrows().iter().all(|a| a.source == c && a.target != c))?;
    let others = quiver.vertex_count() - 1;
    if quiver.arrow_count() != others {
        return None;
    }
    let mut hit = vec![false; quiver.vertex_count()];
    for a in quiver.arrows() {
        if std::mem::replace(&mut hit[a.target], true) {
            return None;
        }
    }
    let leaves: Vec<usize> = (0..dims.len()).filter(|&v| v != center).collect();
    if leaves.iter().any(|&v| !(dims[v] == 1 || dims[v] == 2) || theta[v] >= theta[center]) {
        return None;
    }
    if leaves.windows(2).any(|p| theta[p[0]] != theta[p[1]]) {
        return None;
    }
    Some(leaves.iter().filter(|&&v| dims[v] == 1).count())
}

/// Options for the point-count provider.
#[derive(Debug, Clone, Copy)]
pub struct ProviderOptions {
    pub interpolate: bool,
    pub count: CountOptions,
}

impl Default for ProviderOptions {
    fn default() -> Self {
        ProviderOptions { interpolate: true, count: CountOptions::default() }
    }
}

/// Poincaré polynomial of `F_beta`: a point for real roots, the subspace
/// formula for stars, else interpolated point counts within the budget.
pub fn component_poincare(
    component: &FixedComponent,
    quiver: &Quiver,
    weights: &WeightAssignment,
    theta: &StabilityCondition,
    opts: &ProviderOptions,
) -> ComponentPoincare {
    if component.isolated {
        return ComponentPoincare { provider: Provider::Point, polynomial: Some(PoincarePolynomial::one()) };
    }
    let unknown = ComponentPoincare { provider: Provider::Unknown, polynomial: None };
    let Ok(sq) = support_quiver(quiver, weights, &component.beta) else {
        return unknown;
    };
    let lifted = sq.lift(theta);
    if let Some(x) = subspace_star(&sq.quiver, sq.dims.entries(), lifted.weights()) {
        if let Ok(p) = kirwan_subspace_poincare(x) {
            return ComponentPoincare { provider: Provider::SubspaceStar { x }, polynomial: Some(p) };
        }
    }
    if !opts.interpolate {
        return unknown;
    }
    let dim = component.dim_component as usize;
    let mut counts = Vec::new();
    for q in field_sizes().take(dim + 1) {
        match brute_force_stable_count_with(&sq.quiver, &sq.dims, &lifted, q, &opts.count) {
            Ok(n) => counts.push((q as u64, n)),
            Err(_) => return unknown,
        }
    }
    match interpolate_from_counts(&counts, dim) {
        Ok(p) => ComponentPoincare {
            provider: Provider::Interpolated { fields: counts.iter().map(|c| c.0).collect() },
            polynomial: Some(p),
        },
        Err(_) => unknown,
    }
}

/// `sum_beta t^(2 att_plus(beta)) P_{F_beta}(t)`.
pub fn assemble_poincare<'a, I>(parts: I) -> Result<PoincarePolynomial>
where
    I: IntoIterator<Item = (&'a FixedComponent, &'a ComponentPoincare)>,
{
    let mut total = PoincarePolynomial::zero();
    let mut missing = Vec::new();
    for (idx, (component, provided)) in parts.into_iter().enumerate() {
        match &provided.polynomial {
            Some(p) => total = total.add(&p.shifted(component.att_plus as usize)),
            None => missing.push(format!("component {idx}")),
        }
    }
    if !missing.is_empty() {
        return Err(Error::PartialResult(missing));
    }
    Ok(total)
}

/// Whether `p(q) = count`.
pub fn matches_count(p: &PoincarePolynomial, q: u128, count: u128) -> bool {
    p.evaluate_q(q) == count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::CoveringDimVector;
    use crate::quiver::DimensionVector;
    use crate::torus::fixed_components;

    fn paper_k3() -> PoincarePolynomial {
        PoincarePolynomial::from_betti(vec![1, 1, 3, 3, 3, 1, 1])
    }

    #[test]
    fn rendering() {
        let p = paper_k3();
        assert_eq!(p.to_text(), "1 + t^2 + 3t^4 + 3t^6 + 3t^8 + t^10 + t^12");
        assert_eq!(p.to_latex(), "1 + t^2 + 3t^4 + 3t^6 + 3t^8 + t^{10} + t^{12}");
        assert_eq!(PoincarePolynomial::one().to_text(), "1");
        assert_eq!(p.evaluate_q(2), 183);
        assert_eq!(p.euler_characteristic(), 13);
        assert!(p.satisfies_duality(6));
        assert!(!PoincarePolynomial::from_betti(vec![1, 2]).satisfies_duality(1));
    }

    #[test]
    fn kirwan_values() {
        assert_eq!(kirwan_subspace_poincare(3).unwrap(), PoincarePolynomial::one());
        assert_eq!(kirwan_subspace_poincare(5).unwrap().betti_numbers(), &[1, 5, 1]);
        for x in [3, 5, 7, 9, 11] {
            assert_eq!(kirwan_subspace_poincare(x).unwrap().betti(0), 1);
        }
        assert!(kirwan_subspace_poincare(4).is_err());
        assert!(kirwan_subspace_poincare(1).is_err());
    }

    #[test]
    fn kirwan_against_point_counts() {
        assert!(kirwan_report(3).unwrap().agree);
        assert!(kirwan_report(5).unwrap().agree);
        // From x = 7 on the printed closed form and the point counts part ways.
        let r7 = kirwan_report(7).unwrap();
        assert_eq!(r7.point_count.betti_numbers(), &[1, 7, 22, 7, 1]);
        assert_eq!(r7.closed_form.betti_numbers(), &[1, 7, 31, 21, 1]);
        assert!(!r7.agree);
        let r9 = kirwan_report(9).unwrap();
        assert_eq!(r9.point_count.betti_numbers(), &[1, 9, 37, 93, 37, 9, 1]);
        assert!(!r9.agree);
    }

    /// Independent count of the same configurations by direct enumeration.
    #[test]
    fn configuration_count_by_enumeration() {
        for (x, q) in [(5usize, 2usize), (5, 3), (7, 2)] {
            let n = q + 1;
            let h = x / 2;
            let mut total = 0u128;
            let mut tuple = vec![0usize; x];
            loop {
                let mut mult = vec![0usize; n];
                for &p in &tuple {
                    mult[p] += 1;
                }
                if mult.iter().all(|&m| m <= h) {
                    total += 1;
                }
                let mut pos = 0;
                while pos < x {
                    tuple[pos] += 1;
                    if tuple[pos] < n {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == x {
                    break;
                }
            }
            let group = (q * q * q - q) as u128;
            assert_eq!(p1_stable_configurations(x, q).unwrap(), total / group);
        }
    }

    #[test]
    fn interpolation() {
        assert_eq!(interpolate_from_counts(&[(2, 1), (3, 1)], 0).unwrap(), PoincarePolynomial::one());
        let p = interpolate_from_counts(&[(2, 15), (3, 25), (5, 51)], 2).unwrap();
        assert_eq!(p.betti_numbers(), &[1, 5, 1]);
        assert!(interpolate_from_counts(&[(2, 1)], 1).is_err());
        assert!(interpolate_from_counts(&[(2, 1), (3, 2)], 1).is_err());
        assert!(interpolate_from_counts(&[(2, 3), (3, 2)], 1).is_err());
        assert!(matches_count(&paper_k3(), 2, 183));
    }

    #[test]
    fn golden_assembly() {
        let q = Quiver::kronecker(3);
        let w = WeightAssignment::generic_rank_one(&q);
        let theta = StabilityCondition(vec![1, 0]);
        let run = fixed_components(&q, &w, &DimensionVector(vec![2, 3]), &theta, true).unwrap();
        let provided: Vec<_> =
            run.components.iter().map(|c| component_poincare(c, &q, &w, &theta, &ProviderOptions::default())).collect();
        let p = assemble_poincare(run.components.iter().zip(&provided)).unwrap();
        assert_eq!(p, paper_k3());
        let reversed = assemble_poincare(run.components.iter().rev().zip(provided.iter().rev())).unwrap();
        assert_eq!(reversed, p);
        let mut broken = provided.clone();
        broken[4] = ComponentPoincare { provider: Provider::Unknown, polynomial: None };
        assert!(matches!(
            assemble_poincare(run.components.iter().zip(&broken)),
            Err(Error::PartialResult(v)) if v == vec!["component 4".to_string()]
        ));
    }

    fn star_component(x: usize) -> (Quiver, WeightAssignment, FixedComponent) {
        let q = Quiver::kronecker(x);
        let w = WeightAssignment::generic_rank_one(&q);
        let mut entries = vec![(0usize, 0i64, 2u32)];
        for a in 0..x {
            entries.push((1, w.scalar(a), 1));
        }
        let beta = CoveringDimVector::rank_one(entries);
        let dims = crate::torus::attractor_dims(&q, &w, &beta).unwrap();
        let component = FixedComponent {
            beta,
            weight_table: Default::default(),
            dim_component: dims.dim_component,
            att_plus: dims.att_plus,
            att_minus: dims.att_minus,
            isolated: dims.dim_component == 0,
        };
        (q, w, component)
    }

    #[test]
    fn star_providers() {
        let theta = StabilityCondition(vec![1, 0]);
        let (q, w, c) = star_component(5);
        assert_eq!(c.dim_component, 2);
        let got = component_poincare(&c, &q, &w, &theta, &ProviderOptions::default());
        assert_eq!(got.provider, Provider::SubspaceStar { x: 5 });
        assert_eq!(got.polynomial.unwrap().betti_numbers(), &[1, 5, 1]);
        let (q, w, c) = star_component(3);
        let got = component_poincare(&c, &q, &w, &theta, &ProviderOptions::default());
        assert_eq!(got.provider, Provider::Point);
    }
}
