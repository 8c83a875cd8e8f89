//! The covering quiver `Q(w)` of a torus action with arrow weights `w`.
//!
//! Covering vertices are pairs `(vertex, character)` and the covering arrow
//! `(a, chi)` runs from `(s(a), chi)` to `(t(a), chi + w_a)`. Only finitely
//! supported dimension vectors are ever materialized, so the infinite quiver
//! itself never is.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::existence;
use crate::quiver::{DimensionVector, Quiver, StabilityCondition};

/// A character of the torus, i.e. an element of `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character(pub Vec<i64>);

impl Character {
    pub fn zero(rank: usize) -> Self {
        Character(vec![0; rank])
    }

    pub fn scalar(value: i64) -> Self {
        Character(vec![value])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Character) -> Character {
        Character(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Character) -> Character {
        Character(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Character {
        Character(self.0.iter().map(|a| -a).collect())
    }

    /// Maximum norm.
    pub fn norm(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn pair(&self, lambda: &[i64]) -> i64 {
        self.0.iter().zip(lambda).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Torus rank and one character per arrow, in arrow declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    rank: usize,
    weights: Vec<Character>,
}

/// `{"rank": n, "weights": {"a1": [...], ...}}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightDocument {
    pub rank: usize,
    pub weights: BTreeMap<String, Vec<i64>>,
}

impl WeightAssignment {
    pub fn new(quiver: &Quiver, rank: usize, weights: Vec<Character>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::validation("torus rank must be positive"));
        }
        if weights.len() != quiver.arrow_count() {
            return Err(Error::validation(format!(
                "{} weights given for {} arrows",
                weights.len(),
                quiver.arrow_count()
            )));
        }
        if let Some(bad) = weights.iter().find(|w| w.rank() != rank) {
            return Err(Error::validation(format!("weight {bad} does not have length {rank}")));
        }
        Ok(WeightAssignment { rank, weights })
    }

    /// Rank-one weights from plain integers.
    pub fn rank_one(quiver: &Quiver, weights: &[i64]) -> Result<Self> {
        WeightAssignment::new(quiver, 1, weights.iter().map(|&w| Character::scalar(w)).collect())
    }

    /// Rank-one weights `w_{a_k} = B^(N-k)` with `B = 5 + 4 * (max arrow
    /// multiplicity)`, realizing `w_{a_1} >> ... >> w_{a_N} > 0`.
    pub fn generic_rank_one(quiver: &Quiver) -> Self {
        let n = quiver.arrow_count();
        let base = 5 + 4 * quiver.max_multiplicity() as i64;
        let weights = (0..n).map(|k| Character::scalar(base.pow((n - 1 - k) as u32))).collect();
        WeightAssignment { rank: 1, weights }
    }

    /// The full arrow torus: `w_a` is the unit vector of `a`.
    pub fn arrow_torus(quiver: &Quiver) -> Self {
        let n = quiver.arrow_count();
        let weights = (0..n)
            .map(|k| {
                let mut c = vec![0; n];
                c[k] = 1;
                Character(c)
            })
            .collect();
        WeightAssignment { rank: n.max(1), weights }
    }

    pub fn from_document(quiver: &Quiver, doc: &WeightDocument) -> Result<Self> {
        let mut weights = Vec::with_capacity(quiver.arrow_count());
        for arrow in quiver.arrows() {
            let w = doc
                .weights
                .get(&arrow.name)
                .ok_or_else(|| Error::validation(format!("no weight given for arrow `{}`", arrow.name)))?;
            weights.push(Character(w.clone()));
        }
        if let Some(extra) = doc.weights.keys().find(|k| quiver.arrow_index(k).is_none()) {
            return Err(Error::validation(format!("weight for unknown arrow `{extra}`")));
        }
        WeightAssignment::new(quiver, doc.rank, weights)
    }

    pub fn from_json(quiver: &Quiver, text: &str) -> Result<Self> {
        let doc: WeightDocument = serde_json::from_str(text)?;
        WeightAssignment::from_document(quiver, &doc)
    }

    pub fn to_document(&self, quiver: &Quiver) -> WeightDocument {
        WeightDocument {
            rank: self.rank,
            weights: quiver.arrows().iter().zip(&self.weights).map(|(a, w)| (a.name.clone(), w.0.clone())).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight(&self, arrow: usize) -> &Character {
        &self.weights[arrow]
    }

    pub fn weights(&self) -> &[Character] {
        &self.weights
    }

    /// For rank one, the integer weight of an arrow.
    pub fn scalar(&self, arrow: usize) -> i64 {
        self.weights[arrow].0[0]
    }

    /// The rank-one weights `<lambda, w_a>`.
    pub fn along(&self, lambda: &[i64]) -> Result<WeightAssignment> {
        if lambda.len() != self.rank {
            return Err(Error::validation("one-parameter subgroup has the wrong rank"));
        }
        Ok(WeightAssignment {
            rank: 1,
            weights: self.weights.iter().map(|w| Character::scalar(w.pair(lambda))).collect(),
        })
    }
}

/// A covering vertex `(vertex, character)`.
pub type CoveringVertex = (usize, Character);

/// A finitely supported dimension vector of `Q(w)`. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoveringDimVector {
    rank: usize,
    support: BTreeMap<CoveringVertex, u32>,
}

/// One serialized entry `{"vertex", "char", "dim"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringEntry {
    pub vertex: String,
    #[serde(rename = "char")]
    pub character: Vec<i64>,
    pub dim: u32,
}

impl CoveringDimVector {
    pub fn empty(rank: usize) -> Self {
        CoveringDimVector { rank, support: BTreeMap::new() }
    }

    pub fn from_entries<I>(rank: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Character, u32)>,
    {
        let mut beta = CoveringDimVector::empty(rank);
        for (v, chi, dim) in entries {
            if chi.rank() != rank {
                return Err(Error::validation(format!("character {chi} is not of rank {rank}")));
            }
            beta.add(v, chi, dim);
        }
        Ok(beta)
    }

    /// Rank-one convenience constructor from `(vertex, level, dim)`.
    pub fn rank_one<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, i64, u32)>,
    {
        let mut beta = CoveringDimVector::empty(1);
        for (v, level, dim) in entries {
            beta.add(v, Character::scalar(level), dim);
        }
        beta
    }

    pub fn add(&mut self, vertex: usize, chi: Character, dim: u32) {
        if dim == 0 {
            return;
        }
        *self.support.entry((vertex, chi)).or_insert(0) += dim;
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, vertex: usize, chi: &Character) -> u32 {
        // BTreeMap lookups need an owned key; characters are tiny.
        self.support.get(&(vertex, chi.clone())).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CoveringVertex, u32)> {
        self.support.iter().map(|(k, &v)| (k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = &CoveringVertex> {
        self.support.keys()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.support.values().map(|&x| x as u64).sum()
    }

    /// Distinct characters of `vertex` in increasing order.
    pub fn levels(&self, vertex: usize) -> Vec<Character> {
        self.support.keys().filter(|(v, _)| *v == vertex).map(|(_, c)| c.clone()).collect()
    }

    pub fn characters(&self) -> BTreeSet<Character> {
        self.support.keys().map(|(_, c)| c.clone()).collect()
    }

    pub fn to_entries(&self, quiver: &Quiver) -> Vec<CoveringEntry> {
        self.support
            .iter()
            .map(|((v, c), &dim)| CoveringEntry {
                vertex: quiver.vertex_name(*v).to_string(),
                character: c.0.clone(),
                dim,
            })
            .collect()
    }

    pub fn from_covering_entries(quiver: &Quiver, rank: usize, entries: &[CoveringEntry]) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let v = quiver
                .vertex_index(&e.vertex)
                .ok_or_else(|| Error::validation(format!("unknown vertex `{}`", e.vertex)))?;
            out.push((v, Character(e.character.clone()), e.dim));
        }
        CoveringDimVector::from_entries(rank, out)
    }

    /// Compact human form, e.g. `i(-17):1 i(-1):1 j(0):1`.
    pub fn describe(&self, quiver: &Quiver) -> String {
        self.support
            .iter()
            .map(|((v, c), d)| format!("{}{}:{}", quiver.vertex_name(*v), c, d))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Target `(t(a), chi + w_a)` of the covering arrow `(a, chi)`.
pub fn covering_target(
    quiver: &Quiver,
    weights: &WeightAssignment,
    arrow: usize,
    chi: &Character,
) -> Result<CoveringVertex> {
    if arrow >= quiver.arrow_count() {
        return Err(Error::validation(format!("no arrow with index {arrow}")));
    }
    if chi.rank() != weights.rank() {
        return Err(Error::validation(format!("character {chi} does not match torus rank {}", weights.rank())));
    }
    Ok((quiver.arrows()[arrow].target, chi.add(weights.weight(arrow))))
}

/// `s_chi(beta)_{i, xi} = beta_{i, chi + xi}`: the support moves by `-chi`.
pub fn shift(beta: &CoveringDimVector, chi: &Character) -> CoveringDimVector {
    CoveringDimVector {
        rank: beta.rank,
        support: beta.support.iter().map(|((v, c), &d)| ((*v, c.sub(chi)), d)).collect(),
    }
}

/// The compatible dimension vector `c(beta)` on `Q`.
pub fn project(beta: &CoveringDimVector, vertex_count: usize) -> DimensionVector {
    let mut d = vec![0u32; vertex_count];
    for ((v, _), &k) in &beta.support {
        d[*v] += k;
    }
    DimensionVector(d)
}

/// The unique shift whose lexicographically smallest support character is zero.
pub fn canonicalize(beta: &CoveringDimVector) -> Result<CoveringDimVector> {
    let min = beta
        .support
        .keys()
        .map(|(_, c)| c)
        .min()
        .ok_or_else(|| Error::validation("cannot canonicalize the zero covering vector"))?;
    Ok(shift(beta, &min.clone()))
}

/// Euler form of `Q(w)` between two finitely supported vectors.
pub fn covering_euler_form(
    quiver: &Quiver,
    weights: &WeightAssignment,
    beta: &CoveringDimVector,
    gamma: &CoveringDimVector,
) -> i64 {
    let mut total = 0i64;
    for ((v, c), &b) in &beta.support {
        total += b as i64 * gamma.get(*v, c) as i64;
        for (idx, arrow) in quiver.arrows().iter().enumerate() {
            if arrow.source == *v {
                let target = c.add(weights.weight(idx));
                total -= b as i64 * gamma.get(arrow.target, &target) as i64;
            }
        }
    }
    total
}

fn neighbours(quiver: &Quiver, weights: &WeightAssignment, (v, c): &CoveringVertex) -> Vec<CoveringVertex> {
    let mut out = Vec::new();
    for (idx, arrow) in quiver.arrows().iter().enumerate() {
        if arrow.source == *v {
            out.push((arrow.target, c.add(weights.weight(idx))));
        }
        if arrow.target == *v {
            out.push((arrow.source, c.sub(weights.weight(idx))));
        }
    }
    out
}

/// Whether the support of `beta` spans a connected subquiver of `Q(w)`.
pub fn is_connected(quiver: &Quiver, weights: &WeightAssignment, beta: &CoveringDimVector) -> bool {
    let Some(start) = beta.support.keys().next() else {
        return true;
    };
    let mut seen: HashSet<CoveringVertex> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(p) = queue.pop_front() {
        for n in neighbours(quiver, weights, &p) {
            if beta.support.contains_key(&n) && seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == beta.support.len()
}

/// The full subquiver of `Q(w)` on the support of a covering vector.
#[derive(Debug, Clone)]
pub struct SupportQuiver {
    pub quiver: Quiver,
    pub dims: DimensionVector,
    /// Covering vertex behind each support-quiver vertex.
    pub points: Vec<CoveringVertex>,
    /// Covering arrow `(a, chi)` behind each support-quiver arrow.
    pub arrows: Vec<(usize, Character)>,
}

impl SupportQuiver {
    /// The lifted stability `theta_hat_{i, chi} = theta_i`.
    pub fn lift(&self, theta: &StabilityCondition) -> StabilityCondition {
        StabilityCondition(self.points.iter().map(|(v, _)| theta.0[*v]).collect())
    }

    pub fn point_index(&self, point: &CoveringVertex) -> Option<usize> {
        self.points.iter().position(|p| p == point)
    }
}

pub fn support_quiver(quiver: &Quiver, weights: &WeightAssignment, beta: &CoveringDimVector) -> Result<SupportQuiver> {
    if beta.is_zero() {
        return Err(Error::validation("support quiver of the zero vector"));
    }
    let points: Vec<CoveringVertex> = beta.support.keys().cloned().collect();
    let names: Vec<String> = points.iter().map(|(v, c)| format!("{}@{}", quiver.vertex_name(*v), c)).collect();
    let mut arrows = Vec::new();
    let mut arrow_docs = Vec::new();
    for (si, (v, c)) in points.iter().enumerate() {
        for (idx, arrow) in quiver.arrows().iter().enumerate() {
            if arrow.source != *v {
                continue;
            }
            let target = (arrow.target, c.add(weights.weight(idx)));
            if let Some(ti) = points.iter().position(|p| *p == target) {
                arrows.push((idx, c.clone()));
                arrow_docs.push((format!("{}@{}", arrow.name, c), names[si].clone(), names[ti].clone()));
            }
        }
    }
    let sub = Quiver::new(names, arrow_docs)?;
    let dims = DimensionVector(beta.support.values().copied().collect());
    Ok(SupportQuiver { quiver: sub, dims, points, arrows })
}

type StateKey = Vec<(CoveringVertex, u32)>;

fn state_key(beta: &CoveringDimVector) -> StateKey {
    let canon = canonicalize(beta).expect("search states are nonzero");
    canon.support.into_iter().collect()
}

/// All shift classes of connected covering vectors compatible with `d`, as
/// canonical representatives sorted by canonical form. With
/// `use_existence_filter`, classes whose support carries no stable
/// representation for the lifted stability are dropped.
pub fn enumerate_compatible(
    quiver: &Quiver,
    weights: &WeightAssignment,
    d: &DimensionVector,
    theta: &StabilityCondition,
    use_existence_filter: bool,
) -> Result<Vec<CoveringDimVector>> {
    crate::quiver::check_shapes(quiver, d, theta)?;
    if d.is_zero() {
        return Err(Error::validation("dimension vector must be nonzero"));
    }
    let start = d.entries().iter().position(|&x| x > 0).expect("nonzero vector has a positive entry");
    let rank = weights.rank();

    let mut initial = CoveringDimVector::empty(rank);
    initial.add(start, Character::zero(rank), 1);
    let mut remaining = d.entries().to_vec();
    remaining[start] -= 1;

    // Depth-first growth that only ever adds units to the current support or
    // to covering vertices adjacent to it, so every state stays connected.
    let mut visited: HashSet<StateKey> = HashSet::from([state_key(&initial)]);
    let mut stack = vec![(initial, remaining)];
    let mut found: BTreeSet<StateKey> = BTreeSet::new();
    while let Some((beta, remaining)) = stack.pop() {
        if remaining.iter().all(|&r| r == 0) {
            found.insert(state_key(&beta));
            continue;
        }
        let mut candidates: BTreeSet<CoveringVertex> = BTreeSet::new();
        for p in beta.support.keys() {
            if remaining[p.0] > 0 {
                candidates.insert(p.clone());
            }
            for n in neighbours(quiver, weights, p) {
                if remaining[n.0] > 0 {
                    candidates.insert(n);
                }
            }
        }
        for (v, c) in candidates {
            let mut next = beta.clone();
            next.add(v, c, 1);
            if visited.insert(state_key(&next)) {
                let mut rem = remaining.clone();
                rem[v] -= 1;
                stack.push((next, rem));
            }
        }
    }

    let classes = found.into_iter().map(|support| CoveringDimVector { rank, support: support.into_iter().collect() });
    if !use_existence_filter {
        return Ok(classes.collect());
    }
    let mut out = Vec::new();
    for beta in classes {
        let sq = support_quiver(quiver, weights, &beta)?;
        let theta_hat = sq.lift(theta);
        // Cheap necessary condition before the recursive criterion.
        if 1 - sq.quiver.euler_raw(sq.dims.entries(), sq.dims.entries()) < 0 {
            continue;
        }
        if existence::has_stable(&sq.quiver, &sq.dims, &theta_hat)? {
            out.push(beta);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k3() -> (Quiver, WeightAssignment) {
        let q = Quiver::kronecker(3);
        let w = WeightAssignment::generic_rank_one(&q);
        (q, w)
    }

    fn star(w: &WeightAssignment) -> CoveringDimVector {
        CoveringDimVector::rank_one([(0, 0, 2), (1, w.scalar(0), 1), (1, w.scalar(1), 1), (1, w.scalar(2), 1)])
    }

    #[test]
    fn generic_weights_for_k3() {
        let (_, w) = k3();
        assert_eq!(w.weights(), &[Character::scalar(289), Character::scalar(17), Character::scalar(1)]);
    }

    #[test]
    fn covering_targets() {
        let (q, w) = k3();
        let t = covering_target(&q, &w, 1, &Character::scalar(0)).unwrap();
        assert_eq!(t, (1, Character::scalar(17)));
        let zero = WeightAssignment::rank_one(&q, &[0, 0, 0]).unwrap();
        assert_eq!(covering_target(&q, &zero, 0, &Character::scalar(4)).unwrap(), (1, Character::scalar(4)));
        let q2 = Quiver::kronecker(1);
        let w2 = WeightAssignment::new(&q2, 2, vec![Character(vec![1, -1])]).unwrap();
        assert_eq!(covering_target(&q2, &w2, 0, &Character(vec![2, 2])).unwrap(), (1, Character(vec![3, 1])));
        assert!(covering_target(&q2, &w2, 0, &Character::scalar(0)).is_err());
    }

    #[test]
    fn projection_and_canonical_form() {
        let (_, w) = k3();
        let beta = star(&w);
        assert_eq!(project(&beta, 2), DimensionVector(vec![2, 3]));
        assert_eq!(project(&CoveringDimVector::empty(1), 2), DimensionVector(vec![0, 0]));
        let point = CoveringDimVector::rank_one([(0, 5, 2)]);
        assert_eq!(canonicalize(&point).unwrap(), CoveringDimVector::rank_one([(0, 0, 2)]));
        assert_eq!(canonicalize(&beta).unwrap(), beta);
        assert!(canonicalize(&CoveringDimVector::empty(1)).is_err());
    }

    #[test]
    fn weight_documents() {
        let q = Quiver::kronecker(2);
        let w = WeightAssignment::from_json(&q, r#"{"rank":1,"weights":{"a1":[3],"a2":[1]}}"#).unwrap();
        assert_eq!(w.scalar(0), 3);
        assert!(WeightAssignment::from_json(&q, r#"{"rank":1,"weights":{"a1":[3]}}"#).is_err());
        assert!(WeightAssignment::from_json(&q, r#"{"rank":2,"weights":{"a1":[3],"a2":[1]}}"#).is_err());
        let doc = w.to_document(&q);
        assert_eq!(WeightAssignment::from_document(&q, &doc).unwrap(), w);
    }

    #[test]
    fn star_support_quiver() {
        let (q, w) = k3();
        let sq = support_quiver(&q, &w, &star(&w)).unwrap();
        assert_eq!(sq.quiver.vertex_count(), 4);
        assert_eq!(sq.quiver.arrow_count(), 3);
        assert_eq!(sq.dims, DimensionVector(vec![2, 1, 1, 1]));
        let lifted = sq.lift(&StabilityCondition(vec![1, 0]));
        assert_eq!(lifted.0, vec![1, 0, 0, 0]);

        let single = CoveringDimVector::rank_one([(1, 7, 2)]);
        let sq = support_quiver(&q, &w, &single).unwrap();
        assert_eq!(sq.quiver.vertex_count(), 1);
        assert_eq!(sq.quiver.arrow_count(), 0);
    }

    /// Euler form of the support quiver against a direct double sum over
    /// covering data.
    #[test]
    fn support_euler_matches_covering_double_sum() {
        let (q, w) = k3();
        for beta in
            enumerate_compatible(&q, &w, &DimensionVector(vec![2, 3]), &StabilityCondition(vec![1, 0]), false).unwrap()
        {
            let sq = support_quiver(&q, &w, &beta).unwrap();
            let via_support = sq.quiver.euler_raw(sq.dims.entries(), sq.dims.entries());
            let mut direct = 0i64;
            for ((v, c), b) in beta.iter() {
                for ((v2, c2), b2) in beta.iter() {
                    if v == v2 && c == c2 {
                        direct += b as i64 * b2 as i64;
                    }
                    for (idx, a) in q.arrows().iter().enumerate() {
                        if a.source == *v && a.target == *v2 && c.add(w.weight(idx)) == *c2 {
                            direct -= b as i64 * b2 as i64;
                        }
                    }
                }
            }
            assert_eq!(via_support, direct);
            assert_eq!(covering_euler_form(&q, &w, &beta, &beta), direct);
        }
    }

    #[test]
    fn k3_golden_enumeration() {
        let (q, w) = k3();
        let d = DimensionVector(vec![2, 3]);
        let theta = StabilityCondition(vec![1, 0]);
        let classes = enumerate_compatible(&q, &w, &d, &theta, true).unwrap();
        assert_eq!(classes.len(), 13);
        let stars: Vec<_> = classes.iter().filter(|b| b.support_len() == 4).collect();
        assert_eq!(stars.len(), 1);
        assert_eq!(*stars[0], star(&w));

        // A star with one leaf of dimension 2 is not stable.
        let x1 = CoveringDimVector::rank_one([(0, 0, 2), (1, 289, 1), (1, 17, 2)]);
        let all = enumerate_compatible(&q, &w, &d, &theta, false).unwrap();
        assert!(all.contains(&x1));
        assert!(!classes.contains(&x1));
    }

    #[test]
    fn unit_vector_has_one_class() {
        let (q, w) = k3();
        let classes =
            enumerate_compatible(&q, &w, &DimensionVector(vec![1, 0]), &StabilityCondition(vec![1, 0]), true).unwrap();
        assert_eq!(classes, vec![CoveringDimVector::rank_one([(0, 0, 1)])]);
    }

    #[test]
    fn enumeration_invariants() {
        let (q, w) = k3();
        let d = DimensionVector(vec![2, 3]);
        let theta = StabilityCondition(vec![1, 0]);
        let all = enumerate_compatible(&q, &w, &d, &theta, false).unwrap();
        let mut canon = HashSet::new();
        for beta in &all {
            assert_eq!(project(beta, 2), d);
            assert!(is_connected(&q, &w, beta));
            assert_eq!(&canonicalize(beta).unwrap(), beta);
            assert_eq!(beta.total(), d.total());
            assert!(canon.insert(beta.clone()));
        }
        for beta in enumerate_compatible(&q, &w, &d, &theta, true).unwrap() {
            assert!(1 - covering_euler_form(&q, &w, &beta, &beta) >= 0);
        }
    }

    fn arb_beta() -> impl Strategy<Value = CoveringDimVector> {
        prop::collection::vec((0usize..2, -4i64..5, -4i64..5, 1u32..3), 1..6).prop_map(|entries| {
            CoveringDimVector::from_entries(2, entries.into_iter().map(|(v, a, b, d)| (v, Character(vec![a, b]), d)))
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn shift_is_a_group_action(beta in arb_beta(), a in -3i64..4, b in -3i64..4, c in -3i64..4, e in -3i64..4) {
            let chi = Character(vec![a, b]);
            let xi = Character(vec![c, e]);
            prop_assert_eq!(shift(&beta, &Character::zero(2)), beta.clone());
            prop_assert_eq!(shift(&shift(&beta, &chi), &xi), shift(&beta, &chi.add(&xi)));
            prop_assert_eq!(project(&shift(&beta, &chi), 2), project(&beta, 2));
            prop_assert_eq!(canonicalize(&shift(&beta, &chi)).unwrap(), canonicalize(&beta).unwrap());
            let canon = canonicalize(&beta).unwrap();
            prop_assert_eq!(canonicalize(&canon).unwrap(), canon);
        }
    }
}
