//! Quivers, dimension vectors, stability conditions and the Euler form.
//!
//! Vertices and arrows are named by strings; everything downstream works with
//! their positions in declaration order, which doubles as the canonical order
//! used when serializing and comparing covering data.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite quiver with named vertices and arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    index: HashMap<String, usize>,
}

/// On-disk form: `{"vertices": [...], "arrows": [{"name", "from", "to"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuiverDocument {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowDocument {
    pub name: String,
    pub from: String,
    pub to: String,
}

impl Quiver {
    /// Builds a quiver from vertex names and `(arrow, source, target)` triples.
    pub fn new<V, A>(vertices: V, arrows: A) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        A: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(vertices.len());
        for (pos, name) in vertices.iter().enumerate() {
            if index.insert(name.clone(), pos).is_some() {
                return Err(Error::validation(format!("duplicate vertex `{name}`")));
            }
        }
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for (name, from, to) in arrows {
            let source = *index
                .get(&from)
                .ok_or_else(|| Error::validation(format!("arrow `{name}`: unknown source `{from}`")))?;
            let target =
                *index.get(&to).ok_or_else(|| Error::validation(format!("arrow `{name}`: unknown target `{to}`")))?;
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::validation(format!("duplicate arrow `{name}`")));
            }
            out.push(Arrow { name, source, target });
        }
        Ok(Quiver { vertices, arrows: out, index })
    }

    /// The generalized Kronecker quiver with vertices `i`, `j` and arrows
    /// `a1..aN`, all pointing from `i` to `j`.
    pub fn kronecker(arrows: usize) -> Self {
        let arrows = (1..=arrows).map(|k| (format!("a{k}"), "i".to_string(), "j".to_string()));
        Quiver::new(["i", "j"], arrows).expect("kronecker quiver is well formed")
    }

    pub fn from_document(doc: &QuiverDocument) -> Result<Self> {
        Quiver::new(
            doc.vertices.iter().cloned(),
            doc.arrows.iter().map(|a| (a.name.clone(), a.from.clone(), a.to.clone())),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: QuiverDocument = serde_json::from_str(text)?;
        Quiver::from_document(&doc)
    }

    pub fn to_document(&self) -> QuiverDocument {
        QuiverDocument {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowDocument {
                    name: a.name.clone(),
                    from: self.vertices[a.source].clone(),
                    to: self.vertices[a.target].clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Largest number of parallel arrows between an ordered pair of vertices.
    pub fn max_multiplicity(&self) -> usize {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for a in &self.arrows {
            *counts.entry((a.source, a.target)).or_default() += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    /// Vertices in an order where every arrow points forward, or `None` when
    /// the quiver has an oriented cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut indegree = vec![0usize; n];
        for a in &self.arrows {
            indegree[a.target] += 1;
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for a in self.arrows.iter().filter(|a| a.source == v) {
                indegree[a.target] -= 1;
                if indegree[a.target] == 0 {
                    ready.push(a.target);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Raw Euler form on entry slices that are already known to match the
    /// vertex count.
    pub(crate) fn euler_raw(&self, d: &[u32], e: &[u32]) -> i64 {
        let vertex: i64 = d.iter().zip(e).map(|(&x, &y)| x as i64 * y as i64).sum();
        let arrow: i64 = self.arrows.iter().map(|a| d[a.source] as i64 * e[a.target] as i64).sum();
        vertex - arrow
    }

    fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.vertices.len() {
            return Err(Error::validation(format!(
                "{what} has {len} entries but the quiver has {} vertices",
                self.vertices.len()
            )));
        }
        Ok(())
    }
}

/// A dimension vector, one nonnegative entry per vertex in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimensionVector(pub Vec<u32>);

impl DimensionVector {
    pub fn new(entries: Vec<u32>) -> Self {
        DimensionVector(entries)
    }

    pub fn zero(len: usize) -> Self {
        DimensionVector(vec![0; len])
    }

    pub fn unit(len: usize, vertex: usize) -> Self {
        let mut entries = vec![0; len];
        entries[vertex] = 1;
        DimensionVector(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(DimensionVector)
    }

    pub fn gcd(&self) -> u32 {
        self.0.iter().fold(0, |g, &x| num_integer::gcd(g, x))
    }

    /// Every `e` with `0 <= e <= self`, in lexicographic order of entries.
    pub fn sub_box(&self) -> SubBox {
        SubBox { bound: self.0.clone(), next: Some(vec![0; self.0.len()]) }
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        text.split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| Error::validation(format!("bad dimension entry `{s}`"))))
            .collect::<Result<Vec<_>>>()
            .map(DimensionVector)
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Iterator over the box `0 <= e <= bound`.
pub struct SubBox {
    bound: Vec<u32>,
    next: Option<Vec<u32>>,
}

impl Iterator for SubBox {
    type Item = DimensionVector;

    fn next(&mut self) -> Option<DimensionVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if succ[pos] < self.bound[pos] {
                succ[pos] += 1;
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(DimensionVector(current))
    }
}

/// Integer weights `theta_i`; the induced linear form is `theta(d) = sum theta_i d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StabilityCondition(pub Vec<i64>);

impl StabilityCondition {
    pub fn new(weights: Vec<i64>) -> Self {
        StabilityCondition(weights)
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    pub fn evaluate(&self, d: &[u32]) -> i64 {
        self.0.iter().zip(d).map(|(&t, &x)| t * x as i64).sum()
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        text.split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| Error::validation(format!("bad stability entry `{s}`"))))
            .collect::<Result<Vec<_>>>()
            .map(StabilityCondition)
    }
}

/// `<d, e> = sum_i d_i e_i - sum_{a: i -> j} d_i e_j`.
pub fn euler_form(quiver: &Quiver, d: &DimensionVector, e: &DimensionVector) -> Result<i64> {
    quiver.check_len(d.len(), "first dimension vector")?;
    quiver.check_len(e.len(), "second dimension vector")?;
    Ok(quiver.euler_raw(&d.0, &e.0))
}

/// Expected dimension `1 - <d, d>` of the moduli space.
pub fn moduli_dimension(quiver: &Quiver, d: &DimensionVector) -> Result<i64> {
    Ok(1 - euler_form(quiver, d, d)?)
}

/// Exact slope `theta(d) / sum_i d_i`.
pub fn slope(theta: &StabilityCondition, d: &DimensionVector) -> Result<BigRational> {
    if theta.0.len() != d.len() {
        return Err(Error::validation("stability condition and dimension vector differ in length"));
    }
    let total = d.total();
    if total == 0 {
        return Err(Error::UndefinedSlope);
    }
    Ok(BigRational::new(BigInt::from(theta.evaluate(&d.0)), BigInt::from(total)))
}

/// Compares `mu(e)` with `mu(d)` by cross multiplication; both must be nonzero.
pub(crate) fn compare_slopes(theta: &StabilityCondition, e: &[u32], d: &[u32]) -> std::cmp::Ordering {
    let te = theta.evaluate(e) as i128;
    let td = theta.evaluate(d) as i128;
    let se: i128 = e.iter().map(|&x| x as i128).sum();
    let sd: i128 = d.iter().map(|&x| x as i128).sum();
    (te * sd).cmp(&(td * se))
}

/// True iff no `d'` with `0 < d' < d` has the slope of `d`.
pub fn is_coprime(quiver: &Quiver, d: &DimensionVector, theta: &StabilityCondition) -> Result<bool> {
    quiver.check_len(d.len(), "dimension vector")?;
    quiver.check_len(theta.0.len(), "stability condition")?;
    if d.is_zero() {
        return Err(Error::UndefinedSlope);
    }
    for e in d.sub_box() {
        if e.is_zero() || e == *d {
            continue;
        }
        if compare_slopes(theta, &e.0, &d.0).is_eq() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Validates that `d` and `theta` fit `quiver`.
pub fn check_shapes(quiver: &Quiver, d: &DimensionVector, theta: &StabilityCondition) -> Result<()> {
    quiver.check_len(d.len(), "dimension vector")?;
    quiver.check_len(theta.0.len(), "stability condition")
}
