//! Closed forms for the Kronecker quiver `K(l+1)` with dimension vector
//! `(2, 2r+1)`, stability `(1, 0)` and weights `w_1 >> ... >> w_{l+1} > 0`.

use std::fmt;

use num_integer::binomial;
use serde::Serialize;

use crate::betti::{kirwan_subspace_poincare, PoincarePolynomial};
use crate::covering::{canonicalize, CoveringDimVector, WeightAssignment};
use crate::error::{Error, Result};
use crate::quiver::{DimensionVector, Quiver, StabilityCondition};

/// Isolated fixed point of the first kind. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Label1 {
    pub l: usize,
    pub r: usize,
    pub m: usize,
    pub m_star: Vec<usize>,
    pub n: usize,
    pub n_star: Vec<usize>,
}

/// Fixed-point component of the second kind, `x = 2(r-y)+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Label2 {
    pub l: usize,
    pub r: usize,
    pub y: usize,
    pub m_star: Vec<usize>,
    pub n_star: Vec<usize>,
}

fn complement(l: usize, used: &[usize]) -> Vec<usize> {
    (1..=l + 1).filter(|k| !used.contains(k)).collect()
}

/// Strictly increasing `k`-subsets of `1..=n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            if n - v + 1 < k - cur.len() {
                break;
            }
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

fn digits(seq: &[usize], wide: bool) -> String {
    let parts: Vec<String> = seq.iter().map(|x| x.to_string()).collect();
    parts.join(if wide { "." } else { "" })
}

impl Label1 {
    pub fn s(&self) -> usize {
        self.l - self.r
    }

    /// `m_{r+1} < ... < m_l`, the indices other than `m` and `m_*`.
    pub fn m_complement(&self) -> Vec<usize> {
        let mut used = self.m_star.clone();
        used.push(self.m);
        complement(self.l, &used)
    }

    pub fn n_complement(&self) -> Vec<usize> {
        let mut used = self.n_star.clone();
        used.push(self.n);
        complement(self.l, &used)
    }

    /// `m_* m n n_*` as digits; for `l = 2, r = 1` this is the four-digit
    /// `m_1 m n n_1`.
    pub fn code(&self) -> String {
        let mut seq = self.m_star.clone();
        seq.push(self.m);
        seq.push(self.n);
        seq.extend_from_slice(&self.n_star);
        digits(&seq, self.l >= 9)
    }

    /// Parses a code produced by [`Label1::code`].
    pub fn parse(l: usize, r: usize, code: &str) -> Result<Self> {
        let seq: Vec<usize> = if code.contains('.') {
            code.split('.').map(|s| s.parse().map_err(|_| Error::validation("bad label"))).collect::<Result<_>>()?
        } else {
            code.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::validation("bad label")))
                .collect::<Result<_>>()?
        };
        if seq.len() != 2 * r + 2 {
            return Err(Error::validation(format!("label `{code}` does not have {} entries", 2 * r + 2)));
        }
        let label = Label1 { l, r, m_star: seq[..r].to_vec(), m: seq[r], n: seq[r + 1], n_star: seq[r + 2..].to_vec() };
        label.validate()?;
        Ok(label)
    }

    fn validate(&self) -> Result<()> {
        let in_range = |x: &usize| (1..=self.l + 1).contains(x);
        let increasing = |v: &[usize]| v.windows(2).all(|p| p[0] < p[1]);
        let ok = self.m < self.n
            && in_range(&self.m)
            && in_range(&self.n)
            && self.m_star.len() == self.r
            && self.n_star.len() == self.r
            && self.m_star.iter().all(in_range)
            && self.n_star.iter().all(in_range)
            && increasing(&self.m_star)
            && increasing(&self.n_star)
            && !self.m_star.contains(&self.m)
            && !self.n_star.contains(&self.n);
        if ok {
            Ok(())
        } else {
            Err(Error::validation(format!("invalid first-kind label {self:?}")))
        }
    }
}

impl fmt::Display for Label1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl Label2 {
    pub fn x(&self) -> usize {
        2 * (self.r - self.y) + 1
    }

    /// `c_1 < ... < c_t`, the arrows not used by the star.
    pub fn unused(&self) -> Vec<usize> {
        let mut used = self.m_star.clone();
        used.extend_from_slice(&self.n_star);
        complement(self.l, &used)
    }

    pub fn code(&self) -> String {
        let wide = self.l >= 9;
        format!("{}|{}", digits(&self.m_star, wide), digits(&self.n_star, wide))
    }
}

impl fmt::Display for Label2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

fn check_lr(l: usize, r: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::validation("l must be at least 1"));
    }
    if l < r {
        return Err(Error::validation(format!("l = {l} < r = {r}: the moduli space is empty")));
    }
    Ok(())
}

/// All first-kind labels with `m < n` and increasing star tuples.
pub fn enumerate_type1(l: usize, r: usize) -> Result<Vec<Label1>> {
    check_lr(l, r)?;
    let stars = subsets(l + 1, r);
    let mut out = Vec::new();
    for m in 1..=l + 1 {
        for n in m + 1..=l + 1 {
            for ms in stars.iter().filter(|s| !s.contains(&m)) {
                for ns in stars.iter().filter(|s| !s.contains(&n)) {
                    out.push(Label1 { l, r, m, m_star: ms.clone(), n, n_star: ns.clone() });
                }
            }
        }
    }
    Ok(out)
}

/// All second-kind labels, `y` from `max(0, 2r - l)` to `r - 1`.
pub fn enumerate_type2(l: usize, r: usize) -> Result<Vec<Label2>> {
    check_lr(l, r)?;
    let mut out = Vec::new();
    for y in (2 * r).saturating_sub(l)..r {
        let x = 2 * (r - y) + 1;
        if x + y > l + 1 {
            continue;
        }
        for ms in subsets(l + 1, x) {
            for ns in subsets(l + 1, y).into_iter().filter(|ns| ns.iter().all(|v| !ms.contains(v))) {
                out.push(Label2 { l, r, y, m_star: ms.clone(), n_star: ns });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

fn count<I: Iterator<Item = bool>>(it: I) -> i64 {
    it.filter(|&b| b).count() as i64
}

/// The eight-cardinality attractor formula with the comparison `lt`.
///
/// In the two mixed terms a complementary index may coincide with a star index
/// (`m_mu = n_nu`, resp. `n_mu = m_nu`). The character is then
/// `w_n - w_m` (resp. `w_m - w_n`) and the term is decided by comparing `n`
/// with `m` directly; `exact_mixed = false` keeps the min-comparison for
/// these coincidences as well.
fn d1_terms(label: &Label1, lt: impl Fn(usize, usize) -> bool, exact_mixed: bool) -> i64 {
    let (m, n) = (label.m, label.n);
    let mc = label.m_complement();
    let nc = label.n_complement();
    let ms = &label.m_star;
    let ns = &label.n_star;
    let pairs = |a: &[usize], b: &[usize]| {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for &x in a {
            for &y in b {
                out.push((x, y));
            }
        }
        out
    };
    -1 + count(ms.iter().map(|&v| lt(m, v)))
        + count(ns.iter().map(|&v| lt(n, v)))
        + count(mc.iter().map(|&v| lt(v, m)))
        + count(nc.iter().map(|&v| lt(v, n)))
        + count(pairs(&mc, ms).into_iter().map(|(a, b)| lt(a, b)))
        + count(pairs(&mc, ns).into_iter().map(
            |(a, b)| {
                if exact_mixed && a == b {
                    lt(n, m)
                } else {
                    lt(a.min(n), b.min(m))
                }
            },
        ))
        + count(pairs(&nc, ns).into_iter().map(|(a, b)| lt(a, b)))
        + count(pairs(&nc, ms).into_iter().map(
            |(a, b)| {
                if exact_mixed && a == b {
                    lt(m, n)
                } else {
                    lt(a.min(m), b.min(n))
                }
            },
        ))
}

/// `d_1^+` or `d_1^-` of a first-kind fixed point.
pub fn d1_attractor(label: &Label1, sign: Sign) -> u32 {
    let v = match sign {
        Sign::Plus => d1_terms(label, |a, b| a < b, true),
        Sign::Minus => d1_terms(label, |a, b| a > b, true),
    };
    u32::try_from(v).expect("attractor dimensions are nonnegative")
}

/// The eight-cardinality formula with min-comparisons throughout, including
/// coinciding indices in the mixed terms. It undercounts when `n_mu = m_nu`
/// for some pair (e.g. label `1232` of `K(3)`); kept for comparison.
pub fn d1_attractor_min_form(label: &Label1, sign: Sign) -> i64 {
    match sign {
        Sign::Plus => d1_terms(label, |a, b| a < b, false),
        Sign::Minus => d1_terms(label, |a, b| a > b, false),
    }
}

/// `d_2^+ = C(x,2) + 2#{m_mu < n_nu} + 2#{c_xi < m_mu} + 4#{c_xi < n_nu}`.
pub fn d2_attractor(label: &Label2) -> u32 {
    let x = label.x() as u64;
    let c = label.unused();
    let pairs = |a: &[usize], b: &[usize]| a.iter().map(|&p| b.iter().filter(|&&q| p < q).count() as u64).sum::<u64>();
    let value = binomial(x, 2)
        + 2 * pairs(&label.m_star, &label.n_star)
        + 2 * pairs(&c, &label.m_star)
        + 4 * pairs(&c, &label.n_star);
    value as u32
}

/// `P_X(t)` for `X = M^theta(K(l+1), (2, 2r+1))` from the closed forms.
pub fn kronecker_poincare(l: usize, r: usize) -> Result<PoincarePolynomial> {
    let mut total = PoincarePolynomial::zero();
    for label in enumerate_type1(l, r)? {
        total = total.add(&PoincarePolynomial::one().shifted(d1_attractor(&label, Sign::Plus) as usize));
    }
    for label in enumerate_type2(l, r)? {
        let fiber = kirwan_subspace_poincare(label.x())?;
        total = total.add(&fiber.shifted(d2_attractor(&label) as usize));
    }
    Ok(total)
}

/// The first-kind label whose attractor is open (`d_1^- = 0`); needs `r >= 1`.
pub fn generic_normal_form_label(l: usize, r: usize) -> Result<Label1> {
    check_lr(l, r)?;
    if r == 0 {
        return Err(Error::validation("r must be positive"));
    }
    let s = l - r;
    let mut n_star = vec![s + 1];
    n_star.extend(s + 3..=l + 1);
    Ok(Label1 { l, r, m: s + 1, m_star: (s + 2..=l + 1).collect(), n: s + 2, n_star })
}

/// `(2s+1)(2r+1) - 3`, the dimension of the moduli space.
pub fn kronecker_dimension(l: usize, r: usize) -> i64 {
    let s = (l - r) as i64;
    (2 * s + 1) * (2 * r as i64 + 1) - 3
}

/// Quiver, dimension vector, stability and generic weights of the family.
pub fn kronecker_setup(l: usize, r: usize) -> (Quiver, DimensionVector, StabilityCondition, WeightAssignment) {
    let q = Quiver::kronecker(l + 1);
    let w = WeightAssignment::generic_rank_one(&q);
    (q, DimensionVector(vec![2, 2 * r as u32 + 1]), StabilityCondition(vec![1, 0]), w)
}

/// Covering vector of a first-kind label: `(i,-w_m)`, `(i,-w_n)`, `(j,0)`,
/// `(j, w_{m_nu} - w_m)` and `(j, w_{n_nu} - w_n)`, each of dimension one.
pub fn label1_beta(label: &Label1, weights: &WeightAssignment) -> CoveringDimVector {
    let w = |k: usize| weights.scalar(k - 1);
    let mut entries = vec![(0, -w(label.m), 1), (0, -w(label.n), 1), (1, 0, 1)];
    entries.extend(label.m_star.iter().map(|&v| (1, w(v) - w(label.m), 1)));
    entries.extend(label.n_star.iter().map(|&v| (1, w(v) - w(label.n), 1)));
    CoveringDimVector::rank_one(entries)
}

/// Covering vector of a second-kind label: `(i,0)` of dimension two,
/// `(j, w_{m_mu})` of dimension one and `(j, w_{n_nu})` of dimension two.
pub fn label2_beta(label: &Label2, weights: &WeightAssignment) -> CoveringDimVector {
    let w = |k: usize| weights.scalar(k - 1);
    let mut entries = vec![(0, 0, 2)];
    entries.extend(label.m_star.iter().map(|&v| (1, w(v), 1)));
    entries.extend(label.n_star.iter().map(|&v| (1, w(v), 2)));
    CoveringDimVector::rank_one(entries)
}

/// The label whose covering vector is a shift of `beta`, if any.
pub fn label_of(l: usize, r: usize, weights: &WeightAssignment, beta: &CoveringDimVector) -> Result<Option<String>> {
    let target = canonicalize(beta)?;
    for label in enumerate_type1(l, r)? {
        if canonicalize(&label1_beta(&label, weights))? == target {
            return Ok(Some(label.code()));
        }
    }
    for label in enumerate_type2(l, r)? {
        if canonicalize(&label2_beta(&label, weights))? == target {
            return Ok(Some(label.code()));
        }
    }
    Ok(None)
}
