//! Small finite fields and their coordinate vector spaces.

use crate::error::{Error, Result};

/// `GF(q)` for a prime power `q = p^k` with `k <= 3`, elements `0..q`
/// encoded by base-`p` digits of polynomials over `GF(p)`.
#[derive(Debug, Clone)]
pub struct FiniteField {
    q: usize,
    p: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&p| q.is_multiple_of(p))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

fn digits(x: usize, p: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = x;
    for _ in 0..k {
        out.push(x % p);
        x /= p;
    }
    out
}

fn undigits(ds: &[usize], p: usize) -> usize {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl FiniteField {
    pub fn new(q: usize) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or_else(|| Error::validation(format!("{q} is not a prime power")))?;
        if k > 3 || q > 64 {
            return Err(Error::unsupported(format!("field size {q} is outside the supported range")));
        }
        let k = k as usize;
        // A monic polynomial of degree at most three without roots is irreducible.
        let modulus: Vec<usize> = if k == 1 {
            vec![0, 1]
        } else {
            (0..p.pow(k as u32))
                .map(|low| {
                    let mut c = digits(low, p, k);
                    c.push(1);
                    c
                })
                .find(|c| (0..p).all(|x| c.iter().rev().fold(0, |acc, &ci| (acc * x + ci) % p) != 0))
                .expect("an irreducible polynomial exists")
        };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a, p, k);
            for b in 0..q {
                let db = digits(b, p, k);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum, p) as u8;
                let mut prod = vec![0usize; 2 * k];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for top in (k..2 * k).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    for (s, m) in modulus.iter().enumerate() {
                        prod[top - k + s] = (prod[top - k + s] + (p - m) * c) % p;
                    }
                }
                mul[a * q + b] = undigits(&prod[..k], p) as u8;
            }
        }
        let neg = (0..q).map(|a| (0..q).find(|&b| add[a * q + b] == 0).expect("additive inverse") as u8).collect();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[a * q + b] == 1).expect("field") as u8 })
            .collect();
        Ok(FiniteField { q, p, add, mul, neg, inv })
    }

    pub fn size(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    /// Rank of a row-major matrix.
    pub fn rank(&self, rows: usize, cols: usize, entries: &[u8]) -> usize {
        let mut m = entries.to_vec();
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
                continue;
            };
            for c in 0..cols {
                m.swap(rank * cols + c, p * cols + c);
            }
            let inv = self.inv(m[rank * cols + col]);
            for c in 0..cols {
                m[rank * cols + c] = self.mul(m[rank * cols + c], inv);
            }
            for r in 0..rows {
                let f = m[r * cols + col];
                if r != rank && f != 0 {
                    for c in 0..cols {
                        let t = self.mul(f, m[rank * cols + c]);
                        m[r * cols + c] = self.sub(m[r * cols + c], t);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// A subspace of `GF(q)^n` as a membership bitset plus a basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub dim: usize,
    pub basis: Vec<u32>,
    pub members: Vec<u64>,
}

impl Subspace {
    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.members[(v >> 6) as usize] >> (v & 63) & 1 == 1
    }

    pub fn contains_all(&self, other: &[u64]) -> bool {
        self.members.iter().zip(other).all(|(a, b)| b & !a == 0)
    }
}

/// `GF(q)^n` with vectors encoded as base-`q` integers (coordinate `c` is digit `c`),
/// addition tables, and the catalog of all subspaces.
#[derive(Debug, Clone)]
pub struct VectorSpace {
    pub n: usize,
    pub size: usize,
    add: Vec<u32>,
    scale: Vec<u32>,
    coords: Vec<Vec<u8>>,
    pub subspaces: Vec<Subspace>,
}

/// Vector spaces beyond this many vectors are refused.
const MAX_VECTORS: usize = 4096;

impl VectorSpace {
    pub fn new(field: &FiniteField, n: usize) -> Result<Self> {
        let q = field.size();
        let size = q
            .checked_pow(n as u32)
            .filter(|&s| s <= MAX_VECTORS)
            .ok_or_else(|| Error::unsupported(format!("GF({q})^{n} is too large to enumerate")))?;
        let coords: Vec<Vec<u8>> = (0..size).map(|v| digits(v, q, n).into_iter().map(|d| d as u8).collect()).collect();
        let encode = |c: &[u8]| c.iter().rev().fold(0usize, |acc, &d| acc * q + d as usize) as u32;
        let mut add = vec![0u32; size * size];
        for a in 0..size {
            for b in 0..size {
                let s: Vec<u8> = coords[a].iter().zip(&coords[b]).map(|(&x, &y)| field.add(x, y)).collect();
                add[a * size + b] = encode(&s);
            }
        }
        let mut scale = vec![0u32; q * size];
        for c in 0..q {
            for v in 0..size {
                let s: Vec<u8> = coords[v].iter().map(|&x| field.mul(c as u8, x)).collect();
                scale[c * size + v] = encode(&s);
            }
        }
        let mut space = VectorSpace { n, size, add, scale, coords, subspaces: Vec::new() };
        space.subspaces = space.catalog(q);
        Ok(space)
    }

    #[inline]
    pub fn coords(&self, v: u32) -> &[u8] {
        &self.coords[v as usize]
    }

    pub fn encode(&self, q: usize, c: &[u8]) -> u32 {
        c.iter().rev().fold(0usize, |acc, &d| acc * q + d as usize) as u32
    }

    fn words(&self) -> usize {
        self.size.div_ceil(64)
    }

    /// Span of `gens` as a membership bitset and its dimension.
    pub fn span(&self, q: usize, gens: &[u32]) -> (Vec<u64>, usize) {
        let mut members = vec![0u64; self.words()];
        members[0] = 1;
        let mut list = vec![0u32];
        let mut dim = 0;
        for &g in gens {
            if members[(g >> 6) as usize] >> (g & 63) & 1 == 1 {
                continue;
            }
            dim += 1;
            let base = list.clone();
            for c in 1..q {
                let cg = self.scale[c * self.size + g as usize] as usize;
                for &s in &base {
                    let v = self.add[s as usize * self.size + cg];
                    members[(v >> 6) as usize] |= 1 << (v & 63);
                    list.push(v);
                }
            }
        }
        (members, dim)
    }

    fn catalog(&self, q: usize) -> Vec<Subspace> {
        let mut out = vec![Subspace { dim: 0, basis: Vec::new(), members: self.span(q, &[]).0 }];
        let mut seen = std::collections::HashSet::from([out[0].members.clone()]);
        let mut frontier = 0;
        while frontier < out.len() {
            let current = out[frontier].clone();
            frontier += 1;
            for v in 1..self.size as u32 {
                if current.contains(v) {
                    continue;
                }
                let mut basis = current.basis.clone();
                basis.push(v);
                let (members, dim) = self.span(q, &basis);
                if seen.insert(members.clone()) {
                    out.push(Subspace { dim, basis, members });
                }
            }
        }
        out.sort_by_key(|s| s.dim);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = FiniteField::new(q).unwrap();
            for a in 0..q as u8 {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q as u8 {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q as u8 {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
        assert!(FiniteField::new(6).is_err());
        assert!(FiniteField::new(1).is_err());
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        let f = FiniteField::new(2).unwrap();
        let v = VectorSpace::new(&f, 3).unwrap();
        let by_dim: Vec<usize> = (0..=3).map(|k| v.subspaces.iter().filter(|s| s.dim == k).count()).collect();
        assert_eq!(by_dim, vec![1, 7, 7, 1]);
        let f = FiniteField::new(3).unwrap();
        let v = VectorSpace::new(&f, 2).unwrap();
        assert_eq!(v.subspaces.len(), 1 + 4 + 1);
        let f = FiniteField::new(4).unwrap();
        let v = VectorSpace::new(&f, 2).unwrap();
        assert_eq!(v.subspaces.len(), 1 + 5 + 1);
    }

    #[test]
    fn ranks() {
        let f = FiniteField::new(2).unwrap();
        assert_eq!(f.rank(2, 2, &[1, 1, 1, 1]), 1);
        assert_eq!(f.rank(2, 2, &[1, 0, 1, 1]), 2);
        let f = FiniteField::new(3).unwrap();
        assert_eq!(f.rank(2, 2, &[1, 2, 2, 1]), 1);
    }
}
