//! Point counts of moduli spaces over finite fields by exhaustive search.

use rayon::prelude::*;

use super::field::{FiniteField, VectorSpace};
use crate::error::{Error, Result};
use crate::quiver::{is_coprime, DimensionVector, Quiver, StabilityCondition};

/// Default cap on the number of representations enumerated.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub budget: u128,
    /// Use the rank criterion for Kronecker shapes `(2, 2r+1)` instead of the
    /// general subrepresentation search.
    pub kronecker_shortcut: bool,
    /// Enumerate the arrows into each sink separately when that is smaller.
    pub factorize: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { budget: DEFAULT_BUDGET, kronecker_shortcut: true, factorize: true }
    }
}

/// `|GL_n(F_q)|`.
fn gl_order(q: u128, n: u32) -> u128 {
    let qn = q.pow(n);
    (0..n).map(|k| qn - q.pow(k)).product()
}

/// `|PG_d(F_q)| = prod_i |GL_{d_i}(F_q)| / (q - 1)`.
pub fn pg_order(q: u128, d: &DimensionVector) -> u128 {
    d.entries().iter().map(|&n| gl_order(q, n)).product::<u128>() / (q - 1)
}

struct Layout {
    /// `(source, target, offset)` per arrow; blocks are `d_t x d_s`, row-major.
    blocks: Vec<(usize, usize, usize)>,
    entries: usize,
}

impl Layout {
    fn new(quiver: &Quiver, d: &[u32]) -> Self {
        let mut offset = 0;
        let blocks = quiver
            .arrows()
            .iter()
            .map(|a| {
                let here = offset;
                offset += (d[a.source] * d[a.target]) as usize;
                (a.source, a.target, here)
            })
            .collect();
        Layout { blocks, entries: offset }
    }
}

enum Criterion {
    Search(Box<Search>),
    Kronecker { source: usize, target: usize, r: usize },
}

/// Subrepresentation search maximizing `f(e) = sum_v c_v e_v` with
/// `c_v = theta_v |d| - theta(d)`; a representation is unstable iff the
/// maximum is positive.
struct Search {
    q: usize,
    d: Vec<usize>,
    order: Vec<usize>,
    spaces: Vec<VectorSpace>,
    c: Vec<i64>,
    incoming: Vec<Vec<usize>>,
    sink: Vec<bool>,
    tail: Vec<i64>,
}

impl Search {
    fn new(field: &FiniteField, quiver: &Quiver, d: &[u32], theta: &StabilityCondition) -> Result<Self> {
        let order =
            quiver.topological_order().ok_or_else(|| Error::unsupported("point counts need an acyclic quiver"))?;
        let total: i64 = d.iter().map(|&x| x as i64).sum();
        let td = theta.evaluate(d);
        let c: Vec<i64> = theta.0.iter().map(|&t| t * total - td).collect();
        let max_dim = d.iter().copied().max().unwrap_or(0) as usize;
        let spaces = (0..=max_dim).map(|n| VectorSpace::new(field, n)).collect::<Result<Vec<_>>>()?;
        let n = quiver.vertex_count();
        let mut incoming = vec![Vec::new(); n];
        let mut sink = vec![true; n];
        for (idx, a) in quiver.arrows().iter().enumerate() {
            incoming[a.target].push(idx);
            sink[a.source] = false;
        }
        let mut tail = vec![0i64; order.len() + 1];
        for pos in (0..order.len()).rev() {
            let v = order[pos];
            tail[pos] = tail[pos + 1] + c[v].max(0) * d[v] as i64;
        }
        Ok(Search {
            q: field.size(),
            d: d.iter().map(|&x| x as usize).collect(),
            order,
            spaces,
            c,
            incoming,
            sink,
            tail,
        })
    }

    fn image(&self, field: &FiniteField, layout: &Layout, flat: &[u8], arrow: usize, v: u32) -> u32 {
        let (s, t, off) = layout.blocks[arrow];
        let (ds, dt) = (self.d[s], self.d[t]);
        let x = self.spaces[ds].coords(v);
        let mut y = vec![0u8; dt];
        for (row, out) in y.iter_mut().enumerate() {
            let mut acc = 0u8;
            for (col, &xc) in x.iter().enumerate() {
                if xc != 0 {
                    acc = field.add(acc, field.mul(flat[off + row * ds + col], xc));
                }
            }
            *out = acc;
        }
        self.spaces[dt].encode(self.q, &y)
    }

    fn unstable(&self, field: &FiniteField, layout: &Layout, flat: &[u8]) -> bool {
        let mut chosen = vec![0usize; self.d.len()];
        self.descend(field, layout, flat, 0, 0, &mut chosen)
    }

    fn descend(
        &self,
        field: &FiniteField,
        layout: &Layout,
        flat: &[u8],
        pos: usize,
        acc: i64,
        chosen: &mut [usize],
    ) -> bool {
        if pos == self.order.len() {
            return acc > 0;
        }
        if acc + self.tail[pos] <= 0 {
            return false;
        }
        let v = self.order[pos];
        let space = &self.spaces[self.d[v]];
        let mut gens = Vec::new();
        for &a in &self.incoming[v] {
            let s = layout.blocks[a].0;
            for &b in &self.spaces[self.d[s]].subspaces[chosen[s]].basis {
                gens.push(self.image(field, layout, flat, a, b));
            }
        }
        let (required, dim) = space.span(self.q, &gens);
        if self.sink[v] {
            // Nothing downstream depends on a sink, so take the best choice.
            let k = if self.c[v] > 0 { self.d[v] } else { dim };
            return self.descend(field, layout, flat, pos + 1, acc + self.c[v] * k as i64, chosen);
        }
        for (idx, sub) in space.subspaces.iter().enumerate() {
            if sub.dim < dim || !sub.contains_all(&required) {
                continue;
            }
            chosen[v] = idx;
            if self.descend(field, layout, flat, pos + 1, acc + self.c[v] * sub.dim as i64, chosen) {
                return true;
            }
        }
        false
    }
}

fn kronecker_shape(quiver: &Quiver, d: &[u32], theta: &StabilityCondition) -> Option<(usize, usize, usize)> {
    if quiver.vertex_count() != 2 || quiver.arrow_count() == 0 {
        return None;
    }
    let first = &quiver.arrows()[0];
    let (s, t) = (first.source, first.target);
    if s == t || quiver.arrows().iter().any(|a| a.source != s || a.target != t) {
        return None;
    }
    (d[s] == 2 && d[t] % 2 == 1 && theta.0[s] > theta.0[t]).then(|| (s, t, (d[t] as usize - 1) / 2))
}

fn kronecker_stable(field: &FiniteField, layout: &Layout, flat: &[u8], dt: usize, r: usize) -> bool {
    let m = layout.blocks.len();
    // All images together must span the target.
    let mut wide = vec![0u8; dt * 2 * m];
    for (k, &(_, _, off)) in layout.blocks.iter().enumerate() {
        for row in 0..dt {
            for col in 0..2 {
                wide[row * 2 * m + 2 * k + col] = flat[off + row * 2 + col];
            }
        }
    }
    if field.rank(dt, 2 * m, &wide) < dt {
        return false;
    }
    let q = field.size() as u8;
    let points = (0..q).map(|t| [1u8, t]).chain(std::iter::once([0u8, 1]));
    let mut cols = vec![0u8; dt * m];
    for x in points {
        for (k, &(_, _, off)) in layout.blocks.iter().enumerate() {
            for row in 0..dt {
                let a = field.mul(flat[off + row * 2], x[0]);
                let b = field.mul(flat[off + row * 2 + 1], x[1]);
                cols[row * m + k] = field.add(a, b);
            }
        }
        if field.rank(dt, m, &cols) < r + 1 {
            return false;
        }
    }
    true
}

fn build_criterion(
    field: &FiniteField,
    quiver: &Quiver,
    d: &[u32],
    theta: &StabilityCondition,
    opts: &CountOptions,
) -> Result<Criterion> {
    if opts.kronecker_shortcut {
        if let Some((source, target, r)) = kronecker_shape(quiver, d, theta) {
            return Ok(Criterion::Kronecker { source, target, r });
        }
    }
    Ok(Criterion::Search(Box::new(Search::new(field, quiver, d, theta)?)))
}

impl Criterion {
    fn stable(&self, field: &FiniteField, layout: &Layout, flat: &[u8], d: &[u32]) -> bool {
        match self {
            Criterion::Search(s) => !s.unstable(field, layout, flat),
            Criterion::Kronecker { source, target, r } => {
                debug_assert_eq!(d[*source], 2);
                kronecker_stable(field, layout, flat, d[*target] as usize, *r)
            }
        }
    }
}

fn validate(quiver: &Quiver, d: &DimensionVector, theta: &StabilityCondition) -> Result<()> {
    if !is_coprime(quiver, d, theta)? {
        return Err(Error::unsupported(format!("{d} is not coprime for the given stability")));
    }
    Ok(())
}

/// Whether a concrete representation over `GF(q)` is stable. `blocks[a]` is
/// the row-major `d_t x d_s` matrix of arrow `a`.
pub fn is_stable_over(
    field: &FiniteField,
    quiver: &Quiver,
    d: &DimensionVector,
    theta: &StabilityCondition,
    blocks: &[Vec<u8>],
) -> Result<bool> {
    validate(quiver, d, theta)?;
    let layout = Layout::new(quiver, d.entries());
    if blocks.len() != quiver.arrow_count() {
        return Err(Error::validation("one matrix per arrow is required"));
    }
    let mut flat = Vec::with_capacity(layout.entries);
    for (block, a) in blocks.iter().zip(quiver.arrows()) {
        let want = (d.entries()[a.source] * d.entries()[a.target]) as usize;
        if block.len() != want || block.iter().any(|&x| x as usize >= field.size()) {
            return Err(Error::validation(format!("bad matrix for arrow `{}`", a.name)));
        }
        flat.extend_from_slice(block);
    }
    let criterion = build_criterion(field, quiver, d.entries(), theta, &CountOptions::default())?;
    Ok(criterion.stable(field, &layout, &flat, d.entries()))
}

/// Exact `|M^theta(Q, d)(F_q)|` with default options.
pub fn brute_force_stable_count(
    quiver: &Quiver,
    d: &DimensionVector,
    theta: &StabilityCondition,
    q: usize,
) -> Result<u128> {
    brute_force_stable_count_with(quiver, d, theta, q, &CountOptions::default())
}

/// Counts stable representations over `GF(q)` and divides by `|PG_d(F_q)|`.
pub fn brute_force_stable_count_with(
    quiver: &Quiver,
    d: &DimensionVector,
    theta: &StabilityCondition,
    q: usize,
    opts: &CountOptions,
) -> Result<u128> {
    validate(quiver, d, theta)?;
    let field = FiniteField::new(q)?;
    let layout = Layout::new(quiver, d.entries());
    let criterion = build_criterion(&field, quiver, d.entries(), theta, opts)?;
    if opts.factorize && matches!(criterion, Criterion::Search(_)) {
        if let Some(stable) = super::factor::count_stable(&field, quiver, d.entries(), theta, opts.budget)? {
            return divide(stable, q, d);
        }
    }
    let needed = (q as u128).checked_pow(layout.entries as u32).unwrap_or(u128::MAX);
    if needed > opts.budget {
        return Err(Error::BudgetExceeded { needed, budget: opts.budget });
    }

    // Split on a prefix of entries and sweep the remaining ones with an odometer.
    let mut prefix_len = 0;
    while prefix_len < layout.entries && (q as u128).pow(prefix_len as u32) < 256 {
        prefix_len += 1;
    }
    let prefixes = q.pow(prefix_len as u32);
    let stable: u128 = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut flat = vec![0u8; layout.entries];
            let mut x = p;
            for slot in flat.iter_mut().take(prefix_len) {
                *slot = (x % q) as u8;
                x /= q;
            }
            let mut count = 0u128;
            loop {
                if criterion.stable(&field, &layout, &flat, d.entries()) {
                    count += 1;
                }
                let mut pos = prefix_len;
                loop {
                    if pos == layout.entries {
                        return count;
                    }
                    flat[pos] += 1;
                    if (flat[pos] as usize) < q {
                        break;
                    }
                    flat[pos] = 0;
                    pos += 1;
                }
            }
        })
        .sum();
    divide(stable, q, d)
}

fn divide(stable: u128, q: usize, d: &DimensionVector) -> Result<u128> {
    let group = pg_order(q as u128, d);
    if !stable.is_multiple_of(group) {
        return Err(Error::inconsistency(format!(
            "{stable} stable representations over GF({q}) is not a multiple of |PG_d| = {group}"
        )));
    }
    Ok(stable / group)
}

/// `|((P^1)^x)^{st} / PGL_2 (F_q)|` for odd `x >= 3`: ordered `x`-tuples of
/// points of the projective line with no point of multiplicity above
/// `floor(x/2)`, divided by `|PGL_2(F_q)| = q^3 - q` (the action is free).
pub fn p1_stable_configurations(x: usize, q: usize) -> Result<u128> {
    if x < 3 || x.is_multiple_of(2) {
        return Err(Error::validation(format!("x = {x} must be odd and at least 3")));
    }
    FiniteField::new(q)?;
    let h = x / 2;
    let mut binom = vec![vec![0u128; x + 1]; x + 1];
    for n in 0..=x {
        binom[n][0] = 1;
        for k in 1..=n {
            binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0 };
        }
    }
    // ways[j]: labelled placements of j of the x positions on the points seen so far.
    let mut ways = vec![0u128; x + 1];
    ways[0] = 1;
    for _ in 0..=q {
        let mut next = vec![0u128; x + 1];
        for j in 0..=x {
            if ways[j] == 0 {
                continue;
            }
            for k in 0..=h.min(x - j) {
                next[j + k] += ways[j] * binom[j + k][k];
            }
        }
        ways = next;
    }
    let q = q as u128;
    let group = q * q * q - q;
    if !ways[x].is_multiple_of(group) {
        return Err(Error::inconsistency("configuration count is not a multiple of |PGL_2|"));
    }
    Ok(ways[x] / group)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(x: &[u32]) -> DimensionVector {
        DimensionVector(x.to_vec())
    }

    #[test]
    fn group_orders() {
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(2, 3), 168);
        assert_eq!(pg_order(2, &dv(&[2, 3])), 1008);
        assert_eq!(pg_order(3, &dv(&[1, 0])), 1);
    }

    #[test]
    fn unit_vectors_count_one_point() {
        let k3 = Quiver::kronecker(3);
        for q in [2, 3, 4, 5] {
            let n = brute_force_stable_count(&k3, &dv(&[1, 0]), &StabilityCondition(vec![1, 0]), q).unwrap();
            assert_eq!(n, 1);
        }
    }

    #[test]
    fn kronecker_line_counts() {
        // K(2), d = (1,1): stable iff the pair of scalars is nonzero, giving P^1.
        let k2 = Quiver::kronecker(2);
        for q in [2, 3, 5] {
            let n = brute_force_stable_count(&k2, &dv(&[1, 1]), &StabilityCondition(vec![1, 0]), q).unwrap();
            assert_eq!(n, q as u128 + 1);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let k3 = Quiver::kronecker(3);
        let opts = CountOptions { budget: 1000, ..CountOptions::default() };
        let err =
            brute_force_stable_count_with(&k3, &dv(&[2, 3]), &StabilityCondition(vec![1, 0]), 2, &opts).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn non_coprime_is_unsupported() {
        let k3 = Quiver::kronecker(3);
        let err = brute_force_stable_count(&k3, &dv(&[2, 2]), &StabilityCondition(vec![1, 0]), 2).unwrap_err();
        assert_eq!(err.kind(), crate::error::ErrorKind::Unsupported);
    }

    #[test]
    fn kronecker_shortcut_agrees_with_search() {
        let theta = StabilityCondition(vec![1, 0]);
        for (arrows, d) in [(2, [2u32, 1]), (2, [2, 3]), (3, [2, 1]), (3, [2, 3])] {
            let k = Quiver::kronecker(arrows);
            let d = dv(&d);
            let on = brute_force_stable_count_with(&k, &d, &theta, 2, &CountOptions::default()).unwrap();
            let off = CountOptions { kronecker_shortcut: false, ..CountOptions::default() };
            let factored = brute_force_stable_count_with(&k, &d, &theta, 2, &off).unwrap();
            let plain = CountOptions { factorize: false, ..off };
            let plain = brute_force_stable_count_with(&k, &d, &theta, 2, &plain).unwrap();
            assert_eq!(on, factored, "K({arrows}), d = {d}");
            assert_eq!(on, plain, "K({arrows}), d = {d}");
        }
    }

    #[test]
    fn factorized_count_agrees_with_search() {
        let q = Quiver::new(
            ["a", "b", "c"],
            [
                ("x".to_string(), "a".to_string(), "b".to_string()),
                ("y".to_string(), "a".to_string(), "b".to_string()),
                ("z".to_string(), "b".to_string(), "c".to_string()),
                ("u".to_string(), "a".to_string(), "c".to_string()),
            ],
        )
        .unwrap();
        let plain = CountOptions { factorize: false, ..CountOptions::default() };
        let mut checked = 0;
        for d in [[1u32, 1, 1], [1, 2, 1], [2, 1, 1], [1, 1, 2]] {
            for theta in [[3i64, 1, 0], [2, 0, -1], [5, 2, -3]] {
                let (d, theta) = (dv(&d), StabilityCondition(theta.to_vec()));
                if !is_coprime(&q, &d, &theta).unwrap() {
                    continue;
                }
                for field in [2, 3] {
                    let a = brute_force_stable_count(&q, &d, &theta, field).unwrap();
                    let b = brute_force_stable_count_with(&q, &d, &theta, field, &plain).unwrap();
                    assert_eq!(a, b, "d = {d}, theta = {theta:?}, q = {field}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 8);
    }

    #[test]
    fn small_configuration_counts() {
        // Three distinct points on P^1 up to PGL_2: exactly one orbit.
        for q in [2, 3, 4, 5] {
            assert_eq!(p1_stable_configurations(3, q).unwrap(), 1);
        }
        assert!(p1_stable_configurations(4, 2).is_err());
    }
}
