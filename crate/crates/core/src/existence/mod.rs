//! Nonemptiness of stable loci, decided through generic subdimension vectors,
//! and brute-force point counts over finite fields.

mod count;
mod factor;
mod field;

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::quiver::{compare_slopes, is_coprime, DimensionVector, Quiver, StabilityCondition};

pub use count::{
    brute_force_stable_count, brute_force_stable_count_with, is_stable_over, p1_stable_configurations, pg_order,
    CountOptions, DEFAULT_BUDGET,
};
pub use field::{FiniteField, VectorSpace};

type SubdimKey = (Vec<u32>, Vec<u32>);

/// Memo table for `e -> d` generic-subdimension queries on one fixed quiver.
///
/// Keys are entry vectors in the quiver's vertex order. Inserts are
/// idempotent, so concurrent use only ever duplicates work.
#[derive(Debug, Default)]
pub struct SubdimMemo {
    cache: Mutex<HashMap<SubdimKey, bool>>,
}

impl SubdimMemo {
    pub fn new() -> Self {
        SubdimMemo::default()
    }

    pub fn len(&self) -> usize {
        self.cache.lock().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the generic representation of dimension `d` has a
    /// subrepresentation of dimension `e`.
    pub fn is_generic_subdimension(&self, quiver: &Quiver, e: &DimensionVector, d: &DimensionVector) -> Result<bool> {
        check_pair(quiver, e, d)?;
        Ok(self.lookup(quiver, &e.0, &d.0))
    }

    fn lookup(&self, quiver: &Quiver, e: &[u32], d: &[u32]) -> bool {
        if e.iter().all(|&x| x == 0) || e == d {
            return true;
        }
        let key = (e.to_vec(), d.to_vec());
        if let Some(&hit) = self.cache.lock().expect("memo lock").get(&key) {
            return hit;
        }
        let rest: Vec<u32> = d.iter().zip(e).map(|(a, b)| a - b).collect();
        // e itself is always a subdimension of e, so test it before recursing.
        let mut answer = quiver.euler_raw(e, &rest) >= 0;
        if answer {
            for sub in DimensionVector(e.to_vec()).sub_box() {
                if quiver.euler_raw(&sub.0, &rest) < 0 && self.lookup(quiver, &sub.0, e) {
                    answer = false;
                    break;
                }
            }
        }
        self.cache.lock().expect("memo lock").insert(key, answer);
        answer
    }
}

fn check_pair(quiver: &Quiver, e: &DimensionVector, d: &DimensionVector) -> Result<()> {
    if e.len() != quiver.vertex_count() || d.len() != quiver.vertex_count() {
        return Err(Error::validation("dimension vectors do not match the quiver"));
    }
    if !e.le(d) {
        return Err(Error::validation(format!("{e} is not componentwise below {d}")));
    }
    if !quiver.is_acyclic() {
        return Err(Error::unsupported("generic subdimension vectors are only computed for acyclic quivers"));
    }
    Ok(())
}

/// One-shot generic-subdimension query with a fresh memo.
pub fn is_generic_subdimension(quiver: &Quiver, e: &DimensionVector, d: &DimensionVector) -> Result<bool> {
    SubdimMemo::new().is_generic_subdimension(quiver, e, d)
}

/// Whether `M^{theta-st}(Q, d)` is nonempty, for coprime `(d, theta)`.
pub fn has_stable(quiver: &Quiver, d: &DimensionVector, theta: &StabilityCondition) -> Result<bool> {
    has_stable_with(&SubdimMemo::new(), quiver, d, theta)
}

pub fn has_stable_with(
    memo: &SubdimMemo,
    quiver: &Quiver,
    d: &DimensionVector,
    theta: &StabilityCondition,
) -> Result<bool> {
    if !quiver.is_acyclic() {
        return Err(Error::unsupported("stability is only decided for acyclic quivers"));
    }
    if !is_coprime(quiver, d, theta)? {
        return Err(Error::unsupported(format!(
            "{d} is not coprime for the given stability; semistable loci are not handled"
        )));
    }
    for e in d.sub_box() {
        if e.is_zero() || e == *d {
            continue;
        }
        if compare_slopes(theta, &e.0, &d.0).is_gt() && memo.lookup(quiver, &e.0, &d.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dv(x: &[u32]) -> DimensionVector {
        DimensionVector(x.to_vec())
    }

    fn star(leaves: &[u32]) -> (Quiver, DimensionVector, StabilityCondition) {
        let mut vertices = vec!["c".to_string()];
        let mut arrows = Vec::new();
        for k in 0..leaves.len() {
            vertices.push(format!("l{k}"));
            arrows.push((format!("a{k}"), "c".to_string(), format!("l{k}")));
        }
        let q = Quiver::new(vertices, arrows).unwrap();
        let mut d = vec![2];
        d.extend_from_slice(leaves);
        let mut theta = vec![1];
        theta.extend(leaves.iter().map(|_| 0));
        (q, DimensionVector(d), StabilityCondition(theta))
    }

    #[test]
    fn kronecker_two_subdimensions() {
        let k2 = Quiver::kronecker(2);
        assert!(is_generic_subdimension(&k2, &dv(&[0, 0]), &dv(&[1, 1])).unwrap());
        assert!(!is_generic_subdimension(&k2, &dv(&[1, 0]), &dv(&[1, 1])).unwrap());
        assert!(is_generic_subdimension(&k2, &dv(&[1, 1]), &dv(&[2, 2])).unwrap());
        assert!(is_generic_subdimension(&k2, &dv(&[0, 1]), &dv(&[1, 1])).unwrap());
        assert!(is_generic_subdimension(&k2, &dv(&[1, 1]), &dv(&[1, 1])).unwrap());
    }

    #[test]
    fn cyclic_quiver_is_refused() {
        let q = Quiver::new(
            ["x", "y"],
            [("a".to_string(), "x".to_string(), "y".to_string()), ("b".to_string(), "y".to_string(), "x".to_string())],
        )
        .unwrap();
        let err = is_generic_subdimension(&q, &dv(&[1, 0]), &dv(&[1, 1])).unwrap_err();
        assert_eq!(err.kind(), crate::error::ErrorKind::Unsupported);
    }

    #[test]
    fn stable_loci() {
        let k3 = Quiver::kronecker(3);
        let theta = StabilityCondition(vec![1, 0]);
        assert!(has_stable(&k3, &dv(&[2, 3]), &theta).unwrap());
        assert!(has_stable(&k3, &dv(&[1, 0]), &theta).unwrap());
        assert!(has_stable(&k3, &dv(&[0, 1]), &theta).unwrap());
        // (1,4) needs four independent images of a single vector.
        assert!(!has_stable(&k3, &dv(&[1, 4]), &theta).unwrap());
        let err = has_stable(&k3, &dv(&[2, 2]), &theta).unwrap_err();
        assert_eq!(err.kind(), crate::error::ErrorKind::Unsupported);
    }

    #[test]
    fn subspace_stars() {
        let (q, d, t) = star(&[1, 1, 1]);
        assert!(has_stable(&q, &d, &t).unwrap());
        // One leaf of dimension one and one of dimension two.
        let (q, d, t) = star(&[1, 2]);
        assert!(!has_stable(&q, &d, &t).unwrap());
        let (q, d, t) = star(&[1, 1, 1, 1, 1]);
        assert!(has_stable(&q, &d, &t).unwrap());
        let (q, d, t) = star(&[1, 1, 1, 2]);
        assert!(has_stable(&q, &d, &t).unwrap());
    }

    #[test]
    fn memo_matches_fresh_recomputation() {
        let k3 = Quiver::kronecker(3);
        let memo = SubdimMemo::new();
        let d = dv(&[3, 4]);
        let answers: Vec<bool> = d.sub_box().map(|e| memo.is_generic_subdimension(&k3, &e, &d).unwrap()).collect();
        assert!(!memo.is_empty());
        for (e, want) in d.sub_box().zip(answers) {
            assert_eq!(is_generic_subdimension(&k3, &e, &d).unwrap(), want);
        }
    }

    fn arb_quiver() -> impl Strategy<Value = Quiver> {
        // Arrows only go from lower to higher vertex index, so the quiver is acyclic.
        prop::collection::vec((0usize..3, 0usize..3), 0..5).prop_map(|pairs| {
            let arrows = pairs
                .into_iter()
                .filter(|(s, t)| s < t)
                .enumerate()
                .map(|(k, (s, t))| (format!("a{k}"), format!("v{s}"), format!("v{t}")));
            Quiver::new(["v0", "v1", "v2"], arrows).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn recursion_obligations_hold(q in arb_quiver(), d in prop::collection::vec(0u32..3, 3)) {
            let d = DimensionVector(d);
            let memo = SubdimMemo::new();
            for e in d.sub_box() {
                if memo.is_generic_subdimension(&q, &e, &d).unwrap() {
                    let rest = d.checked_sub(&e).unwrap();
                    for sub in e.sub_box() {
                        if is_generic_subdimension(&q, &sub, &e).unwrap() {
                            prop_assert!(q.euler_raw(&sub.0, &rest.0) >= 0);
                        }
                    }
                }
            }
        }

        #[test]
        fn stable_implies_nonnegative_dimension(
            q in arb_quiver(),
            d in prop::collection::vec(0u32..3, 3),
            theta in prop::collection::vec(-2i64..3, 3),
        ) {
            let d = DimensionVector(d);
            let theta = StabilityCondition(theta);
            prop_assume!(!d.is_zero());
            prop_assume!(is_coprime(&q, &d, &theta).unwrap());
            if has_stable(&q, &d, &theta).unwrap() {
                prop_assert!(1 - q.euler_raw(&d.0, &d.0) >= 0);
            }
        }
    }
}
