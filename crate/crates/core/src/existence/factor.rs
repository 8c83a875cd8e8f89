//! Point counts with the arrows into each sink enumerated separately.
//!
//! A sink only enters the subrepresentation search through the dimension of
//! the span of the images of the chosen upstream subspaces, so each sink
//! contributes a profile (one span dimension per upstream choice) and the
//! count over all representations is a weighted sum over profile tuples.

use std::collections::HashMap;

use super::field::{FiniteField, VectorSpace};
use crate::error::Result;
use crate::quiver::{Quiver, StabilityCondition};

const MAX_STATES: usize = 1 << 14;

struct Sink {
    c: i64,
    dim: usize,
    /// Positions in `upstream` of the sources of the incoming arrows.
    neighbours: Vec<usize>,
    /// `(profile, multiplicity)`; a profile gives the span dimension for each
    /// tuple of subspaces at the neighbours (mixed radix, first neighbour
    /// fastest).
    profiles: Vec<(Vec<u8>, u128)>,
    assignments: u128,
}

fn rank_of(space: &VectorSpace, q: usize, gens: &[u32]) -> usize {
    space.span(q, gens).1
}

fn mat_vec(field: &FiniteField, block: &[u8], rows: usize, cols: usize, x: &[u8], out: &mut Vec<u8>) {
    out.clear();
    for r in 0..rows {
        let mut acc = 0u8;
        for (c, &xc) in x.iter().enumerate().take(cols) {
            if xc != 0 {
                acc = field.add(acc, field.mul(block[r * cols + c], xc));
            }
        }
        out.push(acc);
    }
}

fn odometer(digits: &mut [u8], q: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if (*d as usize) < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// Stable representations over `GF(q)` (not divided by the group order), or
/// `None` when the enumeration would exceed `budget`.
pub(super) fn count_stable(
    field: &FiniteField,
    quiver: &Quiver,
    d: &[u32],
    theta: &StabilityCondition,
    budget: u128,
) -> Result<Option<u128>> {
    let q = field.size();
    let n = quiver.vertex_count();
    let total: i64 = d.iter().map(|&x| x as i64).sum();
    let td = theta.evaluate(d);
    let c: Vec<i64> = theta.0.iter().map(|&t| t * total - td).collect();
    let dims: Vec<usize> = d.iter().map(|&x| x as usize).collect();
    let max_dim = dims.iter().copied().max().unwrap_or(0);
    let spaces = (0..=max_dim).map(|k| VectorSpace::new(field, k)).collect::<Result<Vec<_>>>()?;

    let mut is_sink = vec![true; n];
    for a in quiver.arrows() {
        is_sink[a.source] = false;
    }
    let upstream: Vec<usize> = (0..n).filter(|&v| !is_sink[v]).collect();
    let position = |v: usize| upstream.iter().position(|&u| u == v);
    let catalogs: Vec<usize> = upstream.iter().map(|&v| spaces[dims[v]].subspaces.len()).collect();
    let states = catalogs.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k).filter(|&s| s <= MAX_STATES));
    let Some(states) = states else { return Ok(None) };

    let core: Vec<usize> = (0..quiver.arrow_count()).filter(|&a| !is_sink[quiver.arrows()[a].target]).collect();
    let core_entries: usize = core
        .iter()
        .map(|&a| {
            let arrow = &quiver.arrows()[a];
            dims[arrow.source] * dims[arrow.target]
        })
        .sum();
    let core_reps = (q as u128).checked_pow(core_entries as u32);
    let mut work = match core_reps.and_then(|r| r.checked_mul(states as u128)) {
        Some(w) if w <= budget => w,
        _ => return Ok(None),
    };

    let mut sinks = Vec::new();
    let mut buf = Vec::new();
    for s in (0..n).filter(|&v| is_sink[v] && dims[v] > 0) {
        let incoming: Vec<usize> = (0..quiver.arrow_count()).filter(|&a| quiver.arrows()[a].target == s).collect();
        let mut neighbours: Vec<usize> = Vec::new();
        for &a in &incoming {
            let p = position(quiver.arrows()[a].source).expect("sources are upstream");
            if !neighbours.contains(&p) {
                neighbours.push(p);
            }
        }
        let entries: usize = incoming.iter().map(|&a| dims[quiver.arrows()[a].source] * dims[s]).sum();
        let assignments = (q as u128).checked_pow(entries as u32).unwrap_or(u128::MAX);
        if c[s] > 0 || incoming.is_empty() {
            sinks.push(Sink { c: c[s], dim: dims[s], neighbours: Vec::new(), profiles: Vec::new(), assignments });
            continue;
        }
        let tuples: usize = neighbours.iter().map(|&p| catalogs[p]).product();
        work = match assignments.checked_mul(tuples as u128).and_then(|a| a.checked_add(work)) {
            Some(w) if w <= budget => w,
            _ => return Ok(None),
        };
        let mut counts: HashMap<Vec<u8>, u128> = HashMap::new();
        let mut digits = vec![0u8; entries];
        loop {
            let mut profile = Vec::with_capacity(tuples);
            for t in 0..tuples {
                let mut rest = t;
                let mut chosen = vec![0usize; neighbours.len()];
                for (k, &p) in neighbours.iter().enumerate() {
                    chosen[k] = rest % catalogs[p];
                    rest /= catalogs[p];
                }
                let mut gens = Vec::new();
                let mut offset = 0;
                for &a in &incoming {
                    let src = quiver.arrows()[a].source;
                    let ds = dims[src];
                    let k = neighbours.iter().position(|&p| upstream[p] == src).expect("neighbour");
                    let block = &digits[offset..offset + ds * dims[s]];
                    for &b in &spaces[ds].subspaces[chosen[k]].basis {
                        mat_vec(field, block, dims[s], ds, spaces[ds].coords(b), &mut buf);
                        gens.push(spaces[dims[s]].encode(q, &buf));
                    }
                    offset += ds * dims[s];
                }
                profile.push(rank_of(&spaces[dims[s]], q, &gens) as u8);
            }
            *counts.entry(profile).or_insert(0) += 1;
            if !odometer(&mut digits, q) {
                break;
            }
        }
        let mut profiles: Vec<(Vec<u8>, u128)> = counts.into_iter().collect();
        profiles.sort();
        sinks.push(Sink { c: c[s], dim: dims[s], neighbours, profiles, assignments });
    }
    // Constant contributions first.
    sinks.sort_by_key(|s| !s.profiles.is_empty());
    let constant: i64 = sinks.iter().filter(|s| s.profiles.is_empty()).map(|s| s.c.max(0) * s.dim as i64).sum();
    let free: u128 = sinks.iter().filter(|s| s.profiles.is_empty()).map(|s| s.assignments).product();
    let varying: Vec<&Sink> = sinks.iter().filter(|s| !s.profiles.is_empty()).collect();
    let mut suffix = vec![1u128; varying.len() + 1];
    for k in (0..varying.len()).rev() {
        suffix[k] = suffix[k + 1] * varying[k].assignments;
    }

    let mut core_digits = vec![0u8; core_entries];
    let mut stable = 0u128;
    loop {
        // Subrepresentations of the upstream part.
        let mut acc = Vec::new();
        let mut tuple_index: Vec<Vec<usize>> = Vec::new();
        for st in 0..states {
            let mut rest = st;
            let chosen: Vec<usize> = catalogs
                .iter()
                .map(|&k| {
                    let x = rest % k;
                    rest /= k;
                    x
                })
                .collect();
            let mut ok = true;
            let mut offset = 0;
            for &a in &core {
                let arrow = &quiver.arrows()[a];
                let (ds, dt) = (dims[arrow.source], dims[arrow.target]);
                let (ps, pt) = (position(arrow.source).expect("upstream"), position(arrow.target).expect("upstream"));
                let block = &core_digits[offset..offset + ds * dt];
                offset += ds * dt;
                let target = &spaces[dt].subspaces[chosen[pt]];
                for &b in &spaces[ds].subspaces[chosen[ps]].basis {
                    mat_vec(field, block, dt, ds, spaces[ds].coords(b), &mut buf);
                    if !target.contains(spaces[dt].encode(q, &buf)) {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                continue;
            }
            let f: i64 =
                upstream.iter().zip(&chosen).map(|(&v, &i)| c[v] * spaces[dims[v]].subspaces[i].dim as i64).sum();
            acc.push(f + constant);
            tuple_index.push(
                varying
                    .iter()
                    .map(|s| {
                        let mut t = 0;
                        for &p in s.neighbours.iter().rev() {
                            t = t * catalogs[p] + chosen[p];
                        }
                        t
                    })
                    .collect(),
            );
        }
        stable += free * combine(&varying, &tuple_index, &suffix, 0, &mut acc);
        if !odometer(&mut core_digits, q) {
            break;
        }
    }
    Ok(Some(stable))
}

/// Weighted number of profile tuples for sinks `k..` keeping every state
/// at a nonpositive value. `acc` is restored before returning.
fn combine(sinks: &[&Sink], tuple_index: &[Vec<usize>], suffix: &[u128], k: usize, acc: &mut [i64]) -> u128 {
    if acc.iter().all(|&x| x <= 0) {
        return suffix[k];
    }
    if k == sinks.len() {
        return 0;
    }
    let sink = sinks[k];
    let mut total = 0u128;
    for (profile, mult) in &sink.profiles {
        for (st, a) in acc.iter_mut().enumerate() {
            *a += sink.c * profile[tuple_index[st][k]] as i64;
        }
        total += mult * combine(sinks, tuple_index, suffix, k + 1, acc);
        for (st, a) in acc.iter_mut().enumerate() {
            *a -= sink.c * profile[tuple_index[st][k]] as i64;
        }
    }
    total
}
