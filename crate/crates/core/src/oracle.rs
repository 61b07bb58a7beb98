//! Brute-force enumeration oracles for small subsets.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::subset_dp::{OptimalPath, SubsetSelection};
use crate::tsplib::Tour;

pub const ORACLE_CAP: usize = 10;

/// Advances `xs` to its next lexicographic permutation.
fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut k = xs.len() - 1;
    while k > 0 && xs[k - 1] >= xs[k] {
        k -= 1;
    }
    if k == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[k - 1] {
        j -= 1;
    }
    xs.swap(k - 1, j);
    xs[k..].reverse();
    true
}

/// Length of `seq` summed from its last vertex toward its first.
fn reverse_sum(inst: &Instance, seq: &[usize]) -> f64 {
    let mut acc = 0.0;
    for w in seq.windows(2).rev() {
        acc += inst.distance(w[1], w[0]);
    }
    acc
}

/// Best path from `u` to `v` over all orders of the middle vertices.
pub fn oracle_path(inst: &Instance, sel: &SubsetSelection, u: usize, v: usize) -> Result<OptimalPath> {
    if sel.i() > ORACLE_CAP {
        return Err(Error::OracleCapExceeded { size: sel.i(), cap: ORACLE_CAP });
    }
    if u == v {
        return Err(Error::EqualEndpoints(u));
    }
    for w in [u, v] {
        sel.local(w).ok_or(Error::EndpointNotInSelection(w))?;
    }
    let mut mid: Vec<usize> = sel.vertices().iter().copied().filter(|&x| x != u && x != v).collect();
    let mut seq = Vec::with_capacity(sel.i());
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        seq.clear();
        seq.push(u);
        seq.extend_from_slice(&mid);
        seq.push(v);
        let len = reverse_sum(inst, &seq);
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, seq.clone()));
        }
        if !next_permutation(&mut mid) {
            break;
        }
    }
    let (length, order) = best.expect("at least one order");
    Ok(OptimalPath { endpoints: (u, v), order, length })
}

/// Best cycle starting at the smallest vertex, over all orders of the rest.
pub fn oracle_cycle(inst: &Instance, sel: &SubsetSelection) -> Result<Tour> {
    if sel.i() > ORACLE_CAP {
        return Err(Error::OracleCapExceeded { size: sel.i(), cap: ORACLE_CAP });
    }
    let root = sel.vertices()[0];
    let mut rest: Vec<usize> = sel.vertices()[1..].to_vec();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        // walk root <- rest[last] <- ... <- rest[0], then close rest[0] -> root
        let mut acc = inst.distance(root, *rest.last().unwrap());
        for w in rest.windows(2).rev() {
            acc += inst.distance(w[1], w[0]);
        }
        acc += inst.distance(rest[0], root);
        if best.as_ref().is_none_or(|(b, _)| acc < *b) {
            let mut order = vec![root];
            order.extend_from_slice(&rest);
            best = Some((acc, order));
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    let (length, order) = best.expect("at least one order");
    Ok(Tour { order, length })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_random, WeightModel};
    use crate::subset_dp::{all_op_paths, ohc, op_path};

    #[test]
    fn permutations_in_order() {
        let mut xs = vec![0, 1, 2];
        let mut seen = vec![xs.clone()];
        while next_permutation(&mut xs) {
            seen.push(xs.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }

    #[test]
    fn square_agrees_with_dp() {
        let sq = Instance::from_coords(WeightModel::Euc2d, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
            .unwrap();
        let sel = SubsetSelection::full(&sq);
        for (u, v) in crate::instance::edges(4) {
            assert_eq!(oracle_path(&sq, &sel, u, v).unwrap(), op_path(&sq, &sel, u, v).unwrap());
        }
        assert_eq!(oracle_cycle(&sq, &sel).unwrap(), ohc(&sq, &sel).unwrap());
    }

    #[test]
    fn random_k6_agrees_with_dp() {
        let inst = gen_random(6, 17).unwrap();
        let sel = SubsetSelection::full(&inst);
        for p in all_op_paths(&inst, &sel).unwrap() {
            assert_eq!(oracle_path(&inst, &sel, p.endpoints.0, p.endpoints.1).unwrap(), p);
        }
    }

    #[test]
    fn cap_rejects_eleven() {
        let inst = gen_random(11, 0).unwrap();
        let sel = SubsetSelection::full(&inst);
        assert!(matches!(oracle_path(&inst, &sel, 0, 1), Err(Error::OracleCapExceeded { .. })));
        assert!(matches!(oracle_cycle(&inst, &sel), Err(Error::OracleCapExceeded { .. })));
    }
}
