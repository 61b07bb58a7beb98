//! Exact subset dynamic programming for fixed-endpoint Hamiltonian paths and
//! Hamiltonian cycles on vertex subsets.
//!
//! Ties are broken toward the lexicographically smallest vertex sequence. A
//! path from `u` to `v` is measured by summing edges from the `v` end, which is
//! the order the table accumulates them in; the brute-force oracles use the
//! same order so lengths agree bit for bit.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tsplib::Tour;

pub const DEFAULT_CAP: usize = 22;

/// A sorted set of distinct vertices of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetSelection {
    vertices: Vec<usize>,
}

impl SubsetSelection {
    pub fn new(inst: &Instance, mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSelection("repeated vertex".into()));
        }
        if let Some(&v) = vertices.last() {
            if v >= inst.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: inst.n() });
            }
        }
        if vertices.len() < 4 {
            return Err(Error::InvalidSelection(format!("size {} is below 4", vertices.len())));
        }
        Ok(SubsetSelection { vertices })
    }

    pub fn full(inst: &Instance) -> Self {
        SubsetSelection { vertices: (0..inst.n()).collect() }
    }

    /// Skips validation; `vertices` must be sorted, distinct and in range.
    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        SubsetSelection { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn i(&self) -> usize {
        self.vertices.len()
    }

    pub fn local(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalPath {
    /// `(u, v)` with the path running from `u` to `v`.
    pub endpoints: (usize, usize),
    pub order: Vec<usize>,
    pub length: f64,
}

impl OptimalPath {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

/// Subset DP engine with reusable scratch space.
///
/// One engine per worker thread avoids reallocating the `2^(i-1) * (i-1)` table.
#[derive(Debug, Clone)]
pub struct SubsetDp {
    cap: usize,
    dist: Vec<f64>,
    table: Vec<f64>,
}

impl Default for SubsetDp {
    fn default() -> Self {
        SubsetDp::new(DEFAULT_CAP)
    }
}

/// Local bookkeeping for one sweep anchored at `anchor`.
struct Sweep {
    anchor: usize,
    /// Local ids of the other `i - 1` vertices; bit `k` of a mask is `others[k]`.
    others: Vec<usize>,
}

impl Sweep {
    fn new(i: usize, anchor: usize) -> Self {
        Sweep { anchor, others: (0..i).filter(|&x| x != anchor).collect() }
    }

    fn bit(&self, local: usize) -> usize {
        if local < self.anchor {
            local
        } else {
            local - 1
        }
    }
}

impl SubsetDp {
    pub fn new(cap: usize) -> Self {
        SubsetDp { cap, dist: Vec::new(), table: Vec::new() }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn load(&mut self, inst: &Instance, sel: &SubsetSelection) -> Result<()> {
        self.load_restricted(inst, sel, |_, _| true)
    }

    fn load_restricted(
        &mut self,
        inst: &Instance,
        sel: &SubsetSelection,
        allowed: impl Fn(usize, usize) -> bool,
    ) -> Result<()> {
        let i = sel.i();
        if i > self.cap {
            return Err(Error::CapExceeded { size: i, cap: self.cap });
        }
        let vs = sel.vertices();
        self.dist.clear();
        self.dist.resize(i * i, 0.0);
        for a in 0..i {
            for b in 0..i {
                if a != b {
                    self.dist[a * i + b] = if allowed(vs[a], vs[b]) {
                        inst.distance(vs[a], vs[b])
                    } else {
                        f64::INFINITY
                    };
                }
            }
        }
        Ok(())
    }

    /// Fills `table[mask * m + k]` with the shortest path that starts at the
    /// anchor, visits exactly `mask`, and ends at `others[k]`.
    fn sweep(&mut self, i: usize, sw: &Sweep) {
        let m = i - 1;
        let size = (1usize << m) * m;
        self.table.clear();
        self.table.resize(size, f64::INFINITY);
        let d = &self.dist;
        let t = &mut self.table;
        for (k, &x) in sw.others.iter().enumerate() {
            t[(1 << k) * m + k] = d[sw.anchor * i + x];
        }
        for mask in 1usize..(1 << m) {
            for k in 0..m {
                if mask & (1 << k) == 0 {
                    continue;
                }
                let cur = t[mask * m + k];
                if cur == f64::INFINITY {
                    continue;
                }
                let xk = sw.others[k];
                let mut rest = !mask & ((1 << m) - 1);
                while rest != 0 {
                    let j = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let cand = cur + d[xk * i + sw.others[j]];
                    let slot = &mut t[(mask | (1 << j)) * m + j];
                    if cand < *slot {
                        *slot = cand;
                    }
                }
            }
        }
    }

    /// Greedy lexicographic walk from local `start` back to the anchor.
    fn walk(&self, i: usize, sw: &Sweep, start: usize, mut mask: usize, out: &mut Vec<usize>) {
        let m = i - 1;
        let mut x = start;
        out.push(x);
        loop {
            let bx = sw.bit(x);
            let target = self.table[mask * m + bx];
            mask &= !(1 << bx);
            if mask == 0 {
                break;
            }
            let mut next = None;
            for (j, &w) in sw.others.iter().enumerate() {
                if mask & (1 << j) != 0 && self.table[mask * m + j] + self.dist[w * i + x] == target {
                    next = Some(w);
                    break;
                }
            }
            x = next.expect("table walk lost the optimum");
            out.push(x);
        }
        out.push(sw.anchor);
    }

    /// The optimal Hamiltonian path on `sel` from `u` to `v`.
    pub fn op_path(&mut self, inst: &Instance, sel: &SubsetSelection, u: usize, v: usize) -> Result<OptimalPath> {
        if u == v {
            return Err(Error::EqualEndpoints(u));
        }
        let lu = sel.local(u).ok_or(Error::EndpointNotInSelection(u))?;
        let lv = sel.local(v).ok_or(Error::EndpointNotInSelection(v))?;
        self.load(inst, sel)?;
        let i = sel.i();
        let sw = Sweep::new(i, lv);
        self.sweep(i, &sw);
        let full = (1usize << (i - 1)) - 1;
        let length = self.table[full * (i - 1) + sw.bit(lu)];
        let mut local = Vec::with_capacity(i);
        self.walk(i, &sw, lu, full, &mut local);
        let vs = sel.vertices();
        Ok(OptimalPath {
            endpoints: (u, v),
            order: local.into_iter().map(|x| vs[x]).collect(),
            length,
        })
    }

    /// Calls `f(u_local, v_local, order_local, length)` for every pair `u < v`,
    /// reusing one sweep per end vertex `v`.
    pub fn for_each_op(
        &mut self,
        inst: &Instance,
        sel: &SubsetSelection,
        mut f: impl FnMut(usize, usize, &[usize], f64),
    ) -> Result<()> {
        self.load(inst, sel)?;
        let i = sel.i();
        let full = (1usize << (i - 1)) - 1;
        let mut buf = Vec::with_capacity(i);
        for lv in 1..i {
            let sw = Sweep::new(i, lv);
            self.sweep(i, &sw);
            for lu in 0..lv {
                buf.clear();
                self.walk(i, &sw, lu, full, &mut buf);
                let length = self.table[full * (i - 1) + sw.bit(lu)];
                f(lu, lv, &buf, length);
            }
        }
        Ok(())
    }

    /// All C(i,2) optimal paths, ordered by `(u, v)` with `u < v`.
    pub fn all_op_paths(&mut self, inst: &Instance, sel: &SubsetSelection) -> Result<Vec<OptimalPath>> {
        let vs = sel.vertices().to_vec();
        let mut out = Vec::with_capacity(sel.i() * (sel.i() - 1) / 2);
        self.for_each_op(inst, sel, |lu, lv, order, length| {
            out.push(OptimalPath {
                endpoints: (vs[lu], vs[lv]),
                order: order.iter().map(|&x| vs[x]).collect(),
                length,
            });
        })?;
        out.sort_by_key(|p| p.endpoints);
        Ok(out)
    }

    /// The optimal Hamiltonian cycle on `sel`, starting at its smallest vertex.
    pub fn ohc(&mut self, inst: &Instance, sel: &SubsetSelection) -> Result<Tour> {
        self.load(inst, sel)?;
        Ok(self.cycle(sel).expect("complete graph always has a cycle"))
    }

    /// The optimal cycle using only edges for which `allowed` holds, if any.
    pub fn ohc_restricted(
        &mut self,
        inst: &Instance,
        sel: &SubsetSelection,
        allowed: impl Fn(usize, usize) -> bool,
    ) -> Result<Option<Tour>> {
        self.load_restricted(inst, sel, allowed)?;
        Ok(self.cycle(sel))
    }

    fn cycle(&mut self, sel: &SubsetSelection) -> Option<Tour> {
        let i = sel.i();
        let sw = Sweep::new(i, 0);
        self.sweep(i, &sw);
        let m = i - 1;
        let full = (1usize << m) - 1;
        let mut best = f64::INFINITY;
        let mut first = None;
        for (k, &w) in sw.others.iter().enumerate() {
            let len = self.table[full * m + k] + self.dist[w * i];
            if len < best {
                best = len;
                first = Some(w);
            }
        }
        let first = first?;
        let mut local = vec![0];
        self.walk(i, &sw, first, full, &mut local);
        local.pop();
        let vs = sel.vertices();
        Some(Tour { order: local.into_iter().map(|x| vs[x]).collect(), length: best })
    }
}

pub fn op_path(inst: &Instance, sel: &SubsetSelection, u: usize, v: usize) -> Result<OptimalPath> {
    SubsetDp::default().op_path(inst, sel, u, v)
}

pub fn all_op_paths(inst: &Instance, sel: &SubsetSelection) -> Result<Vec<OptimalPath>> {
    SubsetDp::default().all_op_paths(inst, sel)
}

pub fn ohc(inst: &Instance, sel: &SubsetSelection) -> Result<Tour> {
    SubsetDp::default().ohc(inst, sel)
}
