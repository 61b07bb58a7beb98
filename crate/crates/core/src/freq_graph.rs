//! Frequency K_i graphs: for each edge of a subset, the number of the C(i,2)
//! optimal fixed-endpoint paths that use it.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::subset_dp::{OptimalPath, SubsetDp, SubsetSelection};

pub fn choose2(i: usize) -> usize {
    i * (i - 1) / 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyGraph {
    sel: SubsetSelection,
    /// Row-major `i * i` symmetric table over local ids.
    freq: Vec<u64>,
}

impl FrequencyGraph {
    fn empty(sel: SubsetSelection) -> Self {
        let i = sel.i();
        FrequencyGraph { sel, freq: vec![0; i * i] }
    }

    fn bump_local(&mut self, a: usize, b: usize) {
        let i = self.sel.i();
        self.freq[a * i + b] += 1;
        self.freq[b * i + a] += 1;
    }

    pub fn selection(&self) -> &SubsetSelection {
        &self.sel
    }

    pub fn i(&self) -> usize {
        self.sel.i()
    }

    /// Frequency of the edge between two selected vertices (global ids).
    pub fn freq(&self, u: usize, v: usize) -> Option<u64> {
        let (a, b) = (self.sel.local(u)?, self.sel.local(v)?);
        if a == b {
            return None;
        }
        Some(self.freq[a * self.i() + b])
    }

    pub fn freq_local(&self, a: usize, b: usize) -> u64 {
        self.freq[a * self.i() + b]
    }

    /// `(u, v, freq)` for every pair `u < v` of the selection.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let i = self.i();
        let vs = self.sel.vertices();
        (0..i).flat_map(move |a| ((a + 1)..i).map(move |b| (vs[a], vs[b], self.freq[a * i + b])))
    }

    pub fn total(&self) -> u64 {
        self.edges().map(|(_, _, f)| f).sum()
    }

    pub fn max(&self) -> u64 {
        self.edges().map(|(_, _, f)| f).max().unwrap_or(0)
    }

    /// Sum of frequencies over the edges at global vertex `w`.
    pub fn vertex_sum(&self, w: usize) -> Option<u64> {
        let a = self.sel.local(w)?;
        let i = self.i();
        Some((0..i).map(|b| self.freq[a * i + b]).sum())
    }

    /// Subgraph of positive-frequency edges.
    pub fn support_graph(&self) -> SupportGraph {
        let vs = self.sel.vertices();
        let mut degree = vec![0; vs.len()];
        let mut edges = Vec::new();
        let i = self.i();
        for a in 0..i {
            for b in (a + 1)..i {
                if self.freq[a * i + b] > 0 {
                    edges.push((vs[a], vs[b]));
                    degree[a] += 1;
                    degree[b] += 1;
                }
            }
        }
        SupportGraph { vertices: vs.to_vec(), edges, degree }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Degree of `vertices[k]`.
    pub degree: Vec<usize>,
}

impl SupportGraph {
    pub fn min_degree(&self) -> usize {
        self.degree.iter().copied().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }
}

/// Counts edge usage over a complete set of C(i,2) optimal paths.
pub fn freq_from_paths(paths: &[OptimalPath], sel: &SubsetSelection) -> Result<FrequencyGraph> {
    let expected = choose2(sel.i());
    if paths.len() != expected {
        return Err(Error::WrongPathCount { expected, found: paths.len() });
    }
    let mut fg = FrequencyGraph::empty(sel.clone());
    for p in paths {
        if p.order.len() != sel.i() {
            return Err(Error::InvalidSelection(format!(
                "path {:?} has {} vertices, selection has {}",
                p.endpoints,
                p.order.len(),
                sel.i()
            )));
        }
        for w in p.order.windows(2) {
            let a = sel.local(w[0]).ok_or(Error::EndpointNotInSelection(w[0]))?;
            let b = sel.local(w[1]).ok_or(Error::EndpointNotInSelection(w[1]))?;
            fg.bump_local(a, b);
        }
    }
    Ok(fg)
}

impl SubsetDp {
    /// DP-backed frequency K_i without materializing the paths.
    pub fn frequency_graph(&mut self, inst: &Instance, sel: &SubsetSelection) -> Result<FrequencyGraph> {
        let mut fg = FrequencyGraph::empty(sel.clone());
        let i = sel.i();
        let freq = &mut fg.freq;
        self.for_each_op(inst, sel, |_, _, order, _| {
            for w in order.windows(2) {
                freq[w[0] * i + w[1]] += 1;
                freq[w[1] * i + w[0]] += 1;
            }
        })?;
        Ok(fg)
    }
}

pub fn frequency_graph(inst: &Instance, sel: &SubsetSelection) -> Result<FrequencyGraph> {
    SubsetDp::default().frequency_graph(inst, sel)
}

/// Closed-form frequency K_4.
///
/// With pairings ab|cd, ac|bd, ad|bc, the pairing of smallest sum puts
/// frequency 5 on both its edges, the middle one 3 and the largest 1.
pub fn freq_k4_closed(inst: &Instance, sel: &SubsetSelection) -> Result<FrequencyGraph> {
    if sel.i() != 4 {
        return Err(Error::InvalidSelection(format!("closed form needs 4 vertices, got {}", sel.i())));
    }
    let q: [usize; 4] = sel.vertices().try_into().expect("four vertices");
    let sums = inst.pairing_sums(q);
    if sums[0] == sums[1] || sums[1] == sums[2] || sums[0] == sums[2] {
        return Err(Error::TiedPairings(q));
    }
    // local pairs of each pairing
    const PAIRINGS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mut rank = [0usize, 1, 2];
    rank.sort_by(|&a, &b| sums[a].partial_cmp(&sums[b]).expect("finite sums"));
    let mut fg = FrequencyGraph::empty(sel.clone());
    for (pos, &p) in rank.iter().enumerate() {
        let f = [5, 3, 1][pos];
        for (a, b) in PAIRINGS[p] {
            fg.freq[a * 4 + b] = f;
            fg.freq[b * 4 + a] = f;
        }
    }
    Ok(fg)
}
