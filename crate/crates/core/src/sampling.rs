//! Per-edge frequency statistics over random or exhaustive frequency K_i's.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freq_graph::choose2;
use crate::instance::{edge_count, edge_index, edges, Instance};
use crate::subset_dp::{SubsetDp, SubsetSelection, DEFAULT_CAP};

/// Largest population sampled without replacement by index.
pub const WITHOUT_REPLACEMENT_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStats {
    pub u: usize,
    pub v: usize,
    pub i: usize,
    /// Number of frequency K_i's aggregated.
    pub n_samples: u64,
    /// Total frequency F.
    pub total: u64,
    /// Average frequency F / N.
    pub f: f64,
    /// Probability f / C(i,2).
    pub p: f64,
}

impl EdgeStats {
    pub fn new(u: usize, v: usize, i: usize, n_samples: u64, total: u64) -> Self {
        let f = if n_samples == 0 { 0.0 } else { total as f64 / n_samples as f64 };
        EdgeStats { u: u.min(v), v: u.max(v), i, n_samples, total, f, p: f / choose2(i) as f64 }
    }

    pub const CSV_HEADER: &'static str = "u,v,i,N,F,f_avg,p";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{},{}", self.u, self.v, self.i, self.n_samples, self.total, self.f, self.p)
    }
}

/// C(n, k) in u128, `None` on overflow.
pub fn binom_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) is divisible by j + 1 after the multiply
        acc = acc.checked_mul((n - j) as u128)? / (j as u128 + 1);
    }
    Some(acc)
}

/// The `rank`-th k-subset of `0..m` in lexicographic order.
pub fn unrank_combination(m: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    for slot in 0..k {
        loop {
            let rest = binom_u128(m - x - 1, k - slot - 1).expect("unrank within u128");
            if rank < rest {
                break;
            }
            rank -= rest;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    out
}

/// Advances a k-subset of `0..m` to its lexicographic successor.
pub fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    let mut j = k;
    while j > 0 {
        j -= 1;
        if c[j] < m - k + j {
            c[j] += 1;
            for t in (j + 1)..k {
                c[t] = c[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of distinct frequency K_i's containing a given edge.
pub fn population(n: usize, i: usize) -> Option<u128> {
    binom_u128(n - 2, i - 2)
}

/// Caps a requested sample count at the population size.
pub fn effective_samples(n: usize, i: usize, requested: u64) -> u64 {
    match population(n, i) {
        Some(p) if p < requested as u128 => p as u64,
        _ => requested,
    }
}

fn check_range(n: usize, i: usize) -> Result<()> {
    if i < 4 || i > n {
        return Err(Error::OutOfRange(format!("i = {i} must lie in [4, {n}]")));
    }
    Ok(())
}

/// Independent per-edge stream: identical draws regardless of evaluation order.
fn edge_rng(seed: u64, n: usize, u: usize, v: usize, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((edge_index(n, u, v) as u64) << 32) | i as u64);
    rng
}

/// The `(i-2)`-subsets of the other vertices used for edge `(u, v)`.
fn draw_subsets(n: usize, u: usize, v: usize, i: usize, samples: u64, seed: u64) -> Vec<Vec<usize>> {
    let m = n - 2;
    let k = i - 2;
    let others: Vec<usize> = (0..n).filter(|&x| x != u && x != v).collect();
    let lift = |c: Vec<usize>| -> Vec<usize> {
        let mut s: Vec<usize> = c.into_iter().map(|x| others[x]).collect();
        s.push(u);
        s.push(v);
        s.sort_unstable();
        s
    };
    let pop = population(n, i);
    let mut rng = edge_rng(seed, n, u, v, i);
    match pop {
        Some(p) if p == samples as u128 => {
            let mut c: Vec<usize> = (0..k).collect();
            let mut out = Vec::with_capacity(samples as usize);
            loop {
                out.push(lift(c.clone()));
                if !next_combination(&mut c, m) {
                    break;
                }
            }
            out
        }
        Some(p) if p <= WITHOUT_REPLACEMENT_BUDGET => index::sample(&mut rng, p as usize, samples as usize)
            .into_iter()
            .map(|r| lift(unrank_combination(m, k, r as u128)))
            .collect(),
        _ => (0..samples)
            .map(|_| lift(index::sample(&mut rng, m, k).into_vec()))
            .collect(),
    }
}

/// Aggregates `samples` frequency K_i's containing edge `(u, v)`.
///
/// Draws without replacement when the population is small enough to index,
/// enumerates it when `samples` equals its size, and otherwise draws uniform
/// subsets with replacement.
pub fn sample_edge_stats(
    inst: &Instance,
    edge: (usize, usize),
    i: usize,
    samples: u64,
    seed: u64,
) -> Result<EdgeStats> {
    let mut dp = SubsetDp::default();
    sample_edge_stats_with(&mut dp, inst, edge, i, samples, seed)
}

pub fn sample_edge_stats_with(
    dp: &mut SubsetDp,
    inst: &Instance,
    edge: (usize, usize),
    i: usize,
    samples: u64,
    seed: u64,
) -> Result<EdgeStats> {
    let n = inst.n();
    check_range(n, i)?;
    let (u, v) = (edge.0.min(edge.1), edge.0.max(edge.1));
    if u == v {
        return Err(Error::EqualEndpoints(u));
    }
    if v >= n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    if samples == 0 {
        return Err(Error::OutOfRange("sample count must be at least 1".into()));
    }
    if let Some(p) = population(n, i) {
        if samples as u128 > p {
            return Err(Error::OutOfRange(format!("{samples} samples exceed the {p} distinct K_{i}")));
        }
    }
    if i > dp.cap() {
        return Err(Error::CapExceeded { size: i, cap: dp.cap() });
    }
    let mut total = 0;
    for s in draw_subsets(n, u, v, i, samples, seed) {
        let sel = SubsetSelection::from_sorted(s);
        let fg = dp.frequency_graph(inst, &sel)?;
        total += fg.freq(u, v).expect("edge in its own sample");
    }
    Ok(EdgeStats::new(u, v, i, samples, total))
}

/// Statistics for many edges in parallel; output follows `edge_list`.
pub fn sample_edges(
    inst: &Instance,
    edge_list: &[(usize, usize)],
    i: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<EdgeStats>> {
    edge_list
        .par_iter()
        .map_init(SubsetDp::default, |dp, &e| sample_edge_stats_with(dp, inst, e, i, samples, seed))
        .collect()
}

/// Exact statistics for every edge from all C(n,i) subsets.
///
/// Each subset is solved once and credits all of its edges, so every edge
/// ends with N = C(n-2, i-2).
pub fn exhaustive_all_edges(inst: &Instance, i: usize) -> Result<Vec<EdgeStats>> {
    let n = inst.n();
    check_range(n, i)?;
    if i > DEFAULT_CAP {
        return Err(Error::CapExceeded { size: i, cap: DEFAULT_CAP });
    }
    let total = binom_u128(n, i).ok_or_else(|| Error::OutOfRange(format!("C({n},{i}) overflows")))?;
    const CHUNK: u128 = 256;
    let chunks = total.div_ceil(CHUNK);
    if chunks > usize::MAX as u128 {
        return Err(Error::OutOfRange(format!("C({n},{i}) is too large to enumerate")));
    }
    let ne = edge_count(n);
    let counts = (0..chunks as usize)
        .into_par_iter()
        .map_init(SubsetDp::default, |dp, chunk| -> Result<Vec<u64>> {
            let start = chunk as u128 * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut acc = vec![0u64; ne];
            let mut c = unrank_combination(n, i, start);
            for _ in start..end {
                let sel = SubsetSelection::from_sorted(c.clone());
                let fg = dp.frequency_graph(inst, &sel)?;
                for (a, b, f) in fg.edges() {
                    acc[edge_index(n, a, b)] += f;
                }
                next_combination(&mut c, n);
            }
            Ok(acc)
        })
        .try_reduce(
            || vec![0u64; ne],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let per_edge = population(n, i).expect("smaller than C(n,i)") as u64;
    Ok(edges(n)
        .into_iter()
        .zip(counts)
        .map(|((u, v), f)| EdgeStats::new(u, v, i, per_edge, f))
        .collect())
}

/// Statistics for every edge: exhaustive when `samples` covers the whole
/// population, sampled per edge otherwise.
pub fn all_edge_stats(inst: &Instance, i: usize, samples: u64, seed: u64) -> Result<Vec<EdgeStats>> {
    let n = inst.n();
    check_range(n, i)?;
    if samples == 0 {
        return Err(Error::OutOfRange("sample count must be at least 1".into()));
    }
    let eff = effective_samples(n, i, samples);
    if population(n, i) == Some(eff as u128) {
        exhaustive_all_edges(inst, i)
    } else {
        sample_edges(inst, &edges(n), i, eff, seed)
    }
}
