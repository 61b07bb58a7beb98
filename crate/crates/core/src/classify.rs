//! Edge classification from frequency statistics, sparsified graphs and the
//! frequency-then-DP tour recovery pipeline.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::analytics::{decrement_law, solve_id, IdVariant};
use crate::error::{Error, Result};
use crate::freq_graph::choose2;
use crate::instance::{edge_count, edge_index, edges, Instance};
use crate::sampling::{all_edge_stats, effective_samples, EdgeStats};
use crate::subset_dp::{SubsetDp, SubsetSelection, DEFAULT_CAP};
use crate::tsplib::Tour;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    ErrPositive,
    RatioBelow,
    BelowThreshold,
    ZeroFreq,
}

impl DropReason {
    pub fn name(self) -> &'static str {
        match self {
            DropReason::ErrPositive => "ERR_POSITIVE",
            DropReason::RatioBelow => "RATIO_BELOW",
            DropReason::BelowThreshold => "BELOW_THRESHOLD",
            DropReason::ZeroFreq => "ZERO_FREQ",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrajectory {
    pub u: usize,
    pub v: usize,
    /// Ascending in `i`.
    pub stats: Vec<EdgeStats>,
    pub verdict: Verdict,
    pub drop_reason: Option<DropReason>,
    /// The `i` whose step to `i + 1` triggered the drop.
    pub dropped_at: Option<usize>,
}

/// Which consecutive-step test marks an edge as ordinary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecrementRule {
    /// pd − 2p_i/(i(i−1)) > slack.
    Err,
    /// p_{i+1}·(i+1) < p_i·i − slack.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecrementConfig {
    pub rule: DecrementRule,
    pub slack: f64,
    /// Consecutive violating steps needed to drop.
    pub consecutive: usize,
}

impl Default for DecrementConfig {
    fn default() -> Self {
        DecrementConfig { rule: DecrementRule::Err, slack: 1e-9, consecutive: 1 }
    }
}

/// Applies the decrement rule to one edge's statistics.
pub fn judge(u: usize, v: usize, stats: Vec<EdgeStats>, cfg: &DecrementConfig) -> EdgeTrajectory {
    let mut t = EdgeTrajectory { u, v, stats, verdict: Verdict::Keep, drop_reason: None, dropped_at: None };
    if t.stats.first().is_some_and(|s| s.total == 0) {
        t.verdict = Verdict::Drop;
        t.drop_reason = Some(DropReason::ZeroFreq);
        t.dropped_at = Some(t.stats[0].i);
        return t;
    }
    let mut run = 0;
    for w in t.stats.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let law = decrement_law(a.p, b.p, a.i);
        let violated = match cfg.rule {
            DecrementRule::Err => law.err > cfg.slack,
            DecrementRule::Ratio => b.p * ((a.i + 1) as f64) < a.p * (a.i as f64) - cfg.slack,
        };
        run = if violated { run + 1 } else { 0 };
        if run >= cfg.consecutive.max(1) {
            t.verdict = Verdict::Drop;
            t.drop_reason = Some(match cfg.rule {
                DecrementRule::Err => DropReason::ErrPositive,
                DecrementRule::Ratio => DropReason::RatioBelow,
            });
            t.dropped_at = Some(a.i);
            break;
        }
    }
    t
}

fn check_i_range(n: usize, lo: usize, hi: usize) -> Result<()> {
    if lo > hi {
        return Err(Error::OutOfRange(format!("empty i range {lo}..{hi}")));
    }
    if lo < 4 || hi > n {
        return Err(Error::OutOfRange(format!("i range {lo}..{hi} must lie in [4, {n}]")));
    }
    Ok(())
}

/// Per-edge statistics for every `i` in `lo..=hi`, indexed `[edge][step]`.
pub fn trajectories(inst: &Instance, lo: usize, hi: usize, samples: u64, seed: u64) -> Result<Vec<Vec<EdgeStats>>> {
    check_i_range(inst.n(), lo, hi)?;
    let mut per_edge: Vec<Vec<EdgeStats>> = vec![Vec::with_capacity(hi - lo + 1); edge_count(inst.n())];
    for i in lo..=hi {
        for (k, s) in all_edge_stats(inst, i, samples, seed)?.into_iter().enumerate() {
            per_edge[k].push(s);
        }
    }
    Ok(per_edge)
}

/// Statistics over `lo..=hi` followed by the decrement rule on every edge.
///
/// `samples` is capped per step at the number of distinct K_i's; at the cap
/// the statistics are exact.
pub fn classify_by_decrement(
    inst: &Instance,
    lo: usize,
    hi: usize,
    samples: u64,
    seed: u64,
    cfg: &DecrementConfig,
) -> Result<Vec<EdgeTrajectory>> {
    let stats = trajectories(inst, lo, hi, samples, seed)?;
    Ok(edges(inst.n())
        .into_iter()
        .zip(stats)
        .map(|((u, v), s)| judge(u, v, s, cfg))
        .collect())
}

/// Kept/total counts by class when a reference tour is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCounts {
    pub tour_kept: usize,
    pub tour_total: usize,
    pub ordinary_kept: usize,
    pub ordinary_total: usize,
}

impl ClassCounts {
    /// Kept ordinary edges as a percentage of the n(n−3)/2 ordinary edges.
    pub fn preserved_ordinary_pct(&self) -> f64 {
        100.0 * self.ordinary_kept as f64 / self.ordinary_total as f64
    }

    fn tally(n: usize, kept: &[(usize, usize)], tour: &Tour) -> Self {
        let mask = tour.edge_mask(n);
        let tour_kept = kept.iter().filter(|&&(u, v)| mask[u * n + v]).count();
        ClassCounts {
            tour_kept,
            tour_total: n,
            ordinary_kept: kept.len() - tour_kept,
            ordinary_total: edge_count(n) - n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsifiedGraph {
    pub n: usize,
    pub kept: Vec<(usize, usize)>,
    pub degree: Vec<usize>,
    pub provenance: BTreeMap<String, String>,
}

impl SparsifiedGraph {
    pub fn new(n: usize, kept: Vec<(usize, usize)>, provenance: BTreeMap<String, String>) -> Self {
        let mut degree = vec![0; n];
        for &(u, v) in &kept {
            degree[u] += 1;
            degree[v] += 1;
        }
        SparsifiedGraph { n, kept, degree, provenance }
    }

    /// Vertices that cannot lie on a Hamiltonian cycle of the kept edges.
    pub fn low_degree_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.degree[v] < 2).collect()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.kept.binary_search(&e).is_ok()
    }

    fn header(&self) -> String {
        let body: Vec<String> = self.provenance.iter().map(|(k, v)| format!("\"{k}\": \"{v}\"")).collect();
        format!("# {{{}}}\n", body.join(", "))
    }

    /// Provenance comment followed by one `u v` line per kept edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = self.header();
        for (u, v) in &self.kept {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// LKH-style candidate file: per vertex its kept neighbours by
    /// descending `weight`, 1-based ids, terminated by `-1` and `EOF`.
    pub fn to_candidates(&self, weight: impl Fn(usize, usize) -> f64) -> String {
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for &(u, v) in &self.kept {
            nbrs[u].push(v);
            nbrs[v].push(u);
        }
        let mut out = format!("{}\n", self.n);
        for (u, list) in nbrs.iter_mut().enumerate() {
            list.sort_by(|&a, &b| weight(u, b).total_cmp(&weight(u, a)).then(a.cmp(&b)));
            let _ = write!(out, "{} 0 {}", u + 1, list.len());
            for (rank, &v) in list.iter().enumerate() {
                let _ = write!(out, " {} {}", v + 1, rank);
            }
            out.push('\n');
        }
        out.push_str("-1\nEOF\n");
        out
    }
}

/// Builds the sparsified graph of all `Keep` trajectories.
pub fn sparsify_trajectories(n: usize, trajs: &[EdgeTrajectory], provenance: BTreeMap<String, String>) -> SparsifiedGraph {
    let kept = trajs.iter().filter(|t| t.verdict == Verdict::Keep).map(|t| (t.u, t.v)).collect();
    SparsifiedGraph::new(n, kept, provenance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// ½·C(i,2).
    FLb,
    Fixed(f64),
    /// The k-th smallest average frequency among tour edges (1-based).
    KthSmallestTour(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdOutcome {
    pub graph: SparsifiedGraph,
    pub stats: Vec<EdgeStats>,
    pub threshold: f64,
    pub counts: Option<ClassCounts>,
}

/// Keeps each edge with positive average frequency at least the threshold.
pub fn threshold_from_stats(
    n: usize,
    i: usize,
    stats: Vec<EdgeStats>,
    rule: ThresholdRule,
    tour: Option<&Tour>,
    mut provenance: BTreeMap<String, String>,
) -> Result<ThresholdOutcome> {
    if let Some(t) = tour {
        if t.n() != n {
            return Err(Error::TourMismatch { expected: n, found: t.n() });
        }
    }
    let threshold = match rule {
        ThresholdRule::FLb => choose2(i) as f64 / 2.0,
        ThresholdRule::Fixed(x) => x,
        ThresholdRule::KthSmallestTour(k) => {
            let tour = tour.ok_or(Error::MissingTour)?;
            let mut fs: Vec<f64> = tour.edges().iter().map(|&(u, v)| stats[edge_index(n, u, v)].f).collect();
            fs.sort_by(f64::total_cmp);
            if k == 0 || k > fs.len() {
                return Err(Error::OutOfRange(format!("k = {k} must lie in [1, {}]", fs.len())));
            }
            fs[k - 1]
        }
    };
    let kept: Vec<(usize, usize)> =
        stats.iter().filter(|s| s.total > 0 && s.f >= threshold).map(|s| (s.u, s.v)).collect();
    let counts = tour.map(|t| ClassCounts::tally(n, &kept, t));
    provenance.insert("threshold".into(), threshold.to_string());
    Ok(ThresholdOutcome { graph: SparsifiedGraph::new(n, kept, provenance), stats, threshold, counts })
}

pub fn classify_by_threshold(
    inst: &Instance,
    i: usize,
    samples: u64,
    seed: u64,
    rule: ThresholdRule,
    tour: Option<&Tour>,
) -> Result<ThresholdOutcome> {
    if matches!(rule, ThresholdRule::KthSmallestTour(_)) && tour.is_none() {
        return Err(Error::MissingTour);
    }
    let stats = all_edge_stats(inst, i, samples, seed)?;
    let mut prov = BTreeMap::new();
    prov.insert("rule".into(), format!("{rule:?}"));
    prov.insert("i".into(), i.to_string());
    prov.insert("samples".into(), effective_samples(inst.n(), i, samples).to_string());
    prov.insert("seed".into(), seed.to_string());
    threshold_from_stats(inst.n(), i, stats, rule, tour, prov)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoverConfig {
    /// Overrides min(2·i_d, n).
    pub i_eval: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub cap: usize,
}

impl Default for RecoverConfig {
    fn default() -> Self {
        RecoverConfig { i_eval: None, samples: 32, seed: 0, cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub tour: Tour,
    pub graph: SparsifiedGraph,
    pub i_eval: usize,
    pub threshold: f64,
}

/// Drops edges whose average frequency at i_eval falls below ½·C(i_eval,2)
/// and solves the cycle problem on the survivors exactly.
pub fn recover_ohc(inst: &Instance, cfg: &RecoverConfig) -> Result<Recovery> {
    let n = inst.n();
    if n > cfg.cap {
        return Err(Error::BudgetExceeded { size: n, cap: cfg.cap });
    }
    let mut dp = SubsetDp::new(cfg.cap);
    let sel = SubsetSelection::full(inst);
    let mut prov = BTreeMap::new();
    prov.insert("pipeline".into(), "recover_ohc".into());
    prov.insert("seed".into(), cfg.seed.to_string());
    if n < 8 {
        prov.insert("i_eval".into(), n.to_string());
        let graph = SparsifiedGraph::new(n, edges(n), prov);
        let tour = dp.ohc(inst, &sel)?;
        return Ok(Recovery { tour, graph, i_eval: n, threshold: 0.0 });
    }
    let i_eval = match cfg.i_eval {
        Some(i) => i.clamp(4, n),
        None => (2 * solve_id(n, IdVariant::Printed)?).min(n),
    };
    let samples = effective_samples(n, i_eval, cfg.samples.max(1));
    prov.insert("i_eval".into(), i_eval.to_string());
    prov.insert("samples".into(), samples.to_string());
    let stats = all_edge_stats(inst, i_eval, samples, cfg.seed)?;
    let outcome = threshold_from_stats(n, i_eval, stats, ThresholdRule::FLb, None, prov)?;
    let graph = outcome.graph;
    let low = graph.low_degree_vertices();
    if !low.is_empty() {
        return Err(Error::NotHamiltonian { low_degree: low });
    }
    let mut allowed = vec![false; n * n];
    for &(u, v) in &graph.kept {
        allowed[u * n + v] = true;
        allowed[v * n + u] = true;
    }
    let tour = dp
        .ohc_restricted(inst, &sel, |a, b| allowed[a * n + b])?
        .ok_or(Error::NotHamiltonian { low_degree: Vec::new() })?;
    Ok(Recovery { tour, graph, i_eval, threshold: outcome.threshold })
}

/// Per-step class summary against a reference tour.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub i: usize,
    pub f_tot: u64,
    pub f_tour: u64,
    /// F_tour / F_tot in percent.
    pub p_tour_pct: f64,
    /// Mean p over tour edges.
    pub p_e: f64,
    /// Mean p over ordinary edges.
    pub p_g: f64,
    pub p_min_e: f64,
    pub p_max_g: f64,
    /// Extremes of err over the step i → i+1; absent at the last i.
    pub err: Option<ErrSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrSummary {
    pub max_e: f64,
    pub min_e: f64,
    pub max_g: f64,
    pub min_g: f64,
    /// Tour edges with err > 0.
    pub positive_e: usize,
    /// Percentages with err < 0 per class.
    pub negative_e_pct: f64,
    pub negative_g_pct: f64,
}

pub fn evaluate_against_tour(n: usize, trajs: &[EdgeTrajectory], tour: &Tour) -> Result<Vec<StepSummary>> {
    if tour.n() != n {
        return Err(Error::TourMismatch { expected: n, found: tour.n() });
    }
    if trajs.len() != edge_count(n) {
        return Err(Error::OutOfRange(format!("expected {} trajectories, got {}", edge_count(n), trajs.len())));
    }
    let mask = tour.edge_mask(n);
    let steps = trajs.first().map_or(0, |t| t.stats.len());
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let i = trajs[0].stats[k].i;
        let (mut f_tot, mut f_tour) = (0u64, 0u64);
        let (mut sum_e, mut sum_g) = (0.0, 0.0);
        let (mut min_e, mut max_g) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut errs_e = Vec::new();
        let mut errs_g = Vec::new();
        for t in trajs {
            let s = &t.stats[k];
            let is_tour = mask[t.u * n + t.v];
            f_tot += s.total;
            if is_tour {
                f_tour += s.total;
                sum_e += s.p;
                min_e = min_e.min(s.p);
            } else {
                sum_g += s.p;
                max_g = max_g.max(s.p);
            }
            if let Some(next) = t.stats.get(k + 1) {
                let err = decrement_law(s.p, next.p, i).err;
                if is_tour {
                    errs_e.push(err);
                } else {
                    errs_g.push(err);
                }
            }
        }
        let ord = (edge_count(n) - n) as f64;
        let err = (k + 1 < steps).then(|| {
            let fold = |v: &[f64]| {
                (
                    v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    v.iter().copied().fold(f64::INFINITY, f64::min),
                )
            };
            let (max_e, min_e) = fold(&errs_e);
            let (max_g, min_g) = fold(&errs_g);
            let neg = |v: &[f64]| 100.0 * v.iter().filter(|&&e| e < 0.0).count() as f64 / v.len().max(1) as f64;
            ErrSummary {
                max_e,
                min_e,
                max_g,
                min_g,
                positive_e: errs_e.iter().filter(|&&e| e > 0.0).count(),
                negative_e_pct: neg(&errs_e),
                negative_g_pct: neg(&errs_g),
            }
        });
        out.push(StepSummary {
            i,
            f_tot,
            f_tour,
            p_tour_pct: if f_tot == 0 { 0.0 } else { 100.0 * f_tour as f64 / f_tot as f64 },
            p_e: sum_e / n as f64,
            p_g: sum_g / ord,
            p_min_e: min_e,
            p_max_g: max_g,
            err,
        });
    }
    Ok(out)
}
