//! Closed-form bounds, the i_d threshold solver and the probability models
//! for an ordinary edge next to two edges of the optimal tour.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::freq_graph::choose2;

/// Nearest integer with halves rounded up, used for bracketed expressions.
pub fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Index where an edge's total frequency peaks.
#[allow(clippy::manual_div_ceil)]
pub fn peak_index(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n / 2 + 2
    } else {
        (n + 1) / 2 + 1
    }
}

/// ε = (i−2)(i−3) / ((n−2)(n−3)).
pub fn epsilon(n: usize, i: usize) -> f64 {
    ((i - 2) * (i - 3)) as f64 / ((n - 2) * (n - 3)) as f64
}

/// r = 2ε − ε².
pub fn r_approx(n: usize, i: usize) -> f64 {
    let e = epsilon(n, i);
    2.0 * e - e * e
}

/// K / C(n−2, i−2), the exact fraction of K_i's holding an adjacent tour pair.
pub fn r_exact(n: usize, i: usize) -> f64 {
    let quad = |k: usize| (0..k).map(|t| (i as f64 - 2.0 - t as f64) / (n as f64 - 2.0 - t as f64)).product::<f64>();
    2.0 * quad(2) - if i >= 6 { quad(4) } else { 0.0 }
}

/// J / C(n−2, i−2) = (n−i)(n−i−1)(n−i−2)(n−i−3) / ((n−2)(n−3)(n−4)(n−5)).
pub fn j_fraction(n: usize, i: usize) -> f64 {
    if i + 4 > n {
        return 0.0;
    }
    (0..4).map(|t| (n - i - t) as f64 / (n - 2 - t) as f64).product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticParams {
    pub n: usize,
    pub i: usize,
    pub f_lb: f64,
    pub f_lb_worst: f64,
    pub f_oavg: f64,
    pub ord_ub: f64,
    pub ord_avg_ub: f64,
    /// 4(i−1)²/5 with the 3/4 and 7/10 variants.
    pub pair_lb: f64,
    pub pair_lb_3_4: f64,
    pub pair_lb_7_10: f64,
    pub p0: usize,
    pub epsilon: f64,
    pub r: f64,
    pub r_exact: f64,
    /// J, K, L as fractions of C(n−2, i−2); see [`coverage_counts`] for the integers.
    pub j_frac: f64,
    pub k_frac: f64,
    pub l_frac: f64,
}

pub fn bounds(n: usize, i: usize) -> Result<AnalyticParams> {
    if i < 4 || i > n {
        return Err(Error::OutOfRange(format!("bounds need 4 <= i <= n, got i = {i}, n = {n}")));
    }
    let c2 = choose2(i) as f64;
    let fi = i as f64;
    let sq = (fi - 1.0) * (fi - 1.0);
    let (j_frac, k_frac) = if n >= 6 { (j_fraction(n, i), r_exact(n, i)) } else { (f64::NAN, f64::NAN) };
    Ok(AnalyticParams {
        n,
        i,
        f_lb: c2 / 2.0,
        f_lb_worst: 7.0 * c2 / 18.0,
        f_oavg: (fi * fi - 4.0 * fi + 7.0) / 2.0,
        ord_ub: 2.0 * (fi - 3.0),
        ord_avg_ub: (fi + 2.0) / 2.0,
        pair_lb: 4.0 * sq / 5.0,
        pair_lb_3_4: 3.0 * sq / 4.0,
        pair_lb_7_10: 7.0 * sq / 10.0,
        p0: peak_index(n),
        epsilon: epsilon(n, i),
        r: r_approx(n, i),
        r_exact: k_frac,
        j_frac,
        k_frac,
        l_frac: 1.0 - j_frac - k_frac,
    })
}

pub fn binom_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

/// Exact (J, K, L) with K = 2C(n−4,i−4) − C(n−6,i−6), J = C(n−6,i−2) and
/// L = C(n−2,i−2) − J − K.
pub fn coverage_counts(n: usize, i: usize) -> Result<(BigUint, BigUint, BigUint)> {
    if n < 6 || i < 4 || i > n {
        return Err(Error::OutOfRange(format!("coverage needs n >= 6 and 4 <= i <= n, got n = {n}, i = {i}")));
    }
    let sub = |k: usize| if k <= i { binom_big(n - 6, i - k) } else { BigUint::zero() };
    let j = binom_big(n - 6, i - 2);
    let k = BigUint::from(2u32) * binom_big(n - 4, i - 4) - sub(6);
    let t = binom_big(n - 2, i - 2);
    let l = t - &j - &k;
    Ok((j, k, l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdVariant {
    /// The inequality as printed: A/B ≥ sqrt(1 + 2/(i(i+1))).
    Printed,
    /// Same with 3/2 in place of 2, accounting for the neglected residual.
    ResidualCorrected,
}

/// Smallest i ≥ 4 with A/B ≥ sqrt(1 + c/(i(i+1))), where
/// A = (n−2)(n−3) − (i−2)(i−3) and B = (n−2)(n−3) − (i−1)(i−2).
///
/// Evaluated exactly as 2A²·i(i+1) ≥ B²·(2i(i+1) + 2c).
pub fn solve_id(n: usize, variant: IdVariant) -> Result<usize> {
    if n < 8 {
        return Err(Error::OutOfRange(format!("i_d needs n >= 8, got {n}")));
    }
    let two_c = BigInt::from(match variant {
        IdVariant::Printed => 4,
        IdVariant::ResidualCorrected => 3,
    });
    let base = BigInt::from((n - 2) as u64) * BigInt::from((n - 3) as u64);
    for i in 4..=n {
        let a = &base - BigInt::from(((i - 2) * (i - 3)) as u64);
        let b = &base - BigInt::from(((i - 1) * (i - 2)) as u64);
        if b <= BigInt::zero() {
            break;
        }
        let ii = BigInt::from((i * (i + 1)) as u64);
        let lhs = BigInt::from(2) * &a * &a * &ii;
        let rhs = &b * &b * (BigInt::from(2) * &ii + &two_c);
        if lhs >= rhs {
            return Ok(i);
        }
    }
    Err(Error::NoSolution { n })
}

/// Extreme-model threshold: the printed round-half-up(0.5412n + 5.1470)
/// beside the value recomputed from ε = 1 − √2/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsifyThreshold {
    pub printed: i64,
    pub recomputed: f64,
}

pub fn sparsify_threshold(n: usize) -> Result<SparsifyThreshold> {
    if n < 8 {
        return Err(Error::OutOfRange(format!("threshold needs n >= 8, got {n}")));
    }
    let root_eps = (1.0 - std::f64::consts::FRAC_1_SQRT_2).sqrt();
    Ok(SparsifyThreshold {
        printed: round_half_up(0.5412 * n as f64 + 5.1470),
        recomputed: root_eps * (n as f64 - 2.5) + 2.5 + 4.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdPoint {
    pub i: usize,
    pub p: f64,
    /// p_i − p_{i+1}; absent at i = n.
    pub pd: Option<f64>,
}

/// The best-case probability curve of an ordinary edge:
/// p_i = 1 − [1 − (i+4)/(i(i−1))]·r − 2/(i(i−1)) with r = K / C(n−2,i−2).
#[derive(Debug, Clone, PartialEq)]
pub struct PdCurve {
    pub n: usize,
    pub points: Vec<PdPoint>,
}

pub fn model_p(n: usize, i: usize) -> f64 {
    let q = (i * (i - 1)) as f64;
    1.0 - (1.0 - (i + 4) as f64 / q) * r_exact(n, i) - 2.0 / q
}

pub fn pd_model(n: usize) -> Result<PdCurve> {
    if n < 8 {
        return Err(Error::OutOfRange(format!("model needs n >= 8, got {n}")));
    }
    let ps: Vec<f64> = (4..=n).map(|i| model_p(n, i)).collect();
    let points = (4..=n)
        .map(|i| {
            let k = i - 4;
            PdPoint { i, p: ps[k], pd: ps.get(k + 1).map(|next| ps[k] - next) }
        })
        .collect();
    Ok(PdCurve { n, points })
}

impl PdCurve {
    fn at(&self, i: usize) -> &PdPoint {
        &self.points[i - 4]
    }

    /// Index of the maximal p.
    pub fn peak(&self) -> usize {
        let mut best = self.points[0];
        for p in &self.points {
            if p.p > best.p {
                best = *p;
            }
        }
        best.i
    }

    /// Index of the largest decrement.
    pub fn pd_argmax(&self) -> usize {
        let mut best = (4, f64::NEG_INFINITY);
        for p in &self.points {
            if let Some(pd) = p.pd {
                if pd > best.1 {
                    best = (p.i, pd);
                }
            }
        }
        best.0
    }

    /// Whether pd strictly increases over `lo..=hi`.
    pub fn pd_increasing(&self, lo: usize, hi: usize) -> bool {
        (lo..hi).all(|i| match (self.at(i).pd, self.at(i + 1).pd) {
            (Some(a), Some(b)) => b > a,
            _ => false,
        })
    }

    pub fn mean_pd(&self, lo: usize, hi: usize) -> f64 {
        let vals: Vec<f64> = (lo..=hi).filter_map(|i| self.at(i).pd).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    }

    pub fn first_p_at_most(&self, level: f64) -> Option<usize> {
        self.points.iter().find(|p| p.p <= level).map(|p| p.i)
    }

    /// First i whose cumulative drop from the peak exceeds `amount`.
    pub fn first_drop_from_peak_above(&self, amount: f64) -> Option<usize> {
        let peak = self.at(self.peak()).p;
        self.points.iter().find(|p| peak - p.p > amount).map(|p| p.i)
    }

    /// First i at which pd exceeds `bound(i, p_i)`.
    pub fn first_pd_above(&self, bound: impl Fn(usize, f64) -> f64) -> Option<usize> {
        self.points
            .iter()
            .find(|p| p.pd.is_some_and(|pd| pd > bound(p.i, p.p)))
            .map(|p| p.i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveragePoint {
    pub i: usize,
    pub j_pct: f64,
    pub k_pct: f64,
    pub l_pct: f64,
    pub jl_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub n: usize,
    pub points: Vec<CoveragePoint>,
    /// First i with K > J.
    pub k_exceeds_j: Option<usize>,
    /// First i with L ≥ J.
    pub l_reaches_j: Option<usize>,
}

pub fn coverage_fractions(n: usize) -> Result<Coverage> {
    if n < 8 {
        return Err(Error::OutOfRange(format!("coverage needs n >= 8, got {n}")));
    }
    let points: Vec<CoveragePoint> = (4..=n)
        .map(|i| {
            let j = j_fraction(n, i);
            let k = r_exact(n, i);
            let l = 1.0 - j - k;
            CoveragePoint { i, j_pct: 100.0 * j, k_pct: 100.0 * k, l_pct: 100.0 * l, jl_pct: 100.0 * (j + l) }
        })
        .collect();
    let k_exceeds_j = points.iter().find(|p| p.k_pct > p.j_pct).map(|p| p.i);
    let l_reaches_j = points.iter().find(|p| p.l_pct >= p.j_pct).map(|p| p.i);
    Ok(Coverage { n, points, k_exceeds_j, l_reaches_j })
}

/// A bracketed constant as printed beside its recomputed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCheck {
    pub name: &'static str,
    pub printed: f64,
    pub recomputed: f64,
}

impl ConstantCheck {
    pub fn disagrees(&self) -> bool {
        (self.printed - self.recomputed).abs() > 1e-4
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(lo) < 0.0) == (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Recomputes the asymptotic slopes from the large-n fractions
/// J ≈ (1−x)⁴, K ≈ 2x² − x⁴ with x = i/n.
pub fn constant_checks() -> [ConstantCheck; 3] {
    let k_eq_j = bisect(|x| (1.0 - x).powi(4) - (2.0 * x * x - x.powi(4)), 0.0, 0.5);
    let l_eq_j = bisect(|x| 2.0 * (1.0 - x).powi(4) + 2.0 * x * x - x.powi(4) - 1.0, 0.0, 0.5);
    let half_r = (1.0 - std::f64::consts::FRAC_1_SQRT_2).sqrt();
    [
        ConstantCheck { name: "K=J slope", printed: 0.3236, recomputed: k_eq_j },
        ConstantCheck { name: "J=L slope", printed: 0.1716, recomputed: l_eq_j },
        ConstantCheck { name: "sqrt(eps) at r=1/2", printed: 0.5412, recomputed: half_r },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecrementLaw {
    pub pd: f64,
    /// pd − 2·p_i / (i(i−1)).
    pub err: f64,
    /// p_next / p_i, absent when p_i = 0.
    pub ratio: Option<f64>,
    /// p_next·(i+1) < p_i·i.
    pub below_i_ratio: bool,
    /// p_next < (1 − 2/(i(i−1)))·p_i.
    pub below_tour_ratio: bool,
}

pub fn decrement_law(p_i: f64, p_next: f64, i: usize) -> DecrementLaw {
    let q = (i * (i - 1)) as f64;
    let pd = p_i - p_next;
    DecrementLaw {
        pd,
        err: pd - 2.0 * p_i / q,
        ratio: (p_i != 0.0).then(|| p_next / p_i),
        below_i_ratio: p_next * ((i + 1) as f64) < p_i * (i as f64),
        below_tour_ratio: p_next < (1.0 - 2.0 / q) * p_i,
    }
}

/// p_i = (a·i² + b·i + c) / C(i,2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub n: usize,
}

impl ProbabilityModel {
    /// `(raw, clamped to [0, 1])`.
    pub fn eval(&self, i: usize) -> (f64, f64) {
        let x = i as f64;
        let raw = (self.a * x * x + self.b * x + self.c) / choose2(i) as f64;
        (raw, raw.clamp(0.0, 1.0))
    }

    /// Quadratic through three `(i, p_i)` points.
    pub fn fit(n: usize, pts: [(usize, f64); 3]) -> Result<Self> {
        let rows: Vec<[f64; 4]> = pts
            .iter()
            .map(|&(i, p)| {
                let x = i as f64;
                [x * x, x, 1.0, p * choose2(i) as f64]
            })
            .collect();
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let col = |skip: Option<usize>| {
            let mut m = [[0.0; 3]; 3];
            for (r, row) in rows.iter().enumerate() {
                for c in 0..3 {
                    m[r][c] = if Some(c) == skip { row[3] } else { row[c] };
                }
            }
            m
        };
        let d = det3(col(None));
        if d == 0.0 {
            return Err(Error::OutOfRange("fit points must have distinct i".into()));
        }
        Ok(ProbabilityModel {
            a: det3(col(Some(0))) / d,
            b: det3(col(Some(1))) / d,
            c: det3(col(Some(2))) / d,
            n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let b = bounds(20, 9).unwrap();
        assert_eq!(b.f_lb, 18.0);
        assert_eq!(b.f_oavg, 26.0);
        assert_eq!(bounds(14, 14).unwrap().f_lb, 45.5);
        assert_eq!(bounds(10, 4).unwrap().f_oavg, 3.5);
        assert_eq!(peak_index(13), 8);
        assert_eq!(peak_index(14), 9);
        assert!(bounds(10, 3).is_err());
    }

    #[test]
    fn f_lb_below_f_oavg_from_five() {
        for i in 5..200 {
            let b = bounds(400, i).unwrap();
            assert!(b.f_lb < b.f_oavg, "i = {i}");
        }
    }

    #[test]
    fn r_identities() {
        for (n, i) in [(20, 7), (100, 40), (1000, 500)] {
            let e = epsilon(n, i);
            assert!((1.0 - r_approx(n, i) - (1.0 - e).powi(2)).abs() < 1e-15);
            let b = bounds(n, i).unwrap();
            assert!((b.j_frac + b.k_frac + b.l_frac - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coverage_fractions_match_counts() {
        let (j, k, l) = coverage_counts(30, 12).unwrap();
        let t = binom_big(28, 10);
        assert_eq!(&j + &k + &l, t);
        let ratio = |x: &BigUint| x.to_string().parse::<f64>().unwrap() / t.to_string().parse::<f64>().unwrap();
        assert!((ratio(&j) - j_fraction(30, 12)).abs() < 1e-12);
        assert!((ratio(&k) - r_exact(30, 12)).abs() < 1e-12);
    }

    #[test]
    fn id_anchors() {
        assert_eq!(solve_id(100, IdVariant::Printed), Ok(18));
        assert_eq!(solve_id(1000, IdVariant::Printed), Ok(80));
        assert_eq!(solve_id(8, IdVariant::Printed), Ok(4));
        assert_eq!(solve_id(12, IdVariant::Printed), Ok(5));
        assert_eq!(solve_id(100, IdVariant::ResidualCorrected), Ok(16));
        assert_eq!(solve_id(1000, IdVariant::ResidualCorrected), Ok(73));
        assert!(solve_id(7, IdVariant::Printed).is_err());
    }

    #[test]
    fn threshold_values() {
        assert_eq!(sparsify_threshold(1000).unwrap().printed, 546);
        assert_eq!(sparsify_threshold(100).unwrap().printed, 59);
        assert!((sparsify_threshold(1000).unwrap().recomputed - 546.344).abs() < 1e-3);
    }

    #[test]
    fn model_p4_by_hand() {
        // i = 4: r = 2·2/((n−2)(n−3)); p = 1 − (1 − 8/12)·r − 2/12
        let n = 50;
        let r = 4.0 / (48.0 * 47.0);
        let want = 1.0 - (1.0 - 8.0 / 12.0) * r - 2.0 / 12.0;
        assert!((model_p(n, 4) - want).abs() < 1e-15);
    }

    #[test]
    fn single_interior_peak() {
        for n in [50, 200, 1000] {
            let c = pd_model(n).unwrap();
            let k = c.peak();
            assert!(k > 4 && k < n);
            let ps: Vec<f64> = c.points.iter().map(|p| p.p).collect();
            assert!(ps[..k - 4].windows(2).all(|w| w[1] > w[0]));
            assert!(ps[k - 4..].windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn decrement_examples() {
        let d = decrement_law(0.6, 0.5, 6);
        assert!((d.err - 0.06).abs() < 1e-12);
        assert!(d.below_tour_ratio);
        let z = decrement_law(0.4, 0.4, 7);
        assert_eq!(z.pd, 0.0);
        assert!(z.err < 0.0 && !z.below_i_ratio);
        assert_eq!(decrement_law(0.0, 0.0, 5).ratio, None);
        // boundary: p_next·(i+1) = p_i·i is not strictly below
        assert!(!decrement_law(0.5, 0.4375, 7).below_i_ratio);
        assert!(decrement_law(0.5, 0.4374, 7).below_i_ratio);
    }

    #[test]
    fn fit_recovers_coefficients() {
        let m = ProbabilityModel { a: 0.5, b: -1.0, c: 2.0, n: 30 };
        let pts = [4, 9, 15].map(|i| (i, m.eval(i).0));
        let f = ProbabilityModel::fit(30, pts).unwrap();
        assert!((f.a - 0.5).abs() < 1e-9 && (f.b + 1.0).abs() < 1e-9 && (f.c - 2.0).abs() < 1e-9);
        assert_eq!(ProbabilityModel { a: 1.0, b: 0.0, c: 0.0, n: 9 }.eval(4), (16.0 / 6.0, 1.0));
    }

    #[test]
    fn constant_recomputation() {
        let [kj, jl, half] = constant_checks();
        assert!(!jl.disagrees());
        assert!((jl.recomputed - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(!half.disagrees());
        assert!(kj.disagrees());
    }
}
