//! Symmetric TSP instances with TSPLIB distance semantics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Stream used for perturbation noise so it never reuses the generator's draws.
const PERTURB_STREAM: u64 = 0x7065_7274;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightModel {
    Euc2d,
    Att,
    Geo,
    ExplicitMatrix,
    RandomUniform,
}

impl WeightModel {
    pub fn name(self) -> &'static str {
        match self {
            WeightModel::Euc2d => "EUC_2D",
            WeightModel::Att => "ATT",
            WeightModel::Geo => "GEO",
            WeightModel::ExplicitMatrix => "EXPLICIT",
            WeightModel::RandomUniform => "RANDOM_UNIFORM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub seed: u64,
    pub magnitude: f64,
}

/// A complete symmetric graph on `n` vertices.
///
/// Distances live in a dense row-major matrix. TSPLIB models produce integer
/// values, which `f64` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: Option<String>,
    model: WeightModel,
    coords: Option<Vec<(f64, f64)>>,
    dist: Vec<f64>,
    n: usize,
    exact_integer: bool,
    perturbation: Option<Perturbation>,
}

impl Instance {
    /// Builds an instance from a full symmetric matrix (diagonal ignored).
    pub fn from_matrix(model: WeightModel, n: usize, matrix: Vec<f64>) -> Result<Self> {
        if n < 4 {
            return Err(Error::TooFewVertices(n));
        }
        if matrix.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: matrix.len() });
        }
        let mut dist = matrix;
        for u in 0..n {
            dist[u * n + u] = 0.0;
            for v in (u + 1)..n {
                let d = dist[u * n + v];
                if d != dist[v * n + u] {
                    return Err(Error::Asymmetric { u, v });
                }
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::NonPositiveDistance { u, v, d });
                }
            }
        }
        let exact_integer = dist.iter().all(|d| d.fract() == 0.0);
        Ok(Instance {
            name: None,
            model,
            coords: None,
            dist,
            n,
            exact_integer,
            perturbation: None,
        })
    }

    /// Builds a coordinate instance under EUC_2D, ATT or GEO rounding.
    pub fn from_coords(model: WeightModel, coords: Vec<(f64, f64)>) -> Result<Self> {
        let n = coords.len();
        if n < 4 {
            return Err(Error::TooFewVertices(n));
        }
        let metric: fn((f64, f64), (f64, f64)) -> i64 = match model {
            WeightModel::Euc2d => euc_2d,
            WeightModel::Att => att,
            WeightModel::Geo => geo,
            other => return Err(Error::UnsupportedWeightType(other.name().to_string())),
        };
        let mut matrix = vec![0.0; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                let d = metric(coords[u], coords[v]) as f64;
                matrix[u * n + v] = d;
                matrix[v * n + u] = d;
            }
        }
        let mut inst = Instance::from_matrix(model, n, matrix)?;
        inst.coords = Some(coords);
        Ok(inst)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> WeightModel {
        self.model
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn perturbation(&self) -> Option<Perturbation> {
        self.perturbation
    }

    /// True when every distance is an integer (TSPLIB models before perturbation).
    pub fn is_exact_integer(&self) -> bool {
        self.exact_integer
    }

    /// Unchecked distance lookup for hot loops. `u == v` returns 0.
    #[inline]
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        debug_assert!(u != v, "distance({u},{u}) queried");
        self.dist[u * self.n + v]
    }

    pub fn try_distance(&self, u: usize, v: usize) -> Result<f64> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfDistance(u));
        }
        Ok(self.dist[u * self.n + v])
    }

    pub fn min_positive_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                best = best.min(self.distance(u, v));
            }
        }
        best
    }

    /// Canonical dump with header `u,v,dist`, one row per pair u < v.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,dist\n");
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                out.push_str(&format!("{u},{v},{}\n", self.distance(u, v)));
            }
        }
        out
    }

    /// The three pairing sums of a 4-subset `[a,b,c,d]`:
    /// ab+cd, ac+bd, ad+bc.
    pub fn pairing_sums(&self, q: [usize; 4]) -> [f64; 3] {
        let d = |x, y| self.distance(x, y);
        let [a, b, c, e] = q;
        [d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)]
    }

    /// Whether every 4-subset has three distinct pairing sums.
    pub fn pairings_distinct(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let [x, y, z] = self.pairing_sums([a, b, c, d]);
                        if x == y || y == z || x == z {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// TSPLIB `nint`: `(int)(x + 0.5)`.
#[inline]
fn nint(x: f64) -> i64 {
    (x + 0.5) as i64
}

pub fn euc_2d(a: (f64, f64), b: (f64, f64)) -> i64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    nint((dx * dx + dy * dy).sqrt())
}

/// Pseudo-Euclidean ATT distance.
pub fn att(a: (f64, f64), b: (f64, f64)) -> i64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    let r = ((dx * dx + dy * dy) / 10.0).sqrt();
    let t = nint(r);
    if (t as f64) < r {
        t + 1
    } else {
        t
    }
}

/// Geographical distance on the idealized sphere of radius 6378.388 km.
/// Coordinates are DDD.MM (degrees, minutes); degrees are truncated.
pub fn geo(a: (f64, f64), b: (f64, f64)) -> i64 {
    #[allow(clippy::approx_constant)]
    const PI: f64 = 3.141592;
    const RRR: f64 = 6378.388;
    let rad = |x: f64| {
        let deg = x.trunc();
        let min = x - deg;
        PI * (deg + 5.0 * min / 3.0) / 180.0
    };
    let (lat_a, lon_a) = (rad(a.0), rad(a.1));
    let (lat_b, lon_b) = (rad(b.0), rad(b.1));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    let arg = (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).clamp(-1.0, 1.0);
    (RRR * arg.acos() + 1.0) as i64
}

/// Random instance with every distance uniform in (0, 10].
pub fn gen_random(n: usize, seed: u64) -> Result<Instance> {
    if n < 4 {
        return Err(Error::TooFewVertices(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = vec![0.0; n * n];
    for u in 0..n {
        for v in (u + 1)..n {
            let d = 10.0 * (1.0 - rng.gen::<f64>());
            matrix[u * n + v] = d;
            matrix[v * n + u] = d;
        }
    }
    Instance::from_matrix(WeightModel::RandomUniform, n, matrix)
}

/// Default perturbation magnitude: 1e-6 times the smallest distance.
pub fn default_magnitude(inst: &Instance) -> f64 {
    1e-6 * inst.min_positive_distance()
}

/// Adds independent noise in (0, magnitude] to every edge.
pub fn perturb(inst: &Instance, seed: u64, magnitude: f64) -> Result<Instance> {
    if !(magnitude.is_finite() && magnitude > 0.0) {
        return Err(Error::InvalidMagnitude(magnitude));
    }
    let n = inst.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PERTURB_STREAM);
    let mut out = inst.clone();
    for u in 0..n {
        for v in (u + 1)..n {
            let d = inst.distance(u, v) + magnitude * (1.0 - rng.gen::<f64>());
            out.dist[u * n + v] = d;
            out.dist[v * n + u] = d;
        }
    }
    out.exact_integer = out.dist.iter().all(|d| d.fract() == 0.0);
    out.perturbation = Some(Perturbation { seed, magnitude });
    Ok(out)
}

/// Number of unordered pairs on `n` vertices.
pub fn edge_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Lexicographic index of the pair `{u, v}`.
#[inline]
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// All pairs `(u, v)` with `u < v` in index order.
pub fn edges(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(edge_count(n));
    for u in 0..n {
        for v in (u + 1)..n {
            out.push((u, v));
        }
    }
    out
}
