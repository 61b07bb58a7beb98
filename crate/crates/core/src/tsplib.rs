//! TSPLIB `.tsp` and `.tour` reading and writing.

use crate::error::{Error, Result};
use crate::instance::{Instance, WeightModel};

/// A Hamiltonian cycle with its length.
///
/// For tours of a whole instance `order` is a permutation of `0..n`. Cycles on
/// a subset selection list the selection's vertices instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    /// Validates `order` as a permutation of `0..inst.n()` and measures it.
    pub fn new(inst: &Instance, order: Vec<usize>) -> Result<Self> {
        let n = inst.n();
        if order.len() != n {
            return Err(Error::TourMismatch { expected: n, found: order.len() });
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if seen[v] {
                return Err(Error::InvalidTour(format!("vertex {} repeated", v + 1)));
            }
            seen[v] = true;
        }
        let length = cycle_length(inst, &order);
        Ok(Tour { order, length })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Cycle edges as `(min, max)` pairs in tour order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.order.len();
        (0..k)
            .map(|t| {
                let (a, b) = (self.order[t], self.order[(t + 1) % k]);
                (a.min(b), a.max(b))
            })
            .collect()
    }

    /// Dense membership table over `n` vertices.
    pub fn edge_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n * n];
        for (a, b) in self.edges() {
            mask[a * n + b] = true;
            mask[b * n + a] = true;
        }
        mask
    }

    /// Same cycle up to rotation and direction.
    pub fn same_cycle(&self, other: &Tour) -> bool {
        let mut a = self.edges();
        let mut b = other.edges();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

pub(crate) fn cycle_length(inst: &Instance, order: &[usize]) -> f64 {
    let k = order.len();
    (0..k).map(|t| inst.distance(order[t], order[(t + 1) % k])).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MatrixFormat {
    Full,
    UpperRow,
    LowerRow,
    UpperDiagRow,
    LowerDiagRow,
}

impl MatrixFormat {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "FULL_MATRIX" => MatrixFormat::Full,
            "UPPER_ROW" => MatrixFormat::UpperRow,
            "LOWER_ROW" => MatrixFormat::LowerRow,
            "UPPER_DIAG_ROW" => MatrixFormat::UpperDiagRow,
            "LOWER_DIAG_ROW" => MatrixFormat::LowerDiagRow,
            other => return Err(Error::UnsupportedWeightFormat(other.to_string())),
        })
    }

    fn entries(self, n: usize) -> usize {
        match self {
            MatrixFormat::Full => n * n,
            MatrixFormat::UpperRow | MatrixFormat::LowerRow => n * (n - 1) / 2,
            MatrixFormat::UpperDiagRow | MatrixFormat::LowerDiagRow => n * (n + 1) / 2,
        }
    }

    fn cells(self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.entries(n));
        for r in 0..n {
            let cols = match self {
                MatrixFormat::Full => 0..n,
                MatrixFormat::UpperRow => (r + 1)..n,
                MatrixFormat::LowerRow => 0..r,
                MatrixFormat::UpperDiagRow => r..n,
                MatrixFormat::LowerDiagRow => 0..(r + 1),
            };
            out.extend(cols.map(|c| (r, c)));
        }
        out
    }
}

/// Key/value header plus the numeric sections a file carried.
#[derive(Default)]
struct Sections {
    header: Vec<(String, String)>,
    coords: Option<Vec<(usize, Vec<String>)>>,
    weights: Option<Vec<(usize, String)>>,
    tour: Option<Vec<(usize, String)>>,
}

impl Sections {
    fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn is_keyword(token: &str) -> bool {
    token.starts_with(|c: char| c.is_ascii_alphabetic())
}

fn split_sections(text: &str) -> Result<Sections> {
    #[derive(PartialEq)]
    enum Mode {
        Header,
        Coords,
        Weights,
        Tour,
        Skip,
    }
    let mut s = Sections::default();
    let mut mode = Mode::Header;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let first = line.split_whitespace().next().unwrap_or("");
        if is_keyword(first) {
            let key = line.split(':').next().unwrap_or("").trim().to_ascii_uppercase();
            match key.as_str() {
                "EOF" => break,
                "NODE_COORD_SECTION" => {
                    mode = Mode::Coords;
                    s.coords.get_or_insert_with(Vec::new);
                }
                "EDGE_WEIGHT_SECTION" => {
                    mode = Mode::Weights;
                    s.weights.get_or_insert_with(Vec::new);
                }
                "TOUR_SECTION" => {
                    mode = Mode::Tour;
                    s.tour.get_or_insert_with(Vec::new);
                }
                k if k.ends_with("_SECTION") => mode = Mode::Skip,
                _ => {
                    let value = match line.split_once(':') {
                        Some((_, v)) => v.trim().to_string(),
                        None => line[first.len()..].trim().to_string(),
                    };
                    s.header.push((key, value));
                    mode = Mode::Header;
                }
            }
            continue;
        }
        match mode {
            Mode::Header => return Err(parse_err(lineno, format!("unexpected data `{line}`"))),
            Mode::Skip => {}
            Mode::Coords => {
                let toks: Vec<String> = line.split_whitespace().map(str::to_string).collect();
                s.coords.as_mut().unwrap().push((lineno, toks));
            }
            Mode::Weights => {
                let w = s.weights.as_mut().unwrap();
                w.extend(line.split_whitespace().map(|t| (lineno, t.to_string())));
            }
            Mode::Tour => {
                let t = s.tour.as_mut().unwrap();
                t.extend(line.split_whitespace().map(|x| (lineno, x.to_string())));
            }
        }
    }
    Ok(s)
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a number")))
}

fn dimension(s: &Sections) -> Result<Option<usize>> {
    match s.get("DIMENSION") {
        None => Ok(None),
        Some(d) => d
            .parse::<usize>()
            .map(Some)
            .map_err(|_| parse_err(0, format!("bad DIMENSION `{d}`"))),
    }
}

/// Parses a symmetric TSPLIB instance.
pub fn parse_tsplib(text: &str) -> Result<Instance> {
    let s = split_sections(text)?;
    if let Some(t) = s.get("TYPE") {
        let t = t.split_whitespace().next().unwrap_or("");
        if t != "TSP" {
            return Err(Error::UnsupportedProblemType(t.to_string()));
        }
    }
    let n = dimension(&s)?.ok_or_else(|| parse_err(0, "missing DIMENSION"))?;
    if n < 4 {
        return Err(Error::TooFewVertices(n));
    }
    let wtype = s.get("EDGE_WEIGHT_TYPE").ok_or_else(|| parse_err(0, "missing EDGE_WEIGHT_TYPE"))?;
    let inst = match wtype {
        "EUC_2D" | "ATT" | "GEO" => {
            let model = match wtype {
                "EUC_2D" => WeightModel::Euc2d,
                "ATT" => WeightModel::Att,
                _ => WeightModel::Geo,
            };
            let rows = s.coords.as_ref().ok_or_else(|| parse_err(0, "missing NODE_COORD_SECTION"))?;
            if rows.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
            }
            let mut coords = vec![None; n];
            for (line, toks) in rows {
                if toks.len() != 3 {
                    return Err(parse_err(*line, "expected `id x y`"));
                }
                let id: usize = toks[0]
                    .parse()
                    .map_err(|_| parse_err(*line, format!("bad node id `{}`", toks[0])))?;
                if id == 0 || id > n {
                    return Err(parse_err(*line, format!("node id {id} outside 1..={n}")));
                }
                if coords[id - 1].is_some() {
                    return Err(parse_err(*line, format!("node id {id} repeated")));
                }
                coords[id - 1] = Some((parse_f64(*line, &toks[1])?, parse_f64(*line, &toks[2])?));
            }
            let coords: Vec<(f64, f64)> = coords.into_iter().map(Option::unwrap).collect();
            Instance::from_coords(model, coords)?
        }
        "EXPLICIT" => {
            let fmt = MatrixFormat::parse(
                s.get("EDGE_WEIGHT_FORMAT").ok_or_else(|| parse_err(0, "missing EDGE_WEIGHT_FORMAT"))?,
            )?;
            let toks = s.weights.as_ref().ok_or_else(|| parse_err(0, "missing EDGE_WEIGHT_SECTION"))?;
            let want = fmt.entries(n);
            if toks.len() != want {
                return Err(Error::DimensionMismatch { expected: want, found: toks.len() });
            }
            let mut matrix = vec![f64::NAN; n * n];
            for ((r, c), (line, tok)) in fmt.cells(n).into_iter().zip(toks) {
                let w = parse_f64(*line, tok)?;
                if fmt == MatrixFormat::Full {
                    matrix[r * n + c] = w;
                } else {
                    matrix[r * n + c] = w;
                    matrix[c * n + r] = w;
                }
            }
            Instance::from_matrix(WeightModel::ExplicitMatrix, n, matrix)?
        }
        other => return Err(Error::UnsupportedWeightType(other.to_string())),
    };
    Ok(match s.get("NAME") {
        Some(name) => inst.with_name(name),
        None => inst,
    })
}

/// Writes any instance as an EXPLICIT `UPPER_ROW` file.
pub fn write_explicit(inst: &Instance) -> String {
    let n = inst.n();
    let mut out = String::new();
    out.push_str(&format!("NAME : {}\n", inst.name().unwrap_or("instance")));
    out.push_str("TYPE : TSP\n");
    out.push_str(&format!("DIMENSION : {n}\n"));
    out.push_str("EDGE_WEIGHT_TYPE : EXPLICIT\n");
    out.push_str("EDGE_WEIGHT_FORMAT : UPPER_ROW\n");
    out.push_str("EDGE_WEIGHT_SECTION\n");
    for u in 0..n.saturating_sub(1) {
        let row: Vec<String> = ((u + 1)..n).map(|v| format!("{}", inst.distance(u, v))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str("EOF\n");
    out
}

/// Parses a TSPLIB tour file against `inst`.
pub fn parse_tour(text: &str, inst: &Instance) -> Result<Tour> {
    let s = split_sections(text)?;
    if let Some(d) = dimension(&s)? {
        if d != inst.n() {
            return Err(Error::TourMismatch { expected: inst.n(), found: d });
        }
    }
    let toks = s.tour.as_ref().ok_or_else(|| parse_err(0, "missing TOUR_SECTION"))?;
    let mut order = Vec::with_capacity(inst.n());
    for (line, tok) in toks {
        let id: i64 = tok
            .parse()
            .map_err(|_| parse_err(*line, format!("bad tour entry `{tok}`")))?;
        if id == -1 {
            break;
        }
        if id < 1 || id as usize > inst.n() {
            return Err(Error::VertexOutOfRange { vertex: id.max(0) as usize, n: inst.n() });
        }
        order.push(id as usize - 1);
    }
    if order.len() < inst.n() {
        let mut seen = vec![false; inst.n()];
        for &v in &order {
            seen[v] = true;
        }
        if order.iter().collect::<std::collections::HashSet<_>>().len() == order.len() {
            let missing = seen.iter().position(|s| !s).unwrap_or(0);
            return Err(Error::InvalidTour(format!("vertex {} missing", missing + 1)));
        }
    }
    Tour::new(inst, order)
}

/// Writes `tour` in TSPLIB format with 1-based ids.
pub fn write_tour(tour: &Tour, name: &str) -> String {
    let mut out = format!(
        "NAME : {name}\nTYPE : TOUR\nCOMMENT : length {}\nDIMENSION : {}\nTOUR_SECTION\n",
        tour.length,
        tour.n()
    );
    for v in &tour.order {
        out.push_str(&format!("{}\n", v + 1));
    }
    out.push_str("-1\nEOF\n");
    out
}
