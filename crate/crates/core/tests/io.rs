use freqk::instance::{att, euc_2d, geo, WeightModel};
use freqk::tsplib::{write_explicit, write_tour};
use freqk::{gen_random, parse_tour, parse_tsplib, perturb, Error, Instance, SubsetDp, SubsetSelection, Tour};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BURMA14: &str = "NAME: burma14
TYPE: TSP
DIMENSION: 14
EDGE_WEIGHT_TYPE: GEO
EDGE_WEIGHT_FORMAT: FUNCTION
DISPLAY_DATA_TYPE: COORD_DISPLAY
NODE_COORD_SECTION
   1  16.47       96.10
   2  16.47       94.44
   3  20.09       92.54
   4  22.39       93.37
   5  25.23       97.24
   6  22.00       96.05
   7  20.47       97.02
   8  17.20       96.29
   9  16.30       97.38
  10  14.05       98.12
  11  16.53       97.38
  12  21.52       95.59
  13  19.41       97.13
  14  20.09       94.55
EOF
";

#[test]
fn geo_matches_published_burma14_row() {
    let inst = parse_tsplib(BURMA14).unwrap();
    let row: Vec<f64> = (1..14).map(|v| inst.distance(0, v)).collect();
    assert_eq!(row, [153.0, 510.0, 706.0, 966.0, 581.0, 455.0, 70.0, 160.0, 372.0, 157.0, 567.0, 342.0, 398.0]);
}

#[test]
fn burma14_optimum_is_3323() {
    let inst = parse_tsplib(BURMA14).unwrap();
    let tour = SubsetDp::default().ohc(&inst, &SubsetSelection::full(&inst)).unwrap();
    assert_eq!(tour.length, 3323.0);
}

/// Reference formulas in the integer style of the TSPLIB C code.
mod reference {
    pub fn nint(x: f64) -> i32 {
        (x + 0.5) as i32
    }

    pub fn euc(xi: f64, yi: f64, xj: f64, yj: f64) -> i32 {
        let xd = xi - xj;
        let yd = yi - yj;
        nint(xd.hypot(yd))
    }

    pub fn att(xi: f64, yi: f64, xj: f64, yj: f64) -> i32 {
        let xd = xi - xj;
        let yd = yi - yj;
        let rij = ((xd * xd + yd * yd) / 10.0).sqrt();
        let tij = nint(rij);
        if f64::from(tij) < rij {
            tij + 1
        } else {
            tij
        }
    }

    #[allow(clippy::approx_constant)]
    fn radians(x: f64) -> f64 {
        let deg = x as i32;
        let min = x - f64::from(deg);
        3.141592 * (f64::from(deg) + 5.0 * min / 3.0) / 180.0
    }

    pub fn geo(xi: f64, yi: f64, xj: f64, yj: f64) -> i32 {
        let (lat_i, lon_i, lat_j, lon_j) = (radians(xi), radians(yi), radians(xj), radians(yj));
        let q1 = (lon_i - lon_j).cos();
        let q2 = (lat_i - lat_j).cos();
        let q3 = (lat_i + lat_j).cos();
        (6378.388 * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0) as i32
    }
}

#[test]
fn distances_match_reference_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let a = (rng.gen_range(0.0..10000.0), rng.gen_range(0.0..10000.0));
        let b = (rng.gen_range(0.0..10000.0), rng.gen_range(0.0..10000.0));
        assert_eq!(euc_2d(a, b), i64::from(reference::euc(a.0, a.1, b.0, b.1)), "{a:?} {b:?}");
        assert_eq!(att(a, b), i64::from(reference::att(a.0, a.1, b.0, b.1)), "{a:?} {b:?}");
        // DDD.MM with whole minutes in [0, 60)
        let g = |r: &mut ChaCha8Rng, span: i32| {
            let deg = r.gen_range(-span..span);
            let min = r.gen_range(0..60);
            let sign = if deg < 0 { -1.0 } else { 1.0 };
            f64::from(deg) + sign * f64::from(min) / 100.0
        };
        let p = (g(&mut rng, 80), g(&mut rng, 179));
        let q = (g(&mut rng, 80), g(&mut rng, 179));
        assert_eq!(geo(p, q), i64::from(reference::geo(p.0, p.1, q.0, q.1)), "{p:?} {q:?}");
    }
}

#[test]
fn explicit_round_trip_is_exact() {
    let inst = perturb(&gen_random(11, 4).unwrap(), 4, 1e-7).unwrap();
    let back = parse_tsplib(&write_explicit(&inst)).unwrap();
    assert_eq!(back.n(), 11);
    for u in 0..11 {
        for v in 0..11 {
            if u != v {
                assert_eq!(back.distance(u, v).to_bits(), inst.distance(u, v).to_bits());
            }
        }
    }
}

#[test]
fn explicit_formats_agree() {
    let full = "NAME: t\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n\
                EDGE_WEIGHT_SECTION\n0 1 2 3\n1 0 4 5\n2 4 0 6\n3 5 6 0\nEOF\n";
    let lower = "NAME: t\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW\n\
                 EDGE_WEIGHT_SECTION\n0\n1 0\n2 4 0\n3 5 6 0\nEOF\n";
    let upper = "NAME: t\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: UPPER_ROW\n\
                 EDGE_WEIGHT_SECTION\n1 2 3 4 5 6\nEOF\n";
    let a = parse_tsplib(full).unwrap();
    for other in [lower, upper] {
        let b = parse_tsplib(other).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    assert_eq!(a.distance(u, v), b.distance(u, v));
                }
            }
        }
    }
    assert_eq!(a.model(), WeightModel::ExplicitMatrix);
}

#[test]
fn rejects_asymmetric_and_short_matrices() {
    let asym = "TYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n\
                EDGE_WEIGHT_SECTION\n0 1 2 3\n9 0 4 5\n2 4 0 6\n3 5 6 0\nEOF\n";
    assert!(matches!(parse_tsplib(asym), Err(Error::Asymmetric { .. })));
    let short = "TYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: UPPER_ROW\n\
                 EDGE_WEIGHT_SECTION\n1 2 3 4 5\nEOF\n";
    assert!(parse_tsplib(short).is_err());
    let atsp = "TYPE: ATSP\nDIMENSION: 4\nEOF\n";
    assert!(matches!(parse_tsplib(atsp), Err(Error::UnsupportedProblemType(_))));
}

#[test]
fn tour_round_trip_and_validation() {
    let inst = parse_tsplib(BURMA14).unwrap();
    let tour = Tour::new(&inst, (0..14).rev().collect()).unwrap();
    let back = parse_tour(&write_tour(&tour, "burma14"), &inst).unwrap();
    assert_eq!(back.order, tour.order);
    assert_eq!(back.length, tour.length);
    assert!(Tour::new(&inst, vec![0, 1, 2]).is_err());
    assert!(Tour::new(&inst, (0..13).chain([0]).collect()).is_err());
    let bad = "TYPE: TOUR\nDIMENSION: 14\nTOUR_SECTION\n1\n2\n15\n-1\nEOF\n";
    assert!(parse_tour(bad, &inst).is_err());
}

#[test]
fn coordinate_instances_keep_integer_distances() {
    let inst =
        Instance::from_coords(WeightModel::Att, vec![(6734.0, 1453.0), (2233.0, 10.0), (5530.0, 1424.0), (401.0, 841.0)])
            .unwrap();
    assert!(inst.is_exact_integer());
    assert_eq!(inst.distance(0, 1), 1495.0);
}
