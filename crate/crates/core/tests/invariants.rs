use std::f64::consts::PI;

use proptest::prelude::*;

use sandwich_core::analytic::{box_spectrum, disk_spectrum};
use sandwich_core::certify::certify_lower;
use sandwich_core::cheeger::cheeger_bounds;
use sandwich_core::fem::{spectrum_with, FemConfig};
use sandwich_core::geometry::{
    farthest_point_sites, voronoi_partition, ConvexBody, Point, Polygon,
};
use sandwich_core::measure::symmetric_overlap;
use sandwich_core::BoundaryCondition::{Dirichlet, Neumann};

fn hull() -> impl Strategy<Value = Polygon> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6..16).prop_filter_map(
        "degenerate hull",
        |pts| {
            let pts: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            Polygon::convex_hull(&pts)
                .ok()
                .filter(|p| p.area() > 0.2 && p.inradius() > 0.1)
        },
    )
}

fn lengths() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..3.0, 1..5)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polygon_scaling(p in hull(), r in 0.2f64..5.0) {
        let q = p.scaled(r);
        prop_assert!(close(q.area(), r * r * p.area(), 1e-10));
        prop_assert!(close(q.diameter(), r * p.diameter(), 1e-10));
        prop_assert!(close(q.perimeter(), r * p.perimeter(), 1e-10));
        prop_assert!(close(q.inradius(), r * p.inradius(), 1e-6));
    }

    #[test]
    fn polygon_intersections(p in hull(), dx in -1.0f64..1.0, dy in -1.0f64..1.0) {
        let q = p.translated(Point::new(dx, dy));
        let a = p.intersection_area(&q);
        prop_assert!(a <= p.area().min(q.area()) * (1.0 + 1e-12));
        prop_assert!(close(a, q.intersection_area(&p), 1e-9));
        prop_assert!(close(p.intersection_area(&p), p.area(), 1e-12));
        prop_assert!(p.contains(p.centroid()));
        prop_assert!(p.inradius() <= 0.5 * p.diameter());
    }

    #[test]
    fn overlap_is_a_fraction(p in hull(), t in 0.0f64..1.0) {
        let c = p.centroid();
        prop_assert!(close(symmetric_overlap(&p.reflected(), Point::new(-c.x, -c.y)), symmetric_overlap(&p, c), 1e-9));
        let x = p.boundary_point(t);
        let y = Point::new(c.x + 0.5 * (x.x - c.x), c.y + 0.5 * (x.y - c.y));
        let o = symmetric_overlap(&p, y);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&o));
    }

    #[test]
    fn box_spectrum_scales(ls in lengths(), r in 0.25f64..4.0) {
        let scaled: Vec<f64> = ls.iter().map(|l| l * r).collect();
        for bc in [Neumann, Dirichlet] {
            let a = box_spectrum(&ls, bc, 8).unwrap();
            let b = box_spectrum(&scaled, bc, 8).unwrap();
            a.check_invariants().unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!(close(*y, x / (r * r), 1e-12));
            }
        }
    }

    #[test]
    fn dirichlet_dominates_neumann(ls in lengths()) {
        let n = box_spectrum(&ls, Neumann, 8).unwrap();
        let d = box_spectrum(&ls, Dirichlet, 8).unwrap();
        prop_assert_eq!(n.values[0], 0.0);
        for (x, y) in n.values.iter().zip(&d.values) {
            prop_assert!(x <= y);
        }
        let longest = ls.iter().cloned().fold(0.0, f64::max);
        prop_assert!(close(n.values[1], PI * PI / (longest * longest), 1e-12));
    }

    #[test]
    fn disk_spectrum_scales(r in 0.2f64..5.0) {
        let a = disk_spectrum(1.0, Neumann, 6).unwrap();
        let b = disk_spectrum(r, Neumann, 6).unwrap();
        prop_assert_eq!(b.values.clone(), a.scaled(r).values);
    }

    #[test]
    fn partitions_tile_the_domain(p in hull(), count in 1usize..6, seed in 0u64..1000) {
        let body: ConvexBody = p.clone().into();
        let sites = farthest_point_sites(&body, count, seed).unwrap();
        let pieces = voronoi_partition(&body, &sites).unwrap();
        pieces.validate().unwrap();
        let total: f64 = pieces.pieces.iter().map(Polygon::area).sum();
        prop_assert!(close(total, p.area(), 1e-9));
        prop_assert!(pieces.max_diameter() <= p.diameter() * (1.0 + 1e-12));

        let cert = certify_lower(&body, &pieces).unwrap();
        prop_assert_eq!(cert.l, pieces.len());
        let h = 1.0 / pieces.max_diameter();
        prop_assert!(close(cert.h_min_lower, h, 1e-12));
        prop_assert!(close(cert.lambda_lower, h * h / 4.0, 1e-12));
    }

    #[test]
    fn cheeger_bounds_are_ordered(p in hull()) {
        let b = cheeger_bounds(&p.into()).unwrap();
        prop_assert!(b.lower > 0.0 && b.lower <= b.upper);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fem_scaling_covariance(p in hull(), r in 0.5f64..2.0) {
        let cfg = FemConfig { richardson: false, ..FemConfig::default() };
        let h = p.diameter() / 12.0;
        let a = spectrum_with(&p.clone().into(), Neumann, 3, h, 1, &cfg).unwrap();
        let b = spectrum_with(&p.scaled(r).into(), Neumann, 3, h * r, 1, &cfg).unwrap();
        prop_assert!(a.spectrum.values[0].abs() < 1e-8);
        for (x, y) in a.spectrum.values[1..].iter().zip(&b.spectrum.values[1..]) {
            prop_assert!(close(*y, x / (r * r), 1e-6), "{} vs {}", y, x / (r * r));
        }
    }
}
