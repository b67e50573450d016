//! Exact planar geometry of convex bodies: predicates, transforms, separated
//! nets and Voronoi partitions.

mod body;
pub mod io;
pub mod net;
mod point;
mod polygon;
mod voronoi;

pub use body::{BoxNd, ConvexBody, Disk, DISK_POLYGON_VERTICES};
pub use net::{
    complete_cover, cover_radius, farthest_point_sites, greedy_net, greedy_net_with,
    interior_sample, NetConfig, SiteSet,
};
pub use point::{point_segment_distance, Point};
pub use polygon::{Polygon, CONVEXITY_TOL};
pub use voronoi::{voronoi_cells, voronoi_partition, PartitionPieces, PARTITION_TOL};

pub(crate) use polygon::clip_by_values;

/// Area / volume of a body.
pub fn volume(body: &ConvexBody) -> f64 {
    body.volume()
}

pub fn diameter(body: &ConvexBody) -> f64 {
    body.diameter()
}

pub fn inradius(body: &ConvexBody) -> f64 {
    body.inradius()
}

/// Intersection with `{x : normal . x <= offset}`.
pub fn clip_halfplane(poly: &Polygon, normal: Point, offset: f64) -> Option<Polygon> {
    poly.clip_halfplane(normal, offset)
}

pub fn intersect(a: &Polygon, b: &Polygon) -> Option<Polygon> {
    a.intersect(b)
}
