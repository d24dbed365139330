//! Great-circle distance and point-to-tract localization.
//!
//! Distances use the haversine formula on a sphere of radius
//! [`EARTH_RADIUS_METERS`]. Containment is even-odd (ray casting) over
//! polygon rings in plain degree space, with points on a boundary counted as
//! inside. Localization goes through a uniform grid index over tract
//! bounding boxes so lookups stay fast on large tract sets while returning
//! exactly what a brute-force scan would.

use crate::error::Error;
use crate::Result;
use std::collections::BTreeMap;

/// Mean Earth radius in meters used by all distance computations.
pub const EARTH_RADIUS_METERS: f64 = 6_371_000.0;

/// A geographic position in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }
}

/// Great-circle distance in meters between two positions.
///
/// Symmetric, non-negative, and zero for identical inputs.
///
/// ```
/// use geomood::geo::{haversine, LatLon};
///
/// let downtown = LatLon::new(34.0522, -118.2437);
/// let pasadena = LatLon::new(34.1478, -118.1445);
/// let d = haversine(downtown, pasadena);
/// assert!((d - 14_015.4).abs() < 1.0);
/// assert_eq!(haversine(downtown, downtown), 0.0);
/// ```
pub fn haversine(a: LatLon, b: LatLon) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_METERS * h.sqrt().atan2((1.0 - h).sqrt())
}

/// A closed ring of `[lon, lat]` vertices; first and last vertex are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring(pub Vec<[f64; 2]>);

impl Ring {
    /// Builds a ring, closing it if the caller left it open.
    ///
    /// Returns `None` when fewer than three distinct vertices remain — such
    /// a ring has no interior.
    pub fn closed(mut points: Vec<[f64; 2]>) -> Option<Ring> {
        if points.first() != points.last() {
            match points.first().copied() {
                Some(first) => points.push(first),
                None => return None,
            }
        }
        if points.len() < 4 {
            return None;
        }
        Some(Ring(points))
    }

    fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in &self.0 {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        }
        b
    }
}

/// A polygon: one exterior ring followed by zero or more holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub rings: Vec<Ring>,
}

/// One tract's footprint: one or more polygon parts (islands, enclaves).
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub polygons: Vec<Polygon>,
}

impl Geometry {
    /// Boundary-inclusive containment test in degree space.
    ///
    /// A point is inside when it lies on any ring of any part, or when an
    /// eastward ray crosses the part's rings an odd number of times (so
    /// holes exclude and islands include).
    pub fn contains(&self, p: LatLon) -> bool {
        self.polygons.iter().any(|poly| polygon_contains(poly, p))
    }

    /// Axis-aligned bounding box `[min_lon, min_lat, max_lon, max_lat]`.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for poly in &self.polygons {
            for ring in &poly.rings {
                let rb = ring.bbox();
                b[0] = b[0].min(rb[0]);
                b[1] = b[1].min(rb[1]);
                b[2] = b[2].max(rb[2]);
                b[3] = b[3].max(rb[3]);
            }
        }
        b
    }
}

/// True when `p` lies on the closed segment `a`-`b` (exact arithmetic on the
/// collinearity cross product, so axis-aligned boundaries test exactly).
fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    cross == 0.0
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

fn polygon_contains(poly: &Polygon, p: LatLon) -> bool {
    let (x, y) = (p.lon, p.lat);
    let mut inside = false;
    for ring in &poly.rings {
        for w in ring.0.windows(2) {
            let (a, b) = (w[0], w[1]);
            if on_segment([x, y], a, b) {
                return true;
            }
            // Half-open vertex rule: an edge is crossed when its endpoints
            // straddle the ray's latitude, counting each vertex once.
            if (a[1] > y) != (b[1] > y) {
                let x_cross = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if x < x_cross {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Uniform-grid spatial index over tract geometries.
///
/// Cells hold the indices of every tract whose bounding box overlaps the
/// cell, so a point query inspects one cell and gets a superset of the
/// tracts that can contain the point.
#[derive(Debug)]
pub struct SpatialIndex {
    entries: Vec<IndexEntry>,
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
    cell_w: f64,
    cell_h: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

#[derive(Debug)]
struct IndexEntry {
    tract_id: String,
    geometry: Geometry,
    bbox: [f64; 4],
}

impl SpatialIndex {
    /// Builds an index over `(tract_id, geometry)` pairs.
    ///
    /// Tract ids must be unique; an empty input yields an index that locates
    /// nothing.
    pub fn build(tracts: Vec<(String, Geometry)>) -> Result<SpatialIndex> {
        let mut seen = BTreeMap::new();
        for (i, (id, _)) in tracts.iter().enumerate() {
            if seen.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateTract {
                    tract_id: id.clone(),
                });
            }
        }
        let entries: Vec<IndexEntry> = tracts
            .into_iter()
            .map(|(tract_id, geometry)| {
                let bbox = geometry.bbox();
                IndexEntry {
                    tract_id,
                    geometry,
                    bbox,
                }
            })
            .collect();

        let mut min_x = f64::INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for e in &entries {
            min_x = min_x.min(e.bbox[0]);
            min_y = min_y.min(e.bbox[1]);
            max_x = max_x.max(e.bbox[2]);
            max_y = max_y.max(e.bbox[3]);
        }
        if entries.is_empty() {
            return Ok(SpatialIndex {
                entries,
                min_x: 0.0,
                min_y: 0.0,
                max_x: 0.0,
                max_y: 0.0,
                cell_w: 1.0,
                cell_h: 1.0,
                cols: 1,
                rows: 1,
                cells: vec![Vec::new()],
            });
        }

        let side = ((entries.len() as f64).sqrt().ceil() as usize).max(1);
        let (cols, rows) = (side, side);
        let cell_w = ((max_x - min_x) / cols as f64).max(f64::MIN_POSITIVE);
        let cell_h = ((max_y - min_y) / rows as f64).max(f64::MIN_POSITIVE);

        let mut cells = vec![Vec::new(); cols * rows];
        for (i, e) in entries.iter().enumerate() {
            let c0 = cell_coord(e.bbox[0], min_x, cell_w, cols);
            let c1 = cell_coord(e.bbox[2], min_x, cell_w, cols);
            let r0 = cell_coord(e.bbox[1], min_y, cell_h, rows);
            let r1 = cell_coord(e.bbox[3], min_y, cell_h, rows);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    cells[r * cols + c].push(i as u32);
                }
            }
        }

        Ok(SpatialIndex {
            entries,
            min_x,
            min_y,
            max_x,
            max_y,
            cell_w,
            cell_h,
            cols,
            rows,
            cells,
        })
    }

    /// Number of indexed tracts.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Ids of every tract whose bounding box could contain `p` — always a
    /// superset of the tracts that actually contain it.
    pub fn candidate_ids(&self, p: LatLon) -> Vec<&str> {
        self.cell_candidates(p)
            .map(|idx| self.entries[idx].tract_id.as_str())
            .collect()
    }

    fn cell_candidates(&self, p: LatLon) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = (p.lon, p.lat);
        let out_of_range = self.entries.is_empty()
            || x < self.min_x
            || x > self.max_x
            || y < self.min_y
            || y > self.max_y;
        let cell = if out_of_range {
            &[][..]
        } else {
            let c = cell_coord(x, self.min_x, self.cell_w, self.cols);
            let r = cell_coord(y, self.min_y, self.cell_h, self.rows);
            &self.cells[r * self.cols + c][..]
        };
        cell.iter().map(|&i| i as usize)
    }

    /// Locates `p`: the lexicographically smallest id among all tracts that
    /// contain the point, or `None` when no tract does.
    pub fn locate(&self, p: LatLon) -> Option<&str> {
        self.cell_candidates(p)
            .filter_map(|idx| {
                let e = &self.entries[idx];
                let b = e.bbox;
                let inside_bbox =
                    p.lon >= b[0] && p.lon <= b[2] && p.lat >= b[1] && p.lat <= b[3];
                (inside_bbox && e.geometry.contains(p)).then_some(e.tract_id.as_str())
            })
            .min()
    }
}

fn cell_coord(v: f64, min: f64, cell: f64, n: usize) -> usize {
    let raw = ((v - min) / cell).floor();
    if raw < 0.0 {
        0
    } else {
        (raw as usize).min(n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, side: f64) -> Ring {
        Ring::closed(vec![
            [x0, y0],
            [x0 + side, y0],
            [x0 + side, y0 + side],
            [x0, y0 + side],
        ])
        .unwrap()
    }

    fn geom(rings: Vec<Ring>) -> Geometry {
        Geometry {
            polygons: vec![Polygon { rings }],
        }
    }

    // Reference distance computed independently with Vincenty's inverse
    // formula on the WGS84 ellipsoid; the spherical figure must stay within
    // half a percent of it.
    #[test]
    fn haversine_matches_ellipsoidal_reference_within_half_percent() {
        let a = LatLon::new(34.0522, -118.2437);
        let b = LatLon::new(34.1478, -118.1445);
        let reference_m = 14_008.733901501535;
        let got = haversine(a, b);
        let rel = (got - reference_m).abs() / reference_m;
        assert!(rel < 0.005, "relative error {rel} too large (got {got})");
    }

    #[test]
    fn haversine_identity_symmetry_and_antipodes() {
        let a = LatLon::new(34.0522, -118.2437);
        let b = LatLon::new(34.1478, -118.1445);
        assert_eq!(haversine(a, a), 0.0);
        assert_eq!(haversine(a, b), haversine(b, a));

        // Antipodal points on the equator: half the sphere's circumference.
        let east = LatLon::new(0.0, 90.0);
        let west = LatLon::new(0.0, -90.0);
        let half_circumference = std::f64::consts::PI * EARTH_RADIUS_METERS;
        assert!((haversine(east, west) - half_circumference).abs() < 1e-6);
    }

    #[test]
    fn containment_includes_boundary_and_vertices() {
        let g = geom(vec![square(0.0, 0.0, 1.0)]);
        assert!(g.contains(LatLon::new(0.5, 0.5)));
        assert!(g.contains(LatLon::new(0.0, 0.5)), "edge point");
        assert!(g.contains(LatLon::new(0.0, 0.0)), "vertex");
        assert!(g.contains(LatLon::new(1.0, 1.0)), "far vertex");
        assert!(!g.contains(LatLon::new(0.5, 1.0001)));
        assert!(!g.contains(LatLon::new(-0.0001, 0.5)));
    }

    #[test]
    fn holes_exclude_and_their_boundary_is_inside() {
        let outer = square(0.0, 0.0, 4.0);
        let hole = square(1.0, 1.0, 2.0);
        let g = geom(vec![outer, hole]);
        assert!(g.contains(LatLon::new(0.5, 0.5)), "between rings");
        assert!(!g.contains(LatLon::new(2.0, 2.0)), "inside the hole");
        assert!(g.contains(LatLon::new(1.0, 2.0)), "hole boundary");
        assert!(g.contains(LatLon::new(1.0, 1.0)), "hole vertex");
    }

    #[test]
    fn multipolygon_island_inside_anothers_hole() {
        let donut = geom(vec![square(0.0, 0.0, 4.0), square(1.0, 1.0, 2.0)]);
        let island = Geometry {
            polygons: vec![
                Polygon {
                    rings: vec![square(10.0, 10.0, 1.0)],
                },
                Polygon {
                    rings: vec![square(1.5, 1.5, 1.0)],
                },
            ],
        };
        let center = LatLon::new(2.0, 2.0);
        assert!(!donut.contains(center));
        assert!(island.contains(center));
        assert!(island.contains(LatLon::new(10.5, 10.5)));
    }

    #[test]
    fn ring_closure_is_automatic_and_degenerate_rings_are_rejected() {
        let open = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let ring = Ring::closed(open).unwrap();
        assert_eq!(ring.0.first(), ring.0.last());
        assert_eq!(ring.0.len(), 5);

        assert!(Ring::closed(vec![[0.0, 0.0], [1.0, 1.0]]).is_none());
        assert!(Ring::closed(vec![]).is_none());
    }

    #[test]
    fn locate_prefers_smallest_tract_id_on_shared_boundaries() {
        let left = ("B".to_string(), geom(vec![square(0.0, 0.0, 1.0)]));
        let right = ("A".to_string(), geom(vec![square(1.0, 0.0, 1.0)]));
        let index = SpatialIndex::build(vec![left, right]).unwrap();
        // lon = 1.0 lies on the shared edge of both squares.
        assert_eq!(index.locate(LatLon::new(0.5, 1.0)), Some("A"));
        assert_eq!(index.locate(LatLon::new(0.5, 0.5)), Some("B"));
        assert_eq!(index.locate(LatLon::new(0.5, 1.5)), Some("A"));
        assert_eq!(index.locate(LatLon::new(0.5, 9.0)), None);
    }

    #[test]
    fn duplicate_tract_ids_are_rejected() {
        let a = ("T1".to_string(), geom(vec![square(0.0, 0.0, 1.0)]));
        let b = ("T1".to_string(), geom(vec![square(2.0, 0.0, 1.0)]));
        match SpatialIndex::build(vec![a, b]) {
            Err(Error::DuplicateTract { tract_id }) => assert_eq!(tract_id, "T1"),
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn empty_index_locates_nothing() {
        let index = SpatialIndex::build(vec![]).unwrap();
        assert!(index.is_empty());
        assert_eq!(index.locate(LatLon::new(0.0, 0.0)), None);
        assert!(index.candidate_ids(LatLon::new(0.0, 0.0)).is_empty());
    }

    #[test]
    fn candidates_cover_true_containments_on_cell_edges() {
        // A 3x3 patchwork; probe points on every cell boundary.
        let mut tracts = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                tracts.push((
                    format!("G{r}{c}"),
                    geom(vec![square(c as f64, r as f64, 1.0)]),
                ));
            }
        }
        let index = SpatialIndex::build(tracts.clone()).unwrap();
        for r in 0..=6 {
            for c in 0..=6 {
                let p = LatLon::new(r as f64 * 0.5, c as f64 * 0.5);
                let candidates = index.candidate_ids(p);
                for (id, g) in &tracts {
                    if g.contains(p) {
                        assert!(
                            candidates.contains(&id.as_str()),
                            "candidate set at {p:?} missed {id}"
                        );
                    }
                }
            }
        }
    }
}
