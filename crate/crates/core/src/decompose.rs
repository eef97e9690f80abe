//! Splitting irregular partitions (concave, or too elongated) into convex
//! pieces joined by virtual doors.

use crate::error::SpaceError;
use crate::geom::{self, Containment, Point2, Rect};
use crate::space::{Door, DoorId, IndoorPoint, IndoorSpace, Partition, PartitionId, PartitionKind};

/// MBR aspect ratio above which a partition counts as irregular.
pub const MAX_ASPECT: f64 = 4.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// Convex counter-clockwise rings, in a deterministic order.
    pub pieces: Vec<Vec<Point2>>,
    /// Virtual doors as (piece a, piece b, location), a < b.
    pub virtual_doors: Vec<(usize, usize, Point2)>,
}

pub fn is_irregular(ring: &[Point2], max_aspect: f64) -> bool {
    let r = geom::normalize_ring(ring);
    !geom::reflex_vertices(&r).is_empty() || Rect::bounding(&r).is_some_and(|m| m.aspect_ratio() > max_aspect + 1e-9)
}

/// Decomposes one polygon. Cuts run perpendicular to the longer side of the
/// original MBR (vertical cuts when it is at least as wide as tall).
pub fn decompose_polygon(ring: &[Point2], max_aspect: f64) -> Option<Decomposition> {
    let ring = geom::normalize_ring(ring);
    if ring.len() < 3 || geom::area(&ring) <= 1e-12 || !geom::is_simple(&ring) {
        return None;
    }
    let mbr = Rect::bounding(&ring)?;
    let vertical = mbr.width() >= mbr.height();

    let mut stack = vec![ring];
    let mut convex = Vec::new();
    let mut guard = 0usize;
    while let Some(poly) = stack.pop() {
        guard += 1;
        if guard > 100_000 {
            return None;
        }
        let reflex = geom::reflex_vertices(&poly);
        if let Some(&i) = reflex.first() {
            let (a, b) = split_at_reflex(&poly, i, vertical)?;
            stack.push(b);
            stack.push(a);
        } else {
            convex.push(poly);
        }
    }

    let mut pieces = Vec::new();
    for poly in convex {
        split_aspect(poly, max_aspect, &mut pieces, 0);
    }
    pieces.sort_by(|a, b| {
        let (ra, rb) = (Rect::bounding(a).unwrap(), Rect::bounding(b).unwrap());
        ra.min_x
            .total_cmp(&rb.min_x)
            .then(ra.min_y.total_cmp(&rb.min_y))
            .then(ra.max_x.total_cmp(&rb.max_x))
            .then(ra.max_y.total_cmp(&rb.max_y))
    });

    let mut virtual_doors = Vec::new();
    for i in 0..pieces.len() {
        for j in (i + 1)..pieces.len() {
            if let Some(p) = shared_edge_midpoint(&pieces[i], &pieces[j]) {
                virtual_doors.push((i, j, p));
            }
        }
    }
    Some(Decomposition { pieces, virtual_doors })
}

/// Cuts `poly` along the axis-parallel ray from reflex vertex `i` into the
/// interior, trying both directions along the cut axis.
fn split_at_reflex(poly: &[Point2], i: usize, vertical: bool) -> Option<(Vec<Point2>, Vec<Point2>)> {
    let dirs = if vertical {
        [Point2::new(0.0, 1.0), Point2::new(0.0, -1.0)]
    } else {
        [Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)]
    };
    let mut cands = dirs.to_vec();
    // Fall back to the other axis if neither direction enters the interior
    // (cannot happen for a reflex vertex of a simple polygon, kept for safety).
    cands.extend([Point2::new(dirs[0].y, dirs[0].x), Point2::new(dirs[1].y, dirs[1].x)]);
    let v = poly[i];
    for dir in cands {
        let probe = v.add(dir.scale(1e-4));
        if geom::classify_point(poly, probe) != Containment::Inside {
            continue;
        }
        if let Some((edge, hit)) = ray_hit(poly, i, dir) {
            return Some(cut(poly, i, edge, hit));
        }
    }
    None
}

/// Nearest boundary hit of the ray from vertex `i` along `dir`.
fn ray_hit(poly: &[Point2], i: usize, dir: Point2) -> Option<(usize, Point2)> {
    let n = poly.len();
    let v = poly[i];
    let mut best: Option<(f64, usize, Point2)> = None;
    for j in 0..n {
        if j == i || (j + 1) % n == i {
            continue;
        }
        let (c, d) = (poly[j], poly[(j + 1) % n]);
        let cd = d.sub(c);
        let denom = dir.cross(cd);
        let vc = c.sub(v);
        let hit = if denom.abs() < 1e-15 {
            if vc.cross(dir).abs() > 1e-9 {
                continue;
            }
            // collinear edge: nearest endpoint ahead
            let (sc, sd) = (vc.dot(dir), d.sub(v).dot(dir));
            let s = match (sc > 1e-9, sd > 1e-9) {
                (true, true) => sc.min(sd),
                (true, false) => sc,
                (false, true) => sd,
                _ => continue,
            };
            (s, v.add(dir.scale(s)))
        } else {
            let s = vc.cross(cd) / denom;
            let u = vc.cross(dir) / denom;
            if s <= 1e-9 || !(-1e-12..=1.0 + 1e-12).contains(&u) {
                continue;
            }
            (s, c.lerp(d, u.clamp(0.0, 1.0)))
        };
        let mut h = hit.1;
        // keep the cut exactly axis-parallel
        if dir.x == 0.0 {
            h.x = v.x;
        } else if dir.y == 0.0 {
            h.y = v.y;
        }
        if best.as_ref().is_none_or(|b| hit.0 < b.0) {
            best = Some((hit.0, j, h));
        }
    }
    best.map(|(_, j, h)| (j, h))
}

/// Splits the ring along the chord from vertex `i` to point `hit` on edge `edge`.
fn cut(poly: &[Point2], i: usize, edge: usize, hit: Point2) -> (Vec<Point2>, Vec<Point2>) {
    let n = poly.len();
    // a: i → ... → edge start → hit
    let mut a = Vec::new();
    let mut k = i;
    loop {
        a.push(poly[k]);
        if k == edge {
            break;
        }
        k = (k + 1) % n;
    }
    a.push(hit);
    // b: hit → edge end → ... → i
    let mut b = vec![hit];
    let mut k = (edge + 1) % n;
    loop {
        b.push(poly[k]);
        if k == i {
            break;
        }
        k = (k + 1) % n;
    }
    (geom::normalize_ring(&a), geom::normalize_ring(&b))
}

fn split_aspect(poly: Vec<Point2>, max_aspect: f64, out: &mut Vec<Vec<Point2>>, depth: usize) {
    let r = Rect::bounding(&poly).expect("non-empty piece");
    let aspect = r.aspect_ratio();
    if aspect <= max_aspect + 1e-9 || depth > 8 {
        out.push(poly);
        return;
    }
    let k = (aspect / max_aspect).ceil().max(2.0) as usize;
    let vertical = r.width() >= r.height();
    let (lo, len) = if vertical { (r.min_x, r.width()) } else { (r.min_y, r.height()) };
    for s in 0..k {
        let a = lo + len * s as f64 / k as f64;
        let b = if s + 1 == k { lo + len } else { lo + len * (s + 1) as f64 / k as f64 };
        let slice = geom::clip_slab(&poly, vertical, a, b);
        if slice.len() >= 3 && geom::area(&slice) > 1e-12 {
            split_aspect(slice, max_aspect, out, depth + 1);
        }
    }
}

/// Midpoint of the longest collinear overlap between an edge of `a` and an edge of `b`.
fn shared_edge_midpoint(a: &[Point2], b: &[Point2]) -> Option<Point2> {
    let (ra, rb) = (Rect::bounding(a)?, Rect::bounding(b)?);
    if ra.min_x > rb.max_x + 1e-9 || rb.min_x > ra.max_x + 1e-9 || ra.min_y > rb.max_y + 1e-9 || rb.min_y > ra.max_y + 1e-9 {
        return None;
    }
    let mut best: Option<(f64, Point2)> = None;
    for i in 0..a.len() {
        let (p, q) = (a[i], a[(i + 1) % a.len()]);
        let pq = q.sub(p);
        let len = pq.dot(pq).sqrt();
        if len == 0.0 {
            continue;
        }
        let dir = pq.scale(1.0 / len);
        for j in 0..b.len() {
            let (c, d) = (b[j], b[(j + 1) % b.len()]);
            if dir.cross(c.sub(p)).abs() > 1e-7 || dir.cross(d.sub(p)).abs() > 1e-7 {
                continue;
            }
            let (tc, td) = (c.sub(p).dot(dir), d.sub(p).dot(dir));
            let lo = tc.min(td).max(0.0);
            let hi = tc.max(td).min(len);
            if hi - lo > 1e-6 && best.as_ref().is_none_or(|b| hi - lo > b.0) {
                best = Some((hi - lo, p.add(dir.scale((lo + hi) / 2.0))));
            }
        }
    }
    best.map(|b| b.1)
}

/// Decomposes partition `v` of a space.
pub fn decompose_partition(space: &IndoorSpace, v: PartitionId) -> Result<Decomposition, SpaceError> {
    let p = space.partition(v);
    if p.is_outdoor() || p.kind == PartitionKind::Staircase {
        return Err(SpaceError::DegeneratePolygon(v));
    }
    if !is_irregular(&p.boundary, MAX_ASPECT) {
        return Ok(Decomposition { pieces: vec![p.boundary.clone()], virtual_doors: Vec::new() });
    }
    decompose_polygon(&p.boundary, MAX_ASPECT).ok_or(SpaceError::DegeneratePolygon(v))
}

/// Rebuilds a space with every irregular room/hallway decomposed. Pieces of a
/// partition get consecutive ids in place of the original; original doors keep
/// their ids and attach to the lowest-id piece holding them; virtual doors are
/// appended after all original doors.
pub fn decompose_space(space: &IndoorSpace) -> Result<IndoorSpace, SpaceError> {
    let mut partitions: Vec<Partition> = vec![Partition::outdoor()];
    // original partition -> new ids of its pieces
    let mut pieces_of: Vec<Vec<PartitionId>> = vec![vec![PartitionId::OUTDOOR]];
    let mut virtuals: Vec<(u32, PartitionId, PartitionId, Point2)> = Vec::new();
    for p in space.partitions().iter().skip(1) {
        let dec = if p.kind == PartitionKind::Staircase {
            Decomposition { pieces: vec![p.boundary.clone()], virtual_doors: Vec::new() }
        } else {
            decompose_partition(space, p.id)?
        };
        let base = partitions.len() as u32;
        let mut ids = Vec::new();
        for ring in dec.pieces {
            let id = PartitionId(partitions.len() as u32);
            partitions.push(Partition { id, floor: p.floor, kind: p.kind, boundary: ring, traversal_length: p.traversal_length });
            ids.push(id);
        }
        for (a, b, loc) in dec.virtual_doors {
            virtuals.push((p.floor, PartitionId(base + a as u32), PartitionId(base + b as u32), loc));
        }
        pieces_of.push(ids);
    }

    let mut doors = Vec::with_capacity(space.num_doors() + virtuals.len());
    for d in space.doors() {
        let remap = |v: PartitionId| -> Result<PartitionId, SpaceError> {
            let ids = &pieces_of[v.index()];
            if ids.len() == 1 {
                return Ok(ids[0]);
            }
            ids.iter()
                .copied()
                .find(|&w| {
                    geom::classify_point(&partitions[w.index()].boundary, d.location.xy()) == Containment::Boundary
                })
                .ok_or(SpaceError::DoorOffBoundary { door: d.id, partition: v })
        };
        let mut transitions = Vec::with_capacity(d.transitions.len());
        for &(a, b) in &d.transitions {
            transitions.push((remap(a)?, remap(b)?));
        }
        doors.push(Door { id: d.id, location: d.location, transitions });
    }
    for (floor, a, b, loc) in virtuals {
        let id = DoorId(doors.len() as u32);
        doors.push(Door::bidirectional(id, IndoorPoint::new(floor, loc.x, loc.y), a, b));
    }
    IndoorSpace::new(partitions, doors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::rect_ring;

    fn total_area(pieces: &[Vec<Point2>]) -> f64 {
        pieces.iter().map(|p| geom::area(p)).sum()
    }

    #[test]
    fn convex_square_unchanged() {
        let sq = rect_ring(Rect::new(0.0, 0.0, 10.0, 10.0));
        assert!(!is_irregular(&sq, MAX_ASPECT));
    }

    #[test]
    fn l_hallway_two_pieces_one_door() {
        // two 10×10 squares joined
        let l = vec![
            Point2::new(0.0, 0.0),
            Point2::new(20.0, 0.0),
            Point2::new(20.0, 10.0),
            Point2::new(10.0, 10.0),
            Point2::new(10.0, 20.0),
            Point2::new(0.0, 20.0),
        ];
        let d = decompose_polygon(&l, MAX_ASPECT).unwrap();
        assert_eq!(d.pieces.len(), 2);
        assert_eq!(d.virtual_doors.len(), 1);
        assert!((total_area(&d.pieces) - 300.0).abs() < 1e-9);
        assert!(d.pieces.iter().all(|p| geom::is_convex(p)));
    }

    #[test]
    fn long_corridor_sliced() {
        let c = rect_ring(Rect::new(0.0, 0.0, 50.0, 5.0));
        let d = decompose_polygon(&c, MAX_ASPECT).unwrap();
        assert_eq!(d.pieces.len(), 3);
        assert_eq!(d.virtual_doors.len(), 2);
        for p in &d.pieces {
            assert!(Rect::bounding(p).unwrap().aspect_ratio() <= MAX_ASPECT + 1e-9);
        }
        assert!((total_area(&d.pieces) - 250.0).abs() < 1e-9);
    }

    #[test]
    fn comb_shape() {
        // corridor with two teeth going up
        let ring = vec![
            Point2::new(0.0, 0.0),
            Point2::new(30.0, 0.0),
            Point2::new(30.0, 4.0),
            Point2::new(24.0, 4.0),
            Point2::new(24.0, 12.0),
            Point2::new(20.0, 12.0),
            Point2::new(20.0, 4.0),
            Point2::new(10.0, 4.0),
            Point2::new(10.0, 12.0),
            Point2::new(6.0, 12.0),
            Point2::new(6.0, 4.0),
            Point2::new(0.0, 4.0),
        ];
        let d = decompose_polygon(&ring, MAX_ASPECT).unwrap();
        assert!((total_area(&d.pieces) - geom::area(&ring)).abs() < 1e-9);
        assert!(d.pieces.iter().all(|p| geom::is_convex(p)));
        assert!(d.pieces.iter().all(|p| Rect::bounding(p).unwrap().aspect_ratio() <= MAX_ASPECT + 1e-9));
        assert!(d.virtual_doors.len() >= d.pieces.len() - 1);
    }

    #[test]
    fn space_decomposition_keeps_doors() {
        let s = crate::fixtures::two_floor_l();
        let t = decompose_space(&s).unwrap();
        assert!(t.num_partitions() > s.num_partitions());
        for d in s.doors() {
            let nd = t.door(d.id);
            assert_eq!(nd.location, d.location);
            assert_eq!(nd.transitions.len(), d.transitions.len());
        }
        assert_eq!(t.components().len(), 1);
    }
}
