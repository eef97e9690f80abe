//! Planar geometry kernel: points, rectangles, simple polygons, visibility and
//! geodesic (shortest obstacle-respecting) distances inside a polygon.

use std::f64::consts::PI;

/// Tolerance (meters) for "lies on a boundary" decisions.
pub const BOUNDARY_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn near(self, other: Point2, eps: f64) -> bool {
        self.dist(other) <= eps
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub const fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Rect { min_x, min_y, max_x, max_y }
    }

    /// Tightest rectangle around `points`. Returns `None` for an empty slice.
    pub fn bounding(points: &[Point2]) -> Option<Rect> {
        let first = points.first()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for p in &points[1..] {
            r.min_x = r.min_x.min(p.x);
            r.min_y = r.min_y.min(p.y);
            r.max_x = r.max_x.max(p.x);
            r.max_y = r.max_y.max(p.y);
        }
        Some(r)
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Long side over short side; infinite for a degenerate rectangle.
    pub fn aspect_ratio(&self) -> f64 {
        let (w, h) = (self.width(), self.height());
        let short = w.min(h);
        if short <= 0.0 {
            f64::INFINITY
        } else {
            w.max(h) / short
        }
    }

    pub fn center(&self) -> Point2 {
        Point2::new((self.min_x + self.max_x) / 2.0, (self.min_y + self.max_y) / 2.0)
    }

    pub fn contains(&self, p: Point2, eps: f64) -> bool {
        p.x >= self.min_x - eps && p.x <= self.max_x + eps && p.y >= self.min_y - eps && p.y <= self.max_y + eps
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.min_x >= self.min_x && other.max_x <= self.max_x && other.min_y >= self.min_y && other.max_y <= self.max_y
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::new(
            self.min_x.min(other.min_x),
            self.min_y.min(other.min_y),
            self.max_x.max(other.max_x),
            self.max_y.max(other.max_y),
        )
    }

    /// Overlap with positive area (touching edges do not count).
    pub fn overlaps_interior(&self, other: &Rect, eps: f64) -> bool {
        self.min_x < other.max_x - eps
            && other.min_x < self.max_x - eps
            && self.min_y < other.max_y - eps
            && other.min_y < self.max_y - eps
    }

    /// Minimum Euclidean distance from `p` to the rectangle (0 inside).
    pub fn min_dist(&self, p: Point2) -> f64 {
        let dx = (self.min_x - p.x).max(0.0).max(p.x - self.max_x);
        let dy = (self.min_y - p.y).max(0.0).max(p.y - self.max_y);
        dx.hypot(dy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// Shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area(vs: &[Point2]) -> f64 {
    let n = vs.len();
    let mut s = 0.0;
    for i in 0..n {
        s += vs[i].cross(vs[(i + 1) % n]);
    }
    s / 2.0
}

pub fn area(vs: &[Point2]) -> f64 {
    signed_area(vs).abs()
}

/// Area centroid of a simple polygon.
pub fn centroid(vs: &[Point2]) -> Point2 {
    let a = signed_area(vs);
    if a.abs() < 1e-12 {
        let n = vs.len().max(1) as f64;
        let s = vs.iter().fold(Point2::default(), |acc, p| acc.add(*p));
        return s.scale(1.0 / n);
    }
    let n = vs.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (p, q) = (vs[i], vs[(i + 1) % n]);
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point2::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// Drops repeated and collinear vertices and orients the ring counter-clockwise.
pub fn normalize_ring(vs: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(vs.len());
    for &p in vs {
        if out.last().is_none_or(|q| !q.near(p, 1e-9)) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].near(out[out.len() - 1], 1e-9) {
        out.pop();
    }
    // Repeatedly remove collinear vertices until stable.
    let mut changed = true;
    while changed && out.len() > 3 {
        changed = false;
        let n = out.len();
        for i in 0..n {
            let a = out[(i + n - 1) % n];
            let b = out[i];
            let c = out[(i + 1) % n];
            let cr = b.sub(a).cross(c.sub(b));
            let scale = a.dist(b).max(b.dist(c)).max(1.0);
            if cr.abs() <= 1e-9 * scale {
                out.remove(i);
                changed = true;
                break;
            }
        }
    }
    if signed_area(&out) < 0.0 {
        out.reverse();
    }
    out
}

/// Signed turn at vertex `i` of a counter-clockwise ring (positive = convex).
fn turn(vs: &[Point2], i: usize) -> f64 {
    let n = vs.len();
    let a = vs[(i + n - 1) % n];
    let b = vs[i];
    let c = vs[(i + 1) % n];
    b.sub(a).cross(c.sub(b))
}

/// Indices of reflex vertices of a counter-clockwise ring.
pub fn reflex_vertices(vs: &[Point2]) -> Vec<usize> {
    (0..vs.len()).filter(|&i| turn(vs, i) < -1e-9).collect()
}

pub fn is_convex(vs: &[Point2]) -> bool {
    let ring = normalize_ring(vs);
    reflex_vertices(&ring).is_empty()
}

pub fn dist_point_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

/// Classifies `p` against a simple polygon, treating points within
/// [`BOUNDARY_EPS`] of an edge as on the boundary.
pub fn classify_point(vs: &[Point2], p: Point2) -> Containment {
    let n = vs.len();
    if n < 3 {
        return Containment::Outside;
    }
    for i in 0..n {
        if dist_point_segment(p, vs[i], vs[(i + 1) % n]) <= BOUNDARY_EPS {
            return Containment::Boundary;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vs[i], vs[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Proper crossing of two segments (interiors intersect at a single point).
pub fn segments_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = b.sub(a).cross(c.sub(a));
    let d2 = b.sub(a).cross(d.sub(a));
    let d3 = d.sub(c).cross(a.sub(c));
    let d4 = d.sub(c).cross(b.sub(c));
    let tol = 1e-9;
    ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
}

/// Whether the ring is simple (no two non-adjacent edges touch or cross).
pub fn is_simple(vs: &[Point2]) -> bool {
    let n = vs.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (vs[i], vs[(i + 1) % n]);
        for j in (i + 1)..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (vs[j], vs[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return false;
            }
            // touching at a vertex of a non-adjacent edge
            if dist_point_segment(c, a, b) < 1e-9 || dist_point_segment(a, c, d) < 1e-9 {
                return false;
            }
        }
    }
    true
}

/// Parameters `t ∈ [0,1]` along `a→b` where the segment meets the polygon boundary.
fn boundary_params(vs: &[Point2], a: Point2, b: Point2) -> Vec<f64> {
    let n = vs.len();
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    let mut ts = vec![0.0, 1.0];
    if len2 == 0.0 {
        return ts;
    }
    for i in 0..n {
        let (c, d) = (vs[i], vs[(i + 1) % n]);
        let cd = d.sub(c);
        let denom = ab.cross(cd);
        let ac = c.sub(a);
        if denom.abs() < 1e-12 * (len2.sqrt() * cd.dot(cd).sqrt()).max(1e-300) {
            // parallel: record collinear endpoints lying on ab
            if ac.cross(ab).abs() <= 1e-9 * len2.sqrt().max(1.0) {
                for q in [c, d] {
                    let t = q.sub(a).dot(ab) / len2;
                    if (0.0..=1.0).contains(&t) {
                        ts.push(t);
                    }
                }
            }
            continue;
        }
        let t = ac.cross(cd) / denom;
        let u = ac.cross(ab) / denom;
        if (-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) {
            ts.push(t.clamp(0.0, 1.0));
        }
    }
    for v in vs {
        let t = v.sub(a).dot(ab) / len2;
        if (0.0..=1.0).contains(&t) && dist_point_segment(*v, a, b) <= 1e-9 {
            ts.push(t);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    ts
}

/// Whether the closed segment `a→b` stays inside the closed polygon.
pub fn segment_within(vs: &[Point2], a: Point2, b: Point2) -> bool {
    let ts = boundary_params(vs, a, b);
    for w in ts.windows(2) {
        if w[1] - w[0] <= 1e-12 {
            continue;
        }
        let m = a.lerp(b, (w[0] + w[1]) / 2.0);
        if classify_point(vs, m) == Containment::Outside {
            return false;
        }
    }
    true
}

/// Clips a convex ring to the half-plane `axis_coord(p) >= lo` and `<= hi`.
pub fn clip_slab(vs: &[Point2], vertical_cut: bool, lo: f64, hi: f64) -> Vec<Point2> {
    let coord = |p: &Point2| if vertical_cut { p.x } else { p.y };
    let clip = |poly: &[Point2], keep_ge: bool, c: f64| -> Vec<Point2> {
        let mut out = Vec::new();
        let n = poly.len();
        for i in 0..n {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            let inside = |x: &Point2| if keep_ge { coord(x) >= c - 1e-12 } else { coord(x) <= c + 1e-12 };
            let (pin, qin) = (inside(&p), inside(&q));
            if pin {
                out.push(p);
            }
            if pin != qin {
                let t = (c - coord(&p)) / (coord(&q) - coord(&p));
                let mut x = p.lerp(q, t);
                if vertical_cut {
                    x.x = c;
                } else {
                    x.y = c;
                }
                out.push(x);
            }
        }
        out
    };
    let a = clip(vs, true, lo);
    let b = clip(&a, false, hi);
    normalize_ring(&b)
}

/// Geodesic distance oracle for one simple polygon, built on the visibility
/// graph of its vertices.
#[derive(Clone, Debug)]
pub struct Geodesic {
    verts: Vec<Point2>,
    /// All-pairs vertex-to-vertex geodesic distances, row-major.
    vdist: Vec<f64>,
}

impl Geodesic {
    pub fn new(ring: &[Point2]) -> Self {
        let verts = ring.to_vec();
        let n = verts.len();
        let mut vdist = vec![f64::INFINITY; n * n];
        for i in 0..n {
            vdist[i * n + i] = 0.0;
            for j in (i + 1)..n {
                if segment_within(&verts, verts[i], verts[j]) {
                    let d = verts[i].dist(verts[j]);
                    vdist[i * n + j] = d;
                    vdist[j * n + i] = d;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let ik = vdist[i * n + k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = ik + vdist[k * n + j];
                    if cand < vdist[i * n + j] {
                        vdist[i * n + j] = cand;
                    }
                }
            }
        }
        Geodesic { verts, vdist }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.verts
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    /// Polygon vertices visible from `a`, with straight-line distances.
    pub fn anchor(&self, a: Point2) -> Vec<(usize, f64)> {
        self.verts
            .iter()
            .enumerate()
            .filter(|(_, v)| segment_within(&self.verts, a, **v))
            .map(|(i, v)| (i, a.dist(*v)))
            .collect()
    }

    /// Shortest path length between two points of the closed polygon.
    pub fn distance(&self, a: Point2, b: Point2) -> f64 {
        self.distance_with(a, None, b, None)
    }

    /// As [`Geodesic::distance`], reusing precomputed anchors when given.
    pub fn distance_with(&self, a: Point2, va: Option<&[(usize, f64)]>, b: Point2, vb: Option<&[(usize, f64)]>) -> f64 {
        if a == b {
            return 0.0;
        }
        if segment_within(&self.verts, a, b) {
            return a.dist(b);
        }
        let n = self.verts.len();
        let own_a;
        let va = match va {
            Some(v) => v,
            None => {
                own_a = self.anchor(a);
                &own_a
            }
        };
        let own_b;
        let vb = match vb {
            Some(v) => v,
            None => {
                own_b = self.anchor(b);
                &own_b
            }
        };
        let mut best = f64::INFINITY;
        for &(i, da) in va {
            for &(j, db) in vb {
                let c = da + self.vdist[i * n + j] + db;
                if c < best {
                    best = c;
                }
            }
        }
        best
    }

    /// Shortest path as a polyline `a, v_i.., b` (used for diagnostics and tests).
    pub fn path(&self, a: Point2, b: Point2) -> Vec<Point2> {
        if a == b || segment_within(&self.verts, a, b) {
            return vec![a, b];
        }
        let n = self.verts.len();
        let va = self.anchor(a);
        let vb = self.anchor(b);
        let mut best = (f64::INFINITY, 0, 0);
        for &(i, da) in &va {
            for &(j, db) in &vb {
                let c = da + self.vdist[i * n + j] + db;
                if c < best.0 {
                    best = (c, i, j);
                }
            }
        }
        // Walk vertex chain i→j greedily along tight edges.
        let (_, mut i, j) = best;
        let mut out = vec![a, self.verts[i]];
        let mut guard = 0;
        while i != j && guard < n {
            let next = (0..n)
                .filter(|&k| k != i && segment_within(&self.verts, self.verts[i], self.verts[k]))
                .find(|&k| {
                    let step = self.verts[i].dist(self.verts[k]);
                    (step + self.vdist[k * n + j] - self.vdist[i * n + j]).abs() <= 1e-9
                })
                .unwrap_or(j);
            out.push(self.verts[next]);
            i = next;
            guard += 1;
        }
        out.push(b);
        out
    }
}

/// Rotates `p` about the origin by `deg` degrees.
pub fn rotate(p: Point2, deg: f64) -> Point2 {
    let r = deg * PI / 180.0;
    let (s, c) = r.sin_cos();
    Point2::new(p.x * c - p.y * s, p.x * s + p.y * c)
}
