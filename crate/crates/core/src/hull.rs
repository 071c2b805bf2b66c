//! Planar convex hulls (Andrew's monotone chain) and point-to-hull distances.

pub type Point2 = [f64; 2];

#[inline]
fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull vertices without repetition. Collinear points are
/// dropped; degenerate inputs yield one or two vertices.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area of a counter-clockwise polygon.
pub fn polygon_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        acc += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * acc.abs()
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

/// Euclidean distance from `p` to the convex polygon `hull` (zero inside).
pub fn distance_to_hull(p: Point2, hull: &[Point2]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => segment_distance(p, hull[0], hull[0]),
        2 => segment_distance(p, hull[0], hull[1]),
        m => {
            let inside = (0..m).all(|i| cross(hull[i], hull[(i + 1) % m], p) >= 0.0);
            if inside {
                return 0.0;
            }
            (0..m)
                .map(|i| segment_distance(p, hull[i], hull[(i + 1) % m]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Closest point of the convex polygon to `p`, together with the distance.
pub fn closest_point(p: Point2, hull: &[Point2]) -> (Point2, f64) {
    if distance_to_hull(p, hull) == 0.0 {
        return (p, 0.0);
    }
    let m = hull.len();
    let mut best = (hull[0], f64::INFINITY);
    for i in 0..m {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if len2 > 0.0 {
            (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
        let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        if d < best.1 {
            best = (q, d);
        }
    }
    best
}
