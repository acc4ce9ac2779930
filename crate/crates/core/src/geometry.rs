//! Exact lattice geometry for cell-union shapes.
//!
//! All coordinates are integer cell corners; areas are carried as doubled
//! integers and only perimeters (which involve square roots) are converted to
//! floating point, at the very end.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Sub;

use crate::model::ClusterShape;
use crate::{Error, Result};

/// A lattice point in cell-corner units. `y` grows with the row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn cross(self, other: Point) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        libm::sqrt((self.x * self.x + self.y * self.y) as f64)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// A simple polygon given by its vertex ring (no repeated closing vertex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let polygon = Self { vertices };
        if polygon.vertices.len() < 3 || polygon.twice_signed_area() == 0 {
            return Err(Error::DegeneratePolygon);
        }
        Ok(polygon)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Shoelace sum; positive for counterclockwise rings.
    pub fn twice_signed_area(&self) -> i64 {
        twice_signed_area(&self.vertices)
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.twice_signed_area() > 0
    }

    /// Sum of `|dx| + |dy|` over the edges; the number of unit edges for
    /// axis-aligned rings.
    pub fn rectilinear_length(&self) -> i64 {
        ring_edges(&self.vertices)
            .map(|(a, b)| (b.x - a.x).abs() + (b.y - a.y).abs())
            .sum()
    }
}

fn ring_edges(vertices: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = vertices.len();
    (0..n).map(move |i| (vertices[i], vertices[(i + 1) % n]))
}

pub(crate) fn twice_signed_area(vertices: &[Point]) -> i64 {
    ring_edges(vertices).map(|(a, b)| a.cross(b)).sum()
}

pub(crate) fn ring_perimeter(vertices: &[Point]) -> f64 {
    ring_edges(vertices).map(|(a, b)| (b - a).norm()).sum()
}

/// Positive area of a polygon in square cell units.
pub fn polygon_area(polygon: &Polygon) -> f64 {
    polygon.twice_signed_area().unsigned_abs() as f64 / 2.0
}

/// Sum of Euclidean edge lengths.
pub fn polygon_perimeter(polygon: &Polygon) -> f64 {
    ring_perimeter(&polygon.vertices)
}

/// Counterclockwise convex hull without collinear vertices.
pub fn convex_hull(points: &[Point]) -> Result<Polygon> {
    let hull = hull_vertices(points.to_vec());
    if hull.len() < 3 {
        return Err(Error::DegenerateHull);
    }
    Ok(Polygon { vertices: hull })
}

/// Monotone chain over an owned point buffer. Returns fewer than three points
/// when the input is collinear.
pub(crate) fn hull_vertices(mut points: Vec<Point>) -> Vec<Point> {
    points.sort_unstable();
    points.dedup();
    if points.len() < 3 {
        return points;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(points.len() + 1);
    for &p in &points {
        while hull.len() >= 2 && (hull[hull.len() - 1] - hull[hull.len() - 2]).cross(p - hull[hull.len() - 2]) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in points.iter().rev().skip(1) {
        while hull.len() >= lower && (hull[hull.len() - 1] - hull[hull.len() - 2]).cross(p - hull[hull.len() - 2]) <= 0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Corner points that determine the convex hull of a set of unit cells: the
/// outer corners of the leftmost and rightmost cell in every occupied row.
pub(crate) fn cell_hull_points(cells: &[(usize, usize)]) -> Vec<Point> {
    let mut rows: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for &(c, r) in cells {
        let e = rows.entry(r).or_insert((c, c));
        e.0 = e.0.min(c);
        e.1 = e.1.max(c);
    }
    let mut points = Vec::with_capacity(rows.len() * 4);
    for (r, (lo, hi)) in rows {
        let (r, lo, hi) = (r as i64, lo as i64, hi as i64);
        points.extend_from_slice(&[
            Point::new(lo, r),
            Point::new(lo, r + 1),
            Point::new(hi + 1, r),
            Point::new(hi + 1, r + 1),
        ]);
    }
    points
}

const RIGHT: Point = Point::new(1, 0);
const UP: Point = Point::new(0, 1);
const LEFT: Point = Point::new(-1, 0);
const DOWN: Point = Point::new(0, -1);

/// 4-connected components of a cell set, each as a list of cells.
pub fn components(cells: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut left: BTreeSet<(usize, usize)> = cells.iter().copied().collect();
    let mut out = Vec::new();
    while let Some(start) = left.pop_first() {
        let mut comp = vec![start];
        let mut k = 0;
        while k < comp.len() {
            let (c, r) = comp[k];
            k += 1;
            let around = [
                c.checked_sub(1).map(|c| (c, r)),
                Some((c + 1, r)),
                r.checked_sub(1).map(|r| (c, r)),
                Some((c, r + 1)),
            ];
            for n in around.into_iter().flatten() {
                if left.remove(&n) {
                    comp.push(n);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Euclidean gap between two closed unit squares.
pub(crate) fn square_gap(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dx = a.0.abs_diff(b.0).saturating_sub(1) as f64;
    let dy = a.1.abs_diff(b.1).saturating_sub(1) as f64;
    libm::sqrt(dx * dx + dy * dy)
}

/// Length of the shortest set of straight bridges joining the components of a
/// cell set: a minimum spanning tree over components, weighted by the gap
/// between their closest cells. Zero for connected (or corner-touching) sets.
pub fn bridge_length(cells: &[(usize, usize)]) -> f64 {
    let comps = components(cells);
    let m = comps.len();
    if m <= 1 {
        return 0.0;
    }
    let gap = |i: usize, j: usize| {
        let mut best = f64::INFINITY;
        for &a in &comps[i] {
            for &b in &comps[j] {
                best = best.min(square_gap(a, b));
            }
        }
        best
    };
    // Prim over the dense component graph.
    let mut dist = vec![f64::INFINITY; m];
    let mut done = vec![false; m];
    let mut total = 0.0;
    let mut cur = 0;
    done[0] = true;
    for _ in 1..m {
        let mut next = usize::MAX;
        for j in 0..m {
            if done[j] {
                continue;
            }
            dist[j] = dist[j].min(gap(cur, j));
            if next == usize::MAX || dist[j] < dist[next] {
                next = j;
            }
        }
        total += dist[next];
        done[next] = true;
        cur = next;
    }
    total
}

/// Boundary rings of the union of unit squares at `cells`.
///
/// Rings keep the shape on their left, so outer rings come out
/// counterclockwise and holes clockwise. Where two cells of the shape touch
/// only at a corner the trace turns left, which separates them
/// (4-connectivity). Collinear vertices are merged and each ring starts at its
/// lowest, then leftmost, vertex.
pub fn trace_boundary(cells: &[(usize, usize)]) -> Vec<Polygon> {
    let set: BTreeSet<(i64, i64)> = cells.iter().map(|&(c, r)| (c as i64, r as i64)).collect();
    let has = |c: i64, r: i64| set.contains(&(c, r));

    let mut outgoing: BTreeMap<Point, Vec<Point>> = BTreeMap::new();
    let mut add = |from: Point, dir: Point| outgoing.entry(from).or_default().push(dir);
    for &(c, r) in &set {
        if !has(c, r - 1) {
            add(Point::new(c, r), RIGHT);
        }
        if !has(c + 1, r) {
            add(Point::new(c + 1, r), UP);
        }
        if !has(c, r + 1) {
            add(Point::new(c + 1, r + 1), LEFT);
        }
        if !has(c - 1, r) {
            add(Point::new(c, r + 1), DOWN);
        }
    }

    // Visiting starts bottom-up makes every start the lowest vertex of its
    // ring, which is never a pinch point, so the ring closes on first return.
    let mut rings = Vec::new();
    let mut starts: Vec<Point> = outgoing.keys().copied().collect();
    starts.sort_by_key(|p| (p.y, p.x));
    for start in starts {
        while let Some(first_dir) = take_edge(&mut outgoing, start, None) {
            let mut ring = vec![start];
            let mut at = start + first_dir;
            let mut dir = first_dir;
            while at != start {
                ring.push(at);
                let next = take_edge(&mut outgoing, at, Some(dir)).expect("boundary edges form closed rings");
                at = at + next;
                dir = next;
            }
            rings.push(simplify_ring(ring));
        }
    }
    rings.sort_by_key(|r| (r[0].y, r[0].x));
    rings.into_iter().map(|vertices| Polygon { vertices }).collect()
}

impl core::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

fn take_edge(outgoing: &mut BTreeMap<Point, Vec<Point>>, at: Point, incoming: Option<Point>) -> Option<Point> {
    let dirs = outgoing.get_mut(&at)?;
    if dirs.is_empty() {
        return None;
    }
    let pick = match incoming {
        Some(d) if dirs.len() > 1 => {
            let left = Point::new(-d.y, d.x);
            dirs.iter().position(|&x| x == left).unwrap_or(0)
        }
        _ => 0,
    };
    Some(dirs.swap_remove(pick))
}

fn simplify_ring(ring: Vec<Point>) -> Vec<Point> {
    let n = ring.len();
    let mut out: Vec<Point> = (0..n)
        .filter(|&i| {
            let prev = ring[(i + n - 1) % n];
            let next = ring[(i + 1) % n];
            (ring[i] - prev).cross(next - ring[i]) != 0
        })
        .map(|i| ring[i])
        .collect();
    let start = (0..out.len()).min_by_key(|&i| (out[i].y, out[i].x)).unwrap_or(0);
    out.rotate_left(start);
    out
}

/// Counts of collinear cell-center triples `(X, Y, Z)` with `X` and `Z` in the
/// set and `Y` a lattice center strictly between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TripleCounts {
    pub total: u64,
    /// Triples whose middle cell is also in the set.
    pub satisfied: u64,
}

impl TripleCounts {
    /// `satisfied / total`, or 1 when there are no triples.
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.satisfied as f64 / self.total as f64
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Enumerates every unordered pair of cells and every lattice center strictly
/// between them. Quadratic in the number of cells.
pub fn collinear_triple_counts(cells: &[(usize, usize)]) -> TripleCounts {
    if cells.is_empty() {
        return TripleCounts::default();
    }
    let min_c = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let min_r = cells.iter().map(|c| c.1).min().unwrap_or(0);
    let w = cells.iter().map(|c| c.0).max().unwrap_or(0) - min_c + 1;
    let h = cells.iter().map(|c| c.1).max().unwrap_or(0) - min_r + 1;
    let mut occupied = vec![false; w * h];
    let pts: Vec<(i64, i64)> = cells
        .iter()
        .map(|&(c, r)| {
            occupied[(r - min_r) * w + (c - min_c)] = true;
            ((c - min_c) as i64, (r - min_r) as i64)
        })
        .collect();

    let mut counts = TripleCounts::default();
    for (i, &(x0, y0)) in pts.iter().enumerate() {
        for &(x1, y1) in &pts[i + 1..] {
            let (dx, dy) = (x1 - x0, y1 - y0);
            let g = gcd(dx.unsigned_abs(), dy.unsigned_abs());
            if g < 2 {
                continue;
            }
            let (sx, sy) = (dx / g as i64, dy / g as i64);
            counts.total += g - 1;
            for t in 1..g as i64 {
                let (x, y) = (x0 + t * sx, y0 + t * sy);
                if occupied[y as usize * w + x as usize] {
                    counts.satisfied += 1;
                }
            }
        }
    }
    counts
}

/// Fraction of the shape's cells lying in the closed half-plane bounded by
/// the line through the unit boundary edge `from`-`to`, on the side the shape
/// occupies next to that edge.
pub fn halfplane_area_fraction(shape: &ClusterShape, from: Point, to: Point) -> Result<f64> {
    let not_edge = || Error::NotABoundaryEdge {
        from: (from.x, from.y),
        to: (to.x, to.y),
    };
    let d = to - from;
    if d.x.abs() + d.y.abs() != 1 || shape.cells.is_empty() {
        return Err(not_edge());
    }
    let set: BTreeSet<(i64, i64)> = shape.cells.iter().map(|&(c, r)| (c as i64, r as i64)).collect();
    let lo = Point::new(from.x.min(to.x), from.y.min(to.y));
    // Cells on either side of the edge, and a key selecting the half-plane.
    let (before, after, line, horizontal) = if d.y == 0 {
        ((lo.x, lo.y - 1), (lo.x, lo.y), lo.y, true)
    } else {
        ((lo.x - 1, lo.y), (lo.x, lo.y), lo.x, false)
    };
    let inside_before = set.contains(&before);
    if inside_before == set.contains(&after) {
        return Err(not_edge());
    }
    let count = set
        .iter()
        .filter(|&&(c, r)| {
            let k = if horizontal { r } else { c };
            if inside_before {
                k < line
            } else {
                k >= line
            }
        })
        .count();
    Ok(count as f64 / set.len() as f64)
}
