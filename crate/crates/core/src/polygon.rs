//! Newton polygons: lower convex hulls of integer point clouds `(s, u_s)`.

use std::fmt::Write as _;

use num_integer::Integer;

/// A side of negative slope `-h/e` (with `h, e > 0` coprime).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Side {
    pub h: i64,
    pub e: i64,
    pub start: (usize, i64),
    pub end: (usize, i64),
}

impl Side {
    /// Number of lattice steps `(end.s - start.s) / e`.
    pub fn degree(&self) -> usize {
        (self.end.0 - self.start.0) / self.e as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    points: Vec<(usize, i64)>,
    vertices: Vec<(usize, i64)>,
}

fn cross(o: (usize, i64), a: (usize, i64), b: (usize, i64)) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

impl NewtonPolygon {
    /// Hull of a cloud with distinct abscissas; an empty cloud gives the empty polygon.
    pub fn from_points(points: &[(usize, i64)]) -> Self {
        let mut pts = points.to_vec();
        pts.sort();
        let mut hull: Vec<(usize, i64)> = Vec::new();
        for &p in &pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        NewtonPolygon { points: pts, vertices: hull }
    }

    pub fn points(&self) -> &[(usize, i64)] {
        &self.points
    }

    pub fn vertices(&self) -> &[(usize, i64)] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Abscissa of the last vertex.
    pub fn length(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }

    /// Vertices of the principal part: up to the first vertex of minimal ordinate.
    pub fn principal_vertices(&self) -> &[(usize, i64)] {
        let mut k = 0;
        while k + 1 < self.vertices.len() && self.vertices[k + 1].1 < self.vertices[k].1 {
            k += 1;
        }
        &self.vertices[..(k + 1).min(self.vertices.len())]
    }

    /// Abscissa of the right end of the principal part.
    pub fn principal_length(&self) -> usize {
        self.principal_vertices().last().map_or(0, |v| v.0)
    }

    /// Sides of negative slope, left to right.
    pub fn sides(&self) -> Vec<Side> {
        self.principal_vertices()
            .windows(2)
            .map(|w| {
                let dx = (w[1].0 - w[0].0) as i64;
                let dy = w[0].1 - w[1].1;
                let g = dx.gcd(&dy);
                Side { h: dy / g, e: dx / g, start: w[0], end: w[1] }
            })
            .collect()
    }

    /// Abscissas `(s0, s1)` of the endpoints of the component of slope `-h/e`.
    pub fn component(&self, h: i64, e: i64) -> Option<(usize, usize)> {
        let pv = self.principal_vertices();
        let key = |p: &(usize, i64)| e as i128 * p.1 as i128 + h as i128 * p.0 as i128;
        let best = pv.iter().map(key).min()?;
        let s0 = pv.iter().find(|p| key(p) == best)?.0;
        let s1 = pv.iter().rev().find(|p| key(p) == best)?.0;
        Some((s0, s1))
    }

    /// Text dump: one `s u` line per vertex, then `side h/e s0 s1` per principal side.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (s, u) in &self.vertices {
            let _ = writeln!(out, "{s} {u}");
        }
        for side in self.sides() {
            let _ = writeln!(out, "side {}/{} {} {}", side.h, side.e, side.start.0, side.end.0);
        }
        out.trim_end().to_string()
    }

    /// Minimal SVG rendering with `scale` pixels per unit.
    pub fn to_svg(&self, scale: i64) -> String {
        let max_s = self.points.iter().map(|p| p.0 as i64).max().unwrap_or(0);
        let max_u = self.points.iter().map(|p| p.1).max().unwrap_or(0);
        let (w, h) = ((max_s + 2) * scale, (max_u + 2) * scale);
        let x = |s: usize| (s as i64 + 1) * scale;
        let y = |u: i64| h - (u + 1) * scale;
        let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n");
        for &(s, u) in &self.points {
            let _ = writeln!(out, "  <circle cx=\"{}\" cy=\"{}\" r=\"3\"/>", x(s), y(u));
        }
        let path: Vec<String> = self.vertices.iter().map(|&(s, u)| format!("{},{}", x(s), y(u))).collect();
        let _ = writeln!(out, "  <polyline points=\"{}\" fill=\"none\" stroke=\"black\"/>", path.join(" "));
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_one_first_polygon() {
        let p = NewtonPolygon::from_points(&[(0, 2), (1, 3), (2, 1), (4, 0)]);
        assert_eq!(p.vertices(), &[(0, 2), (4, 0)]);
        let sides = p.sides();
        assert_eq!(sides.len(), 1);
        assert_eq!((sides[0].h, sides[0].e, sides[0].degree()), (1, 2, 2));
        assert_eq!(p.dump(), "0 2\n4 0\nside 1/2 0 4");
    }

    #[test]
    fn principal_part_stops_at_minimum() {
        let p = NewtonPolygon::from_points(&[(0, 5), (2, 1), (3, 1), (5, 4)]);
        assert_eq!(p.vertices(), &[(0, 5), (2, 1), (3, 1), (5, 4)]);
        assert_eq!(p.principal_vertices(), &[(0, 5), (2, 1)]);
        assert_eq!(p.length(), 5);
        assert_eq!(p.component(1, 1), Some((2, 2)));
        assert_eq!(p.component(2, 1), Some((0, 2)));
    }

    #[test]
    fn single_point_has_no_sides() {
        let p = NewtonPolygon::from_points(&[(3, 6)]);
        assert!(p.sides().is_empty());
        assert_eq!(p.component(7, 3), Some((3, 3)));
    }
}
