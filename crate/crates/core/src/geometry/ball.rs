use super::point::Point;

/// A ball `𝔹(center, radius)`; the complement balls of a cheese are closed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball<const D: usize> {
    pub center: Point<D>,
    pub radius: f64,
    pub closed: bool,
}

impl<const D: usize> Ball<D> {
    pub fn closed(center: Point<D>, radius: f64) -> Self {
        Ball {
            center,
            radius,
            closed: true,
        }
    }

    pub fn contains(&self, x: &Point<D>) -> bool {
        let r = self.center.dist(x);
        if self.closed {
            r <= self.radius
        } else {
            r < self.radius
        }
    }

    /// Signed distance from `x` to the sphere; negative inside.
    pub fn surface_distance(&self, x: &Point<D>) -> f64 {
        self.center.dist(x) - self.radius
    }

    pub fn intersects(&self, other: &Ball<D>) -> bool {
        self.center.dist(&other.center) <= self.radius + other.radius
    }

    /// Whether the ball meets the closed shell `inner ≤ |x − base| ≤ outer`.
    pub fn meets_shell(&self, base: &Point<D>, inner: f64, outer: f64) -> bool {
        let c = self.center.dist(base);
        c - self.radius <= outer && c + self.radius >= inner
    }
}
