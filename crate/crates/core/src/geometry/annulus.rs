use super::point::Point;
use crate::error::{Error, Result};

/// The closed dyadic shell `2^{-(n+1)} ≤ |x − b| ≤ 2^{-n}` around `base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus<const D: usize> {
    pub base: Point<D>,
    pub index: u32,
}

impl<const D: usize> Annulus<D> {
    pub fn new(base: Point<D>, index: u32) -> Self {
        Annulus { base, index }
    }

    pub fn outer_radius(&self) -> f64 {
        dyadic(self.index)
    }

    pub fn inner_radius(&self) -> f64 {
        dyadic(self.index + 1)
    }

    /// Closed-shell membership (shared boundary circles belong to both shells).
    pub fn contains_closed(&self, x: &Point<D>) -> bool {
        let r = self.base.dist(x);
        r >= self.inner_radius() && r <= self.outer_radius()
    }

    /// Half-open membership `[2^{-(n+1)}, 2^{-n})`, the partitioning convention.
    pub fn contains(&self, x: &Point<D>) -> bool {
        let r = self.base.dist(x);
        r >= self.inner_radius() && r < self.outer_radius()
    }
}

/// `2^{-n}`, exact for every index the toolkit uses.
pub fn dyadic(n: u32) -> f64 {
    (-(n as f64)).exp2()
}

/// Index of the half-open shell containing a radius, read off the binary exponent.
pub fn shell_index_of_radius(r: f64) -> Option<u32> {
    if !(r > 0.0) || r >= 0.5 || !r.is_finite() {
        return None;
    }
    // r = m * 2^e with m in [1, 2) gives 2^e <= r < 2^(e+1), so n = -(e+1).
    let mut e = ((r.to_bits() >> 52) & 0x7ff) as i64 - 1023;
    if e == -1023 {
        // subnormal
        e = r.log2().floor() as i64;
    }
    let n = -(e + 1);
    debug_assert!(n >= 1);
    u32::try_from(n).ok()
}

/// Index `n` with `2^{-(n+1)} ≤ |x − b| < 2^{-n}`, or `None` when `|x − b| ≥ 1/2`.
pub fn annulus_index<const D: usize>(x: &Point<D>, b: &Point<D>) -> Result<Option<u32>> {
    let r = x.dist(b);
    if r == 0.0 {
        return Err(Error::AnnulusAtBase);
    }
    Ok(shell_index_of_radius(r))
}
