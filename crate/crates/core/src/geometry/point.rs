use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// A point of `ℝ^D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<const D: usize>(pub [f64; D]);

pub type Point2 = Point<2>;

impl<const D: usize> Point<D> {
    pub const ORIGIN: Self = Point([0.0; D]);

    pub fn norm(&self) -> f64 {
        if D == 2 {
            return self.0[0].hypot(self.0[1]);
        }
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn coords(&self) -> &[f64; D] {
        &self.0
    }
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point([x, y])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.0[0], self.0[1])
    }

    pub fn from_complex(z: Complex64) -> Self {
        Point([z.re, z.im])
    }
}

impl From<Complex64> for Point2 {
    fn from(z: Complex64) -> Self {
        Point2::from_complex(z)
    }
}

impl<const D: usize> Add for Point<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Point(out)
    }
}

impl<const D: usize> Sub for Point<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Point(out)
    }
}

impl<const D: usize> Mul<f64> for Point<D> {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Point(self.0.map(|x| x * k))
    }
}

/// Volume of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}
