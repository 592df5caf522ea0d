use std::collections::HashSet;

use rayon::prelude::*;

use crate::geometry::{unit_ball_volume, Point};

/// Regular lattice of cubical cells `anchor + h·(k + [0,1]^D)`.
#[derive(Clone, Copy, Debug)]
pub struct CellGrid<const D: usize> {
    pub anchor: Point<D>,
    pub cell: f64,
}

/// Evaluation lattice surrounding a compact, used as extra constraint points.
#[derive(Clone, Copy, Debug)]
pub struct LatticeSpec {
    /// Lattice points per axis across the enlarged box.
    pub per_axis: usize,
    /// Enlargement of the bounding box, in multiples of the diameter.
    pub reach: f64,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec {
            per_axis: 20,
            reach: 2.0,
        }
    }
}

/// A compact set replaced by the cells of a grid lying inside it.
#[derive(Clone, Debug)]
pub struct DiscretizedCompact<const D: usize> {
    /// Cell centers; the candidate support points.
    pub support: Vec<Point<D>>,
    pub cell: f64,
    /// Constraint points beyond the support centers.
    pub lattice: Vec<Point<D>>,
    /// Points checked after solving, never used as constraints.
    pub audit: Vec<Point<D>>,
}

impl<const D: usize> DiscretizedCompact<D> {
    /// Inner approximation of `{indicator}` inside the box `[lo, hi]`: a cell is
    /// kept when all `2^D` of its corners satisfy the indicator.
    pub fn from_indicator<F>(
        indicator: F,
        lo: Point<D>,
        hi: Point<D>,
        grid: CellGrid<D>,
        lattice: LatticeSpec,
    ) -> Self
    where
        F: Fn(&Point<D>) -> bool + Sync,
    {
        let h = grid.cell;
        let mut k_lo = [0i64; D];
        let mut dims = [0usize; D];
        for i in 0..D {
            k_lo[i] = ((lo.0[i] - grid.anchor.0[i]) / h).floor() as i64;
            let k_hi = ((hi.0[i] - grid.anchor.0[i]) / h).ceil() as i64;
            dims[i] = (k_hi - k_lo[i]).max(0) as usize;
        }
        let vdims = dims.map(|n| n + 1);
        let nverts: usize = vdims.iter().product();
        let vertex = |flat: usize| -> ([i64; D], Point<D>) {
            let mut rem = flat;
            let mut k = [0i64; D];
            let mut p = [0.0; D];
            for i in 0..D {
                k[i] = k_lo[i] + (rem % vdims[i]) as i64;
                rem /= vdims[i];
                p[i] = grid.anchor.0[i] + k[i] as f64 * h;
            }
            (k, Point(p))
        };
        let inside: Vec<bool> = (0..nverts)
            .into_par_iter()
            .map(|f| indicator(&vertex(f).1))
            .collect();

        let ncells: usize = dims.iter().product();
        let mut support = Vec::new();
        let mut cells = HashSet::new();
        for flat in 0..ncells {
            let mut rem = flat;
            let mut idx = [0usize; D];
            for i in 0..D {
                idx[i] = rem % dims[i];
                rem /= dims[i];
            }
            let all = (0..1usize << D).all(|corner| {
                let mut v = 0usize;
                let mut stride = 1usize;
                for i in 0..D {
                    v += (idx[i] + ((corner >> i) & 1)) * stride;
                    stride *= vdims[i];
                }
                inside[v]
            });
            if all {
                let mut c = [0.0; D];
                let mut key = [0i64; D];
                for i in 0..D {
                    key[i] = k_lo[i] + idx[i] as i64;
                    c[i] = grid.anchor.0[i] + (key[i] as f64 + 0.5) * h;
                }
                cells.insert(key);
                support.push(Point(c));
            }
        }
        let (lattice_pts, audit) = build_lattices(&support, &cells, grid, lattice);
        DiscretizedCompact {
            support,
            cell: h,
            lattice: lattice_pts,
            audit,
        }
    }

    /// Closed ball with `2^{level+1}` cells per radius, grid anchored at the center.
    pub fn ball(center: Point<D>, radius: f64, level: u32, lattice: LatticeSpec) -> Self {
        let h = radius / (1u64 << (level + 1)) as f64;
        let lo = Point(center.0.map(|c| c - radius));
        let hi = Point(center.0.map(|c| c + radius));
        Self::from_indicator(
            move |p| p.dist(&center) <= radius * (1.0 + 1e-12),
            lo,
            hi,
            CellGrid { anchor: center, cell: h },
            lattice,
        )
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Total volume of the kept cells.
    pub fn volume(&self) -> f64 {
        self.support.len() as f64 * self.cell.powi(D as i32)
    }

    /// All constraint points: support centers first, then the lattice.
    pub fn constraint_points(&self) -> impl Iterator<Item = &Point<D>> {
        self.support.iter().chain(self.lattice.iter())
    }
}

fn build_lattices<const D: usize>(
    support: &[Point<D>],
    cells: &HashSet<[i64; D]>,
    grid: CellGrid<D>,
    spec: LatticeSpec,
) -> (Vec<Point<D>>, Vec<Point<D>>) {
    if support.is_empty() || spec.per_axis == 0 {
        return (Vec::new(), Vec::new());
    }
    let h = grid.cell;
    let mut lo = [f64::INFINITY; D];
    let mut hi = [f64::NEG_INFINITY; D];
    for p in support {
        for i in 0..D {
            lo[i] = lo[i].min(p.0[i] - h / 2.0);
            hi[i] = hi[i].max(p.0[i] + h / 2.0);
        }
    }
    let diam = (0..D)
        .map(|i| (hi[i] - lo[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    let reach = spec.reach * diam;
    let width = (0..D)
        .map(|i| hi[i] - lo[i] + 2.0 * reach)
        .fold(0.0, f64::max);
    // Spacing snapped to a whole number of cells keeps lattices aligned under rescaling.
    let spacing = ((width / spec.per_axis as f64) / h).round().max(1.0) * h;
    let in_support = |p: &Point<D>| {
        let key = std::array::from_fn(|i| ((p.0[i] - grid.anchor.0[i]) / h).floor() as i64);
        cells.contains(&key)
    };
    let make = |offset: f64| {
        let mut k_lo = [0i64; D];
        let mut n = [0usize; D];
        for i in 0..D {
            k_lo[i] = ((lo[i] - reach - grid.anchor.0[i]) / spacing).floor() as i64;
            let k_hi = ((hi[i] + reach - grid.anchor.0[i]) / spacing).ceil() as i64;
            n[i] = (k_hi - k_lo[i] + 1).max(0) as usize;
        }
        let total: usize = n.iter().product();
        let mut out = Vec::new();
        for flat in 0..total {
            let mut rem = flat;
            let mut p = [0.0; D];
            for i in 0..D {
                let k = k_lo[i] + (rem % n[i]) as i64;
                rem /= n[i];
                p[i] = grid.anchor.0[i] + (k as f64 + offset) * spacing;
            }
            let p = Point(p);
            if !in_support(&p) {
                out.push(p);
            }
        }
        out
    };
    // Irrational offsets keep lattice points off cell boundaries.
    (make(0.5 * std::f64::consts::FRAC_1_SQRT_2), make(0.5 + 0.5 * std::f64::consts::FRAC_1_SQRT_2))
}

const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Mean of `|x − y|^{-s}` for `x` uniform on the cell of side `h` centered at `center`.
///
/// The self term uses the exact mean over a ball of the cell's volume,
/// `D/(D−s)·ρ^{-s}`; neighbouring cells use tensor Gauss–Legendre; far cells the
/// center value.
pub fn cell_kernel<const D: usize>(center: &Point<D>, y: &Point<D>, h: f64, s: f64) -> f64 {
    let r = center.dist(y);
    if r < 1e-9 * h {
        let rho = (h.powi(D as i32) / unit_ball_volume(D)).powf(1.0 / D as f64);
        return D as f64 / (D as f64 - s) * rho.powf(-s);
    }
    if r > 2.5 * h {
        return r.powf(-s);
    }
    let total = 4usize.pow(D as u32);
    let mut acc = 0.0;
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        let mut q = [0.0; D];
        for i in 0..D {
            let k = rem % 4;
            rem /= 4;
            w *= GL4_WEIGHTS[k] / 2.0;
            q[i] = center.0[i] + GL4_NODES[k] * h / 2.0;
        }
        acc += w * Point(q).dist(y).powf(-s);
    }
    acc
}
