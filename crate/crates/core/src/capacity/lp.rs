//! Dense primal simplex for packing programs
//!
//! ```text
//! maximize  cᵀx   subject to  A x ≤ r,  x ≥ 0,  r ≥ 0
//! ```
//!
//! The origin is feasible, so the slack basis starts phase II directly. The
//! tableau is kept in compact (Tucker) form: one row per basic variable, one
//! column per nonbasic variable. Pricing is Dantzig's largest reduced cost with
//! lowest-index tie breaks, switching to Bland's rule after a run of degenerate
//! pivots, so the pivot sequence is a deterministic function of the input.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub tolerance: f64,
    pub max_pivots: usize,
    /// Consecutive degenerate pivots tolerated before Bland's rule takes over.
    pub degenerate_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            tolerance: 1e-12,
            max_pivots: 200_000,
            degenerate_limit: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: f64,
    /// Primal values of the structural variables.
    pub x: Vec<f64>,
    /// Dual values, one per constraint row (nonnegative at optimum).
    pub duals: Vec<f64>,
    /// Slack `r_i − (A x)_i` per constraint.
    pub slack: Vec<f64>,
    pub pivots: usize,
}

/// Variable label: structural `x_j` or slack of row `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    Structural(usize),
    Slack(usize),
}

impl Var {
    fn order(self, n: usize) -> usize {
        match self {
            Var::Structural(j) => j,
            Var::Slack(i) => n + i,
        }
    }
}

/// Solve the packing LP. `a` is row-major with `rhs.len()` rows of `c.len()` entries.
pub fn solve_packing(a: &[f64], rhs: &[f64], c: &[f64], opts: &SimplexOptions) -> Result<LpSolution> {
    let m = rhs.len();
    let n = c.len();
    if a.len() != m * n {
        return Err(Error::Lp(format!(
            "matrix has {} entries, expected {m}x{n}",
            a.len()
        )));
    }
    if rhs.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
        return Err(Error::Lp("right-hand side must be finite and nonnegative".into()));
    }
    if a.iter().chain(c).any(|v| !v.is_finite()) {
        return Err(Error::Lp("non-finite coefficient".into()));
    }

    let mut tab = a.to_vec();
    let mut b = rhs.to_vec();
    let mut d = c.to_vec();
    let mut z = 0.0;
    let mut basic: Vec<Var> = (0..m).map(Var::Slack).collect();
    let mut nonbasic: Vec<Var> = (0..n).map(Var::Structural).collect();

    let tol = opts.tolerance;
    let mut pivots = 0usize;
    let mut degenerate_run = 0usize;
    let mut pivot_row = vec![0.0; n];

    loop {
        let bland = degenerate_run >= opts.degenerate_limit;
        let entering = if bland {
            (0..n)
                .filter(|&j| d[j] > tol)
                .min_by_key(|&j| nonbasic[j].order(n))
        } else {
            let mut best: Option<usize> = None;
            for j in 0..n {
                if d[j] > tol && best.is_none_or(|k| d[j] > d[k]) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(col) = entering else { break };

        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let t = tab[i * n + col];
            if t > tol {
                let ratio = b[i] / t;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - 1e-15 * best_ratio.abs().max(1.0)
                            || (ratio <= best_ratio + 1e-15 * best_ratio.abs().max(1.0)
                                && basic[i].order(n) < basic[l].order(n))
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            return Err(Error::Lp("unbounded".into()));
        };

        if best_ratio <= tol {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }

        let p = tab[row * n + col];
        let inv = 1.0 / p;
        pivot_row.copy_from_slice(&tab[row * n..(row + 1) * n]);
        let b_row = b[row];
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = tab[i * n + col];
            if f == 0.0 {
                continue;
            }
            let scale = f * inv;
            let r = &mut tab[i * n..(i + 1) * n];
            for (x, &pr) in r.iter_mut().zip(&pivot_row) {
                *x -= scale * pr;
            }
            r[col] = -scale;
            b[i] -= scale * b_row;
            if b[i] < 0.0 && b[i] > -1e-11 {
                b[i] = 0.0;
            }
        }
        {
            let r = &mut tab[row * n..(row + 1) * n];
            for x in r.iter_mut() {
                *x *= inv;
            }
            r[col] = inv;
        }
        b[row] = b_row * inv;
        let dc = d[col];
        z += dc * b_row * inv;
        for (j, dj) in d.iter_mut().enumerate() {
            *dj -= dc * pivot_row[j] * inv;
        }
        d[col] = -dc * inv;
        std::mem::swap(&mut basic[row], &mut nonbasic[col]);

        pivots += 1;
        if pivots > opts.max_pivots {
            return Err(Error::Lp(format!("pivot limit {} exceeded", opts.max_pivots)));
        }
    }

    let mut x = vec![0.0; n];
    let mut slack = vec![0.0; m];
    for (i, v) in basic.iter().enumerate() {
        match *v {
            Var::Structural(j) => x[j] = b[i].max(0.0),
            Var::Slack(k) => slack[k] = b[i].max(0.0),
        }
    }
    let mut duals = vec![0.0; m];
    for (j, v) in nonbasic.iter().enumerate() {
        if let Var::Slack(k) = *v {
            duals[k] = (-d[j]).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum::<f64>();
    debug_assert!((objective - z).abs() <= 1e-8 * z.abs().max(1.0));

    Ok(LpSolution {
        objective,
        x,
        duals,
        slack,
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_program() {
        // max 3x + 5y; x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> (2, 6), 36
        let a = [1.0, 0.0, 0.0, 2.0, 3.0, 2.0];
        let sol = solve_packing(&a, &[4.0, 12.0, 18.0], &[3.0, 5.0], &SimplexOptions::default()).unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 6.0).abs() < 1e-12);
        // strong duality
        let dual_obj: f64 = sol.duals.iter().zip([4.0, 12.0, 18.0]).map(|(y, r)| y * r).sum();
        assert!((dual_obj - 36.0).abs() < 1e-10);
    }

    #[test]
    fn zero_rows_are_unbounded() {
        let a = [0.0, 1.0];
        let r = solve_packing(&a, &[1.0], &[1.0, 1.0], &SimplexOptions::default());
        assert!(matches!(r, Err(Error::Lp(_))));
    }

    #[test]
    fn degenerate_program_terminates() {
        // Many redundant rows through the same vertex.
        let mut a = Vec::new();
        let mut r = Vec::new();
        for k in 0..30 {
            let t = 1.0 + k as f64 * 0.01;
            a.extend_from_slice(&[t, 1.0, 0.5]);
            r.push(0.0);
        }
        a.extend_from_slice(&[1.0, 1.0, 1.0]);
        r.push(1.0);
        let sol = solve_packing(&a, &r, &[1.0, 1.0, 1.0], &SimplexOptions::default()).unwrap();
        assert!(sol.objective.abs() < 1e-12);
    }
}
