use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

use potkit::capacity::{ball_capacity, wiener_partial_sums, WienerParams};
use potkit::experiments::{self, ExperimentConfig, Scenario};
use potkit::functionals::{t_pipeline, FunctionalHandle, RationalFunction};
use potkit::geometry::{self, Ball, BudgetRule, CheeseParams, Point2};
use potkit::measures::{self, DiscreteMeasure};
use potkit::potentials;

fn err(e: potkit::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else if matches!(e, potkit::Error::Io(_)) {
        PyOSError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

fn rational(poles: Vec<(Complex64, Complex64)>, poly: Option<[Complex64; 3]>, center: Complex64) -> RationalFunction {
    let mut f = RationalFunction::from_poles(poles);
    f.poly_center = center;
    if let Some(p) = poly {
        f.poly = p;
    }
    f
}

/// Swiss cheese: unit square around `b` minus closed balls in the dyadic annuli.
#[pyclass(name = "SwissCheese", module = "potkit_py")]
struct PySwissCheese {
    inner: geometry::SwissCheese,
}

#[pymethods]
impl PySwissCheese {
    #[new]
    #[pyo3(signature = (alpha=0.5, n_max=24, balls_per_annulus=1, seed=0, budget_scale=1.0, budget_ratio=0.5, safety=0.9, base=(0.0, 0.0)))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        alpha: f64,
        n_max: u32,
        balls_per_annulus: u32,
        seed: u64,
        budget_scale: f64,
        budget_ratio: f64,
        safety: f64,
        base: (f64, f64),
    ) -> PyResult<Self> {
        let p = CheeseParams {
            alpha,
            budget: BudgetRule::Geometric {
                scale: budget_scale,
                ratio: budget_ratio,
            },
            n_max,
            balls_per_annulus,
            seed,
            base: [base.0, base.1],
            square: None,
            safety,
        };
        Ok(PySwissCheese {
            inner: geometry::SwissCheese::generate(&p).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySwissCheese {
            inner: geometry::SwissCheese::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    /// `(cx, cy, r)` per removed ball.
    #[getter]
    fn balls(&self) -> Vec<(f64, f64, f64)> {
        self.inner.removed.iter().map(|b| (b.center.x(), b.center.y(), b.radius)).collect()
    }

    #[getter]
    fn tail_bound(&self) -> f64 {
        self.inner.tail_bound
    }

    fn in_u(&self, x: f64, y: f64) -> bool {
        self.inner.in_u(&Point2::new(x, y))
    }

    fn dist_to_complement(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.dist_to_complement(&Point2::new(x, y)).map_err(err)
    }

    /// `(φ, relative clearance)` of the ray from `b` farthest from the removed balls.
    fn clear_ray_direction(&self) -> (f64, f64) {
        self.inner.clear_ray_direction()
    }

    /// Area fraction of `U` in `𝔹(b, 2^{-n})` for `n` in `n_min..=n_max`.
    #[pyo3(signature = (n_min=1, n_max=10, per_radius=64))]
    fn density(&self, n_min: u32, n_max: u32, per_radius: u32) -> PyResult<Vec<(u32, f64)>> {
        let prof = geometry::area_density_profile(
            |p| self.inner.in_u(p),
            self.inner.base,
            n_min..=n_max,
            geometry::Sampler::Grid { per_radius },
        )
        .map_err(err)?;
        Ok(prof.entries.iter().map(|e| (e.n, e.fraction)).collect())
    }

    /// Coefficients `r_k^{1+α}/k^p` at the removed-ball centers: `(poles, ∂f, tail bound)`.
    #[pyo3(signature = (exponent=2.0))]
    fn cheese_function(&self, exponent: f64) -> PyResult<(Vec<(Complex64, Complex64)>, Complex64, f64)> {
        let cf = potkit::functionals::cheese_function(&self.inner, exponent, None).map_err(err)?;
        let d = cf.derivation(self.inner.base.to_complex()).map_err(err)?;
        Ok((cf.f.poles.clone(), d.value, d.tail_bound))
    }
}

/// Atomic complex measure on `ℂ × ℂ`, rows `[z_re, z_im, w_re, w_im, c_re, c_im]`.
#[pyclass(name = "ProductMeasure", module = "potkit_py")]
struct PyProductMeasure {
    inner: measures::ProductMeasure<2>,
}

#[pymethods]
impl PyProductMeasure {
    #[new]
    fn new(rows: Vec<[f64; 6]>) -> Self {
        PyProductMeasure {
            inner: measures::MeasureRows(rows).into(),
        }
    }

    fn rows(&self) -> Vec<[f64; 6]> {
        measures::MeasureRows::from(&self.inner).0
    }

    fn total_variation(&self) -> f64 {
        self.inner.total_variation()
    }

    fn swap(&self) -> Self {
        PyProductMeasure {
            inner: self.inner.swap_pushforward(),
        }
    }

    fn normalize(&self) -> Self {
        PyProductMeasure {
            inner: self.inner.normalize(),
        }
    }

    fn avoid_vertical_slice(&self, b: (f64, f64)) -> PyResult<Self> {
        Ok(PyProductMeasure {
            inner: self.inner.avoid_vertical_slice(&Point2::new(b.0, b.1)).map_err(err)?,
        })
    }

    /// `L(μ)(f)` for `f = Σ c/(z − w) + p₀ + p₁(z − z₀) + p₂(z − z₀)²`.
    #[pyo3(signature = (alpha, poles, poly=None, center=Complex64::new(0.0, 0.0)))]
    fn apply(&self, alpha: f64, poles: Vec<(Complex64, Complex64)>, poly: Option<[Complex64; 3]>, center: Complex64) -> PyResult<Complex64> {
        let h = FunctionalHandle::new(self.inner.clone(), alpha).map_err(err)?;
        h.apply_rational(&rational(poles, poly, center)).map_err(err)
    }

    fn h_tilde(&self, alpha: f64, a: (f64, f64)) -> f64 {
        potentials::h_tilde(&self.inner, alpha, &Point2::new(a.0, a.1))
    }

    fn h_kernel(&self, alpha: f64, a: (f64, f64)) -> PyResult<Complex64> {
        potentials::h_kernel(&self.inner, alpha, &Point2::new(a.0, a.1)).map_err(err)
    }

    fn weighted_potential(&self, s: f64, t: f64, u: f64, a: (f64, f64)) -> f64 {
        potentials::weighted_potential(&self.inner, s, t, u, &Point2::new(a.0, a.1))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// `Σ |m| / |x − a|^s` over `(x, y, m)` atoms.
#[pyfunction]
fn riesz_potential(atoms: Vec<(f64, f64, f64)>, s: f64, a: (f64, f64)) -> f64 {
    let mu = DiscreteMeasure::new(atoms.into_iter().map(|(x, y, m)| (Point2::new(x, y), Complex64::new(m, 0.0))).collect());
    potentials::riesz_potential(&mu, s, &Point2::new(a.0, a.1))
}

/// Shell index `n` with `2^{-(n+1)} ≤ |x − b| < 2^{-n}`, `None` outside `𝔹(b, 1/2)`.
#[pyfunction]
fn annulus_index(x: (f64, f64), b: (f64, f64)) -> PyResult<Option<u32>> {
    geometry::annulus_index(&Point2::new(x.0, x.1), &Point2::new(b.0, b.1)).map_err(err)
}

/// LP estimate of `C_s(𝔹(center, radius))` in the plane.
#[pyfunction]
#[pyo3(signature = (radius, s, level=3, center=(0.0, 0.0)))]
fn capacity_of_ball(radius: f64, s: f64, level: u32, center: (f64, f64)) -> PyResult<f64> {
    Ok(ball_capacity(&Ball::closed(Point2::new(center.0, center.1), radius), s, level).map_err(err)?.value)
}

/// Terms `2^{sn} C_s(A_n(b) ∩ 𝔹(b, radius))` and the trend verdict.
#[pyfunction]
#[pyo3(signature = (radius, s, n_min=1, n_max=8, level=3))]
fn wiener_ball(radius: f64, s: f64, n_min: u32, n_max: u32, level: u32) -> PyResult<(Vec<f64>, String)> {
    let b = Point2::ORIGIN;
    let params = WienerParams {
        level,
        ..Default::default()
    };
    let r = wiener_partial_sums(|p: &Point2| p.dist(&b) <= radius, b, s, n_min..=n_max, &params).map_err(err)?;
    let verdict = serde_json_verdict(&r.verdict);
    Ok((r.entries.iter().map(|e| e.term).collect(), verdict))
}

fn serde_json_verdict(v: &potkit::capacity::TrendVerdict) -> String {
    match v {
        potkit::capacity::TrendVerdict::BoundedTrend => "bounded-trend",
        potkit::capacity::TrendVerdict::DivergingTrend => "diverging-trend",
        potkit::capacity::TrendVerdict::Inconclusive => "inconclusive",
    }
    .to_string()
}

/// `(T̂₁(a), T̂(a), R_a(1), D_a(g) by definition, D_a(g) closed form)` for
/// `μ` normalized so that `L(μ)(z − b) = 1` and `g` vanishing at `b`.
#[pyfunction]
#[pyo3(signature = (measure, alpha, b, g_poles, a, g_poly=None))]
fn pipeline(
    measure: &PyProductMeasure,
    alpha: f64,
    b: Complex64,
    g_poles: Vec<(Complex64, Complex64)>,
    a: Complex64,
    g_poly: Option<[Complex64; 3]>,
) -> PyResult<(Complex64, Complex64, Complex64, Complex64, Complex64)> {
    let t1 = FunctionalHandle::normalized_derivation(measure.inner.clone(), alpha, b).map_err(err)?;
    let g = rational(g_poles, g_poly, b).vanishing_at(b).map_err(err)?;
    let r = t_pipeline(&t1, b, |z| g.eval(z), a).map_err(err)?;
    Ok((r.t1_hat, r.t_hat, r.r_mass, r.d_definition, r.d_closed_form))
}

/// Scenario description and parameter schema.
#[pyfunction]
fn describe(scenario: &str) -> PyResult<String> {
    let s: Scenario = scenario.parse().map_err(err)?;
    experiments::describe(s).map_err(err)
}

/// Run a scenario; returns the summary as a JSON string.
#[pyfunction]
#[pyo3(signature = (scenario, config=None, seed=None, out=None))]
fn run_scenario(scenario: &str, config: Option<&str>, seed: Option<u64>, out: Option<std::path::PathBuf>) -> PyResult<String> {
    let s: Scenario = scenario.parse().map_err(err)?;
    let cfg = match config {
        Some(text) => ExperimentConfig::from_toml(s, text).map_err(err)?,
        None => ExperimentConfig::defaults(s),
    }
    .with_cli(seed, out);
    let m = experiments::run(&cfg).map_err(err)?;
    Ok(m.summary.to_string())
}

#[pymodule]
fn potkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySwissCheese>()?;
    m.add_class::<PyProductMeasure>()?;
    m.add_function(wrap_pyfunction!(riesz_potential, m)?)?;
    m.add_function(wrap_pyfunction!(annulus_index, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_of_ball, m)?)?;
    m.add_function(wrap_pyfunction!(wiener_ball, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
