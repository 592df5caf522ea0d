use super::config::*;
use crate::error::Result;

fn about(s: Scenario) -> &'static str {
    match s {
        Scenario::CheeseBuild => {
            "Build a swiss cheese around b: the unit square minus closed balls placed in the dyadic \
annuli A_n(b), with Σ r^{1+α} ≤ s_n/4^n per annulus. Writes the ball list, per-annulus budget \
usage and the area density of U in 𝔹(b, 2^{-n}), which should approach 1."
        }
        Scenario::CapacityBall => {
            "Riesz capacity C_s of a ball by linear programming on nested cell grids. Checks the \
upper bound C_s(𝔹(a, r)) ≤ r^s and monotone refinement, and extrapolates the limit."
        }
        Scenario::Wiener => {
            "Wiener-type series Σ 2^{sn} C_s(A_n(b) ∩ E) from the thinness lemma for single-layer \
Riesz potentials, where E = {a : |a − b|^s ∫ dμ(x)/|x − a|^s ≥ ε}, or E a ball around b. \
Reports each term, partial sums and a bounded/diverging trend verdict."
        }
        Scenario::ExceptionalSet => {
            "Classify grid points around b by the dilation-normalized potential |a − b|^e P(a) for the \
single-layer, double-layer, refined, H̃ or H kernels, and measure the area density of the \
exceptional set (bad polarity, ≥ ε) or the good set (H kinds, < δ) in each 𝔹(b, 2^{-n})."
        }
        Scenario::DqTheorem => {
            "Difference quotients (f(z) − f(b))/(z − b) of f = Σ c_k/(z − w_k) with poles at the \
removed-ball centers and c_k = r_k^{1+α}/k², against ∂f, on the good set \
E = E₁ ∩ E₂ ∩ E₃ ∩ U ∩ 𝔹(b, 1) built from the Cauchy-transform estimates with δ = 1 and \
M = 6‖μ‖, K = M + 2. Also checks |T̂(a) − 1| ≤ π|a − b|^{1−α}, |D_a(g)| ≤ K + π, and quotients \
along a ray from b inside U for a panel of functions."
        }
        Scenario::PipelineIdentity => {
            "The distribution pipeline T₁ = L(μ), T₀ = (z − b)T₁, T = −π(z − b)²T₁, \
T̂ = 1 − π(z − b)²T̂₁, R_a, and D_a = (R_a − T₀)/(a − b) − T₁, evaluated on seeded (μ, g, a) \
triples. Compares D_a(g) with −π(a − b)(g·T₁)^(a) + π(a − b)T̂₁(a)R_a(g), and checks the swap, \
slice-avoidance and g·L decomposition identities."
        }
    }
}

/// What the scenario exercises and its full parameter schema with defaults.
pub fn describe(s: Scenario) -> Result<String> {
    let defaults = match ExperimentConfig::defaults(s).params {
        ScenarioConfig::CheeseBuild(c) => toml::to_string(&c),
        ScenarioConfig::CapacityBall(c) => toml::to_string(&c),
        ScenarioConfig::Wiener(c) => toml::to_string(&c),
        ScenarioConfig::ExceptionalSet(c) => toml::to_string(&c),
        ScenarioConfig::DqTheorem(c) => toml::to_string(&c),
        ScenarioConfig::PipelineIdentity(c) => toml::to_string(&c),
    }
    .map_err(|e| crate::error::Error::Format(e.to_string()))?;
    Ok(format!(
        "{name}\n\n{about}\n\nParameters (TOML, shown with defaults):\n\n\
seed = 0        # config value wins over --seed\n\
# out = \"DIR\"  # config value wins over --out; default out/{name}\n\
{defaults}",
        name = s.name(),
        about = about(s),
    ))
}
