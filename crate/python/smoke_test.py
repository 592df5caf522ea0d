"""Smoke test for the potkit_py extension module.

Build with
    cargo build --release -p potkit-python --features extension-module
    cp target/release/libpotkit_py.so python/potkit_py.so
or `maturin develop -m crates/python/Cargo.toml`.
"""
import cmath
import json
import math
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import potkit_py as pk


def main():
    cheese = pk.SwissCheese(alpha=0.5, n_max=12, seed=7)
    assert len(cheese.balls) == 12
    assert not cheese.in_u(*cheese.balls[0][:2])
    assert cheese.in_u(0.4, 0.0) or cheese.in_u(-0.4, 0.0)
    again = pk.SwissCheese.from_json(cheese.to_json())
    assert again.balls == cheese.balls
    dens = cheese.density(1, 6, 32)
    assert all(0.0 <= f <= 1.0 for _, f in dens)

    poles, df, tail = cheese.cheese_function(2.0)
    assert math.isfinite(abs(df)) and tail < 1e-3

    assert pk.annulus_index((0.3, 0.0), (0.0, 0.0)) == 1
    assert pk.annulus_index((0.7, 0.0), (0.0, 0.0)) is None

    cap = pk.capacity_of_ball(1.0, 1.0, 2)
    assert 0.5 < cap < 2 / math.pi

    v = pk.riesz_potential([(0.0, 0.0, 2.0)], 1.0, (0.5, 0.0))
    assert abs(v - 4.0) < 1e-12

    rows = [
        [0.0, 0.0, 0.3, 0.1, 1.0, 0.0],
        [0.2, -0.1, -0.2, 0.4, 0.0, 0.5],
        [-0.3, 0.2, 0.1, -0.2, 0.7, -0.2],
    ]
    mu = pk.ProductMeasure(rows)
    assert abs(mu.swap().swap().total_variation() - mu.total_variation()) < 1e-15
    f = [(0.9 + 0.9j, 1.0)]
    lf = mu.apply(0.5, f)
    lfs = mu.swap().apply(0.5, f)
    assert abs(lf + lfs) < 1e-12

    b = 0.6 + 0.0j
    t1, t, r1, d_def, d_cf = pk.pipeline(mu, 0.5, b, [(1.5 + 1.0j, 1.0)], -0.5 + 0.6j)
    assert abs(r1 - 1.0) < 1e-12
    assert abs(d_def - d_cf) <= 1e-10 * max(1.0, abs(d_def))

    try:
        mu.apply(1.0, f)
    except ValueError as e:
        assert "0<α<1" in str(e)
    else:
        raise AssertionError("alpha=1 accepted")

    assert "pipeline-identity" in pk.describe("pipeline-identity")
    try:
        pk.describe("bogus")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown scenario accepted")

    with tempfile.TemporaryDirectory() as d:
        summary = json.loads(pk.run_scenario("pipeline-identity", "triples = 5\n", 3, d))
        assert (Path(d) / "manifest.json").exists()
        assert summary is not None

    print("smoke test ok")


if __name__ == "__main__":
    main()
