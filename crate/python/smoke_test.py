"""Smoke test for the anisotest Python extension.

Build and install first, e.g.
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/anisotest-*.whl
"""

import json
import math
import os
import tempfile

import anisotest


def main():
    window = anisotest.Window.centered_square(1.0)
    assert math.isclose(window.area(), 1.0)

    model = anisotest.Model.lgcp(0.5)
    assert json.loads(model.to_json())["model"] == "lgcp"
    pattern = model.simulate(window, seed=7)
    assert len(pattern) > 50
    assert pattern.window.bounds == (-0.5, 0.5, -0.5, 0.5)

    again = model.simulate(window, seed=7)
    assert again.points() == pattern.points()

    r, k = anisotest.k_cyl(pattern, alpha=math.pi / 6)
    assert len(r) == len(k) == 36 and math.isclose(r[-1], 0.25)
    _, g = anisotest.g_loc(pattern, alpha=math.pi / 6)
    assert all(0.0 <= v <= 1.0 for v in g)
    angles, spec = anisotest.direction_spectrum(pattern)
    assert len(angles) == len(spec) == 36

    two = anisotest.PointPattern([(0.0, 0.0), (0.1, 0.0)], window)
    _, k0 = anisotest.k_cyl(two, alpha=0.0, r_max=0.1, kappa=1)
    assert abs(k0[0] - 0.5555556) < 1e-6

    result = anisotest.isotropy_test(pattern, dss="kcyl", method="tiling", n_tiles=3, n_rep=39, seed=3)
    assert result.statistic == "MS_RangeStd"
    assert len(result.t_rep) == 39
    assert result.reject == (result.p_value <= result.alpha_level)
    assert round(result.p_value * 40) == result.p_value * 40
    doc = json.loads(result.json)
    assert doc["T0"] == result.t0

    reps = anisotest.replicate(pattern, method="tiling", n_tiles=4, n_rep=3, seed=1)
    assert len(reps) == 3

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "pattern.csv")
        pattern.to_csv(path)
        back = anisotest.PointPattern.from_csv(path, window)
        assert back.points() == pattern.points()

    try:
        anisotest.isotropy_test(pattern, n_rep=0)
    except ValueError:
        pass
    else:
        raise AssertionError("zero replicates accepted")

    print("python smoke test passed:", result)


if __name__ == "__main__":
    main()
