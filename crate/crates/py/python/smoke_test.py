"""Smoke test for the compiled `acp` module. Run after `maturin develop`."""

import math

import acp


def main():
    # Progeny PGF: G(1) = 1 in the subcritical regime and values lie in (0, 1).
    assert abs(acp.progeny_pgf(1.0, 1, 0.1) - 1.0) < 1e-9
    g = acp.progeny_pgf(0.5, 1, 0.1)
    assert 0.0 < g < 1.0

    c, s = acp.tail_certificate(1, 0.1)
    assert c > 0 and s > 1

    progeny = acp.sample_progeny(1, 0.1, 2000, seed=7)
    assert len(progeny) == 2000 and min(progeny) >= 1
    assert progeny == acp.sample_progeny(1, 0.1, 2000, seed=7)

    runs = acp.simulate(replicas=20, seed=3, half_width=30)
    assert len(runs) == 20 and all(r["extinct"] for r in runs)
    assert all(r["pi2"] >= 1 for r in runs)

    rows = acp.meanfield_trajectory(0.0, 3.0, 1.0)
    t, u1, u2 = rows[-1]
    assert t == 200.0 and abs(u1 - 1 / 6) < 1e-6 and abs(u2 - 1 / 6) < 1e-6
    u1, u2 = acp.interior_fixed_point(0.0, 3.0, 1.0)
    assert abs(u1 - 1 / 6) < 1e-12
    assert acp.interior_fixed_point(0.5, 0.5, 1.0) is None

    assert [acp.count_paths(n, 1) for n in range(5)] == [1, 3, 7, 17, 41]

    lo, hi = acp.wilson_interval(50, 100)
    assert lo < 0.5 < hi and math.isclose(acp.Z95, 1.959963984540054)
    p, lo, hi = acp.tail_estimate([float(x) for x in progeny], 3.0)
    assert lo <= p <= hi

    try:
        acp.progeny_pgf(0.5, 1, -1.0)
    except ValueError as e:
        assert "gamma" in str(e)
    else:
        raise AssertionError("negative gamma accepted")

    print("acp smoke test passed")


if __name__ == "__main__":
    main()
