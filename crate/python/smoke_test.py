"""Smoke test for the gapspec extension module.

Build and install first, e.g. ``pip install --no-build-isolation ./crates/python``.
"""

import math

import gapspec


def main():
    lam_minus, lam_plus = gapspec.secular_roots()
    assert abs(lam_minus + 0.7674) < 5e-5, lam_minus
    assert abs(lam_plus - 3.5796) < 5e-5, lam_plus

    model = gapspec.Model.fourier_b1()
    assert model.name == "fourier-b1"
    assert model.dim(10) == 21
    m, m2 = model.truncation(2)
    assert len(m) == 5 and len(m2[0]) == 5

    pencil = model.pencil(20)
    z = pencil.eigenvalues()
    assert len(z) == 2 * pencil.dim
    near = gapspec.nearest_eigenvalue(z, lam_minus)
    assert abs(near - lam_minus) < 0.2
    assert pencil.spectral_function(near) < 1e-8 * 100
    for lo, hi in gapspec.enclosures(z):
        assert lo <= hi

    sigma = pencil.spectral_function(0.1 + 0.3j)
    e = pencil.witness(0.1 + 0.3j)
    assert sigma > 0 and len(e) == pencil.dim
    assert pencil.pseudospectrum_member(near, 1e-3, [1.0, 1.0, 1.0])
    grid = pencil.grid_sample(-4.0, 4.0, -1.0, 1.0, 6, 3)
    assert len(grid) == 3 and len(grid[0]) == 6

    rows = gapspec.convergence_study(gapspec.Model.direct_sum_b2(), lam_minus, [4, 8, 12])
    assert [r["n"] for r in rows] == [4, 8, 12]
    assert rows[-1]["slope"] is None and rows[0]["err"] > rows[-1]["err"]

    bound = gapspec.tolerance_bound(0.25, 2.0, 0.0, 1.0, 0.0)
    assert math.isclose(bound, 0.25 / 24.25, rel_tol=1e-14)

    report = gapspec.perturbation_experiment(model, 12, lam_minus, 0.05, 1.0, 1.0, 3, seed=7)
    assert len(report["counts"]) == 3

    harmonic = gapspec.Model.harmonic().pencil(5).eigenvalues()
    assert all(abs(h.real - (2 * (i // 2) + 1)) < 1e-9 for i, h in enumerate(harmonic))

    try:
        gapspec.tolerance_bound(1.0, 1.0, 0.0, 1.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("gapspec smoke test OK")


if __name__ == "__main__":
    main()
