"""Smoke test for the eit3d extension module.

Build with `maturin develop` (or copy the compiled library to `eit3d.so`
on the import path) and run `python python/smoke_test.py` from the repository root.
"""

import math

import eit3d


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    bump = eit3d.SmoothBump(alpha=0.3, d=0.9)
    assert close(bump.gamma(0.0), 1.69, 1e-12), bump.gamma(0.0)
    assert bump.gamma(0.95) == 1.0
    assert bump.q(0.95) == 0.0

    lambdas = bump.eigenvalues(10)
    assert lambdas[0] == 0.0
    lo, hi = bump.eigenvalue_bounds(3)
    assert lo <= lambdas[3] <= hi

    assert close(eit3d.shell_eigenvalue([0.5], [2.0, 1.0], 1), 34.0 / 31.0, 1e-12)

    re, im = eit3d.admissible_zeta([4.0, 0.0, 0.0], 8.0)
    dot_re = sum(a * a for a in re) - sum(b * b for b in im)
    assert close(dot_re, 0.0, 1e-9)

    g = eit3d.faddeev_green([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    assert close(g.real, 1.0 / (4.0 * math.pi), 1e-12)

    value, diverged = bump.texp(2.0, zeta_mag=10.0)
    assert not diverged
    other, _ = bump.texp(2.0, zeta_mag=20.0)
    assert close(value.real, other.real, 1e-8 * abs(value))

    t = bump.scattering(2.0, zeta_mag=20.0, n=16)
    assert math.isfinite(t.real) and math.isfinite(t.imag)

    curve = bump.sweep("qhat", [0.0, 1.0, 2.0])
    assert [p[0] for p in curve] == [0.0, 1.0, 2.0]

    result = bump.reconstruct("calderon", xi_step=1.0, xi_max=20.0)
    assert result.method == "calderon"
    assert len(result.r) == len(result.gamma)
    assert result.q == []

    print("eit3d smoke test passed")


if __name__ == "__main__":
    main()
