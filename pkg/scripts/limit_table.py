"""Deterministic scaled energies of u = x1 far below the Monte Carlo range.

Uses the dense quadrature (exact for this field up to ~1e-9) to show how
slowly the native and membrane ratios approach 1:

    python3 scripts/limit_table.py
"""

import math

from thinfilm.domain import linear_horizontal, make_thin_film
from thinfilm.scaling import ParamPath, PathKind, lambda_membrane, lambda_native
from thinfilm.seminorm import c_d, oracle_dense

EPS = (0.2, 0.1, 0.05, 0.02, 0.01, 1e-3, 1e-4, 1e-5)


def ratio(eps: float, s: float, scale: float, target: float) -> float:
    raw = oracle_dense(linear_horizontal([1.0]), make_thin_film(2, [0.0], [1.0], eps), s, 48).value
    return scale * (1.0 - s) * raw / target


def main() -> None:
    native = ParamPath(PathKind.PowerLaw, EPS, 0.5)
    critical = ParamPath(PathKind.LogCritical, EPS, 0.5)
    print(f"{'eps':>8}  {'native (s=1-sqrt eps)':>22}  {'membrane (eps^(1-s)=1/2)':>25}")
    for eps in EPS:
        s1, s2 = native.s_at(eps), critical.s_at(eps)
        r1 = ratio(eps, s1, lambda_native(eps, s1), c_d(2))
        r2 = ratio(eps, s2, lambda_membrane(eps), 0.25 * c_d(2))
        print(f"{eps:>8g}  {r1:>22.6f}  {r2:>25.6f}")


if __name__ == "__main__":
    main()
