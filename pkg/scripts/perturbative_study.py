"""Near-critical roots of Model I against the two small-epsilon series.

At sqrt(v0) a = pi/2 the condition reduces to b^3 + 2 b^2 = eps for b = beta a.
The table prints the numeric root and the error of each series scaled by
eps^2; a flat column means the series is good to O(eps^2).
"""

import math

from pseudowell import bound
from pseudowell.potentials import PotentialSpec

V0 = math.pi ** 2 / 4


def numeric(eps):
    spec = PotentialSpec.model_i(V0, 1.0, math.sqrt(V0 - eps))
    if eps > 0:
        return bound.find_real_bound_states(spec, tol=1e-13)[0].beta
    return bound.find_complex_pair(spec, tol=1e-14)[1].beta


def pick(eps, series):
    roots = bound.perturbative_roots_model_i(eps, series)[:2]
    return max(roots, key=lambda r: r.beta_a.real if eps > 0 else r.beta_a.imag).beta_a


def main():
    print(f"{'eps':>8} {'beta a (numeric)':>34} {'printed/eps^2':>14} {'rederived/eps^2':>16}")
    for eps in (1e-2, 3e-3, 1e-3, 3e-4, 1e-4, -1e-4, -3e-4, -1e-3, -3e-3, -1e-2):
        b = numeric(eps)
        cols = []
        for series in ("printed", "rederived"):
            d = b - pick(eps, series)
            cols.append(max(abs(d.real), abs(d.imag)) / eps ** 2)
        print(f"{eps:8.0e} {b.real:16.12f}{b.imag:+16.12f}j {cols[0]:14.4g} {cols[1]:16.4g}")
    # the cubic's third root has no counterpart in the full condition
    spec = PotentialSpec.model_i(V0, 1.0, math.sqrt(V0 - 1e-3))
    print(f"|f(beta a = -2)| at eps = 1e-3: {abs(bound.eigencondition(spec, -2.0)):.3f}")


if __name__ == "__main__":
    main()
