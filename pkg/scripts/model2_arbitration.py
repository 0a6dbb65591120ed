"""Compare both readings of the Model II formulas with the transfer-matrix oracle."""

import numpy as np

from pseudowell import bound, scattering
from pseudowell.potentials import PotentialSpec, decompose
from pseudowell.transfer import oracle_amplitudes, oracle_real_bound_states


def main():
    print("bound states (mu = 1, a = 1)")
    print(f"{'lam':>6} {'oracle':>20} {'resolved':>20} {'printed':>20}")
    for lam in np.linspace(0, 1.2, 7):
        spec = PotentialSpec.model_ii(1.0, 1.0, lam)
        eps, top = bound.search_window(spec)
        oracle = oracle_real_bound_states(decompose(spec), top, beta_min=eps)
        cols = [oracle[0] if oracle else None]
        for variant in ("resolved", "printed"):
            cols.append(bound.least_bound_beta(spec, variant=variant))
        print(f"{lam:6.2f} " + " ".join(f"{c:20.15f}" if c is not None else f"{'-':>20}" for c in cols))

    print("\nreflection amplitudes, max |r - r_oracle| over k in [0.05, 10]")
    k = np.linspace(0.05, 10, 200)
    for params in [(1, 1, 0.5), (0.8, 1, 1), (3, 2, 0.7)]:
        spec = PotentialSpec.model_ii(*params)
        ref = oracle_amplitudes(decompose(spec), k)
        for variant in ("resolved", "printed"):
            d = scattering.amplitudes(spec, k, variant)
            err = max(np.max(np.abs(d.rL - ref.rL)), np.max(np.abs(d.rR - ref.rR)))
            print(f"  mu, a, lam = {params}: {variant:8s} {err:.2e}")


if __name__ == "__main__":
    main()
