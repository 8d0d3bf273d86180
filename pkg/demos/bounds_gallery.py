"""Walk through the closed-form bounds and when they carry information.

The misidentification bounds are exponential in n but carry a large
constant, so they only bite at fairly large sample sizes; the truncation
coupling bound depends on the interaction tail and the contraction margin.
"""

from isingpairs import (
    Box,
    coupling_bound,
    dobrushin_coefficient,
    misid_bound_finite,
    misid_bound_infinite,
    random_interaction_graph,
    tail_sum,
    v_analytic_bounds,
)


def main():
    L, d = 1, 2
    v_lo, v_hi = v_analytic_bounds(r=0.8, L=L, d=d)
    print(f"variance proxy envelope at r=0.8: [{v_lo:.4f}, {v_hi:.4f}]")
    print()
    print("finite-range misidentification bound, eps = 0.1, v at envelope top:")
    for n in (10**3, 10**4, 10**5, 3 * 10**5):
        rep = misid_bound_finite(n, 0.1, v_hi, L, d)
        tag = " (vacuous)" if rep.vacuous else ""
        print(f"  n={n:7d}: {rep.value:.3e}{tag}")
    print()
    print("adding an interaction tail of 1e-9 per site:")
    for n in (10**4, 10**5, 3 * 10**5):
        rep = misid_bound_infinite(n, 0.1, v_hi, L, d, r=0.8, tail=1e-9)
        print(f"  n={n:7d}: {rep.value:.3e}")

    print()
    box = Box((0, 0), 3, 2)
    J = random_interaction_graph(box, edge_prob=0.1, degree_cap=4, coupling=0.2, seed=7)
    r = dobrushin_coefficient(J)
    print(f"random graph: r = {r.value:.2f}, contraction satisfied: {r.satisfied}")
    for radius in (1, 2, 3, 4, 5, 6):
        tail = tail_sum(J, radius)
        bound = coupling_bound(J, radius)
        print(f"  truncation at L={radius}: tail {tail:.2f}, discrepancy bound {bound:.3f}")


if __name__ == "__main__":
    main()
