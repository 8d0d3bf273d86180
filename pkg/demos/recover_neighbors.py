"""Recover the interaction neighborhood of a lattice site from samples.

Uses the nearest-neighbor model on a 3x3 grid, draws configurations with
the coalescing Gibbs sampler, and runs the weighted-conditional-distance
estimator at increasing sample sizes: the selected set is noisy at n = 500
and settles on the four true neighbors of the center.
"""

from isingpairs import (
    PairwisePotential,
    ThresholdSchedule,
    estimate_neighborhood,
    generate_sample,
    interaction_neighborhood,
    threshold,
)


def main():
    sites = tuple((x, y) for x in range(3) for y in range(3))
    couplings = {}
    for a in sites:
        for b in sites:
            if a < b and abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1:
                couplings[(a, b)] = 0.2
    J = PairwisePotential(sites, couplings)

    center = (1, 1)
    truth = interaction_neighborhood(J, center)
    print(f"true neighbors of {center}: {sorted(truth)}")

    schedule = ThresholdSchedule("simple", C=0.075, d=2)
    for n in (500, 2000, 8000):
        sample = generate_sample(J, None, n, seed=2)
        eps = threshold(schedule, 1, n)
        est = estimate_neighborhood(sample, center, 1, eps)
        marker = "exact recovery" if est.selected == truth else "not there yet"
        print(f"\nn={n:5d}  eps={eps:.4f}  ->  {sorted(est.selected)}  [{marker}]")
        for j, score in sorted(est.scores.items()):
            flag = "*" if j in truth else " "
            print(f"    {flag} candidate {j}: score {score:.5f}")


if __name__ == "__main__":
    main()
