"""Decide subset-sum questions by optimizing the product objective.

Plants a cardinality-constrained subset-sum instance with a known
certificate, maps it to a two-sided selection problem, and shows that the
exact optimizer answers "yes" precisely when the optimum reaches the
squared target. A parity-breaking perturbation flips the answer.
"""

from pubgame.nash_opt import (
    decide_ccss,
    oracle_exact,
    perturb_to_no_instance,
    plant_yes_instance,
    reduce_ccss,
)

N, K, SEED = 14, 5, 3


def show(label: str, instance) -> None:
    reduced = reduce_ccss(instance)
    optimum = oracle_exact(reduced).value
    answer = decide_ccss(instance)
    print(f"{label}:")
    print(f"  values  {instance.values}")
    print(f"  target  {instance.target} (k = {instance.k})")
    print(f"  optimum {optimum} vs target^2 {instance.target ** 2}")
    print(f"  decision: {'yes' if answer else 'no'}")
    print()


def main() -> None:
    planted = plant_yes_instance(N, K, seed=SEED)
    show("planted instance (a k-subset hits the target)", planted)
    show("perturbed instance (target shifted off parity)", perturb_to_no_instance(planted))


if __name__ == "__main__":
    main()
