"""Set-function oracles and their structural properties.

Builds one oracle of each bundled kind, confirms the properties the solvers
rely on (normality, monotonicity, diminishing returns), measures total
curvature, and shows the checkers catching a planted supermodular decoy.
"""

import numpy as np

from submax import (
    CardinalityPowerOracle,
    CoverageInstance,
    CoverageOracle,
    ExemplarOracle,
    Subset,
    check_monotone,
    check_normal,
    check_submodular,
    marginal_gain,
    random_exemplar_instance,
    random_instance,
    total_curvature,
)

rng = np.random.default_rng(0)

# A tiny weighted-coverage oracle, written out by hand: three choices cover
# overlapping item sets.
inst = CoverageInstance(
    item_weights=(2.0, 1.0, 1.0),
    cover_sets=((0, 1), (1, 2), (2,)),
)
f = CoverageOracle(inst)
print("coverage value of {0}:      ", f(Subset.of(3, [0])))
print("coverage value of {0,1}:    ", f(Subset.of(3, [0, 1])))
print("gain of adding 1 to {0}:    ", marginal_gain(f, 1, Subset.of(3, [0])))
print("gain of adding 1 to {0,2}:  ", marginal_gain(f, 1, Subset.of(3, [0, 2])))
print("(the second gain is smaller: diminishing returns at work)")
print()

# Every bundled family ships normal, monotone, and submodular.
for family in ("modular", "coverage", "exemplar", "rank"):
    _, oracle = random_instance(family, 7, np.random.default_rng([1, hash(family) % 100]))
    reports = (check_normal(oracle), check_monotone(oracle), check_submodular(oracle))
    curv = total_curvature(oracle)
    print(f"{family:9s} normal={reports[0].holds} monotone={reports[1].holds} "
          f"submodular={reports[2].holds} curvature={curv.value:.3f}")
print()

# Curvature separates easy from hard inputs: 0 means greedy is exact, 1 means
# only the generic guarantees apply.
exemplar = random_exemplar_instance(6, rng)
print("exemplar curvature:", float(total_curvature(
    __import__("submax").ExemplarOracle(exemplar))))

# The checkers return re-checkable witnesses. |S|^2 grows superlinearly, so
# the diminishing-returns test must fail and say where.
decoy = CardinalityPowerOracle(5, 2.0)
report = check_submodular(decoy)
s, r, p = report.witness
print(f"\n|S|^2 submodular? {report.holds}")
print(f"witness: gain of {p} given {sorted(s)} is "
      f"{marginal_gain(decoy, p, s)}, given {sorted(r)} it is "
      f"{marginal_gain(decoy, p, r)} (grew instead of shrinking)")
