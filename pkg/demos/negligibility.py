"""Unstable normal forms are rare: exact counts, walk measures and automata.

Run with ``python demos/negligibility.py`` (a few seconds).
"""
from amalgam.experiments import ExperimentConfig, run_census, run_theorem_a, run_theorem_b
from amalgam.forms import finite_index_spec, reference_spec

ref = reference_spec()

# exact census: fraction of unstable forms among forms with k syllables of length <= n
res = run_census(ExperimentConfig(ref, n_max=4, k_max=6))
census = res["census"]
print("fraction of unstable canonical forms, n = 4")
for k in range(7):
    print(f"  k={k}: {float(census.rho('CNF', 4, k, 'unstable')):.5f}")

# when C has finite index on both sides nothing is ever stable
fin = run_census(ExperimentConfig(finite_index_spec(), n_max=3, k_max=4))
print("\nfinite index: every cell full?",
      all(r["numerator"] == r["denominator"] for r in fin["grid"]))

# decay rates along several ways of letting n grow with k, plus walk measures
rep = run_theorem_a(ExperimentConfig(ref, n_max=6, k_max=8, seed=1), monte_carlo_samples=4000)
print()
print(rep.render())

# regular languages of forms, and the bound by a forbidden-subword language
print(run_theorem_b(ExperimentConfig(ref, seed=1), containment_samples=2000).render())
