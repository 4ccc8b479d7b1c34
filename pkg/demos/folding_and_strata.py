"""Folding a subgroup graph and sorting coset representatives into strata.

Run with ``python demos/folding_and_strata.py``.
"""
from amalgam.forms import reference_spec
from amalgam.stratify import classify_rep, representatives_of_length, stratify_sphere
from amalgam.subgraph import fold, index, membership

spec = reference_spec()
A = spec.alpha["A"]

# C sits in A = F(a, b) as <a^2>; its core graph is a loop of length two
G = spec.graph("A")
print("core graph of C in A:", G.num_vertices, "vertices,", G.num_edges, "edges, index", index(G))
print(G.to_dot(A, "Gamma_A"))

# membership returns the word over the basis of C when it succeeds
for text in ("aaaa", "aba", "AAAAAA"):
    ok, z = membership(A.parse(text), G)
    print(f"{text:8s} in C? {ok}", f"as {spec.alpha['C'].render(z)}" if ok else "")

# a subgroup with several generators folds into a smaller graph
H = fold([A.parse(w) for w in ("ab", "ba", "aab")], 2)
print("<ab, ba, aab>:", H.num_vertices, "vertices, index", index(H))

# coset representatives come from a shortlex spanning tree
T = spec.transversal("A")
print("\nrepresentatives of length <= 2 and their classes")
for n in range(3):
    for s in representatives_of_length(T, n):
        cls = classify_rep(s, T)
        print(f"  {A.render(s) or '1':4s} singular={cls.singular!s:5s} unstable={cls.unstable}")

# only a handful of representatives are unstable, and the proportion dies out
print("\nsphere census in A")
for n in range(1, 7):
    rec = stratify_sphere(T, n)
    print(f"  n={n} total={rec['total']:5d} unstable={rec['unstable']} singular={rec['singular']}")
