"""The four normal forms of one element of G = A *_C B.

Run with ``python demos/normal_forms.py``.
"""
from amalgam.forms import (
    classify_form,
    element_of,
    parse_element,
    reference_spec,
    render_element,
    render_form,
    same_element,
    to_form,
)

spec = reference_spec()  # a^2 = z = x^3

# syllables separated by "|", uppercase letters are inverses
g = parse_element("a a a | x | b a a | x x x x | a", spec)
print("element      :", render_element(g, spec))
for kind in ("EF", "RF", "CNF", "CRF"):
    nf = to_form(g, spec, kind)
    cls = classify_form(nf, spec)
    assert same_element(element_of(nf, spec), g, spec)
    print(f"{kind:4s} (k={nf.k}) : {render_form(nf, spec):32s} "
          f"unstable={cls.unstable} singular={cls.singular}")

# moving a^2 = x^3 across syllable boundaries does not change the canonical form
h = parse_element("a | x x x x | b | x x x x x x x | a", spec)
print("\nsame element written differently:", render_element(h, spec))
print("CNF agrees:", to_form(g, spec, "CNF") == to_form(h, spec, "CNF"))
