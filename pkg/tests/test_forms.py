"""Group specs, C translations and the four normal forms."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from amalgam.forms import (
    ConfigError,
    GroupSpec,
    NormalForm,
    classify_form,
    element_of,
    joint_word,
    mixed_inverse,
    mixed_product,
    normalize_syllables,
    parse_element,
    render_element,
    render_form,
    same_element,
    split_joint,
    to_canonical_form,
    to_cyclically_reduced_form,
    to_form,
    to_free_form,
    to_reduced_form,
    translate_C,
    validate,
)
from amalgam.stratify import conjugate_into
from amalgam.words import free_reduce, random_reduced_word


def random_element(spec, rng, max_syll=5, max_len=4):
    side = rng.choice("AB")
    out = []
    for _ in range(rng.randint(0, max_syll)):
        out.append((side, random_reduced_word(spec.rank(side), rng.randint(1, max_len), rng)))
        side = "B" if side == "A" else "A"
    return tuple(out)


def random_c(spec, rng, side, max_len=3):
    z = random_reduced_word(spec.rank_c, rng.randint(0, max_len), rng)
    return (side, spec.embed(z, side)), z


def test_spec_files_round_trip(ref, fin):
    for spec in (ref, fin):
        again = GroupSpec.from_text(spec.to_text())
        assert again.to_text() == spec.to_text()
        assert again.digest() == spec.digest()


@pytest.mark.parametrize("text", [
    "rank_a = 2\nrank_b = 2\nrank_c = 1\nu_z = a a\n",  # missing v_z
    "rank_a = 2\nrank_b = 2\nrank_c = 1\nu_z = a a\nv_z = x x x\nfoo = 1\n",
    "rank_a = 2\nrank_b = 2\nrank_c = 2\nu_z = a\nu_z = a a\nv_z = x\nv_z = y\n",  # not a basis
    "rank_a = two\n",
    "rank_a = 2\nrank_b = 2\nrank_c = 1\nu_z = q\nv_z = x\n",
])
def test_bad_specs_raise_config_error(text):
    with pytest.raises(ConfigError):
        GroupSpec.from_text(text)


def test_translate_examples(ref):
    assert translate_C((), ref) == ()
    assert translate_C((1, 1, 1, 1), ref, "AB") == (1,) * 6
    with pytest.raises(ValueError):
        translate_C((1,), ref)


def test_translate_round_trip(ref, rnd):
    for _ in range(1000):
        z = random_reduced_word(1, rnd.randint(0, 6), rnd)
        a = ref.embed(z, "A")
        b = translate_C(a, ref, "AB")
        assert b == ref.embed(z, "B")
        assert translate_C(b, ref, "BA") == a


def test_joint_alphabet_round_trip(ref, rnd):
    for _ in range(200):
        g = normalize_syllables(random_element(ref, rnd))
        assert split_joint(joint_word(g, ref), ref) == g


def test_reduced_form_examples(square_spec):
    spec = square_spec
    assert to_reduced_form((("A", (1,)),), spec) == NormalForm("RF", (), (("A", (1,)),))
    nf = to_reduced_form((("A", (1, 1)), ("B", (1,))), spec)
    assert nf.body == (("B", (1, 1, 1)),) and nf.head == ()
    nf = to_reduced_form((("A", (1,)), ("B", (1, -1)), ("A", (-1,))), spec)
    assert nf.k == 0 and nf.head == ()


def test_canonical_form_examples(square_spec):
    spec = square_spec
    nf = to_canonical_form((("A", (1, 1, 1)), ("B", (1,))), spec)
    assert nf.head == (1,) and nf.body == (("A", (1,)), ("B", (1,)))
    c = to_canonical_form((("A", (1, 1, 1, 1)),), spec)
    assert c.k == 0 and c.head == (1, 1)


def test_cyclic_form_examples(square_spec):
    spec = square_spec
    g = (("A", (1, 1, 1)), ("B", (1,)), ("A", (-1, -1, -1)))
    nf = to_cyclically_reduced_form(g, spec)
    assert nf.k == 1 and nf.body[0][0] == "B"
    assert not conjugate_into(nf.body[0][1], spec.graph("B"))
    assert same_element(element_of(nf, spec), g, spec)
    nf0 = to_cyclically_reduced_form((("A", (1, 1)),), spec)
    assert nf0.k == 0 and not nf0.conjugator


def test_cnf_is_invariant_under_c_insertions(ref):
    """The uniqueness check: 100 elements, 500 re-representations each."""
    rng = random.Random(8)
    for _ in range(100):
        g = random_element(ref, rng)
        target = to_canonical_form(g, ref)
        for _ in range(500):
            parts = list(g)
            for _ in range(rng.randint(1, 3)):
                i = rng.randint(0, len(parts))
                side = rng.choice("AB")
                (s1, c), z = random_c(ref, rng, side)
                other = "B" if side == "A" else "A"
                # c c^-1 written with the two halves in different factors
                parts[i:i] = [(s1, c), (other, free_reduce(tuple(-x for x in reversed(ref.embed(z, other)))))]
            assert to_canonical_form(tuple(parts), ref) == target


@given(st.integers(0, 10 ** 6))
@settings(max_examples=150, deadline=None)
def test_forms_represent_the_element(seed):
    from amalgam.forms import reference_spec
    spec = reference_spec()
    rng = random.Random(seed)
    g = random_element(spec, rng)
    for kind in ("EF", "RF", "CNF"):
        nf = to_form(g, spec, kind)
        assert validate(nf, spec)
        assert same_element(element_of(nf, spec), g, spec)
    crf = to_cyclically_reduced_form(g, spec)
    assert validate(crf, spec)
    assert same_element(element_of(crf, spec), g, spec)


def test_crf_round_trip_500(ref):
    rng = random.Random(11)
    for _ in range(500):
        g = random_element(ref, rng, max_syll=6)
        nf = to_cyclically_reduced_form(g, ref)
        assert nf.k in (0, 1) or nf.k % 2 == 0
        assert to_canonical_form(element_of(nf, ref), ref) == to_canonical_form(g, ref)


def test_mixed_group_laws(ref, rnd):
    for _ in range(200):
        g, h = random_element(ref, rnd), random_element(ref, rnd)
        assert to_canonical_form(mixed_product(g, mixed_inverse(g)), ref) == NormalForm("CNF")
        assert same_element(mixed_product(g, h), mixed_product(g, h), ref)


def test_validate_rejects_bad_forms(ref):
    assert not validate(NormalForm("RF", (), (("A", (1, 1)),)), ref)  # syllable in C
    assert not validate(NormalForm("CNF", (), (("A", (1, 1, 1)),)), ref)  # not a rep
    assert not validate(NormalForm("EF", (), (("A", (1,)), ("A", (2,)))), ref)
    assert not validate(NormalForm("CRF", (), (("A", (1,)), ("B", (1,)), ("A", (2,)))), ref)
    assert validate(NormalForm("CRF", (), (("A", (2,)),)), ref)
    assert not validate(NormalForm("CRF", (), (("A", (2, 1, 1, -2)),)), ref)


def test_classification_examples(square_spec, ref):
    spec = square_spec
    cls = classify_form(NormalForm("CNF", (), (("A", (1,)), ("B", (1,)))), spec)
    assert cls.singular and cls.unstable and not cls.indeterminate
    cls = classify_form(NormalForm("CNF", (), (("A", (2,)), ("B", (2,)))), spec)
    assert cls.regular and cls.stable
    head_only = classify_form(NormalForm("CNF", (1,), ()), spec)
    assert head_only.singular and head_only.unstable


def test_parse_and_render(ref):
    g = parse_element("[z] b | x y", ref)
    assert g == (("A", (1, 1)), ("A", (2,)), ("B", (1, 2)))
    nf = to_canonical_form(g, ref)
    assert same_element(parse_element(render_form(nf, ref), ref), g, ref)
    assert render_element((), ref) == "1"
    assert to_free_form(g).body == (("A", (1, 1, 2)), ("B", (1, 2)))
