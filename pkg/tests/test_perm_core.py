import itertools
from math import factorial

import pytest

from cayley_steiner.perm_core import (
    an_generators,
    check_perm,
    check_signed_perm,
    compose,
    cycles_to_perm,
    ea_generators,
    format_signed_perm,
    identity_perm,
    inverse,
    parity,
    parse_cycles,
    parse_perm,
    parse_signed_perm,
    perm_rank,
    perm_unrank,
    signed_perm_rank,
    signed_perm_unrank,
    signed_prefix_reversal,
)


def all_signed_perms(n):
    for pat in itertools.permutations(range(1, n + 1)):
        for mask in range(1 << n):
            yield tuple(-pat[i] if (mask >> i) & 1 else pat[i] for i in range(n))


def test_reversal_examples():
    assert signed_prefix_reversal((1, 2, 3), 1) == (-1, 2, 3)
    assert signed_prefix_reversal((1, -2, 3), 2) == (2, -1, 3)
    assert signed_prefix_reversal((1, 2, 3), 3) == (-3, -2, -1)


def test_reversal_out_of_range():
    with pytest.raises(ValueError):
        signed_prefix_reversal((1, 2), 0)
    with pytest.raises(ValueError):
        signed_prefix_reversal((1, 2), 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_reversal_involution_exhaustive(n):
    for x in all_signed_perms(n):
        for i in range(1, n + 1):
            assert signed_prefix_reversal(signed_prefix_reversal(x, i), i) == x


def test_compose_examples():
    t12 = cycles_to_perm([(1, 2)], 3)
    assert compose(t12, t12) == identity_perm(3)
    sigma = (3, 1, 2)
    assert compose(identity_perm(3), sigma) == sigma
    assert compose(sigma, identity_perm(3)) == sigma
    # brute-force the function table for the product of (123) and (12)
    c123 = cycles_to_perm([(1, 2, 3)], 3)
    expected = tuple(c123[t12[i - 1] - 1] for i in (1, 2, 3))
    assert expected == (3, 2, 1)
    assert compose(c123, t12) == (3, 2, 1)


def test_compose_length_mismatch():
    with pytest.raises(ValueError):
        compose((1, 2), (1, 2, 3))


def test_parity_examples():
    assert parity(identity_perm(4)) == "even"
    assert parity(cycles_to_perm([(1, 2)], 4)) == "odd"
    assert parity(cycles_to_perm([(1, 2), (3, 4)], 4)) == "even"


@pytest.mark.parametrize("n", [3, 4])
def test_parity_multiplicative_exhaustive(n):
    perms = [perm_unrank(n, r) for r in range(factorial(n))]
    for sigma in perms:
        for tau in perms:
            left = parity(compose(sigma, tau))
            xor = "even" if parity(sigma) == parity(tau) else "odd"
            assert left == xor


def test_inverse():
    for r in range(factorial(4)):
        p = perm_unrank(4, r)
        assert compose(p, inverse(p)) == identity_perm(4)


def test_an_generators_small():
    assert set(an_generators(3)) == {(2, 3, 1), (3, 1, 2)}
    assert set(ea_generators(3)) == {(2, 1, 3), (2, 3, 1), (3, 1, 2)}
    assert len(ea_generators(5)) == 5


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_generator_set_invariants(n):
    omega = an_generators(n)
    assert len(omega) == n - 1
    assert all(parity(s) == "even" for s in omega)
    star = ea_generators(n)
    assert len(star) == n
    assert set(star) == set(omega) | {cycles_to_perm([(1, 2)], n)}
    odd = [s for s in star if parity(s) == "odd"]
    assert odd == [cycles_to_perm([(1, 2)], n)]
    for gens in (omega, star):
        assert identity_perm(n) not in gens
        assert {inverse(s) for s in gens} == set(gens)


def test_generators_domain_error():
    with pytest.raises(ValueError):
        an_generators(2)
    with pytest.raises(ValueError):
        ea_generators(2)


def test_rank_round_trip_bp3():
    seen = set()
    for x in all_signed_perms(3):
        r = signed_perm_rank(x)
        assert signed_perm_unrank(3, r) == x
        seen.add(r)
    assert len(seen) == 48


def test_rank_bp2_covers_dense_range():
    ranks = sorted(signed_perm_rank(x) for x in all_signed_perms(2))
    assert ranks == list(range(8))


def test_perm_rank_round_trip():
    for r in range(factorial(4)):
        assert perm_rank(perm_unrank(4, r)) == r


def test_rank_domain_errors():
    with pytest.raises(ValueError):
        perm_unrank(3, 6)
    with pytest.raises(ValueError):
        signed_perm_unrank(2, 8)
    with pytest.raises(ValueError):
        signed_perm_unrank(2, -1)


def test_validation():
    with pytest.raises(ValueError):
        check_perm((1, 1, 2))
    with pytest.raises(ValueError):
        check_signed_perm((1,))
    with pytest.raises(ValueError):
        check_signed_perm((1, 3))
    assert check_signed_perm([-2, 1]) == (-2, 1)


def test_text_forms():
    assert parse_signed_perm("1,-2,3") == (1, -2, 3)
    assert format_signed_perm((1, -2, 3)) == "1,-2,3"
    assert parse_perm("2, 1, 3") == (2, 1, 3)
    with pytest.raises(ValueError):
        parse_signed_perm("1,2,x")
    with pytest.raises(ValueError):
        parse_perm("1,1,2")


def test_cycle_parsing():
    assert parse_cycles("(1 2)(3 4)", 4) == cycles_to_perm([(1, 2), (3, 4)], 4)
    assert parse_cycles("(123)", 3) == (2, 3, 1)
    assert parse_cycles("(1,3,2)", 3) == (3, 1, 2)
    with pytest.raises(ValueError):
        parse_cycles("1 2 3", 3)
    with pytest.raises(ValueError):
        parse_cycles("(1 2)(2 3)", 3)
