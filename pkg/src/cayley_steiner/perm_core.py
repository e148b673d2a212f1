"""Algebra of signed and plain permutations.

Vertices of the burnt pancake graph BP_n are signed permutations: tuples
of nonzero integers whose absolute values rearrange 1..n, a negative entry
standing for a burnt symbol. Vertices of the godan graph EA_n and of the
alternating group network AN_n are plain permutations of 1..n in one-line
form. Both kinds are represented as plain tuples of ints and every
operation returns a fresh tuple, so values are immutable and safe to share
between concurrent workers.

Dense integer ranks index the vertices of the generated graphs:

* plain permutations use the factorial number system (Lehmer code), a
  bijection with 0..n!-1 in one-line lexicographic order;
* signed permutations use rank(|x|) * 2**n + sign_mask, where bit i-1 of
  sign_mask is set exactly when x_i is negative, a bijection with
  0..(2**n * n!)-1.

Both schemes are fixed; graph dumps and certificates rely on them being
stable across runs.
"""

from __future__ import annotations

import re
from math import factorial

__all__ = [
    "check_perm",
    "check_signed_perm",
    "identity_perm",
    "signed_prefix_reversal",
    "compose",
    "inverse",
    "parity",
    "perm_rank",
    "perm_unrank",
    "signed_perm_rank",
    "signed_perm_unrank",
    "cycles_to_perm",
    "parse_cycles",
    "an_generators",
    "ea_generators",
    "format_perm",
    "parse_perm",
    "format_signed_perm",
    "parse_signed_perm",
]


def check_perm(p) -> tuple[int, ...]:
    """Validate a one-line permutation of 1..n and return it as a tuple."""
    t = tuple(p)
    if sorted(t) != list(range(1, len(t) + 1)):
        raise ValueError(f"not a permutation of 1..{len(t)}: {p!r}")
    return t


def check_signed_perm(x) -> tuple[int, ...]:
    """Validate a signed permutation (n >= 2) and return it as a tuple."""
    t = tuple(x)
    if len(t) < 2:
        raise ValueError(f"signed permutations need n >= 2, got {x!r}")
    if sorted(abs(v) for v in t) != list(range(1, len(t) + 1)):
        raise ValueError(f"absolute values must permute 1..{len(t)}: {x!r}")
    return t


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def signed_prefix_reversal(x, i: int) -> tuple[int, ...]:
    """Reverse the first i entries of x and negate each; the suffix stays.

    This is the adjacency operation of the burnt pancake graph: x is
    adjacent to its i-th signed prefix reversal for every i in 1..n.
    Applying the same reversal twice restores x.
    """
    if not 1 <= i <= len(x):
        raise ValueError(f"reversal index {i} out of range 1..{len(x)}")
    return tuple(-x[k] for k in range(i - 1, -1, -1)) + tuple(x[i:])


def compose(sigma, tau) -> tuple[int, ...]:
    """Composition mapping i to sigma(tau(i)), both in one-line form."""
    if len(sigma) != len(tau):
        raise ValueError(f"length mismatch: {len(sigma)} vs {len(tau)}")
    return tuple(sigma[t - 1] for t in tau)


def inverse(p) -> tuple[int, ...]:
    """Inverse permutation in one-line form."""
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v - 1] = i + 1
    return tuple(inv)


def parity(p) -> str:
    """Return "even" or "odd", the sign of a one-line permutation."""
    n = len(p)
    seen = [False] * n
    cycles = 0
    for i in range(n):
        if seen[i]:
            continue
        cycles += 1
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j] - 1
    return "even" if (n - cycles) % 2 == 0 else "odd"


def perm_rank(p) -> int:
    """Lehmer rank of a one-line permutation, in 0..n!-1."""
    n = len(p)
    r = 0
    for i in range(n):
        smaller = 0
        for j in range(i + 1, n):
            if p[j] < p[i]:
                smaller += 1
        r = r * (n - i) + smaller
    return r


def perm_unrank(n: int, r: int) -> tuple[int, ...]:
    """Inverse of perm_rank for permutations of 1..n."""
    if not 0 <= r < factorial(n):
        raise ValueError(f"rank {r} out of range 0..{factorial(n) - 1}")
    avail = list(range(1, n + 1))
    out = []
    for i in range(n):
        f = factorial(n - 1 - i)
        d, r = divmod(r, f)
        out.append(avail.pop(d))
    return tuple(out)


def signed_perm_rank(x) -> int:
    """Dense rank of a signed permutation, in 0..(2**n * n!)-1."""
    n = len(x)
    mask = 0
    for i, v in enumerate(x):
        if v < 0:
            mask |= 1 << i
    return (perm_rank(tuple(abs(v) for v in x)) << n) | mask


def signed_perm_unrank(n: int, r: int) -> tuple[int, ...]:
    """Inverse of signed_perm_rank."""
    span = factorial(n) << n
    if not 0 <= r < span:
        raise ValueError(f"rank {r} out of range 0..{span - 1}")
    pattern = perm_unrank(n, r >> n)
    mask = r & ((1 << n) - 1)
    return tuple(-pattern[i] if (mask >> i) & 1 else pattern[i] for i in range(n))


def cycles_to_perm(cycles, n: int) -> tuple[int, ...]:
    """One-line permutation of 1..n from disjoint cycles.

    cycles_to_perm([(1, 2, 3)], 4) maps 1->2, 2->3, 3->1 and fixes 4.
    """
    img = list(range(n + 1))  # 1-based, img[0] unused
    seen: set[int] = set()
    for cyc in cycles:
        for a in cyc:
            if not 1 <= a <= n:
                raise ValueError(f"cycle element {a} out of range 1..{n}")
            if a in seen:
                raise ValueError(f"element {a} repeated across cycles")
            seen.add(a)
        for k, a in enumerate(cyc):
            img[a] = cyc[(k + 1) % len(cyc)]
    return tuple(img[1:])


def parse_cycles(text: str, n: int) -> tuple[int, ...]:
    """Parse cycle notation such as "(1 2)(3 4)" or "(123)" into one-line form.

    Elements inside a cycle may be separated by spaces or commas; a lone
    all-digit token like "123" is read digit by digit.
    """
    groups = re.findall(r"\(([^()]*)\)", text)
    leftover = re.sub(r"\([^()]*\)", "", text).strip()
    if leftover or not groups:
        raise ValueError(f"bad cycle notation: {text!r}")
    cycles = []
    for g in groups:
        toks = [t for t in re.split(r"[,\s]+", g.strip()) if t]
        if len(toks) == 1 and len(toks[0]) > 1 and toks[0].isdigit():
            toks = list(toks[0])
        if not toks:
            raise ValueError(f"empty cycle in {text!r}")
        cycles.append(tuple(int(t) for t in toks))
    return cycles_to_perm(cycles, n)


def an_generators(n: int) -> tuple[tuple[int, ...], ...]:
    """Generators of the alternating group network: the two 3-cycles on
    {1,2,3} plus (12)(3i) for 4 <= i <= n. Sorted, n-1 elements, all even,
    closed under inverse."""
    if n < 3:
        raise ValueError(f"alternating group generators need n >= 3, got {n}")
    gens = [cycles_to_perm([(1, 2, 3)], n), cycles_to_perm([(1, 3, 2)], n)]
    for i in range(4, n + 1):
        gens.append(cycles_to_perm([(1, 2), (3, i)], n))
    return tuple(sorted(gens))


def ea_generators(n: int) -> tuple[tuple[int, ...], ...]:
    """Generators of the godan graph: an_generators(n) plus the transposition
    (12). Sorted, n elements, closed under inverse."""
    if n < 3:
        raise ValueError(f"godan generators need n >= 3, got {n}")
    return tuple(sorted(an_generators(n) + (cycles_to_perm([(1, 2)], n),)))


def format_perm(p) -> str:
    return ",".join(str(v) for v in p)


def parse_perm(text: str) -> tuple[int, ...]:
    """Parse "2,1,3" into a validated one-line permutation."""
    try:
        vals = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise ValueError(f"bad permutation text: {text!r}") from None
    return check_perm(vals)


def format_signed_perm(x) -> str:
    return ",".join(str(v) for v in x)


def parse_signed_perm(text: str) -> tuple[int, ...]:
    """Parse "1,-2,3" into a validated signed permutation."""
    try:
        vals = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise ValueError(f"bad signed permutation text: {text!r}") from None
    return check_signed_perm(vals)
