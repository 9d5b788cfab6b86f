"""Signed permutations: the hyperoctahedral group WB_n and its cosets WB_n / WB_m.

An element acts on a momentum vector slot-wise, ``apply(g, k)[j] = signs[j] * k[perm[j]]``
(0-based ``perm``). Generators act on slots too: ``t_j`` swaps slots ``j`` and ``j+1``
(1-based, as in the usual naming) and ``R1`` negates slot 1. A word ``[w1, w2, ...]``
denotes the element reached from the identity by performing ``w1``, then ``w2``, ...
on the slots, i.e. the product ``w1 w2 ...`` with right multiplication acting on slots.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from math import factorial

import numpy as np

MAX_N = 8


@dataclass(frozen=True, order=True)
class SignedPermutation:
    signs: tuple[int, ...]
    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)
        if len(perm) != len(signs):
            raise ValueError("perm and signs must have the same length")
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"perm {perm} is not a permutation of 0..{len(perm) - 1}")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"signs must be +-1, got {signs}")

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls((1,) * n, tuple(range(n)))

    @classmethod
    def from_window(cls, window) -> "SignedPermutation":
        """Build from signed 1-based indices, e.g. ``(-2, 1)`` means ``k -> (-k2, k1)``."""
        return cls(tuple(1 if w > 0 else -1 for w in window), tuple(abs(w) - 1 for w in window))

    @property
    def window(self) -> tuple[int, ...]:
        return tuple(s * (p + 1) for s, p in zip(self.signs, self.perm))

    def __repr__(self):
        return f"SignedPermutation{self.window}"


def apply(g: SignedPermutation, k):
    k = np.asarray(k)
    if k.shape != (g.n,):
        raise ValueError(f"expected {g.n} momenta, got shape {k.shape}")
    return np.asarray(g.signs) * k[list(g.perm)]


def compose(g: SignedPermutation, h: SignedPermutation) -> SignedPermutation:
    """The element acting as ``apply(g, apply(h, k))``."""
    if g.n != h.n:
        raise ValueError(f"size mismatch: {g.n} vs {h.n}")
    perm = tuple(h.perm[g.perm[j]] for j in range(g.n))
    signs = tuple(g.signs[j] * h.signs[g.perm[j]] for j in range(g.n))
    return SignedPermutation(signs, perm)


def inverse(g: SignedPermutation) -> SignedPermutation:
    perm = [0] * g.n
    signs = [1] * g.n
    for j, (s, p) in enumerate(zip(g.signs, g.perm)):
        perm[p] = j
        signs[p] = s
    return SignedPermutation(tuple(signs), tuple(perm))


def generator(name: str, n: int) -> SignedPermutation:
    """``"R1"`` or ``"t<j>"`` with ``1 <= j <= n-1``."""
    if name == "R1":
        if n < 1:
            raise ValueError("R1 needs n >= 1")
        return SignedPermutation((-1,) + (1,) * (n - 1), tuple(range(n)))
    if name.startswith("t"):
        j = int(name[1:])
        if not 1 <= j <= n - 1:
            raise ValueError(f"t{j} is not a generator of WB_{n}")
        perm = list(range(n))
        perm[j - 1], perm[j] = perm[j], perm[j - 1]
        return SignedPermutation((1,) * n, tuple(perm))
    raise ValueError(f"unknown generator {name!r}")


def generator_names(n: int, signed: bool = True) -> list[str]:
    """Generators in canonical order ``R1 < t1 < t2 < ...``."""
    return (["R1"] if signed and n >= 1 else []) + [f"t{j}" for j in range(1, n)]


def right_multiply(g: SignedPermutation, name: str) -> SignedPermutation:
    """``g`` followed by the slot operation ``name``."""
    return compose(generator(name, g.n), g)


def left_multiply(name: str, g: SignedPermutation) -> SignedPermutation:
    return compose(g, generator(name, g.n))


def word_to_element(word, n: int) -> SignedPermutation:
    g = SignedPermutation.identity(n)
    for name in word:
        g = right_multiply(g, name)
    return g


def length(g: SignedPermutation) -> int:
    """Coxeter length of a signed permutation: inversions plus the negated values."""
    w = g.window
    inv = sum(1 for i in range(g.n) for j in range(i + 1, g.n) if w[i] > w[j])
    return inv - sum(x for x in w if x < 0)


def left_descents(g: SignedPermutation, signed: bool = True) -> list[str]:
    ell = length(g)
    return [s for s in generator_names(g.n, signed) if length(left_multiply(s, g)) < ell]


@lru_cache(maxsize=None)
def word_decomposition(g: SignedPermutation) -> tuple[str, ...]:
    """Canonical normal form: the lexicographically smallest reduced word.

    Built greedily, peeling off the smallest left descent at each step.
    """
    word = []
    while True:
        desc = left_descents(g)
        if not desc:
            break
        word.append(desc[0])
        g = left_multiply(desc[0], g)
    return tuple(word)


def reduced_words(g: SignedPermutation, limit: int | None = None) -> list[tuple[str, ...]]:
    """All reduced words of ``g`` in lexicographic order, truncated to ``limit``."""
    out: list[tuple[str, ...]] = []

    def rec(h, prefix):
        if limit is not None and len(out) >= limit:
            return
        desc = left_descents(h)
        if not desc:
            out.append(tuple(prefix))
            return
        for s in desc:
            rec(left_multiply(s, h), prefix + [s])

    rec(g, [])
    return out


def group_order(n: int) -> int:
    return 2**n * factorial(n)


def enumerate_group(n: int, signed: bool = True) -> list[SignedPermutation]:
    """All elements of WB_n (or of S_n when ``signed`` is False), sorted."""
    if n < 0 or n > MAX_N:
        raise ValueError(f"n must be in [0, {MAX_N}], got {n}")
    sign_choices = product((-1, 1), repeat=n) if signed else [(1,) * n]
    return sorted(
        SignedPermutation(s, p) for s in sign_choices for p in permutations(range(n))
    )


def coset_key(g: SignedPermutation, m: int) -> tuple[int, ...]:
    """Label of the coset ``g WB_m``: the signed momenta sitting in the tail slots ``m+1..n``."""
    return g.window[m:]


def coset_representative(g: SignedPermutation, m: int) -> SignedPermutation:
    """Minimal element in ``(signs, perm)`` order of the coset ``g WB_m``.

    ``WB_m`` acts on slots ``1..m``, so the tail is fixed and the head becomes the
    remaining indices in increasing order, all negated.
    """
    if not 0 <= m <= g.n:
        raise ValueError(f"m must be in [0, {g.n}]")
    tail = g.window[m:]
    head = sorted(set(range(1, g.n + 1)) - {abs(w) for w in tail})
    return SignedPermutation.from_window(tuple(-h for h in head) + tail)


def coset_representatives(n: int, m: int, signed: bool = True) -> list[SignedPermutation]:
    """Canonical representatives of ``WB_n / WB_m`` (or ``S_n / S_m``), sorted."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    if n > MAX_N:
        raise ValueError(f"n must be <= {MAX_N}")
    reps = []
    for tail_idx in permutations(range(1, n + 1), n - m):
        sign_choices = product((-1, 1), repeat=n - m) if signed else [(1,) * (n - m)]
        for signs in sign_choices:
            tail = tuple(s * t for s, t in zip(signs, tail_idx))
            head = sorted(set(range(1, n + 1)) - set(tail_idx))
            if signed:
                head_w = tuple(-h for h in head)
            else:
                head_w = tuple(head)
            reps.append(SignedPermutation.from_window(head_w + tail))
    return sorted(reps)
