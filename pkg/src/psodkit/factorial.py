"""Exact arithmetic for characters in Q/Z and the recursive factorial order.

Characters live in Q cap (-1, 0]; a k-tuple of them indexes one factor of a
root construction over a codimension-k stratum.  ``Z_r`` denotes the subgroup
{-(r-1)/r, ..., -1/r, 0} with the standard rational order.  On ``Z_{n!}`` the
total order ``<!`` is defined recursively through the quotients
``Z_{n!} -> Z_n``: compare images first, then recurse on the fiber coordinate
at level n-1.  On tuples, a lower minimal level wins; at equal level the
comparison is componentwise (a partial order for width >= 2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .config import DEFAULT_CAPS, Caps
from .errors import InputError
from .preorders import FinitePreorder

LESS = "less"
GREATER = "greater"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


# ---------------------------------------------------------------------------
# residues and tuples


@dataclass(frozen=True, order=False)
class Residue:
    """A reduced rational in (-1, 0]: num/den with -den < num <= 0."""

    num: int
    den: int = 1

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise InputError("denominator must be positive")
        if not (-self.den < self.num <= 0):
            raise InputError(f"{self.num}/{self.den} is not in (-1, 0]")
        if math.gcd(abs(self.num), self.den) != 1 and self.num != 0:
            raise InputError(f"{self.num}/{self.den} is not reduced")
        if self.num == 0 and self.den != 1:
            raise InputError("zero must be written 0/1")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Residue":
        if not (-1 < value <= 0):
            raise InputError(f"{value} is not in (-1, 0]")
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: str) -> "Residue":
        text = text.strip()
        try:
            return cls.from_fraction(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse residue {text!r}") from exc

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def is_zero(self) -> bool:
        return self.num == 0

    def __str__(self) -> str:
        return "0" if self.num == 0 else f"{self.num}/{self.den}"

    def __lt__(self, other: "Residue") -> bool:
        return self.value < other.value

    def __le__(self, other: "Residue") -> bool:
        return self.value <= other.value


ZERO = Residue(0)


@dataclass(frozen=True)
class CharTuple:
    """A finite tuple of residues; the empty tuple indexes the ambient factor."""

    components: tuple[Residue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def of(cls, *values: str | Fraction | Residue) -> "CharTuple":
        comps = []
        for v in values:
            if isinstance(v, Residue):
                comps.append(v)
            elif isinstance(v, Fraction):
                comps.append(Residue.from_fraction(v))
            else:
                comps.append(Residue.parse(v))
        return cls(tuple(comps))

    @classmethod
    def parse(cls, text: str) -> "CharTuple":
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            inner = text[1:-1].strip()
            parts = [p for p in inner.split(",") if p.strip()]
            return cls(tuple(Residue.parse(p) for p in parts))
        return cls((Residue.parse(text),))

    def __len__(self) -> int:
        return len(self.components)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.components) + ")"

    def nonzero(self) -> bool:
        return all(not c.is_zero() for c in self.components)

    def denominators(self) -> tuple[int, ...]:
        return tuple(c.den for c in self.components)


# ---------------------------------------------------------------------------
# Z_r


def zr_elements(r: int, starred: bool = False) -> tuple[Residue, ...]:
    """The residues {-(r-1)/r, ..., -1/r, 0}, reduced and sorted by the
    standard rational order; ``starred`` drops 0.

    >>> [str(x) for x in zr_elements(4, starred=True)]
    ['-3/4', '-1/2', '-1/4']
    >>> [str(x) for x in zr_elements(2)]
    ['-1/2', '0']
    """
    if r < 1:
        raise InputError("r must be at least 1")
    out = [Residue.from_fraction(Fraction(-p, r)) for p in range(r - 1, 0, -1)]
    if not starred:
        out.append(ZERO)
    return tuple(out)


# ---------------------------------------------------------------------------
# normal factorial form


@dataclass(frozen=True)
class FactorialForm:
    """A tuple written over the common denominator n! at the least level n >= 2."""

    level: int
    numerators: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.level < 2:
            raise InputError("factorial level starts at 2")
        bound = math.factorial(self.level)
        for p in self.numerators:
            if not (0 <= p < bound):
                raise InputError(f"numerator {p} out of range for level {self.level}")
        if self.level > 2 and all(p % self.level == 0 for p in self.numerators):
            raise InputError("not in normal form: every numerator divisible by the level")

    def to_char_tuple(self) -> CharTuple:
        f = math.factorial(self.level)
        return CharTuple(
            tuple(Residue.from_fraction(Fraction(-p, f)) for p in self.numerators)
        )


def to_factorial_form(chi: CharTuple, caps: Caps = DEFAULT_CAPS) -> FactorialForm:
    """The unique minimal-level representation chi = (-p_1/n!, ..., -p_N/n!).

    >>> to_factorial_form(CharTuple.of("-1/3", "-1/2"))
    FactorialForm(level=3, numerators=(2, 3))
    """
    lcm = 1
    for c in chi.components:
        lcm = lcm * c.den // math.gcd(lcm, c.den)
    level = 2
    while math.factorial(level) % lcm != 0:
        level += 1
        caps.check_level(level)
    f = math.factorial(level)
    return FactorialForm(level, tuple(-c.num * (f // c.den) for c in chi.components))


# ---------------------------------------------------------------------------
# the recursive order on Z_{n!}


def cmp_bang_znfact(p: int, q: int, level: int) -> int:
    """Compare -p/n! against -q/n! in the recursive order on Z_{n!}.

    Returns -1, 0, or +1.  Images under Z_{n!} -> Z_n (p mod n) are compared
    in the standard order (larger remainder is more negative, hence smaller);
    on a tie the fiber coordinates floor(p/n) are compared at level n-1.
    """
    if level < 2:
        raise InputError("level must be at least 2")
    bound = math.factorial(level)
    if not (0 <= p < bound and 0 <= q < bound):
        raise InputError("numerators must lie in [0, n!)")
    n = level
    while n > 1:
        s, t = p % n, q % n
        if s != t:
            return -1 if s > t else 1
        p, q = p // n, q // n
        n -= 1
    return 0


@lru_cache(maxsize=None)
def bang_chain(level: int) -> tuple[int, ...]:
    """All of Z_{n!} as numerators, ascending in the recursive order.

    Independent of ``cmp_bang_znfact``: materializes the fibers over Z_n in
    image order and concatenates recursively.
    """
    if level < 1:
        raise InputError("level must be at least 1")
    if level == 1:
        return (0,)
    inner = bang_chain(level - 1)
    return tuple(
        q * level + s for s in range(level - 1, -1, -1) for q in inner
    )


def bang_rank(p: int, level: int) -> int:
    """Position of -p/n! in the ascending recursive order (0 = smallest)."""
    return bang_chain(level).index(p)


# ---------------------------------------------------------------------------
# the order on tuples


def cmp_bang(chi: CharTuple, psi: CharTuple, caps: Caps = DEFAULT_CAPS) -> str:
    """Compare two tuples: 'less', 'greater', 'equal', or 'incomparable'.

    Deeper normal factorial level comes first; at equal level, componentwise
    comparison in Z_{n!} in every coordinate.

    >>> cmp_bang(CharTuple.of("-1/3", "-1/3"), CharTuple.of("-1/2", "-1/2"))
    'less'
    >>> cmp_bang(CharTuple.of("-5/6", "0"), CharTuple.of("-1/3", "-1/6"))
    'incomparable'
    """
    if len(chi) != len(psi):
        raise InputError("tuples must have equal length")
    if chi == psi:
        return EQUAL
    a, b = to_factorial_form(chi, caps), to_factorial_form(psi, caps)
    if a.level != b.level:
        return LESS if a.level > b.level else GREATER
    le = all(
        cmp_bang_znfact(p, q, a.level) <= 0 for p, q in zip(a.numerators, b.numerators)
    )
    ge = all(
        cmp_bang_znfact(p, q, a.level) >= 0 for p, q in zip(a.numerators, b.numerators)
    )
    if le:
        return LESS
    if ge:
        return GREATER
    return INCOMPARABLE


def leq_bang(chi: CharTuple, psi: CharTuple, caps: Caps = DEFAULT_CAPS) -> bool:
    return cmp_bang(chi, psi, caps) in (LESS, EQUAL)


# ---------------------------------------------------------------------------
# index preorders


def _product_tuples(
    values: Sequence[Residue], k: int, caps: Caps, what: str
) -> list[CharTuple]:
    caps.check_carrier(len(values) ** k if k else 1, what)
    return [CharTuple(t) for t in itertools.product(values, repeat=k)]


def build_zkr(
    k: int, r: int, starred: bool = False, caps: Caps = DEFAULT_CAPS
) -> FinitePreorder:
    """The k-fold product of Z_r (or of its nonzero part) with the
    componentwise standard order.  k = 0 gives the singleton {()}."""
    if k < 0:
        raise InputError("k must be non-negative")
    tuples = _product_tuples(zr_elements(r, starred), k, caps, "character block")
    labels = tuple(str(t) for t in tuples)
    leq = tuple(
        tuple(
            all(a <= b for a, b in zip(s.components, t.components)) for t in tuples
        )
        for s in tuples
    )
    return FinitePreorder(labels, leq)


def _char_blocks_leq(
    blocks: Sequence[tuple[str, int, CharTuple]],
    same_block_le,
) -> FinitePreorder:
    """Assemble a divisor-index preorder from (block id, codim, character)
    entries: deeper codimension first, distinct blocks of equal codimension
    related both ways, same block compared by ``same_block_le``."""
    n = len(blocks)
    leq = [[False] * n for _ in range(n)]
    for i, (bi, ki, ci) in enumerate(blocks):
        for j, (bj, kj, cj) in enumerate(blocks):
            if i == j:
                leq[i][j] = True
            elif ki != kj:
                leq[i][j] = ki > kj
            elif bi != bj:
                leq[i][j] = True
            else:
                leq[i][j] = same_block_le(ci, cj)
    labels = tuple(
        (f"{b}:{c}" if b else str(c)) for b, _, c in blocks
    )
    return FinitePreorder(labels, tuple(tuple(row) for row in leq))


def build_zdr(codims: Iterable[int], r: int, caps: Caps = DEFAULT_CAPS) -> FinitePreorder:
    """The plain divisor index: disjoint union of the starred character blocks
    for every codimension up to the maximum, larger codimension strictly
    first, componentwise order within a block."""
    if r < 1:
        raise InputError("r must be at least 1")
    nd = max(codims, default=0)
    entries: list[tuple[str, int, CharTuple]] = []
    for k in range(nd, -1, -1):
        for t in _product_tuples(zr_elements(r, True), k, caps, "divisor index"):
            entries.append(("", k, t))
    caps.check_carrier(len(entries), "divisor index")

    def same(ci: CharTuple, cj: CharTuple) -> bool:
        return all(a <= b for a, b in zip(ci.components, cj.components))

    return _char_blocks_leq(entries, same)


def build_zdr_stratified(
    strata: Sequence[tuple[str, int]], r: int, caps: Caps = DEFAULT_CAPS
) -> FinitePreorder:
    """The stratified divisor index: one starred character block per stratum,
    labelled 'stratum:(chars)'.  Blocks of equal codimension from distinct
    strata are related both ways (their factors direct-sum)."""
    if r < 1:
        raise InputError("r must be at least 1")
    ids = [s for s, _ in strata]
    if len(set(ids)) != len(ids):
        raise InputError("stratum ids must be distinct")
    entries: list[tuple[str, int, CharTuple]] = []
    for sid, k in sorted(strata, key=lambda sk: (-sk[1], ids.index(sk[0]))):
        for t in _product_tuples(zr_elements(r, True), k, caps, "divisor index"):
            entries.append((sid, k, t))
    caps.check_carrier(len(entries), "divisor index")

    def same(ci: CharTuple, cj: CharTuple) -> bool:
        return all(a <= b for a, b in zip(ci.components, cj.components))

    return _char_blocks_leq(entries, same)


# ---------------------------------------------------------------------------
# truncated enumeration of Q/Z characters


def enumerate_characters(
    k: int,
    max_level: int,
    coprime_to: Optional[int] = None,
    caps: Caps = DEFAULT_CAPS,
) -> list[CharTuple]:
    """All k-tuples of nonzero characters representable at factorial level at
    most ``max_level``, sorted compatibly with the tuple order: deeper normal
    level first, then lexicographically on the recursive ranks of the
    numerators (a deterministic linear extension of the componentwise order).

    ``coprime_to`` keeps only characters whose denominators avoid that prime.
    """
    if max_level < 2:
        raise InputError("max_level must be at least 2")
    caps.check_level(max_level)
    f = math.factorial(max_level)
    pool = [
        Residue.from_fraction(Fraction(-p, f)) for p in range(1, f)
    ]
    if coprime_to is not None:
        if coprime_to < 2:
            raise InputError("coprime_to must be a prime >= 2")
        pool = [c for c in pool if c.den % coprime_to != 0]
    caps.check_carrier(len(pool) ** k if k else 1, "character enumeration")
    out: list[tuple[tuple[int, ...], CharTuple]] = []
    for t in itertools.product(pool, repeat=k):
        chi = CharTuple(t)
        form = to_factorial_form(chi, caps)
        ranks = tuple(bang_rank(p, form.level) for p in form.numerators)
        out.append(((-form.level,) + ranks, chi))
    out.sort(key=lambda pair: pair[0])
    return [chi for _, chi in out]
