"""Exact integer linear algebra and finitely generated abelian groups.

Hermite and Smith normal forms over arbitrary-precision integers power the
group arithmetic: groups are carried as invariant factors externally and as
presentation matrices internally, so limits of group diagrams reduce to
kernel and quotient computations that end in a Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InputError, PreconditionError
from .preorders import (
    ColimitResult,
    FinitePreorder,
    OrderReflectingMap,
    PreorderDiagram,
    colimit,
)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise InputError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows or any(
            len(r) != self.cols for r in self.entries
        ):
            raise InputError("entry grid does not match the stated dimensions")
        object.__setattr__(
            self, "entries", tuple(tuple(int(x) for x in r) for r in self.entries)
        )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntMatrix":
        k = len(values)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        return cls(
            rows,
            cols,
            tuple(
                tuple(values[i] if i == j and i < k else 0 for j in range(cols))
                for i in range(rows)
            ),
        )

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.entries[ij[0]][ij[1]]

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InputError("matrix dimensions do not compose")
        out = [
            [
                sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols))
                for j in range(other.cols)
            ]
            for i in range(self.rows)
        ]
        return IntMatrix.from_rows(out, other.cols)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise InputError("vector length does not match")
        return tuple(
            sum(self.entries[i][k] * vec[k] for k in range(self.cols))
            for i in range(self.rows)
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise InputError("row counts differ")
        return IntMatrix(
            self.rows,
            self.cols + other.cols,
            tuple(a + b for a, b in zip(self.entries, other.entries)),
        )

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def det(self) -> int:
        """Exact determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise InputError("determinant needs a square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


def _blockdiag(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r = c = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[r + i][c + j] = b.entries[i][j]
        r += b.rows
        c += b.cols
    return IntMatrix.from_rows(out, cols)


# ---------------------------------------------------------------------------
# normal forms


def hnf(a: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form: U * a = H with U unimodular, H in row echelon
    with positive pivots and entries above a pivot reduced into [0, pivot).
    Pivot choice: smallest nonzero absolute value, lowest row index on ties.
    """
    m = [list(r) for r in a.entries]
    u = [[int(i == j) for j in range(a.rows)] for i in range(a.rows)]
    row = 0
    for col in range(a.cols):
        while True:
            live = [i for i in range(row, a.rows) if m[i][col] != 0]
            if not live:
                break
            pivot = min(live, key=lambda i: (abs(m[i][col]), i))
            if pivot != row:
                m[row], m[pivot] = m[pivot], m[row]
                u[row], u[pivot] = u[pivot], u[row]
            if len(live) == 1:
                break
            p = m[row][col]
            for i in range(row + 1, a.rows):
                if m[i][col] != 0:
                    q = m[i][col] // p
                    for j in range(a.cols):
                        m[i][j] -= q * m[row][j]
                    for j in range(a.rows):
                        u[i][j] -= q * u[row][j]
        if row < a.rows and m[row][col] != 0:
            if m[row][col] < 0:
                m[row] = [-x for x in m[row]]
                u[row] = [-x for x in u[row]]
            p = m[row][col]
            for i in range(row):
                q = m[i][col] // p
                if q:
                    for j in range(a.cols):
                        m[i][j] -= q * m[row][j]
                    for j in range(a.rows):
                        u[i][j] -= q * u[row][j]
            row += 1
            if row == a.rows:
                break
    return IntMatrix.from_rows(m, a.cols), IntMatrix.from_rows(u, a.rows)


def kernel(a: IntMatrix) -> IntMatrix:
    """A lattice basis (columns) of the integer kernel {x : a x = 0}."""
    h, u = hnf(a.transpose())
    basis = [u.entries[i] for i in range(h.rows) if all(x == 0 for x in h.entries[i])]
    return IntMatrix(
        a.cols, len(basis), tuple(tuple(b[i] for b in basis) for i in range(a.cols))
    )


def column_basis(a: IntMatrix) -> IntMatrix:
    """A basis (columns) of the lattice spanned by the columns of ``a``."""
    h, _ = hnf(a.transpose())
    rows = [r for r in h.entries if any(x != 0 for x in r)]
    return IntMatrix(
        a.rows, len(rows), tuple(tuple(r[i] for r in rows) for i in range(a.rows))
    )


def solve_columns(b: IntMatrix, r: IntMatrix) -> IntMatrix:
    """Solve b X = r exactly over the integers (columns of r must lie in the
    column lattice of b, with b's columns independent)."""
    if b.rows != r.rows:
        raise InputError("row counts differ")
    h, u = hnf(b)
    rhs = u.mul(r)
    pivots = []
    for i in range(h.rows):
        cols = [j for j in range(h.cols) if h.entries[i][j] != 0]
        if cols:
            pivots.append((i, cols[0]))
    x = [[0] * r.cols for _ in range(b.cols)]
    for c in range(r.cols):
        vec = [rhs.entries[i][c] for i in range(h.rows)]
        sol = [0] * b.cols
        for i, j in reversed(pivots):
            acc = vec[i] - sum(h.entries[i][t] * sol[t] for t in range(j + 1, h.cols))
            if acc % h.entries[i][j] != 0:
                raise PreconditionError("system has no integer solution")
            sol[j] = acc // h.entries[i][j]
        for i in range(h.rows):
            lhs = sum(h.entries[i][t] * sol[t] for t in range(h.cols))
            if lhs != rhs.entries[i][c]:
                raise PreconditionError("system has no integer solution")
        for t in range(b.cols):
            x[t][c] = sol[t]
    return IntMatrix.from_rows(x, r.cols)


def _snf_pivot_smallest(m: list[list[int]], t: int) -> Optional[tuple[int, int]]:
    best = None
    for i in range(t, len(m)):
        for j in range(t, len(m[0]) if m else 0):
            if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                best = (i, j)
    return best


def _snf_pivot_first(m: list[list[int]], t: int) -> Optional[tuple[int, int]]:
    for i in range(t, len(m)):
        for j in range(t, len(m[0]) if m else 0):
            if m[i][j] != 0:
                return (i, j)
    return None


def snf(a: IntMatrix, pivot: str = "smallest") -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: U * a * V = S diagonal with d_1 | d_2 | ..., U and V
    unimodular.  ``pivot`` selects the reduction strategy ('smallest' abs
    value with stable tie-break, or 'first' nonzero); the invariant factors do
    not depend on it."""
    choose = _snf_pivot_smallest if pivot == "smallest" else _snf_pivot_first
    m = [list(r) for r in a.entries]
    u = [[int(i == j) for j in range(a.rows)] for i in range(a.rows)]
    v = [[int(i == j) for j in range(a.cols)] for i in range(a.cols)]
    t = 0
    limit = min(a.rows, a.cols)
    while t < limit:
        pos = choose(m, t)
        if pos is None:
            break
        pi, pj = pos
        m[t], m[pi] = m[pi], m[t]
        u[t], u[pi] = u[pi], u[t]
        for row in m:
            row[t], row[pj] = row[pj], row[t]
        for row in v:
            row[t], row[pj] = row[pj], row[t]
        while True:
            # clear column t
            dirty = False
            for i in range(t + 1, a.rows):
                if m[i][t] == 0:
                    continue
                q = m[i][t] // m[t][t]
                if q:
                    for j in range(a.cols):
                        m[i][j] -= q * m[t][j]
                    for j in range(a.rows):
                        u[i][j] -= q * u[t][j]
                if m[i][t] != 0:
                    m[t], m[i] = m[i], m[t]
                    u[t], u[i] = u[i], u[t]
                    dirty = True
            # clear row t
            for j in range(t + 1, a.cols):
                if m[t][j] == 0:
                    continue
                q = m[t][j] // m[t][t]
                if q:
                    for i in range(a.rows):
                        m[i][j] -= q * m[i][t]
                    for i in range(a.cols):
                        v[i][j] -= q * v[i][t]
                if m[t][j] != 0:
                    for i in range(a.rows):
                        m[i][t], m[i][j] = m[i][j], m[i][t]
                    for i in range(a.cols):
                        v[i][t], v[i][j] = v[i][j], v[i][t]
                    dirty = True
            if not dirty and all(m[i][t] == 0 for i in range(t + 1, a.rows)) and all(
                m[t][j] == 0 for j in range(t + 1, a.cols)
            ):
                break
        # divisibility: fold any entry the pivot misses into the pivot
        offender = None
        for i in range(t + 1, a.rows):
            for j in range(t + 1, a.cols):
                if m[i][j] % m[t][t] != 0:
                    offender = (i, j)
                    break
            if offender:
                break
        if offender:
            i, _ = offender
            for j in range(a.cols):
                m[t][j] += m[i][j]
            for j in range(a.rows):
                u[t][j] += u[i][j]
            continue
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return (
        IntMatrix.from_rows(m, a.cols),
        IntMatrix.from_rows(u, a.rows),
        IntMatrix.from_rows(v, a.cols),
    )


def invariant_factors(a: IntMatrix, pivot: str = "smallest") -> tuple[int, ...]:
    s, _, _ = snf(a, pivot)
    k = min(a.rows, a.cols)
    return tuple(s.entries[i][i] for i in range(k) if s.entries[i][i] != 0)


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FgAbGroup:
    """Z^rank plus cyclic torsion with d_1 | d_2 | ... and every d_i >= 2.

    >>> str(FgAbGroup.from_invariants([0, 2, 3]))
    'Z + C6'
    >>> str(FgAbGroup(1, (2,)).direct_sum(FgAbGroup(0, (4,))))
    'Z + C2 + C4'
    """

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise InputError("rank must be non-negative")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        for d in self.torsion:
            if d < 2:
                raise InputError("torsion invariants must be at least 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise InputError("torsion invariants must form a divisibility chain")

    @classmethod
    def zero(cls) -> "FgAbGroup":
        return cls(0, ())

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls(rank, ())

    @classmethod
    def from_invariants(cls, invariants: Iterable[int]) -> "FgAbGroup":
        """Build from unsorted cyclic orders (0 = Z, 1 = trivial summand)."""
        rank = 0
        torsion: list[int] = []
        for d in invariants:
            d = abs(int(d))
            if d == 0:
                rank += 1
            elif d > 1:
                torsion.append(d)
        if torsion:
            chain = invariant_factors(IntMatrix.diagonal(torsion))
            torsion = [d for d in chain if d > 1]
        return cls(rank, tuple(torsion))

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    def presentation(self) -> IntMatrix:
        """Relation matrix on the canonical generators (free ones first):
        columns generate the relation lattice."""
        n = self.ngens
        cols = len(self.torsion)
        return IntMatrix(
            n,
            cols,
            tuple(
                tuple(
                    self.torsion[j] if i == self.rank + j else 0 for j in range(cols)
                )
                for i in range(n)
            ),
        )

    def direct_sum(self, *others: "FgAbGroup") -> "FgAbGroup":
        groups = (self,) + others
        rank = sum(g.rank for g in groups)
        torsion = [d for g in groups for d in g.torsion]
        return FgAbGroup.from_invariants([0] * rank + torsion)

    def multiple(self, copies: int) -> "FgAbGroup":
        if copies < 0:
            raise InputError("copies must be non-negative")
        return FgAbGroup.from_invariants([0] * (self.rank * copies) + list(self.torsion) * copies)

    def __str__(self) -> str:
        parts = ["Z"] * self.rank + [f"C{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


Z = FgAbGroup(1)


def group_from_presentation(ngens: int, relations: IntMatrix) -> FgAbGroup:
    """The quotient of Z^ngens by the column lattice of ``relations``."""
    if relations.rows != ngens:
        raise InputError("relation matrix must have one row per generator")
    factors = invariant_factors(relations)
    return FgAbGroup.from_invariants(
        [0] * (ngens - len(factors)) + [d for d in factors]
    )


def is_valid_hom(src: FgAbGroup, dst: FgAbGroup, matrix: IntMatrix) -> bool:
    """A generator matrix defines a homomorphism iff it maps the source
    relations into the target relation lattice."""
    if matrix.rows != dst.ngens or matrix.cols != src.ngens:
        return False
    image = matrix.mul(src.presentation())
    if not dst.torsion:
        return image.is_zero()
    try:
        solve_columns(dst.presentation(), image)
    except PreconditionError:
        return False
    return True


# ---------------------------------------------------------------------------
# limits of group diagrams


@dataclass(frozen=True)
class GroupArrow:
    name: str
    src: str
    tgt: str
    matrix: IntMatrix


@dataclass(frozen=True)
class GroupDiagram:
    vertices: tuple[str, ...]
    groups: Mapping[str, FgAbGroup]
    arrows: tuple[GroupArrow, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", dict(self.groups))
        if set(self.groups) != set(self.vertices):
            raise InputError("exactly one group per vertex required")
        for a in self.arrows:
            src, tgt = self.groups[a.src], self.groups[a.tgt]
            if a.matrix.rows != tgt.ngens or a.matrix.cols != src.ngens:
                raise InputError(f"arrow {a.name!r} matrix has wrong shape")
            if not is_valid_hom(src, tgt, a.matrix):
                raise InputError(f"arrow {a.name!r} does not define a homomorphism")


@dataclass(frozen=True)
class LimitResult:
    group: FgAbGroup
    generators: IntMatrix  # columns: limit generators inside the product lattice
    projections: Mapping[str, IntMatrix]  # generator-level maps to each vertex


class _PresData:
    """Per-vertex generator counts and relation lattices for a limit run."""

    def __init__(self, vertices: Sequence[str], ngens: Mapping[str, int], presentations: Mapping[str, IntMatrix]):
        self.vertices = list(vertices)
        self.ngens = dict(ngens)
        self.presentations = dict(presentations)


def _limit_on_presentations(
    gd: _PresData, arrows: Sequence[tuple[str, str, IntMatrix]]
) -> LimitResult:
    """Limit of groups given by presentations: x over the product lies in the
    limit iff every arrow defect M_a x_src - x_tgt falls in the target
    relation lattice; the product relations are then read in a basis of that
    solution lattice and put in invariant-factor form."""
    order = gd.vertices
    offs: dict[str, int] = {}
    n = 0
    for v in order:
        offs[v] = n
        n += gd.ngens[v]
    rel = _blockdiag([gd.presentations[v] for v in order])
    defect_rows: list[list[int]] = []
    tgt_rels: list[IntMatrix] = []
    for src, tgt, m in arrows:
        for i in range(gd.ngens[tgt]):
            row = [0] * n
            for j in range(gd.ngens[src]):
                row[offs[src] + j] += m.entries[i][j]
            row[offs[tgt] + i] -= 1
            defect_rows.append(row)
        tgt_rels.append(gd.presentations[tgt])
    if defect_rows:
        phi = IntMatrix.from_rows(defect_rows, n)
        rt = _blockdiag(tgt_rels)
        stacked = phi.hstack(IntMatrix(phi.rows, rt.cols, rt.entries))
        ker = kernel(stacked)
        xpart = IntMatrix(n, ker.cols, tuple(ker.entries[i] for i in range(n)))
        basis = column_basis(xpart)
    else:
        basis = IntMatrix.identity(n)
    rel_in_basis = (
        solve_columns(basis, rel)
        if rel.cols
        else IntMatrix(basis.cols, 0, tuple(() for _ in range(basis.cols)))
    )
    group = group_from_presentation(basis.cols, rel_in_basis)
    projections = {
        v: IntMatrix(
            gd.ngens[v],
            basis.cols,
            tuple(basis.entries[offs[v] + i] for i in range(gd.ngens[v])),
        )
        for v in order
    }
    return LimitResult(group, basis, projections)


def limit_of_groups(diagram: GroupDiagram) -> LimitResult:
    """The categorical limit: tuples over the product equalized along every
    arrow, presented in invariant-factor form."""
    gd = _PresData(
        diagram.vertices,
        {v: diagram.groups[v].ngens for v in diagram.vertices},
        {v: diagram.groups[v].presentation() for v in diagram.vertices},
    )
    return _limit_on_presentations(gd, [(a.src, a.tgt, a.matrix) for a in diagram.arrows])


# ---------------------------------------------------------------------------
# graded groups and graded homs


@dataclass(frozen=True)
class GradedGroup:
    """A finitely generated abelian group graded by a finite preorder."""

    index: FinitePreorder
    pieces: Mapping[str, FgAbGroup]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", dict(self.pieces))
        if set(self.pieces) != set(self.index.elements):
            raise InputError("every index element needs a piece (zero allowed)")

    def piece(self, label: str) -> FgAbGroup:
        return self.pieces[label]

    def total(self) -> FgAbGroup:
        return FgAbGroup.zero().direct_sum(*(self.pieces[x] for x in self.index.elements))

    def gen_offsets(self) -> dict[str, int]:
        offs: dict[str, int] = {}
        n = 0
        for x in self.index.elements:
            offs[x] = n
            n += self.pieces[x].ngens
        return offs

    def total_ngens(self) -> int:
        return sum(self.pieces[x].ngens for x in self.index.elements)

    def total_presentation(self) -> IntMatrix:
        return _blockdiag([self.pieces[x].presentation() for x in self.index.elements])


@dataclass(frozen=True)
class GradedHom:
    """A graded map whose blocks land exactly in the fibers of ``reindex``
    (an order-reflecting map from the target index to the source index)."""

    source: GradedGroup
    target: GradedGroup
    reindex: OrderReflectingMap
    blocks: Mapping[tuple[str, str], IntMatrix]  # (source grade x, target grade y)

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", dict(self.blocks))
        if self.reindex.source != self.target.index or self.reindex.target != self.source.index:
            raise InputError("reindex must map the target index to the source index")
        for (x, y), m in self.blocks.items():
            if self.reindex(y) != x:
                raise InputError(
                    f"block ({x!r} -> {y!r}) violates fiber support: "
                    f"reindex({y!r}) = {self.reindex(y)!r}"
                )
            ps, pt = self.source.pieces[x], self.target.pieces[y]
            if m.rows != pt.ngens or m.cols != ps.ngens:
                raise InputError(f"block ({x!r} -> {y!r}) has wrong shape")
            if not is_valid_hom(ps, pt, m):
                raise InputError(f"block ({x!r} -> {y!r}) is not a homomorphism")

    def block(self, x: str, y: str) -> IntMatrix:
        m = self.blocks.get((x, y))
        if m is None:
            return IntMatrix.zeros(self.target.pieces[y].ngens, self.source.pieces[x].ngens)
        return m

    def total_matrix(self) -> IntMatrix:
        soffs = self.source.gen_offsets()
        toffs = self.target.gen_offsets()
        out = [[0] * self.source.total_ngens() for _ in range(self.target.total_ngens())]
        for y in self.target.index.elements:
            x = self.reindex(y)
            b = self.block(x, y)
            for i in range(b.rows):
                for j in range(b.cols):
                    out[toffs[y] + i][soffs[x] + j] = b.entries[i][j]
        return IntMatrix.from_rows(out, self.source.total_ngens())


def identity_graded_hom(g: GradedGroup, reindex: OrderReflectingMap) -> GradedHom:
    """Identity blocks along a reindexing between equal carriers."""
    blocks = {}
    for y in g.index.elements:
        x = reindex(y)
        blocks[(x, y)] = IntMatrix.identity(g.pieces[y].ngens)
    return GradedHom(g, g, reindex, blocks)


@dataclass(frozen=True)
class GradedArrow:
    name: str
    src: str
    tgt: str
    hom: GradedHom


@dataclass(frozen=True)
class GradedDiagram:
    vertices: tuple[str, ...]
    groups: Mapping[str, GradedGroup]
    arrows: tuple[GradedArrow, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", dict(self.groups))
        if set(self.groups) != set(self.vertices):
            raise InputError("exactly one graded group per vertex required")
        for a in self.arrows:
            if a.hom.source != self.groups[a.src]:
                raise InputError(f"arrow {a.name!r} source mismatch")
            if a.hom.target != self.groups[a.tgt]:
                raise InputError(f"arrow {a.name!r} target mismatch")

    def index_diagram(self) -> PreorderDiagram:
        """The induced diagram of index preorders; reindex maps run against
        the quiver arrows, so they are recorded contravariantly."""
        from .preorders import DiagramArrow, CONTRAVARIANT

        return PreorderDiagram(
            self.vertices,
            {v: self.groups[v].index for v in self.vertices},
            tuple(
                DiagramArrow(a.name, a.src, a.tgt, a.hom.reindex, CONTRAVARIANT)
                for a in self.arrows
            ),
        )


@dataclass(frozen=True)
class GradedLimitResult:
    graded: GradedGroup
    ungraded: FgAbGroup
    piece_results: Mapping[str, LimitResult]


def _check_colimit_index(
    diagram: GradedDiagram, colimit_index: FinitePreorder, cocones: Mapping[str, OrderReflectingMap]
) -> ColimitResult:
    computed = colimit(diagram.index_diagram())
    if len(computed.preorder) != len(colimit_index):
        raise PreconditionError("stated colimit index has the wrong carrier size")
    relabel: dict[str, str] = {}
    for v in diagram.vertices:
        for x in diagram.groups[v].index.elements:
            mine = computed.cocones[v](x)
            theirs = cocones[v](x)
            if relabel.setdefault(mine, theirs) != theirs:
                raise PreconditionError("stated cocones do not quotient like the colimit")
    if len(set(relabel.values())) != len(colimit_index):
        raise PreconditionError("stated cocones are not jointly surjective")
    for a in computed.preorder.elements:
        for b in computed.preorder.elements:
            if computed.preorder.le(a, b) != colimit_index.le(relabel[a], relabel[b]):
                raise PreconditionError("stated colimit index has the wrong relation")
    return computed


def graded_limit(
    diagram: GradedDiagram,
    colimit_index: FinitePreorder,
    cocones: Mapping[str, OrderReflectingMap],
) -> GradedLimitResult:
    """Limit of a graded diagram, graded over the colimit of the indices.

    The piece at w is the limit of the fiber-restricted diagram
    (direct sum over the cocone fiber of w at each vertex); the ungraded
    limit of the total groups must agree with the direct sum of the pieces,
    which is checked exactly.
    """
    _check_colimit_index(diagram, colimit_index, cocones)
    piece_results: dict[str, LimitResult] = {}
    pieces: dict[str, FgAbGroup] = {}
    for w in colimit_index.elements:
        fibers = {
            v: tuple(
                z
                for z in diagram.groups[v].index.elements
                if cocones[v](z) == w
            )
            for v in diagram.vertices
        }
        vertex_groups = {
            v: FgAbGroup.zero().direct_sum(
                *(diagram.groups[v].pieces[z] for z in fibers[v])
            )
            for v in diagram.vertices
        }
        # a canonicalization subtlety: the fiber direct sum must be presented
        # with the grades' own generators, not re-normalized invariants, so
        # the restricted arrow blocks stay literal
        arrows = []
        for a in diagram.arrows:
            src_f, tgt_f = fibers[a.src], fibers[a.tgt]
            rows = sum(diagram.groups[a.tgt].pieces[z].ngens for z in tgt_f)
            cols = sum(diagram.groups[a.src].pieces[z].ngens for z in src_f)
            out = [[0] * cols for _ in range(rows)]
            roff = 0
            for y in tgt_f:
                coff = 0
                for x in src_f:
                    if a.hom.reindex(y) == x:
                        b = a.hom.block(x, y)
                        for i in range(b.rows):
                            for j in range(b.cols):
                                out[roff + i][coff + j] = b.entries[i][j]
                    coff += diagram.groups[a.src].pieces[x].ngens
                roff += diagram.groups[a.tgt].pieces[y].ngens
            arrows.append((a, IntMatrix.from_rows(out, cols)))
        gd = _fiber_presentations(diagram, fibers)
        res = _limit_on_presentations(gd, [(a.src, a.tgt, m) for a, m in arrows])
        piece_results[w] = res
        pieces[w] = res.group
    graded = GradedGroup(colimit_index, pieces)

    # ungraded limit computed on the literal total presentations
    gd_total = _fiber_presentations(
        diagram,
        {v: tuple(diagram.groups[v].index.elements) for v in diagram.vertices},
    )
    ungraded = _limit_on_presentations(
        gd_total,
        [(a.src, a.tgt, a.hom.total_matrix()) for a in diagram.arrows],
    ).group
    summed = FgAbGroup.zero().direct_sum(*pieces.values())
    if (ungraded.rank, ungraded.torsion) != (summed.rank, summed.torsion):
        raise RuntimeError(
            "graded/ungraded comparison failed: "
            f"{ungraded} versus {summed}"
        )
    return GradedLimitResult(graded, ungraded, piece_results)


def _fiber_presentations(
    diagram: GradedDiagram, fibers: Mapping[str, tuple[str, ...]]
) -> _PresData:
    return _PresData(
        diagram.vertices,
        {
            v: sum(diagram.groups[v].pieces[z].ngens for z in fibers[v])
            for v in diagram.vertices
        },
        {
            v: _blockdiag(
                [diagram.groups[v].pieces[z].presentation() for z in fibers[v]]
            )
            for v in diagram.vertices
        },
    )
