"""Graded modules over Q[c] and Q[d] with a Weyl involution.

Conventions.  All gradings are homological: the polynomial generator c has
degree -2 and the involution w satisfies w c = -c w; the generator d has
degree -4 and is fixed by w.  A finitely generated graded module over either
ring, or over the corresponding Laurent ring, decomposes canonically into
"thin" summands: shifted free modules, shifted torsion modules Q[c]/c^l, and
shifted Laurent summands.  Each summand carries the sign of its generator;
multiplying by c flips the sign, multiplying by d preserves it, so a summand
contributes at most one dimension to every degree and the sign of every
basis element is determined.

Maps between canonical modules are stored as one rational coefficient per
(target summand, source summand) pair: homogeneity determines the monomial
power, so the coefficient is the whole datum.

Canonical forms are reconstructed from degreewise data (kernels, cokernels,
homology) by an interval ("barcode") decomposition of the action of c along
each residue-class-and-sign chain of degrees, carried out with exact basis
tracking so that every canonical generator comes with an explicit
representative vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InvariantError,
    NotADifferential,
    NotEquivariant,
    NotHomogeneous,
    SchemaError,
)
from .linalg import Q, QMatrix

# -- rings -------------------------------------------------------------------

FREE = "free"
TORSION = "torsion"
LAURENT = "laurent"

_KIND_RANK = {FREE: 0, TORSION: 1, LAURENT: 2}


@dataclass(frozen=True)
class Ring:
    var: str  # "c" or "d"
    laurent: bool

    @property
    def step(self) -> int:
        return 2 if self.var == "c" else 4

    @property
    def flip(self) -> bool:
        # multiplying by the generator flips the involution sign over Q[c]
        return self.var == "c"

    def __repr__(self):
        base = f"Q[{self.var}]"
        return base + ("[1/%s]" % self.var if self.laurent else "")


POLY_C = Ring("c", False)
POLY_D = Ring("d", False)
LAURENT_C = Ring("c", True)
LAURENT_D = Ring("d", True)


@dataclass(frozen=True)
class Summand:
    kind: str
    shift: int
    sign: int
    length: int = 0  # torsion only

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise SchemaError(f"bad summand kind {self.kind!r}")
        if self.sign not in (1, -1):
            raise SchemaError(f"bad sign {self.sign!r}")
        if self.kind == TORSION and self.length < 1:
            raise SchemaError("torsion summand needs positive length")
        if self.kind != TORSION and self.length != 0:
            raise SchemaError("length only allowed on torsion summands")


def _normalize_summand(ring: Ring, s: Summand) -> Summand:
    """Reduce Laurent shifts to a fundamental residue, adjusting the sign."""
    if s.kind != LAURENT:
        return s
    step = ring.step
    r = s.shift % step
    moves = (s.shift - r) // step
    sign = s.sign * (-1) ** (moves % 2) if ring.flip else s.sign
    return Summand(LAURENT, r, sign)


def _sort_key(s: Summand):
    return (-s.shift, _KIND_RANK[s.kind], s.length, -s.sign)


class GradedModule:
    """A canonical-form graded module: an ordered tuple of thin summands."""

    __slots__ = ("ring", "summands")

    def __init__(self, ring: Ring, summands):
        self.ring = ring
        norm = [_normalize_summand(ring, s) for s in summands]
        self.summands = tuple(sorted(norm, key=_sort_key))

    @staticmethod
    def zero(ring: Ring) -> "GradedModule":
        return GradedModule(ring, ())

    def __eq__(self, other):
        return (
            isinstance(other, GradedModule)
            and self.ring == other.ring
            and self.summands == other.summands
        )

    def __hash__(self):
        return hash((self.ring, self.summands))

    def __repr__(self):
        return f"GradedModule({self.ring}, {list(self.summands)})"

    def is_zero(self) -> bool:
        return not self.summands

    def is_torsion(self) -> bool:
        return all(s.kind == TORSION for s in self.summands)

    def suspend(self, k: int) -> "GradedModule":
        return GradedModule(
            self.ring,
            [Summand(s.kind, s.shift + k, s.sign, s.length) for s in self.summands],
        )

    def twist(self) -> "GradedModule":
        return GradedModule(
            self.ring,
            [Summand(s.kind, s.shift, -s.sign, s.length) for s in self.summands],
        )

    # -- degreewise structure -------------------------------------------

    def power_at(self, i: int, degree: int) -> int | None:
        """The generator power of summand i alive in the given degree."""
        s = self.summands[i]
        num = s.shift - degree
        if num % self.ring.step:
            return None
        a = num // self.ring.step
        if s.kind == FREE and a < 0:
            return None
        if s.kind == TORSION and not (0 <= a < s.length):
            return None
        return a

    def basis(self, degree: int) -> list[tuple[int, int]]:
        out = []
        for i in range(len(self.summands)):
            a = self.power_at(i, degree)
            if a is not None:
                out.append((i, a))
        return out

    def dim(self, degree: int) -> int:
        return len(self.basis(degree))

    def basis_sign(self, i: int, a: int) -> int:
        s = self.summands[i]
        return s.sign * (-1) ** (a % 2) if self.ring.flip else s.sign

    def involution_matrix(self, degree: int) -> QMatrix:
        b = self.basis(degree)
        return QMatrix.diagonal([self.basis_sign(i, a) for i, a in b])

    def action_matrix(self, degree: int) -> QMatrix:
        """Multiplication by the ring generator, degree -> degree - step."""
        src = self.basis(degree)
        dst = self.basis(degree - self.ring.step)
        pos = {key: k for k, key in enumerate(dst)}
        m = QMatrix(len(dst), len(src))
        for col, (i, a) in enumerate(src):
            row = pos.get((i, a + 1))
            if row is not None:
                m.data[row][col] = Q(1)
        return m

    def max_shift(self) -> int:
        return max((abs(s.shift) for s in self.summands), default=0)

    def max_torsion(self) -> int:
        return max((s.length for s in self.summands if s.kind == TORSION), default=0)


def direct_sum(modules) -> tuple[GradedModule, list[list[int]]]:
    """Direct sum with index bookkeeping.

    Returns (sum, maps) where maps[k][i] is the summand index in the sum of
    summand i of modules[k].
    """
    modules = list(modules)
    if not modules:
        raise SchemaError("direct sum of empty family needs a ring")
    ring = modules[0].ring
    tagged = []
    for k, m in enumerate(modules):
        if m.ring != ring:
            raise SchemaError("direct sum over mixed rings")
        for i, s in enumerate(m.summands):
            tagged.append((s, k, i))
    tagged.sort(key=lambda t: (_sort_key(t[0]), t[1], t[2]))
    out = GradedModule.__new__(GradedModule)
    out.ring = ring
    out.summands = tuple(t[0] for t in tagged)
    maps = [[0] * len(m.summands) for m in modules]
    for new_idx, (_, k, i) in enumerate(tagged):
        maps[k][i] = new_idx
    return out, maps


# -- module maps ---------------------------------------------------------


class ModuleMap:
    """A homogeneous equivariant map between canonical modules.

    entries[(i, j)] is the coefficient of the monomial sending the generator
    of source summand j to (generator power) of target summand i; the power
    is determined by the degrees.
    """

    __slots__ = ("domain", "codomain", "degree", "entries")

    def __init__(self, domain: GradedModule, codomain: GradedModule, degree: int, entries):
        if domain.ring.var != codomain.ring.var:
            raise SchemaError("map between different variables")
        self.domain = domain
        self.codomain = codomain
        self.degree = degree
        clean = {}
        for (i, j), coef in entries.items():
            coef = coef if isinstance(coef, Fraction) else Fraction(coef)
            if coef == 0:
                continue
            a = self._power_or_error(i, j)
            if a is None:
                continue  # monomial lands past a torsion cutoff: it is zero
            clean[(i, j)] = coef
        self.entries = clean

    def _power_or_error(self, i: int, j: int) -> int | None:
        src = self.domain.summands[j]
        dst = self.codomain.summands[i]
        step = self.codomain.ring.step
        num = dst.shift - src.shift - self.degree
        if num % step:
            raise NotHomogeneous(
                f"entry ({i},{j}) cannot be homogeneous of degree {self.degree}"
            )
        a = num // step
        if dst.kind == TORSION and a >= dst.length:
            return None
        if dst.kind != LAURENT and a < 0:
            raise NotHomogeneous(f"entry ({i},{j}) needs a negative power")
        if src.kind == LAURENT and dst.kind != LAURENT:
            raise InvariantError("Laurent source cannot map to a bounded target")
        if src.kind == TORSION:
            if dst.kind != TORSION or a + src.length < dst.length:
                raise InvariantError(
                    f"entry ({i},{j}) does not annihilate the source torsion"
                )
        # equivariance
        flip = self.codomain.ring.flip
        ok = (
            dst.sign * (-1) ** (a % 2) == src.sign if flip else dst.sign == src.sign
        )
        if not ok:
            raise NotEquivariant(f"entry ({i},{j}) breaks the involution")
        return a

    @staticmethod
    def zero(domain, codomain, degree=0) -> "ModuleMap":
        return ModuleMap(domain, codomain, degree, {})

    @staticmethod
    def identity(m: GradedModule) -> "ModuleMap":
        return ModuleMap(m, m, 0, {(i, i): Q(1) for i in range(len(m.summands))})

    def __eq__(self, other):
        return (
            isinstance(other, ModuleMap)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.degree == other.degree
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash(
            (self.domain, self.codomain, self.degree, tuple(sorted(self.entries.items())))
        )

    def __repr__(self):
        return f"ModuleMap(deg {self.degree}, {self.entries})"

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        if (self.domain, self.codomain, self.degree) != (
            other.domain,
            other.codomain,
            other.degree,
        ):
            raise SchemaError("map addition shape mismatch")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, Q(0)) + v
        return ModuleMap(self.domain, self.codomain, self.degree, ent)

    def scale(self, k) -> "ModuleMap":
        k = Fraction(k)
        return ModuleMap(
            self.domain, self.codomain, self.degree, {e: k * v for e, v in self.entries.items()}
        )

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        if other.codomain != self.domain:
            raise SchemaError("composition mismatch")
        ent: dict = {}
        by_src: dict[int, list] = {}
        for (j, k), v in other.entries.items():
            by_src.setdefault(j, []).append((k, v))
        for (i, j), u in self.entries.items():
            for k, v in by_src.get(j, ()):
                ent[(i, k)] = ent.get((i, k), Q(0)) + u * v
        return ModuleMap(other.domain, self.codomain, self.degree + other.degree, ent)

    def evaluate(self, degree: int) -> QMatrix:
        """Matrix of the map from degree to degree + self.degree."""
        src = self.domain.basis(degree)
        dst = self.codomain.basis(degree + self.degree)
        pos = {key: r for r, key in enumerate(dst)}
        m = QMatrix(len(dst), len(src))
        for col, (j, b) in enumerate(src):
            for (i, jj), coef in self.entries.items():
                if jj != j:
                    continue
                a = self._power_or_error(i, jj)
                row = pos.get((i, b + a))
                if row is not None:
                    m.data[row][col] = coef
        return m

    def suspend(self, k: int) -> "ModuleMap":
        return ModuleMap(
            self.domain.suspend(k), self.codomain.suspend(k), self.degree, dict(self.entries)
        )

    def twist(self) -> "ModuleMap":
        return ModuleMap(
            self.domain.twist(), self.codomain.twist(), self.degree, dict(self.entries)
        )


def auto_window(window: tuple[int, int], modules) -> tuple[int, int]:
    """Extend a window far enough that canonical forms are visible on it."""
    modules = [m for m in modules if m is not None]
    pad = 4
    for m in modules:
        pad = max(pad, m.max_shift() + m.ring.step * m.max_torsion() + 4)
    return (window[0] - pad, window[1] + pad)


# -- graded vector spaces with involution ---------------------------------


class GradedQWSpace:
    """A finite graded rational vector space with involution matrices."""

    __slots__ = ("inv",)

    def __init__(self, inv: dict[int, QMatrix]):
        clean = {}
        for g, m in inv.items():
            if m.rows != m.cols:
                raise SchemaError("involution matrix must be square")
            if (m @ m) != QMatrix.identity(m.rows):
                raise InvariantError("involution does not square to the identity")
            if m.rows:
                clean[g] = m
        self.inv = clean

    def dim(self, degree: int) -> int:
        m = self.inv.get(degree)
        return m.rows if m else 0

    def degrees(self):
        return sorted(self.inv)

    def eigen_split(self) -> dict[int, tuple[int, int]]:
        """Per-degree dimensions of the +1 and -1 eigenspaces."""
        out = {}
        for g, m in self.inv.items():
            plus = (m + QMatrix.identity(m.rows)).rank()
            minus = (m - QMatrix.identity(m.rows)).rank()
            out[g] = (plus, minus)
        return out


# -- graded Smith reduction ------------------------------------------------


def smith_canonical(presentation: ModuleMap) -> GradedModule:
    """Canonical form of the cokernel of a degree-0 map of free modules.

    Homogeneous entries are monomials, so the reduction repeatedly isolates
    an entry of globally minimal generator power; the required row and column
    operations then only ever multiply by nonnegative powers.
    """
    if presentation.degree != 0:
        raise SchemaError("presentation map must have degree 0")
    gens = presentation.codomain
    rels = presentation.domain
    if any(s.kind != FREE for s in gens.summands) or any(
        s.kind != FREE for s in rels.summands
    ):
        raise SchemaError("presentation must be a map of free modules")
    step = gens.ring.step

    def power(i, j):
        return (gens.summands[i].shift - rels.summands[j].shift) // step

    ent = {k: v for k, v in presentation.entries.items()}
    live_rows = set(range(len(gens.summands)))
    live_cols = set(range(len(rels.summands)))
    pivots: list[tuple[int, int]] = []

    while True:
        best = None
        for (i, j), v in ent.items():
            if i in live_rows and j in live_cols and v != 0:
                key = (power(i, j), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        a0, i0, j0 = best
        piv = ent[(i0, j0)]
        # clear the pivot column with row operations
        for i in list(live_rows):
            if i == i0:
                continue
            v = ent.get((i, j0))
            if not v:
                continue
            lam = v / piv
            for j in live_cols:
                w = ent.get((i0, j))
                if w:
                    ent[(i, j)] = ent.get((i, j), Q(0)) - lam * w
            ent[(i, j0)] = Q(0)
        # clear the pivot row with column operations
        for j in list(live_cols):
            if j == j0:
                continue
            v = ent.get((i0, j))
            if not v:
                continue
            mu = v / piv
            for i in live_rows:
                w = ent.get((i, j0))
                if w:
                    ent[(i, j)] = ent.get((i, j), Q(0)) - mu * w
            ent[(i0, j)] = Q(0)
        pivots.append((i0, a0))
        live_rows.discard(i0)
        live_cols.discard(j0)

    out = []
    for i, a in pivots:
        s = gens.summands[i]
        if a > 0:
            out.append(Summand(TORSION, s.shift, s.sign, a))
    for i in live_rows:
        s = gens.summands[i]
        out.append(Summand(FREE, s.shift, s.sign))
    return GradedModule(gens.ring, out)


# -- localization, fixed points, base change -------------------------------


def localize(m: GradedModule) -> tuple[GradedModule, list[int]]:
    """Invert the polynomial generator; torsion dies, free becomes Laurent.

    Returns (localized module, sources) where sources[k] is the index of the
    original summand giving output summand k.
    """
    ring = LAURENT_C if m.ring.var == "c" else LAURENT_D
    tagged = []
    for i, s in enumerate(m.summands):
        if s.kind == TORSION:
            continue
        tagged.append((_normalize_summand(ring, Summand(LAURENT, s.shift, s.sign)), i))
    tagged.sort(key=lambda t: (_sort_key(t[0]), t[1]))
    out = GradedModule.__new__(GradedModule)
    out.ring = ring
    out.summands = tuple(t[0] for t in tagged)
    return out, [t[1] for t in tagged]


def localize_map(phi: ModuleMap) -> ModuleMap:
    dom, src_d = localize(phi.domain)
    cod, src_c = localize(phi.codomain)
    back_d = {orig: k for k, orig in enumerate(src_d)}
    back_c = {orig: k for k, orig in enumerate(src_c)}
    ent = {}
    for (i, j), v in phi.entries.items():
        if i in back_c and j in back_d:
            ent[(back_c[i], back_d[j])] = v
    return ModuleMap(dom, cod, phi.degree, ent)


def fixed_points_c_to_d(m: GradedModule) -> tuple[GradedModule, list[tuple[int, int]]]:
    """W-fixed points of a Q[c]-module, as a Q[d]-module (d acting as c^2).

    Returns (fixed module, realization): realization[k] = (i, e) meaning the
    generator of output summand k is c^e times the generator of input
    summand i (e is 0 for a sign-+ generator, 1 for sign--).
    """
    if m.ring.var != "c":
        raise SchemaError("fixed points expect a Q[c]-module")
    ring = LAURENT_D if m.ring.laurent else POLY_D
    tagged = []
    for i, s in enumerate(m.summands):
        e = 0 if s.sign == 1 else 1
        shift = s.shift - 2 * e
        if s.kind == TORSION:
            length = (s.length + (1 - e)) // 2
            if length == 0:
                continue
            new = Summand(TORSION, shift, 1, length)
        else:
            new = Summand(s.kind, shift, 1)
        tagged.append((_normalize_summand(ring, new), i, e))
    tagged.sort(key=lambda t: (_sort_key(t[0]), t[1]))
    out = GradedModule.__new__(GradedModule)
    out.ring = ring
    out.summands = tuple(t[0] for t in tagged)
    return out, [(t[1], t[2]) for t in tagged]


def fixed_points_map(phi: ModuleMap) -> ModuleMap:
    """The restriction of an equivariant Q[c]-map to W-fixed points."""
    dom, real_d = fixed_points_c_to_d(phi.domain)
    cod, real_c = fixed_points_c_to_d(phi.codomain)
    back_c = {orig: k for k, (orig, _) in enumerate(real_c)}
    back_d = {orig: k for k, (orig, _) in enumerate(real_d)}
    ent = {}
    for (i, j), v in phi.entries.items():
        if i in back_c and j in back_d:
            ent[(back_c[i], back_d[j])] = v
    return ModuleMap(dom, cod, phi.degree, ent)


def base_change_d_to_c(m: GradedModule) -> tuple[GradedModule, list[int]]:
    """Extension of scalars along d -> c^2 for a Q[d]-module.

    Free and Laurent summands keep their shift; a torsion summand of length l
    becomes one of length 2l.  Generators keep sign +.
    """
    if m.ring.var != "d":
        raise SchemaError("base change expects a Q[d]-module")
    ring = LAURENT_C if m.ring.laurent else POLY_C
    tagged = []
    for i, s in enumerate(m.summands):
        if s.sign != 1:
            raise InvariantError("torus-slot modules carry no involution")
        if s.kind == TORSION:
            new = Summand(TORSION, s.shift, 1, 2 * s.length)
        else:
            new = Summand(s.kind, s.shift, 1)
        tagged.append((_normalize_summand(ring, new), i))
    tagged.sort(key=lambda t: (_sort_key(t[0]), t[1]))
    out = GradedModule.__new__(GradedModule)
    out.ring = ring
    out.summands = tuple(t[0] for t in tagged)
    return out, [t[1] for t in tagged]


def base_change_map(phi: ModuleMap) -> ModuleMap:
    dom, src_d = base_change_d_to_c(phi.domain)
    cod, src_c = base_change_d_to_c(phi.codomain)
    back_c = {orig: k for k, orig in enumerate(src_c)}
    back_d = {orig: k for k, orig in enumerate(src_d)}
    ent = {
        (back_c[i], back_d[j]): v
        for (i, j), v in phi.entries.items()
        if i in back_c and j in back_d
    }
    return ModuleMap(dom, cod, phi.degree, ent)


# -- incremental spans -------------------------------------------------------


class IncrementalSpan:
    """Maintains a growing spanning set with exact membership tests."""

    def __init__(self, dim: int):
        self.dim = dim
        self.vectors: list[list[Fraction]] = []
        self._reduced: list[tuple[int, list[Fraction], list[Fraction]]] = []

    def _reduce(self, v):
        r = [Fraction(x) for x in v]
        mu = [Q(0)] * len(self.vectors)
        for pivot, rv, cf in self._reduced:
            if r[pivot] != 0:
                lam = r[pivot] / rv[pivot]
                r = [x - lam * y for x, y in zip(r, rv)]
                for j, c in enumerate(cf):
                    mu[j] += lam * c
        return r, mu

    def coefficients(self, v):
        """Express v in terms of the added vectors, or None."""
        r, mu = self._reduce(v)
        if any(x != 0 for x in r):
            return None
        return mu

    def add(self, v) -> bool:
        """Add v if independent; returns True when the span grew."""
        r, mu = self._reduce(v + [Q(0)] * 0)
        if all(x == 0 for x in r):
            return False
        k = len(self.vectors)
        self.vectors.append([Fraction(x) for x in v])
        cf = [-x for x in mu] + [Q(1)]
        for _, _, old in self._reduced:
            old.append(Q(0))
        pivot = next(i for i, x in enumerate(r) if x != 0)
        self._reduced.append((pivot, r, cf))
        return True

    def rank(self) -> int:
        return len(self._reduced)


# -- barcode decomposition ---------------------------------------------------


@dataclass
class Bar:
    birth: int  # position index (0 = highest degree)
    death: int | None  # last alive position, None = alive through the end
    vectors: list  # vectors[p - birth] is the bar vector at position p


def barcode(dims: list[int], maps: list[QMatrix]) -> list[Bar]:
    """Interval decomposition of a chain of spaces with basis tracking.

    positions run along descending degrees; maps[p] goes position p -> p+1.
    The returned bar vectors realize a direct-sum decomposition.
    """
    bars: list[Bar] = []
    active: list[Bar] = []

    def births(p, span):
        for i in range(dims[p]):
            e = [Q(0)] * dims[p]
            e[i] = Q(1)
            if span.add(e):
                b = Bar(p, None, [e])
                bars.append(b)
                active.append(b)

    if dims:
        span0 = IncrementalSpan(dims[0])
        births(0, span0)
    for p in range(len(dims) - 1):
        f = maps[p]
        span = IncrementalSpan(dims[p + 1])
        survivors = []
        for b in active:
            w = f.apply(b.vectors[-1])
            if all(x == 0 for x in w):
                b.death = p
                continue
            mu = span.coefficients(w)
            if mu is not None:
                # dependent on older alive bars: adjust the whole bar history
                for q in range(len(b.vectors)):
                    pos = b.birth + q
                    for o, lam in zip(survivors, mu):
                        if lam and o.birth <= pos:
                            ov = o.vectors[pos - o.birth]
                            b.vectors[q] = [
                                x - lam * y for x, y in zip(b.vectors[q], ov)
                            ]
                b.death = p
                continue
            span.add(w)
            b.vectors.append(w)
            survivors.append(b)
        active = survivors
        births(p + 1, span)
    return bars


# -- window modules and canonical reconstruction -----------------------------


class WindowModule:
    """Degreewise data of a graded module on a window, with an involution.

    spaces: degree -> dimension; acts: degree -> matrix to degree - step;
    invs: degree -> involution matrix.
    """

    def __init__(self, ring: Ring, window, spaces, acts, invs):
        self.ring = ring
        self.window = window
        self.spaces = spaces
        self.acts = acts
        self.invs = invs

    def dim(self, g):
        return self.spaces.get(g, 0)


def window_of_module(m: GradedModule, window) -> WindowModule:
    lo, hi = window
    spaces, acts, invs = {}, {}, {}
    for g in range(lo, hi + 1):
        d = m.dim(g)
        if d:
            spaces[g] = d
            invs[g] = m.involution_matrix(g)
    for g in range(lo, hi + 1):
        if spaces.get(g):
            acts[g] = m.action_matrix(g)
    return WindowModule(m.ring, window, spaces, acts, invs)


def _eigenbasis(inv: QMatrix) -> tuple[QMatrix, list[int]]:
    """Columns forming a +1-then--1 eigenbasis, with the sign list."""
    n = inv.rows
    plus = []
    minus = []
    seen = IncrementalSpan(n)
    for j in range(n):
        e = [Q(0)] * n
        e[j] = Q(1)
        col = inv.col(j)
        p = [(x + y) / 2 for x, y in zip(e, col)]
        m_ = [(x - y) / 2 for x, y in zip(e, col)]
        if any(x != 0 for x in p) and seen.add(p):
            plus.append(p)
        if any(x != 0 for x in m_) and seen.add(m_):
            minus.append(m_)
    cols = plus + minus
    signs = [1] * len(plus) + [-1] * len(minus)
    mat = QMatrix(n, len(cols), [[cols[j][i] for j in range(len(cols))] for i in range(n)])
    return mat, signs


@dataclass
class RealizedSummand:
    summand: Summand
    degree: int  # degree of the canonical generator
    vector: list  # generator vector in the window coordinates at that degree


def canonical_from_window(wm: WindowModule) -> tuple[GradedModule, list[RealizedSummand]]:
    """Reconstruct the canonical form visible on a window.

    Chains run down each residue class of degrees, refined by sign (the
    eigenspaces of the involution; over Q[c] the action swaps signs along
    the chain).  Bars reaching the bottom of the window are free (Laurent
    over a Laurent ring); divisible torsion appears as a stage cut off at
    the window top, which is the intended window truncation.
    """
    ring = wm.ring
    step = ring.step
    lo, hi = wm.window
    eigen = {}
    for g, inv in wm.invs.items():
        eigen[g] = _eigenbasis(inv)
    out: list[RealizedSummand] = []
    for res in range(step):
        degs = [g for g in range(hi, lo - 1, -1) if g % step == res]
        if not degs:
            continue
        for start_sign in (1, -1):
            dims, bases, present = [], [], []
            for p, g in enumerate(degs):
                s = start_sign * ((-1) ** p if ring.flip else 1)
                if wm.dim(g):
                    mat, signs = eigen[g]
                    cols = [j for j, sg in enumerate(signs) if sg == s]
                    basis = QMatrix(
                        mat.rows, len(cols), [[mat.data[i][j] for j in cols] for i in range(mat.rows)]
                    )
                else:
                    basis = QMatrix(0, 0)
                dims.append(basis.cols)
                bases.append(basis)
                present.append(g)
            # chain maps in eigen coordinates
            cmaps = []
            for p in range(len(degs) - 1):
                g = degs[p]
                if dims[p] == 0 or dims[p + 1] == 0:
                    cmaps.append(QMatrix(dims[p + 1], dims[p]))
                    continue
                act = wm.acts.get(g)
                if act is None:
                    cmaps.append(QMatrix(dims[p + 1], dims[p]))
                    continue
                img = act @ bases[p]
                sol = bases[p + 1].solve_matrix(img)
                if sol is None:
                    raise InvariantError("action does not respect the involution chains")
                cmaps.append(sol)
            for bar in barcode(dims, cmaps):
                g_top = degs[bar.birth]
                sign_top = start_sign * ((-1) ** bar.birth if ring.flip else 1)
                vec = bases[bar.birth].apply(bar.vectors[0])
                length = (bar.death - bar.birth + 1) if bar.death is not None else None
                if length is None:
                    # a bar entering at the very top of the window and leaving
                    # at the bottom is upward-unbounded: a Laurent summand
                    laurent = ring.laurent or bar.birth == 0
                    s = Summand(LAURENT if laurent else FREE, g_top, sign_top)
                else:
                    s = Summand(TORSION, g_top, sign_top, length)
                out.append(RealizedSummand(s, g_top, vec))
    module = GradedModule(ring, [r.summand for r in out])
    # align realized generators with the sorted canonical order
    order = sorted(
        range(len(out)), key=lambda k: (_sort_key(_normalize_summand(ring, out[k].summand)), k)
    )
    realized = [out[k] for k in order]
    return module, realized


# -- kernels, cokernels, homology on a window --------------------------------


def kernel_of_map(phi: ModuleMap, window) -> tuple[GradedModule, ModuleMap]:
    """Kernel of a map with its inclusion, reconstructed on the window."""
    m = phi.domain
    lo, hi = window
    spaces, acts, invs, kb = {}, {}, {}, {}
    for g in range(lo, hi + 1):
        mat = phi.evaluate(g)
        kerb = mat.kernel_basis() if mat.cols else QMatrix(0, 0)
        kb[g] = kerb
        if kerb.cols:
            spaces[g] = kerb.cols
    for g in list(spaces):
        # involution restricted to the kernel
        inv_amb = m.involution_matrix(g)
        sol = kb[g].solve_matrix(inv_amb @ kb[g])
        if sol is None:
            raise InvariantError("involution does not preserve the kernel")
        invs[g] = sol
        if spaces.get(g - m.ring.step):
            img = m.action_matrix(g) @ kb[g]
            sol2 = kb[g - m.ring.step].solve_matrix(img)
            if sol2 is None:
                raise InvariantError("action does not preserve the kernel")
            acts[g] = sol2
        else:
            act = m.action_matrix(g) @ kb[g]
            if not act.is_zero():
                raise InvariantError("kernel window too small")
            acts[g] = QMatrix(0, kb[g].cols)
    wm = WindowModule(m.ring, window, spaces, acts, invs)
    K, realized = canonical_from_window(wm)
    ent = {}
    for k, r in enumerate(realized):
        amb = kb[r.degree].apply(r.vector)
        for col, (i, _a) in enumerate(m.basis(r.degree)):
            if amb[col] != 0:
                ent[(i, k)] = amb[col]
    incl = ModuleMap(K, m, 0, ent)
    return K, incl


class WindowMap:
    """A map stored as degreewise matrices on a window.

    Used where a symbolic monomial matrix is not well defined, e.g. the
    quotient projection out of a Laurent module.  mats[g] sends the domain
    at degree g to the codomain at degree g + degree.
    """

    def __init__(self, domain: GradedModule, codomain: GradedModule, degree: int, window, mats):
        self.domain = domain
        self.codomain = codomain
        self.degree = degree
        self.window = window
        self.mats = mats

    def evaluate(self, g: int) -> QMatrix:
        m = self.mats.get(g)
        if m is None:
            return QMatrix(self.codomain.dim(g + self.degree), self.domain.dim(g))
        return m

    def compose_module_map(self, phi: ModuleMap) -> ModuleMap:
        """self after phi, reconstructed from generator degrees.

        Requires phi.domain to be a polynomial-ring module whose generators
        lie in the window.
        """
        lo, hi = self.window
        src = phi.domain
        ent = {}
        for j, s in enumerate(src.summands):
            g = s.shift
            if not (lo <= g <= hi and lo <= g + phi.degree <= hi):
                raise InvariantError("window does not reach a generator")
            basis_g = src.basis(g)
            col = basis_g.index((j, 0))
            vec = [Q(0)] * len(basis_g)
            vec[col] = Q(1)
            img = self.evaluate(g + phi.degree).apply(phi.evaluate(g).apply(vec))
            tdeg = g + phi.degree + self.degree
            for cidx, (i, _a) in enumerate(self.codomain.basis(tdeg)):
                if img[cidx] != 0:
                    ent[(i, j)] = img[cidx]
        return ModuleMap(src, self.codomain, phi.degree + self.degree, ent)


def window_map_of(phi: ModuleMap, window) -> WindowMap:
    lo, hi = window
    mats = {g: phi.evaluate(g) for g in range(lo, hi + 1)}
    return WindowMap(phi.domain, phi.codomain, phi.degree, window, mats)


def cokernel_of_map(
    phi: ModuleMap, window, out_ring: Ring | None = None
) -> tuple[GradedModule, WindowMap]:
    """Cokernel of a map with its projection, reconstructed on the window.

    out_ring lets a torsion cokernel of a map into a Laurent module be
    reported over the polynomial subring, which is its natural home.
    """
    n = phi.codomain
    lo, hi = window
    ring = out_ring or n.ring
    step = ring.step
    spaces, acts, invs = {}, {}, {}
    proj, lift = {}, {}
    for g in range(lo, hi + 1):
        mat = phi.evaluate(g - phi.degree)
        if mat.cols == 0:
            mat = QMatrix(n.dim(g), 0)
        P, d = mat.cokernel_data()
        proj[g] = P
        if d:
            spaces[g] = d
    for g in list(spaces):
        P = proj[g]
        sec = P.transpose() @ (P @ P.transpose()).inverse()
        lift[g] = sec
        invs[g] = P @ (n.involution_matrix(g) @ sec)
        act_to = g - step
        if spaces.get(act_to):
            down = n.action_matrix(g)
            if step == 4 and n.ring.step == 2:
                down = n.action_matrix(g - 2) @ down
            acts[g] = proj[act_to] @ (down @ sec)
        else:
            acts[g] = QMatrix(0, spaces[g])
    wm = WindowModule(ring, window, spaces, acts, invs)
    C, realized = canonical_from_window(wm)
    mats = {}
    for g in range(lo, hi + 1):
        cols_src = n.dim(g)
        # matrix from ambient coordinates to canonical coordinates of C at g
        amb_to_C = []
        if spaces.get(g, 0):
            for cidx in range(cols_src):
                e = [Q(0)] * cols_src
                e[cidx] = Q(1)
                coords = _window_coordinates(C, realized, wm, g, proj[g].apply(e))
                amb_to_C.append(coords)
        basis_C = C.basis(g)
        mat = QMatrix(len(basis_C), cols_src)
        for cidx, coords in enumerate(amb_to_C):
            for r, (k, _a) in enumerate(basis_C):
                if k in coords:
                    mat.data[r][cidx] = coords[k]
        mats[g] = mat
    pr = WindowMap(n, C, 0, window, mats)
    return C, pr


def _window_coordinates(C: GradedModule, realized, wm: WindowModule, g: int, vec):
    """Express a window vector at degree g in canonical summand coordinates.

    Returns {summand index: coefficient}; the basis of C at degree g consists
    of the realized generators pushed down by the action.
    """
    cols = []
    idxs = []
    for k, r in enumerate(realized):
        a = C.power_at(k, g)
        if a is None:
            continue
        v = r.vector
        deg = r.degree
        for _ in range(a):
            v = wm.acts[deg].apply(v)
            deg -= wm.ring.step
        cols.append(v)
        idxs.append(k)
    dim = wm.dim(g)
    mat = QMatrix(dim, len(cols), [[cols[j][i] for j in range(len(cols))] for i in range(dim)])
    sol = mat.solve(list(vec))
    if sol is None:
        raise InvariantError("vector not expressible in canonical coordinates")
    return {idxs[j]: sol[j] for j in range(len(idxs))}


def homology_slot(m: GradedModule, d: ModuleMap) -> GradedModule:
    """Homology of a degree -1 differential on a canonical module."""
    H, _, _ = homology_realized(m, d)
    return H


def homology_realized(m: GradedModule, d: ModuleMap, window=None):
    """Homology together with cycle representatives and projections.

    Returns (H, realized, tools) where tools maps a degree to a pair
    (rep, to_h): rep is a matrix whose columns are cycle representatives of
    the chosen basis of H at that degree, and to_h sends a cycle vector to
    its H coordinates.
    """
    if d.domain != m or d.codomain != m or d.degree != -1:
        raise NotADifferential("differential must be a degree -1 self-map")
    if not d.compose(d).is_zero():
        raise NotADifferential("d squared is not zero")
    if window is None:
        window = auto_window((0, 0), [m])
    lo, hi = window
    step = m.ring.step
    Zb, Bb, reps, hdims = {}, {}, {}, {}
    for g in range(lo, hi + 1):
        dmat = d.evaluate(g)
        Z = dmat.kernel_basis() if dmat.cols else QMatrix(0, 0)
        Zb[g] = Z
    for g in range(lo, hi + 1):
        up = d.evaluate(g + 1)
        # image basis inside the full space
        span = IncrementalSpan(m.dim(g))
        bcols = []
        for j in range(up.cols):
            v = up.col(j)
            if any(x != 0 for x in v) and span.add(v):
                bcols.append(v)
        hcols = []
        for j in range(Zb[g].cols):
            v = Zb[g].col(j)
            if span.add(v):
                hcols.append(v)
        Bb[g] = bcols
        reps[g] = hcols
        hdims[g] = len(hcols)

    def make_tools(g):
        dim = m.dim(g)
        bcols, hcols = Bb[g], reps[g]
        both = bcols + hcols
        mat = QMatrix(dim, len(both), [[both[j][i] for j in range(len(both))] for i in range(dim)])

        def to_h(vec):
            sol = mat.solve(list(vec))
            if sol is None:
                raise InvariantError("vector is not a cycle modulo boundaries")
            return sol[len(bcols):]

        rep = QMatrix(dim, len(hcols), [[hcols[j][i] for j in range(len(hcols))] for i in range(dim)])
        return rep, to_h

    tools = {g: make_tools(g) for g in range(lo, hi + 1)}
    spaces, acts, invs = {}, {}, {}
    for g in range(lo, hi + 1):
        if hdims[g]:
            spaces[g] = hdims[g]
    for g in list(spaces):
        rep, to_h = tools[g]
        inv_amb = m.involution_matrix(g) @ rep
        cols = [to_h(inv_amb.col(j)) for j in range(hdims[g])]
        invs[g] = QMatrix(
            hdims[g], hdims[g], [[cols[j][i] for j in range(hdims[g])] for i in range(hdims[g])]
        )
        tgt = g - step
        if spaces.get(tgt):
            act_amb = m.action_matrix(g) @ rep
            cols = [tools[tgt][1](act_amb.col(j)) for j in range(hdims[g])]
            acts[g] = QMatrix(hdims[tgt], hdims[g], [[cols[j][i] for j in range(hdims[g])] for i in range(hdims[tgt])])
        else:
            acts[g] = QMatrix(0, hdims[g])
    wm = WindowModule(m.ring, window, spaces, acts, invs)
    H, realized = canonical_from_window(wm)
    return H, realized, tools


def differential_from_window(m: GradedModule, window, mats: dict[int, QMatrix]) -> ModuleMap:
    """Build a differential from raw degreewise matrices.

    Checks homogeneity implicitly, the commutation rule with the ring action
    (c-linearity), equivariance, and d*d = 0; violations raise
    NotADifferential.  The window must exhibit every generator.
    """
    lo, hi = window
    step = m.ring.step
    for g in range(lo + 1, hi + 1):
        dg = mats.get(g, QMatrix(m.dim(g - 1), m.dim(g)))
        if (dg.rows, dg.cols) != (m.dim(g - 1), m.dim(g)):
            raise SchemaError(f"differential matrix at degree {g} has wrong shape")
        # commutation with the action: c d = d c
        if g - step >= lo + 1:
            lhs = m.action_matrix(g - 1) @ dg
            dg2 = mats.get(g - step, QMatrix(m.dim(g - step - 1), m.dim(g - step)))
            rhs = dg2 @ m.action_matrix(g)
            if lhs != rhs:
                raise NotADifferential("differential does not commute with the action")
        if g + 1 <= hi:
            up = mats.get(g + 1, QMatrix(m.dim(g), m.dim(g + 1)))
            if not (dg @ up).is_zero():
                raise NotADifferential("d squared is not zero")
    ent = {}
    for j, s in enumerate(m.summands):
        g = s.shift
        if not (lo + 1 <= g <= hi):
            raise SchemaError("window does not reach a generator")
        basis_g = m.basis(g)
        col = basis_g.index((j, 0))
        img = mats.get(g, QMatrix(m.dim(g - 1), m.dim(g))).col(col)
        for cidx, (i, a) in enumerate(m.basis(g - 1)):
            if img[cidx] != 0:
                if a != (m.summands[i].shift - s.shift + 1) // step:
                    raise NotADifferential("differential is not homogeneous")
                ent[(i, j)] = img[cidx]
    d = ModuleMap(m, m, -1, ent)
    # confirm the raw matrices agree with the monomial map everywhere
    for g in range(lo + 1, hi + 1):
        dg = mats.get(g, QMatrix(m.dim(g - 1), m.dim(g)))
        if d.evaluate(g) != dg:
            raise NotADifferential("differential does not commute with the action")
    return d
