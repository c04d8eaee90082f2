"""Germ-module objects over the dihedral family.

An object holds a plain graded Q-space at infinity, one graded Q[W]-space
per index k > 2 (finitely many explicit, the rest following one tail
template), and a germ map from infinity into the tail of the sequence.
Morphisms carry one map per slot and are constrained only through the
germ, that is, at the tail template.  The module provides the three
adjoint pairs around the slot projections and the constant functor,
levelwise homology, and the weak-equivalence and fibration predicates
of the projective structure.
"""

from __future__ import annotations

from .errors import (
    BadIndex,
    InvariantError,
    NotADifferential,
    SchemaError,
)
from .linalg import Q, QMatrix
from .toral import QWSpace, VMap, qw_sum, _vspace_homology

TAIL = "tail"


# -- chain complexes of Q[W]-spaces -------------------------------------------


class QWComplex:
    """A bounded chain complex of Q[W]-spaces: a space and a differential."""

    __slots__ = ("space", "d")

    def __init__(self, space: QWSpace, d: VMap | None = None):
        if d is None:
            d = VMap.zero(space, space, -1)
        if d.domain != space or d.codomain != space or d.degree != -1:
            raise SchemaError("differential has the wrong type")
        self.space = space
        self.d = d

    @staticmethod
    def zero() -> "QWComplex":
        return QWComplex(QWSpace.zero())

    def is_zero(self) -> bool:
        return self.space.is_zero()

    def is_trivial_action(self) -> bool:
        return all(m == 0 for _p, m in self.space.dims.values())

    def check_differential(self):
        if not self.d.compose(self.d).is_zero():
            raise NotADifferential("d squared is not zero")

    def __eq__(self, other):
        return (
            isinstance(other, QWComplex)
            and self.space == other.space
            and self.d == other.d
        )

    def homology(self) -> "QWComplex":
        self.check_differential()
        dims = _homology_tools(self.space, self.d)[0]
        return QWComplex(QWSpace(dims))


def _homology_tools(space: QWSpace, d: VMap):
    """Levelwise homology data per sign: dims plus (reps, to_h) tools."""
    degs = set(space.dims)
    degs |= {g - 1 for g in degs} | {g + 1 for g in degs}
    out_dims, tools = {}, {}
    for s in (1, -1):
        dims = {g: space.dim(g, s) for g in degs}
        mats = {g: d.block(g, s) for g in degs}
        hdims, reps, projs = _vspace_homology(dims, mats)
        for g, h in hdims.items():
            if h:
                p, m = out_dims.get(g, (0, 0))
                out_dims[g] = (p + h, m) if s == 1 else (p, m + h)
        tools[s] = (reps, projs)
    return out_dims, tools


def _induced_block(f: VMap, hx_tools, hy_tools, g, s) -> QMatrix:
    """The map induced by a chain map between homologies at one bidegree."""
    reps_x, _ = hx_tools[s]
    _, projs_y = hy_tools[s]
    rep = reps_x.get(g)
    if rep is None or rep.cols == 0:
        return QMatrix(0, 0)
    img = f.block(g, s) @ rep
    cols = [projs_y[g + f.degree](img.col(j)) for j in range(img.cols)]
    rows = len(cols[0]) if cols else 0
    return QMatrix(rows, len(cols), [[cols[j][i] for j in range(len(cols))] for i in range(rows)])


# -- objects ---------------------------------------------------------------------


class GermSequence:
    """Finitely many explicit Q[W]-spaces indexed by k > 2, plus one tail."""

    __slots__ = ("explicit", "tail")

    def __init__(self, explicit: dict, tail: QWSpace):
        for k in explicit:
            if not (isinstance(k, int) and k > 2):
                raise BadIndex(f"slot index {k!r}: indices start at 3")
        self.explicit = dict(explicit)
        self.tail = tail

    def slot(self, key) -> QWSpace:
        if key == TAIL:
            return self.tail
        return self.explicit.get(key, self.tail)

    def keys(self):
        return sorted(self.explicit) + [TAIL]

    def __eq__(self, other):
        return (
            isinstance(other, GermSequence)
            and self.explicit == other.explicit
            and self.tail == other.tail
        )


class DihedralObject:
    """A germ-module object, levelwise a chain complex."""

    __slots__ = ("m_inf", "slots", "germ", "d_inf", "d_slots")

    def __init__(self, m_inf: QWSpace, slots: GermSequence, germ: dict,
                 d_inf: VMap | None = None, d_slots: dict | None = None):
        if any(m for _p, m in m_inf.dims.values()):
            raise InvariantError("the action at infinity must be trivial")
        self.m_inf = m_inf
        self.slots = slots
        self.germ = {}
        for key in slots.keys():
            s = germ.get(key)
            if s is None:
                s = VMap.zero(m_inf, slots.slot(key), 0)
            if s.domain != m_inf or s.codomain != slots.slot(key) or s.degree != 0:
                raise SchemaError(f"germ map at slot {key!r} has wrong type")
            self.germ[key] = s
        if d_inf is None:
            d_inf = VMap.zero(m_inf, m_inf, -1)
        if d_inf.domain != m_inf or d_inf.degree != -1:
            raise SchemaError("differential at infinity has wrong type")
        self.d_inf = d_inf
        self.d_slots = {}
        d_slots = d_slots or {}
        for key in slots.keys():
            d = d_slots.get(key)
            m = slots.slot(key)
            if d is None:
                d = VMap.zero(m, m, -1)
            if d.domain != m or d.codomain != m or d.degree != -1:
                raise SchemaError(f"differential at slot {key!r} has wrong type")
            self.d_slots[key] = d

    def keys(self):
        return self.slots.keys()

    def slot(self, key) -> QWSpace:
        return self.slots.slot(key)

    def germ_of(self, key) -> VMap:
        return self.germ.get(key, self.germ[TAIL])

    def d_slot(self, key) -> VMap:
        return self.d_slots.get(key, self.d_slots[TAIL])

    def level(self, key) -> QWComplex:
        return QWComplex(self.slot(key), self.d_slot(key))

    def level_inf(self) -> QWComplex:
        return QWComplex(self.m_inf, self.d_inf)

    def is_zero(self) -> bool:
        return (
            self.m_inf.is_zero()
            and self.slots.tail.is_zero()
            and all(m.is_zero() for m in self.slots.explicit.values())
        )

    def normalized(self) -> "DihedralObject":
        """Drop explicit slots that duplicate the tail template."""
        explicit = dict(self.slots.explicit)
        germ = dict(self.germ)
        d_slots = dict(self.d_slots)
        for k in list(explicit):
            if (
                explicit[k] == self.slots.tail
                and germ[k] == germ[TAIL]
                and d_slots[k] == d_slots[TAIL]
            ):
                del explicit[k]
                del germ[k]
                del d_slots[k]
        return DihedralObject(
            self.m_inf, GermSequence(explicit, self.slots.tail), germ,
            self.d_inf, d_slots,
        )

    def __eq__(self, other):
        if not isinstance(other, DihedralObject):
            return False
        a, b = self.normalized(), other.normalized()
        return (
            a.m_inf == b.m_inf
            and a.slots == b.slots
            and a.germ == b.germ
            and a.d_inf == b.d_inf
            and a.d_slots == b.d_slots
        )

    def check_differential(self):
        """d squared vanishes levelwise; the germ map is a chain map.

        The germ only remembers the tail of a sequence, so commutation with
        the differential is a condition at the tail template alone.
        """
        if not self.d_inf.compose(self.d_inf).is_zero():
            raise NotADifferential("d squared is not zero at infinity")
        for key in self.keys():
            d = self.d_slot(key)
            if not d.compose(d).is_zero():
                raise NotADifferential(f"d squared is not zero at slot {key!r}")
        d = self.d_slots[TAIL]
        if d.compose(self.germ[TAIL]) != self.germ[TAIL].compose(self.d_inf):
            raise NotADifferential("germ map is not a chain map")


def zero_dihedral() -> DihedralObject:
    return DihedralObject(QWSpace.zero(), GermSequence({}, QWSpace.zero()), {})


# -- morphisms --------------------------------------------------------------------


class DihedralMorphism:
    """A degree-t map: one component per slot, constrained through the germ."""

    __slots__ = ("x", "y", "degree", "f_inf", "f_slots")

    def __init__(self, x: DihedralObject, y: DihedralObject, degree: int,
                 f_inf: VMap, f_slots: dict):
        self.x, self.y, self.degree = x, y, degree
        if f_inf.domain != x.m_inf or f_inf.codomain != y.m_inf or f_inf.degree != degree:
            raise SchemaError("component at infinity has wrong type")
        self.f_inf = f_inf
        keys = set(x.slots.explicit) | set(y.slots.explicit) | {TAIL}
        self.f_slots = {}
        for key in keys:
            f = f_slots.get(key)
            if f is None:
                f = VMap.zero(x.slot(key), y.slot(key), degree)
            if f.domain != x.slot(key) or f.codomain != y.slot(key) or f.degree != degree:
                raise SchemaError(f"component at slot {key!r} has wrong type")
            self.f_slots[key] = f

    def component(self, key) -> VMap:
        f = self.f_slots.get(key)
        if f is not None:
            return f
        return self.f_slots[TAIL]

    @staticmethod
    def identity(x: DihedralObject) -> "DihedralMorphism":
        return DihedralMorphism(
            x, x, 0, VMap.identity(x.m_inf),
            {key: VMap.identity(x.slot(key)) for key in x.keys()},
        )

    def compose(self, other: "DihedralMorphism") -> "DihedralMorphism":
        """self after other."""
        if other.y != self.x:
            raise SchemaError("composition mismatch")
        keys = set(other.x.slots.explicit) | set(self.y.slots.explicit) | set(self.x.slots.explicit) | {TAIL}
        return DihedralMorphism(
            other.x, self.y, self.degree + other.degree,
            self.f_inf.compose(other.f_inf),
            {k: self.component(k).compose(other.component(k)) for k in keys},
        )

    def __eq__(self, other):
        if not isinstance(other, DihedralMorphism):
            return False
        if (self.x, self.y, self.degree) != (other.x, other.y, other.degree):
            return False
        keys = set(self.f_slots) | set(other.f_slots)
        return self.f_inf == other.f_inf and all(
            self.component(k) == other.component(k) for k in keys
        )

    def is_valid(self) -> bool:
        """The defining square commutes at the tail template."""
        lhs = self.f_slots[TAIL].compose(self.x.germ[TAIL])
        rhs = self.y.germ[TAIL].compose(self.f_inf)
        return lhs == rhs

    def is_chain_map(self) -> bool:
        if self.y.d_inf.compose(self.f_inf) != self.f_inf.compose(self.x.d_inf):
            return False
        for key in set(self.f_slots):
            if self.y.d_slot(key).compose(self.component(key)) != self.component(
                key
            ).compose(self.x.d_slot(key)):
                return False
        return True


# -- the functors -----------------------------------------------------------------


def _check_index(k: int):
    if not (isinstance(k, int) and k > 2):
        raise BadIndex(f"slot index {k!r}: indices start at 3")


def functor_i_k(x: QWComplex, k: int) -> DihedralObject:
    """Inclusion at one slot: zero at infinity and everywhere else."""
    _check_index(k)
    return DihedralObject(
        QWSpace.zero(),
        GermSequence({k: x.space}, QWSpace.zero()),
        {},
        None,
        {k: x.d},
    )


def functor_p_k(m: DihedralObject, k: int) -> QWComplex:
    """The slot projection."""
    _check_index(k)
    return m.level(k)


def functor_const(a: QWComplex) -> DihedralObject:
    """The constant object: the same complex at infinity and at every slot."""
    if not a.is_trivial_action():
        raise SchemaError("the constant functor consumes trivial-action complexes")
    return DihedralObject(
        a.space,
        GermSequence({}, a.space),
        {TAIL: VMap.identity(a.space)},
        a.d,
        {TAIL: a.d},
    )


def germ_fixed_points(m: DihedralObject) -> QWComplex:
    """Right adjoint of the constant functor.

    A map out of a trivial-action complex is a map into the infinity level
    together with one fixed-vector correction per explicit slot; the tail
    component is forced through the germ.  The value is therefore the
    infinity level extended by the fixed part of each explicit slot of the
    normal form.
    """
    n = m.normalized()
    parts = [(n.m_inf, n.d_inf)]
    for k in sorted(n.slots.explicit):
        space = n.slot(k)
        fixed = QWSpace({g: (p, 0) for g, (p, _m) in space.dims.items()})
        # the slot differential is equivariant, so it restricts to the
        # fixed part: its (g, +) blocks
        d = n.d_slot(k)
        blocks = {(g, 1): d.block(g, 1) for g in space.dims if space.dim(g, 1)}
        parts.append((fixed, VMap(fixed, fixed, -1, blocks)))
    total, offs = _sum_spaces([p[0] for p in parts])
    blocks = {}
    for g in total.dims:
        for s in (1, -1):
            rows, cols = total.dim(g - 1, s), total.dim(g, s)
            if not cols:
                continue
            mat = [[Q(0)] * cols for _ in range(rows)]
            for idx, (space, d) in enumerate(parts):
                b = d.block(g, s)
                ro, co = offs[idx](g - 1, s), offs[idx](g, s)
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[ro + i][co + j] = b.data[i][j]
            blocks[(g, s)] = QMatrix(rows, cols, mat)
    return QWComplex(total, VMap(total, total, -1, blocks))


def _sum_spaces(spaces):
    """Direct sum of QW-spaces with per-part offset functions."""
    total = QWSpace.zero()
    offsets = []
    for sp in spaces:
        before = total

        def off(g, s, before=before):
            return before.dim(g, s)

        offsets.append(off)
        total = qw_sum(total, sp)
    return total, offsets


def map_germ_fixed_points(f: DihedralMorphism) -> VMap:
    """The induced map on germ fixed points.

    Defined whenever the corrections of the source land in explicit slots
    of the target; in particular on the counit of the adjunction.
    """
    nx, ny = f.x.normalized(), f.y.normalized()
    gx, gy = germ_fixed_points(f.x), germ_fixed_points(f.y)
    x_keys = sorted(nx.slots.explicit)
    y_keys = sorted(ny.slots.explicit)
    blocks = {}
    for g in gx.space.dims:
        cols = gx.space.dim(g, 1)
        rows = gy.space.dim(g + f.degree, 1)
        if not cols:
            continue
        mat = [[Q(0)] * cols for _ in range(rows)]
        col = 0
        # the infinity coordinates
        finf = f.f_inf.block(g, 1)
        for j in range(nx.m_inf.dim(g, 1)):
            for i in range(finf.rows):
                mat[i][col] = finf.data[i][j]
            # deviation of f at each explicit target slot, applied to the
            # template value of the source coordinate
            row0 = ny.m_inf.dim(g + f.degree, 1)
            for k in y_keys:
                dev = f.component(k).compose(nx.germ_of(k)) + f.y.germ_of(k).compose(
                    f.f_inf
                ).scale(Q(-1))
                b = dev.block(g, 1)
                for i in range(b.rows):
                    mat[row0 + i][col] = b.data[i][j]
                row0 += ny.slot(k).dim(g + f.degree, 1)
            col += 1
        # the correction coordinates
        for k in x_keys:
            fk = f.component(k).block(g, 1)
            for j in range(nx.slot(k).dim(g, 1)):
                if k in ny.slots.explicit:
                    row0 = ny.m_inf.dim(g + f.degree, 1)
                    for k2 in y_keys:
                        if k2 == k:
                            break
                        row0 += ny.slot(k2).dim(g + f.degree, 1)
                    for i in range(fk.rows):
                        mat[row0 + i][col] = fk.data[i][j]
                elif any(fk.data[i][j] != 0 for i in range(fk.rows)):
                    raise InvariantError(
                        "correction escapes the explicit slots of the target"
                    )
                col += 1
        blocks[(g, 1)] = QMatrix(rows, cols, mat)
    return VMap(gx.space, gy.space, f.degree, blocks)


# -- the three adjunctions ----------------------------------------------------------


def unit_i_p(x: QWComplex, k: int) -> VMap:
    """X -> p_k(i_k(X)) is the identity."""
    _check_index(k)
    return VMap.identity(x.space)


def counit_i_p(m: DihedralObject, k: int) -> DihedralMorphism:
    """i_k(p_k(M)) -> M: the identity at slot k, zero elsewhere."""
    src = functor_i_k(m.level(k), k)
    return DihedralMorphism(
        src, m, 0, VMap.zero(src.m_inf, m.m_inf, 0),
        {k: VMap.identity(m.slot(k))},
    )


def unit_p_i(m: DihedralObject, k: int) -> DihedralMorphism:
    """M -> i_k(p_k(M)): the identity at slot k, zero elsewhere."""
    dst = functor_i_k(m.level(k), k)
    return DihedralMorphism(
        m, dst, 0, VMap.zero(m.m_inf, dst.m_inf, 0),
        {k: VMap.identity(m.slot(k))},
    )


def counit_p_i(x: QWComplex, k: int) -> VMap:
    """p_k(i_k(X)) -> X is the identity."""
    _check_index(k)
    return VMap.identity(x.space)


def unit_const(a: QWComplex) -> VMap:
    """A -> germ_fixed_points(c(A)) is the identity."""
    target = germ_fixed_points(functor_const(a))
    if target.space != a.space:
        raise InvariantError("constant object has a non-trivial fixed germ")
    return VMap.identity(a.space)


def counit_const(m: DihedralObject) -> DihedralMorphism:
    """c(germ_fixed_points(M)) -> M: evaluate the germ and the corrections."""
    n = m.normalized()
    gm = germ_fixed_points(m)
    src = functor_const(gm)
    keys = sorted(n.slots.explicit)
    # projection to the infinity coordinates
    proj_blocks = {}
    for g in gm.space.dims:
        cols = gm.space.dim(g, 1)
        rows = n.m_inf.dim(g, 1)
        mat = [[Q(0)] * cols for _ in range(rows)]
        for j in range(rows):
            mat[j][j] = Q(1)
        proj_blocks[(g, 1)] = QMatrix(rows, cols, mat)
    proj = VMap(gm.space, n.m_inf, 0, proj_blocks)
    f_slots = {TAIL: n.germ[TAIL].compose(proj)}
    for k in keys:
        space = n.slot(k)
        base = n.germ_of(k).compose(proj)
        blocks = {}
        for g in gm.space.dims:
            cols = gm.space.dim(g, 1)
            rows = space.dim(g, 1)
            mat = [[Q(0)] * cols for _ in range(rows)]
            b = base.block(g, 1)
            for i in range(b.rows):
                for j in range(b.cols):
                    mat[i][j] = b.data[i][j]
            col0 = n.m_inf.dim(g, 1)
            for k2 in keys:
                nk = n.slot(k2).dim(g, 1)
                if k2 == k:
                    for i in range(min(rows, nk)):
                        mat[i][col0 + i] = mat[i][col0 + i] + Q(1)
                col0 += nk
            blocks[(g, 1)] = QMatrix(rows, cols, mat)
        f_slots[k] = VMap(gm.space, space, 0, blocks)
    return DihedralMorphism(src, n, 0, proj, f_slots)


# -- homology and the projective structure --------------------------------------------


def homology_Ch(m: DihedralObject) -> DihedralObject:
    """Levelwise homology, with the induced germ map."""
    m.check_differential()
    hinf_dims, hinf_tools = _homology_tools(m.m_inf, m.d_inf)
    h_inf = QWSpace(hinf_dims)
    explicit, germ, levels = {}, {}, {}
    for key in m.keys():
        dims, tools = _homology_tools(m.slot(key), m.d_slot(key))
        space = QWSpace(dims)
        blocks = {}
        for g in h_inf.dims:
            if h_inf.dim(g, 1):
                blocks[(g, 1)] = _induced_block(
                    m.germ_of(key), hinf_tools, tools, g, 1
                )
        levels[key] = space
        germ[key] = (space, blocks)
    tail = levels[TAIL]
    out_germ = {}
    for key in m.keys():
        space, blocks = germ[key]
        vm = VMap(h_inf, space, 0, blocks)
        if key == TAIL:
            out_germ[TAIL] = vm
        else:
            explicit[key] = space
            out_germ[key] = vm
    return DihedralObject(h_inf, GermSequence(explicit, tail), out_germ)


def is_weak_equivalence(f: DihedralMorphism) -> bool:
    """Homology isomorphism at infinity, at every explicit slot, and at the tail."""
    f.x.check_differential()
    f.y.check_differential()
    if not f.is_chain_map():
        return False
    pairs = [(f.x.level_inf(), f.y.level_inf(), f.f_inf)]
    keys = set(f.x.slots.explicit) | set(f.y.slots.explicit) | {TAIL}
    for key in keys:
        pairs.append((f.x.level(key), f.y.level(key), f.component(key)))
    for cx, cy, comp in pairs:
        _, tx = _homology_tools(cx.space, cx.d)
        hy_dims, ty = _homology_tools(cy.space, cy.d)
        hx_dims = _homology_tools(cx.space, cx.d)[0]
        degs = set(hx_dims) | set(hy_dims)
        for g in degs:
            for s in (1, -1):
                dx = QWSpace(hx_dims).dim(g, s)
                dy = QWSpace(hy_dims).dim(g + f.degree, s)
                if dx != dy:
                    return False
                if dx == 0:
                    continue
                if _induced_block(comp, tx, ty, g, s).rank() != dx:
                    return False
    return True


def is_fibration(f: DihedralMorphism) -> bool:
    """Levelwise surjective at infinity, every explicit slot, and the tail."""
    checks = [(f.x.m_inf, f.y.m_inf, f.f_inf)]
    keys = set(f.x.slots.explicit) | set(f.y.slots.explicit) | {TAIL}
    for key in keys:
        checks.append((f.x.slot(key), f.y.slot(key), f.component(key)))
    for _sx, sy, comp in checks:
        for g, (p, mi) in sy.dims.items():
            for s, want in ((1, p), (-1, mi)):
                if want and comp.block(g - f.degree, s).rank() != want:
                    return False
    return True


# -- generators and small constructions ------------------------------------------------


def make_generator_dihedral(tag) -> DihedralObject:
    """The projective generators: a regular-module slot or the constants."""
    if tag == "const":
        return functor_const(QWComplex(QWSpace({0: (1, 0)})))
    _check_index(tag)
    return functor_i_k(QWComplex(QWSpace({0: (1, 1)})), tag)


def direct_sum_dihedral(a: DihedralObject, b: DihedralObject) -> DihedralObject:
    keys = (set(a.slots.explicit) | set(b.slots.explicit) | {TAIL}) - {TAIL}
    m_inf, offs = _sum_spaces([a.m_inf, b.m_inf])
    explicit, germ, d_slots = {}, {}, {}
    d_inf = _sum_vmaps(m_inf, m_inf, [a.d_inf, b.d_inf])
    for key in sorted(keys) + [TAIL]:
        space, _ = _sum_spaces([a.slot(key), b.slot(key)])
        germ[key] = _block_vmap(m_inf, space, [a.germ_of(key), b.germ_of(key)])
        d_slots[key] = _sum_vmaps(space, space, [a.d_slot(key), b.d_slot(key)])
        if key != TAIL:
            explicit[key] = space
        else:
            tail = space
    return DihedralObject(
        m_inf, GermSequence(explicit, tail), germ, d_inf, d_slots
    )


def _sum_vmaps(dom: QWSpace, cod: QWSpace, maps) -> VMap:
    """Block-diagonal sum of maps whose domains and codomains add up."""
    degree = maps[0].degree
    blocks = {}
    for g in dom.dims:
        for s in (1, -1):
            cols = dom.dim(g, s)
            rows = cod.dim(g + degree, s)
            if not cols:
                continue
            mat = [[Q(0)] * cols for _ in range(rows)]
            ro = co = 0
            for f in maps:
                b = f.block(g, s)
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[ro + i][co + j] = b.data[i][j]
                ro += b.rows
                co += b.cols
            blocks[(g, s)] = QMatrix(rows, cols, mat)
    return VMap(dom, cod, degree, blocks)


def _block_vmap(dom: QWSpace, cod: QWSpace, maps) -> VMap:
    """Column-stacked maps out of a summed domain into a summed codomain."""
    return _sum_vmaps(dom, cod, maps)


def suspend_dihedral(m: DihedralObject, k: int) -> DihedralObject:
    germ, d_slots, explicit = {}, {}, {}
    for key in m.keys():
        germ[key] = m.germ_of(key).suspend(k)
        d_slots[key] = m.d_slot(key).suspend(k)
        if key != TAIL:
            explicit[key] = m.slot(key).suspend(k)
    return DihedralObject(
        m.m_inf.suspend(k),
        GermSequence(explicit, m.slots.tail.suspend(k)),
        germ, m.d_inf.suspend(k), d_slots,
    )


def cone(f: DihedralMorphism) -> DihedralObject:
    """The mapping cone of a degree-0 chain map."""
    if f.degree != 0 or not (f.is_valid() and f.is_chain_map()):
        raise SchemaError("cones need degree-0 chain maps")
    sx = suspend_dihedral(f.x, 1)
    total = direct_sum_dihedral(sx, f.y)
    m_inf = total.m_inf
    d_inf = _cone_diff(sx.m_inf, f.y.m_inf, sx.d_inf, f.y.d_inf, f.f_inf)
    d_slots = {}
    for key in total.keys():
        d_slots[key] = _cone_diff(
            sx.slot(key), f.y.slot(key), sx.d_slot(key), f.y.d_slot(key),
            f.component(key),
        )
    return DihedralObject(m_inf, total.slots, total.germ, d_inf, d_slots)


def _cone_diff(sa: QWSpace, sb: QWSpace, da: VMap, db: VMap, comp: VMap) -> VMap:
    dom, _ = _sum_spaces([sa, sb])
    blocks = {}
    for g in dom.dims:
        for s in (1, -1):
            cols = dom.dim(g, s)
            rows = dom.dim(g - 1, s)
            if not cols:
                continue
            mat = [[Q(0)] * cols for _ in range(rows)]
            na, nb_ = sa.dim(g, s), sb.dim(g, s)
            ra = sa.dim(g - 1, s)
            b = da.block(g, s)
            for i in range(b.rows):
                for j in range(b.cols):
                    mat[i][j] = -b.data[i][j]
            # the map component: degree 0 out of the suspension is degree -1
            c = comp.block(g - 1, s)
            for i in range(c.rows):
                for j in range(c.cols):
                    mat[ra + i][j] = c.data[i][j]
            d = db.block(g, s)
            for i in range(d.rows):
                for j in range(d.cols):
                    mat[ra + i][na + j] = d.data[i][j]
            blocks[(g, s)] = QMatrix(rows, cols, mat)
    return VMap(dom, dom, -1, blocks)


# -- graded morphism dimensions ----------------------------------------------------


def hom_dihedral(x: DihedralObject, y: DihedralObject, degrees) -> dict[int, int]:
    """Degreewise dimension of the graded morphism space.

    Unknowns: the map at infinity, one map per explicit slot of either
    normal form, and the tail template; the only linear constraint ties the
    tail template to the map at infinity through the germ.
    """
    x, y = x.normalized(), y.normalized()
    out = {}
    keys = sorted(set(x.slots.explicit) | set(y.slots.explicit)) + [TAIL]
    for t in degrees:
        unknowns = []
        index = {}

        def add(u):
            index[u] = len(unknowns)
            unknowns.append(u)

        for g, (p, _m) in sorted(x.m_inf.dims.items()):
            for iy in range(y.m_inf.dim(g + t, 1)):
                for ix in range(p):
                    add(("inf", g, iy, ix))
        for key in keys:
            dom, cod = x.slot(key), y.slot(key)
            for g in dom.dims:
                for s in (1, -1):
                    for iy in range(cod.dim(g + t, s)):
                        for ix in range(dom.dim(g, s)):
                            add((key, g, s, iy, ix))
        rows = []
        gx, gy = x.germ[TAIL], y.germ[TAIL]
        for g, (p, _m) in sorted(x.m_inf.dims.items()):
            bx = gx.block(g, 1)
            by = gy.block(g + t, 1)
            for r in range(y.slots.tail.dim(g + t, 1)):
                for jx in range(p):
                    row = {}
                    for mid in range(x.slots.tail.dim(g, 1)):
                        if bx.data[mid][jx] != 0:
                            u = index.get((TAIL, g, 1, r, mid))
                            if u is not None:
                                row[u] = row.get(u, Q(0)) + bx.data[mid][jx]
                    for mid in range(y.m_inf.dim(g + t, 1)):
                        if by.data[r][mid] != 0:
                            u = index[("inf", g, mid, jx)]
                            row[u] = row.get(u, Q(0)) - by.data[r][mid]
                    if row:
                        rows.append(row)
        n = len(unknowns)
        if not n:
            out[t] = 0
            continue
        mat = QMatrix(
            len(rows), n, [[row.get(u, Q(0)) for u in range(n)] for row in rows]
        )
        out[t] = n - mat.rank()
    return out
