"""Chain complexes over the group algebras of the five exceptional classes.

Each isolated class contributes the group algebra of its Weyl group: the
trivial group three times, the group of order two, and the nonabelian
group of order six obtained by brute force from cosets in the symmetric
group on four letters.  Complexes carry explicit action matrices; the
tensor product uses the diagonal action with Koszul signs and the internal
hom carries the conjugation action.
"""

from __future__ import annotations

from itertools import permutations

from .errors import (
    AlgebraMismatch,
    BadClass,
    InvariantError,
    NotADifferential,
    SchemaError,
    WrongAlgebraForClass,
)
from .linalg import Q, QMatrix

EXCEPTIONAL_CLASSES = ("SO3", "Sigma4", "A4", "A5", "D4")


class FiniteGroupAlg:
    """A finite group by its multiplication table; elements are 0..n-1."""

    __slots__ = ("order", "table", "identity", "generators")

    def __init__(self, table, identity=0):
        self.order = len(table)
        self.table = tuple(tuple(row) for row in table)
        self.identity = identity
        n = self.order
        for a in range(n):
            if self.mult(a, identity) != a or self.mult(identity, a) != a:
                raise InvariantError("identity fails")
            if not any(self.mult(a, b) == identity for b in range(n)):
                raise InvariantError("inverses fail")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.mult(self.mult(a, b), c) != self.mult(a, self.mult(b, c)):
                        raise InvariantError("associativity fails")
        def closure_of(gens):
            seen, frontier = {identity}, [identity]
            while frontier:
                x = frontier.pop()
                for g in gens:
                    y = self.mult(g, x)
                    if y not in seen:
                        seen.add(y)
                        frontier.append(y)
            return seen

        gens = []
        while len(closure_of(gens)) < n:
            covered = closure_of(gens)
            gens.append(next(a for a in range(n) if a not in covered))
        self.generators = tuple(gens)

    def mult(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return next(b for b in range(self.order) if self.mult(a, b) == self.identity)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mult(x, a)
            k += 1
        return k

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroupAlg)
            and self.table == other.table
            and self.identity == other.identity
        )


def trivial_group() -> FiniteGroupAlg:
    return FiniteGroupAlg([[0]])


def order_two_group() -> FiniteGroupAlg:
    return FiniteGroupAlg([[0, 1], [1, 0]])


def _perm_mult(a, b):
    """(a * b)(i) = a(b(i))."""
    return tuple(a[b[i]] for i in range(len(b)))


def coset_group_s4_mod_v4() -> FiniteGroupAlg:
    """The quotient of the symmetric group on four letters by the normal
    dihedral group of order four, computed by brute-force coset enumeration."""
    s4 = list(permutations(range(4)))
    v4 = {
        (0, 1, 2, 3),
        (1, 0, 3, 2),
        (2, 3, 0, 1),
        (3, 2, 1, 0),
    }
    cosets = []
    seen = set()
    for g in s4:
        coset = frozenset(_perm_mult(g, v) for v in v4)
        if coset not in seen:
            seen.add(coset)
            cosets.append(coset)
    index = {c: i for i, c in enumerate(cosets)}
    reps = [sorted(c)[0] for c in cosets]
    table = []
    for a in reps:
        row = []
        for b in reps:
            prod = _perm_mult(a, b)
            row.append(index[next(c for c in cosets if prod in c)])
        table.append(row)
    ident = index[next(c for c in cosets if (0, 1, 2, 3) in c)]
    return FiniteGroupAlg(table, ident)


def weyl_group_of(cls: str) -> FiniteGroupAlg:
    """The Weyl group of an exceptional class, as a group algebra."""
    if cls in ("SO3", "Sigma4", "A5"):
        return trivial_group()
    if cls == "A4":
        return order_two_group()
    if cls == "D4":
        return coset_group_s4_mod_v4()
    raise BadClass(f"unknown exceptional class {cls!r}")


# -- complexes -------------------------------------------------------------------


class GroupComplex:
    """A bounded complex of modules over a finite group algebra.

    modules: degree -> (dimension, action matrices per group element);
    diffs: degree -> matrix into the next degree down.
    """

    __slots__ = ("algebra", "modules", "diffs")

    def __init__(self, algebra: FiniteGroupAlg, modules: dict, diffs: dict | None = None):
        self.algebra = algebra
        self.modules = {}
        for g, (dim, action) in modules.items():
            if dim == 0:
                continue
            acts = [action[e] for e in range(algebra.order)]
            for e, mat in enumerate(acts):
                if (mat.rows, mat.cols) != (dim, dim):
                    raise SchemaError(f"action matrix at degree {g} has wrong shape")
            if acts[algebra.identity] != QMatrix.identity(dim):
                raise InvariantError("identity must act as the identity")
            # checking a generating set against every element suffices:
            # rho(sa) = rho(s)rho(a) extends multiplicatively to all words
            for a in algebra.generators:
                for b in range(algebra.order):
                    if acts[a] @ acts[b] != acts[algebra.mult(a, b)]:
                        raise InvariantError("action matrices are not a representation")
            self.modules[g] = (dim, tuple(acts))
        self.diffs = {}
        for g, mat in (diffs or {}).items():
            if mat.is_zero():
                continue
            want = (self.dim(g - 1), self.dim(g))
            if (mat.rows, mat.cols) != want:
                raise SchemaError(f"differential at degree {g} has wrong shape")
            for e in range(algebra.order):
                if self.action(g - 1, e) @ mat != mat @ self.action(g, e):
                    raise InvariantError("differential is not equivariant")
            self.diffs[g] = mat

    def dim(self, g: int) -> int:
        return self.modules.get(g, (0, ()))[0]

    def action(self, g: int, e: int) -> QMatrix:
        dim, acts = self.modules.get(g, (0, ()))
        if not dim:
            return QMatrix(0, 0)
        return acts[e]

    def diff(self, g: int) -> QMatrix:
        mat = self.diffs.get(g)
        if mat is None:
            return QMatrix(self.dim(g - 1), self.dim(g))
        return mat

    def degrees(self):
        return sorted(self.modules)

    def is_zero(self) -> bool:
        return not self.modules

    def total_dim(self) -> int:
        return sum(d for d, _a in self.modules.values())

    def check_differential(self):
        for g in self.modules:
            if not (self.diff(g) @ self.diff(g + 1)).is_zero():
                raise NotADifferential(f"d squared is not zero at degree {g + 1}")

    def __eq__(self, other):
        return (
            isinstance(other, GroupComplex)
            and self.algebra == other.algebra
            and self.modules == other.modules
            and self.diffs == other.diffs
        )


def unit_complex(algebra: FiniteGroupAlg) -> GroupComplex:
    """The monoidal unit: one trivial-action line in degree zero."""
    one = QMatrix.identity(1)
    return GroupComplex(algebra, {0: (1, {e: one for e in range(algebra.order)})})


def zero_complex(algebra: FiniteGroupAlg) -> GroupComplex:
    return GroupComplex(algebra, {})


class GroupChainMap:
    """A degree-0 equivariant chain map between complexes."""

    __slots__ = ("x", "y", "mats")

    def __init__(self, x: GroupComplex, y: GroupComplex, mats: dict):
        if x.algebra != y.algebra:
            raise AlgebraMismatch("chain map across algebras")
        self.x, self.y = x, y
        self.mats = {}
        for g in set(x.modules) | set(mats):
            mat = mats.get(g)
            if mat is None:
                mat = QMatrix(y.dim(g), x.dim(g))
            if (mat.rows, mat.cols) != (y.dim(g), x.dim(g)):
                raise SchemaError(f"component at degree {g} has wrong shape")
            for e in range(x.algebra.order):
                if y.action(g, e) @ mat != mat @ x.action(g, e):
                    raise InvariantError("chain map is not equivariant")
            self.mats[g] = mat

    def component(self, g: int) -> QMatrix:
        mat = self.mats.get(g)
        if mat is None:
            return QMatrix(self.y.dim(g), self.x.dim(g))
        return mat

    def is_chain_map(self) -> bool:
        for g in set(self.x.modules) | set(self.y.modules):
            if self.y.diff(g) @ self.component(g) != self.component(g - 1) @ self.x.diff(g):
                return False
        return True

    @staticmethod
    def identity(x: GroupComplex) -> "GroupChainMap":
        return GroupChainMap(
            x, x, {g: QMatrix.identity(x.dim(g)) for g in x.modules}
        )


# -- tensor and hom ------------------------------------------------------------------


def _kron(a: QMatrix, b: QMatrix) -> QMatrix:
    rows, cols = a.rows * b.rows, a.cols * b.cols
    data = [[Q(0)] * cols for _ in range(rows)]
    for i in range(a.rows):
        for j in range(a.cols):
            if a.data[i][j] == 0:
                continue
            for k in range(b.rows):
                for l in range(b.cols):
                    data[i * b.rows + k][j * b.cols + l] = a.data[i][j] * b.data[k][l]
    return QMatrix(rows, cols, data)


def tensor_diagonal(x: GroupComplex, y: GroupComplex) -> GroupComplex:
    """Total complex of the tensor over Q, with the diagonal action."""
    if x.algebra != y.algebra:
        raise AlgebraMismatch("tensor across algebras")
    alg = x.algebra
    pairs = {}
    for p in x.degrees():
        for q in y.degrees():
            pairs.setdefault(p + q, []).append((p, q))
    for n in pairs:
        pairs[n].sort(reverse=True)
    offsets, dims = {}, {}
    for n, pq in pairs.items():
        off, pos = {}, 0
        for p, q in pq:
            off[(p, q)] = pos
            pos += x.dim(p) * y.dim(q)
        offsets[n], dims[n] = off, pos
    modules = {}
    for n, pq in pairs.items():
        acts = {}
        for e in range(alg.order):
            blocks = [_kron(x.action(p, e), y.action(q, e)) for p, q in pq]
            mat = [[Q(0)] * dims[n] for _ in range(dims[n])]
            pos = 0
            for b in blocks:
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[pos + i][pos + j] = b.data[i][j]
                pos += b.rows
            acts[e] = QMatrix(dims[n], dims[n], mat)
        modules[n] = (dims[n], acts)
    diffs = {}
    for n, pq in pairs.items():
        if (n - 1) not in pairs:
            continue
        rows, cols = dims[n - 1], dims[n]
        mat = [[Q(0)] * cols for _ in range(rows)]
        for p, q in pq:
            co = offsets[n][(p, q)]
            # d(x) tensor y
            if (p - 1, q) in offsets.get(n - 1, {}):
                ro = offsets[n - 1][(p - 1, q)]
                b = _kron(x.diff(p), QMatrix.identity(y.dim(q)))
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[ro + i][co + j] = b.data[i][j]
            # Koszul sign on x tensor d(y)
            if (p, q - 1) in offsets.get(n - 1, {}):
                ro = offsets[n - 1][(p, q - 1)]
                sign = Q(-1) if p % 2 else Q(1)
                b = _kron(QMatrix.identity(x.dim(p)), y.diff(q))
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[ro + i][co + j] = sign * b.data[i][j]
        diffs[n] = QMatrix(rows, cols, mat)
    return GroupComplex(alg, modules, diffs)


def internal_hom_conj(x: GroupComplex, y: GroupComplex) -> GroupComplex:
    """The hom complex with the conjugation action."""
    if x.algebra != y.algebra:
        raise AlgebraMismatch("hom across algebras")
    alg = x.algebra
    levels = {}
    for p in x.degrees():
        for n in [qy - p for qy in y.degrees()]:
            levels.setdefault(n, []).append(p)
    for n in levels:
        levels[n] = sorted(set(levels[n]))
    offsets, dims = {}, {}
    for n, ps in levels.items():
        off, pos = {}, 0
        for p in ps:
            off[p] = pos
            pos += y.dim(p + n) * x.dim(p)
        offsets[n], dims[n] = off, pos
    modules = {}
    for n, ps in levels.items():
        acts = {}
        for e in range(alg.order):
            mat = [[Q(0)] * dims[n] for _ in range(dims[n])]
            pos = 0
            for p in ps:
                # g . f = g o f o g^{-1}: on matrix coordinates this is the
                # Kronecker product of the target action with the inverse
                # transpose-free source action
                b = _kron(y.action(p + n, e), x.action(p, alg.inv(e)).transpose())
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[pos + i][pos + j] = b.data[i][j]
                pos += b.rows
            acts[e] = QMatrix(dims[n], dims[n], mat)
        modules[n] = (dims[n], acts)
    diffs = {}
    for n, ps in levels.items():
        if (n - 1) not in levels:
            continue
        rows, cols = dims[n - 1], dims[n]
        mat = [[Q(0)] * cols for _ in range(rows)]
        for p in ps:
            co = offsets[n][p]
            # post-composition with the target differential
            if p in offsets.get(n - 1, {}):
                ro = offsets[n - 1][p]
                b = _kron(y.diff(p + n), QMatrix.identity(x.dim(p)))
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[ro + i][co + j] = b.data[i][j]
            # pre-composition with the source differential, with a sign
            if (p + 1) in offsets.get(n - 1, {}):
                ro = offsets[n - 1][p + 1]
                sign = Q(-1) if n % 2 else Q(1)
                b = _kron(QMatrix.identity(y.dim(p + n)), x.diff(p + 1).transpose())
                for i in range(b.rows):
                    for j in range(b.cols):
                        mat[ro + i][co + j] = sign * b.data[i][j]
        diffs[n] = QMatrix(rows, cols, mat)
    return GroupComplex(alg, modules, diffs)


# -- homology and the projective structure ----------------------------------------------


def _homology_data(x: GroupComplex):
    """Per degree: homology dimension, representing cycles, and projection."""
    from .toral import _vspace_homology

    degs = set(x.modules)
    degs |= {g - 1 for g in degs} | {g + 1 for g in degs}
    dims = {g: x.dim(g) for g in degs}
    mats = {g: x.diff(g) for g in degs}
    return _vspace_homology(dims, mats)


def homology_W(x: GroupComplex) -> GroupComplex:
    """Levelwise homology with the induced action and zero differentials."""
    x.check_differential()
    hdims, reps, projs = _homology_data(x)
    modules = {}
    for g, h in hdims.items():
        if not h:
            continue
        acts = {}
        for e in range(x.algebra.order):
            img = x.action(g, e) @ reps[g]
            cols = [projs[g](img.col(j)) for j in range(img.cols)]
            acts[e] = QMatrix(h, h, [[cols[j][i] for j in range(h)] for i in range(h)])
        modules[g] = (h, acts)
    return GroupComplex(x.algebra, modules)


def is_weq(f: GroupChainMap) -> bool:
    """A homology isomorphism."""
    f.x.check_differential()
    f.y.check_differential()
    if not f.is_chain_map():
        return False
    hx, reps_x, _ = _homology_data(f.x)
    hy, _, projs_y = _homology_data(f.y)
    for g in set(hx) | set(hy):
        a, b = hx.get(g, 0), hy.get(g, 0)
        if a != b:
            return False
        if not a:
            continue
        img = f.component(g) @ reps_x[g]
        cols = [projs_y[g](img.col(j)) for j in range(img.cols)]
        mat = QMatrix(b, a, [[cols[j][i] for j in range(a)] for i in range(b)])
        if mat.rank() != a:
            return False
    return True


def is_fib(f: GroupChainMap) -> bool:
    """A levelwise surjection."""
    return all(f.component(g).rank() == f.y.dim(g) for g in f.y.modules)


# -- the five-factor product ---------------------------------------------------------


class ExceptionalProduct:
    """One complex per exceptional class, each over its Weyl algebra."""

    __slots__ = ("components",)

    def __init__(self, components: dict):
        if set(components) != set(EXCEPTIONAL_CLASSES):
            raise BadClass("the product needs exactly the five exceptional classes")
        for cls, comp in components.items():
            if comp.algebra != weyl_group_of(cls):
                raise WrongAlgebraForClass(
                    f"component at {cls} is over the wrong algebra"
                )
        self.components = dict(components)

    def component(self, cls: str) -> GroupComplex:
        if cls not in self.components:
            raise BadClass(f"unknown exceptional class {cls!r}")
        return self.components[cls]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())


def product_assemble(components: dict) -> ExceptionalProduct:
    return ExceptionalProduct(components)


def product_is_weq(maps: dict) -> bool:
    """Componentwise weak equivalence of a family of chain maps."""
    if set(maps) != set(EXCEPTIONAL_CLASSES):
        raise BadClass("the product needs exactly the five exceptional classes")
    return all(is_weq(f) for f in maps.values())
