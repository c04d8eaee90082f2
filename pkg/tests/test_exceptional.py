import random

import pytest

from so3alg.errors import (
    AlgebraMismatch,
    BadClass,
    InvariantError,
    NotADifferential,
    WrongAlgebraForClass,
)
from so3alg.exceptional import (
    EXCEPTIONAL_CLASSES,
    ExceptionalProduct,
    FiniteGroupAlg,
    GroupChainMap,
    GroupComplex,
    homology_W,
    internal_hom_conj,
    is_fib,
    is_weq,
    order_two_group,
    product_assemble,
    product_is_weq,
    tensor_diagonal,
    trivial_group,
    unit_complex,
    weyl_group_of,
    zero_complex,
)
from so3alg.linalg import Q, QMatrix


def regular_rep(alg):
    acts = {}
    for e in range(alg.order):
        m = QMatrix(alg.order, alg.order)
        for b in range(alg.order):
            m.data[alg.mult(e, b)][b] = Q(1)
        acts[e] = m
    return (alg.order, acts)


def right_translation(alg, a):
    m = QMatrix(alg.order, alg.order)
    for b in range(alg.order):
        m.data[alg.mult(b, a)][b] = Q(1)
    return m


def random_equivariant(alg, rng):
    """A random combination of right translations; always equivariant for
    the regular representation."""
    m = QMatrix(alg.order, alg.order)
    for a in range(alg.order):
        c = Q(rng.randint(-2, 2))
        if c:
            m = m + right_translation(alg, a).scale(c)
    return m


def small_rep(alg):
    """A faithful representation of minimal dimension, extended from
    matrices on a generating pair by multiplying out words."""
    if alg.order == 1:
        return (1, {0: QMatrix.identity(1)})
    if alg.order == 2:
        return (1, {0: QMatrix.identity(1), 1: QMatrix(1, 1, [[Q(-1)]])})
    r = next(a for a in range(alg.order) if alg.element_order(a) == 3)
    s = next(a for a in range(alg.order) if alg.element_order(a) == 2)
    gen_mats = {
        r: QMatrix(2, 2, [[Q(0), Q(-1)], [Q(1), Q(-1)]]),
        s: QMatrix(2, 2, [[Q(0), Q(1)], [Q(1), Q(0)]]),
    }
    mats = {alg.identity: QMatrix.identity(2)}
    frontier = [alg.identity]
    while frontier:
        x = frontier.pop()
        for g, mg in gen_mats.items():
            y = alg.mult(g, x)
            if y not in mats:
                mats[y] = mg @ mats[x]
                frontier.append(y)
    return (2, mats)


def small_two_step(alg, rng):
    dim, mats = small_rep(alg)
    d = QMatrix.identity(dim).scale(Q(rng.randint(-2, 2)))
    return GroupComplex(alg, {0: (dim, mats), 1: (dim, mats)}, {1: d})


def small_three_step(alg):
    dim, mats = small_rep(alg)
    mods = {g: (dim, mats) for g in (0, 1, 2)}
    return GroupComplex(alg, mods, {1: QMatrix.identity(dim)})


def two_step_complex(alg, rng):
    return GroupComplex(
        alg,
        {0: regular_rep(alg), 1: regular_rep(alg)},
        {1: random_equivariant(alg, rng)},
    )


def norm_complex(alg):
    """Degrees 0..2 with d1 the norm and d2 = 1 - a translation."""
    n = alg.order
    norm = QMatrix(n, n)
    for a in range(n):
        norm = norm + right_translation(alg, a)
    d2 = QMatrix.identity(n) - right_translation(alg, (1 if n > 1 else 0))
    return GroupComplex(
        alg,
        {0: regular_rep(alg), 1: regular_rep(alg), 2: regular_rep(alg)},
        {1: norm, 2: d2},
    )


def homology_dims_oracle(x):
    out = {}
    degs = set(x.modules)
    for g in degs:
        n = x.dim(g)
        nullity = n - x.diff(g).rank()
        out[g] = nullity - x.diff(g + 1).rank()
    return {g: d for g, d in out.items() if d}


# -- group structure ------------------------------------------------------------


def test_weyl_orders():
    assert [weyl_group_of(c).order for c in EXCEPTIONAL_CLASSES] == [1, 1, 2, 1, 6]


def test_weyl_of_unknown_class():
    with pytest.raises(BadClass):
        weyl_group_of("C7")


def test_order_six_weyl_group_structure():
    w = weyl_group_of("D4")
    orders = sorted(w.element_order(a) for a in range(w.order))
    assert orders == [1, 2, 2, 2, 3, 3]
    # nonabelian
    assert any(
        w.mult(a, b) != w.mult(b, a) for a in range(6) for b in range(6)
    )


def test_bad_multiplication_tables_rejected():
    with pytest.raises(InvariantError):
        FiniteGroupAlg([[0, 1], [1, 1]])  # no inverse for 1
    with pytest.raises(InvariantError):
        FiniteGroupAlg([[1, 0], [0, 1]], identity=0)  # identity fails


# -- complexes and validation ----------------------------------------------------


def test_non_representation_rejected():
    alg = order_two_group()
    bad = {0: QMatrix.identity(2), 1: QMatrix(2, 2, [[Q(1), Q(1)], [Q(0), Q(1)]])}
    with pytest.raises(InvariantError):
        GroupComplex(alg, {0: (2, bad)})


def test_non_equivariant_differential_rejected():
    alg = order_two_group()
    swap = QMatrix(2, 2, [[Q(0), Q(1)], [Q(1), Q(0)]])
    mods = {
        0: (2, {0: QMatrix.identity(2), 1: swap}),
        1: (2, {0: QMatrix.identity(2), 1: QMatrix.identity(2)}),
    }
    bad = QMatrix(2, 2, [[Q(1), Q(0)], [Q(0), Q(0)]])
    with pytest.raises(InvariantError):
        GroupComplex(alg, mods, {1: bad})


def test_d_squared_checked():
    alg = trivial_group()
    one = {0: QMatrix.identity(1)}
    x = GroupComplex(
        alg,
        {g: (1, one) for g in (0, 1, 2)},
        {1: QMatrix.identity(1), 2: QMatrix.identity(1)},
    )
    with pytest.raises(NotADifferential):
        x.check_differential()
    with pytest.raises(NotADifferential):
        homology_W(x)


# -- tensor -----------------------------------------------------------------------


def test_unit_laws():
    rng = random.Random(1)
    for cls in EXCEPTIONAL_CLASSES:
        alg = weyl_group_of(cls)
        x = two_step_complex(alg, rng)
        u = unit_complex(alg)
        assert tensor_diagonal(u, x) == x
        assert tensor_diagonal(x, u).modules == x.modules


def test_tensor_across_algebras_rejected():
    with pytest.raises(AlgebraMismatch):
        tensor_diagonal(unit_complex(trivial_group()), unit_complex(order_two_group()))
    with pytest.raises(AlgebraMismatch):
        internal_hom_conj(unit_complex(trivial_group()), unit_complex(order_two_group()))


def test_tensor_symmetric_dims_and_koszul():
    rng = random.Random(2)
    for cls in ("A4", "D4"):
        alg = weyl_group_of(cls)
        x = two_step_complex(alg, rng)
        y = norm_complex(alg)
        t = tensor_diagonal(x, y)
        s = tensor_diagonal(y, x)
        t.check_differential()
        s.check_differential()
        assert {g: t.dim(g) for g in t.degrees()} == {g: s.dim(g) for g in s.degrees()}
        assert homology_dims_oracle(t) == homology_dims_oracle(s)


def test_kunneth_over_q():
    rng = random.Random(3)
    for trial in range(50):
        alg = weyl_group_of(rng.choice(EXCEPTIONAL_CLASSES))
        x = two_step_complex(alg, rng)
        y = two_step_complex(alg, rng)
        hx = homology_dims_oracle(x)
        hy = homology_dims_oracle(y)
        want = {}
        for p, a in hx.items():
            for q, b in hy.items():
                want[p + q] = want.get(p + q, 0) + a * b
        got = homology_dims_oracle(tensor_diagonal(x, y))
        assert got == {g: d for g, d in want.items() if d}


# -- internal hom -----------------------------------------------------------------


def equivariant_map_dim(x, y, g):
    """Dimension of equivariant degree-preserving maps shifted by g."""
    alg = x.algebra
    total = 0
    for p in x.degrees():
        m, n = y.dim(p + g), x.dim(p)
        if not (m and n):
            continue
        rows = []
        for e in range(alg.order):
            a, b = y.action(p + g, e), x.action(p, e)
            # a F = F b as linear conditions on the mn entries of F
            for i in range(m):
                for j in range(n):
                    row = [Q(0)] * (m * n)
                    for k in range(m):
                        row[k * n + j] += a.data[i][k]
                    for l in range(n):
                        row[i * n + l] -= b.data[l][j]
                    rows.append(row)
        mat = QMatrix(len(rows), m * n, rows)
        total += m * n - mat.rank()
    return total


def test_hom_fixed_points_are_equivariant_maps():
    rng = random.Random(4)
    for cls in ("SO3", "A4", "D4"):
        alg = weyl_group_of(cls)
        x = two_step_complex(alg, rng)
        y = norm_complex(alg)
        h = internal_hom_conj(x, y)
        for g in h.degrees():
            n = h.dim(g)
            avg = QMatrix(n, n)
            for e in range(alg.order):
                avg = avg + h.action(g, e)
            assert avg.rank() == equivariant_map_dim(x, y, g)


def test_hom_differential_squares_to_zero():
    rng = random.Random(5)
    alg = weyl_group_of("D4")
    x = norm_complex(alg)
    y = two_step_complex(alg, rng)
    for a, b in ((x, x), (x, y), (y, x)):
        h = internal_hom_conj(a, b)
        h.check_differential()


def test_hom_tensor_adjunction_dims():
    rng = random.Random(6)
    for cls in EXCEPTIONAL_CLASSES:
        alg = weyl_group_of(cls)
        x = small_two_step(alg, rng)
        y = small_two_step(alg, rng)
        z = small_three_step(alg)
        lhs = internal_hom_conj(tensor_diagonal(x, y), z)
        rhs = internal_hom_conj(x, internal_hom_conj(y, z))
        assert {g: lhs.dim(g) for g in lhs.degrees()} == {
            g: rhs.dim(g) for g in rhs.degrees()
        }
        assert homology_dims_oracle(lhs) == homology_dims_oracle(rhs)


# -- homology and the projective structure ------------------------------------------


def test_homology_matches_oracle():
    rng = random.Random(7)
    for trial in range(30):
        alg = weyl_group_of(rng.choice(EXCEPTIONAL_CLASSES))
        x = two_step_complex(alg, rng)
        h = homology_W(x)
        assert {g: h.dim(g) for g in h.degrees()} == homology_dims_oracle(x)
        # the induced action is still a representation (checked on build)
        hh = homology_W(norm_complex(alg))
        assert {g: hh.dim(g) for g in hh.degrees()} == homology_dims_oracle(
            norm_complex(alg)
        )


def test_homology_of_zero_differential_is_the_complex():
    alg = weyl_group_of("A4")
    x = GroupComplex(alg, {0: regular_rep(alg), 3: regular_rep(alg)})
    assert homology_W(x) == x


def test_identity_is_weq_and_fib():
    alg = weyl_group_of("D4")
    x = norm_complex(alg)
    f = GroupChainMap.identity(x)
    assert is_weq(f)
    assert is_fib(f)


def test_zero_map_to_nontrivial_target_is_neither():
    alg = order_two_group()
    x = zero_complex(alg)
    y = unit_complex(alg)
    f = GroupChainMap(x, y, {})
    assert not is_weq(f)
    assert not is_fib(f)


def test_projection_off_acyclic_summand_is_weq_and_fib():
    alg = order_two_group()
    u = unit_complex(alg)
    # u (+) (acyclic disk) -> u
    two = QMatrix.identity(2)
    mods = {
        0: (2, {0: two, 1: two}),
        1: (1, {0: QMatrix.identity(1), 1: QMatrix.identity(1)}),
    }
    d = QMatrix(2, 1, [[Q(0)], [Q(1)]])
    x = GroupComplex(alg, mods, {1: d})
    proj = GroupChainMap(x, u, {0: QMatrix(1, 2, [[Q(1), Q(0)]])})
    assert proj.is_chain_map()
    assert is_weq(proj)
    assert is_fib(proj)
    # the inclusion the other way is a weak equivalence but not a fibration
    inc = GroupChainMap(u, x, {0: QMatrix(2, 1, [[Q(1)], [Q(0)]])})
    assert is_weq(inc)
    assert not is_fib(inc)


# -- the five-factor product --------------------------------------------------------


def test_product_assembly_and_errors():
    comps = {c: unit_complex(weyl_group_of(c)) for c in EXCEPTIONAL_CLASSES}
    p = product_assemble(comps)
    assert not p.is_zero()
    assert p.component("D4").algebra.order == 6
    with pytest.raises(BadClass):
        p.component("C3")
    with pytest.raises(BadClass):
        product_assemble({"SO3": unit_complex(trivial_group())})
    bad = dict(comps)
    bad["D4"] = unit_complex(trivial_group())
    with pytest.raises(WrongAlgebraForClass):
        product_assemble(bad)


def test_product_weq_is_componentwise():
    comps = {c: unit_complex(weyl_group_of(c)) for c in EXCEPTIONAL_CLASSES}
    maps = {c: GroupChainMap.identity(m) for c, m in comps.items()}
    assert product_is_weq(maps)
    maps["A4"] = GroupChainMap(
        zero_complex(order_two_group()), unit_complex(order_two_group()), {}
    )
    assert not product_is_weq(maps)
