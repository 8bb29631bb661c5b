"""Finite-dimensional modules over completed quiver algebras.

A module is a quiver representation: a dimension vector plus one exact matrix
per arrow.  On top of that sit Hom spaces, minimal projective covers and
resolutions, bounded projective/injective dimension, standard duality,
balanced tensor products over a middle algebra, and isomorphism testing
(invariant battery plus a seeded search for an invertible homomorphism).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .algebra import AlgebraHandle, Path, trivial_path
from .linalg import Matrix, SubspaceReducer

__all__ = [
    "BoundedDim",
    "Rep",
    "RepMap",
    "Resolution",
    "zero_rep",
    "simple",
    "projective",
    "injective",
    "standard_module",
    "regular_rep",
    "rep_direct_sum",
    "path_action",
    "validate_rep",
    "hom_basis",
    "hom_from_projective",
    "projective_cover",
    "minimal_resolution",
    "pd_bounded",
    "dual",
    "restrict_along",
    "radical_reducers",
    "top_dims",
    "radical_layer_dims",
    "socle_layer_dims",
    "is_isomorphic",
    "IsoResult",
    "split_projective_summands",
    "stable_isomorphic",
    "tensor_over",
    "TensorFunctor",
    "TensorResult",
]


@dataclass(frozen=True)
class BoundedDim:
    """A homological dimension decided up to a search bound."""

    exact: bool
    value: int
    bound: int

    @classmethod
    def Exact(cls, d: int, bound: int) -> "BoundedDim":
        return cls(True, d, bound)

    @classmethod
    def AtLeast(cls, n: int, bound: int) -> "BoundedDim":
        return cls(False, n, bound)

    @property
    def is_finite(self) -> bool:
        return self.exact

    def __str__(self):
        return f"Exact({self.value})" if self.exact else f"AtLeast({self.value})"


class ResolutionCapExceeded(RuntimeError):
    pass


class Rep:
    """A left module over a completed algebra, as a quiver representation."""

    __slots__ = ("algebra", "dims", "mats")

    def __init__(self, algebra: AlgebraHandle, dims, mats):
        self.algebra = algebra
        self.dims = list(dims)
        self.mats = list(mats)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __repr__(self):
        return f"Rep({self.algebra.name!r}, dims={self.dims})"


class RepMap:
    """A homomorphism of representations: one matrix per vertex."""

    __slots__ = ("source", "target", "mats")

    def __init__(self, source: Rep, target: Rep, mats):
        self.source = source
        self.target = target
        self.mats = list(mats)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.mats)

    def compose_after(self, other: "RepMap") -> "RepMap":
        """self o other (apply other first)."""
        return RepMap(
            other.source, self.target, [a @ b for a, b in zip(self.mats, other.mats)]
        )


def zero_rep(A: AlgebraHandle) -> Rep:
    f = A.field
    q = A.quiver
    dims = [0] * q.n_vertices
    mats = [Matrix.zero(f, 0, 0) for _ in range(q.n_arrows)]
    return Rep(A, dims, mats)


def _linear_combination(maps: list[RepMap], coeffs) -> RepMap:
    base = maps[0]
    f = base.source.algebra.field
    out = []
    for u in range(len(base.mats)):
        acc = Matrix.zero(f, base.mats[u].rows, base.mats[u].cols)
        for g, c in zip(maps, coeffs):
            if c != 0:
                acc = acc + g.mats[u].scale(c)
        out.append(acc)
    return RepMap(base.source, base.target, out)


def identity_map(M: Rep) -> RepMap:
    f = M.algebra.field
    return RepMap(M, M, [Matrix.identity(f, d) for d in M.dims])


def rep_direct_sum(reps: list[Rep]):
    """Block-diagonal sum; returns (sum, inclusion maps)."""
    A = reps[0].algebra
    f = A.field
    q = A.quiver
    dims = [sum(r.dims[u] for r in reps) for u in range(q.n_vertices)]
    offsets = []
    run = [0] * q.n_vertices
    for r in reps:
        offsets.append(list(run))
        for u in range(q.n_vertices):
            run[u] += r.dims[u]
    mats = []
    for a in range(q.n_arrows):
        src, tgt = q.a_src[a], q.a_tgt[a]
        m = Matrix.zero(f, dims[tgt], dims[src])
        for k, r in enumerate(reps):
            block = r.mats[a]
            ro, co = offsets[k][tgt], offsets[k][src]
            for i in range(block.rows):
                for j in range(block.cols):
                    m.data[ro + i][co + j] = block.data[i][j]
        mats.append(m)
    total = Rep(A, dims, mats)
    incls = []
    for k, r in enumerate(reps):
        ms = []
        for u in range(q.n_vertices):
            m = Matrix.zero(f, dims[u], r.dims[u])
            for i in range(r.dims[u]):
                m.data[offsets[k][u] + i][i] = f.one()
            ms.append(m)
        incls.append(RepMap(r, total, ms))
    return total, incls


# -- standard modules -------------------------------------------------------


@dataclass
class ProjectiveInfo:
    summands: list[int]  # vertex index of each indecomposable summand
    basis: list[list[tuple[int, Path]]]  # per vertex: ordered (summand, path)
    gen_pos: list[tuple[int, int]]  # per summand: (vertex, row within that vertex)


def _projective_sum(A: AlgebraHandle, vertices: list[int]):
    f = A.field
    q = A.quiver
    basis = [[] for _ in range(q.n_vertices)]
    for j, v in enumerate(vertices):
        for p in A.paths_from(v):
            basis[p.target].append((j, p))
    index = [
        {key: i for i, key in enumerate(basis[u])} for u in range(q.n_vertices)
    ]
    dims = [len(b) for b in basis]
    mats = []
    for a in range(q.n_arrows):
        src, tgt = q.a_src[a], q.a_tgt[a]
        arrow_path = Path(src, tgt, (a,))
        m = Matrix.zero(f, dims[tgt], dims[src])
        for col, (j, p) in enumerate(basis[src]):
            for w, c in A.mul_paths(p, arrow_path).items():
                m.data[index[tgt][(j, w)]][col] = c
        mats.append(m)
    gen_pos = [
        (v, index[v][(j, trivial_path(v))]) for j, v in enumerate(vertices)
    ]
    return Rep(A, dims, mats), ProjectiveInfo(list(vertices), basis, gen_pos)


def projective(A: AlgebraHandle, v: int):
    key = ("projective", v)
    if key not in A._extra:
        A._extra[key] = _projective_sum(A, [v])
    return A._extra[key]


def simple(A: AlgebraHandle, v: int) -> Rep:
    f = A.field
    q = A.quiver
    dims = [1 if u == v else 0 for u in range(q.n_vertices)]
    mats = [
        Matrix.zero(f, dims[q.a_tgt[a]], dims[q.a_src[a]]) for a in range(q.n_arrows)
    ]
    return Rep(A, dims, mats)


def injective(A: AlgebraHandle, v: int) -> Rep:
    """The indecomposable injective at v: dual of the opposite projective."""
    op = A.opposite()
    P, _ = projective(op, v)
    return dual(P)


def standard_module(A: AlgebraHandle, kind: str, vertex_name: str) -> Rep:
    if vertex_name not in A.quiver.v_index:
        raise KeyError(f"unknown vertex {vertex_name!r}")
    v = A.quiver.v_index[vertex_name]
    if kind == "simple":
        return simple(A, v)
    if kind == "projective":
        return projective(A, v)[0]
    if kind == "injective":
        return injective(A, v)
    raise ValueError(f"unknown standard module kind {kind!r}")


def regular_rep(A: AlgebraHandle) -> Rep:
    """A as a left module over itself (basis: normal paths, graded by target)."""
    f = A.field
    q = A.quiver
    basis = [A.paths_to(u) for u in range(q.n_vertices)]
    index = [{p: i for i, p in enumerate(b)} for b in basis]
    dims = [len(b) for b in basis]
    mats = []
    for a in range(q.n_arrows):
        src, tgt = q.a_src[a], q.a_tgt[a]
        arrow_path = Path(src, tgt, (a,))
        m = Matrix.zero(f, dims[tgt], dims[src])
        for col, p in enumerate(basis[src]):
            for w, c in A.mul_paths(p, arrow_path).items():
                m.data[index[tgt][w]][col] = c
        mats.append(m)
    return Rep(A, dims, mats)


def path_action(M: Rep, p: Path) -> Matrix:
    f = M.algebra.field
    out = Matrix.identity(f, M.dims[p.source])
    for a in p.arrows:
        out = M.mats[a] @ out
    return out


def element_action(M: Rep, elem, source: int, target: int) -> Matrix:
    f = M.algebra.field
    out = Matrix.zero(f, M.dims[target], M.dims[source])
    for p, c in elem.items():
        out = out + path_action(M, p).scale(c)
    return out


def validate_rep(M: Rep) -> list[str]:
    problems = []
    A = M.algebra
    q = A.quiver
    for a in range(q.n_arrows):
        m = M.mats[a]
        if (m.rows, m.cols) != (M.dims[q.a_tgt[a]], M.dims[q.a_src[a]]):
            problems.append(f"arrow {q.arrow_name(a)}: matrix shape mismatch")
    if problems:
        return problems
    for ri, rel in enumerate(A.presentation.relations):
        src = rel[0][0].source
        tgt = rel[0][0].target
        acc = Matrix.zero(A.field, M.dims[tgt], M.dims[src])
        for p, c in rel:
            acc = acc + path_action(M, p).scale(c)
        if not acc.is_zero():
            problems.append(f"relation {ri} does not vanish on the representation")
    return problems


# -- Hom spaces -------------------------------------------------------------


def hom_basis(M: Rep, N: Rep) -> list[RepMap]:
    """Basis of Hom(M, N), from the intertwining linear system."""
    A = M.algebra
    if N.algebra is not A:
        raise ValueError("Hom requires modules over the same algebra handle")
    f = A.field
    q = A.quiver
    offsets = []
    total = 0
    for u in range(q.n_vertices):
        offsets.append(total)
        total += N.dims[u] * M.dims[u]
    rows = []
    for a in range(q.n_arrows):
        u, w = q.a_src[a], q.a_tgt[a]
        Na, Ma = N.mats[a], M.mats[a]
        for i in range(N.dims[w]):
            for j in range(M.dims[u]):
                row = [f.zero()] * total
                for r in range(N.dims[u]):
                    c = Na.data[i][r]
                    if c != 0:
                        row[offsets[u] + r * M.dims[u] + j] = f.add(
                            row[offsets[u] + r * M.dims[u] + j], c
                        )
                for s in range(M.dims[w]):
                    c = Ma.data[s][j]
                    if c != 0:
                        idx = offsets[w] + i * M.dims[w] + s
                        row[idx] = f.sub(row[idx], c)
                if any(x != 0 for x in row):
                    rows.append(row)
    if total == 0:
        return []
    if not rows:
        sol = Matrix.identity(f, total)
    else:
        sol = Matrix.from_rows(f, rows).kernel_basis()
    out = []
    for jcol in range(sol.cols):
        mats = []
        for u in range(q.n_vertices):
            m = Matrix.zero(f, N.dims[u], M.dims[u])
            for i in range(N.dims[u]):
                for j in range(M.dims[u]):
                    m.data[i][j] = sol.data[offsets[u] + i * M.dims[u] + j][jcol]
            mats.append(m)
        out.append(RepMap(M, N, mats))
    return out


def hom_from_projective(A: AlgebraHandle, v: int, M: Rep) -> list[RepMap]:
    """Basis of Hom(P_v, M) via Hom(Ae_v, M) = e_v M; no linear solve."""
    P, info = projective(A, v)
    f = A.field
    q = A.quiver
    out = []
    for t in range(M.dims[v]):
        mats = []
        for u in range(q.n_vertices):
            m = Matrix.zero(f, M.dims[u], P.dims[u])
            for col, (_, p) in enumerate(info.basis[u]):
                col_vec = path_action(M, p).column(t)
                for i in range(M.dims[u]):
                    m.data[i][col] = col_vec[i]
            mats.append(m)
        out.append(RepMap(P, M, mats))
    return out


# -- radical, socle, covers -------------------------------------------------


def radical_reducers(M: Rep) -> list[SubspaceReducer]:
    """Per-vertex reduced bases of rad M = (rad A) M."""
    A = M.algebra
    q = A.quiver
    red = [SubspaceReducer(A.field, M.dims[u]) for u in range(q.n_vertices)]
    for a in range(q.n_arrows):
        tgt = q.a_tgt[a]
        for col in range(M.mats[a].cols):
            red[tgt].insert(M.mats[a].column(col))
    return red


def top_dims(M: Rep) -> list[int]:
    red = radical_reducers(M)
    return [M.dims[u] - red[u].rank for u in range(len(M.dims))]


def radical_layer_dims(M: Rep) -> list[tuple[int, ...]]:
    """Dimension vectors of rad^i M / rad^{i+1} M, i = 0, 1, ..."""
    A = M.algebra
    q = A.quiver
    f = A.field
    layers = []
    # current spanning vectors of rad^i M per vertex
    current = [
        [
            [f.one() if k == i else f.zero() for k in range(M.dims[u])]
            for i in range(M.dims[u])
        ]
        for u in range(q.n_vertices)
    ]
    prev_ranks = list(M.dims)
    while True:
        nxt = [SubspaceReducer(f, M.dims[u]) for u in range(q.n_vertices)]
        for a in range(q.n_arrows):
            src, tgt = q.a_src[a], q.a_tgt[a]
            for vec in current[src]:
                nxt[tgt].insert(M.mats[a].apply(vec))
        ranks = [nxt[u].rank for u in range(q.n_vertices)]
        layers.append(tuple(p - r for p, r in zip(prev_ranks, ranks)))
        if all(r == 0 for r in ranks):
            break
        current = [nxt[u].basis_rows() for u in range(q.n_vertices)]
        prev_ranks = ranks
    while layers and all(x == 0 for x in layers[-1]):
        layers.pop()
    return layers


def socle_layer_dims(M: Rep) -> list[tuple[int, ...]]:
    """Dimension vectors of soc^{i+1} M / soc^i M via the dual radical series."""
    return radical_layer_dims(dual(M))


def socle_reducers(M: Rep) -> list[SubspaceReducer]:
    """Per-vertex bases of soc M = joint kernel of all arrow actions."""
    A = M.algebra
    q = A.quiver
    f = A.field
    out = []
    for u in range(q.n_vertices):
        rows = []
        for a in q.arrows_from[u]:
            rows.extend(M.mats[a].data)
        if rows:
            ker = Matrix.from_rows(f, rows).kernel_basis()
            vecs = [ker.column(j) for j in range(ker.cols)]
        else:
            vecs = [
                [f.one() if k == i else f.zero() for k in range(M.dims[u])]
                for i in range(M.dims[u])
            ]
        out.append(SubspaceReducer(f, M.dims[u], vecs))
    return out


def sub_rep(M: Rep, vectors_per_vertex):
    """Subrepresentation spanned by the given vectors; (rep, inclusion)."""
    A = M.algebra
    f = A.field
    q = A.quiver
    bases = []
    for u in range(q.n_vertices):
        red = SubspaceReducer(f, M.dims[u], vectors_per_vertex[u])
        bases.append(Matrix.from_columns(f, red.basis_rows(), nrows=M.dims[u]))
    dims = [b.cols for b in bases]
    mats = []
    for a in range(q.n_arrows):
        src, tgt = q.a_src[a], q.a_tgt[a]
        image = M.mats[a] @ bases[src]
        coords = bases[tgt].solve(image)
        if coords is None:
            raise ValueError("span is not stable under the arrow actions")
        mats.append(coords)
    S = Rep(A, dims, mats)
    incl = RepMap(S, M, bases)
    return S, incl


def quotient_rep(M: Rep, vectors_per_vertex):
    """Quotient by the subrepresentation spanned by the vectors; (rep, projection)."""
    A = M.algebra
    f = A.field
    q = A.quiver
    reducers = [
        SubspaceReducer(f, M.dims[u], vectors_per_vertex[u])
        for u in range(q.n_vertices)
    ]
    comps = [r.complement_indices() for r in reducers]
    dims = [len(c) for c in comps]
    projs = []
    for u in range(q.n_vertices):
        m = Matrix.zero(f, dims[u], M.dims[u])
        for j in range(M.dims[u]):
            vec = [f.one() if k == j else f.zero() for k in range(M.dims[u])]
            col = reducers[u].coords_in_complement(vec)
            for i in range(dims[u]):
                m.data[i][j] = col[i]
        projs.append(m)
    mats = []
    for a in range(q.n_arrows):
        src, tgt = q.a_src[a], q.a_tgt[a]
        m = Matrix.zero(f, dims[tgt], dims[src])
        for jloc, jamb in enumerate(comps[src]):
            col = M.mats[a].column(jamb)
            red = reducers[tgt].coords_in_complement(col)
            for i in range(dims[tgt]):
                m.data[i][jloc] = red[i]
        mats.append(m)
    Q = Rep(A, dims, mats)
    return Q, RepMap(M, Q, projs)


def kernel_subrep(f_map: RepMap):
    M = f_map.source
    vecs = []
    for u in range(len(M.dims)):
        ker = f_map.mats[u].kernel_basis()
        vecs.append([ker.column(j) for j in range(ker.cols)])
    return sub_rep(M, vecs)


def projective_cover(M: Rep):
    """Minimal projective cover (P, pi, info); kernel of pi lies in rad P."""
    A = M.algebra
    q = A.quiver
    red = radical_reducers(M)
    gens = []
    for u in range(q.n_vertices):
        for idx in red[u].complement_indices():
            gens.append((u, idx))
    P, info = _projective_sum(A, [u for u, _ in gens])
    f = A.field
    mats = []
    for u in range(q.n_vertices):
        m = Matrix.zero(f, M.dims[u], P.dims[u])
        for col, (j, p) in enumerate(info.basis[u]):
            gv, gidx = gens[j]
            colvec = path_action(M, p).column(gidx)
            for i in range(M.dims[u]):
                m.data[i][col] = colvec[i]
        mats.append(m)
    pi = RepMap(P, M, mats)
    return P, pi, info


def is_projective(M: Rep) -> bool:
    if M.is_zero():
        return True
    P, pi, _ = projective_cover(M)
    if P.total_dim != M.total_dim:
        return False
    return all(m.rank() == m.rows for m in pi.mats)


@dataclass
class Resolution:
    module: Rep
    projectives: list[Rep]
    maps: list[RepMap]  # maps[0]: P0 -> M; maps[i]: P_i -> P_{i-1}
    syzygies: list[Rep]  # syzygies[i] = Omega^{i+1}(M)
    infos: list[ProjectiveInfo]
    terminated: bool

    @property
    def length(self) -> int:
        return len(self.projectives) - 1


def minimal_resolution(M: Rep, steps: int, dim_cap: int | None = None) -> Resolution:
    """Iterated minimal covers; stops early when a syzygy vanishes."""
    projs, maps, syz, infos = [], [], [], []
    current = M
    incl_prev = None
    terminated = M.is_zero()
    for _ in range(steps):
        if current.is_zero():
            terminated = True
            break
        if dim_cap is not None and current.total_dim > dim_cap:
            raise ResolutionCapExceeded(
                f"syzygy dimension {current.total_dim} exceeds cap {dim_cap}"
            )
        P, pi, info = projective_cover(current)
        d = pi if incl_prev is None else incl_prev.compose_after(pi)
        K, incl = kernel_subrep(pi)
        projs.append(P)
        maps.append(d)
        syz.append(K)
        infos.append(info)
        incl_prev = incl
        current = K
    if current.is_zero():
        terminated = True
    return Resolution(M, projs, maps, syz, infos, terminated)


def pd_bounded(M: Rep, bound: int, side: str = "projective", dim_cap: int | None = None) -> BoundedDim:
    """Projective (or, via duality, injective) dimension decided up to bound."""
    if side == "injective":
        return pd_bounded(dual(M), bound, "projective", dim_cap)
    if M.is_zero():
        return BoundedDim.Exact(0, bound)
    res = minimal_resolution(M, bound + 1, dim_cap=dim_cap)
    if res.terminated:
        return BoundedDim.Exact(len(res.projectives) - 1, bound)
    return BoundedDim.AtLeast(bound + 1, bound)


def dual(M: Rep) -> Rep:
    """Standard duality: transposed matrices over the opposite algebra."""
    op = M.algebra.opposite()
    return Rep(op, list(M.dims), [m.transpose() for m in M.mats])


def restrict_along(Mq: Rep, vertex_map, arrow_map, A: AlgebraHandle) -> Rep:
    """Restrict a module over a quotient algebra back along A -> A/J."""
    f = A.field
    q = A.quiver
    dims = [Mq.dims[vertex_map[u]] if vertex_map[u] is not None else 0 for u in range(q.n_vertices)]
    mats = []
    for a in range(q.n_arrows):
        qa = arrow_map[a]
        if qa is None:
            mats.append(Matrix.zero(f, dims[q.a_tgt[a]], dims[q.a_src[a]]))
        else:
            mats.append(Mq.mats[qa].copy())
    return Rep(A, dims, mats)


# -- isomorphism testing ----------------------------------------------------


@dataclass
class IsoResult:
    kind: str  # 'yes' | 'no' | 'inconclusive'
    witness: RepMap | None = None
    invariant: str | None = None

    def __bool__(self):
        return self.kind == "yes"


def _invariant_battery(M: Rep):
    soc = socle_reducers(M)
    return [
        ("dimension vector", tuple(M.dims)),
        ("radical layer dimensions", tuple(radical_layer_dims(M))),
        ("socle layer dimensions", tuple(socle_layer_dims(M))),
        ("dim Hom(S_v, -)", tuple(r.rank for r in soc)),
        ("dim Hom(-, S_v)", tuple(top_dims(M))),
    ]


def _invertible(fmap: RepMap) -> bool:
    for m in fmap.mats:
        if m.rows != m.cols:
            return False
        if m.rows and m.rank() != m.rows:
            return False
    return True


def is_isomorphic(M: Rep, N: Rep, rng: random.Random | None = None, tries: int = 20) -> IsoResult:
    """Exact-witness isomorphism test.

    Positive answers carry an exactly verified invertible homomorphism; a
    negative answer names the separating invariant; otherwise the randomized
    search gives up (Inconclusive) and says nothing.
    """
    if M.algebra is not N.algebra:
        raise ValueError("modules live over different algebra handles")
    rng = rng or random.Random(0)
    invM, invN = _invariant_battery(M), _invariant_battery(N)
    for (name, a), (_, b) in zip(invM, invN):
        if a != b:
            return IsoResult("no", invariant=name)
    endM = len(hom_basis(M, M))
    endN = len(hom_basis(N, N))
    if endM != endN:
        return IsoResult("no", invariant="dim End")
    if M.total_dim == 0:
        return IsoResult("yes", witness=identity_map(M))
    homs = hom_basis(M, N)
    d = len(homs)
    if d == 0:
        # equal dimensions but no homomorphisms at all: rigorous rejection
        return IsoResult("no", invariant="Hom space is zero")
    if d == 1:
        # every candidate is a scalar multiple of the single basis map
        if _invertible(homs[0]):
            return IsoResult("yes", witness=homs[0])
        return IsoResult("no", invariant="one-dimensional Hom space has no invertible element")
    f = M.algebra.field
    p = f.p
    if p is not None and p**d <= 2**20:
        for combo in itertools.product(range(p), repeat=d):
            if all(c == 0 for c in combo):
                continue
            cand = _linear_combination(homs, [f.from_int(c) for c in combo])
            if _invertible(cand):
                return IsoResult("yes", witness=cand)
        # the search space was exhausted: no combination is invertible
        return IsoResult("no", invariant="exhausted Hom space")
    for attempt in range(tries):
        if p is None:
            B = 1 + attempt // 4
            coeffs = [f.from_int(rng.randint(-B, B)) for _ in range(d)]
        else:
            coeffs = [f.from_int(rng.randrange(p)) for _ in range(d)]
        if all(c == 0 for c in coeffs):
            continue
        cand = _linear_combination(homs, coeffs)
        if _invertible(cand):
            return IsoResult("yes", witness=cand)
    return IsoResult("inconclusive")


def split_projective_summands(M: Rep):
    """Strip projective direct summands; returns (core, stripped vertex names).

    A summand P_v splits off as soon as some pair f: P_v -> M, g: M -> P_v
    composes to a unit of the local ring End(P_v); the composition pairing is
    checked over all basis pairs of the two Hom spaces.
    """
    A = M.algebra
    q = A.quiver
    f = A.field
    stripped: list[str] = []
    current = M
    while True:
        split_done = False
        for v in range(q.n_vertices):
            if current.dims[v] == 0:
                continue
            homs_pm = hom_from_projective(A, v, current)
            if not homs_pm:
                continue
            homs_mp = hom_basis(current, projective(A, v)[0])
            found = None
            for fm in homs_pm:
                for gm in homs_mp:
                    h = gm.compose_after(fm)
                    lam = h.mats[v].data[0][0] if h.mats[v].rows else f.zero()
                    # row/col 0 is the trivial-path coordinate of P_v at v
                    if lam != 0:
                        found = (fm, gm)
                        break
                if found:
                    break
            if not found:
                continue
            fm, gm = found
            h = gm.compose_after(fm)
            hinv = []
            ok = True
            for u in range(q.n_vertices):
                hu = h.mats[u]
                if hu.rows == 0:
                    hinv.append(hu)
                    continue
                inv = hu.solve(Matrix.identity(f, hu.rows))
                if inv is None:
                    ok = False
                    break
                hinv.append(inv)
            if not ok:
                continue
            hinv_map = RepMap(projective(A, v)[0], projective(A, v)[0], hinv)
            pi = fm.compose_after(hinv_map.compose_after(gm))
            core, _ = kernel_subrep(pi)
            stripped.append(q.vertices[v])
            current = core
            split_done = True
            break
        if not split_done:
            return current, stripped


def stable_isomorphic(M: Rep, N: Rep, rng: random.Random | None = None) -> IsoResult:
    """Isomorphism in the projectively stable category."""
    coreM, _ = split_projective_summands(M)
    coreN, _ = split_projective_summands(N)
    return is_isomorphic(coreM, coreN, rng)


# -- balanced tensor products -----------------------------------------------


@dataclass
class _Side:
    middle: AlgebraHandle
    outer: AlgebraHandle | None
    groups: list[list[tuple[int, int]]]  # per middle vertex: (rep vertex, local index)
    outer_tag: list[list[int]]  # per middle vertex: outer vertex of each entry (or 0)


def _analyze_side(rep: Rep, side: str) -> _Side:
    alg = rep.algebra
    prod = alg.product
    if prod is not None:
        if side == "right":
            middle, outer = prod.right, prod.left
            def key(u, w):
                return (w, u)
        else:
            middle, outer = prod.left, prod.right
            def key(u, w):
                return (u, w)
        groups = [[] for _ in range(middle.quiver.n_vertices)]
        tags = [[] for _ in range(middle.quiver.n_vertices)]
        for pi, (u, w) in enumerate(prod.vertex_pairs):
            mid_v, out_v = key(u, w)
            for i in range(rep.dims[pi]):
                groups[mid_v].append((pi, i))
                tags[mid_v].append(out_v)
        return _Side(middle, outer, groups, tags)
    if side == "right":
        middle = alg._opposite
        if middle is None:
            raise ValueError(
                "a right module must be a Rep over an opposite handle or a product"
            )
    else:
        middle = alg
    groups = [[] for _ in range(middle.quiver.n_vertices)]
    tags = [[] for _ in range(middle.quiver.n_vertices)]
    for v in range(middle.quiver.n_vertices):
        for i in range(rep.dims[v]):
            groups[v].append((v, i))
            tags[v].append(0)
    return _Side(middle, None, groups, tags)


def _middle_action(rep: Rep, side_info: _Side, side: str, arrow: int) -> Matrix:
    """Assembled action of the middle arrow on the grouped coordinates.

    right side: X^{(t(c))} -> X^{(s(c))}; left side: Y^{(s(c))} -> Y^{(t(c))}.
    """
    mid = side_info.middle
    f = rep.algebra.field
    prod = rep.algebra.product
    s, t = mid.quiver.a_src[arrow], mid.quiver.a_tgt[arrow]
    src_grp, tgt_grp = (t, s) if side == "right" else (s, t)
    gsrc, gtgt = side_info.groups[src_grp], side_info.groups[tgt_grp]
    pos_tgt = {key: i for i, key in enumerate(gtgt)}
    m = Matrix.zero(f, len(gtgt), len(gsrc))
    if prod is None:
        amat = rep.mats[arrow]
        for col, (v, i) in enumerate(gsrc):
            for r in range(amat.rows):
                c = amat.data[r][i]
                if c != 0:
                    m.data[pos_tgt[(tgt_grp, r)]][col] = c
        return m
    for col, (pi, i) in enumerate(gsrc):
        u, w = prod.vertex_pairs[pi]
        if side == "right":
            pa = prod.right_arrow[(u, arrow)]
        else:
            pa = prod.left_arrow[(arrow, w)]
        amat = rep.mats[pa]
        tgt_pi = (
            prod.pair_index[(u, mid.quiver.a_src[arrow])]
            if side == "right"
            else prod.pair_index[(mid.quiver.a_tgt[arrow], w)]
        )
        for r in range(amat.rows):
            c = amat.data[r][i]
            if c != 0:
                m.data[pos_tgt[(tgt_pi, r)]][col] = c
    return m


@dataclass
class TensorSpace:
    coords: list[tuple[int, int, int]]  # (middle vertex, x entry, y entry)
    index: dict
    reducer: SubspaceReducer
    complement: list[int]
    dim: int
    x_side: _Side
    y_side: _Side


@dataclass
class TensorResult:
    dim: int
    rep: Rep | None


class TensorFunctor:
    """X (x)_C - for a fixed right C-module X (plain or with a left structure)."""

    def __init__(self, X: Rep):
        self.X = X
        self.x_side = _analyze_side(X, "right")
        self.middle = self.x_side.middle
        self.f = X.algebra.field
        self._right_actions = {
            a: _middle_action(X, self.x_side, "right", a)
            for a in range(self.middle.quiver.n_arrows)
        }

    def space(self, Y: Rep) -> TensorSpace:
        y_side = _analyze_side(Y, "left")
        if y_side.middle is not self.middle:
            raise ValueError("middle algebras do not match")
        f = self.f
        coords = []
        for w in range(self.middle.quiver.n_vertices):
            for ix in range(len(self.x_side.groups[w])):
                for jy in range(len(y_side.groups[w])):
                    coords.append((w, ix, jy))
        index = {c: i for i, c in enumerate(coords)}
        n = len(coords)
        reducer = SubspaceReducer(f, n)
        for a in range(self.middle.quiver.n_arrows):
            s, t = self.middle.quiver.a_src[a], self.middle.quiver.a_tgt[a]
            Rc = self._right_actions[a]  # X^{(t)} -> X^{(s)}
            Lc = _middle_action(Y, y_side, "left", a)  # Y^{(s)} -> Y^{(t)}
            for ix in range(len(self.x_side.groups[t])):
                for jy in range(len(y_side.groups[s])):
                    vec = [f.zero()] * n
                    any_entry = False
                    for k in range(Rc.rows):
                        c = Rc.data[k][ix]
                        if c != 0:
                            vec[index[(s, k, jy)]] = f.add(vec[index[(s, k, jy)]], c)
                            any_entry = True
                    for l in range(Lc.rows):
                        c = Lc.data[l][jy]
                        if c != 0:
                            vec[index[(t, ix, l)]] = f.sub(vec[index[(t, ix, l)]], c)
                            any_entry = True
                    if any_entry:
                        reducer.insert(vec)
        comp = reducer.complement_indices()
        return TensorSpace(coords, index, reducer, comp, len(comp), self.x_side, y_side)

    def map(self, space_src: TensorSpace, space_tgt: TensorSpace, g: RepMap) -> Matrix:
        """Induced matrix of id (x) g between the two quotient spaces."""
        f = self.f
        out_cols = []
        y_src = space_src.y_side
        for amb in space_src.complement:
            w, ix, jy = space_src.coords[amb]
            yv, yi = y_src.groups[w][jy]
            vec = [f.zero()] * len(space_tgt.coords)
            gm = g.mats[yv]
            y_tgt_group = space_tgt.y_side.groups
            # g preserves the vertex of Y, hence the middle group
            pos = {
                key: l for l, key in enumerate(y_tgt_group[w])
            }
            for r in range(gm.rows):
                c = gm.data[r][yi]
                if c != 0:
                    l = pos[(yv, r)]
                    vec[space_tgt.index[(w, ix, l)]] = c
            out_cols.append(space_tgt.reducer.coords_in_complement(vec))
        return Matrix.from_columns(f, out_cols, nrows=space_tgt.dim)

    def quotient_rep(self, Y: Rep, env: AlgebraHandle | None) -> TensorResult:
        """The tensor product with its residual outer structure.

        With outer structures on both sides the result is a Rep over env
        (which must be left (x) right^op); with only a left outer structure
        it is a Rep over that algebra; otherwise only the dimension remains.
        """
        space = self.space(Y)
        y_side = space.y_side
        left_out = self.x_side.outer
        right_out = y_side.outer
        f = self.f
        if left_out is None and right_out is None:
            return TensorResult(space.dim, None)
        if left_out is not None and right_out is not None:
            if env is None or env.product is None:
                raise ValueError("a completed product algebra is required for a bimodule result")
            if env.product.left is not left_out or env.product.right is not right_out:
                raise ValueError("env does not match the outer algebras")
            n_out = env.quiver.n_vertices

            def out_tag(w, ix, jy):
                return env.product.pair_index[
                    (self.x_side.outer_tag[w][ix], y_side.outer_tag[w][jy])
                ]

        elif left_out is not None:
            env = left_out
            n_out = env.quiver.n_vertices

            def out_tag(w, ix, jy):
                return self.x_side.outer_tag[w][ix]

        else:
            raise NotImplementedError("right-only outer structure is not needed here")
        comp_of = [out_tag(*space.coords[amb]) for amb in space.complement]
        order = sorted(range(len(space.complement)), key=lambda i: (comp_of[i], i))
        dims = [0] * n_out
        local = {}
        for i in order:
            v = comp_of[i]
            local[i] = (v, dims[v])
            dims[v] += 1
        # ambient action of each env arrow, reduced to complement coordinates
        namb = len(space.coords)
        mats = []
        for pa in range(env.quiver.n_arrows):
            src_v = env.quiver.a_src[pa]
            tgt_v = env.quiver.a_tgt[pa]
            m = Matrix.zero(f, dims[tgt_v], dims[src_v])
            for i in order:
                if comp_of[i] != src_v:
                    continue
                amb = space.complement[i]
                w, ix, jy = space.coords[amb]
                vec = [f.zero()] * namb
                self._ambient_arrow_image(space, Y, env, pa, w, ix, jy, vec)
                red = space.reducer.reduce(vec)
                colv = [f.zero()] * dims[tgt_v]
                for k, amb2 in enumerate(space.complement):
                    c = red[amb2]
                    if c != 0:
                        v2, loc2 = local[k]
                        if v2 != tgt_v:
                            raise AssertionError("tensor grading violated")
                        colv[loc2] = c
                _, src_loc = local[i]
                for r in range(dims[tgt_v]):
                    m.data[r][src_loc] = colv[r]
            mats.append(m)
        rep = Rep(env, dims, mats)
        return TensorResult(sum(dims), rep)

    def _ambient_arrow_image(self, space, Y, env, pa, w, ix, jy, vec):
        """Image of ambient basis vector (w, ix, jy) under an outer arrow."""
        x_side, y_side = self.x_side, space.y_side
        if (
            env.product is not None
            and x_side.outer is not None
            and y_side.outer is not None
        ):
            kind, a1, a2 = env.product.arrow_kind[pa]
            if kind == "L":
                self._left_image(space, a1, w, ix, jy, vec)
            else:
                self._right_image(space, Y, a2, w, ix, jy, vec)
        elif x_side.outer is not None:
            self._left_image(space, pa, w, ix, jy, vec)
        else:
            raise AssertionError("unexpected outer structure")

    def _left_image(self, space, b_arrow, w, ix, jy, vec):
        # left outer action on the X part, inside group w
        X = self.X
        x_side = self.x_side
        xv, xi = x_side.groups[w][ix]
        prod = X.algebra.product
        if prod is None:
            raise AssertionError("left outer structure without a product algebra")
        u, wmid = prod.vertex_pairs[xv]
        pa = prod.left_arrow[(b_arrow, wmid)]
        amat = X.mats[pa]
        tgt_pair = prod.pair_index[(prod.left.quiver.a_tgt[b_arrow], wmid)]
        pos = {key: i for i, key in enumerate(x_side.groups[w])}
        for r in range(amat.rows):
            c = amat.data[r][xi]
            if c != 0:
                vec[space.index[(w, pos[(tgt_pair, r)], jy)]] = c

    def _right_image(self, space, Y, a_arrow, w, ix, jy, vec):
        # right outer action on the Y part, inside group w
        y_side = space.y_side
        yv, yi = y_side.groups[w][jy]
        prod = Y.algebra.product
        if prod is None:
            raise AssertionError("right outer structure without a product algebra")
        wmid, _ = prod.vertex_pairs[yv]
        pa = prod.right_arrow[(wmid, a_arrow)]
        amat = Y.mats[pa]
        tgt_pair = prod.pair_index[(wmid, prod.right.quiver.a_src[a_arrow])]
        pos = {key: i for i, key in enumerate(y_side.groups[w])}
        for r in range(amat.rows):
            c = amat.data[r][yi]
            if c != 0:
                vec[space.index[(w, ix, pos[(tgt_pair, r)])]] = c


def tensor_over(X: Rep, Y: Rep, env: AlgebraHandle | None = None) -> TensorResult:
    """Balanced tensor product X (x)_C Y over the shared middle algebra."""
    return TensorFunctor(X).quotient_rep(Y, env)


# -- bimodule carriers ------------------------------------------------------


def regular_bimodule(A: AlgebraHandle) -> Rep:
    """A as a module over its enveloping algebra A (x) A^op.

    The component at the product vertex (u, w) is spanned by the normal paths
    w -> u; the left factor acts by postcomposition, the right by
    precomposition.
    """
    env = A.enveloping()
    prod = env.product
    f = A.field
    q = A.quiver
    basis = [A.paths_between(w, u) for (u, w) in prod.vertex_pairs]
    index = [{p: i for i, p in enumerate(b)} for b in basis]
    dims = [len(b) for b in basis]
    mats = []
    for pa, kind in enumerate(prod.arrow_kind):
        src = env.quiver.a_src[pa]
        tgt = env.quiver.a_tgt[pa]
        m = Matrix.zero(f, dims[tgt], dims[src])
        if kind[0] == "L":
            _, a, w = kind
            arrow_path = Path(q.a_src[a], q.a_tgt[a], (a,))
            for col, p in enumerate(basis[src]):
                for w2, c in A.mul_paths(p, arrow_path).items():
                    m.data[index[tgt][w2]][col] = c
        else:
            _, v, b = kind
            arrow_path = Path(q.a_src[b], q.a_tgt[b], (b,))
            for col, p in enumerate(basis[src]):
                for w2, c in A.mul_paths(arrow_path, p).items():
                    m.data[index[tgt][w2]][col] = c
        mats.append(m)
    return Rep(env, dims, mats)


def regular_bimodule_coords(A: AlgebraHandle, elem) -> list[list]:
    """Coordinates of an algebra element inside the regular bimodule."""
    env = A.enveloping()
    prod = env.product
    basis = [A.paths_between(w, u) for (u, w) in prod.vertex_pairs]
    vecs = [[A.field.zero()] * len(b) for b in basis]
    for p, c in elem.items():
        pi = prod.pair_index[(p.target, p.source)]
        vecs[pi][basis[pi].index(p)] = c
    return vecs


def stable_span(M: Rep, vectors_per_vertex):
    """Close the given per-vertex vectors under all arrow actions."""
    A = M.algebra
    q = A.quiver
    f = A.field
    reducers = [
        SubspaceReducer(f, M.dims[u], vectors_per_vertex[u]) for u in range(q.n_vertices)
    ]
    queue = []
    for u in range(q.n_vertices):
        queue.extend((u, row) for row in reducers[u].basis_rows())
    while queue:
        u, vec = queue.pop()
        for a in q.arrows_from[u]:
            img = M.mats[a].apply(vec)
            if reducers[q.a_tgt[a]].insert(img):
                queue.append((q.a_tgt[a], list(img)))
    return [r.basis_rows() for r in reducers]
