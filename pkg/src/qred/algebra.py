"""Presented quiver algebras A = kQ/I and their completions.

A presentation is completed into a confluent rewriting system on paths
(a reduced noncommutative Groebner basis for the length-lex order on arrow
words), which yields the normal-path basis, exact multiplication, and the
derived constructions: opposite algebra, tensor with an opposite (enveloping
algebras and bimodule carriers), corner bases and Loewy length.

Paths are stored in application order: ``Path(arrows=(a, b))`` applies ``a``
first.  The written concatenation convention (right-to-left by default) is a
front-end concern handled by the parser and printers only.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .linalg import FieldSpec, SubspaceReducer

__all__ = [
    "Quiver",
    "Path",
    "Presentation",
    "Diagnostic",
    "InvalidPresentation",
    "DimensionNotResolved",
    "AlgebraHandle",
    "ProductStructure",
    "CornerStructure",
    "validate",
    "complete",
    "opposite_presentation",
    "tensor_with_opposite",
    "corner_basis",
]


class Path(NamedTuple):
    source: int
    target: int
    arrows: tuple[int, ...]


def trivial_path(v: int) -> Path:
    return Path(v, v, ())


def word_key(p: Path):
    # length-lex on application-order arrow indices; source disambiguates
    # parallel trivial paths in global sorts
    return (len(p.arrows), p.arrows, p.source)


def compose(p: Path, q: Path) -> Optional[Path]:
    """The path 'p then q', or None when the endpoints do not match."""
    if p.target != q.source:
        return None
    return Path(p.source, q.target, p.arrows + q.arrows)


class Quiver:
    """A finite directed graph with named vertices and arrows."""

    def __init__(self, vertices, arrows):
        self.vertices = list(vertices)
        self.arrows = [tuple(a) for a in arrows]  # (name, source, target)
        self.v_index = {v: i for i, v in enumerate(self.vertices)}
        self.a_index = {a[0]: i for i, a in enumerate(self.arrows)}
        self.a_src = [self.v_index.get(a[1], -1) for a in self.arrows]
        self.a_tgt = [self.v_index.get(a[2], -1) for a in self.arrows]
        self.arrows_from = [[] for _ in self.vertices]
        self.arrows_to = [[] for _ in self.vertices]
        for i, (s, t) in enumerate(zip(self.a_src, self.a_tgt)):
            if s >= 0:
                self.arrows_from[s].append(i)
            if t >= 0:
                self.arrows_to[t].append(i)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_arrows(self) -> int:
        return len(self.arrows)

    def arrow_name(self, i: int) -> str:
        return self.arrows[i][0]

    def problems(self) -> list[str]:
        out = []
        seen = set()
        for v in self.vertices:
            if v in seen:
                out.append(f"duplicate vertex name {v!r}")
            seen.add(v)
        seen = set()
        for name, s, t in self.arrows:
            if name in seen:
                out.append(f"duplicate arrow name {name!r}")
            seen.add(name)
            if s not in self.v_index:
                out.append(f"arrow {name!r} has undeclared source {s!r}")
            if t not in self.v_index:
                out.append(f"arrow {name!r} has undeclared target {t!r}")
        return out


# An element of kQ is a dict Path -> nonzero scalar.  Relations are stored as
# canonically sorted tuples of (Path, scalar).
Element = dict


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    relation_index: int | None = None


class InvalidPresentation(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


class DimensionNotResolved(RuntimeError):
    """Irreducible paths persist at the degree bound; raise the bound."""


class ConsistencyError(RuntimeError):
    pass


@dataclass
class Presentation:
    field: FieldSpec
    quiver: Quiver
    relations: list  # list of tuple[(Path, scalar), ...]
    convention: str = "right-to-left"
    name: str = ""


def validate(p: Presentation) -> list[Diagnostic]:
    """Structural admissibility: relations are combinations of parallel paths
    of length >= 2 over a well-formed quiver."""
    diags = [Diagnostic("quiver", m) for m in p.quiver.problems()]
    if diags:
        return diags
    q = p.quiver
    for ri, rel in enumerate(p.relations):
        if not rel:
            diags.append(Diagnostic("empty", "empty relation", ri))
            continue
        endpoints = set()
        for path, coeff in rel:
            if coeff == 0:
                diags.append(Diagnostic("zero-coeff", "zero scalar in relation", ri))
            if len(path.arrows) < 2:
                diags.append(
                    Diagnostic("non-admissible", "non-admissible generator: term of length < 2", ri)
                )
            src, tgt = path.source, path.target
            for a in path.arrows:
                if not (0 <= a < q.n_arrows):
                    diags.append(Diagnostic("bad-arrow", "unknown arrow index", ri))
                    break
                if q.a_src[a] != src:
                    diags.append(Diagnostic("non-composable", "non-composable word", ri))
                    break
                src = q.a_tgt[a]
            else:
                if src != tgt:
                    diags.append(Diagnostic("non-composable", "non-composable word", ri))
            endpoints.add((path.source, path.target))
        if len(endpoints) > 1:
            diags.append(Diagnostic("non-parallel", "non-parallel relation terms", ri))
    return diags


@dataclass
class ProductStructure:
    """Marks an algebra as A (x) B^op on the product quiver."""

    left: "AlgebraHandle"
    right: "AlgebraHandle"
    vertex_pairs: list[tuple[int, int]]
    pair_index: dict
    # arrow i of the product is ('L', a, w) acting as left multiplication by
    # arrow a of A on the w strand, or ('R', v, b) as right multiplication by
    # arrow b of B on the v strand
    arrow_kind: list[tuple]
    left_arrow: dict  # (a, w) -> product arrow index
    right_arrow: dict  # (v, b) -> product arrow index


@dataclass
class CornerStructure:
    """Marks an algebra as the corner eAe presented on chosen generators."""

    parent: "AlgebraHandle"
    kept: list[int]  # parent vertex indices, in declaration order
    realizations: list[Path]  # parent normal path realizing each corner arrow


class AlgebraHandle:
    """A completed presentation: confluent rules + normal-path basis."""

    def __init__(self, presentation, rules, basis, degree_bound, name=""):
        self.presentation = presentation
        self.field = presentation.field
        self.quiver = presentation.quiver
        self.rules = rules  # list of (lead: Path, rest: dict), sorted by lead
        self.normal_basis = basis
        self.degree_bound = degree_bound
        self.dim = len(basis)
        self.name = name or presentation.name
        self.basis_index = {p: i for i, p in enumerate(basis)}
        self.loewy_length = 1 + max((len(p.arrows) for p in basis), default=0)
        self.is_monomial = all(not rest for _, rest in rules)
        self.product: ProductStructure | None = None
        self.corner: CornerStructure | None = None
        self.quotient_of = None  # (parent, vertex_map, arrow_map)
        self._by_first = {}
        for lead, rest in rules:
            self._by_first.setdefault(lead.arrows[0], []).append((lead, rest))
        for lst in self._by_first.values():
            lst.sort(key=lambda lr: word_key(lr[0]))
        self._nf_cache: dict[Path, Element] = {}
        self._mul_cache: dict[tuple[Path, Path], Element] = {}
        self._opposite: AlgebraHandle | None = None
        self._enveloping: AlgebraHandle | None = None
        self._extra = {}

    # -- normal forms -------------------------------------------------

    def nf_path(self, p: Path) -> Element:
        cached = self._nf_cache.get(p)
        if cached is None:
            cached = _reduce_element({p: self.field.one()}, self._by_first, self.field)
            self._nf_cache[p] = cached
        return cached

    def normal_form(self, elem: Element) -> Element:
        """The unique irreducible representative of elem modulo the ideal."""
        f = self.field
        out: Element = {}
        for p, c in elem.items():
            for w, d in self.nf_path(p).items():
                s = f.add(out.get(w, f.zero()), f.mul(c, d))
                if s == 0:
                    out.pop(w, None)
                else:
                    out[w] = s
        return out

    def mul_paths(self, p: Path, q: Path) -> Element:
        """Normal form of 'p then q'; zero element on endpoint mismatch."""
        key = (p, q)
        cached = self._mul_cache.get(key)
        if cached is None:
            pq = compose(p, q)
            cached = {} if pq is None else self.nf_path(pq)
            self._mul_cache[key] = cached
        return cached

    def basis_coords(self, elem: Element) -> list:
        vec = [self.field.zero()] * self.dim
        for p, c in elem.items():
            vec[self.basis_index[p]] = c
        return vec

    def paths_from(self, v: int) -> list[Path]:
        return [p for p in self.normal_basis if p.source == v]

    def paths_to(self, v: int) -> list[Path]:
        return [p for p in self.normal_basis if p.target == v]

    def paths_between(self, v: int, w: int) -> list[Path]:
        return [p for p in self.normal_basis if p.source == v and p.target == w]

    # -- derived algebras ----------------------------------------------

    def opposite(self) -> "AlgebraHandle":
        if self._opposite is None:
            op = complete(opposite_presentation(self.presentation), self.degree_bound)
            op.name = self.name + "^op"
            op._opposite = self
            self._opposite = op
        return self._opposite

    def enveloping(self) -> "AlgebraHandle":
        if self._enveloping is None:
            self._enveloping = tensor_with_opposite(self, self)
        return self._enveloping

    def __repr__(self):
        return f"AlgebraHandle({self.name!r}, dim={self.dim})"


def _reduce_element(elem: Element, by_first, field: FieldSpec) -> Element:
    """Fully reduce an element by the rule index; deterministic."""
    work = dict(elem)
    out: Element = {}
    while work:
        w = max(work, key=word_key)
        c = work.pop(w)
        if c == 0:
            continue
        hit = None
        word = w.arrows
        n = len(word)
        for pos in range(n):
            cands = by_first.get(word[pos])
            if not cands:
                continue
            rest_len = n - pos
            for lead, rest in cands:
                la = lead.arrows
                if len(la) <= rest_len and word[pos : pos + len(la)] == la:
                    hit = (pos, lead, rest)
                    break
            if hit:
                break
        if hit is None:
            s = field.add(out.get(w, field.zero()), c)
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
            continue
        pos, lead, rest = hit
        pre = word[:pos]
        suf = word[pos + len(lead.arrows) :]
        for rw, rc in rest.items():
            nw = Path(w.source, w.target, pre + rw.arrows + suf)
            s = field.add(work.get(nw, field.zero()), field.mul(c, rc))
            if s == 0:
                work.pop(nw, None)
            else:
                work[nw] = s
    return out


class _Completion:
    """Knuth-Bendix style overlap completion for path-algebra presentations."""

    MAX_RULES = 50000
    MAX_PASSES = 200000

    def __init__(self, pres: Presentation, degree_bound: int):
        self.pres = pres
        self.field = pres.field
        self.bound = degree_bound
        self.rules = {}  # rid -> (lead, rest)
        self.active: list[int] = []
        self.by_first = {}
        self.next_rid = 0
        self.pending_pairs = deque()
        self.pending_elements = []

    def run(self):
        for rel in self.pres.relations:
            self.pending_elements.append(dict(rel))
        passes = 0
        while self.pending_elements or self.pending_pairs:
            passes += 1
            if passes > self.MAX_PASSES:
                raise DimensionNotResolved("completion did not stabilize; raise the bound")
            if self.pending_elements:
                self._add_element(self.pending_elements.pop())
                continue
            ra, rb = self.pending_pairs.popleft()
            if ra not in self.rules or rb not in self.rules:
                continue
            self._process_overlaps(ra, rb)
        # final tail reduction to the unique reduced system
        final = []
        for rid in sorted(self.rules):
            lead, rest = self.rules[rid]
            rest = _reduce_element(dict(rest), self._by_first_excluding(lead), self.field)
            final.append((lead, rest))
        final.sort(key=lambda lr: word_key(lr[0]))
        return final

    def _by_first_excluding(self, lead):
        # tails may be reducible by every rule (a lead never reduces its own
        # tail: tail words are strictly smaller and cannot contain the lead
        # is not guaranteed, so exclude the rule itself)
        out = {}
        for rid in self.rules:
            l, r = self.rules[rid]
            if l == lead:
                continue
            out.setdefault(l.arrows[0], []).append((l, r))
        for lst in out.values():
            lst.sort(key=lambda lr: word_key(lr[0]))
        return out

    def _rebuild_index(self):
        self.by_first = {}
        for rid in self.active:
            lead, rest = self.rules[rid]
            self.by_first.setdefault(lead.arrows[0], []).append((lead, rest))
        for lst in self.by_first.values():
            lst.sort(key=lambda lr: word_key(lr[0]))

    def _add_element(self, elem: Element):
        e = _reduce_element(elem, self.by_first, self.field)
        if not e:
            return
        lead = max(e, key=word_key)
        if len(lead.arrows) > self.bound:
            raise DimensionNotResolved(
                f"rewriting rule of degree {len(lead.arrows)} exceeds bound {self.bound}"
            )
        c = e[lead]
        inv = self.field.inv(c)
        rest = {}
        for w, d in e.items():
            if w != lead:
                rest[w] = self.field.neg(self.field.mul(inv, d))
        rid = self.next_rid
        self.next_rid += 1
        if rid > self.MAX_RULES:
            raise DimensionNotResolved("rule count exploded; presentation likely not admissible")
        # retire rules whose lead is now reducible by the new lead
        la = lead.arrows
        retired = []
        for other in self.active:
            ol, orest = self.rules[other]
            oa = ol.arrows
            if len(oa) >= len(la) and any(
                oa[i : i + len(la)] == la for i in range(len(oa) - len(la) + 1)
            ):
                retired.append(other)
        for other in retired:
            ol, orest = self.rules.pop(other)
            self.active.remove(other)
            back = dict(orest)
            back[ol] = self.field.neg(self.field.one())
            # re-add as lead - rest = 0, i.e. -(lead) + rest
            self.pending_elements.append(back)
        self.rules[rid] = (lead, rest)
        self.active.append(rid)
        self._rebuild_index()
        for other in list(self.active):
            self.pending_pairs.append((rid, other))
            if other != rid:
                self.pending_pairs.append((other, rid))

    def _process_overlaps(self, ra: int, rb: int):
        lead_a, rest_a = self.rules[ra]
        lead_b, rest_b = self.rules[rb]
        ua, ub = lead_a.arrows, lead_b.arrows
        f = self.field
        max_t = min(len(ua), len(ub)) - 1
        for t in range(1, max_t + 1):
            if ua[len(ua) - t :] != ub[:t]:
                continue
            word = ua + ub[t:]
            src = lead_a.source
            tgt = lead_b.target
            amb = Path(src, tgt, word)
            # route 1: rewrite the lead_a occurrence at position 0
            e1: Element = {}
            suf = word[len(ua) :]
            for rw, rc in rest_a.items():
                nw = Path(src, tgt, rw.arrows + suf)
                e1[nw] = f.add(e1.get(nw, f.zero()), rc)
            # route 2: rewrite the lead_b occurrence at the end
            pre = word[: len(ua) - t]
            e2: Element = {}
            for rw, rc in rest_b.items():
                nw = Path(src, tgt, pre + rw.arrows)
                e2[nw] = f.add(e2.get(nw, f.zero()), rc)
            diff = dict(e1)
            for w, c in e2.items():
                s = f.sub(diff.get(w, f.zero()), c)
                if s == 0:
                    diff.pop(w, None)
                else:
                    diff[w] = s
            if diff:
                self._add_element(diff)


def _enumerate_basis(quiver: Quiver, rules, degree_bound: int, count_cap: int = 200000):
    by_last: dict[int, list[tuple[int, ...]]] = {}
    for lead, _ in rules:
        by_last.setdefault(lead.arrows[-1], []).append(lead.arrows)
    levels = [[trivial_path(v) for v in range(quiver.n_vertices)]]
    total = quiver.n_vertices
    for ell in range(1, degree_bound + 1):
        nxt = []
        for w in levels[-1]:
            for a in quiver.arrows_from[w.target]:
                cand = w.arrows + (a,)
                ok = True
                for la in by_last.get(a, ()):
                    t = len(la)
                    if t <= len(cand) and cand[len(cand) - t :] == la:
                        ok = False
                        break
                if ok:
                    nxt.append(Path(w.source, quiver.a_tgt[a], cand))
        if not nxt:
            basis = [p for level in levels for p in sorted(level, key=word_key)]
            return basis
        nxt.sort(key=word_key)
        total += len(nxt)
        if total > count_cap:
            raise DimensionNotResolved(
                f"dimension not resolved within bound: {total} irreducible paths and growing"
            )
        levels.append(nxt)
    raise DimensionNotResolved(
        f"dimension not resolved within bound {degree_bound}: irreducible paths persist"
    )


def _check_radical_nilpotent(handle: AlgebraHandle):
    """Certify that the arrow ideal is nilpotent modulo the relations.

    This is what makes the presentation genuinely admissible (the span of the
    positive-length normal paths is then the Jacobson radical).
    """
    f = handle.field
    dim = handle.dim
    arrows = [p for p in handle.normal_basis if len(p.arrows) == 1]
    current = SubspaceReducer(f, dim)
    for p in handle.normal_basis:
        if len(p.arrows) >= 1:
            current.insert(handle.basis_coords({p: f.one()}))
    for _ in range(dim + 1):
        if current.rank == 0:
            return
        nxt = SubspaceReducer(f, dim)
        for row in current.basis_rows():
            for a in arrows:
                acc: Element = {}
                for j, c in enumerate(row):
                    if c == 0:
                        continue
                    for w, d in handle.mul_paths(handle.normal_basis[j], a).items():
                        s = f.add(acc.get(w, f.zero()), f.mul(c, d))
                        if s == 0:
                            acc.pop(w, None)
                        else:
                            acc[w] = s
                if acc:
                    nxt.insert(handle.basis_coords(acc))
        if nxt.rank >= current.rank:
            raise InvalidPresentation(
                [Diagnostic("not-admissible", "arrow ideal is not nilpotent modulo relations")]
            )
        current = nxt
    raise InvalidPresentation(
        [Diagnostic("not-admissible", "arrow ideal is not nilpotent modulo relations")]
    )


def complete(pres: Presentation, degree_bound: int = 20) -> AlgebraHandle:
    """Complete a presentation into a confluent system and certify finiteness.

    Raises InvalidPresentation on inadmissible input and DimensionNotResolved
    when irreducible paths persist at the bound.
    """
    diags = [d for d in validate(pres) if d.code != "zero-coeff"]
    if diags:
        raise InvalidPresentation(diags)
    comp = _Completion(pres, degree_bound)
    rules = comp.run()
    basis = _enumerate_basis(pres.quiver, rules, degree_bound)
    handle = AlgebraHandle(pres, rules, basis, degree_bound)
    _check_radical_nilpotent(handle)
    return handle


def opposite_presentation(pres: Presentation) -> Presentation:
    """Reverse all arrows and all words."""
    q = pres.quiver
    qop = Quiver(list(q.vertices), [(name, t, s) for name, s, t in q.arrows])
    rels = []
    for rel in pres.relations:
        rels.append(
            tuple(
                (Path(p.target, p.source, tuple(reversed(p.arrows))), c) for p, c in rel
            )
        )
    return Presentation(pres.field, qop, rels, pres.convention, pres.name + "^op")


def tensor_with_opposite(A: AlgebraHandle, B: AlgebraHandle) -> AlgebraHandle:
    """The algebra A (x) B^op on the product quiver.

    Left A-B-bimodules are representations of this algebra; with B = A it is
    the enveloping algebra carrying A-A-bimodules.
    """
    if A.field != B.field:
        raise ValueError("tensor factors must share the ground field")
    qa, qb = A.quiver, B.quiver
    vertex_pairs = [(u, w) for u in range(qa.n_vertices) for w in range(qb.n_vertices)]
    pair_index = {p: i for i, p in enumerate(vertex_pairs)}
    vnames = [f"{qa.vertices[u]}.{qb.vertices[w]}" for u, w in vertex_pairs]
    arrows = []
    arrow_kind = []
    left_arrow = {}
    right_arrow = {}
    for a in range(qa.n_arrows):
        for w in range(qb.n_vertices):
            name = f"{qa.arrow_name(a)}.{qb.vertices[w]}"
            src = vnames[pair_index[(qa.a_src[a], w)]]
            tgt = vnames[pair_index[(qa.a_tgt[a], w)]]
            left_arrow[(a, w)] = len(arrows)
            arrow_kind.append(("L", a, w))
            arrows.append((name, src, tgt))
    for v in range(qa.n_vertices):
        for b in range(qb.n_arrows):
            name = f"{qa.vertices[v]}.{qb.arrow_name(b)}'"
            src = vnames[pair_index[(v, qb.a_tgt[b])]]
            tgt = vnames[pair_index[(v, qb.a_src[b])]]
            right_arrow[(v, b)] = len(arrows)
            arrow_kind.append(("R", v, b))
            arrows.append((name, src, tgt))
    quiver = Quiver(vnames, arrows)

    def lpath(p: Path, w: int) -> Path:
        return Path(
            pair_index[(p.source, w)],
            pair_index[(p.target, w)],
            tuple(left_arrow[(a, w)] for a in p.arrows),
        )

    def rpath(v: int, p: Path) -> Path:
        # the reversed word of p acts on the right strand at v
        return Path(
            pair_index[(v, p.target)],
            pair_index[(v, p.source)],
            tuple(right_arrow[(v, b)] for b in reversed(p.arrows)),
        )

    relations = []
    for rel in A.presentation.relations:
        for w in range(qb.n_vertices):
            relations.append(tuple((lpath(p, w), c) for p, c in rel))
    for rel in B.presentation.relations:
        for v in range(qa.n_vertices):
            relations.append(tuple((rpath(v, p), c) for p, c in rel))
    one = A.field.one()
    neg_one = A.field.neg(one)
    for a in range(qa.n_arrows):
        u, u2 = qa.a_src[a], qa.a_tgt[a]
        for b in range(qb.n_arrows):
            w, w2 = qb.a_src[b], qb.a_tgt[b]
            p1 = Path(
                pair_index[(u, w2)],
                pair_index[(u2, w)],
                (left_arrow[(a, w2)], right_arrow[(u2, b)]),
            )
            p2 = Path(
                pair_index[(u, w2)],
                pair_index[(u2, w)],
                (right_arrow[(u, b)], left_arrow[(a, w)]),
            )
            relations.append(((p1, one), (p2, neg_one)))
    pres = Presentation(
        A.field,
        quiver,
        relations,
        A.presentation.convention,
        f"{A.name}(x){B.name}^op",
    )
    bound = A.loewy_length + B.loewy_length
    handle = complete(pres, bound)
    if handle.dim != A.dim * B.dim:
        raise ConsistencyError(
            f"dimension mismatch: product completed to {handle.dim}, expected {A.dim * B.dim}"
        )
    handle.product = ProductStructure(
        A, B, vertex_pairs, pair_index, arrow_kind, left_arrow, right_arrow
    )
    return handle


def corner_basis(A: AlgebraHandle, vertex_names) -> list[Path]:
    """Normal paths whose source and target both lie in the vertex set."""
    S = {A.quiver.v_index[v] for v in vertex_names}
    if not S:
        raise ValueError("vertex set must be nonempty")
    return [p for p in A.normal_basis if p.source in S and p.target in S]
