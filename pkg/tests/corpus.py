"""Seeded random admissible presentations for property testing."""

from __future__ import annotations

import random

from qred.algebra import (
    DimensionNotResolved,
    InvalidPresentation,
    Path,
    Presentation,
    Quiver,
    complete,
)
from qred.linalg import FieldSpec


def random_presentation(
    rng: random.Random,
    field: FieldSpec,
    max_vertices: int = 4,
    max_arrows: int = 6,
    max_relations: int = 4,
    max_len: int = 4,
    name: str = "rand",
) -> Presentation:
    nv = rng.randint(1, max_vertices)
    vertices = [str(i + 1) for i in range(nv)]
    na = rng.randint(1, max_arrows)
    arrows = [
        (f"a{i}", str(rng.randint(1, nv)), str(rng.randint(1, nv))) for i in range(na)
    ]
    quiver = Quiver(vertices, arrows)

    def random_path():
        for _ in range(30):
            length = rng.randint(2, max_len)
            seq = [rng.randrange(na)]
            for _ in range(length - 1):
                outs = quiver.arrows_from[quiver.a_tgt[seq[-1]]]
                if not outs:
                    break
                seq.append(outs[rng.randrange(len(outs))])
            else:
                return Path(quiver.a_src[seq[0]], quiver.a_tgt[seq[-1]], tuple(seq))
        return None

    relations = []
    seen = set()
    for _ in range(rng.randint(1, max_relations)):
        p = random_path()
        if p is None:
            continue
        if rng.random() < 0.35:
            q = random_path()
            if q is not None and (q.source, q.target) == (p.source, p.target) and q != p:
                hi = (field.p or 4) - 1
                c = field.from_int(rng.randint(1, max(1, hi)))
                key = (p, q)
                if key not in seen:
                    seen.add(key)
                    relations.append(((p, field.one()), (q, field.neg(c))))
                continue
        if (p,) not in seen:
            seen.add((p,))
            relations.append(((p, field.one()),))
    return Presentation(field, quiver, relations, name=name)


def completed_corpus(
    seed: int,
    count: int,
    field: FieldSpec,
    bound: int = 10,
    dim_cap: int = 14,
    max_draws: int = 4000,
    **kwargs,
):
    """Yield `count` completed finite-dimensional algebras, deterministically."""
    rng = random.Random(seed)
    produced = 0
    for i in range(max_draws):
        pres = random_presentation(rng, field, name=f"rand{seed}_{i}", **kwargs)
        if not pres.relations:
            continue
        try:
            handle = complete(pres, bound)
        except (DimensionNotResolved, InvalidPresentation):
            continue
        if handle.dim > dim_cap:
            continue
        yield handle
        produced += 1
        if produced >= count:
            return
    raise RuntimeError(f"corpus generation exhausted after {max_draws} draws")
