import random

import pytest

from qred.algebra import tensor_with_opposite
from qred.linalg import QQ
from qred.modules import (
    is_isomorphic,
    is_projective,
    projective,
    regular_bimodule,
    regular_rep,
    stable_isomorphic,
    zero_rep,
)
from qred.reduction import corner_presentation
from qred.witness import (
    WitnessPair,
    bimodule_syzygy,
    idempotent_candidate,
    identity_pair,
    one_sided_projectivity,
    restrict,
    search_level,
    syzygy_pair,
    tensor_bimodules,
    verify_level,
)

from qred.algebra import Presentation, Quiver, complete


def semisimple():
    return complete(Presentation(QQ, Quiver(["1"], []), [], name="k"), 4)


def test_restrict_regular(tri_dual):
    reg = regular_bimodule(tri_dual)
    left = restrict(reg, "left")
    assert left.algebra is tri_dual
    assert sum(left.dims) == tri_dual.dim
    assert is_isomorphic(left, regular_rep(tri_dual), random.Random(0)).kind == "yes"
    right = restrict(reg, "right")
    assert right.algebra is tri_dual.opposite()
    assert sum(right.dims) == tri_dual.dim


def test_restrict_idempotent_bimodule(tri_dual):
    corner = corner_presentation(tri_dual, ["2"])
    M, N = idempotent_candidate(tri_dual, corner)
    assert M.total_dim == 3  # paths with source 2: e_2, a, x
    assert N.total_dim == 2  # paths with target 2: e_2, x
    left = restrict(M, "left")
    assert left.dims == [1, 2]


def test_restrict_zero(tri_dual):
    Z = zero_rep(tri_dual.enveloping())
    assert restrict(Z, "left").total_dim == 0


def test_one_sided_projectivity_identity(tri_dual, line2):
    for A in (tri_dual, line2):
        assert one_sided_projectivity(identity_pair(A)) == (True, True, True, True)


def test_one_sided_projectivity_candidate(tri_dual):
    corner = corner_presentation(tri_dual, ["2"])
    M, N = idempotent_candidate(tri_dual, corner)
    # the right restriction of Ae carries the one-dimensional strand at
    # vertex 1, which is not projective over the dual numbers
    assert one_sided_projectivity(WitnessPair(M, N, 0)) == (True, False, True, True)


def test_bimodule_syzygy_semisimple():
    k = semisimple()
    assert bimodule_syzygy(k, 1).total_dim == 0


def test_bimodule_syzygy_dual_numbers(dual_numbers):
    om = bimodule_syzygy(dual_numbers, 1)
    assert om.total_dim == 2  # kernel of the 4-dim cover onto the 2-dim regular


def test_bimodule_syzygy_functorial(line2):
    rng = random.Random(4)
    for n in range(3):
        direct = bimodule_syzygy(line2, n + 1)
        from qred.modules import minimal_resolution

        again = minimal_resolution(bimodule_syzygy(line2, n), 1)
        step = again.syzygies[0] if again.syzygies else zero_rep(line2.enveloping())
        assert stable_isomorphic(direct, step, rng).kind == "yes"


def test_tensor_unit(dual_numbers):
    reg = regular_bimodule(dual_numbers)
    mn = tensor_bimodules(reg, reg)
    assert mn.total_dim == dual_numbers.dim
    assert stable_isomorphic(mn, reg, random.Random(1)).kind == "yes"


def test_tensor_with_zero(tri_dual):
    reg = regular_bimodule(tri_dual)
    Z = zero_rep(tri_dual.enveloping())
    assert tensor_bimodules(reg, Z).total_dim == 0


def test_tensor_candidate_dim(tri_dual):
    # Ae (x)_{eAe} eA has total dimension 3 (frozen from the brute-force
    # oracle; eA is free of rank one over the corner, so the product is Ae)
    corner = corner_presentation(tri_dual, ["2"])
    M, N = idempotent_candidate(tri_dual, corner)
    mn = tensor_bimodules(M, N, tri_dual.enveloping())
    assert mn.total_dim == 3
    nm = tensor_bimodules(N, M, corner.enveloping())
    assert nm.total_dim == 2  # eA (x)_A Ae = eAe


def test_tensor_associative_in_dimension(tri_dual):
    corner = corner_presentation(tri_dual, ["2"])
    M, N = idempotent_candidate(tri_dual, corner)
    mn = tensor_bimodules(M, N, tri_dual.enveloping())
    nm = tensor_bimodules(N, M, corner.enveloping())
    left = tensor_bimodules(mn, M, tensor_with_opposite(tri_dual, corner))
    right = tensor_bimodules(M, nm, tensor_with_opposite(tri_dual, corner))
    assert left.total_dim == right.total_dim


def test_projective_bimodule_restrictions(tri_dual):
    env = tri_dual.enveloping()
    for pv in range(env.quiver.n_vertices):
        P = projective(env, pv)[0]
        assert is_projective(restrict(P, "left"))
        assert is_projective(restrict(P, "right"))


def test_verify_level_identity(dual_numbers, line2, tri_dual):
    for A in (dual_numbers, line2, tri_dual):
        rep = verify_level(identity_pair(A), seed=0)
        assert rep.verdict == "holds"
        assert rep.projectivity == (True, True, True, True)


def test_verify_level_syzygy(dual_numbers, line2, tri_dual):
    for A in (dual_numbers, line2, tri_dual):
        rep = verify_level(syzygy_pair(A), seed=0)
        assert rep.verdict == "holds"


def test_verify_level_syzygy_bowtie(bowtie):
    # the big fixture: enveloping algebra of dimension 81, first bimodule
    # syzygy of dimension 24
    pair = syzygy_pair(bowtie)
    assert pair.M.total_dim == 24
    rep = verify_level(pair, seed=0)
    assert rep.verdict == "holds"


def test_verify_level_wrong_level(dual_numbers):
    pair = WitnessPair(regular_bimodule(dual_numbers), regular_bimodule(dual_numbers), 1)
    rep = verify_level(pair, seed=0)
    assert rep.verdict == "fails"


def test_search_level_identity(line2):
    reg = regular_bimodule(line2)
    n, _ = search_level(reg, reg, 3, seed=0)
    assert n == 0


def test_search_level_syzygy(line2):
    om = bimodule_syzygy(line2, 1)
    reg = regular_bimodule(line2)
    n, _ = search_level(om, reg, 3, seed=0)
    assert n == 1


def test_search_level_candidate_logs_negative(tri_dual):
    # (Ae, eA) is only a heuristic candidate; here it fails one-sided
    # projectivity at every level, and the search reports that honestly
    corner = corner_presentation(tri_dual, ["2"])
    M, N = idempotent_candidate(tri_dual, corner)
    n, reports = search_level(M, N, 4, seed=0)
    assert n is None
    assert all(rep.verdict == "fails" for _, rep in reports)


def test_idempotent_candidate_full_vertex_set(tri_dual):
    # with every vertex kept the candidate is the pair (A, A) up to the
    # corner's renaming, and it verifies at level zero
    corner = corner_presentation(tri_dual, ["1", "2"])
    M, N = idempotent_candidate(tri_dual, corner)
    assert M.total_dim == tri_dual.dim
    assert N.total_dim == tri_dual.dim
    rep = verify_level(WitnessPair(M, N, 0), seed=0)
    assert rep.verdict == "holds"


def test_idempotent_candidate_bowtie_dims(bowtie):
    corner = corner_presentation(bowtie, ["s", "2"])
    M, N = idempotent_candidate(bowtie, corner)
    assert M.total_dim == 7  # paths with source in {s, 2}
    assert N.total_dim == 7  # paths with target in {s, 2}


def test_wrong_level_characteristic_dependence():
    # the regular bimodule of the dual numbers is its own first syzygy in
    # characteristic two (the sign twist collapses), and not otherwise
    from qred.algebra import Path, Presentation, Quiver, complete
    from qred.linalg import FieldSpec

    verdicts = {}
    for p in (2, 3):
        F = FieldSpec(p)
        q = Quiver(["1"], [("x", "1", "1")])
        A = complete(Presentation(F, q, [((Path(0, 0, (0, 0)), F.one()),)], name=f"dn{p}"), 8)
        reg = regular_bimodule(A)
        verdicts[p] = verify_level(WitnessPair(reg, reg, 1), seed=0).verdict
    assert verdicts == {2: "holds", 3: "fails"}


def test_verify_level_gf_fixtures():
    from qred.algebra import Path, Presentation, Quiver, complete
    from qred.linalg import FieldSpec

    F = FieldSpec(5)
    q = Quiver(["1", "2"], [("a", "2", "1"), ("x", "2", "2")])
    rels = [
        ((Path(1, 1, (1, 1)), F.one()),),
        ((Path(1, 0, (1, 0)), F.one()),),
    ]
    A = complete(Presentation(F, q, rels, name="tri5"), 8)
    assert verify_level(identity_pair(A), seed=0).verdict == "holds"
    assert verify_level(syzygy_pair(A), seed=0).verdict == "holds"


def test_witness_level_validation(tri_dual):
    reg = regular_bimodule(tri_dual)
    with pytest.raises(ValueError):
        WitnessPair(reg, reg, -1).check_shapes()
    with pytest.raises(ValueError):
        WitnessPair(regular_rep(tri_dual), reg, 0).check_shapes()
