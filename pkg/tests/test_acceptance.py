"""Acceptance suite: one test per acceptance criterion.

Each test prints a single PASS line on success (run with ``pytest -s``
or read the captured output); the randomized property suites run 1000
cases under fixed seeds.
"""

import json
import random
import time

import pytest

from k3lat.cli import main
from k3lat.discforms import (
    are_isomorphic,
    disc_form,
    element_fingerprint,
    isotropic_subgroups,
    negate,
    orthogonal_sum,
    overlattice_disc,
)
from k3lat.genus import GenusSpec, ReducedForm, enumerate_reduced, genus_class_count, is_isometric
from k3lat.groups import (
    FiniteGroup,
    _coboundary_rows,
    _compose_is_zero,
    h3_bar_resolution,
)
from k3lat.intmat import IntMatrix, det_exact, smith_normal_form
from k3lat.lattices import (
    ADEConfig,
    GramLattice,
    RootComponent,
    ade_lattice,
    config_lattice,
    direct_sum,
    disc_group,
)
from k3lat.pipeline import (
    derive_fixed_point_profile,
    discriminant_chain,
    rank_from_config,
    rank_from_group,
    shipped_records,
    tables_disjoint,
    xiao_consistency,
)

RECORDS = {r.name: r for r in shipped_records()}


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_criterion_01_s4_chain(capsys):
    t0 = time.monotonic()
    code, out = run_cli(capsys, "--json", "invariants", "--name", "S4")
    elapsed = time.monotonic() - t0
    assert code == 0
    (rep,) = json.loads(out)["reports"]
    assert rep["rank_sg"] == 17
    assert int(rep["d_k"]["value"]) == -(2**9) * 3**3
    assert int(rep["d_m"]["value"]) == -(2**7) * 3**3
    assert int(rep["d_j"]["value"]) == 2**8 * 3**2
    assert int(rep["d_sg"]["value"]) == -(2**6) * 3**2
    assert elapsed < 1.0
    print(f"ACCEPTANCE 1 PASS: S4 chain exact in {elapsed:.3f}s")


def test_criterion_02_l27_chain(capsys):
    t0 = time.monotonic()
    code, out = run_cli(capsys, "--json", "invariants", "--name", "L2(7)")
    elapsed = time.monotonic() - t0
    assert code == 0
    (rep,) = json.loads(out)["reports"]
    assert int(rep["d_h2g"]["value"]) == 196
    assert rep["rank_h2g"] == 3
    assert int(rep["d_sg"]["value"]) == -196
    assert int(rep["d_j"]["value"]) == 784
    assert any("784" in note and "2^4*7" in note for note in rep["notes"])
    assert elapsed < 1.0
    print(f"ACCEPTANCE 2 PASS: L2(7) chain exact, d(J)=784 discrepancy flagged "
          f"({elapsed:.3f}s)")


def test_criterion_03_a5_disc_group():
    m = config_lattice(RECORDS["A5"].config)
    assert m.rank == 18
    factors = disc_group(m)
    primary = {}
    for d in factors:
        for p in (2, 3, 5):
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if e:
                primary.setdefault(p, []).append(e)
    assert primary == {2: [1, 1, 1, 1], 3: [1, 1, 1], 5: [1, 1]}
    print("ACCEPTANCE 3 PASS: A5 lattice has rank 18 and discriminant group "
          "(Z/5)^2 + (Z/3)^3 + (Z/2)^4")


def test_criterion_04_counting_cross_checks():
    for rec in RECORDS.values():
        assert xiao_consistency(rec.config, rec.group_order), rec.name
        if rec.census is not None:
            assert rank_from_group(rec.census, rec.group_order) == rank_from_config(
                rec.config
            ), rec.name
    print(f"ACCEPTANCE 4 PASS: stabilizer count and rank cross-check hold on all "
          f"{len(RECORDS)} shipped records")


def test_criterion_05_fixed_point_profile():
    profile = derive_fixed_point_profile(shipped_records())
    assert profile == {2: 8, 3: 6, 4: 4, 5: 4, 6: 2, 7: 3, 8: 2}
    print(f"ACCEPTANCE 5 PASS: fixed-point profile {profile}")


def test_criterion_06_c2_involution_anchor():
    from k3lat.lattices import rescale

    rep = discriminant_chain(RECORDS["C2"])
    assert abs(rep.d_sg) == 256
    assert abs(rep.d_sg) == abs(rescale(ade_lattice(RootComponent("E", 8)), 2).det)
    print("ACCEPTANCE 6 PASS: C2 chain gives |d(S_G)| = 256, the rescaled-E8 "
          "involution invariant")


def test_criterion_07_genus_count(capsys):
    t0 = time.monotonic()
    code, out = run_cli(capsys, "--json", "genus", "--rank", "3", "--det", "6048",
                        "--disc-from-config", "A6,2*A3,3*A2,A1")
    elapsed = time.monotonic() - t0
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 2
    assert elapsed < 600
    print(f"ACCEPTANCE 7 PASS: rank-3 det-6048 genus has 2 classes ({elapsed:.1f}s)")


def test_criterion_08_table_disjointness():
    assert tables_disjoint([r.config for r in shipped_records()])
    print("ACCEPTANCE 8 PASS: torus-quotient configs are disjoint from all "
          "shipped symplectic configs")


def test_criterion_09_h3_oracle():
    timings = {}
    for n in range(2, 9):
        t0 = time.monotonic()
        assert h3_bar_resolution(FiniteGroup.cyclic(n)) == ()
        timings[f"C{n}"] = time.monotonic() - t0
    v4 = FiniteGroup.from_cycles(["(1,2)", "(3,4)"])
    t0 = time.monotonic()
    assert h3_bar_resolution(v4) == (2,)
    timings["C2xC2"] = time.monotonic() - t0
    s3 = FiniteGroup.from_cycles(["(1,2)", "(1,2,3)"])
    t0 = time.monotonic()
    assert h3_bar_resolution(s3) == ()
    timings["S3"] = time.monotonic() - t0
    assert all(t < 30 for t in timings.values()), timings
    # the coboundary composition is verified exactly inside the oracle;
    # assert it once directly as well
    d2 = _coboundary_rows(s3.table, 2)
    d3 = _coboundary_rows(s3.table, 3)
    assert _compose_is_zero(d3, d2)
    worst = max(timings.values())
    print(f"ACCEPTANCE 9 PASS: H3 oracle trivial for C2..C8, Z/2 for C2xC2, "
          f"trivial for S3; d3.d2 = 0; worst case {worst:.2f}s")


# -- criterion 10: randomized property suites, 1000 cases each -------------


def _random_unimodular(rng, n):
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(6):
        kind = rng.randrange(3)
        i, j = rng.randrange(n), rng.randrange(n)
        if kind == 0 and i != j:
            c = rng.choice([-2, -1, 1, 2])
            for t in range(n):
                m[i][t] += c * m[j][t]
        elif kind == 1:
            m[i], m[j] = m[j], m[i]
        else:
            m[i] = [-x for x in m[i]]
    return IntMatrix(m)


def test_criterion_10a_snf_det_properties():
    rng = random.Random(101)
    for _ in range(1000):
        n = rng.randint(1, 4)
        m = IntMatrix([[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)])
        sf = smith_normal_form(m)
        assert sf.u.mul(m).mul(sf.v) == IntMatrix.diagonal(sf.d)
        for a, b in zip(sf.d, sf.d[1:]):
            assert (b % a == 0) if a else (b == 0)
        det = det_exact(m)
        if det:
            prod = 1
            for d in sf.d:
                prod *= d
            assert prod == abs(det)
        else:
            assert 0 in sf.d
        p = _random_unimodular(rng, n)
        assert det_exact(p.mul(m).mul(p.transpose())) == det
    print("ACCEPTANCE 10a PASS: 1000 SNF/det cross-checks")


def _random_even_lattice(rng, max_rank=3, max_det=150):
    while True:
        n = rng.randint(1, max_rank)
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            g[i][i] = 2 * rng.choice([-3, -2, -1, 1, 2, 3])
            for j in range(i):
                g[i][j] = g[j][i] = rng.randint(-2, 2)
        lat = GramLattice(g)
        if lat.det and abs(lat.det) <= max_det:
            return lat


def test_criterion_10b_disc_form_basis_invariance():
    rng = random.Random(202)
    for case in range(1000):
        lat = _random_even_lattice(rng)
        factors = disc_group(lat)
        prod = 1
        for d in factors:
            prod *= d
        assert prod == abs(lat.det)
        p = _random_unimodular(rng, lat.rank)
        conj = GramLattice(p.mul(lat.gram).mul(p.transpose()))
        assert factors == disc_group(conj)
        q1, q2 = disc_form(lat), disc_form(conj)
        assert element_fingerprint(q1) == element_fingerprint(q2)
        assert are_isomorphic(q1, q1)
        assert are_isomorphic(q1, q2) and are_isomorphic(q2, q1)
        if case % 10 == 0:
            other = disc_form(_random_even_lattice(rng))
            assert are_isomorphic(q1, other) == are_isomorphic(other, q1)
    print("ACCEPTANCE 10b PASS: 1000 discriminant-form basis-invariance checks")


def test_criterion_10c_overlattice_order_law():
    rng = random.Random(303)
    pool = [
        ade_lattice(RootComponent("A", 1)),
        ade_lattice(RootComponent("A", 2)),
        ade_lattice(RootComponent("A", 3)),
        ade_lattice(RootComponent("D", 4)),
    ]
    checked = 0
    while checked < 1000:
        k = rng.randint(1, 3)
        lat = direct_sum(rng.choices(pool, k=k))
        q = disc_form(lat)
        choices = [m for m in (2, 3, 4) if q.group_order % m == 0]
        if not choices:
            continue
        m = rng.choice(choices)
        subs = isotropic_subgroups(q, m)
        if not subs:
            continue
        h = rng.choice(subs)
        ov = overlattice_disc(q, h)
        assert ov.group_order * len(h) ** 2 == q.group_order
        checked += 1
    print("ACCEPTANCE 10c PASS: 1000 overlattice order-law checks")


def _signed_permutation_variant(rng, form):
    g = [list(r) for r in form.gram]
    n = len(g)
    order = list(range(n))
    rng.shuffle(order)
    if any(g[i][i] != g[order[i]][order[i]] for i in range(n)):
        order = list(range(n))  # permutation must preserve the diagonal
    signs = [rng.choice([1, -1]) for _ in range(n)]
    new = [[signs[i] * signs[j] * g[order[i]][order[j]] for j in range(n)]
           for i in range(n)]
    return ReducedForm(tuple(tuple(r) for r in new))


def test_criterion_10d_isometry_relation_sanity():
    rng = random.Random(404)
    cache = {}
    checked = 0
    while checked < 1000:
        rank = rng.choice([2, 3])
        det = rng.randint(2, 40)
        reps = cache.get((rank, det))
        if reps is None:
            reps = cache[(rank, det)] = enumerate_reduced(rank, det)
        if not reps:
            continue
        f = rng.choice(reps)
        assert is_isometric(f, f)
        g = rng.choice(reps)
        assert is_isometric(f, g) == is_isometric(g, f)
        v1 = _signed_permutation_variant(rng, f)
        v2 = _signed_permutation_variant(rng, f)
        assert is_isometric(f, v1)
        assert is_isometric(v1, v2)  # transitivity through f
        checked += 1
    print("ACCEPTANCE 10d PASS: 1000 isometry-relation checks")


def test_criterion_10e_enumeration_closure():
    rng = random.Random(505)
    cache = {}
    checked = 0
    while checked < 1000:
        rank = rng.choice([1, 2, 3])
        det = rng.randint(2, 36)
        reps = cache.get((rank, det))
        if reps is None:
            reps = cache[(rank, det)] = enumerate_reduced(rank, det)
        if not reps:
            continue
        for r in reps:
            assert r.det == det
        target = disc_form(rng.choice(reps).lattice())
        count, members = genus_class_count(GenusSpec(rank, det, target))
        assert count >= 1
        for r in members:
            assert are_isomorphic(disc_form(r.lattice()), target)
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                assert not is_isometric(members[i], members[j])
        checked += 1
    print("ACCEPTANCE 10e PASS: 1000 enumeration-closure checks")
