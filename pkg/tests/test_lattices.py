import pytest

from k3lat.errors import DegenerateLatticeError, DomainError
from k3lat.intmat import IntMatrix
from k3lat.lattices import (
    ADEConfig,
    GramLattice,
    RootComponent,
    ade_lattice,
    config_lattice,
    det_sign,
    direct_sum,
    disc_group,
    is_negative_definite,
    is_positive_definite,
    rescale,
    stabilizer_order,
)


def test_ade_examples():
    assert ade_lattice(RootComponent("A", 1)).gram == IntMatrix([[-2]])
    assert ade_lattice(RootComponent("E", 8)).det == 1
    d4 = ade_lattice(RootComponent("D", 4))
    assert d4.det == 4
    assert disc_group(d4) == (2, 2)


@pytest.mark.parametrize("kind,n,det", [
    ("A", 1, -2), ("A", 2, 3), ("A", 3, -4), ("A", 6, 7),
    ("D", 4, 4), ("D", 5, -4), ("D", 6, 4),
    ("E", 6, 3), ("E", 7, -2), ("E", 8, 1),
])
def test_ade_determinants(kind, n, det):
    lat = ade_lattice(RootComponent(kind, n))
    assert lat.det == det
    assert lat.even
    assert is_negative_definite(lat)
    assert det_sign(0, n) == (1 if det > 0 else -1)


@pytest.mark.parametrize("kind,n", [("A", 0), ("D", 3), ("E", 5), ("E", 9), ("B", 2)])
def test_bad_components_rejected(kind, n):
    with pytest.raises(DomainError):
        RootComponent(kind, n)


def test_direct_sum_examples():
    k_s4 = config_lattice(ADEConfig.parse("2*A3,3*A2,5*A1"))
    assert k_s4.rank == 17
    assert k_s4.det == -13824
    k_l27 = config_lattice(ADEConfig.parse("A6,2*A3,3*A2,A1"))
    assert k_l27.rank == 19
    assert k_l27.det == -6048
    empty = direct_sum([])
    assert empty.rank == 0
    assert empty.det == 1


def test_disc_group_examples():
    assert disc_group(ade_lattice(RootComponent("A", 1))) == (2,)
    assert disc_group(ade_lattice(RootComponent("E", 8))) == ()
    m_a5 = config_lattice(ADEConfig.parse("2*A4,3*A2,4*A1"))
    assert m_a5.rank == 18
    assert disc_group(m_a5) == (2, 6, 30, 30)


def test_disc_group_singular():
    with pytest.raises(DegenerateLatticeError):
        disc_group(GramLattice([[2, 2], [2, 2]]))


def test_rescale():
    a1 = ade_lattice(RootComponent("A", 1))
    assert rescale(a1, 1).gram == a1.gram
    assert rescale(a1, 2).gram == IntMatrix([[-4]])
    e8 = ade_lattice(RootComponent("E", 8))
    assert rescale(e8, 2).det == 2**8
    with pytest.raises(DomainError):
        rescale(a1, 0)


def test_det_sign():
    assert det_sign(3, 2) == 1
    assert det_sign(0, 17) == -1
    assert det_sign(0, 0) == 1
    with pytest.raises(DomainError):
        det_sign(-1, 0)


@pytest.mark.parametrize("kind,n,order", [
    ("A", 1, 2), ("A", 6, 7), ("D", 4, 8), ("D", 5, 12),
    ("E", 6, 24), ("E", 7, 48), ("E", 8, 120),
])
def test_stabilizer_orders(kind, n, order):
    assert stabilizer_order(RootComponent(kind, n)) == order


def test_config_parsing():
    cfg = ADEConfig.parse("2*A3, 3*A2 ,5*A1")
    assert cfg.rank == 17
    assert str(cfg) == "2*A3,3*A2,5*A1"
    assert ADEConfig.parse(str(cfg)) == cfg
    assert ADEConfig.parse("A6").count("A", 6) == 1
    assert ADEConfig.parse("") == ADEConfig(())
    with pytest.raises(DomainError):
        ADEConfig.parse("2xA3")
    with pytest.raises(DomainError):
        ADEConfig.parse("A3+A2")


def test_config_multiset_equality():
    assert ADEConfig.parse("A1,A2") == ADEConfig.parse("A2,A1")
    assert ADEConfig.parse("2*A1") != ADEConfig.parse("A1")


def test_config_rank_cap():
    assert ADEConfig.parse("21*A1").rank == 21
    with pytest.raises(DomainError):
        ADEConfig.parse("22*A1")


def test_direct_sum_det_multiplicative():
    a2 = ade_lattice(RootComponent("A", 2))
    d5 = ade_lattice(RootComponent("D", 5))
    both = direct_sum([a2, d5])
    assert both.det == a2.det * d5.det


def test_definiteness_checks():
    e6 = ade_lattice(RootComponent("E", 6))
    assert is_negative_definite(e6)
    assert not is_positive_definite(e6)
    pos = GramLattice([[2, 1], [1, 2]])
    assert is_positive_definite(pos)
    assert not is_negative_definite(pos)
    assert not is_positive_definite(GramLattice([[2, 3], [3, 2]]))


def test_gram_must_be_symmetric():
    with pytest.raises(DomainError):
        GramLattice([[0, 1], [2, 0]])
