import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhloc import ParameterError, SubsystemMask, connectivity
from qhloc.subsystems import all_subsystems, connected_subsystems, parity_symmetric_subsystems


def test_mask_basics():
    a = SubsystemMask.of(6, [5, 2, 2, 3])
    assert a.members == (2, 3, 5)
    assert a.bits == 0b10110
    assert a.complement == (1, 4, 6)
    assert a.reflect().members == (2, 4, 5)
    assert SubsystemMask.from_bits(6, a.bits) == a
    assert a.without(3).members == (2, 5)
    assert SubsystemMask.of(3, [2]).without(2) is None
    assert SubsystemMask.full(4).is_full() and SubsystemMask.full(4).complement == ()


@pytest.mark.parametrize("n,members", [(4, []), (4, [0]), (4, [5])])
def test_mask_validation(n, members):
    with pytest.raises(ParameterError):
        SubsystemMask.of(n, members)


def test_connectivity_profile():
    prof = connectivity(SubsystemMask.of(9, [1, 2, 4, 8, 9]))
    assert prof.components == ((1, 2), (4,), (8, 9))
    assert prof.left == (1, 2) and prof.right == (8, 9)
    # one empty site between runs gives distance 2
    assert prof.distances[0, 1] == 2 and prof.distances[1, 2] == 4
    np.testing.assert_array_equal(prof.distances, prof.distances.T)
    assert prof.nearest_distance(1) == 2
    assert connectivity(SubsystemMask.of(5, [2, 3])).nearest_distance(0) == float("inf")


@given(st.integers(1, 12), st.data())
def test_components_partition(n, data):
    bits = data.draw(st.integers(1, (1 << n) - 1))
    a = SubsystemMask.from_bits(n, bits)
    prof = connectivity(a)
    flat = [i for c in prof.components for i in c]
    assert tuple(flat) == a.members
    assert all(np.diag(prof.distances) == 0)


def test_families():
    assert len(list(all_subsystems(4))) == 15
    assert len(list(connected_subsystems(5))) == 15
    par = list(parity_symmetric_subsystems(5))
    assert len(par) == 7 and all(s.reflect() == s for s in par)
    assert [s.bits for s in par] == sorted(s.bits for s in par)
