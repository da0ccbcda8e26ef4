import numpy as np
import pytest

from apmub.errors import CongruenceViolation, DomainViolation, Unavailable
from apmub.finite_field import field_of_order
from apmub.hadamard import (
    PhaseEntry,
    UnitaryScaffold,
    dft,
    paley_i,
    paley_ii,
    real_hadamard,
    real_hadamard_available,
    scaffold_by_name,
    sylvester,
    tensor,
    verify_scaffold,
)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 6, 7, 12])
def test_dft_verifies(k):
    h = dft(k)
    assert verify_scaffold(h)
    assert h.kind == ("real" if k <= 2 else "complex")


@pytest.mark.parametrize("m", range(6))
def test_sylvester(m):
    h = sylvester(m)
    a = h.to_array()
    assert h.kind == "real" and verify_scaffold(h)
    assert np.allclose(a @ a.T, (2**m) * np.eye(2**m))


@pytest.mark.parametrize("q", [3, 7, 11, 19, 23, 27])
def test_paley_i(q):
    h = paley_i(field_of_order(q))
    assert h.k == q + 1 and h.kind == "real" and verify_scaffold(h)


@pytest.mark.parametrize("q", [5, 9, 13, 17])
def test_paley_ii(q):
    h = paley_ii(field_of_order(q))
    assert h.k == 2 * (q + 1) and h.kind == "real" and verify_scaffold(h)


def test_paley_congruence():
    with pytest.raises(CongruenceViolation):
        paley_i(field_of_order(5))
    with pytest.raises(CongruenceViolation):
        paley_ii(field_of_order(7))


@pytest.mark.parametrize("k", [1, 2, 4, 8, 12, 20, 24, 28, 36, 40, 48, 60])
def test_real_hadamard(k):
    h = real_hadamard(k)
    assert h.k == k and h.kind == "real" and verify_scaffold(h)


def test_real_hadamard_unavailable():
    for k in (3, 6, 10):
        with pytest.raises(Unavailable):
            real_hadamard(k)
        assert not real_hadamard_available(k)
    assert real_hadamard(12).name == "paley_i(GF(11))"


def test_scaffold_by_name():
    assert scaffold_by_name("auto", 6).name == "dft(6)"
    assert scaffold_by_name("auto", 4).kind == "real"
    with pytest.raises(Unavailable):
        scaffold_by_name("real", 6)
    with pytest.raises(DomainViolation):
        scaffold_by_name("magic", 4)


def test_tensor_and_json():
    h = tensor(dft(3), sylvester(1))
    assert h.k == 6 and verify_scaffold(h)
    back = UnitaryScaffold.from_json(h.to_json())
    assert back.entries == h.entries


def test_verify_rejects_broken_matrices():
    h = sylvester(2)
    rows = [list(r) for r in h.entries]
    rows[1][2] = PhaseEntry.sign(-1) * rows[1][2]
    assert not verify_scaffold(UnitaryScaffold(4, rows))
    rows = [list(r) for r in h.entries]
    rows[0][0] = PhaseEntry(True)
    assert not verify_scaffold(UnitaryScaffold(4, rows))


def test_phase_entry_normalises():
    assert PhaseEntry.phase(3, 6) == PhaseEntry.sign(-1)
    assert PhaseEntry.phase(5, 4) == PhaseEntry.phase(1, 4)
    assert (PhaseEntry.phase(1, 3) * PhaseEntry.phase(2, 3)) == PhaseEntry.sign(1)
    with pytest.raises(DomainViolation):
        PhaseEntry.sign(2)
