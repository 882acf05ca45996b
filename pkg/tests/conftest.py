import pytest

from hdxcones.simplicial import Complex


RP2_FACES = [
    [1, 2, 5], [1, 2, 6], [1, 3, 4], [1, 3, 6], [1, 4, 5],
    [2, 3, 4], [2, 3, 5], [2, 4, 6], [3, 5, 6], [4, 5, 6],
]


def path_graph(k):
    """Path on k+1 vertices 0..k."""
    return Complex.from_maximal_faces([[i, i + 1] for i in range(k)])


@pytest.fixture(scope="session")
def rp2():
    """Minimal 6-vertex projective plane: H_1 = Z/2."""
    return Complex.from_maximal_faces(RP2_FACES)


@pytest.fixture(scope="session")
def kms_spec():
    from hdxcones.cosets import kms_sl_example

    return kms_sl_example(2, 2, (1, 1, 1))


@pytest.fixture(scope="session")
def an_f3_cone():
    """(complex, cone, ledger) for the full-flag type-A opposition over F3."""
    from hdxcones.buildings import an_cone, standard_flag
    from hdxcones.fqlinalg import GF

    F = GF(3)
    return an_cone(F, 3, tuple(standard_flag(F, 3)))
