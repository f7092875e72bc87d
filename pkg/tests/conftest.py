"""Shared fixtures and field builders for the test suite."""

import numpy as np
import pytest

from dgmhd.basis import BasisSpec
from dgmhd.dg import ModalField
from dgmhd.mesh import Mesh

GAMMA = 5.0 / 3.0

# one line per acceptance check, echoed after the run so the gate can be read
# off the end of any full-suite log
ACCEPTANCE_LINES = []


def pytest_collection_modifyitems(items):
    """Run the long acceptance gate after the fast unit tests."""
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance gate")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# a comfortably admissible reference state used as the base of random fields
BASE_STATE = np.array([1.5, 0.3, -0.2, 0.1, 4.0, 0.4, -0.3, 0.2])


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


def make_mesh(nx=4, ny=4, box=(0.0, 1.0, 0.0, 1.0), bc="periodic"):
    return Mesh(box[0], box[1], box[2], box[3], nx, ny, bc_x=bc, bc_y=bc)


def random_field(mesh, basis, rng, amp=0.05, base=BASE_STATE):
    """Admissible random field: base averages plus small modal noise."""
    coeffs = amp * rng.standard_normal((basis.n_basis, 8, mesh.ny, mesh.nx))
    coeffs[0] += np.asarray(base)[:, None, None]
    return ModalField(coeffs, mesh, basis)


def random_states(rng, n):
    """(8, n) conserved states that are safely admissible."""
    rho = rng.uniform(0.2, 5.0, n)
    vel = rng.uniform(-2.0, 2.0, (3, n))
    p = rng.uniform(0.05, 10.0, n)
    mag = rng.uniform(-2.0, 2.0, (3, n))
    kin = 0.5 * rho * (vel ** 2).sum(axis=0)
    pm = 0.5 * (mag ** 2).sum(axis=0)
    ener = p / (GAMMA - 1.0) + kin + pm
    return np.stack([rho, rho * vel[0], rho * vel[1], rho * vel[2],
                     ener, mag[0], mag[1], mag[2]])


def p2_basis():
    return BasisSpec(2)
