import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def full_operator(matrix, qubits, n):
    """Brute-force 2^n x 2^n embedding of an operand-basis matrix (first operand = MSB).

    Built by looping over basis states, independently of the simulator's tensordot path.
    """
    dim = 2**n
    k = len(qubits)
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        sub_in = 0
        for j, q in enumerate(qubits):
            sub_in |= ((col >> q) & 1) << (k - 1 - j)
        for sub_out in range(2**k):
            row = col
            for j, q in enumerate(qubits):
                bit = (sub_out >> (k - 1 - j)) & 1
                row = (row & ~(1 << q)) | (bit << q)
            out[row, col] += matrix[sub_out, sub_in]
    return out


def random_state(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
