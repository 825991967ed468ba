import numpy as np
import pytest

from qgrad.image import GrayImage


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_image(rng):
    def make(h, w, lo=0, hi=255):
        return GrayImage(rng.integers(lo, hi + 1, size=(h, w)))

    return make


def dense_shift(n: int) -> np.ndarray:
    """The shift matrix written out: ones on the superdiagonal plus bottom-left."""
    d = np.zeros((n, n))
    for j in range(n - 1):
        d[j, j + 1] = 1.0
    d[n - 1, 0] = 1.0
    return d


def dense_lag2_pipeline(c: np.ndarray) -> np.ndarray:
    """(I (x) H) D (I (x) X) D (|c> (x) |+>) with explicit Kronecker matrices.

    The ancilla is the right-hand Kronecker factor (least-significant bit).
    """
    n = c.size
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    eye = np.eye(n)
    d = dense_shift(2 * n)
    psi = np.kron(c, plus)
    psi = d @ psi
    psi = np.kron(eye, x) @ psi
    psi = d @ psi
    return np.kron(eye, h) @ psi


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
