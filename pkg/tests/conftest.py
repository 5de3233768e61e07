import numpy as np
import pytest

from arcsynth.rational import ComplexPoly, RationalFn, boundary_sup


def schur_from(zeros_in, zeros_out, poles_out, scale=0.7, phase=0.0):
    """Blaschke(zeros_in) * prod(z - b)/prod(z - d), normalized to sup = scale."""
    b = RationalFn.blaschke(zeros_in)
    f = b * RationalFn(ComplexPoly.from_roots(zeros_out), ComplexPoly.from_roots(poles_out)).reduced()
    return f * (scale * np.exp(1j * phase) / boundary_sup(f))


@pytest.fixture
def half_z():
    return RationalFn.from_coeffs([0, 0.5])


@pytest.fixture
def mixed_s():
    return schur_from([0.3 + 0.2j], [1.6 - 0.4j], [-1.4 + 0.9j], scale=0.8)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
