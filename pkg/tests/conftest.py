import math

import pytest

from specdet import (
    BoundaryForm,
    CoefficientSet,
    IntegratorConfig,
    SpectralProblem,
    make_coefficient,
)

# Tighter-than-default stepper settings for assertions near roundoff.
TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)

# Collapsed determinant of the workhorse symmetric problem at d = 1/2:
# -0.75 * exp(-1/8).
DELTA_SYMMETRIC_D_HALF = -0.75 * math.exp(-0.125)


def degenerate(coeffs: CoefficientSet, d, cfg: IntegratorConfig | None = None):
    return SpectralProblem(coeffs, BoundaryForm.degenerate(d), cfg or IntegratorConfig())


@pytest.fixture(scope="session")
def zeros2():
    return CoefficientSet.zeros(2)


@pytest.fixture(scope="session")
def zeros4():
    return CoefficientSet.zeros(4)


@pytest.fixture(scope="session")
def symmetric2():
    """p1 = x - 1/2 (odd about 1/2), p2 = cos(2 pi x) (even about 1/2)."""
    return CoefficientSet(
        2,
        (
            make_coefficient("polynomial", (-0.5, 1.0)),
            make_coefficient("cosine-series", (1.0,)),
        ),
    )


@pytest.fixture(scope="session")
def asymmetric2():
    """p1 = x - 1/2 kept, p2 = x breaks the even symmetry."""
    return CoefficientSet(
        2,
        (
            make_coefficient("polynomial", (-0.5, 1.0)),
            make_coefficient("polynomial", (0.0, 1.0)),
        ),
    )


@pytest.fixture(scope="session")
def dirichlet2(zeros2):
    """u'' = lambda u with u(0) = u(1) = 0 in the general two-point form."""
    a = [[1.0, 0.0], [0.0, 0.0]]
    b = [[0.0, 0.0], [1.0, 0.0]]
    return SpectralProblem(zeros2, BoundaryForm.general(a, b))
