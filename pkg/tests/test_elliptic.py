import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from isodimer.elliptic import complete_elliptic_k, coupling, dual_parameter, jacobi_sn_cn
from isodimer.errors import DomainError


def elliptic_integral_quadrature(k, phi=math.pi / 2):
    val, err = quad(lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2),
                    0.0, phi, epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-11
    return val


def test_complete_k_at_zero():
    assert abs(complete_elliptic_k(0.0) - math.pi / 2) < 1e-15


def test_complete_k_lower_bound():
    for k in np.linspace(0.0, 0.999, 40):
        assert complete_elliptic_k(float(k)) >= math.pi / 2 - 1e-15


def test_complete_k_against_quadrature():
    for k in (0.1, 0.5, 0.9, 0.99):
        agm = complete_elliptic_k(k)
        ref = elliptic_integral_quadrature(k)
        assert abs(agm - ref) < 1e-10 * ref


def test_complete_k_domain():
    with pytest.raises(DomainError):
        complete_elliptic_k(1.0)
    with pytest.raises(DomainError):
        complete_elliptic_k(-0.1)


def test_sn_cn_trig_limit():
    for u in np.linspace(-2.0, 2.0, 17):
        sn, cn = jacobi_sn_cn(float(u), 0.0)
        assert abs(sn - math.sin(u)) < 1e-14
        assert abs(cn - math.cos(u)) < 1e-14


def test_sn_cn_origin_and_pythagoras():
    for k in (0.0, 0.3, 0.8, 0.99):
        sn, cn = jacobi_sn_cn(0.0, k)
        assert sn == pytest.approx(0.0, abs=1e-15)
        assert cn == pytest.approx(1.0, abs=1e-15)
        for u in np.linspace(-3.0, 3.0, 25):
            sn, cn = jacobi_sn_cn(float(u), k)
            assert abs(sn * sn + cn * cn - 1.0) < 1e-12


def test_sn_at_quarter_period():
    # the amplitude at u = K(k) solves the inverted incomplete integral
    for k in (0.2, 0.6, 0.9):
        bigk = complete_elliptic_k(k)
        phi = brentq(lambda p: elliptic_integral_quadrature(k, p) - bigk,
                     0.0, math.pi / 2 + 1e-9, xtol=1e-13)
        assert abs(phi - math.pi / 2) < 1e-9
        sn, _ = jacobi_sn_cn(bigk, k)
        assert abs(sn - 1.0) < 1e-10


def test_sn_cn_against_scipy():
    from scipy.special import ellipj
    rng = np.random.default_rng(5)
    for _ in range(30):
        u = float(rng.uniform(-4, 4))
        k = float(rng.uniform(0, 0.98))
        sn, cn = jacobi_sn_cn(u, k)
        sn_ref, cn_ref, _, _ = ellipj(u, k * k)
        assert abs(sn - sn_ref) < 1e-11
        assert abs(cn - cn_ref) < 1e-11


def test_critical_couplings_closed_forms():
    assert abs(coupling(math.pi / 4, 0.0)
               - math.log(math.sqrt(1 + math.sqrt(2)))) < 1e-12
    assert abs(coupling(math.pi / 3, 0.0)
               - math.log(math.sqrt(2 + math.sqrt(3)))) < 1e-12
    assert abs(coupling(math.pi / 6, 0.0) - 0.25 * math.log(3.0)) < 1e-12


def test_sinh_2j_equals_tan_theta_at_k0():
    thetas = np.linspace(1e-3, math.pi / 2 - 1e-3, 100)
    for t in thetas:
        j = coupling(float(t), 0.0)
        assert abs(math.sinh(2 * j) - math.tan(t)) < 1e-12 * max(1.0, math.tan(t))


def test_coth_j_is_fisher_weight():
    thetas = np.linspace(1e-3, math.pi / 2 - 1e-3, 100)
    for t in thetas:
        j = coupling(float(t), 0.0)
        assert abs(1.0 / math.tanh(j) - 1.0 / math.tan(t / 2)) \
            < 1e-12 / math.tan(t / 2)


def test_coupling_monotone_in_theta():
    for k in (0.0, 0.4, 0.9):
        grid = np.linspace(0.05, math.pi / 2 - 0.05, 100)
        vals = [coupling(float(t), k) for t in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_coupling_general_k_satisfies_defining_equation():
    for k in (0.3, 0.7):
        bigk = complete_elliptic_k(k)
        for t in (0.4, 0.9, 1.3):
            j = coupling(t, k)
            sn, cn = jacobi_sn_cn(2 * bigk * t / math.pi, k)
            assert abs(math.sinh(2 * j) - sn / cn) < 1e-11 * max(1.0, abs(sn / cn))


def test_dual_parameter():
    assert dual_parameter(0.0) == 0
    val = dual_parameter(0.6) ** 2
    assert abs(val.real + 0.5625) < 1e-14 and abs(val.imag) < 1e-14
    for k in (0.1, 0.5, 0.9):
        sq = dual_parameter(k) ** 2
        assert abs(sq.real + k * k / (1 - k * k)) < 1e-12


def test_coupling_domain_errors():
    with pytest.raises(DomainError):
        coupling(0.0, 0.0)
    with pytest.raises(DomainError):
        coupling(math.pi / 2, 0.0)
    with pytest.raises(DomainError):
        coupling(0.5, 1.0)
