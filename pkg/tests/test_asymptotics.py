import math

import mpmath as mp
import pytest

from lfvdw import AtomModel, MaterialModel
from lfvdw.asymptotics import (atom_retarded_factor, c1_nonretarded, c3_nonretarded,
                               c4_derivative_signs, c4_retarded, c4_small_contrast, coefficients,
                               microscopic_potentials, sphere_excess_polarizability,
                               sphere_potentials, sphere_retarded_factor)
from lfvdw.cavity import local_field_factor
from conftest import CASES, EQUAL_ELECTRIC, MEDIUM_1

PLASMA = (0.2, 0.4, 1.0)


def eps_static(wp, wt=1.03):
    return 1.0 + wp * wp / (wt * wt)


def c4_mp(eps1, mu1, eps2, mu2, alpha0=2 / 3):
    """Direct v-integral over [n2, inf) in extended precision."""
    n22 = eps2 * mu2

    def f(v):
        root = mp.sqrt(v * v - n22 + eps1 * mu1)
        rs = (mu1 * v - mu2 * root) / (mu1 * v + mu2 * root)
        rp = (eps1 * v - eps2 * root) / (eps1 * v + eps2 * root)
        return (rs + rp * (1 - 2 * v * v / n22)) / v**4

    with mp.workdps(30):
        integral = mp.quad(f, [mp.sqrt(n22), 2 * mp.sqrt(n22), mp.inf])
    return float(9 / 16 * alpha0 * local_field_factor(eps2) * mu2 * integral)


@pytest.mark.parametrize("args", [(1.5, 1.0, 1.0, 1.0), (1.0, 2.0, 1.3, 1.0),
                                  (2.2, 1.4, 1.5, 1.1)])
def test_c4_matches_extended_precision(args):
    assert c4_retarded(*args) == pytest.approx(c4_mp(*args), rel=1e-8)


def test_c4_identical_media_and_invalid_input():
    assert c4_retarded(1.7, 1.2, 1.7, 1.2) == 0.0
    with pytest.raises(ValueError):
        c4_retarded(0.5, 1.0, 1.0, 1.0)


@pytest.mark.parametrize("wp", PLASMA)
def test_pure_material_sign_laws(wp):
    e = eps_static(wp)
    m = 1.0 + wp * wp
    assert c4_retarded(e, 1, 1, 1) < 0
    assert c4_retarded(1, m, 1, 1) > 0
    assert c4_retarded(1, 1, e, 1) > 0
    assert c4_retarded(1, 1, 1, m) < 0


@pytest.mark.parametrize("point, key, sign", [((1.5, 1, 1, 1), "eps1", -1),
                                              ((1.5, 1.2, 1.1, 1.1), "mu1", 1),
                                              ((1.5, 1.2, 1.1, 1.1), "mu2", -1)])
def test_derivative_sign_examples(point, key, sign):
    assert c4_derivative_signs(*point)[key] == sign


def test_small_contrast_signs_and_accuracy():
    assert c4_small_contrast(1.0, 1.0, 0.01, 0.01) < 0
    assert c4_small_contrast(4.0, 1.0, 0.01, 0.01) > 0
    exact = c4_retarded(1.01, 1.01, 1.0, 1.0)
    assert c4_small_contrast(1.0, 1.0, 0.01, 0.01) == pytest.approx(exact, rel=0.02)


def test_c3_signs_and_trivial_cases():
    assert c3_nonretarded(MEDIUM_1, CASES[1]) < 0
    assert c3_nonretarded(MEDIUM_1, CASES[3]) > 0
    assert c3_nonretarded(CASES[2], CASES[2]) == 0.0
    assert c3_nonretarded(MaterialModel(), MaterialModel(omega_tm=1, omega_pm=1)) == 0.0


def test_c3_vacuum_host_has_no_local_field_dependence():
    glass = MaterialModel(1.0, 1.0, 0.01)
    a = c3_nonretarded(glass, MaterialModel(), local_field=True)
    b = c3_nonretarded(glass, MaterialModel(), local_field=False)
    assert a == b and a > 0


def test_c1_forms_agree_for_equal_permittivity():
    general = c1_nonretarded(MEDIUM_1, EQUAL_ELECTRIC)
    reduced = c1_nonretarded(MEDIUM_1, EQUAL_ELECTRIC, form="equal_electric")
    assert general == pytest.approx(reduced, rel=1e-10)
    assert general > 0  # mu1 > mu2
    assert c1_nonretarded(MaterialModel(), MaterialModel()) == 0.0


def test_coefficients_notes():
    c = coefficients(MEDIUM_1, CASES[1])
    assert len(c.notes) == 2 and "retarded" in c.notes[0]
    assert c.c4 == pytest.approx(0.10769, abs=5e-5)


def test_sphere_polarisability():
    vac = MaterialModel()
    two = MaterialModel(1.0, 1.0)  # eps(0) = 2
    assert sphere_excess_polarizability(two, vac, 1.0, 0.0) == pytest.approx(4 * math.pi / 4)
    assert sphere_excess_polarizability(two, two, 1.0, 0.3) == 0.0
    huge = MaterialModel(1.0, 1e5)
    assert sphere_excess_polarizability(huge, vac, 0.5, 0.0) == pytest.approx(
        4 * math.pi * 0.125, rel=1e-8)
    with pytest.raises(ValueError):
        sphere_excess_polarizability(two, vac, 0.0, 0.0)


def test_sphere_potentials_identical_media_vanish():
    m = MaterialModel(1.0, 0.5)
    nonret, ret = sphere_potentials(m, m, MaterialModel(1.0, 2.0), 0.1, 1.0)
    assert nonret == 0.0 and ret == 0.0
    with pytest.raises(ValueError):
        sphere_potentials(m, m, m, 1.0, 0.5)


def test_microscopic_nonretarded_is_c3_law():
    m1, m2 = MaterialModel(1.03, 0.75), MaterialModel(1.03, 0.4)
    nonret, _ = microscopic_potentials(m1, m2, AtomModel(), 0.3)
    assert nonret == pytest.approx(-c3_nonretarded(m1, m2) / 0.3**3, rel=1e-10)
    with pytest.raises(ValueError):
        microscopic_potentials(MEDIUM_1, m2, None, 0.3)


def test_microscopic_retarded_is_c4_law():
    m1, m2 = MaterialModel(1.03, 0.75), MaterialModel(1.03, 0.4)
    _, ret = microscopic_potentials(m1, m2, AtomModel(), 50.0)
    expected = c4_retarded(m1.eps0, 1.0, m2.eps0, 1.0) / 50.0**4
    assert ret == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("e2", [1.0, 1.5, 3.0])
def test_retarded_factors_agree_at_small_contrast(e2):
    chi = 1e-4 * e2
    atom = atom_retarded_factor(e2 + chi, e2)
    sphere = sphere_retarded_factor(e2 + chi, e2)
    assert atom == pytest.approx(sphere, rel=1e-3)
