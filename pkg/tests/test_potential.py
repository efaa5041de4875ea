import math
from dataclasses import replace

import mpmath as mp
import pytest

from lfvdw import AtomModel, Layer, LayerStack, MaterialModel
from lfvdw.potential import (NINHAM_FACTOR, ScanRequest, distance_guard, force_at, interface_value,
                             ninham_interface_value, ninham_length, run_scan, three_layer_stack,
                             total_at, two_layer_stack, u2_at, u2_full)
from lfvdw.quadrature import QuadratureSpec
from oracles import alpha_two_level, eps_mu, u2_two_layer_simpson
from conftest import CASES, MEDIUM_1

VAC = MaterialModel()


def test_vacuum_everywhere_is_zero():
    stack = three_layer_stack(VAC, VAC, VAC, 1.0)
    res = u2_full(stack)
    assert (res.u2, res.force, res.evaluations) == (0.0, 0.0, 0)


def test_two_layers_have_no_even_part():
    assert u2_at(two_layer_stack(MEDIUM_1, CASES[2], z_global=0.3))[1] == 0.0
    assert u2_at(two_layer_stack(MEDIUM_1, CASES[2], z_global=-0.3))[1] == 0.0


@pytest.mark.parametrize("z", [0.1, -0.4])
def test_two_layer_matches_fixed_grid_oracle(z):
    stack = two_layer_stack(MEDIUM_1, CASES[1], z_global=z)
    host, other = (CASES[1], MEDIUM_1) if z > 0 else (MEDIUM_1, CASES[1])
    spec = QuadratureSpec(rel_tol=1e-10)
    for lf in (True, False):
        engine = sum(u2_at(stack, corrected=lf, spec=spec))
        oracle = u2_two_layer_simpson(host, other, abs(z), n=2048, local_field=lf)
        assert engine == pytest.approx(oracle, rel=1e-6)


def test_mirror_symmetry_in_symmetric_slab():
    d = 2.0
    left = three_layer_stack(MEDIUM_1, CASES[2], MEDIUM_1, d, z_global=0.6)
    right = three_layer_stack(MEDIUM_1, CASES[2], MEDIUM_1, d, z_global=d - 0.6)
    a, b = u2_full(left), u2_full(right)
    assert a.u2 == pytest.approx(b.u2, rel=1e-12)
    assert a.force == pytest.approx(-b.force, rel=1e-10)
    centre = u2_full(three_layer_stack(MEDIUM_1, CASES[2], MEDIUM_1, d))
    assert abs(centre.force) < 1e-10 * abs(centre.u2) / d


def test_thick_slab_approaches_half_space():
    for z in (0.05, 0.1):
        two = sum(u2_at(two_layer_stack(MEDIUM_1, CASES[2], z_global=z)))
        three = sum(u2_at(three_layer_stack(MEDIUM_1, CASES[2], CASES[1], 40.0, z_global=z)))
        assert three == pytest.approx(two, rel=0.01)


def test_even_part_smaller_than_odd():
    for z in (0.5, 1.0, 2.5):
        odd, even = u2_at(three_layer_stack(MEDIUM_1, CASES[2], VAC, 5.0, z_global=z))
        assert abs(even) <= abs(odd)


def test_force_sign_follows_attraction():
    # Case 3 host is attracted towards medium 1 at z < 0 in global coordinates.
    z = 0.05
    stack = two_layer_stack(MEDIUM_1, CASES[3], z_global=z)
    assert sum(u2_at(stack)) < 0 and force_at(stack) < 0


def test_atom_on_interface_raises():
    stack = LayerStack((Layer(MEDIUM_1), Layer(CASES[2])), 2, 0.0, 0.01)
    with pytest.raises(ValueError):
        u2_full(stack)


def test_distance_guard_flags():
    close = two_layer_stack(MEDIUM_1, CASES[2], z_global=0.005)
    assert distance_guard(close) is not None
    assert "distance_guard" in total_at(close, include_force=False).flags
    assert distance_guard(two_layer_stack(MEDIUM_1, CASES[2], z_global=0.5)) is None


def test_total_is_u1_plus_u2():
    res = total_at(two_layer_stack(MEDIUM_1, CASES[2], z_global=0.2))
    assert res.total == res.u1 + res.u2_odd + res.u2_even
    assert res.converged and res.applicable


# -- interface estimates --------------------------------------------------------

def test_interface_vacuum_is_zero():
    assert interface_value(two_layer_stack(VAC, VAC)) == 0.0


def test_interface_bulk_identity():
    m = CASES[2]
    r = 0.01
    value = interface_value(two_layer_stack(m, m, cavity_radius=r))

    def f(xi):
        e, _ = eps_mu(m, float(xi))
        return -9 * alpha_two_level(float(xi)) * (e - 1) / ((2 * e + 1) * r**3)

    assert value == pytest.approx(float(mp.quad(f, [0, 1, mp.inf])), rel=1e-8)


def test_interface_closed_form_matches_numeric_average():
    m = replace(CASES[2], omega_pm=0.4)
    stack = two_layer_stack(MEDIUM_1, m)
    closed = interface_value(stack, mode="closed_form")
    numeric = interface_value(stack, mode="numeric")
    assert numeric == pytest.approx(closed, rel=0.1)


def test_interface_mode_validation():
    stack = two_layer_stack(MEDIUM_1, CASES[2])
    with pytest.raises(ValueError):
        interface_value(stack, mode="average")
    with pytest.raises(ValueError):
        interface_value(stack, interface_index=2)


def test_ninham_scaling_and_mapping():
    assert NINHAM_FACTOR == pytest.approx(1.444, abs=1e-3)
    assert ninham_length(0.01) == pytest.approx(0.01444, abs=1e-5)
    a = ninham_interface_value(VAC, VAC, AtomModel(), 0.01)
    b = ninham_interface_value(VAC, VAC, AtomModel(), 0.02)
    assert a != 0.0 and a == pytest.approx(8 * b, rel=1e-12)
    with pytest.raises(ValueError):
        ninham_interface_value(VAC, VAC, None, 0.0)


# -- scans ---------------------------------------------------------------------

def _request(**kw):
    base = dict(stack=two_layer_stack(MEDIUM_1, CASES[2]), start=0.05, stop=0.5, count=4,
                include_u1=False)
    base.update(kw)
    return ScanRequest(**base)


def test_scan_grid_order_and_guard():
    req = _request(both_sides=True, start=0.005, count=3, spacing="log")
    grid = req.grid()
    assert grid == sorted(grid) and all(abs(v) >= 0.01 for v in grid)
    assert len(_request(both_sides=True, start=0.005, count=3, spacing="log",
                        override_distance_guard=True).grid()) == 6


def test_scan_rows_in_grid_order_and_parallel_equals_serial():
    serial = run_scan(_request())
    parallel = run_scan(_request(workers=2))
    assert [r.value for r in serial] == _request().grid()
    assert serial == parallel


def test_scan_records_faults_per_row():
    stack = three_layer_stack(MEDIUM_1, CASES[2], VAC, 2.0)
    req = ScanRequest(stack=stack, axis="thickness", values=(2.0, -1.0), z=1.0,
                      include_u1=False)
    good, bad = run_scan(req)
    assert not any(f.startswith("fault:") for f in good.flags)
    assert any(f.startswith("fault:") for f in bad.flags) and math.isnan(bad.total)


def test_scan_without_local_field():
    row = run_scan(_request(local_field=False, count=2))[0]
    assert row.u2_odd == row.u2_uncorrected
    assert row.delta_u2 == row.u2_corrected - row.u2_uncorrected


@pytest.mark.parametrize("kwargs", [dict(axis="x"), dict(count=1), dict(spacing="cubic"),
                                    dict(spacing="log", start=-1.0)])
def test_scan_request_validation(kwargs):
    with pytest.raises(ValueError):
        _request(**kwargs)
