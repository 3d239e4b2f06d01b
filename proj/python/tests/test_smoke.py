import json
import math

import numpy as np
import pytest

import rtmpy


def test_gates():
    g = rtmpy.du_gate_w_fixed(0.625)
    assert g.shape == (4, 4)
    assert np.allclose(g.conj().T @ g, np.eye(4))
    assert rtmpy.is_dual_unitary(g)
    assert not rtmpy.is_dual_unitary(np.eye(4, dtype=complex))
    assert rtmpy.entangling_power(g) == pytest.approx(0.625, abs=1e-9)
    assert rtmpy.averaged_gate(2, 0.75)[3, 3] == pytest.approx(0.5)


def test_influence_matches_normalization():
    g = rtmpy.du_gate_w_fixed(0.625)
    psi = rtmpy.random_dimer(2, 1)
    assert abs(rtmpy.one_point(g, 3, psi, np.eye(2)) - 1) < 1e-9
    spectra = rtmpy.rtm_spectra(g, 4, psi)
    assert len(spectra) == 6
    assert spectra[-1][0] == pytest.approx(1.0, abs=1e-9)
    assert sum(1 for x in spectra[0] if x > 0) == 1


def test_bounds_sandwich():
    rows = rtmpy.bounds(rtmpy.du_gate_w_fixed(0.625), 6, rtmpy.random_dimer(2, 1))
    for r in rows:
        assert r["lower"] <= r["exact"] + 1e-8 <= r["upper"] + 2e-8
        assert sum(r["p"]) == pytest.approx(1.0)


def test_sweep_certificate():
    rep = json.loads(rtmpy.sweep(rtmpy.du_gate_w_fixed(0.625), 4, rtmpy.random_dimer(2, 1), [2, 2, 2, 2]))
    for p in rep["probes"]:
        assert p["measured_error"] <= p["bound"]


def test_replica_and_rates():
    c = rtmpy.c_constant(rtmpy.random_dimer(2, 1), 2)
    pc = rtmpy.critical_p(2)
    for k in range(4):
        assert rtmpy.averaged_Ak(2, pc, 2, 3, k, c) == pytest.approx(rtmpy.closed_form_EAk(2, pc, 2, 3, k, c), abs=1e-12)
    assert rtmpy.r_mag_avg(pc, 2) == pytest.approx(2.0)
    series = [(t0, math.exp(-2 * t0 * math.log(2))) for t0 in range(8)]
    assert rtmpy.fit_pk_decay(series)["r_fit"] == pytest.approx(2.0)


def test_errors_are_raised():
    with pytest.raises(rtmpy.RtmError):
        rtmpy.du_gate_u(0.9)
    with pytest.raises(ValueError):
        rtmpy.closed_form_EAk(2, 0.5, 1, 1, 0, 1.0)
