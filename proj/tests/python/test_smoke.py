import math

import numpy as np
import pytest

import wgqed


def test_laguerre_roots_cubic():
    roots = wgqed.laguerre_roots(3, 1)
    assert len(roots) == 3
    assert math.isclose(roots.sum(), 12.0, rel_tol=1e-12)
    for r in roots:
        assert abs(r**3 - 12 * r**2 + 36 * r - 24) < 1e-9


def test_bessel_zero():
    z = wgqed.bessel_j1_zeros(3)
    assert abs(z[0] - 3.8317059702075123) < 1e-10
    assert abs(wgqed.bessel_j(1, z[2])) < 1e-12


def test_od_examples():
    p = wgqed.EnsembleParams.uniform(4, 0.4)
    assert math.isclose(wgqed.od(p), -8 * math.log(0.2), rel_tol=1e-12)
    assert math.isinf(wgqed.od(wgqed.EnsembleParams.uniform(3, 0.5)))
    assert wgqed.atoms_for_od(31, 0.0055) == 1409


def test_timed_dicke_and_passages():
    p = wgqed.EnsembleParams.uniform(4, 0.4)
    assert np.allclose(wgqed.timed_dicke(p), 0.5)
    taus = wgqed.subradiant_times(p)
    assert len(taus) == 3
    for t in taus:
        assert abs(wgqed.chi_td(4, t, p)) < 1e-12
    assert math.isclose(wgqed.gamma_ens_t0(p), 4.4, rel_tol=1e-12)


def test_single_atom_delta_response():
    p = wgqed.EnsembleParams.uniform(1, 0.3)
    grid = wgqed.TimeGrid(4096, 100.0, 512)
    f = wgqed.propagate_delta(p, grid)
    t = f["times"]
    sel = (t > 0.1) & (t < 6.0)
    expected = -2 * 0.3 * np.exp(-t[sel])
    assert np.max(np.abs(f["emitted"][sel] - expected)) < 1e-9


def test_passivity():
    p = wgqed.EnsembleParams.from_betas([0.1, 0.4, 0.9, 0.2])
    tr = wgqed.ensemble_transmission(np.linspace(-20, 20, 401), p)
    assert np.all(np.abs(tr) <= 1 + 1e-12)


def test_errors_are_typed():
    with pytest.raises(wgqed.DomainError):
        wgqed.EnsembleParams.uniform(3, 1.5)
    with pytest.raises(wgqed.UnsupportedConfiguration):
        wgqed.phi_td(1, 0.0, wgqed.EnsembleParams.from_betas([0.1, 0.2]))
