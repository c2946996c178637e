import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from cliffwave.sphere import SpectralCoefficients, SphereTransform, build_basis
from cliffwave.wavelets import (
    PROFILES,
    ScaleGrid,
    SpectralProfile,
    WaveletCoefficients,
    WaveletFamily,
    approximate_identity_report,
    discrete_scale_integral,
    heat_kernel,
    reconstruction_defect,
    scale_integral,
    semigroup_check,
    sphere_convolution,
    truncation_bound,
    wavelet_family,
    wavelet_reconstruct,
    wavelet_transform,
    wavelet_weight,
)


@pytest.fixture(scope="module")
def basis():
    return build_basis(2, 8)


@pytest.fixture(scope="module")
def transform(basis):
    return SphereTransform(basis)


def test_profile_eigenvalues():
    h = SpectralProfile("heat-h", 2)
    assert [h.eigenvalue(k, "V") for k in range(4)] == [0, 2, 6, 12]
    assert [h.eigenvalue(k, "W") for k in range(4)] == [2, 6, 12, 20]
    l = SpectralProfile("heat-l", 2)
    assert l.eigenvalue(0, "V") == l.eigenvalue(0, "W") == 0.75
    assert SpectralProfile("modified", 3).eigenvalue(2, "W") == 10
    with pytest.raises(ValueError):
        SpectralProfile("nope", 2)


def test_heat_kernel_requires_positive_time(basis):
    with pytest.raises(ValueError):
        heat_kernel(SpectralProfile("heat-h", 2), 0.0, basis)


@pytest.mark.parametrize("name", PROFILES)
def test_semigroup(name, basis):
    p = SpectralProfile(name, 2)
    for t in (0.1, 0.5, 1.0):
        for s in (0.1, 0.5, 1.0):
            assert semigroup_check(p, t, s, basis)["max_error"] <= 1e-12


def test_convolution_band_mismatch(basis):
    p = heat_kernel(SpectralProfile("heat-h", 2), 0.1, basis)
    q = heat_kernel(SpectralProfile("heat-h", 2), 0.1, build_basis(2, 3))
    with pytest.raises(ValueError):
        sphere_convolution(p, q)


def test_convolution_with_zero(basis, transform, rng):
    f = transform.random_coefficients(rng)
    z = SpectralCoefficients(2, basis.keys, np.zeros_like(f.values))
    assert sphere_convolution(z, f).norm() == 0


def test_truncation_bound_decreases():
    p = SpectralProfile("heat-h", 2)
    assert truncation_bound(p, 1.0, 8) < truncation_bound(p, 0.1, 8)


def test_grid():
    g = ScaleGrid()
    r = g.rhos
    assert r[0] == 1e-3 and r[-1] <= 20 < r[-1] * 1.05
    assert np.allclose(g.edges[1:-1], np.sqrt(r[:-1] * r[1:]))
    with pytest.raises(ValueError):
        ScaleGrid(1.0, 0.5)
    with pytest.raises(ValueError):
        ScaleGrid(ratio=1.0)


@given(st.floats(0.01, 50), st.floats(0.0, 3.0))
def test_scale_integral_closed_form(lam, t):
    got, _ = quad(lambda r: wavelet_weight(lam, r) ** 2, t, np.inf)
    assert scale_integral(lam, t) == pytest.approx(got, rel=1e-7, abs=1e-12)


@pytest.mark.parametrize("name", PROFILES)
def test_admissibility_default_grid(name):
    p = SpectralProfile(name, 2)
    grid = ScaleGrid()
    for k in range(9):
        for part in ("V", "W"):
            lam = p.eigenvalue(k, part)
            for t in (0.01, 0.1, 1.0):
                assert abs(discrete_scale_integral(lam, t, grid) - math.exp(-lam * t)) <= 1e-4


def test_admissibility_converges_with_ratio():
    lam, t = 20.0, 0.1
    errs = [abs(discrete_scale_integral(lam, t, ScaleGrid(ratio=q)) - math.exp(-lam * t)) for q in (1.2, 1.1, 1.05)]
    assert errs[0] > errs[1] > errs[2]


def test_zero_mode_is_kept_in_coarse_channel(basis):
    fam = wavelet_family(SpectralProfile("heat-h", 2), ScaleGrid(), basis)
    j = basis.keys.index("0/0,0/V")
    assert fam.coarse()[j] == 1 and fam.fine()[j] == 0
    assert np.all(fam.weights()[:, j] == 0)


@pytest.mark.parametrize("name", PROFILES)
def test_reconstruction(name, basis, transform, rng):
    fam = wavelet_family(SpectralProfile(name, 2), ScaleGrid(), basis)
    c = transform.random_coefficients(rng)
    Wf = wavelet_transform(c, fam, basis.keys, 2)
    approx = wavelet_reconstruct(Wf, fam)
    exact = wavelet_reconstruct(Wf, fam, exact_scales=True)
    assert np.abs(approx - c.values).max() / np.abs(c.values).max() <= 1e-3
    assert np.abs(exact - c.values).max() / np.abs(c.values).max() <= 1e-12
    assert reconstruction_defect(fam).max() <= 1e-3


def test_reconstruct_refuses_other_family(basis, transform, rng):
    fam = wavelet_family(SpectralProfile("heat-h", 2), ScaleGrid(), basis)
    other = wavelet_family(SpectralProfile("heat-l", 2), ScaleGrid(), basis)
    Wf = wavelet_transform(transform.random_coefficients(rng), fam, basis.keys, 2)
    with pytest.raises(ValueError):
        wavelet_reconstruct(Wf, other)


def test_transform_band_violation(basis):
    fam = wavelet_family(SpectralProfile("heat-h", 2), ScaleGrid(), basis)
    with pytest.raises(ValueError):
        wavelet_transform(np.zeros((3, 8)), fam, basis.keys[:3], 2)


def test_transform_zero_signal(basis):
    fam = wavelet_family(SpectralProfile("modified", 2), ScaleGrid(), basis)
    Wf = wavelet_transform(np.zeros((len(basis.keys), 8)), fam, basis.keys, 2)
    assert not Wf.scales.any() and not Wf.fine.any() and not Wf.coarse.any()


def test_wavelet_json_roundtrip(basis, transform, rng):
    fam = wavelet_family(SpectralProfile("heat-h", 2), ScaleGrid(1e-2, 5.0, 1.3), basis)
    Wf = wavelet_transform(transform.random_coefficients(rng), fam, basis.keys, 2)
    back = WaveletCoefficients.from_json(json.loads(json.dumps(Wf.to_json())))
    assert back.family_id == fam.fingerprint()
    assert np.array_equal(back.scales, Wf.scales)
    assert np.array_equal(wavelet_reconstruct(back, fam), wavelet_reconstruct(Wf, fam))


def test_fingerprint_depends_on_grid():
    lam = np.array([0.0, 2.0, 6.0])
    a = WaveletFamily("heat-h", ScaleGrid(), lam)
    b = WaveletFamily("heat-h", ScaleGrid(ratio=1.1), lam)
    assert a.fingerprint() != b.fingerprint()
    assert a.fingerprint() == WaveletFamily("heat-h", ScaleGrid(), lam.copy()).fingerprint()


@pytest.mark.parametrize("name", PROFILES)
def test_approximate_identity(name):
    assert approximate_identity_report(SpectralProfile(name, 2), 8)["ok"]


def test_heat_smooths(transform, rng):
    p = heat_kernel(SpectralProfile("heat-h", 2), 0.5, transform.basis)
    c = transform.random_coefficients(rng)
    assert sphere_convolution(c, p).norm() < c.norm()
