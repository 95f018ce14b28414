import math

import numpy as np
import pytest
from scipy import integrate

from qdynent.ensemble import (
    CATALAN,
    EULER_GAMMA,
    M_C2,
    MEAN_HDYN_D2,
    McEstimate,
    gap_to_theta,
    harmonic_mean_entropy,
    m_c3_quadrature,
    mc_chaotic_volume,
    mc_mean_fixed_pvm,
    mc_mean_hdyn_d2,
    mc_mean_maxent,
    t3_radicand_polar,
    trace_density_d3,
    trace_normalization_d3,
    weyl_average_d2,
    weyl_mean_hdyn_d2,
    weyl_volume_d2,
)
from qdynent.entropy import entropy_rate
from qdynent.errors import DimensionError
from qdynent.haar import HaarSampler, haar_unitary
from qdynent.matcore import is_unitary
from qdynent.maxent import hdyn_from_theta
from qdynent.measure import computational_pvm


def test_constants():
    assert M_C2 == pytest.approx(0.818310, abs=1e-6)
    assert MEAN_HDYN_D2 == pytest.approx(0.67213, abs=1e-5)
    catalan = sum((-1) ** n / (2 * n + 1) ** 2 for n in range(200000))
    assert CATALAN == pytest.approx(catalan, abs=1e-10)
    assert harmonic_mean_entropy(4) == pytest.approx(13 / 12)


def test_haar_sampler_reproducible_and_unitary():
    a = HaarSampler(3, seed=5).sample(10)
    b = HaarSampler(3, seed=5).sample(10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, HaarSampler(3, seed=6).sample(10))
    assert not np.array_equal(a, HaarSampler(3, seed=5, stream=1).sample(10))
    for U in a:
        assert is_unitary(U, 1e-9).passed
    z = haar_unitary(HaarSampler(1, 3))
    assert z.shape == (1, 1) and abs(abs(z[0, 0]) - 1) < 1e-12


def test_haar_phase_of_d1_uniform():
    ph = np.angle(HaarSampler(1, 0).sample(20000)[:, 0, 0])
    hist, _ = np.histogram(ph, bins=8, range=(-math.pi, math.pi))
    assert np.abs(hist / 20000 - 1 / 8).max() < 0.01


def test_haar_left_invariance_smoke():
    pvm = computational_pvm(3)
    U = HaarSampler(3, 1).sample(20000)
    V = HaarSampler(3, 99).sample()
    a, b = entropy_rate(U, pvm), entropy_rate(V @ U, pvm)
    se = math.hypot(a.std() / math.sqrt(a.size), b.std() / math.sqrt(b.size))
    assert abs(a.mean() - b.mean()) < 3 * se


def test_weyl_average_examples():
    assert weyl_average_d2(lambda phi: 1.0) == pytest.approx(1, abs=1e-12)
    assert weyl_volume_d2() == pytest.approx(M_C2, abs=1e-6)
    assert weyl_mean_hdyn_d2() == pytest.approx(MEAN_HDYN_D2, abs=1e-5)


def test_weyl_d2_against_scipy_quad():
    w = lambda phi: abs(np.exp(1j * phi) - 1) ** 2 / (4 * math.pi)
    f = lambda phi: float(hdyn_from_theta(gap_to_theta(phi))) * w(phi)
    val = integrate.quad(f, 0, 2 * math.pi, points=[math.pi / 2, 3 * math.pi / 2], limit=200)[0]
    assert weyl_mean_hdyn_d2() == pytest.approx(val, abs=1e-6)


def _quad(f):
    return integrate.quad(f, 0, math.pi / 2, limit=200)[0]


def test_catalan_integral_self_checks():
    ln2, C = math.log(2), CATALAN
    a2 = _quad(lambda t: math.cos(t) * math.log(1 - math.cos(t)))
    a3 = _quad(lambda t: math.log(1 + math.cos(t)))
    a4 = _quad(lambda t: math.log(1 - math.cos(t)))
    a5 = _quad(lambda t: math.cos(t) ** 2 * math.log((1 + math.cos(t)) / (1 - math.cos(t))))
    assert a2 == pytest.approx(-(1 + math.pi / 2), abs=1e-9)
    assert a3 == pytest.approx(-math.pi / 2 * ln2 + 2 * C, abs=1e-9)
    assert a4 == pytest.approx(-math.pi / 2 * ln2 - 2 * C, abs=1e-9)
    assert a5 == pytest.approx(1 + 2 * C, abs=1e-9)
    assert _quad(lambda t: t / math.sin(t) if t else 1.0) == pytest.approx(2 * C, abs=1e-9)
    total = ln2 + a2 / math.pi - (a3 + a4) / (2 * math.pi) + a5 / (2 * math.pi)
    assert total == pytest.approx(MEAN_HDYN_D2, abs=1e-9)


def test_trace_density_d3():
    assert trace_density_d3(3) == 0
    assert t3_radicand_polar(3, 0) == pytest.approx(0, abs=1e-12)
    assert trace_density_d3(4) == 0
    x = np.linspace(-4, 4, 201)
    tau = x[:, None] + 1j * x[None, :]
    dens = trace_density_d3(tau)
    assert dens.min() >= 0
    assert np.all(dens[np.abs(tau) > 3] == 0)


def test_trace_density_normalization_and_mean():
    assert trace_normalization_d3(512, 1024) == pytest.approx(1, abs=1e-3)
    # E|tr U|^2 = 1 on SU(3) as on U(3)
    R = (np.arange(512) + 0.5) * 3 / 512
    T = (np.arange(1024) + 0.5) * 2 * math.pi / 1024
    RR, TT = np.meshgrid(R, T, indexing="ij")
    dA = RR * (3 / 512) * (2 * math.pi / 1024)
    m2 = (RR**2 * trace_density_d3(RR * np.exp(1j * TT)) * dA).sum()
    assert m2 == pytest.approx(1, abs=2e-3)


def test_m_c3_lobes_symmetric():
    a = m_c3_quadrature(256, 512, lobes=(0,))
    b = m_c3_quadrature(256, 512, lobes=(1,))
    assert a == pytest.approx(b, abs=1e-9)
    assert m_c3_quadrature(256, 512) == pytest.approx(0.592, abs=5e-3)
    with pytest.raises(ValueError):
        m_c3_quadrature(100, 512)


def test_mc_volume_small_and_errors():
    est = mc_chaotic_volume(2, 100, seed=3, min_samples=1)
    assert abs(est.mean - M_C2) <= 5 * max(est.std_error, 1e-3)
    with pytest.raises(DimensionError):
        mc_chaotic_volume(4, 10**4)
    with pytest.raises(ValueError):
        mc_chaotic_volume(2, 10)


def test_mc_reproducible_per_worker_count():
    a = mc_chaotic_volume(3, 10**4, seed=2, workers=3)
    b = mc_chaotic_volume(3, 10**4, seed=2, workers=3)
    assert a == b and a.worker_count == 3
    assert isinstance(a, McEstimate)
    assert set(a.as_dict()) >= {"mean", "std_error", "samples", "seed", "worker_count"}


def test_mc_std_error_definition():
    est = mc_mean_hdyn_d2(10**4, seed=5)
    assert est.samples == 10**4
    assert est.mean == pytest.approx(MEAN_HDYN_D2, abs=0.01)
    assert abs(est.mean - weyl_mean_hdyn_d2()) < 3 * est.std_error + 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_mc_mean_fixed_pvm(d):
    est = mc_mean_fixed_pvm(d, 20000, seed=d)
    assert abs(est.mean - harmonic_mean_entropy(d)) < 3 * est.std_error
    assert math.log(d) - (1 - EULER_GAMMA) < harmonic_mean_entropy(d)


@pytest.mark.parametrize("d", [4, 5])
def test_harmonic_chain_higher_dims(d):
    # cheap optimizer budget; its values only need to bound the harmonic mean from above
    est = mc_mean_maxent(d, 30, seed=d, starts=2, max_iters=300)
    harm = harmonic_mean_entropy(d)
    assert math.log(d) - (1 - EULER_GAMMA) < harm <= est.mean + 3 * est.std_error
    assert est.mean <= math.log(d) + 1e-12
    assert est.lower_bound
