import cmath
import math

import numpy as np
import pytest

from qdynent.chaos import (
    Membership,
    Method,
    Status,
    TraceRegion,
    alpha_factors,
    benchmark_hadamard,
    classify,
    ct_region,
    distinct_alpha_powers,
    exact_chaotic_batch,
    exact_d3_codes,
    hadamard_defect,
    hypocycloid_point,
    in_T3,
    in_trace_region,
    permutation_sign,
    t3_radicand,
)
from qdynent.errors import DimensionError, DomainError, SizeError
from qdynent.matcore import det
from qdynent.maxent import hdyn_closed_form_d2, pvm_dynamical_entropy

from conftest import fourier_unitary, haar


def test_hypocycloid_examples():
    assert hypocycloid_point(3, 0) == pytest.approx(3)
    assert hypocycloid_point(3, math.pi) == pytest.approx(-1)
    t = np.linspace(0, 6, 13)
    assert np.allclose(hypocycloid_point(2, t), 2 * np.cos(t))
    with pytest.raises(ValueError):
        hypocycloid_point(1, 0.0)


def test_in_T3_examples():
    assert in_T3(0) is Membership.INSIDE
    assert in_T3(3) is Membership.BOUNDARY
    assert in_T3(2.5) is Membership.INSIDE
    assert in_T3(-1) is Membership.BOUNDARY
    assert in_T3(-1.01) is Membership.OUTSIDE
    assert in_T3(3.001) is Membership.OUTSIDE
    w = cmath.exp(2j * math.pi / 3)
    assert in_T3(3 * w) is Membership.BOUNDARY
    with pytest.raises(ValueError):
        in_T3(0, tol=0)


def test_in_T3_matches_radicand():
    rng = np.random.default_rng(5)
    tau = rng.uniform(-3.2, 3.2, 4000) + 1j * rng.uniform(-3.2, 3.2, 4000)
    rad = t3_radicand(tau)
    far = np.abs(rad) > 1e-6
    got = np.array([m is not Membership.OUTSIDE for m in in_T3(tau[far])])
    assert np.array_equal(got, rad[far] > 0)


def test_in_T3_traces_of_su3_inside():
    for U in haar(3, 2, n=200):
        beta = det(U) ** (1 / 3)
        assert in_T3(np.trace(U) / beta) is not Membership.OUTSIDE


def test_trace_region_invariants():
    for d in (2, 3, 5):
        r = TraceRegion.build(d, scale=0.7, rotation=cmath.exp(0.3j))
        assert abs(r.boundary[0] - r.rotation * r.scale * d) < 1e-12
        assert r.boundary[0] == r.boundary[-1]
    with pytest.raises(ValueError):
        TraceRegion.build(3, samples=10)


def test_in_trace_region_examples():
    T3 = TraceRegion.build(3)
    assert in_trace_region(T3, 0) is Membership.INSIDE
    assert in_trace_region(T3, 3) is Membership.BOUNDARY
    assert in_trace_region(T3, 2.5) is in_T3(2.5)
    T2 = TraceRegion.build(2)
    assert in_trace_region(T2, 1.2) is Membership.INSIDE
    assert in_trace_region(T2, 2) is Membership.BOUNDARY
    assert in_trace_region(T2, 0.1j) is Membership.OUTSIDE


def test_polyline_agrees_with_root_test_on_grid():
    from qdynent.chaos import _segment_distance

    region = TraceRegion.build(3)
    x = np.linspace(-3.3, 3.3, 100)
    tau = (x[:, None] + 1j * x[None, :]).ravel()
    poly = np.array([m is not Membership.OUTSIDE for m in in_trace_region(region, tau)])
    roots = np.array([m is not Membership.OUTSIDE for m in in_T3(tau)])
    # the true curve is within sag of the polyline
    sag = region.sag_bound()
    dist = np.concatenate([
        _segment_distance(chunk, region.boundary[:-1], region.boundary[1:])
        for chunk in np.array_split(tau, 20)
    ]) - sag
    keep = dist > 2 * max(1e-7, sag)
    assert keep.sum() > 9900
    assert np.array_equal(poly[keep], roots[keep])


def test_alpha_factor_invariants():
    for label, kw in (("F3", {}), ("F4", {"phi": 0.4}), ("F5", {})):
        F = benchmark_hadamard(label, **kw)
        d = F.shape[0]
        facs = alpha_factors(label, **kw)
        assert len(facs) == math.factorial(d)
        for f in facs:
            perm = [s - 1 for s in f.sigma]
            target = permutation_sign(perm) * np.prod(F[np.arange(d), perm]) / det(F)
            assert abs(f.value) == pytest.approx(1 / math.sqrt(d), abs=1e-12)
            assert abs(f.value**d - target) < 1e-10
        ident = next(f for f in facs if f.sigma == tuple(range(1, d + 1)))
        assert abs(ident.power - np.prod(np.diag(F)) / det(F)) < 1e-10
    with pytest.raises(ValueError):
        alpha_factors("F7")


def test_alpha_f3_two_scaling_factors():
    powers = distinct_alpha_powers(alpha_factors("F3"))
    assert len(powers) == 2
    phases = sorted(cmath.phase(p * 3 ** 1.5) for p in powers)
    assert np.allclose(phases, [-math.pi / 6, math.pi / 6])
    assert np.allclose(np.abs(powers) * 3 ** 1.5, 1)


def test_alpha_f5_rotation_set():
    powers = distinct_alpha_powers(alpha_factors("F5"))
    assert len(powers) == 6
    A = [1, -1] + [cmath.exp(s * 1j * k * math.pi / 25) for k in (1, 2) for s in (1, -1)]
    # same 5th powers means same region, since T5 is invariant under 5th roots of unity
    want = sorted((a**5 for a in A), key=cmath.phase)
    got = sorted((p * 5**2.5 for p in powers), key=cmath.phase)
    assert np.allclose(got, want, atol=1e-9)


def test_ct_region_shapes():
    r3 = ct_region(3)
    assert len(r3) == 2
    assert r3[0].boundary[0] == pytest.approx(math.sqrt(3) * cmath.exp(1j * math.pi / 18))
    assert r3[1].rotation == pytest.approx(cmath.exp(-1j * math.pi / 18))
    assert all(r.scale == pytest.approx(1 / math.sqrt(3)) for r in r3)
    r5 = ct_region(5)
    assert len(r5) == 6
    rots = sorted(cmath.phase(r.rotation) for r in r5)
    want = sorted([0.0, math.pi, math.pi / 25, -math.pi / 25, 2 * math.pi / 25, -2 * math.pi / 25])
    assert np.allclose(rots, want)
    with pytest.raises(DimensionError):
        ct_region(4)


def test_classify_examples():
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    v = classify(H)
    assert (v.status, v.method) == (Status.CHAOTIC, Method.EXACT_D2)
    v = classify(np.diag([1, cmath.exp(1j * math.pi / 4)]))
    assert v.status is Status.NOT_CHAOTIC
    assert v.detail == pytest.approx(2 * math.cos(math.pi / 8))
    v = classify(fourier_unitary(3))
    assert (v.status, v.method) == (Status.CHAOTIC, Method.EXACT_D3)
    with pytest.raises(DomainError):
        classify(np.diag([1, 2]))
    with pytest.raises(SizeError):
        classify(np.eye(9))


def test_classify_trace_and_d5():
    v = classify(np.eye(4))
    assert (v.status, v.method) == (Status.NOT_CHAOTIC, Method.TRACE_NECESSARY)
    assert v.detail > 2
    v = classify(np.eye(5))
    assert (v.status, v.method) == (Status.NOT_CHAOTIC, Method.NECESSARY_D5)
    v = classify(fourier_unitary(5))
    assert (v.status, v.method) == (Status.CHAOTIC, Method.OPTIMIZER)


def test_d5_necessary_condition_holds_for_chaotic_unitaries():
    # V (D F5 / sqrt 5) V* is chaotic by construction: Hadamard in the basis V
    from qdynent.chaos import principal_root

    rng = np.random.default_rng(11)
    regions = ct_region(5)
    for s in range(30):
        D = np.diag(np.exp(1j * rng.uniform(0, 2 * math.pi, 5)))
        P = np.eye(5)[rng.permutation(5)]
        V = haar(5, 200 + s)
        U = V @ D @ fourier_unitary(5) @ P @ V.conj().T
        tau = np.trace(U) / principal_root(det(U), 5)
        assert any(in_trace_region(r, tau) is not Membership.OUTSIDE for r in regions)


def test_cube_root_branch_independence():
    U = haar(3, 77, n=300)
    tr, dt = np.trace(U, axis1=1, axis2=2), det(U)
    codes = [exact_d3_codes(tr, dt, branch=b) > 0 for b in range(3)]
    assert np.array_equal(codes[0], codes[1]) and np.array_equal(codes[0], codes[2])


def test_phase_invariance():
    rng = np.random.default_rng(3)
    for d in (2, 3):
        U = haar(d, 5, n=300)
        ph = np.exp(1j * rng.uniform(0, 2 * math.pi, 300))
        assert np.array_equal(exact_chaotic_batch(U), exact_chaotic_batch(ph[:, None, None] * U))


def test_batch_matches_scalar_classify():
    for d in (2, 3):
        U = haar(d, 8, n=60)
        batch = exact_chaotic_batch(U)
        scalar = [classify(u).status is Status.CHAOTIC for u in U]
        assert list(batch) == scalar


def test_exact_d2_agrees_with_closed_form():
    U = haar(2, 9, n=2000)
    batch = exact_chaotic_batch(U)
    closed = np.array([hdyn_closed_form_d2(u) >= math.log(2) - 1e-12 for u in U])
    assert np.array_equal(batch, closed)


def test_hadamard_defect_examples():
    dft = hadamard_defect(fourier_unitary(2), np.eye(2))
    assert dft.max_deviation == pytest.approx(0, abs=1e-15)
    assert dft.sum_gap == pytest.approx(0, abs=1e-12)
    for d in (2, 3, 4):
        hd = hadamard_defect(np.eye(d), np.eye(d))
        # zeros off the diagonal deviate by 1/sqrt(d), the ones by 1 - 1/sqrt(d)
        assert hd.max_deviation == pytest.approx(max(1 / math.sqrt(d), 1 - 1 / math.sqrt(d)))
        assert hd.sum_gap >= 0
    res = pvm_dynamical_entropy(np.diag([1, -1]))
    assert hadamard_defect(np.diag([1, -1]), res.basis).max_deviation <= 1e-5
    with pytest.raises(DimensionError):
        hadamard_defect(np.eye(2), np.eye(3))


def test_loose_certificate_misses_nearly_chaotic_d3():
    # outside the chaotic trace set, yet the best basis comes within ~2e-5 of
    # ln 3: a 1e-4 certificate is too coarse to stand in for the exact test
    U = haar(3, 2024, n=1000)[19]
    assert classify(U).status is Status.NOT_CHAOTIC
    loose = pvm_dynamical_entropy(U, starts=8, seed=19, certification_tol=1e-4)
    assert loose.certified_chaotic
    assert not pvm_dynamical_entropy(U, starts=8, seed=19).certified_chaotic
    assert math.log(3) - loose.value > 1e-6
