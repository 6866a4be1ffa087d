"""Characteristic roots, closed form, classification, ap/remainder split."""

import cmath
import math

import numpy as np
import pytest

from aporbit import (
    ARSpec,
    characteristic_roots,
    char_coefficients,
    classify,
    coefficients_from_roots,
    recursion,
    solve_coefficients,
    spec_from_roots,
    split,
    verify_decomposition,
)
from aporbit.errors import OutOfRange, RefusedUnbounded


def poly_at(coeffs, z):
    out = 0.0 + 0.0j
    for c in coeffs:
        out = out * z + c
    return out


def sorted_roots(rs):
    return sorted(((complex(mu), m) for mu, m in rs.roots),
                  key=lambda rm: (rm[0].real, rm[0].imag))


def test_arspec_validation():
    spec = ARSpec(p=[0.5], initial=[1.0])
    assert spec.d == 1
    with pytest.raises(OutOfRange):
        ARSpec(p=[0.5], initial=[1.5])
    assert ARSpec(p=[0.1, 0.2], initial=[0.5, -0.5]).d == 2


def test_recursion_values():
    spec = ARSpec(p=[0.5], initial=[1.0])
    z = recursion(spec, 5)
    assert z.tolist() == [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]
    spec = ARSpec(p=[0.0, -1.0], initial=[1.0, 0.0])
    z = recursion(spec, 6)
    assert z.tolist() == [1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0]


def test_characteristic_roots_rotation():
    spec = ARSpec(p=[0.0, -1.0], initial=[1.0, 0.0])
    rs = characteristic_roots(spec)
    roots = sorted_roots(rs)
    assert roots == [((0 - 1j), 1), ((0 + 1j), 1)]
    assert rs.residual <= 1e-12
    # back-substitution oracle
    coeffs = char_coefficients(spec)
    for mu, _ in roots:
        assert abs(poly_at(coeffs, mu)) <= 1e-12


def test_characteristic_roots_scalar():
    rs = characteristic_roots(ARSpec(p=[0.5], initial=[1.0]))
    assert sorted_roots(rs) == [((0.5 + 0j), 1)]


def test_characteristic_roots_double():
    rs = characteristic_roots(ARSpec(p=[2.0, -1.0], initial=[0.5, 0.0]))
    assert sorted_roots(rs) == [((1.0 + 0j), 2)]


def test_characteristic_roots_triple():
    # (mu - 0.5)^3 = mu^3 - 1.5 mu^2 + 0.75 mu - 0.125
    p = coefficients_from_roots([0.5, 0.5, 0.5])
    rs = characteristic_roots(ARSpec(p=p, initial=[0.5, 0.25, 0.125]))
    roots = sorted_roots(rs)
    assert len(roots) == 1
    mu, m = roots[0]
    assert m == 3
    assert abs(mu - 0.5) <= 1e-8


def test_characteristic_roots_zero_root():
    # p = (0.5, 0): mu^2 - 0.5 mu = mu (mu - 0.5)
    rs = characteristic_roots(ARSpec(p=[0.5, 0.0], initial=[1.0, 1.0]))
    roots = sorted_roots(rs)
    assert roots[0] == ((0 + 0j), 1)
    assert abs(roots[1][0] - 0.5) <= 1e-12 and roots[1][1] == 1


def test_conjugate_symmetry_bitwise():
    rng = np.random.default_rng(77)
    for _ in range(30):
        d = int(rng.integers(2, 7))
        p = rng.uniform(-0.4, 0.4, d)
        rs = characteristic_roots(ARSpec(p=p, initial=np.zeros(d)))
        complexes = [mu for mu, _ in rs.roots if mu.imag != 0]
        assert len(complexes) % 2 == 0
        ups = sorted((mu for mu in complexes if mu.imag > 0),
                     key=lambda z: (z.real, z.imag))
        downs = sorted((mu for mu in complexes if mu.imag < 0),
                       key=lambda z: (z.real, -z.imag))
        for u, v in zip(ups, downs):
            assert u == v.conjugate()  # exact, bitwise


def test_root_residual_invariant():
    rng = np.random.default_rng(5)
    for _ in range(40):
        d = int(rng.integers(1, 9))
        p = rng.uniform(-0.9, 0.9, d) / d  # keep roots tame
        spec = ARSpec(p=p, initial=np.zeros(d))
        rs = characteristic_roots(spec)
        coeffs = char_coefficients(spec)
        assert rs.total_multiplicity == d
        for mu, _ in rs.roots:
            assert abs(poly_at(coeffs, mu)) <= 1e-10 * (1 + abs(mu) ** d)


def test_classify_cases():
    assert classify(characteristic_roots(
        ARSpec(p=[0.0, -1.0], initial=[1.0, 0.0]))) == "bounded"
    assert classify(characteristic_roots(
        ARSpec(p=[0.5], initial=[1.0]))) == "bounded"
    assert classify(characteristic_roots(
        ARSpec(p=[2.0, -1.0], initial=[1.0, 0.0]))) == "unbounded"
    assert classify(characteristic_roots(
        ARSpec(p=[1.5], initial=[1.0]))) == "unbounded"


def test_solve_coefficients_rotation():
    spec = ARSpec(p=[0.0, -1.0], initial=[1.0, 0.0])
    dec = solve_coefficients(spec)
    # z(t) = cos(pi t / 2): coefficient 1/2 on each of +/- i
    assert dec.classification == "bounded"
    coeffs = sorted(dec.terms, key=lambda t: t.mu.imag)
    assert coeffs[0].coeff == pytest.approx(0.5 + 0j)
    assert coeffs[1].coeff == pytest.approx(0.5 + 0j)
    for t in range(40):
        assert dec.evaluate(t) == pytest.approx(math.cos(math.pi * t / 2), abs=1e-12)


def test_solve_coefficients_scalar():
    dec = solve_coefficients(ARSpec(p=[0.5], initial=[1.0]))
    assert dec.terms[0].coeff == pytest.approx(1.0 + 0j)
    for t in range(20):
        assert dec.evaluate(t) == pytest.approx(0.5 ** t, rel=1e-12)


def test_solve_coefficients_zero_root():
    # p=(0.5, 0) with z(0)=1, z(-1)=1: recursion z(1) = 0.5*1 + 0*1 = 0.5,
    # and z(t) = c * 0.5^t for t >= 1; the zero root contributes a
    # transient Kronecker term at t=0 only.
    spec = ARSpec(p=[0.5, 0.0], initial=[1.0, 1.0])
    dec = solve_coefficients(spec)
    assert len(dec.transient_terms) == 1
    z = recursion(spec, 50)
    for t in range(51):
        assert dec.evaluate(t) == pytest.approx(z[t], abs=1e-12)


def test_refuses_unbounded():
    with pytest.raises(RefusedUnbounded):
        solve_coefficients(ARSpec(p=[2.0, -1.0], initial=[1.0, 0.0]))


def test_ill_conditioned_solve_refused():
    # fabricate a root set with two distinct roots 1e-13 apart: the
    # confluent system is numerically singular and must be refused with
    # the condition estimate attached
    from aporbit.armodel import RootSet
    from aporbit.errors import IllConditioned

    spec = ARSpec(p=[1.0, -0.25], initial=[0.5, 0.25])  # (mu-0.5)^2 truly
    fake = RootSet(
        roots=((0.5 + 0j, 1), (0.5 + 1e-13 + 0j, 1)), residual=0.0
    )
    with pytest.raises(IllConditioned) as info:
        solve_coefficients(spec, fake)
    assert info.value.condition > 1e12


def test_reported_roots_pairwise_separated():
    rng = np.random.default_rng(15)
    for _ in range(25):
        d = int(rng.integers(2, 7))
        p = rng.uniform(-0.9, 0.9, d) / d
        rs = characteristic_roots(ARSpec(p=p, initial=np.zeros(d)))
        mus = [mu for mu, _ in rs.roots]
        for i, a in enumerate(mus):
            for b in mus[i + 1:]:
                assert abs(a - b) > 1e-8 * max(1.0, abs(a))


def test_reality_of_closed_form():
    rng = np.random.default_rng(42)
    for _ in range(20):
        d = int(rng.integers(1, 5))
        p = rng.uniform(-0.9, 0.9, d) / d
        init = rng.uniform(-1, 1, d)
        spec = ARSpec(p=p, initial=init)
        dec = solve_coefficients(spec)
        for t in range(0, 201, 7):
            val = dec.evaluate_complex(t)
            assert abs(val.imag) <= 1e-10


def test_split_rotation():
    dec = solve_coefficients(ARSpec(p=[0.0, -1.0], initial=[1.0, 0.0]))
    ap, rest = split(dec)
    for t in range(24):
        assert ap(t) == pytest.approx(math.cos(math.pi * t / 2), abs=1e-12)
        assert rest(t) == 0.0
    # frequencies are the root arguments +/- pi/2
    assert sorted(ap.frequencies) == pytest.approx([-math.pi / 2, math.pi / 2])


def test_split_pure_decay():
    dec = solve_coefficients(ARSpec(p=[0.5], initial=[1.0]))
    ap, rest = split(dec)
    for t in range(10):
        assert ap(t) == 0.0
        assert rest(t) == pytest.approx(0.5 ** t, rel=1e-12)


def test_split_mixed_irrational_frequency():
    # roots 0.9 and e^{+-i}: the unit pair has frequency 1, an irrational
    # multiple of pi, so ap is genuinely non-periodic; the remainder decays
    # like 0.9^t.
    mu = cmath.exp(1j)
    spec = spec_from_roots(
        [(0.9, 1), (mu, 1), (mu.conjugate(), 1)],
        [0.25, 0.2 + 0.1j, 0.2 - 0.1j],
    )
    dec = solve_coefficients(spec)
    ap, rest = split(dec)
    assert len(dec.unit_terms) == 2
    assert len(dec.decay_terms) == 1
    z = recursion(spec, 300)
    C = abs(rest(0)) + 1e-12
    for t in range(spec.d, 301):
        assert abs(z[t] - ap(t)) <= C * 0.9 ** t + 1e-9
    # ap is not periodic with any small period on the sampled window
    vals = [ap(t) for t in range(200)]
    for L in range(1, 50):
        assert max(abs(vals[t + L] - vals[t]) for t in range(150)) > 1e-6, L


def test_split_consistency_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        d = int(rng.integers(1, 5))
        p = rng.uniform(-0.9, 0.9, d) / d
        init = rng.uniform(-1, 1, d)
        dec = solve_coefficients(ARSpec(p=p, initial=init))
        ap, rest = split(dec)
        for t in range(0, 50, 3):
            assert ap(t) + rest(t) == pytest.approx(dec.evaluate(t), abs=1e-12)


def test_verify_decomposition_rotation():
    spec = ARSpec(p=[0.0, -1.0], initial=[1.0, 0.0])
    report = verify_decomposition(spec, solve_coefficients(spec), horizon=100)
    assert report.closed_form_max_error <= 1e-9
    assert report.decay_radius == 0.0
    assert report.convergence_ok


def test_verify_decomposition_all_decay():
    spec = ARSpec(p=[0.25], initial=[0.5])
    report = verify_decomposition(spec, solve_coefficients(spec), horizon=100)
    assert report.closed_form_max_error <= 1e-12
    assert report.convergence_ok
    ap, _ = split(solve_coefficients(spec))
    assert all(ap(t) == 0.0 for t in range(5))


def test_coefficients_from_roots_inverse():
    rng = np.random.default_rng(10)
    for _ in range(20):
        # draw conjugate-symmetric roots, expand, and recover them
        roots = []
        d = int(rng.integers(1, 5))
        remaining = d
        while remaining > 0:
            if remaining >= 2 and rng.random() < 0.5:
                mu = rng.uniform(0.1, 0.9) * cmath.exp(1j * rng.uniform(0.3, 2.8))
                roots.extend([mu, mu.conjugate()])
                remaining -= 2
            else:
                roots.append(complex(rng.uniform(-0.9, 0.9)))
                remaining -= 1
        p = coefficients_from_roots(roots)
        spec = ARSpec(p=p, initial=np.zeros(len(p)))
        rs = characteristic_roots(spec)
        found = sorted((complex(mu) for mu, _ in rs.roots),
                       key=lambda z: (z.real, z.imag))
        want = sorted(roots, key=lambda z: (z.real, z.imag))
        for a, b in zip(found, want):
            assert abs(a - b) <= 1e-8


def test_spec_from_roots_round_trip():
    spec = spec_from_roots([(0.5, 1), (-0.25, 1)], [0.4, 0.3])
    z = recursion(spec, 60)
    for t in range(61):
        expected = 0.4 * 0.5 ** t + 0.3 * (-0.25) ** t
        assert z[t] == pytest.approx(expected, abs=1e-12)
