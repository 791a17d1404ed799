import math

import pytest

from nonlocal_lab import closedform as cf
from nonlocal_lab import symcalc as sc
from nonlocal_lab.errors import DomainError, PoleEncountered, Unsupported
from nonlocal_lab.riesz import riesz_constants, riesz_kernel_constant
from nonlocal_lab.specfun import EULER_GAMMA, digamma, gamma


def one_term(coeff, p, m, logp=0):
    return sc.term_sum([sc.HomTerm(coeff, p, m, logp)])


def test_term_sum_merges_and_drops():
    ts = sc.term_sum(
        [sc.HomTerm(2.0, -1.0, 1, 0), sc.HomTerm(-2.0, -1.0, 1, 0), sc.HomTerm(1.0, 0.0, 0, 0)]
    )
    assert len(ts) == 1
    assert ts.terms[0].m == 0


def test_d1_radial_power():
    p = -1.3
    out = sc.d1(one_term(1.0, p, 0))
    assert len(out) == 1
    t = out.terms[0]
    assert (t.coeff, t.p, t.m) == (p, p - 2.0, 1)


def test_d1_axis_power():
    out = sc.d1(one_term(1.0, 0.0, 1))
    assert len(out) == 1
    assert out.terms[0] == sc.HomTerm(1.0, 0.0, 0, 0)


def test_d1_triple_derivative_matches_paper_string():
    # three derivatives of |x|^(-2s+2):
    # -8(s-1)s(s+1)|x|^(-2s-4) x1^3 + 12(s-1)s |x|^(-2s-2) x1
    s = 0.37
    ts = one_term(1.0, -2.0 * s + 2.0, 0)
    for _ in range(3):
        ts = sc.d1(ts)
    got = {(round(t.p, 9), t.m): complex(t.coeff) for t in ts}
    assert got[(-2 * s - 4, 3)].real == pytest.approx(-8 * (s - 1) * s * (s + 1), rel=1e-13)
    assert got[(-2 * s - 2, 1)].real == pytest.approx(12 * (s - 1) * s, rel=1e-13)


def test_fourier_pure_power():
    d, s = 3, 0.41
    out = sc.fourier(one_term(1.0, -d - 2.0 * s, 0), d)
    assert len(out) == 1
    t = out.terms[0]
    assert t.p == pytest.approx(2.0 * s)
    want = math.pi ** (2 * s + 0.5 * d) * gamma(-s) / gamma(0.5 * d + s)
    assert t.coeff.real == pytest.approx(want, rel=1e-12)
    assert t.coeff.imag == 0.0


def test_fourier_d2_log_branch():
    out = sc.fourier(one_term(1.0, -2.0, 0), 2)
    got = {(t.p, t.m, t.logp): complex(t.coeff) for t in out}
    assert got[(0.0, 0, 1)].real == pytest.approx(-2.0 * math.pi, rel=1e-14)
    assert got[(0.0, 0, 0)].real == pytest.approx(
        2.0 * math.pi * (math.log(2.0) - EULER_GAMMA), rel=1e-13
    )


def test_fourier_axis_field():
    # F[|h|^(-delta-2) h1] = -i pi^(delta+1-d/2) G((d-delta)/2)/G((delta+2)/2) |xi|^(-d+delta) xi1
    d, delta = 3, 0.23
    out = sc.fourier(one_term(1.0, -delta - 2.0, 1), d)
    assert len(out) == 1
    t = out.terms[0]
    assert (round(t.p, 9), t.m) == (round(-d + delta, 9), 1)
    want = (
        -math.pi ** (delta + 1.0 - 0.5 * d)
        * gamma(0.5 * (d - delta))
        / gamma(0.5 * (delta + 2.0))
    )
    assert t.coeff.imag == pytest.approx(want, rel=1e-12)
    assert t.coeff.real == 0.0


def test_mul_examples():
    d, delta, s = 3, 0.2, 0.3
    a = one_term(1.0, -d + delta - 1.0, 1)
    b = one_term(1.0, 2.0 * s, 0)
    out = sc.mul(a, b)
    assert len(out) == 1
    assert out.terms[0].p == pytest.approx(-d + delta - 1.0 + 2.0 * s)
    unit = one_term(1.0, 0.0, 0)
    ts = sc.term_sum([sc.HomTerm(2.5, -1.2, 2, 1)])
    assert sc.mul(ts, unit) == ts


def test_mul_twelve_product_terms():
    # the d >= 3 first-transform pair expands to twelve distinct terms
    d, s, delta = 3, 0.3, 0.2
    g3, g4 = sc._pipeline_pair("f2", d, s, delta)
    prod = sc.mul(sc.fourier(g3, d), sc.fourier(g4, d))
    assert len(prod) == 12


def test_mul_rejects_log_squared():
    a = one_term(1.0, -1.0, 0, 1)
    with pytest.raises(Unsupported):
        sc.mul(a, a)


def test_evaluate_examples():
    ts = one_term(1.0, -2.0, 1)
    assert sc.evaluate(ts, [1.0, 0.0]) == pytest.approx(1.0)
    odd = one_term(2.0, -1.3, 3)
    v1 = sc.evaluate(odd, [1.0, 0.0, 0.0])
    v2 = sc.evaluate(odd, [-1.0, 0.0, 0.0])
    assert v1 == pytest.approx(-v2, rel=1e-14)
    with pytest.raises(DomainError):
        sc.evaluate(ts, [0.0, 0.0])


def test_g4_transform_matches_paper_value():
    # F[g4] = pi^(d/2+2s) G(1-s)/G((d+2s)/2) * G4; compare at e1 for d = 3
    d, s = 3, 0.3
    _, g4 = sc._pipeline_pair("f2", d, s, 0.2)
    got = sc.evaluate(sc.fourier(g4, d), [1.0, 0.0, 0.0])
    a = d + 2.0 * s
    g4_at_e1 = (
        -2j * (1 - s) / (math.pi * a)
        + (s - 1) / (2 * math.pi**2)
        - 2.0 / a
        + 1j * (a + 3) / (math.pi * a)
        + (a - 1) / (4 * math.pi**2)
        - 1.0 / (s * a)
    )
    want = math.pi ** (0.5 * d + 2 * s) * gamma(1 - s) / gamma(0.5 * d + s) * g4_at_e1
    assert got.real == pytest.approx(want.real, rel=1e-12)
    assert got.imag == pytest.approx(want.imag, rel=1e-12)


def test_double_fourier_is_reflection(rng):
    for d in (2, 3):
        for _ in range(10):
            ts = sc.term_sum(
                [
                    sc.HomTerm(rng.normal(), -d - rng.uniform(0.3, 1.4), int(rng.integers(0, 3))),
                    sc.HomTerm(rng.normal(), -rng.uniform(0.3, 0.9), int(rng.integers(0, 2))),
                ]
            )
            x = rng.normal(size=d)
            try:
                back = sc.fourier(sc.fourier(ts, d), d)
            except PoleEncountered:
                continue
            lhs = sc.evaluate(back, x)
            rhs = sc.evaluate(ts, -x)
            assert lhs.real == pytest.approx(rhs.real, rel=1e-10, abs=1e-12)
            assert abs(lhs.imag) <= 1e-10 * max(1.0, abs(lhs.real))


def test_fourier_linearity(rng):
    d = 2
    a = one_term(1.3, -2.4, 1)
    b = one_term(-0.7, -1.1, 2)
    lhs = sc.fourier(sc.add(a, b), d)
    rhs = sc.add(sc.fourier(a, d), sc.fourier(b, d))
    assert sc.dump(lhs) == sc.dump(rhs)


def test_d1_commutes_with_fourier(rng):
    # F[d1 g] = 2 pi i xi1 F[g]
    d = 3
    for _ in range(10):
        ts = one_term(rng.normal(), -d - rng.uniform(0.2, 1.5), int(rng.integers(0, 3)))
        lhs = sc.fourier(sc.d1(ts), d)
        rhs = sc.mul(one_term(2j * math.pi, 0.0, 1), sc.fourier(ts, d))
        x = rng.normal(size=d)
        assert sc.evaluate(lhs, x).real == pytest.approx(
            sc.evaluate(rhs, x).real, rel=1e-10, abs=1e-12
        )
        assert sc.evaluate(lhs, x).imag == pytest.approx(
            sc.evaluate(rhs, x).imag, rel=1e-10, abs=1e-12
        )


def test_digamma_shift_identity(rng):
    # regression guard for the log-branch bookkeeping
    for _ in range(50):
        s = rng.uniform(0.02, 0.98)
        lhs = digamma(s - 1.0) + digamma(2.0 - s)
        rhs = digamma(s) + digamma(1.0 - s) + 2.0 / (1.0 - s)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_pipeline_f1_matches_closed():
    for d, s, delta in ((3, 0.4, 0.2), (2, 0.5, 0.25), (5, 0.75, 0.1)):
        got = sc.pipeline("f1", d, s, delta)
        assert got == pytest.approx(cf.f1_closed(d, s, delta), rel=1e-10)


def test_pipeline_f2_matches_closed_including_log_branch():
    for d in (2, 3, 5):
        for s in (0.25, 0.5, 0.75):
            for delta in (0.1, 0.3):
                got = sc.pipeline("f2", d, s, delta)
                assert got == pytest.approx(cf.f2_closed(d, s, delta), rel=1e-10)


def test_pipeline_d2_emergent_constant(rng):
    # the log-branch bookkeeping must reduce to the constant (s-1)/2
    for s in (0.25, 0.5, 0.75):
        delta = 0.2
        pv = sc.pipeline("f2", 2, s, delta)
        first = (
            0.5
            * math.pi
            * (gamma(1 - s) / gamma(1 + s))
            * (gamma(1 - 0.5 * delta) / gamma(1 + 0.5 * delta))
            * (gamma(s + 0.5 * delta) / gamma(2 - s - 0.5 * delta))
            * cf.f21_closed(2, s, delta)
        )
        implied = (pv - first) * 2.0 * s * (1.0 - s * s) / math.pi
        assert implied == pytest.approx(0.5 * s - 0.5, rel=1e-10)


def test_pipeline_riesz_f3_matches_constant():
    for d, s, delta in ((2, 0.5, 0.3), (3, 0.7, 0.6)):
        got = sc.pipeline("riesz_f3", d, s, delta)
        c_star, _ = riesz_constants(d, s, delta)
        want = c_star / riesz_kernel_constant(d, 1.0 - s)
        assert got == pytest.approx(want, rel=1e-10)


def test_pipeline_riesz_f4_matches_constant_ratio():
    for d, s, delta in ((2, 0.5, 0.3), (3, 0.4, 0.5)):
        got = sc.pipeline("riesz_f4", d, s, delta)
        c_star, c_star_star = riesz_constants(d, s, delta)
        want = c_star_star / c_star / riesz_kernel_constant(d, 1.0 - s)
        assert got == pytest.approx(want, rel=1e-10)


def test_pipeline_refuses_delta_zero():
    for which in ("f1", "riesz_f3", "riesz_f4"):
        with pytest.raises(PoleEncountered):
            sc.pipeline(which, 2, 0.5, 0.0)


def test_pipeline_pole_on_exceptional_set():
    # s + delta/2 = 1 hits the second-transform Gamma pole at d = 2
    with pytest.raises(PoleEncountered):
        sc.pipeline("f2", 2, 0.9, 0.2)


def test_pipeline_unknown():
    with pytest.raises(DomainError):
        sc.pipeline("f9", 2, 0.5, 0.2)


def test_dump_golden():
    g3 = sc.term_sum([sc.HomTerm(1.0, -2.25, 1, 0), sc.HomTerm(-1.0, -2.0, 0, 0)])
    got = sc.dump(sc.fourier(g3, 3))
    want = (
        "-0.000000000000e+00-7.089895028879e-01j * |x|^-2.75 * x1^1 * log^0\n"
        "-3.141592653590e+00+0.000000000000e+00j * |x|^-1 * x1^0 * log^0"
    )
    assert got == want


def test_dump_golden_log_branch():
    got = sc.dump(sc.fourier(sc.term_sum([sc.HomTerm(1.0, -2.0, 0, 0)]), 2))
    want = (
        "+7.284191958240e-01+0.000000000000e+00j * |x|^0 * x1^0 * log^0\n"
        "-6.283185307180e+00+0.000000000000e+00j * |x|^0 * x1^0 * log^1"
    )
    assert got == want
