import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptoeplitz import (
    CUE,
    Bergman,
    CertificationError,
    Ginibre,
    ValidationError,
    cumulant_recursion,
    fd_cumulant,
    from_trig,
    hankel_trace,
)
from ptoeplitz.cumulants import recursion_traces, require_certified, shift_invariance_check
from ptoeplitz.sections import hankel_section


def test_hankel_trace_matches_sections(cos2):
    b = from_trig([(1, 0.5), (-1, 0.5), (3, 0.2), (-3, 0.2), (2, 0.1j), (-2, -0.1j)])
    H1 = hankel_section(b, 8).data
    from ptoeplitz.sections import flip

    H2 = hankel_section(flip(b), 8).data
    assert hankel_trace(b) == pytest.approx(np.trace(H1 @ H2), abs=1e-14)
    assert hankel_trace(cos2) == 1.0


def test_cue_cumulants(cos2):
    rep = cumulant_recursion(CUE(), cos2, 4, 64)
    np.testing.assert_allclose(rep.c, [2.0, 0.0, 0.0], atol=1e-12)
    assert all(rep.certified)
    assert require_certified(rep) is rep


def test_recursion_first_trace_is_zero_mean(cos2):
    t = recursion_traces(Ginibre(), cos2, 1, 32)
    assert t[0] == 0


def test_bergman_c2_agrees_with_finite_differences(cos2):
    rep = cumulant_recursion(Bergman(), cos2, 4, 256)
    fd = [fd_cumulant(Bergman(), cos2, n, 2) for n in (256, 512)]
    # both carry 1/n truncation errors; compare extrapolants (residual is O(1/n^2))
    assert rep.extrapolated[0] == pytest.approx(2 * fd[1] - fd[0], abs=1e-5)
    assert rep.c[1] == pytest.approx(0.0, abs=1e-12)


def test_shift_invariance(cos2):
    assert shift_invariance_check(Bergman(), cos2, 0.7, N=64) < 1e-10
    assert shift_invariance_check(Bergman(), cos2, 0.0) == 0.0


def test_uncertified_raises(cos2):
    rep = cumulant_recursion(Ginibre(), cos2, 2, 4, tol=1e-12)
    assert not rep.certified[0]
    with pytest.raises(CertificationError):
        require_certified(rep)


def test_validation(cos2):
    with pytest.raises(ValidationError):
        cumulant_recursion(Bergman(), cos2, 4, 100)
    with pytest.raises(ValidationError):
        cumulant_recursion(Bergman(), from_trig([(1, 1.0)]), 4, 64)
    with pytest.raises(ValidationError):
        cumulant_recursion(Bergman(), cos2, 1, 64)


@settings(max_examples=10, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(0.1, 1.0))
def test_shift_invariance_property(c, amp):
    f = from_trig([(1, amp), (-1, amp), (2, 0.3j * amp), (-2, -0.3j * amp)])
    assert shift_invariance_check(Ginibre(), f, c, N=32) < 1e-9


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 2.0))
def test_c2_scales_quadratically(s):
    f = from_trig([(1, 1.0), (-1, 1.0)])
    g = from_trig([(1, s), (-1, s)])
    a = cumulant_recursion(Bergman(), f, 2, 32).c[0]
    b = cumulant_recursion(Bergman(), g, 2, 32).c[0]
    assert b == pytest.approx(s**2 * a, rel=1e-12)
