import numpy as np
import pytest

from todalift import toda


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_chain(rng, n, g_lo=0.5, g_hi=2.0, scale=1.0):
    """Random system plus centered phase state with |q|, |p| <= scale."""
    g = rng.uniform(g_lo, g_hi, n - 1)
    q = rng.uniform(-scale, scale, n)
    q -= q.mean()
    p = rng.uniform(-scale, scale, n)
    p -= p.mean()
    return toda.TodaSystem(n=n, g=g), toda.PhaseState(q=q, p=p)


def calm_chain(rng, n, gap_lo=0.3, gap_hi=1.0, p_scale=0.25, g_lo=0.3, g_hi=0.6):
    """Well-separated ascending positions and small momenta.

    Keeps the particle spread modest over t ~ 10 so that quantities read off
    the symmetric-space matrices stay well conditioned.
    """
    g = rng.uniform(g_lo, g_hi, n - 1)
    q = np.cumsum(np.concatenate([[0.0], rng.uniform(gap_lo, gap_hi, n - 1)]))
    q -= q.mean()
    p = rng.uniform(-p_scale, p_scale, n)
    p -= p.mean()
    return toda.TodaSystem(n=n, g=g), toda.PhaseState(q=q, p=p)
