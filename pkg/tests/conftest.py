import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def moving_square(T=20, size=16, side=4, channels=3):
    """A bright square sliding one pixel right and down per frame."""
    frames = np.zeros((T, channels, size, size))
    for t in range(T):
        r = c = t % (size - side)
        frames[t, :, r:r + side, c:c + side] = 1.0
    return frames


def noisy_ramp(rng, T, shape, snr=5.0):
    """psi_t = t * v + noise, with signal-to-noise power ratio ``snr``.

    Signal power is the per-element variance of ``t * v`` over time,
    averaged over elements.
    """
    v = rng.standard_normal(shape)
    t = np.arange(1, T + 1, dtype=np.float64)
    signal = t.reshape((-1,) + (1,) * len(shape)) * v
    signal_power = np.mean(v ** 2) * t.var()
    sigma = np.sqrt(signal_power / snr)
    return signal + sigma * rng.standard_normal(signal.shape)


def pytest_terminal_summary(terminalreporter):
    from _acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
