"""
Fourier series coefficients, Slepian tapers and multitaper spectral density
estimation.

FFT convention (used everywhere in the package):
    FFT[l] = sum_n y(n dt) exp(-i 2 pi l n / N)
    a_0 = mean, a_l = (2/N) Re FFT[l], b_l = -(2/N) Im FFT[l]
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import fft as sp_fft
from scipy.signal import windows
from scipy.stats import chi2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FourierCoeffs:
    """Cosine/sine Fourier series coefficients over [0, T].

    a and b have the signal's trailing shape with a leading axis l = 0..L.
    b[0] is identically zero so that b[l] indexes the l-th sine coefficient.
    """
    T: float
    a: np.ndarray
    b: np.ndarray

    @property
    def L(self) -> int:
        return self.a.shape[0] - 1

    def series(self, t: np.ndarray) -> np.ndarray:
        """Evaluate the truncated series at times t."""
        t = np.asarray(t, dtype=np.float64)
        ell = np.arange(1, self.L + 1)
        phase = 2.0 * np.pi * np.outer(t, ell) / self.T
        a = self.a.reshape(self.L + 1, -1)
        b = self.b.reshape(self.L + 1, -1)
        values = a[0] + np.cos(phase) @ a[1:] + np.sin(phase) @ b[1:]
        return values.reshape((len(t),) + self.a.shape[1:])


@dataclass(frozen=True)
class TaperSet:
    N: int
    nw: float
    tapers: np.ndarray
    eigenvalues: np.ndarray

    @property
    def M(self) -> int:
        return self.tapers.shape[0]


@dataclass(frozen=True)
class PsdEstimate:
    """Power spectral density on the grid l / (k dt), l = 0..floor(k/2).

    dof is the number of chi-square degrees of freedom of each bin for a
    white-noise input (2 for the periodogram, 2 M for M tapers).
    """
    freqs: np.ndarray
    power: np.ndarray
    dof: int = 2

    @property
    def L(self) -> int:
        """Largest selectable bin (DC and the top bin are excluded)."""
        return len(self.power) - 2


@dataclass(frozen=True)
class FrequencySelection:
    indices: Tuple[int, ...]
    method: str

    def __post_init__(self):
        indices = tuple(int(ell) for ell in self.indices)
        if len(indices) == 0:
            raise ValueError("Frequency selection is empty")
        if len(set(indices)) != len(indices):
            raise ValueError(f"Frequency indices must be distinct, got {indices}")
        if min(indices) < 1:
            raise ValueError(f"Frequency indices must be >= 1, got {min(indices)}")
        object.__setattr__(self, "indices", indices)

    def check_bound(self, L: int):
        if max(self.indices) > L:
            raise ValueError(
                f"Selection '{self.method}' uses index {max(self.indices)} but only "
                f"{L} Fourier bins are available"
            )


def _as_samples(signal, min_len: int) -> np.ndarray:
    y = np.asarray(signal, dtype=np.float64)
    if y.shape[0] < min_len:
        raise ValueError(f"Need at least {min_len} samples, got {y.shape[0]}")
    if not np.all(np.isfinite(y)):
        raise ValueError("Signal contains non-finite samples")
    return y


def fourier_coeffs(signal, dt: float, periodic: bool = True) -> FourierCoeffs:
    """Fourier series coefficients of sampled signals via one real FFT.

    Args:
        signal: Samples of shape (k,) or (k, c); columns are transformed independently
        dt: Sampling interval in seconds
        periodic: If True the samples cover one period [0, k dt) (rectangle rule).
            If False they span the closed interval [0, (k-1) dt] and the
            coefficients are the trapezoid-rule values on that interval.

    Returns:
        FourierCoeffs: a_l, b_l for l = 0..floor(k/2)-1
    """
    y = _as_samples(signal, 4)
    k = y.shape[0]
    L = k // 2 - 1
    if periodic:
        N = k
        spectrum = sp_fft.rfft(y, axis=0)
        endpoint = 0.0
    else:
        N = k - 1
        spectrum = sp_fft.rfft(y[:N], axis=0)
        # trapezoid end-weights: last sample wraps onto the first grid point
        endpoint = 0.5 * (y[-1] - y[0])
    a = np.empty((L + 1,) + y.shape[1:])
    b = np.zeros((L + 1,) + y.shape[1:])
    a[0] = (spectrum[0].real + endpoint) / N
    a[1:] = (2.0 / N) * (spectrum[1:L + 1].real + endpoint)
    b[1:] = -(2.0 / N) * spectrum[1:L + 1].imag
    return FourierCoeffs(T=N * dt, a=a, b=b)


@lru_cache(maxsize=32)
def _slepian_cached(N: int, nw: float) -> TaperSet:
    M = int(np.floor(2 * nw + 1e-9))
    tapers, ratios = windows.dpss(N, nw, Kmax=M, norm=2, return_ratios=True)
    tapers = np.array(tapers, dtype=np.float64).reshape(M, N)
    for g in tapers:
        scale = np.max(np.abs(g))
        first = np.flatnonzero(np.abs(g) > 1e-10 * scale)[0]
        if g[first] < 0:
            g *= -1
    # well-concentrated tapers round to exactly 1.0 in double precision
    eigenvalues = np.clip(np.asarray(ratios, dtype=np.float64).reshape(M),
                          np.finfo(np.float64).tiny, np.nextafter(1.0, 0.0))

    tapers.setflags(write=False)
    eigenvalues.setflags(write=False)
    logger.debug("Computed %d Slepian tapers for N=%d, NW=%g", M, N, nw)
    return TaperSet(N=N, nw=nw, tapers=tapers, eigenvalues=eigenvalues)


def slepian_tapers(N: int, nw: float) -> TaperSet:
    """Slepian (DPSS) tapers with M = floor(2 NW).

    Each taper is normalized to unit energy and flipped so that its first
    non-negligible sample is positive. Concentration eigenvalues lie in (0, 1).
    Results are cached per (N, nw) and shared read-only.

    Args:
        N: Sequence length (>= 8)
        nw: Time-bandwidth product, 1 <= nw <= N / 4

    Returns:
        TaperSet: M x N orthonormal tapers and their eigenvalues
    """
    if N < 8:
        raise ValueError(f"Taper length must be >= 8, got {N}")
    if not 1 <= nw <= N / 4:
        raise ValueError(f"Time-bandwidth product must satisfy 1 <= nw <= N/4, got nw={nw}, N={N}")
    return _slepian_cached(int(N), float(nw))


def multitaper_psd(signal, dt: float, nw: float = 4.0) -> PsdEstimate:
    """Multitaper PSD: average of M tapered periodograms of the demeaned signal."""
    y = _as_samples(signal, 8)
    if y.ndim != 1:
        raise ValueError(f"multitaper_psd expects a 1-D signal, got shape {y.shape}")
    k = y.shape[0]
    tapers = slepian_tapers(k, nw).tapers
    spectra = sp_fft.rfft(tapers * (y - y.mean()), axis=1)
    power = np.mean(np.abs(spectra) ** 2, axis=0) / k
    return PsdEstimate(freqs=sp_fft.rfftfreq(k, dt), power=power, dof=2 * tapers.shape[0])


def periodogram(signal, dt: float) -> PsdEstimate:
    y = _as_samples(signal, 8)
    k = y.shape[0]
    power = np.abs(sp_fft.rfft(y - y.mean())) ** 2 / k
    return PsdEstimate(freqs=sp_fft.rfftfreq(k, dt), power=power, dof=2)


def noise_floor(psd: PsdEstimate) -> float:
    """White-noise level of a PSD, read off the upper half of the selectable bins.

    The median there is divided by the median of chi2(dof) / dof so the
    estimate is unbiased when those bins hold white noise only.
    """
    L = psd.L
    if L < 2:
        raise ValueError(f"Need at least 2 selectable bins to estimate a noise floor, got {L}")
    upper = psd.power[L // 2 + 1:L + 1]
    return float(np.median(upper) / (chi2.median(psd.dof) / psd.dof))


def significant_bins(psd: PsdEstimate, alpha: float) -> np.ndarray:
    """Bins l in 1..L whose power rises above the white-noise floor.

    The cutoff is floor * chi2.isf(alpha / L, dof) / dof, so a pure white-noise
    input lets any bin through with probability at most alpha.

    Args:
        psd: Spectral density estimate
        alpha: Family-wise false-alarm probability, 0 < alpha < 1

    Returns:
        np.ndarray: Ascending bin indices
    """
    if not 0 < alpha < 1:
        raise ValueError(f"Significance level must be in (0, 1), got {alpha}")
    L = psd.L
    level = noise_floor(psd) * chi2.isf(alpha / L, psd.dof) / psd.dof
    return np.flatnonzero(psd.power[1:L + 1] > level) + 1


def select_frequencies(psd: PsdEstimate, K: int, method: Optional[str] = None,
                       alpha: Optional[float] = None) -> FrequencySelection:
    """Pick the K bins of highest power, excluding DC.

    With alpha set, only bins passing significant_bins compete, and fewer
    than K come back when the signal band holds fewer bins. Ties go to the
    smaller index; the result is sorted ascending.
    """
    L = psd.L
    if not 1 <= K <= L:
        raise ValueError(f"K must be between 1 and {L}, got {K}")
    candidates = np.arange(1, L + 1) if alpha is None else significant_bins(psd, alpha)
    if len(candidates) == 0:
        raise ValueError(f"No frequency bin rises above the noise floor (alpha={alpha:g})")
    order = np.argsort(-psd.power[candidates], kind="stable")
    indices = np.sort(candidates[order[:K]])
    if len(indices) < K:
        logger.info("Only %d of %d requested bins rise above the noise floor", len(indices), K)
    return FrequencySelection(indices=tuple(indices), method=method or f"top({K})")


def sweep_selection(L_max: int) -> FrequencySelection:
    if L_max < 1:
        raise ValueError(f"L_max must be >= 1, got {L_max}")
    return FrequencySelection(indices=tuple(range(1, L_max + 1)), method=f"sweep({L_max})")
