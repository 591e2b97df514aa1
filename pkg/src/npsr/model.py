"""Synthetic problem generation, noise models, and evaluation metrics.

Instances follow the underdetermined linear model r = Phi s + n with an
M x N Gaussian dictionary (M < N, entries N(0, 1/M)), a K-sparse signal
with N(0,1) amplitudes on a uniformly random support, and one of three
noise models: Gaussian, double-exponential (Laplace), or an
epsilon-contaminated Gaussian mixture standing in for impulsive noise.

All generators are pure functions of (parameters, seed).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

NOISE_KINDS = ("gaussian", "double_exponential", "impulsive_mixture")


@dataclass(frozen=True)
class Dictionary:
    """M x N measurement dictionary.

    The sparse-recovery generators only ever produce the underdetermined
    regime (M < N, enforced in gen_dictionary); other shapes can be built
    directly for baseline testing (e.g. square orthonormal designs).
    """

    entries: np.ndarray

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2:
            raise ValueError("dictionary entries must be a 2-d matrix")
        if not np.all(np.isfinite(e)):
            raise ValueError("dictionary entries must be finite")

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def n(self):
        return self.entries.shape[1]


@dataclass(frozen=True)
class SparseSignal:
    """Length-N signal with exactly K nonzeros; off-support values are 0."""

    values: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        mask = np.zeros(self.values.size, dtype=bool)
        mask[self.support] = True
        if np.any(self.values[~mask] != 0.0):
            raise ValueError("values off the support must be exactly zero")

    @property
    def n(self):
        return self.values.size

    @property
    def k(self):
        return self.support.size


@dataclass(frozen=True)
class NoiseModel:
    """Noise specification: kind plus its parameters.

    gaussian(sigma), double_exponential(b), or impulsive_mixture(sigma,
    epsilon, kappa) drawing N(0, sigma^2) w.p. 1-epsilon and
    N(0, kappa*sigma^2) w.p. epsilon.
    """

    kind: str
    sigma: float = 0.0
    b: float = 0.0
    epsilon: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and not self.sigma > 0:
            raise ValueError("gaussian noise requires sigma > 0")
        if self.kind == "double_exponential" and not self.b > 0:
            raise ValueError("double-exponential noise requires scale b > 0")
        if self.kind == "impulsive_mixture":
            if not self.sigma > 0:
                raise ValueError("impulsive mixture requires sigma > 0")
            if not 0.0 < self.epsilon < 1.0:
                raise ValueError("contamination probability must be in (0, 1)")
            if not self.kappa >= 1.0:
                raise ValueError("variance ratio kappa must be >= 1")

    @classmethod
    def gaussian(cls, sigma):
        return cls(kind="gaussian", sigma=float(sigma))

    @classmethod
    def double_exponential(cls, b):
        return cls(kind="double_exponential", b=float(b))

    @classmethod
    def impulsive_mixture(cls, sigma, epsilon=0.01, kappa=1000.0):
        return cls(
            kind="impulsive_mixture",
            sigma=float(sigma),
            epsilon=float(epsilon),
            kappa=float(kappa),
        )

    def variance(self):
        """Second moment of one noise draw."""
        if self.kind == "gaussian":
            return self.sigma**2
        if self.kind == "double_exponential":
            return 2.0 * self.b**2
        return (1.0 - self.epsilon + self.epsilon * self.kappa) * self.sigma**2


@dataclass(frozen=True)
class ProblemInstance:
    """Observation r = Phi s + n together with optional ground truth."""

    dictionary: Dictionary
    observation: np.ndarray
    truth: Optional[SparseSignal] = None
    noise: Optional[np.ndarray] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.observation.size != self.dictionary.m:
            raise ValueError("observation length must equal dictionary row count")
        if self.truth is not None and self.noise is not None:
            rebuilt = self.dictionary.entries @ self.truth.values + self.noise
            if np.max(np.abs(rebuilt - self.observation)) > 1e-12:
                raise ValueError("observation inconsistent with truth + noise")

    @property
    def m(self):
        return self.dictionary.m

    @property
    def n(self):
        return self.dictionary.n


def gen_dictionary(m, n, seed):
    """I.i.d. N(0, 1/M) dictionary, deterministic per seed."""
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= M < N, got M={m}, N={n}")
    rng = np.random.default_rng(seed)
    entries = rng.normal(0.0, 1.0 / np.sqrt(m), size=(m, n))
    return Dictionary(entries=entries)


def gen_signal(n, k, seed):
    """K-sparse signal: uniform random support, N(0,1) amplitudes."""
    if not 1 <= k <= n // 4:
        raise ValueError(f"need 1 <= K <= N/4, got K={k}, N={n}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(n, size=k, replace=False))
    values = np.zeros(n)
    values[support] = rng.normal(0.0, 1.0, size=k)
    return SparseSignal(values=values, support=support)


def sample_noise(model, m, seed):
    """Length-M noise draw from the given model, deterministic per seed."""
    if m < 1:
        raise ValueError(f"need M >= 1, got {m}")
    rng = np.random.default_rng(seed)
    if model.kind == "gaussian":
        return rng.normal(0.0, model.sigma, size=m)
    if model.kind == "double_exponential":
        return rng.laplace(0.0, model.b, size=m)
    impulsive = rng.random(m) < model.epsilon
    scale = np.where(impulsive, model.sigma * np.sqrt(model.kappa), model.sigma)
    return rng.normal(0.0, 1.0, size=m) * scale


def make_instance(m, n, k, noise_model, seed):
    """Full synthetic instance; dictionary, signal and noise drawn from
    independent child streams of the seed, so the instance is reproducible
    from (parameters, seed) alone."""
    dict_seed, sig_seed, noise_seed = np.random.SeedSequence(seed).spawn(3)
    dictionary = gen_dictionary(m, n, dict_seed)
    truth = gen_signal(n, k, sig_seed)
    clean = dictionary.entries @ truth.values
    if noise_model is None:
        noise = np.zeros(m)
    else:
        noise = sample_noise(noise_model, m, noise_seed)
    return ProblemInstance(
        dictionary=dictionary,
        observation=clean + noise,
        truth=truth,
        noise=noise,
        seed=seed if isinstance(seed, int) else None,
    )


def snr(signal, noise):
    """Per-sample power ratio (||s||^2/N) / (||n||^2/M)."""
    n_pow = float(noise @ noise)
    if n_pow == 0.0:
        raise ZeroDivisionError("SNR undefined for an identically zero noise vector")
    s = signal.values
    return (float(s @ s) / s.size) / (n_pow / noise.size)


def snr_db(signal, noise):
    return 10.0 * np.log10(snr(signal, noise))


def reconstruction_error(truth, estimate):
    """Relative l2 error ||s - s_hat||_2 / ||s||_2."""
    s = truth.values
    denom = np.linalg.norm(s)
    if denom == 0.0:
        raise ValueError("reconstruction error undefined for a zero truth signal")
    estimate = np.asarray(estimate, dtype=np.float64)
    if estimate.shape != s.shape:
        raise ValueError("estimate and truth lengths differ")
    return float(np.linalg.norm(s - estimate) / denom)
