"""Decision rule, Monte-Carlo discrimination statistics and data-rate estimate."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT, h as H_PLANCK
from scipy.stats import binomtest

from .noise import NoiseParams

AMBIGUOUS = "AMBIGUOUS"
NONE = "NONE"


@dataclass(frozen=True)
class ReadConfig:
    n_inc: float = 25.0
    kappa: float = 3.0
    light_mode: str = "coherent"
    noise: NoiseParams = field(default_factory=NoiseParams)
    trials: int = 10_000
    correlated: bool = False

    def __post_init__(self):
        if not self.n_inc > 0:
            raise ValueError("N_inc must be > 0")
        if not self.kappa > 0:
            raise ValueError("decision kappa must be > 0")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be an integer >= 1")
        if self.light_mode not in ("coherent", "squeezed"):
            raise ValueError(f"unknown light mode {self.light_mode!r}")


@dataclass(frozen=True)
class ReadOutcome:
    true_sequence: str
    decided: str
    candidates: tuple

    @property
    def unique(self) -> bool:
        return self.decided not in (AMBIGUOUS, NONE)

    @property
    def correct(self) -> bool:
        return self.decided == self.true_sequence


def decide(signals, sigmas, labels, kappa: float = 3.0, true_sequence: str = "") -> ReadOutcome:
    s = np.abs(np.asarray(signals, dtype=float))
    cand = tuple(lab for lab, v, sd in zip(labels, s, np.asarray(sigmas, dtype=float)) if v <= kappa * sd)
    if len(cand) == 1:
        decided = cand[0]
    else:
        decided = AMBIGUOUS if cand else NONE
    return ReadOutcome(true_sequence, decided, cand)


def _wilson(k: int, n: int) -> list:
    ci = binomtest(k, n).proportion_ci(confidence_level=0.95, method="wilson")
    return [float(ci.low), float(ci.high)]


@dataclass
class SequenceStats:
    sequence: str
    trials: int
    correct: int
    wrong: int
    ambiguous: int
    none: int

    @property
    def error_rate(self) -> float:
        """Anything but the correct unique decision (misread, ambiguous or none)."""
        return (self.trials - self.correct) / self.trials

    @property
    def misread_rate(self) -> float:
        """Unique but wrong decisions."""
        return self.wrong / self.trials

    @property
    def ambiguity_rate(self) -> float:
        return self.ambiguous / self.trials

    @property
    def none_rate(self) -> float:
        return self.none / self.trials

    def as_dict(self) -> dict:
        d = asdict(self)
        for name, k in (("error", self.trials - self.correct), ("misread", self.wrong),
                        ("ambiguity", self.ambiguous), ("none", self.none)):
            d[f"{name}_rate"] = k / self.trials
            d[f"{name}_ci"] = _wilson(k, self.trials)
        return d


def _classify(samples, sigmas, kappa, i):
    """samples: (trials, n_gain); returns counts (correct, wrong, ambiguous, none)."""
    cand = np.abs(samples) <= kappa * sigmas[None, :]
    n = cand.sum(axis=1)
    only_i = (n == 1) & cand[:, i]
    return (int(only_i.sum()), int(((n == 1) & ~cand[:, i]).sum()),
            int((n > 1).sum()), int((n == 0).sum()))


def monte_carlo_error_rate(means, sigmas, labels, kappa: float = 3.0, trials: int = 10_000,
                           seed: int = 0, pixel_model=None) -> list[SequenceStats]:
    """Sample the signal rows and apply :func:`decide` trial by trial.

    Independent mode draws each S_i(j) from N(mean, sigma^2) separately. With
    ``pixel_model = (N, L, G)`` (pixel means (n, 5), covariance square roots
    (n, 5, 5), gain matrix (n_gain, 5)) the 5 pixel counts are sampled jointly
    and all signals formed from them. Each sequence gets its own child stream
    of ``SeedSequence(seed)``; equal seeds therefore give paired draws across
    light modes.
    """
    means = np.asarray(means, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    children = np.random.SeedSequence(seed).spawn(len(labels))
    out = []
    for i, lab in enumerate(labels):
        rng = np.random.default_rng(children[i])
        if pixel_model is None:
            z = rng.standard_normal((trials, means.shape[1]))
            samples = means[i][None, :] + sigmas[i][None, :] * z
        else:
            N, L, G = pixel_model
            z = rng.standard_normal((trials, 5))
            samples = (N[i][None, :] + z @ L[i].T) @ G.T
        c, w, a, n0 = _classify(samples, sigmas[i], kappa, i)
        out.append(SequenceStats(lab, trials, c, w, a, n0))
    return out


def report_json(stats, config: dict, seed: int) -> str:
    doc = {"seed": seed, "config": config, "sequences": [s.as_dict() for s in stats]}
    return json.dumps(doc, indent=2, sort_keys=True)


def photon_flux(power: float, wavelength: float) -> float:
    return power * wavelength / (H_PLANCK * C_LIGHT)


def data_rate_estimate(power: float = 1e-3, wavelength: float = 780e-9, n_inc: float = 25.0,
                       oversampling: float = 10.0) -> float:
    """Bits per second: one bit per ``n_inc * oversampling`` photons."""
    if not (power > 0 and wavelength > 0 and n_inc > 0 and oversampling > 0):
        raise ValueError("power, wavelength, N_inc and oversampling must be > 0")
    return photon_flux(power, wavelength) / (n_inc * oversampling)
