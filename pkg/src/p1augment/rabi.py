"""Nuclear Rabi traces: simulation, damped-sinusoid fitting, normalization.

The fit model is

    S(t) = baseline + s0 * exp(-(t/t_d)^n) * cos(omega*t/2)^2

Note the factor of two: cos(omega*t/2)^2 = (1 + cos(omega*t))/2, so the
population signal oscillates at angular frequency omega, and the spectral
peak of the trace sits at f* = omega/(2*pi). The FFT initializer maps the
peak back as omega = 2*pi*f*; getting this wrong silently halves or
doubles every fitted Rabi frequency.

Fitting is Levenberg-Marquardt with an analytic Jacobian. Positivity of
t_d and n is enforced by log-parameterization, which keeps the optimizer
unconstrained. Reported standard errors come from the inverse Gauss-Newton
Hessian in the original parameter space, scaled by the residual variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError
from .model import OrientationClass

FTOL = 1e-10
MAX_ITERATIONS = 500
OMEGA_STARTS = (0.5, 1.0, 2.0)
ANCHOR_FIELD = 35.0

PARAM_NAMES = ("s0", "t_d", "n", "omega", "baseline")


@dataclass(frozen=True)
class DampedSinusoidParams:
    """Model parameters: contrast s0, decay time t_d (us), stretch n,
    Rabi angular frequency omega (rad/us), and contrast baseline."""

    s0: float
    t_d: float
    n: float
    omega: float
    baseline: float

    def __post_init__(self):
        if not (math.isfinite(self.t_d) and self.t_d > 0.0):
            raise ValueError("t_d must be > 0")
        if not (math.isfinite(self.n) and self.n > 0.0):
            raise ValueError("n must be > 0")
        if not (math.isfinite(self.omega) and self.omega >= 0.0):
            raise ValueError("omega must be >= 0")

    @property
    def frequency_mhz(self) -> float:
        return self.omega / (2.0 * math.pi)


@dataclass(frozen=True)
class TraceMeta:
    transition: tuple
    field: float
    orientation: OrientationClass
    b_rf: float


@dataclass(frozen=True)
class RabiTrace:
    times: np.ndarray
    signal: np.ndarray
    meta: TraceMeta | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        signal = np.asarray(self.signal, dtype=float)
        if times.shape != signal.shape or times.ndim != 1:
            raise ValueError("times and signal must be 1-d arrays of equal length")
        if times.size < 8:
            raise ValueError("a trace needs at least 8 samples")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "signal", signal)


@dataclass(frozen=True)
class FitResult:
    params: DampedSinusoidParams
    std_errors: dict
    residual_rms: float
    converged: bool
    iterations: int


class NormalizationMode(Enum):
    DATASET_MAX = "dataset_max"
    AT_35G = "at_35g"


class NormalizedKind(Enum):
    FREQUENCY = "frequency"
    AMPLITUDE = "amplitude"


@dataclass(frozen=True)
class NormalizedPoint:
    field: float
    value: float
    kind: NormalizedKind
    transition: tuple
    orientation: OrientationClass


@dataclass(frozen=True)
class FittedPoint:
    """One fitted Rabi trace tagged with its transition group."""

    field: float
    fit: FitResult
    transition: tuple
    orientation: OrientationClass


def rabi_frequency(alpha_raw: float, gamma_n: float, b_rf: float) -> float:
    """Rabi frequency in MHz: alpha * gamma_n * B_rf."""
    for name, value in (("alpha_raw", alpha_raw), ("gamma_n", gamma_n), ("b_rf", b_rf)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite")
    if b_rf < 0.0:
        raise ValueError("b_rf must be >= 0")
    return alpha_raw * gamma_n * b_rf


def damped_sinusoid(times, params: DampedSinusoidParams) -> np.ndarray:
    """Evaluate the fit model on an array of times (us)."""
    t = np.asarray(times, dtype=float)
    envelope = np.exp(-((t / params.t_d) ** params.n))
    return params.baseline + params.s0 * envelope * np.cos(params.omega * t / 2.0) ** 2


def simulate_trace(
    params: DampedSinusoidParams,
    times,
    noise_sigma: float = 0.0,
    seed: int = 0,
    meta: TraceMeta | None = None,
) -> RabiTrace:
    """Model trace plus seeded Gaussian noise; identical seed, identical trace."""
    if noise_sigma < 0.0:
        raise ValueError("noise_sigma must be >= 0")
    t = np.asarray(times, dtype=float)
    signal = damped_sinusoid(t, params)
    rng = np.random.default_rng(seed)
    signal = signal + rng.normal(0.0, noise_sigma, size=t.shape)
    return RabiTrace(times=t, signal=signal, meta=meta)


# --- internal parameterization -------------------------------------------
# u = (s0, log t_d, log n, omega, baseline); the log n entry is dropped
# when n is held fixed.

_EXP_CAP = 700.0  # keep exp() finite on wild trial steps


def _safe_exp(z: float) -> float:
    return math.exp(min(z, _EXP_CAP))


def _unpack(u: np.ndarray, fix_n) -> DampedSinusoidParams:
    if fix_n is None:
        s0, log_td, log_n, omega, baseline = u
        n = _safe_exp(log_n)
    else:
        s0, log_td, omega, baseline = u
        n = fix_n
    return DampedSinusoidParams(
        s0=float(s0),
        t_d=float(_safe_exp(log_td)),
        n=float(n),
        omega=float(abs(omega)),
        baseline=float(baseline),
    )


def _model_and_jacobian(u: np.ndarray, t: np.ndarray, fix_n):
    """Model values and Jacobian wrt the internal coordinates."""
    if fix_n is None:
        s0, log_td, log_n, omega, baseline = u
        n = _safe_exp(log_n)
    else:
        s0, log_td, omega, baseline = u
        n = fix_n
    t_d = _safe_exp(log_td)
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        ratio = t / t_d
        power = ratio**n  # 0^n = 0 for n > 0
        envelope = np.exp(-power)
        cosine = np.cos(omega * t / 2.0) ** 2
        model = baseline + s0 * envelope * cosine

        cols = [envelope * cosine]  # d/d s0
        core = s0 * envelope * cosine
        cols.append(core * n * power)  # d/d log(t_d) = d/d t_d * t_d
        if fix_n is None:
            log_ratio = np.zeros_like(t)
            np.log(ratio, out=log_ratio, where=ratio > 0.0)
            cols.append(-core * power * log_ratio * n)  # d/d log(n)
        cols.append(-s0 * envelope * (t / 2.0) * np.sin(omega * t))  # d/d omega
        cols.append(np.ones_like(t))  # d/d baseline
    return model, np.column_stack(cols)


def _levmar(u0: np.ndarray, t: np.ndarray, y: np.ndarray, fix_n):
    """Plain Levenberg-Marquardt on the internal coordinates."""
    u = u0.copy()
    model, jac = _model_and_jacobian(u, t, fix_n)
    residual = model - y
    cost = float(residual @ residual)
    lam = 1e-3
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        grad = jac.T @ residual
        hess = jac.T @ jac
        diag = np.diag(hess).copy()
        diag[diag <= 0.0] = 1e-302
        improved = False
        while lam < 1e12:
            try:
                step = np.linalg.solve(hess + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= 4.0
                continue
            u_try = u + step
            model_try, jac_try = _model_and_jacobian(u_try, t, fix_n)
            residual_try = model_try - y
            cost_try = float(residual_try @ residual_try)
            if math.isfinite(cost_try) and np.all(np.isfinite(jac_try)) and cost_try < cost:
                improved = True
                break
            lam *= 4.0
        if not improved:
            # No downhill step exists at any damping: the cost is stationary,
            # which satisfies the relative-change criterion trivially.
            converged = True
            break
        drop = (cost - cost_try) / max(cost, 1e-300)
        u, model, jac, residual, cost = u_try, model_try, jac_try, residual_try, cost_try
        lam = max(lam / 3.0, 1e-14)
        if drop < FTOL:
            converged = True
            break
    return u, cost, converged, iterations


def _original_jacobian(params: DampedSinusoidParams, t: np.ndarray, fix_n):
    """Jacobian wrt (s0, t_d, n, omega, baseline), skipping n when fixed."""
    ratio = t / params.t_d
    power = ratio**params.n
    envelope = np.exp(-power)
    cosine = np.cos(params.omega * t / 2.0) ** 2
    core = params.s0 * envelope * cosine
    cols = [envelope * cosine, core * params.n * power / params.t_d]
    names = ["s0", "t_d"]
    if fix_n is None:
        log_ratio = np.zeros_like(t)
        np.log(ratio, out=log_ratio, where=ratio > 0.0)
        cols.append(-core * power * log_ratio)
        names.append("n")
    cols.append(-params.s0 * envelope * (t / 2.0) * np.sin(params.omega * t))
    cols.append(np.ones_like(t))
    names.extend(["omega", "baseline"])
    return np.column_stack(cols), names


def _standard_errors(params, t, y, fix_n):
    jac, names = _original_jacobian(params, t, fix_n)
    residual = damped_sinusoid(t, params) - y
    dof = max(t.size - len(names), 1)
    variance = float(residual @ residual) / dof
    hess = jac.T @ jac
    col_scale = np.sqrt(np.diag(hess))
    dead = col_scale <= 1e-14 * max(np.max(col_scale), 1.0)
    try:
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(hess)
    errors = dict.fromkeys(PARAM_NAMES, 0.0)
    for k, name in enumerate(names):
        if dead[k]:
            errors[name] = math.inf
        else:
            errors[name] = math.sqrt(max(cov[k, k], 0.0) * variance)
    return errors


def fit_damped_sinusoid(trace: RabiTrace, fix_n: float | None = None) -> FitResult:
    """Least-squares fit of the damped-sinusoid model to a trace.

    Initialization takes omega from the dominant nonzero bin of the DFT of
    the mean-subtracted signal, the amplitude from the peak-to-peak range,
    the decay time from the first/last envelope ratio, and the baseline
    from the signal minimum. Three starts at {0.5, 1, 2}x the initial
    omega are run to completion and the lowest-residual fit wins.
    """
    if fix_n is not None and not (math.isfinite(fix_n) and fix_n > 0.0):
        raise ValueError("fix_n must be > 0 when given")
    t = trace.times
    y = trace.signal
    spread = float(np.ptp(y))
    if spread == 0.0:
        raise ValueError("cannot fit a constant signal")

    baseline0 = float(np.min(y))
    s00 = spread
    t_span = float(t[-1] - t[0])
    quarter = max(t.size // 4, 2)
    early, late = float(np.ptp(y[:quarter])), float(np.ptp(y[-quarter:]))
    decay_ratio = min(max(late / max(early, 1e-300), 1e-3), 0.999)
    t_d0 = min(max(-t_span / math.log(decay_ratio), t_span / 50.0), 50.0 * t_span)

    # Spectral peak of the first-differenced signal. Differencing both
    # removes the mean and whitens the slow decay envelope, which would
    # otherwise dominate the low bins for strongly damped traces. The trace
    # oscillates at angular frequency omega (cos^2 halves the period), so
    # the peak f* maps back as omega = 2*pi*f*.
    spectrum = np.abs(np.fft.rfft(np.diff(y)))
    dt = t_span / (t.size - 1)
    if spectrum.size > 1 and np.max(spectrum[1:]) > 0.0:
        peak_bin = int(np.argmax(spectrum[1:])) + 1
        omega0 = 2.0 * math.pi * peak_bin / ((t.size - 1) * dt)
    else:
        omega0 = 2.0 * math.pi / t_span

    best = None
    for factor in OMEGA_STARTS:
        if fix_n is None:
            u0 = np.array([s00, math.log(t_d0), 0.0, factor * omega0, baseline0])
        else:
            u0 = np.array([s00, math.log(t_d0), factor * omega0, baseline0])
        u, cost, converged, iterations = _levmar(u0, t, y, fix_n)
        if best is None or cost < best[1]:
            best = (u, cost, converged, iterations)

    u, cost, converged, iterations = best
    params = _unpack(u, fix_n)
    errors = _standard_errors(params, t, y, fix_n)
    residual = damped_sinusoid(t, params) - y
    return FitResult(
        params=params,
        std_errors=errors,
        residual_rms=float(np.sqrt(np.mean(residual**2))),
        converged=converged,
        iterations=iterations,
    )


def normalize_dataset(
    samples,
    mode: NormalizationMode,
    anchors=None,
) -> list:
    """Normalize fitted Rabi frequencies and amplitudes for comparison.

    DATASET_MAX divides every frequency by the dataset's maximum frequency
    and every amplitude by the maximum amplitude. AT_35G rescales each
    (transition, orientation) group so its 35 G point lands on the theory
    value supplied in ``anchors`` (keyed by that group).
    """
    samples = list(samples)
    if not samples:
        raise ValueError("normalize_dataset needs at least one fitted sample")
    points = []
    if mode is NormalizationMode.DATASET_MAX:
        max_freq = max(s.fit.params.frequency_mhz for s in samples)
        max_amp = max(s.fit.params.s0 for s in samples)
        if max_freq <= 0.0 or max_amp <= 0.0:
            raise ValueError("dataset maxima must be positive to normalize")
        for s in samples:
            points.append(_point(s, s.fit.params.frequency_mhz / max_freq, NormalizedKind.FREQUENCY))
            points.append(_point(s, s.fit.params.s0 / max_amp, NormalizedKind.AMPLITUDE))
        return points

    if anchors is None:
        raise ValueError("AT_35G normalization needs anchor values per group")
    groups: dict = {}
    for s in samples:
        groups.setdefault((s.transition, s.orientation), []).append(s)
    for key, members in groups.items():
        transition, orientation = key
        name = f"{transition[0]}{transition[1]}/{orientation.value}"
        anchor_entry = members and next(
            (m for m in members if abs(m.field - ANCHOR_FIELD) < 1e-6), None
        )
        if anchor_entry is None:
            raise DataError(f"group {name} has no {ANCHOR_FIELD:g} G entry to anchor on")
        if key not in anchors:
            raise DataError(f"no theory anchor value given for group {name}")
        target = float(anchors[key])
        freq_scale = target / anchor_entry.fit.params.frequency_mhz
        amp_scale = target / anchor_entry.fit.params.s0
        for m in members:
            points.append(_point(m, m.fit.params.frequency_mhz * freq_scale, NormalizedKind.FREQUENCY))
            points.append(_point(m, m.fit.params.s0 * amp_scale, NormalizedKind.AMPLITUDE))
    return points


def _point(sample: FittedPoint, value: float, kind: NormalizedKind) -> NormalizedPoint:
    return NormalizedPoint(
        field=sample.field,
        value=float(value),
        kind=kind,
        transition=sample.transition,
        orientation=sample.orientation,
    )
