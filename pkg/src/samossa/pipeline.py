"""End-to-end model: fit, step-ahead forecasting protocol, persistence.

Fitting runs the two stages in order: low-rank decomposition of the stacked
Page matrix, then a lag regression for the smooth component and one AR fit
per series on the residuals. The fitted model carries ring buffers of the
last L-1 observations and the last residuals per series, so forecasting
advances one step at a time: ``forecast_step`` (pure) produces the
prediction for the next time index, ``observe`` feeds back the realized
value, updates the buffers with the after-the-fact residual estimate, and
advances the clock.

Persistence is a versioned JSON document; floats survive round-trips
bit-exactly (shortest round-trip decimal encoding).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .ar import ArModel, fit_ar, forecast_ar
from .errors import ConfigError, ParseError, PersistError, StateError
from .linear_forecaster import BetaModel, fit_beta, forecast_f
from .lowrank import RankRule
from .pagemat import default_L
from .panel import TimePanel
from .ssa_estimator import Decomposition, decompose

__all__ = [
    "SamossaConfig",
    "SamossaModel",
    "fit",
    "forecast_step",
    "observe",
    "forecast_recursive",
    "save_model",
    "load_model",
]

FORMAT_VERSION = 1

P_GRID_DEFAULT = (0, 1, 2, 3)


@dataclass(frozen=True)
class SamossaConfig:
    """Fitting configuration.

    ``L`` of None means floor(sqrt(N*T/shape_ratio)). ``p`` is either a
    fixed shared AR order or a candidate grid; a grid is resolved on the
    last ``valid_len`` observations by one-step rolling R^2 and the winning
    order is refit on the whole panel.
    """

    L: int | None = None
    rank: RankRule = field(default_factory=lambda: RankRule.energy(0.9))
    p: int | tuple[int, ...] = P_GRID_DEFAULT
    shape_ratio: int = 1
    valid_len: int | None = None

    def resolved_L(self, n_series: int, length: int) -> int:
        if self.L is not None:
            return self.L
        return default_L(n_series, length, ratio=self.shape_ratio)


@dataclass
class _State:
    """Per-series forecasting state. Lags are most-recent-first."""

    obs_lags: list[np.ndarray]
    resid_lags: list[np.ndarray]
    next_t: list[int]
    pending_f: dict[int, float] = field(default_factory=dict)


@dataclass
class SamossaModel:
    """A fitted two-stage model plus its rolling forecast state."""

    beta_model: BetaModel
    ar_models: tuple[ArModel, ...]
    config: SamossaConfig
    L: int
    k_hat: int
    p_used: tuple[int, ...]
    series_names: tuple[str, ...]
    state: _State

    @property
    def n_series(self) -> int:
        return len(self.ar_models)


def _init_state(panel: TimePanel, decomp: Decomposition, L: int,
                p_used: tuple[int, ...]) -> _State:
    obs_lags = []
    resid_lags = []
    next_t = []
    for n in range(panel.n_series):
        obs = panel.values[n, -(L - 1):][::-1].copy()
        p = p_used[n]
        resid = decomp.x_hat[n, decomp.t_eff - p:][::-1].copy() if p > 0 else np.zeros(0)
        obs_lags.append(obs)
        resid_lags.append(resid)
        next_t.append(panel.t0 + panel.length)
    return _State(obs_lags=obs_lags, resid_lags=resid_lags, next_t=next_t)


def _fit_fixed_p(panel: TimePanel, config: SamossaConfig, p: int) -> SamossaModel:
    L = config.resolved_L(panel.n_series, panel.length)
    decomp = decompose(panel, L, config.rank)
    beta_model = fit_beta(panel, L, config.rank, k_hat=decomp.k_hat)
    ar_models = []
    for n in range(panel.n_series):
        if p == 0:
            ar_models.append(ArModel.zero(noise_var_hat=float(np.var(decomp.x_hat[n]))))
        else:
            ar_models.append(fit_ar(decomp.x_hat[n], p))
    p_used = tuple(p for _ in range(panel.n_series))
    return SamossaModel(
        beta_model=beta_model,
        ar_models=tuple(ar_models),
        config=config,
        L=L,
        k_hat=decomp.k_hat,
        p_used=p_used,
        series_names=panel.series_names,
        state=_init_state(panel, decomp, L, p_used),
    )


def _mean_r2_on_window(model: SamossaModel, window: TimePanel) -> float:
    # Local rolling score used only for order selection; the full metric
    # machinery lives in the evaluation module.
    preds = np.empty((window.n_series, window.length))
    for j in range(window.length):
        for n in range(window.n_series):
            y_hat, _, _ = forecast_step(model, n)
            preds[n, j] = y_hat
            observe(model, n, float(window.values[n, j]))
    scores = []
    for n in range(window.n_series):
        actual = window.values[n]
        sst = float(np.sum((actual - actual.mean()) ** 2))
        if sst <= 0.0:
            continue
        sse = float(np.sum((preds[n] - actual) ** 2))
        scores.append(1.0 - sse / sst)
    if not scores:
        raise ConfigError("validation window has no variance; cannot select p")
    return float(np.mean(scores))


def fit(panel: TimePanel, config: SamossaConfig | None = None) -> SamossaModel:
    """Fit the full pipeline on a training panel.

    With a grid-valued ``config.p``, candidate orders are scored by mean
    one-step rolling R^2 over the trailing ``config.valid_len`` observations
    (ties go to the smaller order) and the winner is refit on the entire
    panel. Requires ``valid_len`` in that mode.
    """
    config = config or SamossaConfig()
    if isinstance(config.p, int):
        return _fit_fixed_p(panel, config, config.p)

    grid = tuple(config.p)
    if len(grid) == 1:
        return _fit_fixed_p(panel, config, grid[0])
    if config.valid_len is None:
        raise ConfigError("p grid requires a validation split (set valid_len)")
    v = config.valid_len
    if not 2 <= v < panel.length:
        raise ConfigError(f"valid_len={v} unusable for panel of length {panel.length}")

    head = TimePanel(panel.series_names, panel.values[:, :-v], t0=panel.t0)
    tail = TimePanel(panel.series_names, panel.values[:, -v:], t0=panel.t0 + panel.length - v)
    scored: list[tuple[float, int]] = []
    for p in grid:
        candidate = _fit_fixed_p(head, config, p)
        scored.append((_mean_r2_on_window(candidate, tail), p))
    best_p = max(scored, key=lambda sp: (sp[0], -sp[1]))[1]
    return _fit_fixed_p(panel, config, best_p)


def forecast_step(model: SamossaModel, n: int) -> tuple[float, float, float]:
    """Forecast (y_hat, f_hat, x_hat) for series n at its next time index.

    Pure with respect to the lag buffers and the clock; it only records the
    pending smooth-component forecast that ``observe`` needs to form the
    residual. Repeated calls before the matching ``observe`` recompute the
    same values.
    """
    state = model.state
    if not 0 <= n < model.n_series:
        raise StateError(f"series index {n} outside 0..{model.n_series - 1}")
    if state.obs_lags[n].shape[0] != model.L - 1:
        raise StateError("forecast state not initialized")
    f_hat = forecast_f(model.beta_model, state.obs_lags[n])
    x_hat = forecast_ar(model.ar_models[n], state.resid_lags[n])
    state.pending_f[n] = f_hat
    return f_hat + x_hat, f_hat, x_hat


def observe(model: SamossaModel, n: int, y: float) -> SamossaModel:
    """Feed back the realized value for the step last forecast on series n.

    Pushes y into the observation lags, pushes the after-observation
    residual y - f_hat (with f_hat from the pending forecast) into the
    residual lags, and advances the series clock. Raises StateError unless a
    ``forecast_step`` for this series is pending.
    """
    state = model.state
    if not 0 <= n < model.n_series:
        raise StateError(f"series index {n} outside 0..{model.n_series - 1}")
    if n not in state.pending_f:
        raise StateError(
            f"observe for series {n} at t={state.next_t[n]} has no pending forecast"
        )
    f_hat = state.pending_f.pop(n)
    state.obs_lags[n] = np.concatenate(([y], state.obs_lags[n][:-1]))
    p = model.p_used[n]
    if p > 0:
        x_tilde = y - f_hat
        state.resid_lags[n] = np.concatenate(([x_tilde], state.resid_lags[n][: p - 1]))
    state.next_t[n] += 1
    return model


def forecast_recursive(model: SamossaModel, steps: int) -> np.ndarray:
    """Multi-step forecast feeding predictions back as observations.

    Returns an N x steps array. Operates on a deep copy of the state; the
    model is left untouched. This is the flagged alternative to the default
    rolling one-step protocol and is excluded from the acceptance checks.
    """
    snapshot = _snapshot_state(model.state)
    out = np.empty((model.n_series, steps))
    try:
        for j in range(steps):
            for n in range(model.n_series):
                y_hat, _, _ = forecast_step(model, n)
                out[n, j] = y_hat
                observe(model, n, y_hat)
    finally:
        _restore_state(model.state, snapshot)
    return out


def _snapshot_state(state: _State):
    return (
        [a.copy() for a in state.obs_lags],
        [a.copy() for a in state.resid_lags],
        list(state.next_t),
        dict(state.pending_f),
    )


def _restore_state(state: _State, snap) -> None:
    state.obs_lags, state.resid_lags, next_t, pending = snap
    state.next_t = next_t
    state.pending_f = pending


def _config_to_json(config: SamossaConfig) -> dict:
    return {
        "L": config.L,
        "rank": str(config.rank),
        "p": list(config.p) if isinstance(config.p, tuple) else config.p,
        "shape_ratio": config.shape_ratio,
        "valid_len": config.valid_len,
    }


def _config_from_json(doc: dict) -> SamossaConfig:
    p = doc["p"]
    return SamossaConfig(
        L=doc["L"],
        rank=RankRule.parse(doc["rank"]),
        p=tuple(p) if isinstance(p, list) else p,
        shape_ratio=doc["shape_ratio"],
        valid_len=doc["valid_len"],
    )


def save_model(model: SamossaModel, path) -> None:
    """Write a fitted model (including forecast state) to a JSON file."""
    doc = {
        "version": FORMAT_VERSION,
        "config": _config_to_json(model.config),
        "L": model.L,
        "k_hat": model.k_hat,
        "p_used": list(model.p_used),
        "series_names": list(model.series_names),
        "beta": model.beta_model.beta.tolist(),
        "beta_resid_rms": model.beta_model.resid_rms,
        "ar": [
            {
                "alpha": m.alpha.tolist(),
                "p": m.p,
                "noise_var": m.noise_var_hat,
                "rank_deficient": m.rank_deficient,
            }
            for m in model.ar_models
        ],
        "state": {
            "obs_lags": [a.tolist() for a in model.state.obs_lags],
            "resid_lags": [a.tolist() for a in model.state.resid_lags],
            "next_t": list(model.state.next_t),
            "pending_f": {str(k): v for k, v in model.state.pending_f.items()},
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> SamossaModel:
    """Load a model saved by :func:`save_model`.

    Raises PersistError for an unsupported version and ParseError for a
    malformed or truncated file.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed model file {path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "version" not in doc:
        raise ParseError(f"model file {path} has no version field")
    if doc["version"] != FORMAT_VERSION:
        raise PersistError(
            f"unsupported model format version {doc['version']!r} "
            f"(this build reads version {FORMAT_VERSION})"
        )
    try:
        beta_model = BetaModel(
            beta=np.array(doc["beta"], dtype=np.float64),
            L=doc["L"],
            k_hat=doc["k_hat"],
            resid_rms=doc["beta_resid_rms"],
        )
        ar_models = tuple(
            ArModel(
                alpha=np.array(m["alpha"], dtype=np.float64),
                p=m["p"],
                noise_var_hat=m["noise_var"],
                rank_deficient=m.get("rank_deficient", False),
            )
            for m in doc["ar"]
        )
        state_doc = doc["state"]
        state = _State(
            obs_lags=[np.array(a, dtype=np.float64) for a in state_doc["obs_lags"]],
            resid_lags=[np.array(a, dtype=np.float64) for a in state_doc["resid_lags"]],
            next_t=list(state_doc["next_t"]),
            pending_f={int(k): v for k, v in state_doc["pending_f"].items()},
        )
        return SamossaModel(
            beta_model=beta_model,
            ar_models=ar_models,
            config=_config_from_json(doc["config"]),
            L=doc["L"],
            k_hat=doc["k_hat"],
            p_used=tuple(doc["p_used"]),
            series_names=tuple(doc["series_names"]),
            state=state,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"model file {path} is missing fields: {exc}") from exc
