"""Field-line integration and invariant drift."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import DegenerateField, StencilEscape

COMPLETE = "complete"
LEFT_DOMAIN = "left-domain"
DEGENERATE = "degenerate"
NON_FINITE = "non-finite"


@dataclass
class FlowTrace:
    points: np.ndarray
    arc_length: np.ndarray
    case_id: str
    seed: np.ndarray
    ds: float
    n_steps: int
    normalize: bool = True
    status: str = COMPLETE
    message: str = ""

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE

    def __len__(self):
        return len(self.points)


def _defined(field, p):
    pred = getattr(field, "defined", None)
    if pred is None:
        return np.ones(np.asarray(p).shape[:-1], dtype=bool)
    return pred(p)


def trace_field_line(field: Callable, seed, ds: float = 1e-2, n_steps: int = 1000,
                     normalize: bool = True, floor: float = 1e-8,
                     case_id: str | None = None, stay_in_box: bool = False) -> FlowTrace:
    """Classic RK4 integration of ``dx/ds = w/|w|`` (or ``w`` if not normalized).

    The trace stops early, keeping every point computed so far, when a stage
    point leaves the field's defined set, when ``|w|`` drops below ``floor``
    or when the field stops being finite.  With ``stay_in_box`` it also stops
    when a step ends outside the field's sampling box.  The reason is stored
    in ``status``/``message``.  A seed that is itself invalid raises
    ``StencilEscape`` or ``DegenerateField``.
    """
    seed = np.asarray(seed, dtype=float)
    cid = case_id or getattr(field, "case_id", "adhoc")
    if not _defined(field, seed):
        raise StencilEscape("seed is outside the field's defined set", point=seed)

    class _Stop(Exception):
        def __init__(self, status, msg):
            self.status, self.msg = status, msg

    def f(x):
        if not _defined(field, x):
            raise _Stop(LEFT_DOMAIN, f"stage point {x.tolist()} left the defined set")
        w = np.asarray(field(x), dtype=float)
        if not np.all(np.isfinite(w)):
            raise _Stop(NON_FINITE, f"non-finite field at {x.tolist()}")
        if normalize:
            n = np.linalg.norm(w)
            if n < floor:
                raise _Stop(DEGENERATE, f"|w| = {n:.3g} below {floor:g} at {x.tolist()}")
            return w / n
        return w

    try:
        f(seed)
    except _Stop as e:
        raise DegenerateField(e.msg) from None

    pts = [seed]
    x = seed
    status, msg = COMPLETE, ""
    for _ in range(n_steps):
        try:
            k1 = f(x)
            k2 = f(x + 0.5 * ds * k1)
            k3 = f(x + 0.5 * ds * k2)
            k4 = f(x + ds * k3)
            xn = x + ds * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            if not _defined(field, xn):
                raise _Stop(LEFT_DOMAIN, f"step end {xn.tolist()} left the defined set")
            if stay_in_box and not field.domain.in_box(xn):
                raise _Stop(LEFT_DOMAIN, f"step end {xn.tolist()} left the domain box")
        except _Stop as e:
            status, msg = e.status, e.msg
            break
        pts.append(xn)
        x = xn
    P = np.array(pts)
    if normalize:
        s = ds * np.arange(len(P))
    else:
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(P, axis=0), axis=-1))])
    return FlowTrace(P, s, cid, seed, float(ds), len(P) - 1, normalize, status, msg)


@dataclass(frozen=True)
class Drift:
    max_drift: float
    relative_drift: float
    initial: float


def invariant_drift(trace: FlowTrace, invariant: Callable) -> Drift:
    """Max ``|f(x_i) - f(x_0)|`` over the trace, and that over ``max(1, |f(x_0)|)``."""
    if len(trace.points) == 0:
        raise ValueError("empty trace")
    v = np.asarray(invariant(trace.points), dtype=float)
    d = float(np.max(np.abs(v - v[0])))
    return Drift(d, d / max(1.0, abs(float(v[0]))), float(v[0]))


def drift_ratio(field, invariant: Callable, seed, ds: float = 1e-2, n_steps: int = 1000,
                floor: float = 1e-11, stay_in_box: bool = True) -> dict:
    """Drift at ``ds`` and ``ds/2`` over the same arc length, and their ratio.

    Both traces are compared on the common arc-length range.  The ratio is
    ``None`` when the finer drift sits below ``floor``.
    """
    t1 = trace_field_line(field, seed, ds, n_steps, stay_in_box=stay_in_box)
    t2 = trace_field_line(field, seed, ds / 2, 2 * n_steps, stay_in_box=stay_in_box)
    m = min(t1.n_steps, t2.n_steps // 2)
    d1 = invariant_drift(_truncate(t1, m + 1), invariant).max_drift
    d2 = invariant_drift(_truncate(t2, 2 * m + 1), invariant).max_drift
    ratio = d1 / d2 if d2 > floor else None
    return {"drift": d1, "drift_half": d2, "ratio": ratio, "steps": m}


def _truncate(trace: FlowTrace, n: int) -> FlowTrace:
    return FlowTrace(trace.points[:n], trace.arc_length[:n], trace.case_id, trace.seed,
                     trace.ds, n - 1, trace.normalize, trace.status, trace.message)


def pick_seed(field, seed: int = 0, n: int = 32, probe_ds: float = 0.05,
              probe_steps: int = 200):
    """A deterministic seed whose field line stays longest inside the domain box.

    ``n`` low-discrepancy candidates with healthy ``|w|`` are advanced together
    with coarse Euler steps along ``w/|w|``; the first candidate with the
    longest in-box run wins.
    """
    pts = field.sample(n, seed=seed, pad=0.05)
    w = np.linalg.norm(field(pts), axis=-1)
    cand = pts[w > 0.25 * np.median(w)]
    x = cand.copy()
    alive = np.ones(len(x), dtype=bool)
    run = np.zeros(len(x), dtype=int)
    for _ in range(probe_steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        v = np.asarray(field(x[idx]), dtype=float)
        nv = np.linalg.norm(v, axis=-1)
        ok = np.isfinite(nv) & (nv > 1e-8)
        step = x[idx] + probe_ds * v / np.where(ok, nv, 1.0)[:, None]
        ok &= field.defined(step, 0.0) & field.domain.in_box(step)
        x[idx[ok]] = step[ok]
        run[idx[ok]] += 1
        alive[idx[~ok]] = False
    return cand[int(np.argmax(run))]


def curl_field(field, h: float = 1e-4):
    """The numerically curled field ``curl w`` as an evaluator with the same domain."""
    from .calculus import StencilConfig, curl

    cfg = StencilConfig(h=h)

    class _Curl:
        case_id = getattr(field, "case_id", "adhoc") + ":curl"
        domain = getattr(field, "domain", None)

        def __call__(self, p):
            p = np.asarray(p, dtype=float)
            return curl(field, p, cfg)

        def defined(self, p, pad=0.0):
            return field.defined(p, pad + 2 * h)

        def sample(self, n, seed=0, pad=0.0):
            return field.sample(n, seed, pad + 2 * h)

    return _Curl()


def trace_to_csv(trace: FlowTrace, invariants: Mapping[str, Callable] | None = None,
                 fmt: str = "%.8e") -> str:
    """CSV text with columns ``s, x, y, z`` plus one column per invariant."""
    invariants = dict(invariants or {})
    cols = [trace.arc_length, trace.points[:, 0], trace.points[:, 1], trace.points[:, 2]]
    cols += [np.asarray(f(trace.points), dtype=float) for f in invariants.values()]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["s", "x", "y", "z", *invariants.keys()])
    for row in np.stack(cols, axis=-1):
        wr.writerow([fmt % v for v in row])
    return buf.getvalue()


__all__ = ["FlowTrace", "Drift", "trace_field_line", "invariant_drift", "drift_ratio",
           "pick_seed", "curl_field", "trace_to_csv"]
