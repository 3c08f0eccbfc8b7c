"""Shared plumbing: atomic file output, CSV/JSON emission, slope fits, threads."""

import csv
import hashlib
import json
import os
import tempfile

import numpy as np

MOLLIFIER_ID = "mollifier:exp(-1/(1-s^2)):gl64"


def thread_count():
    """Worker cap from WAVE_THREADS (default: half the cores, at least 1)."""
    env = os.environ.get("WAVE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, (os.cpu_count() or 2) // 2)


def atomic_write_text(path, text):
    """Write text to path via temp file + rename (atomic on POSIX)."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path, data):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt_sig(x, sig=17):
    """Decimal string with `sig` significant digits (RFC-4180 friendly)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), f".{sig - 1}e")


def write_csv(path, header, rows, sig=17):
    """RFC-4180 CSV with '.' decimals and fixed significant digits, atomic."""
    out = []
    buf = csv.writer(_ListIO(out), lineterminator="\r\n")
    buf.writerow(header)
    for row in rows:
        buf.writerow([c if isinstance(c, str) else fmt_sig(c, sig) for c in row])
    atomic_write_text(path, "".join(out))


class _ListIO:
    def __init__(self, sink):
        self.sink = sink

    def write(self, s):
        self.sink.append(s)


def write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def config_hash(obj):
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def metadata_block(config, seed, tolerances=None, budgets=None):
    return {
        "config_hash": config_hash(config),
        "seed": seed,
        "tolerances": tolerances or {},
        "mollifier": MOLLIFIER_ID,
        "quadrature_budgets": budgets or {},
    }


def fit_loglog_slope(x, y):
    """Least-squares slope of log y vs log x, with 95% half-width.

    Returns (slope, intercept, half_width).  Requires >= 3 positive points
    for a confidence interval; with exactly 2 the half-width is inf.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    n = len(lx)
    if n < 2:
        raise ValueError("need at least 2 points")
    A = np.vstack([lx, np.ones(n)]).T
    coef, res, _, _ = np.linalg.lstsq(A, ly, rcond=None)
    slope, intercept = coef
    if n > 2:
        sse = float(res[0]) if res.size else float(np.sum((A @ coef - ly) ** 2))
        sx = np.sum((lx - lx.mean()) ** 2)
        se = np.sqrt(sse / (n - 2) / sx)
        half = 1.96 * se
    else:
        half = np.inf
    return float(slope), float(intercept), float(half)
