"""Named coefficient presets, each with an analytic or reduced oracle for g0."""
from __future__ import annotations

import json

import numpy as np

from ..operators import CoefficientField, Symbol

PRESETS = ("constant", "cos1d", "layered2d", "checker2d-smooth", "fourier")


def _scalar_times(matrix, values, d):
    return values[None, None] * matrix.reshape(matrix.shape + (1,) * d)


def parse_symbol(spec, d):
    """``gradient``, ``scalar`` (d = 1 only) or a JSON list of ``d`` matrices."""
    if spec in (None, "", "gradient"):
        return Symbol.gradient(d) if d > 1 else Symbol(np.ones((1, 1, 1)))
    if spec == "scalar":
        if d != 1:
            raise ValueError("the scalar symbol b(D) = D needs d = 1")
        return Symbol(np.ones((1, 1, 1)))
    mats = np.array(json.loads(spec), dtype=complex)
    return Symbol(mats)


def parse_fourier_table(text, d):
    """``k_1 .. k_d re [im]`` rows separated by ``;`` or newlines."""
    rows = []
    for line in text.replace(";", "\n").splitlines():
        line = line.strip()
        if not line:
            continue
        parts = [float(p) for p in line.split()]
        if len(parts) not in (d + 1, d + 2):
            raise ValueError(f"bad Fourier row {line!r}")
        k = np.array(parts[:d], dtype=int)
        c = complex(parts[d], parts[d + 1] if len(parts) == d + 2 else 0.0)
        rows.append((k, c))
    if not rows:
        raise ValueError("empty Fourier table")
    return rows


def make_problem(preset, d=1, a=2.0, cell_N=64, value=None, symbol=None, table=None):
    """``(CoefficientField, Symbol, oracle)`` for a preset.

    ``oracle`` is the exact effective matrix when one is known, else None.
    """
    if preset == "cos1d":
        sym = parse_symbol(symbol or "scalar", 1)

        def func(x):
            return _scalar_times(np.eye(sym.m), a + np.cos(2 * np.pi * x[0]), 1)

        oracle = np.sqrt(a * a - 1.0) * np.eye(sym.m)
        return CoefficientField.from_function(func, 1, cell_N), sym, oracle

    if preset == "constant":
        sym = parse_symbol(symbol, d)
        if value is None:
            mat = a * np.eye(sym.m)
        else:
            mat = np.atleast_2d(np.array(json.loads(value) if isinstance(value, str) else value,
                                         dtype=complex))
            if mat.size == 1:
                mat = mat.reshape(()) * np.eye(sym.m)
        return CoefficientField.constant(mat, d, cell_N), sym, mat

    if preset == "layered2d":
        sym = Symbol.gradient(2)

        def func(x):
            return _scalar_times(np.eye(2), a + np.cos(2 * np.pi * x[0]), 2)

        oracle = np.diag([np.sqrt(a * a - 1.0), a])
        return CoefficientField.from_function(func, 2, cell_N), sym, oracle

    if preset == "checker2d-smooth":
        sym = Symbol.gradient(2)

        def func(x):
            return _scalar_times(
                np.eye(2), a + np.cos(2 * np.pi * x[0]) * np.cos(2 * np.pi * x[1]), 2)

        return CoefficientField.from_function(func, 2, cell_N), sym, None

    if preset == "fourier":
        if table is None:
            raise ValueError("the fourier preset needs a coefficient table")
        rows = parse_fourier_table(table, d)
        sym = parse_symbol(symbol, d)

        def func(x):
            s = np.zeros(x.shape[1:], dtype=complex)
            for k, c in rows:
                s = s + c * np.exp(2j * np.pi * np.tensordot(k, x, axes=1))
            s = s.real if np.max(np.abs(s.imag)) < 1e-13 else s
            return _scalar_times(np.eye(sym.m), s, d)

        return CoefficientField.from_function(func, d, cell_N), sym, None

    raise ValueError(f"unknown preset {preset!r}; choose from {PRESETS}")


def voigt_reuss(g: CoefficientField):
    """Harmonic and arithmetic means of a scalar-times-identity coefficient."""
    s = g.values[0, 0].real
    return 1.0 / np.mean(1.0 / s), float(np.mean(s))
