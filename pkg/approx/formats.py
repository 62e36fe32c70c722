"""Plain-text data files: one `#` header line, then numbers in full precision."""

import logging
from pathlib import Path

import numpy as np

from .exceptions import ApproxError, ConfigurationError, FormatError
from .radon import AngularSector, Sinogram
from .specext import SpectralSamples, SpectralWindow
from .stablediff import SampledSignal

logger = logging.getLogger(__name__)


def fmt(value):
    """Shortest decimal that round-trips the float."""
    return repr(float(value))


def _format_param(value):
    if isinstance(value, (tuple, list)):
        return ",".join(fmt(v) for v in value)
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return fmt(value)


def _parse_param(text):
    if "," in text:
        return tuple(float(v) for v in text.split(","))
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _lines(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(path, 0, "file", exc.strerror or str(exc)) from None
    return text.splitlines()


def _header(path, lines, names):
    if not lines or not lines[0].startswith("#"):
        raise FormatError(path, 1, "header", "missing '#' header line")
    tokens = lines[0][1:].split()
    if len(tokens) != len(names):
        raise FormatError(path, 1, "header", f"expected {len(names)} fields ({' '.join(names)}), got {len(tokens)}")
    return tokens


def _number(path, line, field, text, cast=float):
    try:
        return cast(text)
    except ValueError:
        raise FormatError(path, line, field, f"not a number: {text!r}") from None


def _data_rows(lines, start=1):
    for number, line in enumerate(lines[start:], start=start + 1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield number, stripped.split()


# signals

SIGNAL_HEADER = ("x0", "dx", "period", "delta")


def write_signal(path, signal):
    lines = ["# " + " ".join(fmt(v) for v in (signal.x0, signal.dx, signal.period, signal.delta))]
    lines += [fmt(v) for v in signal.values]
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal(path):
    lines = _lines(path)
    tokens = _header(path, lines, SIGNAL_HEADER)
    x0, dx, period, delta = (_number(path, 1, name, tok) for name, tok in zip(SIGNAL_HEADER, tokens))
    values = []
    for number, fields in _data_rows(lines):
        if len(fields) != 1:
            raise FormatError(path, number, "value", f"expected one value, got {len(fields)}")
        values.append(_number(path, number, "value", fields[0]))
    try:
        return SampledSignal(np.array(values), x0=x0, dx=dx, period=period, delta=delta)
    except ApproxError as exc:
        raise FormatError(path, 1, "period" if "period" in str(exc) else "header", str(exc)) from None


def write_derivative(path, signal, report):
    header = (
        f"# bound={fmt(report.bound)} h_used={fmt(report.h_used)} "
        f"h_ideal={fmt(report.h_ideal)} snapping_slack={fmt(report.snapping_slack)}"
    )
    rows = [f"{fmt(x)} {fmt(d)}" for x, d in zip(signal.grid, report.derivative)]
    Path(path).write_text("\n".join([header, *rows]) + "\n")


# spectral samples

def write_spectral_samples(path, samples):
    window = samples.window
    params = " ".join(f"{key}={_format_param(value)}" for key, value in window.params.items())
    lines = [f"# {window.dim} {window.shape} {params}"]
    for node, value in zip(window.nodes, samples.values):
        coords = " ".join(fmt(c) for c in node)
        lines.append(f"{coords} {fmt(value.real)} {fmt(value.imag)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_spectral_samples(path):
    lines = _lines(path)
    if not lines or not lines[0].startswith("#"):
        raise FormatError(path, 1, "header", "missing '#' header line")
    tokens = lines[0][1:].split()
    if len(tokens) < 2:
        raise FormatError(path, 1, "header", "expected 'dim shape params'")
    dim = _number(path, 1, "dim", tokens[0], int)
    shape = tokens[1]
    params = {}
    for token in tokens[2:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise FormatError(path, 1, "params", f"expected key=value, got {token!r}")
        params[key] = _parse_param(value)
    try:
        window = SpectralWindow.from_params(dim, shape, params)
    except ConfigurationError as exc:
        raise FormatError(path, 1, "params", str(exc)) from None
    coords, values = [], []
    for number, fields in _data_rows(lines):
        if len(fields) != dim + 2:
            raise FormatError(path, number, "row", f"expected {dim + 2} columns, got {len(fields)}")
        coords.append([_number(path, number, f"xi{k}", fields[k]) for k in range(dim)])
        re_part = _number(path, number, "re", fields[dim])
        im_part = _number(path, number, "im", fields[dim + 1])
        values.append(complex(re_part, im_part))
    if len(values) != len(window.nodes):
        raise FormatError(path, len(lines), "rows", f"{len(values)} rows for {len(window.nodes)} window nodes")
    if not np.allclose(np.array(coords), window.nodes, rtol=1e-12, atol=1e-12):
        raise ConfigurationError(f"{path}: sample coordinates are not the window quadrature nodes")
    return SpectralSamples(window, np.array(values))


# fields

def write_field(path, axes, values):
    """1D header `# nx x0 dx`, 2D header `# nx ny x0 y0 dx dy`; then `re im` rows, row-major."""
    values = np.asarray(values, dtype=complex)
    sizes = [len(ax) for ax in axes]
    starts = [ax[0] for ax in axes]
    steps = [ax[1] - ax[0] if len(ax) > 1 else 0.0 for ax in axes]
    header = "# " + " ".join([*map(str, sizes), *map(fmt, starts), *map(fmt, steps)])
    rows = [f"{fmt(v.real)} {fmt(v.imag)}" for v in values.reshape(sizes).ravel()]
    Path(path).write_text("\n".join([header, *rows]) + "\n")


def read_field(path):
    lines = _lines(path)
    tokens = lines[0][1:].split() if lines and lines[0].startswith("#") else []
    if len(tokens) not in (3, 6):
        raise FormatError(path, 1, "header", "expected '# nx x0 dx' or '# nx ny x0 y0 dx dy'")
    dim = len(tokens) // 3
    sizes = [_number(path, 1, name, tok, int) for name, tok in zip(("nx", "ny"), tokens[:dim])]
    starts = [_number(path, 1, name, tok) for name, tok in zip(("x0", "y0"), tokens[dim:2 * dim])]
    steps = [_number(path, 1, name, tok) for name, tok in zip(("dx", "dy"), tokens[2 * dim:])]
    values = []
    for number, fields in _data_rows(lines):
        if len(fields) != 2:
            raise FormatError(path, number, "value", "expected 're im'")
        values.append(complex(_number(path, number, "re", fields[0]), _number(path, number, "im", fields[1])))
    if len(values) != int(np.prod(sizes)):
        raise FormatError(path, len(lines), "rows", f"{len(values)} values for a {'x'.join(map(str, sizes))} grid")
    axes = [s + d * np.arange(n) for s, d, n in zip(starts, steps, sizes)]
    return axes, np.array(values).reshape(sizes)


# sinograms

SINOGRAM_HEADER = ("alpha_min", "alpha_max", "n_alpha", "p0", "dp", "n_p")


def write_sinogram(path, sinogram):
    s = sinogram.sector
    header = "# " + " ".join([fmt(s.alpha_min), fmt(s.alpha_max), str(s.count), fmt(sinogram.p0), fmt(sinogram.dp), str(sinogram.n_p)])
    rows = [fmt(v) for v in sinogram.values.ravel()]
    Path(path).write_text("\n".join([header, *rows]) + "\n")


def read_sinogram(path):
    lines = _lines(path)
    tokens = _header(path, lines, SINOGRAM_HEADER)
    casts = (float, float, int, float, float, int)
    alpha_min, alpha_max, n_alpha, p0, dp, n_p = (
        _number(path, 1, name, tok, cast) for name, tok, cast in zip(SINOGRAM_HEADER, tokens, casts)
    )
    values = []
    for number, fields in _data_rows(lines):
        if len(fields) != 1:
            raise FormatError(path, number, "value", f"expected one value, got {len(fields)}")
        values.append(_number(path, number, "value", fields[0]))
    if len(values) != n_alpha * n_p:
        raise FormatError(path, len(lines), "rows", f"{len(values)} values for {n_alpha} x {n_p}")
    try:
        sector = AngularSector(alpha_min, alpha_max, n_alpha)
        return Sinogram(sector, p0, dp, np.array(values).reshape(n_alpha, n_p))
    except ApproxError as exc:
        raise FormatError(path, 1, "header", str(exc)) from None


# tables

def format_table(columns, rows):
    cells = [[c if isinstance(c, str) else fmt(c) if isinstance(c, float) else str(c) for c in row] for row in rows]
    widths = [max([len(col)] + [len(r[i]) for r in cells]) for i, col in enumerate(columns)]
    widths[0] = max(widths[0], len(columns[0]) + 2)
    header = "# " + "  ".join(col.ljust(w) for col, w in zip([columns[0]], [widths[0] - 2]))
    header += "".join("  " + col.ljust(w) for col, w in zip(columns[1:], widths[1:]))
    body = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join([header.rstrip(), *body]) + "\n"


def write_table(path, columns, rows):
    Path(path).write_text(format_table(columns, rows))
