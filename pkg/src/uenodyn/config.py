"""Experiment configuration files and small expression parsing.

The format is one ``key = value`` per line; ``#`` starts a comment.  Example::

    curve.model = legendre
    curve.lambda = 3/2
    n = 3
    matrix = 0 0 1; 1 0 3; 0 1 3
    points = 3,3
    iterations = 40
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cyclo import CycInt, zeta
from .dynamics import ExperimentConfig
from .elliptic import CurveSpec
from .linalg import CycMat, IntMat, det

__all__ = ["ConfigError", "parse_config", "parse_config_text", "resolved_config",
           "parse_cyc", "parse_int_matrix", "parse_cyc_matrix"]

KNOWN_KEYS = ("curve.model", "curve.lambda", "n", "matrix", "points", "iterations",
              "tol.gram", "tol.ksc", "seed")
DEFAULTS = {"iterations": "40", "tol.gram": "1e-8", "tol.ksc": "1e-3", "seed": "0"}


class ConfigError(ValueError):
    """A configuration problem, with the offending line when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.key = key


# ---------------------------------------------------------------------------
# expressions in z


_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult, ast.Pow,
            ast.USub, ast.UAdd, ast.Constant, ast.Name, ast.Load)


def parse_cyc(text: str, k: int) -> CycInt:
    """Evaluate an integer polynomial in ``z`` (``zeta_k``), e.g. ``1 + z`` or ``-(z**5 + z**3 + z)``."""
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ValueError(f"unsupported syntax in {text!r}")
        if isinstance(node, ast.Name) and node.id != "z":
            raise ValueError(f"unknown symbol {node.id!r} in {text!r}; only z is allowed")
        if isinstance(node, ast.Constant) and (not isinstance(node.value, int) or isinstance(node.value, bool)):
            raise ValueError(f"only integer constants are allowed in {text!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            return CycInt.from_int(k, node.value)
        if isinstance(node, ast.Name):
            return zeta(k)
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        left = ev(node.left)
        if isinstance(node.op, ast.Pow):
            if not isinstance(node.right, ast.Constant):
                raise ValueError("exponents must be integer literals")
            return left ** node.right.value
        right = ev(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        return left * right

    return ev(tree)


def _split_row(row: str) -> list[str]:
    row = row.strip()
    return [e for e in (row.split(",") if "," in row else row.split()) if e.strip()]


def _rows(text: str) -> list[str]:
    return [r for r in text.replace("\n", ";").split(";") if r.strip()]


def parse_int_matrix(text: str) -> IntMat:
    rows = [[int(e) for e in _split_row(r)] for r in _rows(text)]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows must be non-empty and of equal length")
    return IntMat.of(rows)


def parse_cyc_matrix(text: str, k: int) -> CycMat:
    """Rows separated by ``;`` or newlines, entries by commas (whitespace if all entries are plain)."""
    rows = [[parse_cyc(e, k) for e in _split_row(r)] for r in _rows(text)]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows must be non-empty and of equal length")
    return CycMat.of(k, rows)


# ---------------------------------------------------------------------------
# configuration files


@dataclass(frozen=True)
class _Entry:
    value: str
    line: int


def _read_entries(text: str) -> dict[str, _Entry]:
    entries: dict[str, _Entry] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r} (known: {', '.join(KNOWN_KEYS)})", lineno, key)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} (first on line {entries[key].line})", lineno, key)
        entries[key] = _Entry(value, lineno)
    return entries


def _curve(entries: dict[str, _Entry]) -> CurveSpec:
    if "curve.model" not in entries:
        raise ConfigError("missing key 'curve.model'", key="curve.model")
    model = entries["curve.model"].value.lower()
    line = entries["curve.model"].line
    if model not in ("legendre", "quartic", "sextic"):
        raise ConfigError(f"curve.model must be legendre, quartic or sextic, got {model!r}", line, "curve.model")
    if model != "legendre":
        if "curve.lambda" in entries:
            raise ConfigError("curve.lambda is only meaningful for legendre",
                              entries["curve.lambda"].line, "curve.lambda")
        return CurveSpec(model)
    if "curve.lambda" not in entries:
        raise ConfigError("legendre model needs 'curve.lambda'", line, "curve.lambda")
    e = entries["curve.lambda"]
    try:
        lam = Fraction(e.value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"curve.lambda is not a rational number: {e.value!r}", e.line, "curve.lambda") from exc
    if lam in (0, 1):
        raise ConfigError(f"curve.lambda must not be 0 or 1 (got {e.value}): the curve is singular",
                          e.line, "curve.lambda")
    return CurveSpec.legendre(lam)


def _points(entries, curve: CurveSpec, n: int):
    if "points" not in entries:
        raise ConfigError("missing key 'points'", key="points")
    e = entries["points"]
    pts = []
    for item in (s.strip() for s in e.value.split(";")):
        if not item:
            continue
        if item.upper() == "O":
            pts.append(curve.infinity())
            continue
        parts = [s.strip() for s in item.split(",")]
        if len(parts) != 2:
            raise ConfigError(f"point {item!r} must be 'x,y' or 'O'", e.line, "points")
        try:
            x, y = Fraction(parts[0]), Fraction(parts[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"point {item!r} has non-rational coordinates", e.line, "points") from exc
        if not curve.contains(x, y):
            raise ConfigError(f"point ({parts[0]}, {parts[1]}) is not on {curve.label()}", e.line, "points")
        pts.append(curve.point(x, y))
    if len(pts) == 1:
        pts = pts * n
    if len(pts) != n:
        raise ConfigError(f"expected 1 or {n} points, got {len(pts)}", e.line, "points")
    return tuple(pts)


def _number(entries, key, kind):
    e = entries.get(key)
    raw, line = (e.value, e.line) if e else (DEFAULTS[key], None)
    try:
        value = kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be {kind.__name__}, got {raw!r}", line, key) from exc
    if kind is float and not value > 0:
        raise ConfigError(f"{key} must be positive", line, key)
    return value


def parse_config_text(text: str) -> ExperimentConfig:
    entries = _read_entries(text)
    curve = _curve(entries)
    if "n" not in entries:
        raise ConfigError("missing key 'n'", key="n")
    try:
        n = int(entries["n"].value)
    except ValueError as exc:
        raise ConfigError(f"n must be an integer, got {entries['n'].value!r}", entries["n"].line, "n") from exc
    if n < 1:
        raise ConfigError("n must be positive", entries["n"].line, "n")
    if "matrix" not in entries:
        raise ConfigError("missing key 'matrix'", key="matrix")
    me = entries["matrix"]
    try:
        matrix = parse_int_matrix(me.value)
    except ValueError as exc:
        raise ConfigError(f"matrix: {exc}", me.line, "matrix") from exc
    if matrix.shape != (n, n):
        raise ConfigError(f"matrix is {matrix.shape[0]}x{matrix.shape[1]}, expected {n}x{n}", me.line, "matrix")
    if abs(det(matrix)) != 1:
        raise ConfigError(f"matrix is not unimodular (determinant {det(matrix)})", me.line, "matrix")
    points = _points(entries, curve, n)
    iterations = _number(entries, "iterations", int)
    if iterations < 1:
        raise ConfigError("iterations must be positive", entries["iterations"].line, "iterations")
    return ExperimentConfig(curve, n, matrix, points, iterations,
                            _number(entries, "tol.gram", float), _number(entries, "tol.ksc", float),
                            _number(entries, "seed", int))


def parse_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config_text(text)


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def resolved_config(cfg: ExperimentConfig) -> dict:
    """Every effective setting, rationals as ``p/q`` strings."""
    out = {"curve.model": cfg.curve.model}
    if cfg.curve.lam is not None:
        out["curve.lambda"] = _q(cfg.curve.lam)
    out.update({
        "n": cfg.n,
        "matrix": "; ".join(" ".join(str(a) for a in r) for r in cfg.matrix.entries),
        "points": ["O" if p.is_infinity else f"{_q(p.x)},{_q(p.y)}" for p in cfg.base_points],
        "iterations": cfg.iterations,
        "tol.gram": repr(cfg.tol_gram),
        "tol.ksc": repr(cfg.tol_ksc),
        "seed": cfg.seed,
    })
    return out


def config_text(cfg: ExperimentConfig) -> str:
    """Serialise back to the file format (round-trips through :func:`parse_config_text`)."""
    r = resolved_config(cfg)
    lines = []
    for key in KNOWN_KEYS:
        if key not in r:
            continue
        v = r[key]
        if key == "points":
            v = "; ".join(v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"
