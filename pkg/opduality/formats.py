# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Line-oriented text formats: networks, matrices, Gram pairs and interval jobs.

Blank lines and lines starting with '#' are skipped everywhere. Errors carry 1-based line and
column numbers.
"""
import os
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from opduality.base import ParseError
from opduality.hilbert_pair import CommonDomain, WeightedSpace
from opduality.network import Network, emit_network

PathLike = Union[str, os.PathLike]

Token = Tuple[str, int]


def _read(path: PathLike) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _tokenized(text: str) -> Iterator[Tuple[int, List[Token]]]:
    """(line number, [(token, column), ...]) for every content line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens, col = [], 0
        for word in raw.split():
            col = raw.index(word, col)
            tokens.append((word, col + 1))
            col += len(word)
        yield lineno, tokens


def _number(token: Token, lineno: int, kind=float):
    word, col = token
    try:
        value = kind(word)
    except ValueError:
        raise ParseError(f"Expected {kind.__name__}, got '{word}'", lineno, col) from None
    if kind is float and not np.isfinite(value):
        raise ParseError(f"Non-finite number '{word}'", lineno, col)
    return value


def _expect(tokens: List[Token], lineno: int, keyword: str, arity: int):
    word, col = tokens[0]
    if word != keyword:
        raise ParseError(f"Expected '{keyword}', got '{word}'", lineno, col)
    if len(tokens) != arity + 1:
        end = tokens[-1][1] + len(tokens[-1][0])
        raise ParseError(f"'{keyword}' takes {arity} argument(s), got {len(tokens) - 1}", lineno, end)


# ============ Networks ============

def loads_network(text: str) -> Network:
    """Parse the network format from a string."""
    lines = list(_tokenized(text))
    if not lines:
        raise ParseError("Empty network file", 1, 1)
    lineno, tokens = lines[0]
    _expect(tokens, lineno, "network", 1)
    name = tokens[1][0]
    if len(lines) < 2:
        raise ParseError("Missing 'base' line", lineno + 1, 1)
    lineno, tokens = lines[1]
    _expect(tokens, lineno, "base", 1)
    base = tokens[1][0]

    vertices: List[str] = []
    seen_vertices = set()

    def add_vertex(v: str):
        if v not in seen_vertices:
            seen_vertices.add(v)
            vertices.append(v)

    edges = []
    seen_edges = set()
    for lineno, tokens in lines[2:]:
        keyword, col = tokens[0]
        if keyword == "edge":
            _expect(tokens, lineno, "edge", 3)
            u, v = tokens[1][0], tokens[2][0]
            c = _number(tokens[3], lineno)
            key = frozenset((u, v))
            if key in seen_edges:
                raise ParseError(f"Duplicate edge {u}-{v}", lineno, col)
            if u == v:
                raise ParseError(f"Self-loop at '{u}'", lineno, tokens[2][1])
            seen_edges.add(key)
            add_vertex(u)
            add_vertex(v)
            edges.append((u, v, c))
        elif keyword == "vertex":
            _expect(tokens, lineno, "vertex", 1)
            add_vertex(tokens[1][0])
        else:
            raise ParseError(f"Unknown keyword '{keyword}'", lineno, col)
    add_vertex(base)
    return Network(tuple(vertices), tuple(edges), base, name=name)


def parse_network(path: PathLike) -> Network:
    """
    Read a network file.

    Raises:
        ParseError: malformed line
        NotConnected: more than one component
        NonpositiveConductance: an edge with c <= 0
    """
    return loads_network(_read(path))


def write_network(n: Network, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(emit_network(n))


# ============ Matrices ============

def _block(lines, start: int, rows: int, cols: int, header_line: int) -> Tuple[np.ndarray, int]:
    if start + rows > len(lines):
        raise ParseError(f"Expected {rows} row(s) after header", header_line, 1)
    out = np.zeros((rows, cols))
    for r in range(rows):
        lineno, tokens = lines[start + r]
        if len(tokens) != cols:
            raise ParseError(f"Row has {len(tokens)} entries, expected {cols}", lineno, tokens[0][1])
        out[r] = [_number(t, lineno) for t in tokens]
    return out, start + rows


def _header(lines, pos: int, keywords: Tuple[str, ...]) -> Tuple[str, List[int], int]:
    lineno, tokens = lines[pos]
    word, col = tokens[0]
    if word not in keywords:
        raise ParseError(f"Expected one of {', '.join(keywords)}, got '{word}'", lineno, col)
    arity = 1 if word == "gram" else 2
    _expect(tokens, lineno, word, arity)
    sizes = [_number(t, lineno, int) for t in tokens[1:]]
    for size, (_, c) in zip(sizes, tokens[1:]):
        if size < 0:
            raise ParseError(f"Negative size {size}", lineno, c)
    return word, sizes, lineno


def loads_matrix(text: str) -> Tuple[str, np.ndarray]:
    """('matrix' | 'gram', array) from `matrix r c` or `gram d` followed by the rows."""
    lines = list(_tokenized(text))
    if not lines:
        raise ParseError("Empty matrix file", 1, 1)
    kind, sizes, lineno = _header(lines, 0, ("matrix", "gram"))
    rows, cols = (sizes[0], sizes[0]) if kind == "gram" else sizes
    m, end = _block(lines, 1, rows, cols, lineno)
    if end != len(lines):
        extra_line, tokens = lines[end]
        raise ParseError("Trailing content after matrix rows", extra_line, tokens[0][1])
    return kind, m


def parse_matrix(path: PathLike) -> Tuple[str, np.ndarray]:
    return loads_matrix(_read(path))


def emit_matrix(m, kind: str = "matrix") -> str:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    header = f"gram {m.shape[0]}" if kind == "gram" else f"matrix {m.shape[0]} {m.shape[1]}"
    return "\n".join([header] + [" ".join(repr(float(x)) for x in row) for row in m]) + "\n"


# ============ Pairs ============

def loads_pair(text: str) -> CommonDomain:
    """`pair`, two `gram d` blocks (H1 then H2) and an optional `basis d k` block."""
    lines = list(_tokenized(text))
    if not lines:
        raise ParseError("Empty pair file", 1, 1)
    lineno, tokens = lines[0]
    _expect(tokens, lineno, "pair", 0)
    pos = 1
    grams = []
    for label in ("H1", "H2"):
        if pos >= len(lines):
            raise ParseError(f"Missing gram block for {label}", lineno + 1, 1)
        _, sizes, header_line = _header(lines, pos, ("gram",))
        g, pos = _block(lines, pos + 1, sizes[0], sizes[0], header_line)
        grams.append(WeightedSpace(sizes[0], g, label))
    basis: Optional[np.ndarray] = None
    if pos < len(lines):
        _, sizes, header_line = _header(lines, pos, ("basis",))
        if sizes[0] != grams[0].dim:
            raise ParseError(f"Basis has {sizes[0]} rows, spaces have dim {grams[0].dim}", header_line, 1)
        basis, pos = _block(lines, pos + 1, sizes[0], sizes[1], header_line)
    if pos != len(lines):
        extra_line, tokens = lines[pos]
        raise ParseError("Trailing content after pair", extra_line, tokens[0][1])
    if grams[0].dim != grams[1].dim:
        raise ParseError(f"Gram blocks differ in size: {grams[0].dim} vs {grams[1].dim}", lineno, 1)
    return CommonDomain.same_coordinates(grams[0], grams[1], basis)


def parse_pair(path: PathLike) -> CommonDomain:
    return loads_pair(_read(path))


# ============ Interval jobs ============

@dataclass(frozen=True)
class IntervalJob:
    interval: Tuple[float, float] = (0.0, 1.0)
    grid: int = 256
    sweep: Tuple[float, ...] = tuple(float(r) for r in range(1, 9))


def loads_interval(text: str) -> IntervalJob:
    """Optional `interval lo hi`, `grid n` and `sweep r1,r2,...` lines."""
    job = IntervalJob()
    interval, grid, sweep = job.interval, job.grid, job.sweep
    for lineno, tokens in _tokenized(text):
        keyword, col = tokens[0]
        if keyword == "interval":
            _expect(tokens, lineno, "interval", 2)
            lo, hi = _number(tokens[1], lineno), _number(tokens[2], lineno)
            if not lo < hi:
                raise ParseError(f"Empty interval ({lo}, {hi})", lineno, tokens[1][1])
            interval = (lo, hi)
        elif keyword == "grid":
            _expect(tokens, lineno, "grid", 1)
            grid = _number(tokens[1], lineno, int)
        elif keyword == "sweep":
            _expect(tokens, lineno, "sweep", 1)
            word, c = tokens[1]
            sweep = tuple(_number((r, c), lineno) for r in word.split(",") if r)
            if not sweep or any(r <= 0 for r in sweep):
                raise ParseError("Sweep radii must be positive", lineno, c)
        else:
            raise ParseError(f"Unknown keyword '{keyword}'", lineno, col)
    return IntervalJob(interval, grid, sweep)


def parse_interval(path: PathLike) -> IntervalJob:
    return loads_interval(_read(path))
