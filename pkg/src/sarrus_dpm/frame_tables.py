"""Published Sarrus-frame tables for the three Platonic mechanisms.

Each entry is ``(R, p_dir)`` exactly as tabulated, including known misprints;
``builder`` compares its geometry-derived frames against these and records
every mismatch instead of silently trusting either side.

Token shorthand: ``g = (sqrt5 + 1)/4``, ``h = (sqrt5 - 1)/4``, ``q = 1/2``,
``r = sqrt2/2``.
"""
from __future__ import annotations

import numpy as np

_TOKENS = {
    "0": 0.0,
    "1": 1.0,
    "q": 0.5,
    "r": np.sqrt(2.0) / 2.0,
    "g": (np.sqrt(5.0) + 1.0) / 4.0,
    "h": (np.sqrt(5.0) - 1.0) / 4.0,
}


def _vec(text: str) -> np.ndarray:
    out = []
    for tok in text.split():
        sign = -1.0 if tok.startswith("-") else 1.0
        out.append(sign * _TOKENS[tok.lstrip("-")])
    return np.array(out)


def _parse(rows: list[tuple[str, str]]) -> list[tuple[np.ndarray, np.ndarray]]:
    table = []
    for R_text, p_text in rows:
        R = np.array([_vec(r) for r in R_text.split("/")])
        p = _vec(p_text)
        table.append((R, p / np.linalg.norm(p)))
    return table


TETRAHEDRON = _parse(
    [
        ("-r -r 0 / r -r 0 / 0 0 1", "0 0 1"),
        ("0 0 -1 / -r -r 0 / -r r 0", "-1 0 0"),
        ("r -r 0 / 0 0 -1 / r r 0", "0 -1 0"),
        ("0 0 1 / -r -r 0 / r -r 0", "1 0 0"),
        ("-r r 0 / 0 0 1 / r r 0", "0 1 0"),
        ("-r -r 0 / -r r 0 / 0 0 -1", "0 0 -1"),
    ]
)

CUBE = _parse(
    [
        ("0 -r r / 1 0 0 / 0 r r", "1 0 1"),
        ("-1 0 0 / 0 -r r / 0 r r", "0 1 1"),
        ("0 r -r / -1 0 0 / 0 r r", "-1 0 1"),
        ("1 0 0 / 0 r -r / 0 r r", "0 -1 1"),
        ("0 r r / 0 -r r / 1 0 0", "1 0 1"),  # duplicates frame 1's offset
        ("0 r -r / 0 r r / 1 0 0", "-1 1 0"),
        ("0 -r -r / 0 r -r / 1 0 0", "-1 -1 0"),
        ("0 -r r / 0 -r -r / 1 0 0", "1 -1 0"),
        ("0 r r / 1 0 0 / 0 r -r", "1 0 -1"),
        ("-1 0 0 / 0 r r / 0 r -r", "0 1 -1"),
        ("0 -r -r / -1 0 0 / 0 r -r", "-1 0 -1"),
        ("1 0 0 / 0 -r -r / 0 r -r", "0 -1 -1"),
    ]
)

DODECAHEDRON = _parse(
    [
        ("-g -q -h / h -g q / -q h g", "-h q g"),
        ("0 -1 0 / 1 0 0 / 0 0 1", "0 0 1"),
        ("g -q -h / h g -q / q h g", "-h -q g"),
        ("q h -g / -g q -h / h g q", "-g -h q"),
        ("-q h -g / -g -q h / -h g q", "-g h q"),
        ("-h g -q / -q h g / g q h", "-q g h"),
        ("-g q h / -h -g q / q h g", "h q g"),
        ("-g -q h / h -g -q / q -h g", "h -q g"),
        ("-h -g -q / q h -g / g -q h", "-q -g h"),
        ("0 0 -1 / 0 1 0 / 1 0 0", "-1 0 0"),
        ("h g -q / q h g / g -q -h", "-q g -h"),
        ("-1 0 0 / 0 0 1 / 0 1 0", "0 1 0"),
        ("h g q / -q -h g / g -q h", "q g h"),
        ("-q -h g / g -q h / h g q", "g h q"),
        ("-q h g / -g -q -h / h -g q", "g -h q"),
        ("h -g q / q -h -g / g -q h", "q -g h"),
        ("-1 0 0 / 0 0 -1 / 0 -1 0", "0 -1 0"),
        ("h -g -q / -q h -g / g q -h", "-q -g -h"),
        ("-q h -g / g q -h / h -g -q", "-g -h -q"),
        ("-q -h -g / -g q h / h g -q", "-g h -q"),
        ("-h g q / q -h g / g q -h", "q g -h"),
        ("0 0 1 / 0 -1 0 / 1 0 0", "1 0 0"),
        ("-h -g q / -q -h -g / g -q -h", "q -g -h"),
        ("-g -q -h / -h g -q / q -h -g", "-h -q -g"),
        ("-g q -h / h g q / q h -g", "-h q -g"),
        ("g q h / h -g q / q -h -g", "h q -g"),
        ("q -h g / -g -q h / h -g -q", "g h -q"),
        ("-q -h g / -g q -h / -h -g -q", "g -h -q"),
        ("-g q h / h g -q / -q -h -g", "h -q -g"),
        ("0 1 0 / 1 0 0 / 0 0 -1", "0 0 -1"),
    ]
)

TABLES = {"tetrahedron": TETRAHEDRON, "cube": CUBE, "dodecahedron": DODECAHEDRON}
