"""Quaternionic analysis/synthesis filter banks and the QWFB file format.

A bank is four analysis tap grids (one low-pass ``H``, three high-pass
``G1``, ``G2``, ``G3``) plus four synthesis grids of the same shape, all
quaternion-valued.  When a file carries only analysis sections the
synthesis taps are derived as the elementwise conjugates of the analysis
taps, which is the adjoint of the analysis operator under the real part
of the quaternionic inner product (left multiplication by q has adjoint
left multiplication by conj(q)).  For orthonormal banks this makes the
round trip exact, which is what :func:`validate_pr` certifies
operationally: filter validity here is a measured round-trip error, not
an algebraic condition.

QWFB v1 format (UTF-8, line oriented, ``#`` starts a comment)::

    QWFB v1
    taps <rows> <cols>
    analysis H
    <rows*cols lines of four reals: a b c d, row-major>
    analysis G1
    ...
    analysis G2
    ...
    analysis G3
    ...
    [synthesis H / G1 / G2 / G3 sections, same layout]

Analysis sections are mandatory and ordered H, G1, G2, G3; synthesis
sections are optional and follow in the same order.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np

from . import engine
from .quaternion import conj, modulus

__all__ = [
    "FilterBank",
    "SUBBAND_LABELS",
    "PR_TOLERANCE",
    "builtin",
    "derive_synthesis",
    "load_bank",
    "save_bank",
    "validate_pr",
]

SUBBAND_LABELS = ("H", "G1", "G2", "G3")

# operational perfect-reconstruction certificate threshold
PR_TOLERANCE = 1e-9

BUILTIN_NAMES = ("haar", "qhaar")


@dataclass(eq=False)
class FilterBank:
    """Analysis and synthesis tap quadruples of one wavelet filter bank.

    ``analysis`` and ``synthesis`` are (4, rows, cols, 4) arrays: subband
    axis ordered as ``SUBBAND_LABELS``, then the 2-D tap grid, then the
    four quaternion components.  ``pr_error`` holds the last measured
    round-trip error when the bank has been validated.
    """

    name: str
    analysis: np.ndarray
    synthesis: np.ndarray
    pr_error: float | None = None

    def __post_init__(self):
        self.analysis = np.asarray(self.analysis, dtype=float)
        self.synthesis = np.asarray(self.synthesis, dtype=float)
        for arr, kind in ((self.analysis, "analysis"), (self.synthesis, "synthesis")):
            if arr.ndim != 4 or arr.shape[0] != 4 or arr.shape[-1] != 4:
                raise ValueError(f"{kind} taps must have shape (4, rows, cols, 4)")
        if self.analysis.shape != self.synthesis.shape:
            raise ValueError("analysis and synthesis taps disagree in shape")

    @property
    def taps_shape(self) -> tuple[int, int]:
        return self.analysis.shape[1], self.analysis.shape[2]

    @property
    def valid(self) -> bool:
        """True unless a validation has measured a failing round trip."""
        return self.pr_error is None or self.pr_error < PR_TOLERANCE

    def __eq__(self, other):
        # coefficientwise equality; the name is a label, not content
        if not isinstance(other, FilterBank):
            return NotImplemented
        return (
            self.analysis.shape == other.analysis.shape
            and np.array_equal(self.analysis, other.analysis)
            and np.array_equal(self.synthesis, other.synthesis)
        )


def derive_synthesis(analysis: np.ndarray) -> np.ndarray:
    """Synthesis taps from analysis taps: the elementwise conjugate.

    Applying the rule twice returns the original taps (conjugation is an
    involution).
    """
    return conj(np.asarray(analysis, dtype=float))


def builtin(name: str) -> FilterBank:
    """Built-in test banks.

    ``haar``
        Real orthonormal 2x2 bank: H = [[.5,.5],[.5,.5]],
        G1 = [[.5,-.5],[.5,-.5]], G2 = [[.5,.5],[-.5,-.5]],
        G3 = [[.5,-.5],[-.5,.5]].
    ``qhaar``
        The same bank with every tap of each subband left-multiplied by
        a fixed unit quaternion (H by 1, G1 by e1, G2 by e2, G3 by e12),
        giving a genuinely quaternion-valued orthonormal bank: the unit
        factors cancel in the round trip via conj(u)*u = 1.
    """
    if name not in BUILTIN_NAMES:
        raise ValueError(
            f"unknown builtin bank {name!r}; available: {', '.join(BUILTIN_NAMES)}"
        )
    signs = 0.5 * np.array(
        [
            [[1.0, 1.0], [1.0, 1.0]],
            [[1.0, -1.0], [1.0, -1.0]],
            [[1.0, 1.0], [-1.0, -1.0]],
            [[1.0, -1.0], [-1.0, 1.0]],
        ]
    )
    analysis = np.zeros((4, 2, 2, 4))
    if name == "haar":
        analysis[..., 0] = signs
    else:
        # subband f carries its taps in quaternion component f
        for f in range(4):
            analysis[f, :, :, f] = signs[f]
    return FilterBank(name=name, analysis=analysis, synthesis=derive_synthesis(analysis))


def validate_pr(bank: FilterBank, trials: int = 3, size: int = 32, seed: int = 0) -> float:
    """Operational perfect-reconstruction certificate.

    Runs one-level round trips on ``trials`` random quaternion images of
    side ``size`` (components uniform in [-1, 1]) and returns the
    maximum pixel-modulus error.  ``size`` must be a power of two at
    least as large as the tap grid.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if size & (size - 1) or size < max(bank.taps_shape):
        raise ValueError(
            f"size must be a power of two >= the {bank.taps_shape} taps, got {size}"
        )
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = rng.uniform(-1.0, 1.0, size=(size, size, 4))
        rebuilt = engine.synthesize_level(*engine.analyze_level(x, bank), bank)
        worst = max(worst, float(np.max(modulus(rebuilt - x))))
    return worst


def _parse_taps_line(tokens, lineno):
    if len(tokens) != 4:
        raise ValueError(f"line {lineno}: expected 4 tap components, got {len(tokens)}")
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ValueError(f"line {lineno}: non-numeric tap value") from None


def load_bank(path, validate: bool = True) -> FilterBank:
    """Parse a QWFB v1 file into a bank.

    Missing synthesis sections are derived via :func:`derive_synthesis`.
    When ``validate`` is true the bank is round-trip checked; a failing
    bank is returned with ``pr_error`` set and a warning, not an error.
    Parse problems raise ValueError naming the offending line.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    lines = [
        (i + 1, ln.strip())
        for i, ln in enumerate(raw)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines or lines[0][1] != "QWFB v1":
        lineno = lines[0][0] if lines else 1
        raise ValueError(f"line {lineno}: expected header 'QWFB v1'")
    if len(lines) < 2 or not lines[1][1].startswith("taps"):
        raise ValueError(f"line {lines[1][0] if len(lines) > 1 else 1}: expected 'taps <rows> <cols>'")
    tokens = lines[1][1].split()
    try:
        rows, cols = int(tokens[1]), int(tokens[2])
    except (IndexError, ValueError):
        raise ValueError(f"line {lines[1][0]}: malformed taps line {lines[1][1]!r}") from None
    if rows < 1 or cols < 1:
        raise ValueError(f"line {lines[1][0]}: tap dimensions must be positive")

    expected_sections = [("analysis", lbl) for lbl in SUBBAND_LABELS]
    expected_sections += [("synthesis", lbl) for lbl in SUBBAND_LABELS]
    grids = {}
    pos = 2
    section = 0
    while pos < len(lines):
        lineno, text = lines[pos]
        parts = text.split()
        if len(parts) != 2 or parts[0] not in ("analysis", "synthesis"):
            raise ValueError(f"line {lineno}: expected a section header, got {text!r}")
        if section >= len(expected_sections) or (parts[0], parts[1]) != expected_sections[section]:
            want = " ".join(expected_sections[section]) if section < len(expected_sections) else "end of file"
            raise ValueError(f"line {lineno}: section {text!r} out of order; expected {want!r}")
        pos += 1
        taps = np.zeros((rows, cols, 4))
        for idx in range(rows * cols):
            if pos >= len(lines):
                raise ValueError(
                    f"line {lineno}: section '{text}' ends after {idx} of {rows * cols} taps"
                )
            tap_lineno, tap_text = lines[pos]
            tap_tokens = tap_text.split()
            if tap_tokens[0] in ("analysis", "synthesis"):
                raise ValueError(
                    f"line {tap_lineno}: section '{text}' has {idx} of {rows * cols} taps"
                )
            taps[idx // cols, idx % cols] = _parse_taps_line(tap_tokens, tap_lineno)
            pos += 1
        grids[(parts[0], parts[1])] = taps
        section += 1
    if section not in (4, 8):
        raise ValueError(
            f"file ends after {section} sections; expected the 4 analysis "
            "sections, optionally followed by the 4 synthesis sections"
        )

    analysis = np.stack([grids[("analysis", lbl)] for lbl in SUBBAND_LABELS])
    if section == 8:
        synthesis = np.stack([grids[("synthesis", lbl)] for lbl in SUBBAND_LABELS])
    else:
        synthesis = derive_synthesis(analysis)

    name = os.path.splitext(os.path.basename(str(path)))[0]
    bank = FilterBank(name=name, analysis=analysis, synthesis=synthesis)
    if validate:
        size = 32
        while size < max(bank.taps_shape):
            size *= 2
        bank.pr_error = validate_pr(bank, trials=2, size=size)
        if not bank.valid:
            warnings.warn(
                f"bank {name!r} fails the round-trip certificate "
                f"(max error {bank.pr_error:.3e} >= {PR_TOLERANCE:g})",
                UserWarning,
                stacklevel=2,
            )
    return bank


def save_bank(bank: FilterBank, path) -> None:
    """Write all eight sections of a bank in QWFB v1 format.

    Tap components are written with ``repr`` so a load/save round trip
    reproduces the floating-point values exactly.
    """
    rows, cols = bank.taps_shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("QWFB v1\n")
        fh.write(f"taps {rows} {cols}\n")
        for kind, arr in (("analysis", bank.analysis), ("synthesis", bank.synthesis)):
            for f, lbl in enumerate(SUBBAND_LABELS):
                fh.write(f"{kind} {lbl}\n")
                for r in range(rows):
                    for c in range(cols):
                        fh.write(" ".join(repr(float(v)) for v in arr[f, r, c]) + "\n")
