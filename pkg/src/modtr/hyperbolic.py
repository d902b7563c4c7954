"""Hyperbolic geometry at desk scale: pants seams and the one-holed torus.

The torus is described by Fenchel-Nielsen data (l, tau) for a curve gamma
together with the boundary length L.  Its holonomy is

    X = diag(e^{l/2}, e^{-l/2})
    Y = diag(e^{tau/2}, e^{-tau/2}) @ [[cosh(d/2), sinh(d/2)], [sinh(d/2), cosh(d/2)]]

where d is the length of the common perpendicular from gamma to itself,
cosh d = (cosh(L/2) + cosh^2(l/2)) / sinh^2(l/2).  Simple closed curves are
indexed by slopes p/q; gamma has slope 0/1 and the curve dual to it 1/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

__all__ = [
    "PantsMetric",
    "seam_length",
    "FNTorus",
    "torus_spectrum",
    "christoffel_spectrum",
    "mcshane_sum",
    "mcshane_partial_sums",
    "count_curves",
    "fit_growth",
    "count_small_pants_bound_check",
    "corrected_seam_bound",
    "pants_grid",
    "seam_lengths",
    "boundary_from_seams",
    "length_from_trace",
    "christoffel_word",
]

Mat = Tuple[float, float, float, float]


def _mul(a: Mat, b: Mat) -> Mat:
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def _inv(a: Mat) -> Mat:
    # unit determinant
    return (a[3], -a[1], -a[2], a[0])


def _tr(a: Mat) -> float:
    return a[0] + a[3]


def length_from_trace(t: float) -> float:
    return 2.0 * math.acosh(max(abs(t) / 2.0, 1.0))


@dataclass(frozen=True)
class PantsMetric:
    L1: float
    L2: float
    L3: float

    def __post_init__(self):
        if min(self.L1, self.L2, self.L3) <= 0:
            raise ValueError("boundary lengths must be positive")


def seam_length(p: PantsMetric) -> float:
    """Distance d_{12} between boundaries 1 and 2."""
    h1, h2, h3 = p.L1 / 2, p.L2 / 2, p.L3 / 2
    c = (math.cosh(h3) + math.cosh(h1) * math.cosh(h2)) / (math.sinh(h1) * math.sinh(h2))
    return math.acosh(c)


def seam_lengths(p: PantsMetric) -> Tuple[float, float, float]:
    """(d12, d23, d13)."""
    return (
        seam_length(p),
        seam_length(PantsMetric(p.L2, p.L3, p.L1)),
        seam_length(PantsMetric(p.L1, p.L3, p.L2)),
    )


def boundary_from_seams(L1: float, L2: float, d12: float) -> float:
    """Invert the seam formula for L3 (right-angled hexagon cosine rule)."""
    h1, h2 = L1 / 2, L2 / 2
    c = math.cosh(d12) * math.sinh(h1) * math.sinh(h2) - math.cosh(h1) * math.cosh(h2)
    return 2.0 * math.acosh(c)


@dataclass(frozen=True)
class FNTorus:
    length: float
    twist: float
    boundary: float

    def __post_init__(self):
        if self.length <= 0 or self.boundary <= 0:
            raise ValueError("lengths must be positive")

    @property
    def perpendicular(self) -> float:
        s = math.sinh(self.length / 2)
        return math.acosh((math.cosh(self.boundary / 2) + math.cosh(self.length / 2) ** 2) / (s * s))

    def holonomy(self) -> Tuple[Mat, Mat]:
        l, t, d = self.length / 2, self.twist / 2, self.perpendicular / 2
        X = (math.exp(l), 0.0, 0.0, math.exp(-l))
        T = (math.exp(t), 0.0, 0.0, math.exp(-t))
        H = (math.cosh(d), math.sinh(d), math.sinh(d), math.cosh(d))
        return X, _mul(T, H)

    def traces(self) -> Tuple[float, float, float]:
        """(tr X, tr Y, tr XY) in closed form."""
        ch = math.cosh(self.perpendicular / 2)
        return (
            2 * math.cosh(self.length / 2),
            2 * ch * math.cosh(self.twist / 2),
            2 * ch * math.cosh((self.length + self.twist) / 2),
        )

    def commutator_trace(self) -> float:
        X, Y = self.holonomy()
        return _tr(_mul(_mul(X, Y), _mul(_inv(X), _inv(Y))))

    def dehn_twist(self) -> "FNTorus":
        return FNTorus(self.length, self.twist + self.length, self.boundary)


Curve = Tuple[int, int, float]


def torus_spectrum(t: FNTorus, cutoff: float) -> List[Curve]:
    """Unoriented simple closed geodesics of length <= cutoff as (p, q, length).

    Curves are generated by Farey mediants: a neighbouring pair (u, v) with
    traces (tu, tv, tuv) produces uv, then the pairs (u, uv) and (uv, v).
    Once a new trace is above the bound and above both parents every
    descendant is too, so the subtree is cut.
    """
    if cutoff <= 0:
        return []
    x, y, z = t.traces()
    bound = 2 * math.cosh(cutoff / 2)
    out: List[Curve] = []
    for p, q, tr in ((0, 1, x), (1, 0, y)):
        if abs(tr) <= bound:
            out.append((p, q, length_from_trace(tr)))
    # positive slopes from (X, Y), negative ones from (X, Y^-1)
    stack = [((0, 1), (1, 0), x, y, z), ((0, 1), (-1, 0), x, y, x * y - z)]
    while stack:
        su, sv, tu, tv, tuv = stack.pop()
        if abs(tuv) > bound and abs(tuv) >= max(abs(tu), abs(tv)):
            continue
        sw = (su[0] + sv[0], su[1] + sv[1])
        if abs(tuv) <= bound:
            out.append(_normal_slope(sw, length_from_trace(tuv)))
        stack.append((su, sw, tu, tuv, tu * tuv - tv))
        stack.append((sw, sv, tuv, tv, tuv * tv - tu))
    out.sort(key=lambda c: (c[2], c[0], c[1]))
    return out


def _normal_slope(s: Tuple[int, int], length: float) -> Curve:
    p, q = s
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    return (p, q, length)


def christoffel_word(p: int, q: int) -> List[Tuple[str, int]]:
    """Word in X^{+-1}, Y^{+-1} for the simple curve of slope p/q (q >= 0)."""
    ap = abs(p)
    ysign = 1 if p >= 0 else -1
    n = ap + q
    word = []
    for i in range(1, n + 1):
        if (i * ap) // n - ((i - 1) * ap) // n:
            word.append(("Y", ysign))
        else:
            word.append(("X", 1))
    return word


def christoffel_spectrum(t: FNTorus, cutoff: float, max_word: int) -> List[Curve]:
    """Oracle: direct matrix products of Christoffel words up to a word length."""
    X, Y = t.holonomy()
    mats = {("X", 1): X, ("X", -1): _inv(X), ("Y", 1): Y, ("Y", -1): _inv(Y)}
    out = []
    for q in range(0, max_word + 1):
        for p in range(-max_word, max_word + 1):
            if abs(p) + q > max_word or abs(p) + q == 0 or math.gcd(p, q) != 1:
                continue
            if q == 0 and p < 0:
                continue
            M = (1.0, 0.0, 0.0, 1.0)
            for letter in christoffel_word(p, q):
                M = _mul(M, mats[letter])
            ell = length_from_trace(_tr(M))
            if ell <= cutoff:
                out.append((p, q, ell))
    out.sort(key=lambda c: (c[2], c[0], c[1]))
    return out


def _kernel_C(kernel: str) -> Callable[[float, float, float], float]:
    from .kernels import Kontsevich, Mirzakhani, eval_C

    fam = {"mirzakhani": Mirzakhani(), "kontsevich": Kontsevich()}[kernel]
    return lambda L, a, b: eval_C(fam, L, a, b)


def mcshane_partial_sums(t: FNTorus, cutoff: float, kernel: str = "mirzakhani") -> List[Tuple[int, int, float, float]]:
    """Rows (p, q, length, partial sum) in increasing length."""
    C = _kernel_C(kernel)
    rows = []
    s = 0.0
    for p, q, ell in torus_spectrum(t, cutoff):
        s += C(t.boundary, ell, ell)
        rows.append((p, q, ell, s))
    return rows


def mcshane_sum(t: FNTorus, cutoff: float, kernel: str = "mirzakhani") -> float:
    """Sum of C(L, l, l) over simple closed curves of length <= cutoff."""
    C = _kernel_C(kernel)
    return math.fsum(C(t.boundary, ell, ell) for _, _, ell in torus_spectrum(t, cutoff))


def count_curves(t: FNTorus, cutoffs: Sequence[float]) -> List[int]:
    spec = torus_spectrum(t, max(cutoffs))
    lengths = [c[2] for c in spec]
    return [sum(1 for x in lengths if x <= L) for L in cutoffs]


def fit_growth(cutoffs: Sequence[float], counts: Sequence[int]) -> dict:
    """Least-squares log-log slope and the smallest N with count <= N L^2."""
    import numpy as np

    xs = np.log(np.asarray(cutoffs, dtype=float))
    ys = np.log(np.asarray(counts, dtype=float))
    slope = float(np.polyfit(xs, ys, 1)[0])
    N = max(c / L ** 2 for L, c in zip(cutoffs, counts))
    return {"slope": slope, "N": N}


def corrected_seam_bound(eps: float) -> float:
    """A seam bound valid for L1, L2 >= eps and L3 <= L1 + L2."""
    return 2 * math.log(4 / (1 - math.exp(-eps)))


def count_small_pants_bound_check(
    samples: Iterable[Tuple[float, float, float]], eps: float, bound: Optional[float] = None
) -> dict:
    """Check d12 <= 2 ln(4/eps) on small pants with all lengths >= eps.

    Samples failing the precondition are skipped and counted.
    """
    if bound is None:
        bound = 2 * math.log(4 / eps)
    checked = skipped = 0
    violations = []
    worst = 0.0
    for L1, L2, L3 in samples:
        if min(L1, L2, L3) < eps or L3 > L1 + L2:
            skipped += 1
            continue
        checked += 1
        d = seam_length(PantsMetric(L1, L2, L3))
        worst = max(worst, d)
        if d > bound:
            violations.append({"L": [L1, L2, L3], "d12": d})
    return {"eps": eps, "bound": bound, "checked": checked, "skipped": skipped, "max_d12": worst, "violations": violations}


def pants_grid(eps: float, top: float = 6.0, steps: int = 13) -> List[Tuple[float, float, float]]:
    vals = [eps + (top - eps) * i / (steps - 1) for i in range(steps)]
    out = []
    for L1 in vals:
        for L2 in vals:
            s = L1 + L2
            for k in range(steps):
                out.append((L1, L2, eps + (s - eps) * k / (steps - 1)))
    return out
