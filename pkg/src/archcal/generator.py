"""Archimedean generators, their non-parametric estimation and the copula diagonal.

Three representations share one small interface (``phi``, ``psi``,
``scaled``):

* :class:`ParametricGumbel` -- ``phi(t) = (-log t)**theta``.
* :class:`RadialAtoms` -- Williamson hinge sum
  ``psi(x) = sum_j q_j * (1 - x / r_j)_+ ** (d - 1)``, d-monotone by
  construction.  This is what the Kendall-df inversion produces.
* :class:`PiecewisePhi` -- linear interpolation of ``phi`` between knots;
  the pairwise-averaged estimator returns this form.

Generators are only defined up to a positive factor on ``phi``; the copula
and its diagonal do not depend on that factor.
"""

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .kendall import KendallDF, empirical_kendall_df, pseudo_observations
from .rng import Stream

ROOT_TOL = 1e-12
ROOT_MAXITER = 200
PAIR_ANCHOR = 0.5

_CHUNK = 1 << 20


@dataclass(frozen=True)
class ParametricGumbel:
    theta: float

    def __post_init__(self):
        if not self.theta >= 1.0:
            raise ValueError(f"theta must be >= 1, got {self.theta}")

    def psi(self, x):
        return np.exp(-np.asarray(x, dtype=float) ** (1.0 / self.theta))

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return (-np.log(t)) ** self.theta

    def to_dict(self):
        return {"repr": "gumbel", "theta": self.theta}


@dataclass(frozen=True)
class RadialAtoms:
    """Hinge-sum generator of a discrete radial distribution.

    ``atoms`` are strictly descending and non-negative, ``masses`` positive
    and summing to one.  An atom at zero only contributes at ``x = 0``, so it
    produces a jump of ``psi`` at the origin.  ``folded`` counts Kendall-df
    atoms that were merged into that zero atom during fitting.
    """

    d: int
    atoms: np.ndarray
    masses: np.ndarray
    folded: int = 0
    _knots: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if int(self.d) < 2:
            raise ValueError("d must be >= 2")
        if atoms.ndim != 1 or atoms.shape != masses.shape or atoms.size == 0:
            raise ValueError("atoms and masses must be equal-length 1-d arrays")
        if np.any(np.diff(atoms) >= 0) or atoms[-1] < 0 or atoms[0] <= 0:
            raise ValueError("atoms must be strictly descending, non-negative, with a positive first atom")
        if np.any(masses <= 0) or abs(masses.sum() - 1.0) > 1e-9:
            raise ValueError("masses must be positive and sum to one")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)
        pos = atoms > 0
        r, q = atoms[pos], masses[pos]
        # psi at each positive atom: the knots of phi
        levels = self._hinge(r, r, q)
        mass_pos = 1.0 if pos.all() else float(min(q.sum(), 1.0))
        object.__setattr__(self, "_knots", (r, q, levels, mass_pos))

    def _hinge(self, x, r, q):
        out = np.empty(x.shape)
        rows = max(1, _CHUNK // max(r.size, 1))
        for s in range(0, x.size, rows):
            h = np.clip(1.0 - x[s:s + rows, None] / r[None, :], 0.0, None)
            # explicit sum keeps results independent of BLAS threading
            out[s:s + rows] = (h ** (self.d - 1) * q).sum(axis=1)
        return out

    def psi(self, x):
        x = np.asarray(x, dtype=float)
        r, q, _, _ = self._knots
        flat = x.ravel()
        out = self._hinge(flat, r, q)
        out[flat == 0.0] = 1.0
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        r, q, levels, mass_pos = self._knots
        flat = np.clip(t.ravel(), 0.0, 1.0)
        out = np.zeros(flat.shape)
        # psi(0+) = mass_pos; phi vanishes on [mass_pos, 1]
        inner = flat < mass_pos
        tt = flat[inner]
        if self.d == 2:
            # psi is linear between atoms, so phi is too
            xs = np.append(r, 0.0)
            ts = np.append(levels, mass_pos)
            out[inner] = np.interp(tt, ts, xs)
        else:
            out[inner] = self._invert(tt, r, q, levels, mass_pos)
        return out.reshape(t.shape) if t.ndim else float(out[0])

    def _invert(self, tt, r, q, levels, mass_pos):
        # bracket each target between consecutive knots, then bisect
        j = np.searchsorted(levels, tt, side="left")
        hi = np.where(j > 0, r[np.maximum(j - 1, 0)], r[0])
        lo = np.where(j < r.size, r[np.minimum(j, r.size - 1)], 0.0)
        at_top = j == 0
        flo = np.where(j < r.size, levels[np.minimum(j, r.size - 1)], mass_pos)
        fhi = np.where(at_top, levels[0], levels[np.maximum(j - 1, 0)])
        # psi(lo) = flo >= tt >= fhi = psi(hi)
        for _ in range(ROOT_MAXITER):
            width = hi - lo
            if np.all(width <= ROOT_TOL):
                break
            mid = 0.5 * (lo + hi)
            fm = self._hinge(mid, r, q)
            go_right = fm > tt
            lo = np.where(go_right, mid, lo)
            flo = np.where(go_right, fm, flo)
            hi = np.where(go_right, hi, mid)
            fhi = np.where(go_right, fhi, fm)
        span = flo - fhi
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(span > 0, (flo - tt) / span, 0.0)
        x = lo + np.clip(frac, 0.0, 1.0) * (hi - lo)
        return np.where(at_top & (tt <= levels[0]), r[0], x)

    def scaled(self, c: float) -> "RadialAtoms":
        return RadialAtoms(self.d, self.atoms * c, self.masses, self.folded)

    def to_dict(self):
        return {
            "repr": "radial",
            "d": self.d,
            "atoms": self.atoms.tolist(),
            "masses": self.masses.tolist(),
            "folded": self.folded,
        }


@dataclass(frozen=True)
class PiecewisePhi:
    """``phi`` interpolated linearly between ``knots``.

    ``values`` are non-increasing with ``phi(1) = 0``.  Below the first knot
    ``phi`` is either held constant (``below="constant"``) or infinite.
    ``fit_failures`` / ``folded`` carry diagnostics from fitting.
    """

    knots: np.ndarray
    values: np.ndarray
    below: str = "constant"
    fit_failures: int = 0
    folded: int = 0

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size < 2:
            raise ValueError("knots and values must be equal-length 1-d arrays (>= 2 points)")
        if np.any(np.diff(knots) <= 0) or knots[0] < 0 or knots[-1] != 1.0:
            raise ValueError("knots must be strictly ascending in [0, 1] and end at 1")
        if np.any(np.diff(values) > 0) or values[-1] != 0.0 or values[0] <= 0:
            raise ValueError("values must be non-increasing, positive at the first knot and 0 at 1")
        if self.below not in ("constant", "infinite"):
            raise ValueError("below must be 'constant' or 'infinite'")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.knots, self.values)
        if self.below == "infinite":
            out = np.where(t < self.knots[0], np.inf, out)
        return out if out.ndim else float(out)

    def psi(self, x):
        x = np.asarray(x, dtype=float)
        v = self.values
        # phi is strictly decreasing up to its first zero
        z = int(np.argmax(v == 0.0))
        ks, vs = self.knots[: z + 1][::-1], v[: z + 1][::-1]
        out = np.interp(x, vs, ks)
        top = 0.0 if self.below == "constant" else self.knots[0]
        out = np.where(x >= v[0], top, out)
        out = np.where(x == 0.0, 1.0, out)
        return out if out.ndim else float(out)

    def scaled(self, c: float) -> "PiecewisePhi":
        return PiecewisePhi(self.knots, self.values * c, self.below, self.fit_failures, self.folded)

    def to_dict(self):
        return {
            "repr": "piecewise_phi",
            "knots": self.knots.tolist(),
            "values": self.values.tolist(),
            "below": self.below,
        }


def psi_eval(gen, x):
    """Pseudo-inverse ``psi(x)`` for ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("psi is only defined for x >= 0")
    out = np.where(x == 0.0, 1.0, gen.psi(x))
    return out if out.ndim else float(out)


def phi_eval(gen, t):
    """Generator ``phi(t)`` for ``t`` in [0, 1]; ``phi(1) = 0``."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(np.isnan(t)):
        raise ValueError("phi is only defined on [0, 1]")
    out = np.where(t == 1.0, 0.0, gen.phi(t))
    return out if out.ndim else float(out)


def copula_diagonal(gen, m: int, u):
    """``C(u, ..., u) = psi(m * phi(u))`` for an m-dimensional copula."""
    if m < 2:
        raise ValueError("m must be >= 2")
    u = np.asarray(u, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        out = gen.psi(m * phi_eval(gen, u))
    out = np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, out))
    return out if out.ndim else float(out)


def copula_diagonal_quantile(gen, m: int, v):
    """Quantile of the diagonal: ``psi(phi(v) / m)`` on (0, 1], 0 at v = 0."""
    if m < 2:
        raise ValueError("m must be >= 2")
    v = np.asarray(v, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        out = psi_eval(gen, phi_eval(gen, v) / m)
    out = np.where(v <= 0.0, 0.0, np.where(v >= 1.0, 1.0, out))
    return out if out.ndim else float(out)


def _bracketed_root(f, lo, hi):
    """Root of a decreasing function with f(lo) > 0 > f(hi), by bisection."""
    for _ in range(ROOT_MAXITER):
        if hi - lo <= ROOT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fit_radial_atoms(kdf: KendallDF, d: int) -> RadialAtoms:
    """d-monotone generator whose Kendall df is ``kdf``.

    One radial atom per Kendall atom, same masses; atom locations solve
    ``psi(r_j) = t_j`` recursively from ``r_1 = 1``.  When the remaining mass
    can no longer reach the next level, that atom and all later ones are
    merged into an atom at zero (counted in ``folded``).
    """
    t = kdf.atoms
    q = kdf.masses
    if t[0] != 0.0:
        raise ValueError("the Kendall df must have an atom at 0")
    keep = q > 0
    t, q = t[keep], q[keep]
    k = t.size
    r = np.zeros(k)
    r[0] = 1.0
    head = q[0]             # sum of masses of atoms already placed
    inv = q[0] / r[0]       # sum of q_i / r_i, used by the d = 2 closed form
    folded = 0
    for j in range(1, k):
        excess = head - t[j]
        if excess <= 0:
            folded = k - j
            break
        if d == 2:
            rj = excess / inv
        else:
            rr, qq = r[:j], q[:j]

            def f(rho, rr=rr, qq=qq, tj=t[j]):
                return float((qq * np.clip(1.0 - rho / rr, 0.0, None) ** (d - 1)).sum()) - tj

            rj = _bracketed_root(f, 0.0, r[j - 1])
        if not 0.0 < rj < r[j - 1]:
            folded = k - j
            break
        r[j] = rj
        head += q[j]
        inv += q[j] / rj
    if folded:
        placed = k - folded
        atoms = np.append(r[:placed], 0.0)
        masses = np.append(q[:placed], q[placed:].sum())
    else:
        atoms, masses = r, q
    return RadialAtoms(d, atoms, masses / masses.sum(), folded)


def fit_generator_gnz(sample, d: int | None = None) -> RadialAtoms:
    """Kendall-df inversion fit on all columns of ``sample`` (d defaults to m)."""
    sample = np.asarray(sample, dtype=float)
    d = sample.shape[1] if d is None else int(d)
    kdf = empirical_kendall_df(pseudo_observations(sample))
    return fit_radial_atoms(kdf, d)


def radial_to_piecewise(gen: RadialAtoms) -> PiecewisePhi:
    """Exact piecewise-linear form of a bivariate (d = 2) radial generator."""
    if gen.d != 2:
        raise ValueError("only d = 2 radial generators have a piecewise-linear phi")
    r, _, levels, mass_pos = gen._knots
    knots = np.append(levels, mass_pos)
    values = np.append(r, 0.0)
    if mass_pos < 1.0:
        knots = np.append(knots, 1.0)
        values = np.append(values, 0.0)
    return PiecewisePhi(knots, values, "constant", 0, gen.folded)


def _select_pairs(m, mode, M, seed):
    if mode == "all_pairs":
        return list(combinations(range(m), 2))
    if mode != "monte_carlo":
        raise ValueError(f"unknown pair mode {mode!r}")
    if M < 1:
        raise ValueError("M must be >= 1")
    stream = Stream(seed)
    first = stream.integers(m, M)
    second = stream.integers(m - 1, M)
    second = second + (second >= first)
    return [(int(a), int(b)) for a, b in zip(first, second)]


def fit_generator_pairwise(sample, mode: str = "all_pairs", M: int = 100, seed=0) -> PiecewisePhi:
    """Average of bivariate fits over column pairs.

    Every pairwise ``phi`` is rescaled to ``phi(0.5) = 1`` before the
    pointwise mean.  ``mode="monte_carlo"`` draws ``M`` ordered pairs of
    distinct columns with replacement; otherwise all pairs are used.
    """
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 2 or sample.shape[1] < 2:
        raise ValueError("need a 2-d sample with at least two columns")
    m = sample.shape[1]
    pairs = _select_pairs(m, mode, M, seed)
    weights = {}
    for a, b in pairs:
        key = (min(a, b), max(a, b))
        weights[key] = weights.get(key, 0) + 1

    fits, wts = [], []
    failures = folded = 0
    for (a, b), w in sorted(weights.items()):
        pw = radial_to_piecewise(fit_generator_gnz(sample[:, [a, b]], d=2))
        if pw.folded:
            failures += w
            folded += w * pw.folded
        anchor = pw.phi(PAIR_ANCHOR)
        if anchor <= 0:
            continue
        fits.append(pw.scaled(1.0 / anchor))
        wts.append(w)
    if not fits:
        raise ValueError("no usable pairwise fit: phi vanishes at the anchor for every pair")
    wts = np.asarray(wts, dtype=float) / sum(wts)
    knots = fits[0].knots
    for g in fits[1:]:
        knots = np.union1d(knots, g.knots)
    values = sum(w * np.interp(knots, g.knots, g.values) for w, g in zip(wts, fits))
    values[-1] = 0.0
    # pointwise mean of non-increasing functions; clear rounding noise
    values = np.minimum.accumulate(values)
    return PiecewisePhi(knots, values, "constant", failures, folded)


_FROM_DICT = {
    "gumbel": lambda d: ParametricGumbel(float(d["theta"])),
    "radial": lambda d: RadialAtoms(int(d["d"]), d["atoms"], d["masses"], int(d.get("folded", 0))),
    "piecewise_phi": lambda d: PiecewisePhi(d["knots"], d["values"], d.get("below", "constant")),
}


def generator_from_dict(doc: dict):
    try:
        return _FROM_DICT[doc["repr"]](doc)
    except KeyError as exc:
        raise ValueError(f"malformed generator document: missing {exc}") from None


def dumps(gen) -> str:
    return json.dumps(gen.to_dict())


def loads(text: str):
    return generator_from_dict(json.loads(text))
