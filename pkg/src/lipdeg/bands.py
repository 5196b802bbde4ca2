"""Dyadic band calculus for differential forms on periodic grids.

A ``GridForm`` stores one real scalar field per multi-index component of a
degree-p form on the flat torus ``(R/T Z)^d``, sampled on an ``N^d`` grid
(N a power of two).  All calculus is spectral:

* frequencies are integer lattice vectors ``m``; the physical frequency is
  ``xi = m / T`` and plane waves are ``exp(2 pi i <m, x> / T)``;
* the exterior derivative multiplies by ``(2 pi i / T) m ^ .``;
* dyadic bands are cut by a radial partition of unity built from the
  ``exp(-1/t)`` mollifier: the low-pass profile ``chi(|xi| / 2^k)`` equals
  1 inside radius ``2^k``, 0 outside ``2^{k+1}``, and band multipliers are
  consecutive differences, so they sum to exactly 1 and band k is
  supported in the annulus ``2^{k-1} <= |xi| <= 2^{k+1}``;
* the zero mode belongs to the lowest band;
* a closed, mean-free form has the explicit primitive obtained by
  contracting with the frequency vector and dividing by
  ``2 pi i |xi|^2``, frequency by frequency; on band k this shrinks
  norms by ``~ 2^{-k}``.

Norms are Riemann sums: ``L1 = sum_I integral |a_I|``,
``L2 = sqrt(sum_I integral a_I^2)``, ``Linf = max |a_I|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Mapping, Optional

import numpy as np

from .errors import (
    BandRangeError,
    DimensionMismatch,
    MeanObstruction,
    NotClosed,
    ParameterError,
    ResolutionError,
    ShapeError,
)
from .exterior import multi_indices, wedge_table

__all__ = [
    "GridForm",
    "SpectralForm",
    "DyadicPartition",
    "BandProfile",
    "grid_form",
    "zero_form",
    "grid_axes",
    "forward_transform",
    "inverse_transform",
    "build_partition",
    "project_band",
    "project_upto",
    "band_decompose",
    "exterior_derivative",
    "primitive",
    "lp_norm",
    "band_profile",
    "kernel_l1_diagnostics",
    "synthetic_profile",
    "wedge_grid",
    "spectral_support",
    "product_support_radius",
    "bandlimited_noise_form",
]


def _check_resolution(N: int) -> None:
    if N < 4 or (N & (N - 1)) != 0:
        raise ResolutionError(f"resolution must be a power of two >= 4, got {N}")


@dataclass(frozen=True)
class GridForm:
    """Degree-p form on the N^d periodic grid with period T per axis."""

    spatial_dim: int
    form_degree: int
    resolution: int
    period: float
    data: np.ndarray  # shape (comb(d, p), N, .., N), float64

    def __post_init__(self):
        d, p, N = self.spatial_dim, self.form_degree, self.resolution
        if d < 1:
            raise DimensionMismatch("spatial dimension must be >= 1")
        if not 0 <= p <= d:
            raise ShapeError(f"form degree {p} outside 0..{d}")
        _check_resolution(N)
        if self.period <= 0:
            raise ParameterError("period must be positive")
        want = (comb(d, p),) + (N,) * d
        if self.data.shape != want:
            raise ShapeError(f"data shape {self.data.shape}, want {want}")
        if self.data.dtype != np.float64:
            object.__setattr__(self, "data", self.data.astype(np.float64))

    @property
    def indices(self) -> list:
        return multi_indices(self.spatial_dim, self.form_degree)

    def component(self, I) -> np.ndarray:
        return self.data[self.indices.index(tuple(I))]

    def same_grid(self, other: "GridForm") -> bool:
        return (
            self.spatial_dim == other.spatial_dim
            and self.resolution == other.resolution
            and abs(self.period - other.period) < 1e-12
        )

    def copy_with(self, data: np.ndarray, degree: Optional[int] = None) -> "GridForm":
        return GridForm(
            self.spatial_dim,
            self.form_degree if degree is None else degree,
            self.resolution,
            self.period,
            data,
        )

    def __add__(self, other: "GridForm") -> "GridForm":
        if not self.same_grid(other) or self.form_degree != other.form_degree:
            raise DimensionMismatch("grid forms live on different grids/degrees")
        return self.copy_with(self.data + other.data)

    def __sub__(self, other: "GridForm") -> "GridForm":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "GridForm":
        return self.copy_with(self.data * float(c))


@dataclass(frozen=True)
class SpectralForm:
    """Full complex spectrum of a GridForm (numpy fftn layout)."""

    spatial_dim: int
    form_degree: int
    resolution: int
    period: float
    data: np.ndarray  # complex128, same shape as GridForm.data

    @property
    def indices(self) -> list:
        return multi_indices(self.spatial_dim, self.form_degree)


def zero_form(d: int, p: int, N: int, T: float = 1.0) -> GridForm:
    return GridForm(d, p, N, T, np.zeros((comb(d, p),) + (N,) * d))


def grid_axes(d: int, N: int, T: float = 1.0) -> list:
    """Node coordinates per axis (shape-(N,) arrays, broadcastable)."""
    x = np.arange(N) * (T / N)
    return [x.reshape((1,) * i + (N,) + (1,) * (d - 1 - i)) for i in range(d)]


def grid_form(
    d: int, p: int, N: int, T: float = 1.0, components: Optional[Mapping] = None
) -> GridForm:
    """Assemble a form from {multi-index: ndarray or callable(axes)}."""
    out = zero_form(d, p, N, T)
    if components:
        idx = out.indices
        axes = grid_axes(d, N, T)
        for I, f in components.items():
            vals = f(*axes) if callable(f) else f
            out.data[idx.index(tuple(I))] = np.broadcast_to(vals, (N,) * d)
    return out


# -- transforms --------------------------------------------------------------


def forward_transform(a: GridForm) -> SpectralForm:
    spec = np.fft.fftn(a.data, axes=tuple(range(1, a.spatial_dim + 1)))
    return SpectralForm(a.spatial_dim, a.form_degree, a.resolution, a.period, spec)


def inverse_transform(s: SpectralForm, tol: float = 1e-9) -> GridForm:
    vals = np.fft.ifftn(s.data, axes=tuple(range(1, s.spatial_dim + 1)))
    scale = float(np.max(np.abs(vals))) or 1.0
    worst = float(np.max(np.abs(vals.imag)))
    if worst > tol * scale:
        raise ShapeError(
            f"spectrum breaks conjugate symmetry: imaginary part {worst:.3e}"
        )
    return GridForm(
        s.spatial_dim, s.form_degree, s.resolution, s.period, np.ascontiguousarray(vals.real)
    )


@lru_cache(maxsize=3)
def _freq_radius(d: int, N: int, T: float, half: bool) -> np.ndarray:
    """|xi| on the (half-)lattice; xi = m / T."""
    full = np.fft.fftfreq(N) * N
    axes = []
    for i in range(d):
        m = full if not (half and i == d - 1) else np.arange(N // 2 + 1)
        shape = [1] * d
        shape[i] = len(m)
        axes.append((m / T).reshape(shape) ** 2)
    r2 = axes[0]
    for a in axes[1:]:
        r2 = r2 + a
    return np.sqrt(r2)


@lru_cache(maxsize=64)
def _freq_axis(d: int, N: int, T: float, axis: int, half: bool) -> np.ndarray:
    full = np.fft.fftfreq(N) * N
    m = full if not (half and axis == d - 1) else np.arange(N // 2 + 1)
    shape = [1] * d
    shape[axis] = len(m)
    return (m / T).reshape(shape)


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step from exp(-1/t): 0 at t<=0 rising to 1 at t>=1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


def _chi(r: np.ndarray) -> np.ndarray:
    """Radial low-pass profile: 1 on r<=1, 0 on r>=2, smooth between."""
    out = np.ones_like(r)
    trans = (r > 1.0) & (r < 2.0)
    out[r >= 2.0] = 0.0
    if np.any(trans):
        out[trans] = _smooth_step(2.0 - r[trans])
    return out


@dataclass(frozen=True)
class DyadicPartition:
    """Dyadic radial partition of unity on the frequency lattice."""

    spatial_dim: int
    resolution: int
    period: float
    k_min: int
    k_max: int

    @property
    def bands(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def _radius(self, half: bool) -> np.ndarray:
        return _freq_radius(self.spatial_dim, self.resolution, self.period, half)

    def lowpass_multiplier(self, k: int, half: bool = False) -> np.ndarray:
        """chi(|xi| / 2^k); exactly 1 once k >= k_max."""
        if k < self.k_min - 1 or k > self.k_max:
            raise BandRangeError(f"cutoff {k} outside bands {self.k_min}..{self.k_max}")
        return _chi(self._radius(half) / float(2.0**k))

    def band_multiplier(self, k: int, half: bool = False) -> np.ndarray:
        """Band window; the lowest band absorbs everything below (zero mode)."""
        if k not in self.bands:
            raise BandRangeError(f"band {k} outside {self.k_min}..{self.k_max}")
        if k == self.k_min:
            return self.lowpass_multiplier(k, half)
        return self.lowpass_multiplier(k, half) - self.lowpass_multiplier(k - 1, half)

    def band_of_radius(self, r: float) -> int:
        """Index of the band whose plateau contains radius r."""
        if r <= 0:
            return self.k_min
        k = int(np.ceil(np.log2(r)))
        return min(max(k, self.k_min), self.k_max)


def build_partition(d: int, N: int, T: float = 1.0) -> DyadicPartition:
    """Partition covering the whole lattice: lowest nonzero |xi| up to Nyquist."""
    _check_resolution(N)
    if T <= 0:
        raise ParameterError("period must be positive")
    k_min = int(np.floor(np.log2(1.0 / T)))
    r_max = np.sqrt(d) * (N / 2) / T
    k_max = int(np.ceil(np.log2(r_max)))
    return DyadicPartition(d, N, T, k_min, k_max)


def _apply_multiplier(a: GridForm, mult_half: np.ndarray) -> GridForm:
    """Multiply every component's half-spectrum by a real radial multiplier."""
    N, d = a.resolution, a.spatial_dim
    axes = tuple(range(d))
    out = np.empty_like(a.data)
    for c in range(a.data.shape[0]):
        spec = np.fft.rfftn(a.data[c], axes=axes)
        spec *= mult_half
        out[c] = np.fft.irfftn(spec, s=(N,) * d, axes=axes)
    return a.copy_with(out)


def project_band(a: GridForm, k: int, part: Optional[DyadicPartition] = None) -> GridForm:
    part = part or build_partition(a.spatial_dim, a.resolution, a.period)
    return _apply_multiplier(a, part.band_multiplier(k, half=True))


def project_upto(a: GridForm, k: int, part: Optional[DyadicPartition] = None) -> GridForm:
    part = part or build_partition(a.spatial_dim, a.resolution, a.period)
    return _apply_multiplier(a, part.lowpass_multiplier(k, half=True))


def band_decompose(a: GridForm, part: Optional[DyadicPartition] = None) -> dict:
    """All band projections in one spectral pass: {k: P_k a}."""
    part = part or build_partition(a.spatial_dim, a.resolution, a.period)
    N, d = a.resolution, a.spatial_dim
    axes = tuple(range(d))
    specs = [np.fft.rfftn(a.data[c], axes=axes) for c in range(a.data.shape[0])]
    out = {}
    for k in part.bands:
        mult = part.band_multiplier(k, half=True)
        comp = np.empty_like(a.data)
        for c, spec in enumerate(specs):
            comp[c] = np.fft.irfftn(spec * mult, s=(N,) * d, axes=axes)
        out[k] = a.copy_with(comp)
    return out


# -- exterior derivative and primitive ---------------------------------------


def _insert_sign(j: int, I: tuple) -> int:
    """Sign of dx_j ^ dx_I -> dx_{sorted(I + {j})}."""
    return -1 if sum(1 for i in I if i < j) % 2 else 1


def exterior_derivative(a: GridForm) -> GridForm:
    """Spectral d; a top-degree input returns the zero form of its own degree."""
    d, p, N, T = a.spatial_dim, a.form_degree, a.resolution, a.period
    if p == d:
        return zero_form(d, d, N, T)
    axes = tuple(range(d))
    in_idx = a.indices
    out_idx = multi_indices(d, p + 1)
    pos = {I: i for i, I in enumerate(out_idx)}
    out_spec = [None] * len(out_idx)
    for ci, I in enumerate(in_idx):
        spec = np.fft.rfftn(a.data[ci], axes=axes)
        for j in range(1, d + 1):
            if j in I:
                continue
            K = tuple(sorted(I + (j,)))
            term = spec * (
                2j * np.pi * _insert_sign(j, I) * _freq_axis(d, N, T, j - 1, True)
            )
            tgt = pos[K]
            if out_spec[tgt] is None:
                out_spec[tgt] = term
            else:
                out_spec[tgt] += term
    data = np.empty((len(out_idx),) + (N,) * d)
    for i, spec in enumerate(out_spec):
        data[i] = 0.0 if spec is None else np.fft.irfftn(spec, s=(N,) * d, axes=axes)
    return GridForm(d, p + 1, N, T, data)


def _closedness_residual(a: GridForm, specs: list) -> float:
    """Relative spectral l2 of d(a), scale- and resolution-invariant."""
    d, p, N, T = a.spatial_dim, a.form_degree, a.resolution, a.period
    if p == d:
        return 0.0
    out_idx = multi_indices(d, p + 1)
    pos = {I: i for i, I in enumerate(out_idx)}
    acc = [None] * len(out_idx)
    for ci, I in enumerate(a.indices):
        for j in range(1, d + 1):
            if j in I:
                continue
            K = tuple(sorted(I + (j,)))
            term = specs[ci] * (_insert_sign(j, I) * _freq_axis(d, N, T, j - 1, True))
            if acc[pos[K]] is None:
                acc[pos[K]] = term.copy()
            else:
                acc[pos[K]] += term
    num = sum(float(np.sum(np.abs(t) ** 2)) for t in acc if t is not None)
    r = _freq_radius(d, N, T, True)
    den = sum(float(np.sum((np.abs(s) * r) ** 2)) for s in specs)
    return np.sqrt(num / den) if den > 0 else 0.0


def primitive(
    a: GridForm,
    band: Optional[int] = None,
    part: Optional[DyadicPartition] = None,
    tol: float = 1e-8,
) -> GridForm:
    """Primitive b with d(b) = a for a closed, mean-free form.

    Acts frequency-wise: contract with the frequency vector and divide by
    ``2 pi i |xi|^2 / T``; exact on closed spectra, and on band k the
    output is smaller by ``~ 2^{-k}``.  Raises MeanObstruction when a
    component carries a zero mode, NotClosed when d(a) is not ~0, and
    BandRangeError when ``band`` is given but spectral mass leaks outside
    that band's annulus.
    """
    d, p, N, T = a.spatial_dim, a.form_degree, a.resolution, a.period
    if p == 0:
        raise ShapeError("a 0-form has no primitive")
    axes = tuple(range(d))
    specs = [np.fft.rfftn(a.data[c], axes=axes) for c in range(a.data.shape[0])]
    total = np.sqrt(sum(float(np.sum(np.abs(s) ** 2)) for s in specs))
    if total == 0.0:
        return zero_form(d, p - 1, N, T)
    zero_mode = max(abs(s[(0,) * d]) for s in specs)
    if zero_mode > tol * total:
        raise MeanObstruction(
            f"nonzero zero mode {zero_mode:.3e} (relative {zero_mode / total:.3e})"
        )
    resid = _closedness_residual(a, specs)
    if resid > tol:
        raise NotClosed(f"input is not closed: relative residual {resid:.3e}")
    r = _freq_radius(d, N, T, True)
    if band is not None:
        inside = (r >= 2.0 ** (band - 1)) & (r <= 2.0 ** (band + 1))
        leak = np.sqrt(
            sum(float(np.sum(np.abs(np.where(inside, 0, s)) ** 2)) for s in specs)
        )
        if leak > tol * total:
            raise BandRangeError(
                f"spectral mass outside band {band}: relative {leak / total:.3e}"
            )
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(r > 0, 1.0 / np.maximum(r, 1e-300) ** 2, 0.0) / (2.0 * np.pi)
    out_idx = multi_indices(d, p - 1)
    pos = {I: i for i, I in enumerate(out_idx)}
    out_spec = [None] * len(out_idx)
    for ci, I in enumerate(a.indices):
        for q, i_ax in enumerate(I):
            J = I[:q] + I[q + 1 :]
            sgn = (-1) ** q  # (-1)^{q-1} with q zero-based
            # contract with the frequency vector, divide by 2*pi*i*|xi|^2
            term = specs[ci] * (
                sgn * _freq_axis(d, N, T, i_ax - 1, True) * inv * (-1j)
            )
            tgt = pos[J]
            if out_spec[tgt] is None:
                out_spec[tgt] = term
            else:
                out_spec[tgt] += term
    data = np.empty((len(out_idx),) + (N,) * d)
    for i, spec in enumerate(out_spec):
        data[i] = 0.0 if spec is None else np.fft.irfftn(spec, s=(N,) * d, axes=axes)
    return GridForm(d, p - 1, N, T, data)


# -- norms and profiles -------------------------------------------------------


def lp_norm(a: GridForm, which) -> float:
    """Riemann-sum norms: which in {1, 2, "inf"}."""
    cell = (a.period / a.resolution) ** a.spatial_dim
    if which == 1 or which == "1" or which == "l1":
        return float(sum(np.abs(c).sum() * cell for c in a.data))
    if which == 2 or which == "2" or which == "l2":
        return float(np.sqrt(sum((c**2).sum() * cell for c in a.data)))
    if which in ("inf", "linf", np.inf):
        return float(np.max(np.abs(a.data))) if a.data.size else 0.0
    raise ParameterError(f"unsupported norm {which!r}")


@dataclass(frozen=True)
class BandProfile:
    """Per-band L1/L2/Linf norms plus per-component detail."""

    bands: tuple  # sorted band indices
    l1: Mapping  # k -> float
    l2: Mapping
    linf: Mapping
    per_component: Mapping  # (k, multi-index) -> (l1, l2, linf)
    total_l2: float

    def orthogonality_ratio(self) -> float:
        s = sum(v**2 for v in self.l2.values())
        return s / self.total_l2**2 if self.total_l2 else 0.0

    def mass(self, k: int, which: str = "l1") -> float:
        return getattr(self, which).get(k, 0.0)


def band_profile(a: GridForm, part: Optional[DyadicPartition] = None) -> BandProfile:
    part = part or build_partition(a.spatial_dim, a.resolution, a.period)
    N, d = a.resolution, a.spatial_dim
    axes = tuple(range(d))
    cell = (a.period / N) ** d
    idx = a.indices
    specs = [np.fft.rfftn(a.data[c], axes=axes) for c in range(a.data.shape[0])]
    l1, l2, linf, per = {}, {}, {}, {}
    for k in part.bands:
        mult = part.band_multiplier(k, half=True)
        s1 = s2 = si = 0.0
        for c, spec in enumerate(specs):
            fld = np.fft.irfftn(spec * mult, s=(N,) * d, axes=axes)
            c1 = float(np.abs(fld).sum() * cell)
            c2 = float(np.sqrt((fld**2).sum() * cell))
            ci = float(np.max(np.abs(fld)))
            per[(k, idx[c])] = (c1, c2, ci)
            s1 += c1
            s2 += c2**2
            si = max(si, ci)
        l1[k], l2[k], linf[k] = s1, float(np.sqrt(s2)), si
    return BandProfile(
        bands=tuple(part.bands),
        l1=l1,
        l2=l2,
        linf=linf,
        per_component=per,
        total_l2=lp_norm(a, 2),
    )


def synthetic_profile(masses: Mapping, total_l2: float) -> BandProfile:
    """Profile from prescribed per-band L1 masses (analysis-only pipelines)."""
    bands = tuple(sorted(masses))
    return BandProfile(
        bands=bands,
        l1=dict(masses),
        l2={k: float(m) for k, m in masses.items()},
        linf={},
        per_component={},
        total_l2=float(total_l2),
    )


def kernel_l1_diagnostics(part: DyadicPartition) -> dict:
    """Discrete kernel sums per band.

    For each band: ``l1`` is the absolute sum of the convolution kernel
    (the operator norm of P_k on every L^p), ``dl1`` the absolute sum of
    its gradient kernel, and ``dl1_scaled`` = dl1 / (2 pi 2^k / T); both
    reported ratios stay bounded uniformly across interior bands.
    """
    d, N, T = part.spatial_dim, part.resolution, part.period
    axes = tuple(range(d))
    out = {}
    for k in part.bands:
        mult = part.band_multiplier(k, half=False)
        ker = np.fft.ifftn(mult, axes=axes).real
        l1 = float(np.abs(ker).sum())
        g2 = np.zeros_like(ker)
        for ax in range(d):
            gk = np.fft.ifftn(
                mult * (2j * np.pi * _freq_axis(d, N, T, ax, False)), axes=axes
            )
            g2 += gk.real**2 + gk.imag**2
        dl1 = float(np.sqrt(g2).sum())
        out[k] = {
            "l1": l1,
            "dl1": dl1,
            "dl1_scaled": dl1 / (2.0 * np.pi * 2.0**k / T),
        }
    return out


# -- pointwise wedge and spectral supports ------------------------------------


def wedge_grid(a: GridForm, b: GridForm) -> GridForm:
    """Pointwise wedge product of grid forms (Koszul signs included)."""
    if not a.same_grid(b):
        raise DimensionMismatch("grid forms live on different grids")
    d, N, T = a.spatial_dim, a.resolution, a.period
    p, q = a.form_degree, b.form_degree
    if p + q > d:
        raise ShapeError(f"wedge degree {p} + {q} exceeds dimension {d}")
    target, sign = wedge_table(d, p, q)
    out = np.zeros((comb(d, p + q),) + (N,) * d)
    for i in range(target.shape[0]):
        for j in range(target.shape[1]):
            t = target[i, j]
            if t >= 0:
                out[t] += sign[i, j] * a.data[i] * b.data[j]
    return GridForm(d, p + q, N, T, out)


def spectral_support(a: GridForm, thresh: float = 1e-12) -> np.ndarray:
    """Integer lattice points where some component's spectrum exceeds
    thresh * (largest spectral magnitude); shape (m, d)."""
    d, N = a.spatial_dim, a.resolution
    axes = tuple(range(1, d + 1))
    spec = np.fft.fftn(a.data, axes=axes)
    mag = np.max(np.abs(spec), axis=0)
    top = float(mag.max())
    if top == 0.0:
        return np.zeros((0, d), dtype=np.int64)
    mask = mag > thresh * top
    coords = np.argwhere(mask)
    freqs = (np.fft.fftfreq(N) * N).astype(np.int64)
    return freqs[coords]


def product_support_radius(a: GridForm, b: GridForm, thresh: float = 1e-12) -> float:
    """Largest |m1 + m2| over the two spectral supports (exact set sum).

    This is the support statement behind low-pass products: inputs
    supported in balls of radius r_a, r_b give a product supported in the
    ball of radius r_a + r_b.  Raises BandRangeError if that sum reaches
    the Nyquist shell (the cyclic sum would alias).
    """
    if not a.same_grid(b):
        raise DimensionMismatch("grid forms live on different grids")
    sa = spectral_support(a, thresh)
    sb = spectral_support(b, thresh)
    if sa.size == 0 or sb.size == 0:
        return 0.0
    ra = float(np.max(np.linalg.norm(sa, axis=1)))
    rb = float(np.max(np.linalg.norm(sb, axis=1)))
    if ra + rb >= a.resolution / 2:
        raise BandRangeError(
            f"support radii {ra:.1f} + {rb:.1f} reach Nyquist {a.resolution // 2}"
        )
    best = 0.0
    chunk = max(1, 10**7 // max(len(sb), 1))
    for lo in range(0, len(sa), chunk):
        sums = sa[lo : lo + chunk, None, :] + sb[None, :, :]
        best = max(best, float(np.sqrt((sums.astype(float) ** 2).sum(axis=2)).max()))
    return best


def bandlimited_noise_form(
    d: int,
    p: int,
    N: int,
    T: float = 1.0,
    radius: float = 8.0,
    seed: int = 0,
) -> GridForm:
    """Random real form with spectrum confined to |xi| <= radius."""
    rng = np.random.default_rng(seed)
    a = GridForm(d, p, N, T, rng.standard_normal((comb(d, p),) + (N,) * d))
    r = _freq_radius(d, N, T, True)
    mask = (r <= radius).astype(float)
    return _apply_multiplier(a, mask)
