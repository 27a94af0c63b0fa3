"""Wavelet scattering cascades over single-channel images.

Two variants share the same building block, a decimating 2D convolution with
separable kernels:

  classic   U1 = |x * psi_1|, U_n = |U_(n-1) * psi_n|, S_n = U_n * phi_n
  improved  A1 = |x * phi_1|, A_k = |A_(k-1) * phi_k|,
            U_m = |A_(m-1) * psi_m|, S_m = U_m * phi_1

with S0 = x * phi_1 in both.  The modulus is taken after every convolution
of the improved low-pass chain; scale kernels run at unit DC gain so a
constant image survives the chain unchanged.  Every convolution decimates by
config.decimate per axis (output length ceil(n/decimate), first output
sample aligned at input index 0); the smoothing convolution that produces
S maps decimates once more unless smooth_decimate is off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .filters import (
    BASES,
    SCALE,
    WAVELET_DIAGONAL,
    Kernel2D,
    make_filter_pair,
    make_kernel2d,
)

BOUNDARIES = ("symmetric", "periodic")
VARIANTS = ("classic", "improved")
SMOOTH_WITH = ("first", "last")


def validate_plane(plane) -> np.ndarray:
    """Coerce to a 2D float64 array and check the image-plane invariants."""
    a = np.asarray(plane, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DataError(f"image plane must be 2D and non-empty, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise DataError("image plane contains non-finite values")
    return a


def selection_names(depth: int) -> tuple[str, ...]:
    """All selectable plane names in declared order: S0, U1..Um, S1..Sm."""
    return ("S0", *[f"U{i}" for i in range(1, depth + 1)],
            *[f"S{i}" for i in range(1, depth + 1)])


@dataclass(frozen=True)
class ScatterConfig:
    """Cascade shape: depth, per-level bases, boundary, decimation, variant,
    and which output planes feed the feature vector."""

    depth: int = 3
    level_bases: tuple[str, ...] = ("bior1.1", "bior2.2", "bior1.3")
    boundary: str = "symmetric"
    decimate: int = 2
    variant: str = "improved"
    selection: tuple[str, ...] = ("U1", "U2", "U3")
    smooth_with: str = "first"
    smooth_decimate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "level_bases", tuple(self.level_bases))
        object.__setattr__(self, "selection", tuple(self.selection))
        if self.depth < 1:
            raise DataError(f"depth must be >= 1, got {self.depth}")
        if len(self.level_bases) != self.depth:
            raise DataError(
                f"need one basis per level: depth {self.depth}, got {len(self.level_bases)} bases")
        for b in self.level_bases:
            if b not in BASES:
                raise DataError(f"unknown wavelet basis {b!r}; supported: {', '.join(BASES)}")
        if self.boundary not in BOUNDARIES:
            raise DataError(f"unknown boundary mode {self.boundary!r}")
        if self.decimate < 1:
            raise DataError(f"decimate must be >= 1, got {self.decimate}")
        if self.variant not in VARIANTS:
            raise DataError(f"unknown variant {self.variant!r}")
        if self.smooth_with not in SMOOTH_WITH:
            raise DataError(f"smooth_with must be one of {SMOOTH_WITH}, got {self.smooth_with!r}")
        valid = set(selection_names(self.depth))
        for name in self.selection:
            if name not in valid:
                raise DataError(f"unknown selection {name!r}; valid: {', '.join(selection_names(self.depth))}")


@dataclass(frozen=True)
class ScatterOutput:
    """S0 plus the per-level modulus (U) and scattering (S) planes."""

    s0: np.ndarray
    u_levels: tuple[np.ndarray, ...]
    s_levels: tuple[np.ndarray, ...]
    config_echo: ScatterConfig


def _out_len(n: int, s: int) -> int:
    return -(-n // s)


def _pad_indices(n: int, pad_lo: int, pad_hi: int, boundary: str, kside, shape):
    if boundary == "symmetric":
        # half-sample mirror, single fold only: t<0 -> -t-1, t>=n -> 2n-1-t
        if pad_lo > n or pad_hi > n:
            raise DataError(
                f"kernel side {kside} does not fit plane of shape {shape} "
                f"(needs {pad_lo}+{pad_hi} extension on an axis of {n})")
        lo = np.arange(pad_lo - 1, -1, -1)
        hi = np.arange(n - 1, n - 1 - pad_hi, -1)
    else:
        if pad_lo > n or pad_hi > n:
            raise DataError(
                f"kernel side {kside} does not fit plane of shape {shape} "
                f"(needs {pad_lo}+{pad_hi} extension on an axis of {n})")
        lo = np.arange(-pad_lo, 0) % n
        hi = np.arange(n, n + pad_hi) % n
    return lo, hi


def _conv1d_decimated(x: np.ndarray, f: np.ndarray, origin: int, boundary: str,
                      s: int, axis: int, kside, shape) -> np.ndarray:
    """One decimating 1D pass along `axis`; fixed tap order keeps the
    per-output-pixel summation order deterministic."""
    n = x.shape[axis]
    k = len(f)
    m = _out_len(n, s)
    pad_lo = origin
    pad_hi = max(0, (m - 1) * s + (k - 1) - origin - (n - 1))
    lo, hi = _pad_indices(n, pad_lo, pad_hi, boundary, kside, shape)
    if axis == 1:
        ext = np.concatenate((x[:, lo], x, x[:, hi]), axis=1)
        acc = f[0] * ext[:, 0:(m - 1) * s + 1:s]
        for t in range(1, k):
            acc += f[t] * ext[:, t:t + (m - 1) * s + 1:s]
    else:
        ext = np.concatenate((x[lo, :], x, x[hi, :]), axis=0)
        acc = f[0] * ext[0:(m - 1) * s + 1:s, :]
        for t in range(1, k):
            acc += f[t] * ext[t:t + (m - 1) * s + 1:s, :]
    return acc


def conv2_decimated(plane, kernel: Kernel2D, boundary: str = "symmetric",
                    decimate: int = 2) -> np.ndarray:
    """Convolve a plane with a separable 2D kernel and decimate.

    Parameters
    ----------
    plane : 2D array
        Input image plane.
    kernel : Kernel2D
        Separable kernel from make_kernel2d.
    boundary : str
        "symmetric" (half-sample mirror, single fold) or "periodic".
    decimate : int
        Stride per axis; output dims are ceil(n/decimate).

    Returns
    -------
    2D float64 array, out[i][j] = sum_kl taps[k][l] * ext[i*s + k - oy][j*s + l - ox]
    with the tap at the kernel origin aligned to input sample (i*s, j*s).
    """
    x = validate_plane(plane)
    if boundary not in BOUNDARIES:
        raise DataError(f"unknown boundary mode {boundary!r}")
    s = int(decimate)
    if s < 1:
        raise DataError(f"decimate must be >= 1, got {decimate}")
    kside = kernel.taps.shape
    f, o = kernel.factor, kernel.origin
    rows = _conv1d_decimated(x, f, o, boundary, s, axis=1, kside=kside, shape=x.shape)
    return _conv1d_decimated(rows, f, o, boundary, s, axis=0, kside=kside, shape=x.shape)


def _kernels(config: ScatterConfig):
    phi = [make_kernel2d(make_filter_pair(b), SCALE, unit_dc=True) for b in config.level_bases]
    psi = [make_kernel2d(make_filter_pair(b), WAVELET_DIAGONAL) for b in config.level_bases]
    return phi, psi


def _smooth(u: np.ndarray, phi_k: Kernel2D, config: ScatterConfig) -> np.ndarray:
    s = config.decimate if config.smooth_decimate else 1
    return conv2_decimated(u, phi_k, config.boundary, s)


def scatter_classic(plane, config: ScatterConfig) -> ScatterOutput:
    """Classic cascade: U_n = |U_(n-1) * psi_n|, smoothed with its own level
    basis, S_n = U_n * phi_n."""
    if config.variant != "classic":
        raise DataError(f"scatter_classic needs variant 'classic', got {config.variant!r}")
    x = validate_plane(plane)
    phi, psi = _kernels(config)
    s, b = config.decimate, config.boundary
    s0 = conv2_decimated(x, phi[0], b, s)
    u_levels = []
    cur = x
    for n in range(config.depth):
        cur = np.abs(conv2_decimated(cur, psi[n], b, s))
        u_levels.append(cur)
    s_levels = [_smooth(u_levels[n], phi[n], config) for n in range(config.depth)]
    return ScatterOutput(s0, tuple(u_levels), tuple(s_levels), config)


def scatter_improved(plane, config: ScatterConfig) -> ScatterOutput:
    """Improved cascade: the low-pass chain A_k = |A_(k-1) * phi_k| replaces
    the high-pass chain; each level's U is one high-pass off the chain, and
    every S is smoothed with phi of the first level (smooth_with="first")."""
    if config.variant != "improved":
        raise DataError(f"scatter_improved needs variant 'improved', got {config.variant!r}")
    x = validate_plane(plane)
    phi, psi = _kernels(config)
    s, b = config.decimate, config.boundary
    s0 = conv2_decimated(x, phi[0], b, s)
    u_levels = [np.abs(conv2_decimated(x, psi[0], b, s))]
    chain = np.abs(s0)  # A1 = |x * phi_1| shares the S0 convolution
    for m in range(2, config.depth + 1):
        u_levels.append(np.abs(conv2_decimated(chain, psi[m - 1], b, s)))
        if m < config.depth:
            chain = np.abs(conv2_decimated(chain, phi[m - 1], b, s))
    s_levels = []
    for m in range(config.depth):
        k = phi[0] if config.smooth_with == "first" else phi[m]
        s_levels.append(_smooth(u_levels[m], k, config))
    return ScatterOutput(s0, tuple(u_levels), tuple(s_levels), config)


def scatter(plane, config: ScatterConfig) -> ScatterOutput:
    if config.variant == "classic":
        return scatter_classic(plane, config)
    return scatter_improved(plane, config)


def feature_vector(output: ScatterOutput, selection=None) -> np.ndarray:
    """Flatten the selected planes into one vector.

    Planes are concatenated in declared order (S0, U1..Um, S1..Sm) regardless
    of the order names appear in `selection`; each plane is row-major.
    """
    cfg = output.config_echo
    if selection is None:
        selection = cfg.selection
    wanted = set(selection)
    if not wanted:
        raise DataError("empty selection: nothing to put in the feature vector")
    valid = selection_names(cfg.depth)
    for name in wanted:
        if name not in valid:
            raise DataError(f"unknown selection {name!r}; valid: {', '.join(valid)}")
    planes = {"S0": output.s0}
    planes.update({f"U{i+1}": u for i, u in enumerate(output.u_levels)})
    planes.update({f"S{i+1}": p for i, p in enumerate(output.s_levels)})
    parts = [planes[name].ravel() for name in valid if name in wanted]
    return np.concatenate(parts)


def plane_dims(width: int, height: int, config: ScatterConfig) -> dict[str, tuple[int, int]]:
    """Output dims of every plane; identical for both variants (every level
    decimates once, S maps once more when smooth_decimate is on)."""
    s = config.decimate
    dims = {}
    w, h = width, height
    for n in range(1, config.depth + 1):
        w, h = _out_len(w, s), _out_len(h, s)
        dims[f"U{n}"] = (w, h)
        if n == 1:
            dims["S0"] = (w, h)
    for n in range(1, config.depth + 1):
        uw, uh = dims[f"U{n}"]
        if config.smooth_decimate:
            uw, uh = _out_len(uw, s), _out_len(uh, s)
        dims[f"S{n}"] = (uw, uh)
    return dims


def feature_length(width: int, height: int, config: ScatterConfig) -> int:
    """Config-derived feature-vector length for a width x height input."""
    dims = plane_dims(width, height, config)
    wanted = set(config.selection)
    return sum(dims[n][0] * dims[n][1] for n in selection_names(config.depth) if n in wanted)
