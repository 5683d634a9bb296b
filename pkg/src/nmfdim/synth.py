"""Synthetic data generation.

Column n of a generated dataset is W h_n + z_n with h_n i.i.d. from a
centered latent law and z_n i.i.d. Gaussian noise. All randomness comes from
counter-based Philox streams keyed by explicit seeds, with a fixed number of
draws consumed per column, so generated matrices are reproducible and
growing the sample count never changes earlier columns.
"""

import os
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import (
    InvalidConfigError,
    NoFeasibleScaleError,
    ShapeMismatchError,
    ZeroColumnError,
)
from .guarantees import irrepresentability
from .io import ensure_dir, read_json, read_matrix_csv, write_json, write_matrix_csv
from .laws import LatentLaw
from .linalg import as_matrix

PRNG_ID = "philox4x64"

# Domain tags keep the latent/noise stream and the dictionary stream apart
# even when they share a seed.
_STREAM_SAMPLES = 0
_STREAM_DICTIONARY = 1

IDENTITY_TOP = "identity_top"
EXPLICIT = "explicit"


def _stream(seed, domain):
    key = np.array([np.uint64(seed), np.uint64(domain)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class DictionarySpec:
    """How to obtain the ground-truth dictionary of a synthetic instance."""

    kind: str
    tail_scale: float = 1.0
    seed: int = 0
    matrix: np.ndarray = None

    def __post_init__(self):
        if self.kind == IDENTITY_TOP:
            if not np.isfinite(self.tail_scale) or self.tail_scale <= 0:
                raise InvalidConfigError(
                    f"tail_scale must be positive, got {self.tail_scale}"
                )
        elif self.kind == EXPLICIT:
            if self.matrix is None:
                raise InvalidConfigError("explicit dictionary requires a matrix")
            self.matrix = as_matrix(self.matrix, name="dictionary")
            if self.matrix.min() < 0:
                raise InvalidConfigError("explicit dictionary must be nonnegative")
            if np.any(self.matrix.sum(axis=0) == 0):
                raise ZeroColumnError("explicit dictionary has an all-zero column")
        else:
            raise InvalidConfigError(f"unknown dictionary kind {self.kind!r}")

    def to_json(self):
        if self.kind == IDENTITY_TOP:
            return {"kind": self.kind, "tail_scale": self.tail_scale, "seed": self.seed}
        return {"kind": self.kind, "matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj):
        kind = obj.get("kind")
        if kind == IDENTITY_TOP:
            return cls(kind, tail_scale=float(obj["tail_scale"]), seed=int(obj["seed"]))
        if kind == EXPLICIT:
            return cls(kind, matrix=np.array(obj["matrix"], dtype=float))
        raise InvalidConfigError(f"unknown dictionary kind {kind!r}")


@dataclass
class GenerativeConfig:
    """Full specification of one synthetic instance."""

    n_features: int
    n_components: int
    n_samples: int
    noise_std: float
    latent: LatentLaw
    dictionary: DictionarySpec
    seed: int

    def __post_init__(self):
        if self.n_features < 1 or self.n_components < 1 or self.n_samples < 1:
            raise InvalidConfigError("dimensions must be positive")
        if self.n_components > self.n_features:
            raise InvalidConfigError(
                f"n_components ({self.n_components}) exceeds n_features ({self.n_features})"
            )
        if not np.isfinite(self.noise_std) or self.noise_std < 0:
            raise InvalidConfigError(f"noise_std must be nonnegative, got {self.noise_std}")
        if not isinstance(self.latent, LatentLaw):
            raise InvalidConfigError("latent must be a LatentLaw")
        if not isinstance(self.dictionary, DictionarySpec):
            raise InvalidConfigError("dictionary must be a DictionarySpec")
        if self.dictionary.kind == EXPLICIT and self.dictionary.matrix.shape != (
            self.n_features,
            self.n_components,
        ):
            raise InvalidConfigError(
                "explicit dictionary shape does not match n_features x n_components"
            )

    def to_json(self):
        return {
            "n_features": self.n_features,
            "n_components": self.n_components,
            "n_samples": self.n_samples,
            "noise_std": self.noise_std,
            "latent": self.latent.to_json(),
            "dictionary": self.dictionary.to_json(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(
                n_features=int(obj["n_features"]),
                n_components=int(obj["n_components"]),
                n_samples=int(obj["n_samples"]),
                noise_std=float(obj["noise_std"]),
                latent=LatentLaw.from_json(obj["latent"]),
                dictionary=DictionarySpec.from_json(obj["dictionary"]),
                seed=int(obj["seed"]),
            )
        except KeyError as exc:
            raise InvalidConfigError(f"config is missing field {exc}") from exc

    def with_samples(self, n_samples):
        return replace(self, n_samples=int(n_samples))

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


@dataclass
class Dataset:
    data: np.ndarray
    dictionary: np.ndarray = None
    coefficients: np.ndarray = None
    n_components: int = None
    config: GenerativeConfig = None


def build_dictionary(config):
    """Materialize the dictionary described by the config."""
    spec = config.dictionary
    if spec.kind == EXPLICIT:
        return spec.matrix.copy()
    f, k = config.n_features, config.n_components
    top = np.eye(k)
    if f == k:
        return top
    tail = _stream(spec.seed, _STREAM_DICTIONARY).random((f - k, k))
    return np.vstack([top, spec.tail_scale * tail])


def generate(config):
    """Draw one dataset from the generative model, deterministically in the seed.

    Each column consumes exactly n_components + n_features uniforms from the
    sample stream (latent coordinates first, then noise), all mapped through
    inverse CDFs, so the first columns of a longer run reproduce a shorter one.
    """
    w = build_dictionary(config)
    f, k, n = config.n_features, config.n_components, config.n_samples
    draws = _stream(config.seed, _STREAM_SAMPLES).random((n, k + f))
    coeffs = config.latent.from_uniform(draws[:, :k]).T
    data = w @ coeffs
    if config.noise_std > 0:
        noise = LatentLaw.gaussian(config.noise_std).from_uniform(draws[:, k:]).T
        data = data + noise
    return Dataset(
        data=data,
        dictionary=w,
        coefficients=coeffs,
        n_components=k,
        config=config,
    )


def calibrate_tail_scale(n_features, n_components, seed, gap_target):
    """Largest tail scale (on a 1e-3 grid in (0, 1]) keeping the gap feasible.

    Bisection over the grid for the largest scale whose dictionary still has
    irrepresentability at most 1 - gap_target on the identity block rows.
    """
    if not 0 < gap_target <= 1:
        raise InvalidConfigError(f"gap_target must lie in (0, 1], got {gap_target}")
    if n_components > n_features:
        raise InvalidConfigError("n_components exceeds n_features")
    if n_components == n_features:
        return 1.0
    tail = _stream(seed, _STREAM_DICTIONARY).random((n_features - n_components, n_components))
    support = np.arange(n_components)
    top = np.eye(n_components)

    def feasible(grid_point):
        w = np.vstack([top, (grid_point / 1000.0) * tail])
        return irrepresentability(w, support) <= 1.0 - gap_target

    if feasible(1000):
        return 1.0
    if not feasible(1):
        raise NoFeasibleScaleError(
            f"no tail scale >= 0.001 reaches gap {gap_target} "
            f"(n_features={n_features}, n_components={n_components}, seed={seed})"
        )
    lo, hi = 1, 1000
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo / 1000.0


# Swimmer geometry on a 20 x 11 canvas: a fixed 4-pixel torso plus four
# limbs, each a straight 4-pixel ray from its anchor in one of four
# directions (outward horizontal, outward diagonal, axial, inward diagonal).
# The inward diagonals of opposite limbs cross above/below the torso, which
# makes the lit-pixel count vary across images; a constant count would
# collapse the contracted cumulant of the dataset to a rank-one matrix.
SWIMMER_HEIGHT = 20
SWIMMER_WIDTH = 11
SWIMMER_COMPONENTS = 16

_TORSO = ((8, 5), (9, 5), (10, 5), (11, 5))
_LIMBS = (
    ((8, 4), ((0, -1), (-1, -1), (-1, 0), (-1, 1))),   # upper left
    ((8, 6), ((0, 1), (-1, 1), (-1, 0), (-1, -1))),    # upper right
    ((11, 4), ((0, -1), (1, -1), (1, 0), (1, 1))),     # lower left
    ((11, 6), ((0, 1), (1, 1), (1, 0), (1, -1))),      # lower right
)
_LIMB_LENGTH = 4


def swimmer_masks(height=SWIMMER_HEIGHT, width=SWIMMER_WIDTH):
    """Torso pixel set and the 4 x 4 limb-position pixel sets, as index tuples."""
    if height < SWIMMER_HEIGHT or width < SWIMMER_WIDTH:
        raise InvalidConfigError(
            f"canvas must be at least {SWIMMER_HEIGHT}x{SWIMMER_WIDTH}"
        )
    dr, dc = (height - SWIMMER_HEIGHT) // 2, (width - SWIMMER_WIDTH) // 2
    torso = tuple((r + dr, c + dc) for r, c in _TORSO)
    limbs = []
    for (ar, ac), dirs in _LIMBS:
        positions = []
        for drow, dcol in dirs:
            positions.append(
                tuple(
                    (ar + dr + step * drow, ac + dc + step * dcol)
                    for step in range(1, _LIMB_LENGTH + 1)
                )
            )
        limbs.append(tuple(positions))
    return torso, tuple(limbs)


def swimmer(width=SWIMMER_WIDTH, height=SWIMMER_HEIGHT):
    """Procedural swimmer benchmark: 256 binary images, one per limb pose.

    Images are enumerated lexicographically over the four limb positions and
    flattened column-wise into the columns of the data matrix. The latent
    dimensionality of the benchmark is 16 (one part per limb position).
    """
    torso, limbs = swimmer_masks(height, width)
    n_images = _LIMB_LENGTH ** len(limbs)
    data = np.zeros((height * width, n_images))
    image = np.zeros((height, width))
    for index in range(n_images):
        image[:] = 0.0
        for r, c in torso:
            image[r, c] = 1.0
        rest = index
        for limb in range(len(limbs) - 1, -1, -1):
            rest, position = divmod(rest, _LIMB_LENGTH)
            for r, c in limbs[limb][position]:
                image[r, c] = 1.0
        data[:, index] = image.ravel(order="F")
    return Dataset(data=data, n_components=SWIMMER_COMPONENTS)


def export_pgm(dataset, directory, height=SWIMMER_HEIGHT, width=SWIMMER_WIDTH):
    """Write one binary PGM (P5, maxval 255) per column; 0 -> 0, 1 -> 255."""
    data = as_matrix(dataset.data, name="data")
    if data.shape[0] != height * width:
        raise ShapeMismatchError(
            f"{data.shape[0]} rows cannot form {height}x{width} images"
        )
    values = np.rint(data)
    if not np.isin(values, (0.0, 1.0)).all():
        raise InvalidConfigError("PGM export expects binary data")
    ensure_dir(directory)
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    paths = []
    for n in range(data.shape[1]):
        image = (values[:, n].reshape((height, width), order="F") * 255).astype(np.uint8)
        path = os.path.join(directory, f"frame_{n:03d}.pgm")
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(image.tobytes())
        paths.append(path)
    return paths


def save_dataset(dataset, directory):
    """Persist data matrix as CSV plus a JSON sidecar with config and truth."""
    ensure_dir(directory)
    write_matrix_csv(dataset.data, os.path.join(directory, "data.csv"))
    if dataset.dictionary is not None:
        write_matrix_csv(dataset.dictionary, os.path.join(directory, "dictionary.csv"))
    meta = {
        "n_components": dataset.n_components,
        "prng": PRNG_ID,
        "config": dataset.config.to_json() if dataset.config is not None else None,
    }
    write_json(meta, os.path.join(directory, "meta.json"))


def load_dataset(directory):
    data = read_matrix_csv(os.path.join(directory, "data.csv"))
    meta = read_json(os.path.join(directory, "meta.json"))
    dictionary_path = os.path.join(directory, "dictionary.csv")
    dictionary = read_matrix_csv(dictionary_path) if os.path.exists(dictionary_path) else None
    config = (
        GenerativeConfig.from_json(meta["config"]) if meta.get("config") else None
    )
    n_components = meta.get("n_components")
    return Dataset(
        data=data,
        dictionary=dictionary,
        n_components=None if n_components is None else int(n_components),
        config=config,
    )
