"""Fourth-cumulant second-moment estimation.

The estimator contracts the empirical fourth-order cumulant tensor of the
data columns against the all-ones vector twice, producing an F x F matrix in
O(F^2 N) time without materializing the tensor. A dense tensor path is kept
as a brute-force oracle for small F.
"""

import os
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateKurtosisError,
    DimensionMismatchError,
    DimensionTooLargeError,
    InvalidConfigError,
    TooFewSamplesError,
    ZeroColumnError,
)
from .io import read_json, read_matrix_csv, write_json, write_matrix_csv
from .linalg import as_matrix, as_vector
from .laws import LatentLaw

MAX_DENSE_FEATURES = 32


@dataclass
class MomentEstimate:
    """Second-moment matrix plus the provenance needed to reproduce it."""

    matrix: np.ndarray
    contraction_left: np.ndarray
    contraction_right: np.ndarray
    n_samples: int
    path: str


@dataclass
class CumulantTensor:
    """Dense fourth-order cumulant tensor (oracle path, small F only)."""

    values: np.ndarray

    @property
    def n_features(self):
        return self.values.shape[0]


def empirical_second_moment(data):
    """Contract the empirical fourth cumulant of the columns of `data`.

    Uses the rank-structured identity: with p_n the n-th column sum and
    q_n = p_n^2,

        M = V diag(q) V^T / N - (sum(q)/N^2) V V^T - 2 (Vp)(Vp)^T / N^2,

    which equals the dense-tensor contraction against all-ones vectors.
    The result is symmetrized as a final step.
    """
    v = as_matrix(data, name="data")
    f, n = v.shape
    if n < 2:
        raise TooFewSamplesError(f"need at least 2 columns, got {n}")
    col_sums = v.sum(axis=0)
    weights = col_sums**2
    lead = (v * weights) @ v.T / n
    gram = v @ v.T
    vp = v @ col_sums
    raw = lead - (weights.sum() / n**2) * gram - (2.0 / n**2) * np.outer(vp, vp)
    ones = np.ones(f)
    return MomentEstimate(
        matrix=0.5 * (raw + raw.T),
        contraction_left=ones,
        contraction_right=ones,
        n_samples=n,
        path="fast",
    )


def fourth_cumulant_dense(data):
    """Materialize the empirical fourth cumulant tensor (O(F^4 N) oracle)."""
    v = as_matrix(data, name="data")
    f, n = v.shape
    if f > MAX_DENSE_FEATURES:
        raise DimensionTooLargeError(
            f"dense tensor path guarded at F <= {MAX_DENSE_FEATURES}, got {f}"
        )
    if n < 2:
        raise TooFewSamplesError(f"need at least 2 columns, got {n}")
    raw = np.einsum("in,jn,ln,mn->ijlm", v, v, v, v, optimize=True) / n
    c = v @ v.T / n
    pairings = (
        np.einsum("ij,lm->ijlm", c, c)
        + np.einsum("il,jm->ijlm", c, c)
        + np.einsum("im,jl->ijlm", c, c)
    )
    return CumulantTensor(values=raw - pairings)


def contract_to_matrix(tensor, left, right):
    """Collapse the last two tensor modes against the given vectors."""
    values = tensor.values
    f = values.shape[0]
    left = as_vector(left, size=f, name="left contraction vector")
    right = as_vector(right, size=f, name="right contraction vector")
    return np.einsum("ijlm,l,m->ij", values, left, right)


def second_moment_from_tensor(tensor):
    """Oracle-path MomentEstimate: all-ones contraction of the dense tensor."""
    f = tensor.n_features
    ones = np.ones(f)
    return MomentEstimate(
        matrix=contract_to_matrix(tensor, ones, ones),
        contraction_left=ones,
        contraction_right=ones,
        n_samples=-1,
        path="oracle",
    )


def population_second_moment(dictionary, law):
    """Population counterpart of the contracted moment for a known dictionary.

    Returns (matrix, weights) where matrix = W diag(weights) W^T and
    weights_k = kurtosis * (column sum of w_k)^2. Requires a nonnegative
    dictionary with no zero column and a law with nonzero excess kurtosis.
    """
    w = as_matrix(dictionary, name="dictionary")
    if w.min() < 0:
        raise InvalidConfigError("dictionary must be entrywise nonnegative")
    col_mass = w.sum(axis=0)
    if np.any(col_mass == 0):
        raise ZeroColumnError("dictionary has an all-zero column")
    if not isinstance(law, LatentLaw):
        raise InvalidConfigError("law must be a LatentLaw")
    kurtosis = law.excess_kurtosis()
    if kurtosis == 0.0:
        raise DegenerateKurtosisError(f"{law.kind} has zero excess kurtosis")
    weights = kurtosis * col_mass**2
    return (w * weights) @ w.T, weights


def save_moment_estimate(estimate, directory):
    """Persist matrix + JSON sidecar (sample count, path, contraction vectors)."""
    os.makedirs(directory, exist_ok=True)
    write_matrix_csv(estimate.matrix, os.path.join(directory, "moment.csv"))
    write_json(
        {
            "n_samples": estimate.n_samples,
            "path": estimate.path,
            "contraction_left": list(estimate.contraction_left),
            "contraction_right": list(estimate.contraction_right),
        },
        os.path.join(directory, "moment.json"),
    )


def load_moment_estimate(directory):
    matrix = read_matrix_csv(os.path.join(directory, "moment.csv"))
    meta = read_json(os.path.join(directory, "moment.json"))
    f = matrix.shape[0]
    return MomentEstimate(
        matrix=matrix,
        contraction_left=as_vector(meta["contraction_left"], size=f),
        contraction_right=as_vector(meta["contraction_right"], size=f),
        n_samples=int(meta["n_samples"]),
        path=str(meta["path"]),
    )
