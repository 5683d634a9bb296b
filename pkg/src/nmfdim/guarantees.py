"""Exact-recovery certificates for a known dictionary.

Given the dictionary W that generated the data, these routines pick a row
subset whose block is invertible, build the reference row-sparse solution
that the estimation pipeline is supposed to find, and evaluate every
constant appearing in the recovery guarantee, including the sample-size
bound and the admissible regularization window.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InfeasibleGapError,
    InvalidConfigError,
    RankDeficientError,
    SingularBlockError,
    SingularGramError,
)
from .laws import MAX_MOMENT_ORDER
from .linalg import (
    as_index_set,
    as_matrix,
    complement_indices,
    matrix_norm,
    row_norms,
)
from .moments import population_second_moment

_SUBSET_SEARCH_KEY = 0x5EED
_SUBSET_CANDIDATES = 200


@dataclass
class SupportCertificate:
    """Reference solution X with exactly one nonzero row block.

    `matrix` satisfies M X = M for the population moment M of the dictionary:
    identity on (support, support), `coeffs` on (support, complement), zeros
    elsewhere. Structural zeros are placed, never computed.
    """

    support: np.ndarray
    coeffs: np.ndarray
    matrix: np.ndarray
    coeff_norm_max: float
    coeff_norm_min: float

    @property
    def row_norm_max(self):
        return float(np.sqrt(1.0 + self.coeff_norm_max**2))

    @property
    def row_norm_min(self):
        return float(np.sqrt(1.0 + self.coeff_norm_min**2))


def _pop_weights_unit_kurtosis(dictionary):
    # The irrepresentability ratio is invariant to the (nonzero) kurtosis
    # scalar, so support selection can use unit kurtosis weights.
    return dictionary.sum(axis=0) ** 2


def irrepresentability(dictionary, support, weights=None):
    """Infinity norm of (cross Gram) @ (support Gram)^{-1} for the population problem."""
    w = as_matrix(dictionary, name="dictionary")
    f, k = w.shape
    support = as_index_set(support, f, name="support")
    if weights is None:
        weights = _pop_weights_unit_kurtosis(w)
    comp = complement_indices(support, f)
    if comp.size == 0:
        return 0.0
    scaled = w * weights  # W diag(weights)
    core = scaled.T @ scaled  # diag(a) W^T W diag(a)
    gram_support = w[support] @ core @ w[support].T
    gram_cross = w[comp] @ core @ w[support].T
    try:
        solved = np.linalg.solve(gram_support.T, gram_cross.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularGramError("support Gram is singular") from exc
    return matrix_norm(solved, "infinity")


def _min_singular(block):
    return float(np.linalg.svd(block, compute_uv=False)[-1])


def choose_support_rows(dictionary):
    """Pick row indices whose block of the dictionary is invertible.

    Greedy selection: grow the block one row at a time, always taking the row
    that maximizes the smallest singular value of the block so far. If the
    greedy choice leaves no positive irrepresentability gap, fall back to the
    best of 200 seeded random subsets (by smallest singular value), keeping
    whichever feasible candidate is best conditioned.
    """
    w = as_matrix(dictionary, name="dictionary")
    f, k = w.shape
    singulars = np.linalg.svd(w, compute_uv=False)
    if singulars[k - 1] <= 1e-10 * singulars[0]:
        raise RankDeficientError(
            f"dictionary rank deficient: sigma_min/sigma_max = "
            f"{singulars[k - 1] / singulars[0]:.3e}"
        )

    selected = []
    remaining = list(range(f))
    for _ in range(k):
        best_row, best_sv = remaining[0], -1.0
        for row in remaining:
            sv = _min_singular(w[selected + [row]])
            if sv > best_sv:
                best_row, best_sv = row, sv
        selected.append(best_row)
        remaining.remove(best_row)
    greedy = np.sort(np.array(selected, dtype=int))
    if f == k or irrepresentability(w, greedy) < 1.0:
        return greedy

    gen = np.random.Generator(np.random.Philox(key=np.array([_SUBSET_SEARCH_KEY, 2], dtype=np.uint64)))
    candidates = [greedy]
    for _ in range(_SUBSET_CANDIDATES):
        candidates.append(np.sort(gen.choice(f, size=k, replace=False)))
    feasible = []
    for cand in candidates:
        sv = _min_singular(w[cand])
        if sv <= 1e-10 * singulars[0]:
            continue
        if irrepresentability(w, cand) < 1.0:
            feasible.append((sv, tuple(cand)))
    if feasible:
        feasible.sort()
        return np.array(feasible[-1][1], dtype=int)
    return greedy


def build_support_certificate(dictionary, support):
    """Express every off-support row through the selected block and assemble X."""
    w = as_matrix(dictionary, name="dictionary")
    f, k = w.shape
    support = as_index_set(support, f, name="support")
    if support.size != k:
        raise InvalidConfigError(f"support must select {k} rows, got {support.size}")
    block = w[support]
    singulars = np.linalg.svd(block, compute_uv=False)
    if singulars[-1] <= 1e-12 * max(singulars[0], 1e-300):
        raise SingularBlockError("selected row block is numerically singular")
    comp = complement_indices(support, f)
    if comp.size:
        # coeffs^T = W_comp @ block^{-1}
        coeffs = np.linalg.solve(block.T, w[comp].T)
        norms = row_norms(coeffs)
        coeff_max, coeff_min = float(norms.max()), float(norms.min())
    else:
        coeffs = np.zeros((k, 0))
        coeff_max = coeff_min = 0.0
    x = np.zeros((f, f))
    x[np.ix_(support, support)] = np.eye(k)
    if comp.size:
        x[np.ix_(support, comp)] = coeffs
    return SupportCertificate(
        support=support,
        coeffs=coeffs,
        matrix=x,
        coeff_norm_max=coeff_max,
        coeff_norm_min=coeff_min,
    )


def _partitions(total, max_part=None):
    """All integer partitions of `total` as non-increasing tuples."""
    max_part = max_part or total
    if total == 0:
        return [()]
    out = []
    for part in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - part, part):
            out.append((part,) + rest)
    return out


def law_moment_aggregate(law, order):
    """Sum over all integer partitions of `order` of the moment products.

    Centered laws have zero first moment, so every partition with a unit
    part vanishes; the full enumeration keeps the formula law-agnostic.
    """
    if not 1 <= order <= MAX_MOMENT_ORDER:
        raise InvalidConfigError(f"aggregate order {order} outside 1..{MAX_MOMENT_ORDER}")
    total = 0.0
    for partition in _partitions(order):
        product = 1.0
        for part in partition:
            product *= law.raw_moment(part)
        total += product
    return total


@dataclass
class RecoveryConstantsReport:
    """Every constant of the exact-recovery guarantee for a known dictionary."""

    support: np.ndarray
    gram_support: np.ndarray
    gram_cross: np.ndarray
    gram_min_eigenvalue: float
    gram_inf_norm: float
    gram_inv_inf_norm: float
    irrepresentability: float
    gap: float
    coeff_norm_max: float
    coeff_norm_min: float
    moment_one_norm: float
    dict_max_entry: float
    noise_scale: float
    moment_bound_4: float
    moment_bound_8: float
    moment_bound: float
    failure_prob: float
    error_budget_1: float
    error_budget_2: float
    error_budget: float
    sample_bound: float
    n_samples_used: float
    reg_lower: float
    reg_upper: float
    feasible: bool
    window_nonempty: bool

    def to_json(self):
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if isinstance(value, np.ndarray):
                out[name] = value.tolist()
            elif isinstance(value, (np.bool_, bool)):
                out[name] = bool(value)
            else:
                out[name] = float(value)
        return out


def recovery_constants(dictionary, support, law, noise_std, failure_prob, n_samples=None):
    """Evaluate the recovery guarantee constants on a known-dictionary instance.

    The guarantee's lower regularization limit shrinks like 1/sqrt(N); it is
    reported at `n_samples` when given, otherwise at the guarantee's own
    sample bound. Two readings of the Gram infinity-norm constant circulate
    (the matrix itself versus its inverse); both are reported and the inverse
    reading feeds the regularization window.
    """
    if not 0 < failure_prob < 1:
        raise InvalidConfigError(f"failure_prob must lie in (0, 1), got {failure_prob}")
    if noise_std < 0:
        raise InvalidConfigError("noise_std must be nonnegative")
    w = as_matrix(dictionary, name="dictionary")
    f, k = w.shape
    moment, weights = population_second_moment(w, law)
    cert = build_support_certificate(w, support)
    support = cert.support
    comp = complement_indices(support, f)

    scaled = w * weights
    core = scaled.T @ scaled
    gram_support = w[support] @ core @ w[support].T
    gram_cross = (
        w[comp] @ core @ w[support].T if comp.size else np.zeros((0, k))
    )
    c_min = float(np.linalg.eigvalsh(0.5 * (gram_support + gram_support.T))[0])
    gram_inf = matrix_norm(gram_support, "infinity")
    try:
        gram_inv = np.linalg.inv(gram_support)
    except np.linalg.LinAlgError as exc:
        raise SingularGramError("support Gram is singular") from exc
    d_max = matrix_norm(gram_inv, "infinity")
    irrep = (
        matrix_norm(gram_cross @ gram_inv, "infinity") if comp.size else 0.0
    )
    gap = 1.0 - irrep
    if gap <= 0:
        raise InfeasibleGapError(f"irrepresentability {irrep:.6f} >= 1")
    gap = min(gap, 1.0)

    m_one = matrix_norm(moment, "one")
    r_max, r_min = cert.coeff_norm_max, cert.coeff_norm_min
    budget_1 = gap / (6.0 * np.sqrt(f) * m_one * d_max * (1.0 + 8.0 * m_one**2 * d_max))
    budget_2 = (
        gap
        * np.sqrt(1.0 + r_min**2)
        / (
            4.0
            * (4.0 + gap)
            * m_one
            * (1.0 + np.sqrt(f * (1.0 + r_max**2)))
            * (d_max + 6.0 * m_one**2 * d_max**2)
        )
    )
    budget = min(np.sqrt(max(c_min, 0.0)) / 2.0, m_one / np.sqrt(f), budget_1, budget_2)

    agg_4 = law_moment_aggregate(law, 4)
    agg_8 = law_moment_aggregate(law, 8)
    agg = max(agg_8, agg_4**2)
    w_max = float(w.max())
    noise_scale = max(float(noise_std), 1.0)

    sample_bound = (
        958230.0 * agg * w_max**2 * k**8 * noise_scale**8 * f**6 / (failure_prob * budget**2)
        if budget > 0
        else np.inf
    )
    n_used = float(n_samples) if n_samples is not None else sample_bound
    if n_used <= 0 or not np.isfinite(n_used):
        reg_lower = np.inf
    else:
        reg_lower = (
            936.0
            * np.sqrt(70.0 * agg)
            * w_max**4
            * k**4
            * noise_scale**4
            * f**3
            / np.sqrt(failure_prob * n_used)
            * m_one
            * (1.0 + np.sqrt(f * (1.0 + r_max**2)))
            / gap
        )
    reg_upper = (
        2.0
        * np.sqrt(1.0 + r_min**2)
        / ((4.0 + gap) * (d_max + 6.0 * m_one**2 * d_max**2))
    )

    return RecoveryConstantsReport(
        support=support,
        gram_support=gram_support,
        gram_cross=gram_cross,
        gram_min_eigenvalue=c_min,
        gram_inf_norm=gram_inf,
        gram_inv_inf_norm=d_max,
        irrepresentability=irrep,
        gap=gap,
        coeff_norm_max=r_max,
        coeff_norm_min=r_min,
        moment_one_norm=m_one,
        dict_max_entry=w_max,
        noise_scale=noise_scale,
        moment_bound_4=agg_4,
        moment_bound_8=agg_8,
        moment_bound=agg,
        failure_prob=failure_prob,
        error_budget_1=budget_1,
        error_budget_2=budget_2,
        error_budget=budget,
        sample_bound=sample_bound,
        n_samples_used=n_used,
        reg_lower=reg_lower,
        reg_upper=reg_upper,
        feasible=bool(c_min > 0 and 0 < gap <= 1),
        window_nonempty=bool(reg_lower <= reg_upper),
    )


@dataclass
class PerturbationReport:
    """How an additive perturbation degrades the support-Gram conditioning."""

    eta: float
    d_max: float
    d_max_star: float
    noise_scale_bound: float
    base_scale_bound: float
    base_min_eigenvalue: float
    base_irrepresentability: float
    gap: float
    small_noise_ok: bool
    eta_ok: bool
    budget_ok: bool
    perturbed_min_eigenvalue: float
    perturbed_irrepresentability: float
    perturbed_inv_inf_norm: float

    @property
    def conditions_met(self):
        return self.small_noise_ok and self.eta_ok and self.budget_ok

    def to_json(self):
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            out[name] = bool(value) if isinstance(value, (bool, np.bool_)) else float(value)
        out["conditions_met"] = bool(self.conditions_met)
        return out


def perturbation_report(base, noise, support, gap):
    """Evaluate the perturbation hypotheses and the resulting conditioning.

    `base` is the unperturbed matrix, `noise` the additive perturbation, and
    `support` the column subset whose Gram must stay invertible. Reports the
    three hypotheses (spectral smallness of the supported noise, eta < 1, and
    the gap budget) together with the measured conditioning of the perturbed
    matrix, so tests can assert the implied conclusions with explicit slack.
    """
    if not 0 < gap <= 1:
        raise InvalidConfigError(f"gap must lie in (0, 1], got {gap}")
    base = as_matrix(base, name="base")
    noise = as_matrix(noise, name="noise")
    if base.shape != noise.shape:
        raise DimensionMismatchError(
            f"noise shape {noise.shape} does not match base shape {base.shape}"
        )
    support = as_index_set(support, base.shape[1], name="support")
    if support.size == 0:
        raise InvalidConfigError("support must be non-empty")
    comp = complement_indices(support, base.shape[1])

    base_s = base[:, support]
    gram_bar = base_s.T @ base_s
    eigs = np.linalg.eigvalsh(0.5 * (gram_bar + gram_bar.T))
    c_min = float(eigs[0])
    if c_min <= 1e-12 * max(float(eigs[-1]), 1e-300):
        raise SingularGramError(f"base support Gram min eigenvalue {c_min:.3e}")
    gram_bar_inv = np.linalg.inv(gram_bar)
    d_max = matrix_norm(gram_bar_inv, "infinity")
    base_irrep = (
        matrix_norm(base[:, comp].T @ base_s @ gram_bar_inv, "infinity")
        if comp.size
        else 0.0
    )

    perturbed = base + noise
    pert_s = perturbed[:, support]
    noise_s = noise[:, support]
    # Difference between the perturbed and base support Grams, in product
    # form so that small perturbations do not cancel against the large Grams.
    shift = noise_s.T @ base_s + base_s.T @ noise_s + noise_s.T @ noise_s
    eta = matrix_norm(gram_bar_inv @ shift, "infinity")

    u_noise = max(matrix_norm(noise, "one"), matrix_norm(noise, "infinity"))
    u_base = max(matrix_norm(base, "one"), matrix_norm(base, "infinity"))
    small_noise_ok = bool(
        matrix_norm(noise_s, "spectral") <= 0.5 * np.sqrt(max(c_min, 0.0))
    )
    eta_ok = bool(eta < 1.0)
    if eta_ok:
        budget = d_max * u_noise * (2.0 * u_base + u_noise) * (
            1.0 + (u_base + u_noise) ** 2 * d_max / (1.0 - eta)
        )
        d_max_star = d_max + u_noise * (2.0 * u_base + u_noise) * d_max**2 / (1.0 - eta)
    else:
        budget = np.inf
        d_max_star = np.inf
    budget_ok = bool(budget <= 0.5 * gap)

    gram_pert = pert_s.T @ pert_s
    pert_eigs = np.linalg.eigvalsh(0.5 * (gram_pert + gram_pert.T))
    pert_c_min = float(pert_eigs[0])
    if pert_c_min > 1e-14 * max(float(pert_eigs[-1]), 1e-300):
        gram_pert_inv = np.linalg.inv(gram_pert)
        pert_inv_inf = matrix_norm(gram_pert_inv, "infinity")
        pert_irrep = (
            matrix_norm(perturbed[:, comp].T @ pert_s @ gram_pert_inv, "infinity")
            if comp.size
            else 0.0
        )
    else:
        pert_inv_inf = np.inf
        pert_irrep = np.inf

    return PerturbationReport(
        eta=eta,
        d_max=d_max,
        d_max_star=d_max_star,
        noise_scale_bound=u_noise,
        base_scale_bound=u_base,
        base_min_eigenvalue=c_min,
        base_irrepresentability=base_irrep,
        gap=gap,
        small_noise_ok=small_noise_ok,
        eta_ok=eta_ok,
        budget_ok=budget_ok,
        perturbed_min_eigenvalue=pert_c_min,
        perturbed_irrepresentability=pert_irrep,
        perturbed_inv_inf_norm=pert_inv_inf,
    )
