"""Stochastic thermodynamic functionals evaluated on path tables.

Per in-measure path the engine computes the heat Q_A, the stochastic
mutual informations I_l = J_l + C_l at both ends, the relative entropies
Sigma_A, Sigma_B, the conditional-dynamics term gamma, and the total

    sigma = Q_A dbeta + I_0 - I_1 - Sigma_A - Sigma_B + gamma,

whose average of exp(-sigma) is 1.  The relative entropies compare the
evolved diagonal populations against the *initial* marginal eigenvalues
attached to each final label; that reference (together with exact energy
conservation on supported paths) is what closes every integral identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UndefinedOnPath, UnsnappableHeat
from .trajectories import AMP_EPS, PRUNE_EPS, BasisAssignment, PathRecord, gamma_of_path

HEAT_SNAP_TOL_PEV = 1e-6

# Row names of the integral fluctuation report, in output order.
INTEGRAL_ROWS = (
    "exp_neg_sigma",
    "exp_neg_i0",
    "exp_neg_i1",
    "exp_neg_j0",
    "exp_neg_j1",
    "exp_neg_c0",
    "exp_neg_c1",
    "exp_neg_sigma_a",
    "exp_neg_sigma_b",
    "exp_neg_gamma",
    "exp_neg_q_dbeta",
)


@dataclass(frozen=True)
class PathFunctionals:
    """All stochastic functionals of one in-measure path (nats, heat in peV)."""

    q_a: float
    i0: float
    i1: float
    j0: float
    j1: float
    c0: float
    c1: float
    sigma_a: float
    sigma_b: float
    gamma: float
    sigma_total: float


@dataclass(frozen=True)
class HeatHistogram:
    """Probability masses on the discrete heat support {-h nu0, 0, +h nu0}.

    Reverse histograms are binned at the reverse path's own heat, i.e. a
    record with forward heat Q contributes its reverse mass at -Q.
    """

    support: tuple
    masses: tuple
    direction: str

    def mass_at(self, q: float, tol: float = HEAT_SNAP_TOL_PEV) -> float:
        for point, mass in zip(self.support, self.masses):
            if abs(point - q) <= tol:
                return mass
        raise KeyError(f"{q} is not on the heat support")


def heat_support(level_splitting: float) -> tuple:
    return (-level_splitting, 0.0, level_splitting)


def snap_heat(
    raw: float, level_splitting: float, tol: float = HEAT_SNAP_TOL_PEV
) -> float:
    """Snap a raw energy difference onto the exact three-point support."""
    for point in heat_support(level_splitting):
        if abs(raw - point) <= tol:
            return point
    raise UnsnappableHeat(raw)


def heat_of_path(path: PathRecord, ba: BasisAssignment) -> float:
    """Q_A = E(a1) - E(a0), snapped to the discrete support."""
    raw = float(ba.energies_a1[path.a1] - ba.energies_a0[path.a0])
    return snap_heat(raw, ba.level_splitting, ba.heat_snap_tol)


def mutual_informations(
    path: PathRecord,
    ba: BasisAssignment,
    literal_rho0_jl: bool = False,
    amp_eps: float = AMP_EPS,
) -> tuple:
    """(i0, i1, j0, j1, c0, c1) for one path.

    Default evaluates the l=1 joint on the evolved state, which keeps
    i1 = j1 + c1 exact.  ``literal_rho0_jl`` switches J_1/C_1 to the
    initial-state joint for comparison; the decomposition then breaks and
    the J_1/C_1 integral identities are not expected to hold.
    """
    k0 = 2 * path.a0 + path.b0
    k1 = 2 * path.a1 + path.b1
    p_s = float(ba.p_s[path.s])
    p_sstar = float(ba.p_sstar[path.s])
    pa0 = float(ba.local_a_initial.eigenvalues[path.a0])
    pb0 = float(ba.local_b_initial.eigenvalues[path.b0])
    pa1 = float(ba.p_a1_diag[path.a1])
    pb1 = float(ba.p_b1_diag[path.b1])
    q0 = float(ba.q0_joint[k0])
    qt = float(ba.qt_joint[k1])
    for name, value in (
        ("P_s", p_s),
        ("P_s*", p_sstar),
        ("P_a0", pa0),
        ("P_b0", pb0),
        ("P(a1)", pa1),
        ("P(b1)", pb1),
        ("P_a0b0", q0),
    ):
        if value <= amp_eps:
            raise UndefinedOnPath(f"{name} underflows on path {path.labels}")
    i0 = math.log(p_s / (pa0 * pb0))
    i1 = math.log(p_sstar / (pa1 * pb1))
    j0 = math.log(q0 / (pa0 * pb0))
    c0 = math.log(p_s / q0)
    if literal_rho0_jl:
        pa1_init = ba.initial_population_a(path.a1)
        pb1_init = ba.initial_population_b(path.b1)
        joint1 = float(ba.q0_joint_final_basis[k1])
        if joint1 <= amp_eps:
            raise UndefinedOnPath(f"P_a1b1 underflows on path {path.labels}")
        j1 = math.log(joint1 / (pa1_init * pb1_init))
        c1 = math.log(p_s / joint1)
    else:
        if qt <= amp_eps:
            raise UndefinedOnPath(f"P_a1b1 underflows on path {path.labels}")
        j1 = math.log(qt / (pa1 * pb1))
        c1 = math.log(p_sstar / qt)
    return (i0, i1, j0, j1, c0, c1)


def relative_entropies(
    path: PathRecord, ba: BasisAssignment, amp_eps: float = AMP_EPS
) -> tuple:
    """(sigma_a, sigma_b): evolved diagonal populations against the
    initial marginal eigenvalues attached to the final labels."""
    pa1 = float(ba.p_a1_diag[path.a1])
    pb1 = float(ba.p_b1_diag[path.b1])
    ref_a = ba.initial_population_a(path.a1)
    ref_b = ba.initial_population_b(path.b1)
    for name, value in (
        ("P(a1)", pa1),
        ("P(b1)", pb1),
        ("P0_a1", ref_a),
        ("P0_b1", ref_b),
    ):
        if value <= amp_eps:
            raise UndefinedOnPath(f"{name} underflows on path {path.labels}")
    return (math.log(pa1 / ref_a), math.log(pb1 / ref_b))


def evaluate_path(
    path: PathRecord,
    ba: BasisAssignment,
    delta_beta: float,
    literal_rho0_jl: bool = False,
) -> PathFunctionals:
    """All functionals of one in-measure path."""
    q_a = heat_of_path(path, ba)
    i0, i1, j0, j1, c0, c1 = mutual_informations(path, ba, literal_rho0_jl)
    sigma_a, sigma_b = relative_entropies(path, ba)
    gamma = gamma_of_path(path)
    sigma_total = q_a * delta_beta + i0 - i1 - sigma_a - sigma_b + gamma
    return PathFunctionals(
        q_a=q_a,
        i0=i0,
        i1=i1,
        j0=j0,
        j1=j1,
        c0=c0,
        c1=c1,
        sigma_a=sigma_a,
        sigma_b=sigma_b,
        gamma=gamma,
        sigma_total=sigma_total,
    )


@dataclass(frozen=True)
class PathTableFunctionals:
    """Functionals for a full table plus excluded-mass bookkeeping.

    ``values[i]`` is None exactly where ``in_measure[i]`` is False; those
    paths carry forward mass below the pruning threshold and are excluded
    from all averages (their total mass is tracked).
    """

    values: tuple
    in_measure: tuple
    excluded_mass: float


def evaluate_table(
    records,
    ba: BasisAssignment,
    delta_beta: float,
    literal_rho0_jl: bool = False,
    prune_eps: float = PRUNE_EPS,
) -> PathTableFunctionals:
    values = []
    in_measure = []
    excluded = 0.0
    for rec in records:
        if rec.p_forward < prune_eps:
            values.append(None)
            in_measure.append(False)
            excluded += rec.p_forward
        else:
            values.append(evaluate_path(rec, ba, delta_beta, literal_rho0_jl))
            in_measure.append(True)
    return PathTableFunctionals(tuple(values), tuple(in_measure), float(excluded))


def assemble_heat_histogram(
    records, ba: BasisAssignment, direction: str
) -> HeatHistogram:
    """Sum path masses per heat support point.

    Forward masses bin at the path's heat Q; reverse masses bin at the
    reverse traversal's heat -Q.
    """
    if direction not in ("forward", "reverse"):
        raise ValueError("direction must be 'forward' or 'reverse'")
    support = heat_support(ba.level_splitting)
    masses = [0.0, 0.0, 0.0]
    for rec in records:
        q = heat_of_path(rec, ba)
        if direction == "forward":
            idx = support.index(q)
            masses[idx] += rec.p_forward
        else:
            idx = support.index(-q if q != 0.0 else 0.0)
            masses[idx] += rec.p_reverse
    return HeatHistogram(support=support, masses=tuple(masses), direction=direction)


@dataclass(frozen=True)
class DetailedFtRecord:
    """One heat value of the detailed fluctuation relation."""

    q: float
    p_f: float
    p_r_neg: float
    lhs: float | None  # ln[P_f(Q) / P_r(-Q)]
    rhs_jw: float  # Q * dbeta
    psi: float | None  # exp(Q dbeta) P_r(-Q) / P_f(Q)
    defined: bool


def detailed_ft_ratio(
    hf: HeatHistogram, hr: HeatHistogram, delta_beta: float, amp_eps: float = AMP_EPS
) -> tuple:
    """Detailed-FT records for each support point.

    Records where either mass underflows are flagged undefined rather
    than dropped.
    """
    out = []
    for idx, q in enumerate(hf.support):
        p_f = float(hf.masses[idx])
        p_r_neg = float(hr.mass_at(-q if q != 0.0 else 0.0))
        rhs = q * delta_beta
        if p_f > amp_eps and p_r_neg > amp_eps:
            lhs = math.log(p_f / p_r_neg)
            psi = math.exp(rhs) * p_r_neg / p_f
            out.append(DetailedFtRecord(q, p_f, p_r_neg, lhs, rhs, psi, True))
        else:
            out.append(DetailedFtRecord(q, p_f, p_r_neg, None, rhs, None, False))
    return tuple(out)


def integral_ft_averages(
    records,
    table: PathTableFunctionals,
    delta_beta: float,
) -> dict:
    """Forward-ensemble averages of exp(-X) for every functional X.

    Includes the exchange-theorem row exp(-Q_A dbeta), exact for
    uncorrelated initial states.  All averages run over the forward path
    measure with sub-threshold paths excluded.
    """
    sums = {name: 0.0 for name in INTEGRAL_ROWS}
    mean_q = 0.0
    mean_sigma = 0.0
    for rec, vals, ok in zip(records, table.values, table.in_measure):
        if not ok:
            continue
        w = rec.p_forward
        sums["exp_neg_sigma"] += w * math.exp(-vals.sigma_total)
        sums["exp_neg_i0"] += w * math.exp(-vals.i0)
        sums["exp_neg_i1"] += w * math.exp(-vals.i1)
        sums["exp_neg_j0"] += w * math.exp(-vals.j0)
        sums["exp_neg_j1"] += w * math.exp(-vals.j1)
        sums["exp_neg_c0"] += w * math.exp(-vals.c0)
        sums["exp_neg_c1"] += w * math.exp(-vals.c1)
        sums["exp_neg_sigma_a"] += w * math.exp(-vals.sigma_a)
        sums["exp_neg_sigma_b"] += w * math.exp(-vals.sigma_b)
        sums["exp_neg_gamma"] += w * math.exp(-vals.gamma)
        sums["exp_neg_q_dbeta"] += w * math.exp(-vals.q_a * delta_beta)
        mean_q += w * vals.q_a
        mean_sigma += w * vals.sigma_total
    sums["mean_heat_pev"] = mean_q
    sums["mean_sigma"] = mean_sigma
    return sums


def mean_functionals(records, table: PathTableFunctionals) -> dict:
    """Forward-ensemble means of each functional (Jensen-side numbers)."""
    fields = ("i0", "i1", "j0", "j1", "c0", "c1", "sigma_a", "sigma_b", "gamma",
              "sigma_total")
    out = {name: 0.0 for name in fields}
    for rec, vals, ok in zip(records, table.values, table.in_measure):
        if not ok:
            continue
        for name in fields:
            out[name] += rec.p_forward * getattr(vals, name)
    return out
