"""Generating processes for the simulation scenarios.

Every scenario panel is a pure function of ``(scenario, T, innovation,
seed, replication)``: each series draws from its own PCG64 stream, spawned
from ``SeedSequence(seed, spawn_key=(replication, series_index))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, UnstableSpecError
from .panel import MtsPanel

__all__ = [
    "FAMILIES",
    "ScenarioSpec",
    "draw_innovations",
    "generate",
    "generate_linear",
    "generate_nonlinear",
    "generate_dcc",
    "scenario_specs",
    "scenario_panel",
    "SCENARIO_LENGTHS",
]

FAMILIES = ("VAR1", "VMA1", "VARMA11", "NVAR", "TAR", "BL", "NLVMA", "WHITE", "DCC")
LINEAR = ("VAR1", "VMA1", "VARMA11", "WHITE")
NONLINEAR = ("NVAR", "TAR", "BL", "NLVMA")

DEFAULT_BURN_IN = 500

# series lengths studied for each scenario
SCENARIO_LENGTHS = {
    0: (500,),
    1: (100, 150, 200),
    2: (300, 400, 500),
    3: (1000, 1500, 2000),
    4: (200, 400, 600),
    5: (300, 600, 900),
    6: (500, 1000, 1500),
}

SCENARIO1_VAR = np.array([[0.4, -0.3, 0.9], [0.4, 0.3, -0.1], [0.5, 0.3, -0.2]])
SCENARIO1_VMA = np.array([[0.3, -0.7, -0.9], [0.2, 0.3, 0.1], [0.2, 0.1, -0.3]])
SCENARIO1_VARMA = np.array([[0.6, 0.5, 0.0], [-0.4, 0.5, 0.3], [0.0, -0.5, 0.7]])
SCENARIO4_VAR = np.array([[0.0, 0.2], [0.2, 0.2]])
SCENARIO4_VMA = np.array([[-0.4, -0.4], [-0.4, -0.2]])
TOY_VAR = np.full((2, 2), 0.2)
GARCH_PARAMS = ((0.01, 0.05, 0.94), (0.5, 0.2, 0.5))


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative description of one generating process.

    ``coeffs`` depends on ``family``: ``A`` and/or ``B`` matrices for the
    linear families, ``sign`` for NLVMA, ``garch`` (one ``(omega, alpha,
    beta)`` triple per component) and ``rho`` (values before and after the
    midpoint) for DCC.
    """

    family: str
    d: int = 2
    coeffs: dict = field(default_factory=dict)
    innovation: str = "gaussian"
    df: float = 3.0
    T: int = 200
    burn_in: int = DEFAULT_BURN_IN
    seed: int = 0
    stream: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.innovation not in ("gaussian", "student_t"):
            raise ConfigurationError(f"innovation must be 'gaussian' or 'student_t', got {self.innovation!r}")
        if self.T < 50:
            raise ConfigurationError(f"series length must be at least 50, got {self.T}")
        if self.burn_in < 0:
            raise ConfigurationError("burn_in must be nonnegative")
        if self.innovation == "student_t" and self.df < 1:
            raise ConfigurationError("degrees of freedom must be at least 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=tuple(self.stream)))


def _innovations(rng, n, d, family, df):
    z = rng.standard_normal((n, d))
    if family == "gaussian":
        return z
    if family == "student_t":
        w = rng.chisquare(df, size=n)
        return z / np.sqrt(w / df)[:, None]
    raise ConfigurationError(f"unknown innovation family {family!r}")


def draw_innovations(T, d, family="gaussian", seed=0, df=3.0) -> np.ndarray:
    """``T x d`` innovations: i.i.d. standard normal, or multivariate t rows.

    A Student-t row is a standard normal row divided by ``sqrt(chi2_df / df)``
    with one chi-square draw per row.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _innovations(rng, int(T), int(d), family, df)


def _spectral_radius(A):
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def _matrix(spec, key):
    M = np.asarray(spec.coeffs[key], dtype=float)
    if M.shape != (spec.d, spec.d):
        raise ConfigurationError(f"{spec.family}: coefficient {key} must be {spec.d} x {spec.d}")
    return M


def generate_linear(spec: ScenarioSpec, eps=None) -> np.ndarray:
    """VAR(1), VMA(1), VARMA(1,1) or white noise from a zero initial state.

    ``eps`` optionally supplies the full ``(burn_in + T) x d`` innovation
    stream; otherwise it is drawn from the spec's generator.
    """
    if spec.family not in LINEAR:
        raise ConfigurationError(f"{spec.family} is not a linear family")
    n, d = spec.burn_in + spec.T, spec.d
    if eps is None:
        eps = _innovations(spec.rng(), n, d, spec.innovation, spec.df)
    A = _matrix(spec, "A") if spec.family in ("VAR1", "VARMA11") else np.zeros((d, d))
    B = _matrix(spec, "B") if spec.family in ("VMA1", "VARMA11") else np.zeros((d, d))
    if spec.family in ("VAR1", "VARMA11") and _spectral_radius(A) >= 1.0:
        raise UnstableSpecError(f"{spec.family}: autoregressive matrix has spectral radius >= 1")

    X = eps.copy()
    X[1:] += eps[:-1] @ B.T
    if np.any(A):
        for t in range(1, n):
            X[t] += A @ X[t - 1]
    return X[spec.burn_in:]


def generate_nonlinear(spec: ScenarioSpec, eps=None) -> np.ndarray:
    """Bivariate NVAR, TAR, bilinear and nonlinear VMA recursions.

    The innovation stream runs continuously through the burn-in, so lagged
    innovations at the first retained time point are genuine draws.
    """
    if spec.family not in NONLINEAR:
        raise ConfigurationError(f"{spec.family} is not a nonlinear family")
    if spec.d != 2:
        raise ConfigurationError(f"{spec.family} is defined for bivariate series only")
    n = spec.burn_in + spec.T
    if eps is None:
        eps = _innovations(spec.rng(), n, 2, spec.innovation, spec.df)
    e1, e2 = eps[:, 0].tolist(), eps[:, 1].tolist()
    x1, x2 = [0.0] * n, [0.0] * n
    fam = spec.family

    if fam == "NLVMA":
        s = float(spec.coeffs.get("sign", 1.0))
        own = float(spec.coeffs.get("own", 1.0))
        X = own * eps.copy()
        X[1:, 0] += s * (0.1 * eps[:-1, 0] + 0.6 * eps[:-1, 1] ** 2)
        X[1:, 1] += s * (0.1 * eps[:-1, 1] + 0.6 * eps[:-1, 0] ** 2)
        return X[spec.burn_in:]

    p1 = p2 = 0.0
    for t in range(n):
        if fam == "NVAR":
            a = 0.7 * abs(p1) / (abs(p2) + 1.0)
            b = 0.7 * abs(p2) / (abs(p1) + 1.0)
        elif fam == "TAR":
            a = 0.9 * p2 if abs(p1) <= 1.0 else -0.3 * p1
            b = 0.9 * p1 if abs(p2) <= 1.0 else -0.3 * p2
        else:  # BL
            l1 = e1[t - 2] if t >= 2 else 0.0
            l2 = e2[t - 2] if t >= 2 else 0.0
            a = 0.7 * p1 * l2
            b = 0.7 * p2 * l1
        p1, p2 = a + e1[t], b + e2[t]
        x1[t], x2[t] = p1, p2
    return np.column_stack([x1, x2])[spec.burn_in:]


def _rho_path(spec, n):
    rho = spec.coeffs.get("rho", (0.0, 0.0))
    if np.isscalar(rho):
        rho = (rho, rho)
    first, second = float(rho[0]), float(rho[1])
    if max(abs(first), abs(second)) > 1.0:
        raise ConfigurationError("correlations must lie in [-1, 1]")
    # 1-based retained time t uses `first` while t <= T/2; burn-in uses `first`
    t = np.arange(n) - spec.burn_in + 1
    return np.where(t <= spec.T / 2.0, first, second)


def generate_dcc(spec: ScenarioSpec, eps=None) -> np.ndarray:
    """Two GARCH(1,1) components driven by shocks with correlation path ``rho_t``.

    Conditional variances start at their unconditional level
    ``omega / (1 - alpha - beta)``.
    """
    if spec.family != "DCC":
        raise ConfigurationError(f"{spec.family} is not the DCC family")
    if spec.d != 2:
        raise ConfigurationError("DCC processes are bivariate")
    garch = np.asarray(spec.coeffs.get("garch", GARCH_PARAMS), dtype=float)
    if garch.shape != (2, 3):
        raise ConfigurationError("garch parameters must be two (omega, alpha, beta) triples")
    omega, alpha, beta = garch.T
    if np.any(omega <= 0) or np.any(alpha < 0) or np.any(beta < 0) or np.any(alpha + beta >= 1.0):
        raise UnstableSpecError("GARCH parameters need omega > 0, alpha, beta >= 0 and alpha + beta < 1")
    n = spec.burn_in + spec.T
    if eps is None:
        eps = _innovations(spec.rng(), n, 2, spec.innovation, spec.df)
    rho = _rho_path(spec, n)
    z1 = eps[:, 0]
    z2 = rho * eps[:, 0] + np.sqrt(1.0 - rho * rho) * eps[:, 1]
    z = np.column_stack([z1, z2])

    out = np.empty((n, 2))
    var = omega / (1.0 - alpha - beta)
    w, a_, b_ = omega.tolist(), alpha.tolist(), beta.tolist()
    s = var.tolist()
    zl = z.tolist()
    for t in range(n):
        x0 = s[0] ** 0.5 * zl[t][0]
        x1 = s[1] ** 0.5 * zl[t][1]
        out[t, 0], out[t, 1] = x0, x1
        s = [w[0] + a_[0] * x0 * x0 + b_[0] * s[0], w[1] + a_[1] * x1 * x1 + b_[1] * s[1]]
    return out[spec.burn_in:]


def generate(spec: ScenarioSpec) -> np.ndarray:
    if spec.family in LINEAR:
        return generate_linear(spec)
    if spec.family in NONLINEAR:
        return generate_nonlinear(spec)
    return generate_dcc(spec)


def _group_templates(scenario):
    """Per-group ``(family, d, coeffs)`` tuples; the last entry of the
    two-cluster designs is the switching process."""
    if scenario == 0:
        return [("VAR1", 2, {"A": TOY_VAR}), ("VAR1", 2, {"A": -TOY_VAR}), ("WHITE", 2, {})]
    if scenario == 1:
        return [
            ("VAR1", 3, {"A": SCENARIO1_VAR}),
            ("VMA1", 3, {"B": SCENARIO1_VMA}),
            ("VARMA11", 3, {"A": SCENARIO1_VARMA, "B": SCENARIO1_VARMA}),
        ]
    if scenario == 2:
        return [("NVAR", 2, {}), ("TAR", 2, {}), ("BL", 2, {})]
    if scenario == 3:
        return [("DCC", 2, {"rho": (0.9, -0.7)}), ("DCC", 2, {"rho": (0.5, 0.5)}), ("DCC", 2, {"rho": (0.9, -0.2)})]
    if scenario == 4:
        return [
            ("VAR1", 2, {"A": SCENARIO4_VAR}),
            ("VMA1", 2, {"B": SCENARIO4_VMA}),
            ("VARMA11", 2, {"A": SCENARIO4_VAR, "B": SCENARIO4_VMA}),
        ]
    if scenario == 5:
        return [("NLVMA", 2, {"sign": 1.0}), ("NLVMA", 2, {"sign": -1.0}), ("WHITE", 2, {})]
    if scenario == 6:
        return [("DCC", 2, {"rho": (0.9, -0.3)}), ("DCC", 2, {"rho": (-0.9, 0.3)}), ("DCC", 2, {"rho": (0.0, 0.0)})]
    raise ConfigurationError(f"unknown scenario {scenario!r}; expected 0..6")


def scenario_specs(scenario, T, innovation="gaussian", seed=0, replication=0, burn_in=DEFAULT_BURN_IN, df=3.0):
    """Specs of every series of a scenario panel, in panel order.

    Scenarios 0 to 3 give three groups of five series. Scenarios 4 to 6 give
    two groups of five followed by one switching series. Scenario 0 is the
    small two-VAR-plus-white-noise illustration.
    """
    templates = _group_templates(int(scenario))
    switching = int(scenario) >= 4
    counts = [5, 5, 1] if switching else [5, 5, 5]
    specs = []
    for g, ((family, d, coeffs), count) in enumerate(zip(templates, counts)):
        for _ in range(count):
            i = len(specs)
            specs.append(
                ScenarioSpec(family, d, coeffs, innovation, df, int(T), burn_in, int(seed), (int(replication), i))
            )
    return specs


def scenario_panel(scenario, T, innovation="gaussian", seed=0, replication=0, burn_in=DEFAULT_BURN_IN, df=3.0):
    """Simulate one panel of a scenario.

    Returns an :class:`~qcdfuzzy.panel.MtsPanel` with ``true_labels`` set;
    for the switching designs the switching series sits at index 10 with
    label 2.
    """
    specs = scenario_specs(scenario, T, innovation, seed, replication, burn_in, df)
    switching = int(scenario) >= 4
    labels = [0] * 5 + [1] * 5 + ([2] if switching else [2] * 5)
    series = [generate(s) for s in specs]
    ids = [f"s{i:02d}" for i in range(len(series))]
    return MtsPanel(series, ids, np.array(labels), 10 if switching else None)
