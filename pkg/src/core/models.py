# src/core/models.py
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ProposalType(Enum):
    """Importance proposals for Monte Carlo integrals"""
    BUBBLE_RADIAL = "bubble_radial"
    UNIFORM_BALL = "uniform_ball"


class EtaProfile(Enum):
    """Ramp profiles for the cutoff function"""
    QUINTIC = "quintic"
    UNIT = "unit"


class LatticeSide(Enum):
    """Which lattice sum around x_1^+"""
    SAME_SIDE = "same_side"
    CROSS_SIDE = "cross_side"
    CROSS_SIDE_SIN2 = "cross_side_sin2"


class AsymptoticForm(Enum):
    """Leading-order lattice sum forms"""
    A4_GAMMA = "A4_gamma"
    SAME_SIDE = "A441_sameside"
    CROSS_NM2S = "A441_cross_Nm2s"
    CROSS_NM2SP2 = "A441_cross_Nm2sp2"
    CROSS_SIN2 = "A441_cross_sin2"


class PotentialFamily(Enum):
    """Built-in potential families V(r, y'')"""
    CONSTANT = "constant"
    GAUSSIAN_BUMP = "gaussian_bump"
    SADDLE = "saddle"


_FROZEN = ConfigDict(frozen=True, extra="forbid")


# =============================================================================
# PARAMETERS AND GEOMETRY
# =============================================================================

class PhysicalParams(BaseModel):
    """Dimension, fractional order and derived constants"""
    model_config = _FROZEN

    N: int = Field(..., ge=5, le=8)
    s: float = Field(..., gt=0.0, lt=1.0)
    two_s_star: float
    tau: float
    gamma0: float
    C_N: float
    c_Ns: float
    omega_Nm1: float

    @property
    def gamma(self) -> float:
        """Decay exponent N - 2s of a bubble"""
        return self.N - 2.0 * self.s

    @property
    def critical_power(self) -> float:
        """2_s^* - 1 = (N + 2s)/(N - 2s)"""
        return self.two_s_star - 1.0

    @property
    def half_gamma(self) -> float:
        return 0.5 * (self.N - 2.0 * self.s)


class Bubble(BaseModel):
    """A single bubble U_{x, lambda}"""
    model_config = _FROZEN

    center: Tuple[float, ...]
    lam: float = Field(..., gt=0.0)

    @field_validator("center")
    @classmethod
    def center_finite(cls, v):
        if not all(np.isfinite(c) for c in v):
            raise ValueError("bubble center must be finite")
        return tuple(float(c) for c in v)

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)


class CylinderConfig(BaseModel):
    """The 2k concentration points on the doubled cylinder"""
    model_config = _FROZEN

    k: int = Field(..., ge=1)
    r_bar: float = Field(..., gt=0.0)
    h_bar: float = Field(..., ge=0.0, lt=1.0)
    y2_bar: Tuple[float, ...] = ()

    @property
    def N(self) -> int:
        return 3 + len(self.y2_bar)


class CutoffEta(BaseModel):
    """Cutoff eta in the reduced (r, y'') variables"""
    model_config = _FROZEN

    anchor_r: float = Field(..., gt=0.0)
    anchor_y2: Tuple[float, ...] = ()
    sigma: float = Field(..., gt=0.0)
    profile: EtaProfile = EtaProfile.QUINTIC


class LatticeSumReport(BaseModel):
    """Exact lattice sum against its leading-order form"""
    exact: float
    asymptotic: float
    relative_error: float
    which: LatticeSide
    gamma_or_power: float

    @model_validator(mode="after")
    def consistent_error(self):
        if self.exact != 0.0:
            expected = abs(self.exact - self.asymptotic) / abs(self.exact)
            if abs(expected - self.relative_error) > 1e-12 * max(1.0, expected):
                raise ValueError("relative_error must equal |exact - asymptotic| / |exact|")
        return self


# =============================================================================
# QUADRATURE AND MONTE CARLO
# =============================================================================

class PvQuadratureSpec(BaseModel):
    """Principal-value quadrature resolution"""
    model_config = _FROZEN

    inner_radius: float = Field(1.0, gt=0.0)
    radial_nodes: int = Field(48, ge=4)
    angular_nodes: int = Field(32, ge=4)
    outer_nodes: int = Field(48, ge=4)
    sphere_order: int = Field(6, ge=2, le=16)
    target_tol: float = Field(1e-6, gt=0.0)
    max_refinements: int = Field(3, ge=1)

    def refined(self, factor: float = 1.5) -> "PvQuadratureSpec":
        return self.model_copy(update={
            "radial_nodes": int(np.ceil(self.radial_nodes * factor)),
            "angular_nodes": int(np.ceil(self.angular_nodes * factor)),
            "outer_nodes": int(np.ceil(self.outer_nodes * factor)),
            "sphere_order": min(16, self.sphere_order + 2),
        })


class PvResult(BaseModel):
    """Quadrature value with its error estimate"""
    value: float
    error: float = Field(..., ge=0.0)
    nodes: int = 0


class McSpec(BaseModel):
    """Seeded, sharded Monte Carlo settings"""
    model_config = _FROZEN

    n_samples: int = Field(200_000, ge=1000)
    seed: int = Field(20240611, ge=0, lt=2 ** 64)
    shards: int = Field(8, ge=1)
    proposal: ProposalType = ProposalType.BUBBLE_RADIAL
    antithetic: bool = True


class McEstimate(BaseModel):
    """Monte Carlo estimate with standard error"""
    estimate: float
    stderr: float = Field(..., ge=0.0)
    n_samples: int

    def within(self, target: float, n_sigma: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.estimate - target) <= n_sigma * self.stderr + slack


# =============================================================================
# ENERGY
# =============================================================================

class EnergyConstants(BaseModel):
    """Lattice, interaction and energy constants"""
    model_config = _FROZEN

    N: int
    s: float
    A1: float
    A2: float
    A3: float
    A4: float
    A5: float
    A6: float
    B0: float
    B1: float
    B2: float
    B3: float
    D1: float
    D2: float
    r_bar_used: float
    notes: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def positive_and_consistent(self):
        for name in ("A1", "A2", "A3", "A4", "A5", "A6", "B0", "B1", "B2", "B3", "D1", "D2", "r_bar_used"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        gamma = self.N - 2.0 * self.s
        d1 = (gamma - 1.0) * self.B3 / (gamma * self.B2)
        d2 = gamma * self.B2 / (2.0 * self.s * self.B1)
        if abs(d1 - self.D1) > 1e-12 * d1 or abs(d2 - self.D2) > 1e-12 * d2:
            raise ValueError("D1/D2 inconsistent with B fields")
        return self


class EnergyExpansion(BaseModel):
    """Leading terms of I(Z) for the doubled cylinder"""
    base: float
    potential: float
    same_side: float
    cross_side: float
    total: float
    order_tag: str
    in_regime: bool


class ReducedSolution(BaseModel):
    """Reduced-system scalings and the critical point of r^{2s} V"""
    t1: float = Field(..., gt=0.0)
    t2: float = Field(..., gt=0.0)
    r_star: float
    y2_star: Tuple[float, ...]
    nondegenerate: bool
    jac_det_sign: int
    iterations: int = 0

    @field_validator("jac_det_sign")
    @classmethod
    def sign_only(cls, v):
        if v not in (-1, 0, 1):
            raise ValueError("jac_det_sign must be -1, 0 or 1")
        return v


class CriticalPoint(BaseModel):
    """Zero of grad(r^{2s} V)"""
    r_star: float
    y2_star: Tuple[float, ...]
    nondegenerate: bool
    jac_det_sign: int
    iterations: int
    gradient_norm: float
    singular_ratio: float


class BallSpec(BaseModel):
    """B_rho: the (r, y'')-ball of radius rho lifted to R^N"""
    model_config = _FROZEN

    center_r: float = Field(..., gt=0.0)
    center_y2: Tuple[float, ...] = ()
    rho: float = Field(..., gt=0.0)

    @classmethod
    def for_cutoff(cls, cutoff: CutoffEta, rho_factor: float = 3.5) -> "BallSpec":
        if not 2.0 < rho_factor < 5.0:
            raise ValueError("rho must lie strictly between 2 sigma and 5 sigma")
        return cls(center_r=cutoff.anchor_r, center_y2=cutoff.anchor_y2, rho=rho_factor * cutoff.sigma)


# =============================================================================
# RUN CONFIGURATION
# =============================================================================

class PotentialSpec(BaseModel):
    """Potential family and parameters"""
    model_config = ConfigDict(extra="forbid")

    family: PotentialFamily = PotentialFamily.GAUSSIAN_BUMP
    level: float = Field(1.0, gt=0.0)
    a: float = Field(0.0, ge=0.0)
    b: float = Field(1.0, ge=0.0)
    r_center: float = 1.0
    y_center: Optional[List[float]] = None
    width: float = Field(1.0, gt=0.0)
    well_floor: float = Field(2.0, gt=0.0)
    well_depth: float = Field(1.0, ge=0.0)
    well_width: float = Field(1.0, gt=0.0)

    @model_validator(mode="after")
    def positive_family(self):
        if self.family == PotentialFamily.GAUSSIAN_BUMP and self.a + self.b <= 0.0:
            raise ValueError("gaussian_bump needs a + b > 0")
        if self.family == PotentialFamily.SADDLE and self.well_depth >= self.well_floor:
            raise ValueError("saddle needs well_floor > well_depth so that V > 0")
        return self


class RegimeSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    L0: float = Field(0.5, gt=0.0)
    L1: float = Field(2.0, gt=0.0)
    M0: float = Field(0.5, gt=0.0)
    M1: float = Field(2.0, gt=0.0)

    @model_validator(mode="after")
    def ordered(self):
        if not (self.L0 < self.L1 and self.M0 < self.M1):
            raise ValueError("regime needs L0 < L1 and M0 < M1")
        return self


class CutoffSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sigma_factor: float = Field(0.1, gt=0.0, lt=0.5)
    sigma: Optional[float] = Field(None, gt=0.0)
    rho_factor: float = Field(3.5, gt=2.0, lt=5.0)
    profile: EtaProfile = EtaProfile.QUINTIC


class LatticeSuiteSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_values: List[int] = Field(default_factory=lambda: [64, 128, 200, 256, 512])
    r_bar: float = Field(1.0, gt=0.0)
    h_bar: float = Field(0.05, gt=0.0, lt=1.0)
    cross_k_values: List[int] = Field(default_factory=lambda: [100, 200, 400, 800])


class InteractionSuiteSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lambda_d_grid: List[float] = Field(default_factory=lambda: [10.0, 20.0, 50.0, 100.0])
    lam: float = Field(10.0, gt=0.0)
    n_samples: int = Field(1_000_000, ge=1000)


class EnergySuiteSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int = Field(8, ge=1, le=64)
    fd_points: int = Field(50, ge=1)
    n_samples: int = Field(200_000, ge=1000)


class ResidualSuiteSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_list: List[int] = Field(default_factory=lambda: [8, 16, 32, 64])
    far_samples: int = Field(32, ge=0)
    j3_samples: int = Field(20_000, ge=1000)


class PohozaevSuiteSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int = Field(8, ge=1)
    lam: float = Field(1.0e3, gt=0.0)
    lam_sweep: List[float] = Field(default_factory=lambda: [250.0, 500.0, 1000.0])
    displacement: float = Field(0.2, gt=0.0)
    n_samples: int = Field(200_000, ge=1000)


class InitialGuess(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: float = Field(1.2, gt=0.0)
    y2: Optional[List[float]] = None


SUITES = ("constants", "lattice", "interactions", "energy", "reduce", "residual", "pohozaev")


class RunConfig(BaseModel):
    """One file fully determines a run"""
    model_config = ConfigDict(extra="forbid")

    N: int = Field(6, ge=5, le=8)
    s: float = Field(0.9, gt=0.0, lt=1.0)
    potential: PotentialSpec = Field(default_factory=PotentialSpec)
    k_list: List[int] = Field(default_factory=lambda: [8, 16, 32, 64])
    regime: RegimeSpec = Field(default_factory=RegimeSpec)
    cutoff: CutoffSpec = Field(default_factory=CutoffSpec)
    mc: McSpec = Field(default_factory=McSpec)
    quadrature: PvQuadratureSpec = Field(default_factory=PvQuadratureSpec)
    lattice: LatticeSuiteSpec = Field(default_factory=LatticeSuiteSpec)
    interactions: InteractionSuiteSpec = Field(default_factory=InteractionSuiteSpec)
    energy: EnergySuiteSpec = Field(default_factory=EnergySuiteSpec)
    residual: ResidualSuiteSpec = Field(default_factory=ResidualSuiteSpec)
    pohozaev: PohozaevSuiteSpec = Field(default_factory=PohozaevSuiteSpec)
    initial_guess: InitialGuess = Field(default_factory=InitialGuess)
    output_dir: str = "runs/default"
    suites: List[str] = Field(default_factory=lambda: list(SUITES))

    @field_validator("k_list")
    @classmethod
    def increasing_k(cls, v):
        if len(v) < 4 or any(b <= a for a, b in zip(v, v[1:])) or v[0] < 2:
            raise ValueError("k_list must be increasing, start at k >= 2 and have at least 4 entries")
        return v

    @field_validator("suites")
    @classmethod
    def known_suites(cls, v):
        unknown = [name for name in v if name not in SUITES]
        if unknown:
            raise ValueError(f"unknown suites: {unknown}")
        return v
