"""
Pydantic models for array geometries, beams, gains, codebooks, channels and experiment configs
"""
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SPEED_OF_LIGHT = 299_792_458.0
TWO_PI = 2.0 * math.pi

# Distance of a far-field focal point
FAR_FIELD = math.inf


class ArrayLayout(str, Enum):
    UCA = "uca"
    ULA = "ula"
    CYLINDRICAL = "cylindrical"


class GainFormula(str, Enum):
    ANGULAR_J0 = "angular_j0"
    DISTANCE_J0 = "distance_j0"
    CYLINDRICAL_FRESNEL_J0 = "cylindrical_fresnel_j0"
    EXACT_SUM = "exact_sum"


class ErdOutcome(str, Enum):
    CROSSING = "crossing"
    BELOW_THRESHOLD = "below_threshold"
    BEYOND_RANGE = "beyond_range"


class VerifyMode(str, Enum):
    NEIGHBORS = "neighbors"
    ALL_PAIRS = "all_pairs"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class GainModel(str, Enum):
    COMPLEX_NORMAL = "complex_normal"
    UNIT = "unit"


class RingSpacing(str, Enum):
    """THRESHOLD: r_delta = 2 pi R^2 / (lambda J0^-1(Delta)); MATCHED: consecutive rings correlate at Delta"""
    THRESHOLD = "threshold"
    MATCHED = "matched"


class MainLobeValue(BaseModel):
    """A |J0| level inside the main lobe"""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0.0, le=1.0)


class ArrayGeometry(BaseModel):
    """
    Antenna layout.

    Elements are ordered ring-major (m = -M..M ascending) and by azimuth index
    n = 1..N inside a ring; element n of a ring sits at psi_n = 2*pi*n/N.
    A ULA lies on the y-axis, centred at the origin.
    """
    model_config = ConfigDict(frozen=True)

    layout: ArrayLayout
    n: int = Field(..., ge=1, description="Elements per ring (or ULA element count)")
    wavelength_m: float = Field(..., gt=0)
    radius_m: Optional[float] = Field(default=None, gt=0)
    aperture_m: Optional[float] = Field(default=None, gt=0)
    spacing_m: Optional[float] = Field(default=None, gt=0, description="Ring spacing d")
    ring_half_count: int = Field(default=0, ge=0, description="M, the array has 2M+1 rings")

    @model_validator(mode="after")
    def _check_layout(self) -> "ArrayGeometry":
        if self.layout in (ArrayLayout.UCA, ArrayLayout.CYLINDRICAL) and self.radius_m is None:
            raise ValueError(f"{self.layout.value} layout requires radius_m")
        if self.layout == ArrayLayout.ULA:
            if self.aperture_m is None and self.n > 1:
                raise ValueError("ula layout requires aperture_m")
            if self.ring_half_count:
                raise ValueError("ring_half_count only applies to the cylindrical layout")
        if self.layout == ArrayLayout.UCA and self.ring_half_count:
            raise ValueError("ring_half_count only applies to the cylindrical layout")
        if self.layout == ArrayLayout.CYLINDRICAL and self.ring_half_count > 0 and self.spacing_m is None:
            raise ValueError("cylindrical layout with rings requires spacing_m")
        return self

    @classmethod
    def half_wavelength_uca(cls, n: int, wavelength_m: float) -> "ArrayGeometry":
        """UCA whose neighbouring elements are half a wavelength apart along the circle"""
        return cls(layout=ArrayLayout.UCA, n=n, wavelength_m=wavelength_m,
                   radius_m=n * wavelength_m / (4.0 * math.pi))

    @classmethod
    def half_wavelength_ula(cls, n: int, wavelength_m: float) -> "ArrayGeometry":
        return cls(layout=ArrayLayout.ULA, n=n, wavelength_m=wavelength_m,
                   aperture_m=max(n - 1, 1) * wavelength_m / 2.0)

    @property
    def ring_count(self) -> int:
        return 2 * self.ring_half_count + 1

    @property
    def total_elements(self) -> int:
        return self.n * self.ring_count

    @property
    def wavenumber(self) -> float:
        return TWO_PI / self.wavelength_m

    @property
    def aperture(self) -> float:
        """Largest horizontal extent: 2R for circular layouts, D for the ULA"""
        if self.layout == ArrayLayout.ULA:
            return self.aperture_m or 0.0
        return 2.0 * self.radius_m

    def with_rings(self, ring_half_count: int) -> "ArrayGeometry":
        """Same rings stacked into a cylinder of 2M+1 rings"""
        if self.layout == ArrayLayout.ULA:
            raise ValueError("a ULA cannot be stacked into a cylinder")
        return ArrayGeometry(
            layout=ArrayLayout.CYLINDRICAL,
            n=self.n,
            wavelength_m=self.wavelength_m,
            radius_m=self.radius_m,
            spacing_m=self.spacing_m,
            ring_half_count=ring_half_count,
        )


class FocusPoint(BaseModel):
    """Target location in spherical coordinates; distance FAR_FIELD marks a far-field point"""
    model_config = ConfigDict(frozen=True)

    distance_m: float
    azimuth_rad: float = 0.0
    elevation_rad: float = Field(default=math.pi / 2, ge=0.0, le=math.pi)

    @field_validator("distance_m")
    @classmethod
    def _positive_distance(cls, v: float) -> float:
        if math.isnan(v) or v <= 0:
            raise ValueError(f"distance must be > 0 or infinite, got {v}")
        return v

    @field_validator("azimuth_rad")
    @classmethod
    def _wrap_azimuth(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError(f"azimuth must be finite, got {v}")
        if 0.0 <= v < TWO_PI:
            return v
        return v % TWO_PI

    @classmethod
    def far_field(cls, azimuth_rad: float = 0.0, elevation_rad: float = math.pi / 2) -> "FocusPoint":
        return cls(distance_m=FAR_FIELD, azimuth_rad=azimuth_rad, elevation_rad=elevation_rad)

    @property
    def is_far_field(self) -> bool:
        return math.isinf(self.distance_m)


class BeamVector(BaseModel):
    """Unit-norm, constant-modulus complex weights over all array elements"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weights: np.ndarray

    @field_validator("weights")
    @classmethod
    def _unit_norm(cls, v: np.ndarray) -> np.ndarray:
        w = np.array(v, dtype=np.complex128)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-D vector")
        if abs(np.linalg.norm(w) - 1.0) > 1e-12:
            raise ValueError("weights must have unit Euclidean norm")
        if np.max(np.abs(np.abs(w) - 1.0 / math.sqrt(w.size))) > 1e-12:
            raise ValueError("weights must have constant modulus 1/sqrt(size)")
        w.setflags(write=False)
        return w

    def __len__(self) -> int:
        return self.weights.size

    def inner(self, other: "BeamVector") -> complex:
        """b^H c"""
        return complex(np.vdot(self.weights, other.weights))


class DistanceExpansion(BaseModel):
    """Exact element-to-point distance and its Taylor truncations"""
    model_config = ConfigDict(frozen=True)

    reference_m: float = Field(..., description="Distance r from the array origin")
    exact: float
    first_order: float
    second_order: float
    order: int = Field(default=2, ge=1, le=2)
    chi1: Optional[float] = None
    chi2: Optional[float] = None
    chi3: Optional[float] = None

    @property
    def residual(self) -> float:
        """xi: second-order distance minus r"""
        return self.second_order - self.reference_m

    @property
    def approximation(self) -> float:
        return self.first_order if self.order == 1 else self.second_order


class GainApprox(BaseModel):
    """A beamforming gain together with the arguments of the formula that produced it"""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0.0)
    formula: GainFormula
    beta: Optional[float] = None
    zeta: Optional[float] = None
    mu: Optional[float] = None


class ErdResult(BaseModel):
    """Effective Rayleigh distance for a loss threshold"""
    model_config = ConfigDict(frozen=True)

    distance_m: Optional[float] = Field(default=None, description="None when the loss stays below the threshold")
    threshold: float = Field(..., gt=0.0, lt=1.0)
    epsilon: Optional[float] = None
    azimuth_rad: Optional[float] = None
    outcome: ErdOutcome = ErdOutcome.CROSSING


class SamplingGrid(BaseModel):
    """Angle rays and distance rings of a concentric-ring codebook"""
    model_config = ConfigDict(frozen=True)

    angular_step_rad: float = Field(..., gt=0)
    angles_rad: List[float]
    ring_scale_m: float = Field(..., gt=0)
    distances_m: List[float] = Field(..., description="distances_m[0] is FAR_FIELD")
    correlation_threshold: float
    r_min_m: float = Field(..., gt=0)
    ring_spacing: RingSpacing = RingSpacing.THRESHOLD

    @property
    def s1_count(self) -> int:
        """S1, the largest angular index"""
        return len(self.angles_rad) - 1

    @property
    def s2_count(self) -> int:
        """S2, the largest ring index"""
        return len(self.distances_m) - 1

    @property
    def size(self) -> int:
        return len(self.angles_rad) * len(self.distances_m)


class CorrelationReport(BaseModel):
    """Outcome of a codebook correlation check"""
    mode: VerifyMode
    passed: bool
    threshold: float
    tolerance: float
    codeword_count: int
    checked_pairs: int
    max_correlation: float
    worst_pair: Optional[Tuple[int, int]] = None
    ring_correlation: Optional[float] = Field(default=None, description="Design correlation of consecutive rings")
    violations: List[Tuple[int, int, float]] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


class ChannelPath(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gain: complex
    point: FocusPoint


class ChannelRealization(BaseModel):
    """Multipath near-field channel h = sqrt(N/L) * sum_l alpha_l b(r_l, phi_l)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    paths: List[ChannelPath]
    vector: np.ndarray
    rng_seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_paths(self) -> "ChannelRealization":
        if not self.paths:
            raise ValueError("a channel needs at least one path")
        if self.vector.ndim != 1:
            raise ValueError("channel vector must be 1-D")
        return self

    @property
    def path_count(self) -> int:
        return len(self.paths)


class LinkBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    transmit_power_w: float = Field(default=1.0, gt=0)
    noise_power_w: float = Field(default=1.0, gt=0)

    @classmethod
    def from_snr_db(cls, snr_db: float, noise_power_w: float = 1.0) -> "LinkBudget":
        return cls(transmit_power_w=noise_power_w * 10.0 ** (snr_db / 10.0), noise_power_w=noise_power_w)


class RateRow(BaseModel):
    snr_db: float
    scheme: str
    mean_rate_bps_hz: float
    stderr: float
    n_seeds: int


# Experiment configuration file

class GeometrySection(BaseModel):
    """[geometry]; radius/aperture default to half-wavelength spacing"""
    model_config = ConfigDict(extra="forbid")

    layout: ArrayLayout = ArrayLayout.UCA
    n: int = Field(default=800, ge=1)
    radius_m: Optional[float] = Field(default=None, gt=0)
    aperture_m: Optional[float] = Field(default=None, gt=0)
    spacing_m: Optional[float] = Field(default=None, gt=0)
    ring_half_count: int = Field(default=0, ge=0)
    carrier_hz: Optional[float] = Field(default=None, gt=0)
    wavelength_m: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_wavelength_source(self) -> "GeometrySection":
        if self.carrier_hz is None and self.wavelength_m is None:
            raise ValueError("one of carrier_hz or wavelength_m is required")
        if self.carrier_hz is not None and self.wavelength_m is not None:
            raise ValueError("give carrier_hz or wavelength_m, not both")
        if self.radius_m is not None and self.aperture_m is not None:
            raise ValueError("give radius_m or aperture_m, not both")
        return self

    @property
    def wavelength(self) -> float:
        if self.wavelength_m is not None:
            return self.wavelength_m
        return SPEED_OF_LIGHT / self.carrier_hz

    def to_geometry(self) -> ArrayGeometry:
        lam = self.wavelength
        if self.layout == ArrayLayout.ULA:
            aperture = self.aperture_m
            if aperture is None and self.radius_m is not None:
                aperture = 2.0 * self.radius_m
            if aperture is None:
                aperture = ArrayGeometry.half_wavelength_ula(self.n, lam).aperture_m
            return ArrayGeometry(layout=self.layout, n=self.n, wavelength_m=lam, aperture_m=aperture)
        radius = self.radius_m
        if radius is None and self.aperture_m is not None:
            radius = self.aperture_m / 2.0
        if radius is None:
            radius = ArrayGeometry.half_wavelength_uca(self.n, lam).radius_m
        return ArrayGeometry(
            layout=self.layout,
            n=self.n,
            wavelength_m=lam,
            radius_m=radius,
            spacing_m=self.spacing_m,
            ring_half_count=self.ring_half_count,
        )


class AnalysisSection(BaseModel):
    """[analysis]"""
    model_config = ConfigDict(extra="forbid")

    erd_threshold: float = Field(default=0.05, gt=0.0, lt=1.0, description="delta")
    correlation_threshold: float = Field(default=0.5, ge=0.403, lt=1.0, description="Delta")
    r_min_m: float = Field(default=4.0, gt=0)
    eta_level: float = Field(default=0.5, gt=0.0, lt=1.0)
    focus_distance_m: float = Field(default=20.0, gt=0)
    focus_azimuth_rad: float = 0.0
    pair_distances_m: Tuple[float, float] = (20.0, 30.0)
    ula_elements: int = Field(default=256, ge=2)
    zero_count: int = Field(default=3, ge=1)
    polish_zeros: bool = True
    ring_half_counts: List[int] = Field(default_factory=lambda: [0, 2, 6, 10])
    verify_mode: VerifyMode = VerifyMode.NEIGHBORS
    ring_spacing: RingSpacing = RingSpacing.THRESHOLD
    include_phases: bool = True

    @field_validator("pair_distances_m")
    @classmethod
    def _positive_pair(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if min(v) <= 0:
            raise ValueError("pair distances must be positive")
        return v

    @field_validator("ring_half_counts")
    @classmethod
    def _non_negative_rings(cls, v: List[int]) -> List[int]:
        if not v or min(v) < 0:
            raise ValueError("ring_half_counts must be a non-empty list of M >= 0")
        return v


class SweepAxis(BaseModel):
    """Inclusive grid start, start+step, ... <= stop; empty when stop < start"""
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    step: float = Field(..., gt=0)

    def values(self) -> np.ndarray:
        if self.stop < self.start:
            return np.empty(0)
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


class SweepSection(BaseModel):
    """[sweep]"""
    model_config = ConfigDict(extra="forbid")

    angular: SweepAxis = SweepAxis(start=-0.05, stop=0.05, step=1e-4)
    angular_distances_m: List[float] = Field(default_factory=lambda: [10.0, 20.0, 50.0])
    distance: SweepAxis = SweepAxis(start=5.0, stop=200.0, step=0.5)
    radius: SweepAxis = SweepAxis(start=0.2, stop=2.0, step=0.002)
    erd_angles: SweepAxis = SweepAxis(start=0.0, stop=4 * math.pi / 9, step=math.pi / 18)
    cylinder: SweepAxis = SweepAxis(start=1.0, stop=100.0, step=0.05)


class ExperimentSection(BaseModel):
    """[experiment]"""
    model_config = ConfigDict(extra="forbid")

    paths: int = Field(default=3, ge=1)
    distance_range_m: Tuple[float, float] = (4.0, 50.0)
    snr_db: SweepAxis = SweepAxis(start=-10.0, stop=30.0, step=5.0)
    seeds: int = Field(default=1000, ge=1)
    seed: int = 0
    gain_model: GainModel = GainModel.COMPLEX_NORMAL
    noise_power_w: float = Field(default=1.0, gt=0)

    @field_validator("distance_range_m")
    @classmethod
    def _ordered_range(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        low, high = v
        if not 0 < low < high:
            raise ValueError("distance_range_m must satisfy 0 < low < high")
        return v


class OutputSection(BaseModel):
    """[output]"""
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV


class ExperimentConfig(BaseModel):
    """Whole experiment file; the defaults describe the 800-element 30 GHz reference UCA"""
    model_config = ConfigDict(extra="forbid")

    geometry: GeometrySection = GeometrySection(carrier_hz=30e9, radius_m=0.64, spacing_m=0.005)
    analysis: AnalysisSection = AnalysisSection()
    sweep: SweepSection = SweepSection()
    experiment: ExperimentSection = ExperimentSection()
    output: OutputSection = OutputSection()
