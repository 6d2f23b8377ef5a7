"""Carathéodory measures, Federer densities and area-formula checks on finite metric spaces."""

from .caratheodory import CoverSolution, delta_probes, hausdorff_measure, phi, psi, spherical_measure
from .core import (
    AtomicMeasure,
    Gauge,
    GaugedFamily,
    MetricInstance,
    MetricSpace,
    NotFineError,
    OutsideDomainError,
    ResolutionTooCoarseError,
    closed_balls,
    explicit_gauge,
    hausdorff_gauge,
    open_balls,
    spherical_gauge,
)
from .density import (
    check_c_eta,
    enlargement,
    federer_density,
    filter_family,
    quotient_value,
    search_c_eta,
)
from .extreal import INF, InexactPowerError
from .io import load_instance, save_instance
from .spaces import GeneratorSpec, generate
from .theorems import (
    AreaFormula,
    check_absolute_continuity,
    hunt,
    integrate_against_psi,
    verify_area_formula,
    verify_lemma_major,
    verify_lemma_minor,
)

__version__ = "0.1.0"
