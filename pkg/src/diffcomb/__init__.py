"""Dirac-comb diffraction workbench.

Generate weighted point sets with exact internal coordinates, estimate
finite-volume autocorrelations, scan diffraction intensities, and run
comparison experiments (homometry, thinning, intensity scaling).
"""

__version__ = "0.1.0"

from .golden import TAU, TAU_STAR, GoldenInt
from .lattice import AveragingRegion, Lattice, LatticeError, dual_lattice, fold_vector, region_points
from .pointset import (
    AlgebraError,
    FloatAlgebra,
    GoldenAlgebra,
    LatticeAlgebra,
    WeightedPointSet,
    load_pointset,
    save_pointset,
)
from .generators import (
    FIBONACCI,
    PERIOD_DOUBLING,
    THUE_MORSE,
    CutProjectScheme,
    SubstitutionRule,
    bernoulli_lattice_gas,
    bernoulli_thin,
    coin_flip_comb,
    build_pointset,
    complement_in_lattice,
    fibonacci_model_set,
    lattice_comb,
    motif_comb,
    rudin_shapiro_comb,
    rudin_shapiro_weights,
    substitution_sequence,
    visible_points,
)
from .autocorr import (
    AutocorrelationEstimate,
    almost_period_scan,
    autocorrelation,
    compare_autocorrelations,
    convergence_table,
    save_autocorrelation,
)
from .diffraction import (
    BraggPeakList,
    DiffractionEstimate,
    FoldedDiffraction,
    bragg_amplitude,
    crystallographic_prediction,
    detect_peaks,
    fold_diffraction,
    intensity_scan,
    save_diffraction,
    save_folded,
    save_peaks,
    uniform_grid,
    wiener_khinchin,
)
from .analysis import (
    HomometryReport,
    ScalingReport,
    ThinningReport,
    block_entropy,
    block_entropy_rate,
    homometry_report,
    scaling_exponent,
    thinning_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
