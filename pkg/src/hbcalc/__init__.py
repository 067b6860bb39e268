"""
hbcalc: numerical calculus for de Branges-Rovnyak spaces H(b), b non-extreme.

Modules
-------
circle
    Grids, Fourier data, Hardy-space series, Cauchy transforms, outer functions.
core
    Pythagorean pairs, the ``(f, f_plus, g)`` lifting, kernels, Clark data, the shift.
lab
    Completeness and cyclicity experiments, classifiers and reports.
verify
    Closed-form checks replayed on named presets.
cli
    Configuration-driven command line runner.
"""

from .circle import (
    BoundaryFunction,
    DistributionProfile,
    GridSpec,
    HardyFunction,
    analyze,
    cauchy_boundary_identity_residual,
    cauchy_transform,
    conjugate_function,
    distribution_profile,
    outer_defect,
    outer_from_modulus,
    riesz_project,
    synthesize,
    toeplitz_apply,
)
from .core import (
    ClarkData,
    HbElement,
    KernelCombination,
    PythagoreanPair,
    clark,
    clark_isometry,
    eval_functionals,
    finite_section_shift_norm,
    hb_inner,
    hb_norm,
    kernel,
    lift,
    mate,
    mate_rational,
    product_kernel_lift,
    shift_apply,
    shift_norm,
)
from .errors import HbError
from .lab import (
    CompletenessReport,
    LambdaSequence,
    a_density_experiment,
    blaschke_partial_sums,
    classify_one_minus_cb,
    completeness_experiment,
    cyclicity_residual,
    gr_approximant,
    gram,
    hypothesis_bf_bounded,
    shift_recurrence_check,
    span_residual,
)

__version__ = "0.1.0"
