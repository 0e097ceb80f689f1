"""Casimir energy of a conformal massless scalar in reflection-generated cavities.

Two geometries: the wedge bounded by the planes x1=x3, x2=0, x1=x2, and
the pyramid obtained by closing that wedge with the plane x3=a.  Green
functions are built as signed image sums over the order-48 signed
permutation group (plus a translation lattice for the pyramid); total
energies come from zeta-regularized lattice sums.
"""

from .symmetry import (
    GroupElement,
    SymmetryGroup,
    generate_group,
    octahedral_table,
    tetrahedral_subgroup,
    full_group,
    wedge_reflections,
    coordinate_reflections,
    orbit,
    canonicalize,
    in_fundamental_domain,
    in_open_domain,
    affine_images,
    domain_edge_angles,
)
from .green import (
    SpacetimePoint,
    KernelSpec,
    minkowski_green,
    wedge_kernel,
    pyramid_kernel,
    stress_energy_numeric,
)
from .density import (
    t_factor,
    closed_form_factor,
    energy_density,
    closed_form_density,
    grouped_density_variant,
    grouping_report,
    wedge_reference,
)
from .zeta import (
    QuadraticForm,
    RegularizedValue,
    epstein_zeta,
    restricted_octant_sum,
    restricted_quadrant_sum,
    component_energies,
    pyramid_energy_published,
    boundary_union_sum,
    pyramid_energy_oracle,
)
from .modes import (
    ModeIndex,
    enumerate_modes,
    wavefunction,
    mode_normalization,
    boundary_residual,
    mode_overlap,
    mode_sum_identity,
    pyramid_quadrature,
)

__version__ = "0.1.0"
