"""germlab: singularity invariants of corank-one polynomial map germs.

Exact multiple point spaces via divided differences, local standard bases,
image and double-point Milnor numbers, alternating Milnor numbers,
slice sequences and Whitney equisingularity verdicts for families.
"""

from .cache import BasisCache, cache_from_environment
from .context import ComputeContext
from .equising import (
    FamilyVerdict,
    SliceChain,
    certified_slice,
    mu_star_sequences,
    slice_chain,
    transverse_slice,
    whitney_verdict,
)
from .errors import GermLabError
from .germfile import (
    corpus_file_path,
    corpus_names,
    germ_from_dict,
    germ_to_dict,
    load_corpus_germ,
    load_germ_file,
)
from .invariants import (
    alternating_milnor_numbers,
    build_invariant_report,
    double_point_milnor,
    equivariant_euler_data,
    image_milnor_number,
    is_stable_by_strata,
    le_greuel_report,
    special_formula_checks,
    zero_stable_counts,
)
from .local import (
    CAP_EXCEEDED,
    INFINITE,
    CertifiedValue,
    IcisProfile,
    LocalIdeal,
    germ_multiplicity,
    icis_profile,
    local_quotient_dimension,
    milnor_hypersurface_direct,
    milnor_icis,
    standard_basis,
    tjurina_icis,
)
from .multipoint import (
    Branch,
    GermSpec,
    MultiplePointStratum,
    double_point_projection,
    fixed_point_stratum,
    multiple_point_ideal,
    verify_multiple_point_structure,
)
from .poly import Poly, format_polynomial, jacobian_minor_ideal, parse_polynomial, substitute
from .symrep import (
    ALTERNATING,
    HOOK,
    TRIVIAL,
    PartitionData,
    comparativan_comparison,
    hook_character,
    isotype_rank_points,
    marar_coefficient,
    partitions_of,
    top_row_ranks,
)

__version__ = "0.1.0"
