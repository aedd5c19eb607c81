"""Kaleidoscopical configurations in finite G-spaces.

Decide, construct and certify subsets ``A`` of a finite transitive G-space
admitting a coloring that is bijective on every translate ``gA``.
"""

from kaleido.search import SearchBudgetExceeded
from kaleido.group_core import (
    AbelianGroupSpec,
    GSpace,
    Partition,
    cayley_space,
    congruences,
    group_order,
    parse_group_spec,
    set_orbit,
)
from kaleido.transversal import (
    Coloring,
    find_kaleidoscopic_coloring,
    is_transversal,
    transversal_partition,
    verify_kaleidoscopic,
)
from kaleido.factorization import (
    FactorizationCertificate,
    find_complement,
    hajos_brute,
    hajos_check,
    hajos_classify,
    is_doubly_complemented,
    is_factorization,
    is_periodic,
)
from kaleido.splitting import (
    SplittingChain,
    generate_splittable,
    is_splittable,
    relative_position,
)
from kaleido.metric import (
    UltrametricSpec,
    epsilon_chain,
    rigidity_check,
    ultrametric_space,
    verify_ultrametric_splittability,
)
from kaleido.quasigroup import (
    LatinSquare,
    PartialRectangle,
    complete_rectangle,
    order9_rectangle,
    paper_example9,
    quasi_classify_subset,
    quasi_kaleidoscopic,
    ryser_completable,
)

__version__ = "0.1.0"
