try:
    from ._version import version as __version__
except ImportError:
    __version__ = "unknown"

from .rational_circle import QZElem, MultFunc, qz_make, reflect, add, norm, is_complete, pushforward
from .cyclotomic_polys import IntPoly, q_poly, factor_cyclotomic
from .exact_linalg import CycloMatrix, Subspace, jordan_profile, jordan_chevalley, wedge_matrix
from .jordan_calc import JordanSpec, jord, materialize, wedge_max_ranks
from .weight_filt import WeightFiltration, weight_filtration, amplitude
from .abvar import (
    AbelianType, validate, ranks, conductor, artin_conductor,
    base_change, product, dual, isogeny_key,
    h1_monodromy, h1_charpoly, hg_analysis, mhs_summary, hg_weight_profile, report
)
from .verify import verify_harness
from .exceptions import TameMonodromyError, RejectedInput, ParseError, InadmissibleError

__all__ = [
    'QZElem',
    'MultFunc',
    'qz_make',
    'reflect',
    'add',
    'norm',
    'is_complete',
    'pushforward',
    'IntPoly',
    'q_poly',
    'factor_cyclotomic',
    'CycloMatrix',
    'Subspace',
    'jordan_profile',
    'jordan_chevalley',
    'wedge_matrix',
    'JordanSpec',
    'jord',
    'materialize',
    'wedge_max_ranks',
    'WeightFiltration',
    'weight_filtration',
    'amplitude',
    'AbelianType',
    'validate',
    'ranks',
    'conductor',
    'artin_conductor',
    'base_change',
    'product',
    'dual',
    'isogeny_key',
    'h1_monodromy',
    'h1_charpoly',
    'hg_analysis',
    'mhs_summary',
    'hg_weight_profile',
    'report',
    'verify_harness',
    'TameMonodromyError',
    'RejectedInput',
    'ParseError',
    'InadmissibleError',
]
