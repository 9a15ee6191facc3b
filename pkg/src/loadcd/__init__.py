"""Local causal discovery of target relations, identifiability and optimal adjustment sets."""

from .citest import CachedTester, Dataset, DSepTester, FisherZTester, GSquareTester, make_tester
from .graph import Cpdag, Dag, cpdag_from_dag, d_separated, is_amenable_global, oset_from_cpdag
from .load import LoadResult, Relation, load, local_relate, mb_by_mb_plus
from .mbdiscovery import DiscoveryCache, grow_shrink_mb, mb_adjacent, mb_by_mb, pc_algorithm

__all__ = [
    "CachedTester", "Cpdag", "Dag", "Dataset", "DiscoveryCache", "DSepTester", "FisherZTester",
    "GSquareTester", "LoadResult", "Relation", "cpdag_from_dag", "d_separated", "grow_shrink_mb",
    "is_amenable_global", "load", "local_relate", "make_tester", "mb_adjacent", "mb_by_mb",
    "mb_by_mb_plus", "oset_from_cpdag", "pc_algorithm",
]
__version__ = "0.1.0"
