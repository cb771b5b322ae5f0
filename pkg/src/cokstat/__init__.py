"""Cokernel statistics of balanced random integral matrices."""
from .cohen_lenstra import (OVERFLOW, CLParams, CLTable, cl_moment_check, cl_probability, cl_rank_probability,
                            cl_tensor_table, enumerate_cl_support, sample_cl_group)
from .groups import (CapacityError, GroupType, SubgroupLattice, aut_order, build_lattice, enumerate_groups,
                     group_order, hom_count, sur_count)
from .matrices import (EntryDistribution, MatrixModA, SnfDiagonal, UnbalancedError, cokernel_group,
                       parse_distribution, rank_mod_p, sample_matrix, snf_mod_prime_power)
from .moments import MomentTable, SolvedDistribution, moments_from_distribution, solve
from .residues import Modulus, NonUnitError, Residue, crt_project, factorize, unit_inverse, valuation
from .rng import RandomStream

__version__ = "0.1.0"
