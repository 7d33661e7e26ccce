"""Verification toolkit for the three-dimensional stable matching problem
with cyclic preferences: instance and matching model with a brute-force
stability oracle, CNF encodings of the no-stable-matching search with
symmetry breaking, an embedded CDCL solver plus an external-solver adapter,
and reproducible verification campaigns."""

from .model import (CapacityError, Instance, Matching, ParseError, Triple,
                    candidate_triples, canonical_instances, canonicalize,
                    count_stable_matchings, enumerate_matchings,
                    extend_matching, is_blocking, is_stable,
                    mutual_top_triple, parse_instance, prefers,
                    random_instance, reduce_by_triple, relabel,
                    serialize_instance, stable_matchings)
from .cnf import (CnfFormula, DecodeError, DimacsError, FormulaStats, VarMap,
                  build_f, build_f_prime, decode_model, encode_amo_sequential,
                  encode_order_clauses, encode_stab_clauses,
                  encode_symmetry_units, encode_z_clauses,
                  evaluate_no_stable, instance_assumptions,
                  iter_formula_clauses, predict_sizes, read_dimacs,
                  read_varmap, stream_dimacs, write_dimacs, write_varmap)
from .solver import (SAT, UNKNOWN, UNSAT, ExternalSolverError, SolveResult,
                     SolveStats, solve, solve_external, verify_model)
from .campaigns import (CampaignReport, oracle_equivalence, remark1_check,
                        stats_report, verify_exhaustive)

__version__ = "0.1.0"
