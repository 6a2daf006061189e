"""Cannon's algorithms: length-reducing rewriting systems for group word problems."""
from .rewrite import (INCREMENTAL, NON_INCREMENTAL, ReductionHistory, RewriteError,
                      RewritingSystem, Rule, RuleFamily, Step, accepts, dehn_system, find_redex,
                      format_word, free_group_system, load, loads, naive_reduce_traced, parse_word,
                      reduce, reduce_traced, rule, save, dumps, surface_octagon_system,
                      validate_system)
from .constructions import (GeneratorTranslation, change_generators, compress, compress_strict,
                            finite_index_extension, free_product, rename_letters,
                            restrict_to_subgroup, to_non_incremental, write_out)
from .expanding import heisenberg_system, z_decimal_system
from .machines import DehnMachine, mimic, run_machine

__all__ = ["INCREMENTAL", "NON_INCREMENTAL", "ReductionHistory", "RewriteError",
           "RewritingSystem", "Rule", "RuleFamily", "Step", "accepts", "dehn_system", "find_redex",
           "format_word", "free_group_system", "load", "loads", "naive_reduce_traced", "parse_word",
           "reduce", "reduce_traced", "rule", "save", "dumps", "surface_octagon_system",
           "validate_system", "GeneratorTranslation", "change_generators", "compress",
           "compress_strict", "finite_index_extension", "free_product", "rename_letters",
           "restrict_to_subgroup", "to_non_incremental", "write_out", "heisenberg_system",
           "z_decimal_system", "DehnMachine", "mimic", "run_machine"]
