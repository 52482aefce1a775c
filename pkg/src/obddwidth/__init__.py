"""OBDD size bounds for CNFs of bounded treewidth: instances, compiler, widths."""
from .cnf import Cnf, TruthTable, evaluate, parse_dimacs, emit_dimacs, restrict, truth_table
from .graphs import Graph, clique_tree, cnf_of_graph, complete_binary_tree, path_graph
from .obdd import Obdd, compile_cnf, count_subfunctions, min_obdd_size_exact

__all__ = [
    "Cnf", "TruthTable", "evaluate", "parse_dimacs", "emit_dimacs", "restrict",
    "truth_table", "Graph", "clique_tree", "cnf_of_graph", "complete_binary_tree",
    "path_graph", "Obdd", "compile_cnf", "count_subfunctions", "min_obdd_size_exact",
]
