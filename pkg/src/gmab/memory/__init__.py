"""Memory control scheme: tree-backed store plus a naive reference."""
from .avl import AVLTree
from .naive import NaiveMemory
from .rbtree import RedBlackTree
from .store import MemoryStore, SolutionRecord, digit_counts, encode, select_with_ties

__all__ = [
    "AVLTree",
    "MemoryStore",
    "NaiveMemory",
    "RedBlackTree",
    "SolutionRecord",
    "digit_counts",
    "encode",
    "select_with_ties",
]
