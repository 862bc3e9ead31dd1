"""Insert-only AVL tree mapping integer keys to values."""
from __future__ import annotations

from typing import Iterator, Optional, Tuple


class _Node:
    __slots__ = ("key", "value", "left", "right", "height")

    def __init__(self, key, value):
        self.key = key
        self.value = value
        self.left: Optional[_Node] = None
        self.right: Optional[_Node] = None
        self.height = 1


def _h(node: Optional[_Node]) -> int:
    return node.height if node is not None else 0


def _update(node: _Node) -> None:
    node.height = 1 + max(_h(node.left), _h(node.right))


def _rotate_right(y: _Node) -> _Node:
    x = y.left
    y.left = x.right
    x.right = y
    _update(y)
    _update(x)
    return x


def _rotate_left(x: _Node) -> _Node:
    y = x.right
    x.right = y.left
    y.left = x
    _update(x)
    _update(y)
    return y


def _rebalance(node: _Node) -> _Node:
    _update(node)
    balance = _h(node.left) - _h(node.right)
    if balance > 1:
        if _h(node.left.left) < _h(node.left.right):
            node.left = _rotate_left(node.left)
        return _rotate_right(node)
    if balance < -1:
        if _h(node.right.right) < _h(node.right.left):
            node.right = _rotate_right(node.right)
        return _rotate_left(node)
    return node


class AVLTree:
    """Lookup tree. Keys are never deleted (memory is never forgotten)."""

    def __init__(self):
        self.root: Optional[_Node] = None
        self._size = 0

    def __len__(self):
        return self._size

    def get(self, key, default=None):
        node = self.root
        while node is not None:
            if key < node.key:
                node = node.left
            elif key > node.key:
                node = node.right
            else:
                return node.value
        return default

    def __contains__(self, key):
        return self.get(key, _MISSING) is not _MISSING

    def insert(self, key, value) -> None:
        """Insert ``key``; raises KeyError if it is already present."""
        self.root = self._insert(self.root, key, value)
        self._size += 1

    def _insert(self, node, key, value):
        if node is None:
            return _Node(key, value)
        if key < node.key:
            node.left = self._insert(node.left, key, value)
        elif key > node.key:
            node.right = self._insert(node.right, key, value)
        else:
            raise KeyError(key)
        return _rebalance(node)

    def items(self) -> Iterator[Tuple[object, object]]:
        stack = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node.key, node.value
            node = node.right

    @property
    def height(self) -> int:
        return _h(self.root)

    def audit(self) -> None:
        """Raise AssertionError unless ordering, heights and AVL balance hold."""
        count = _audit(self.root, None, None)
        assert count == self._size, f"size {self._size} but {count} nodes"


def _audit(node, lo, hi) -> int:
    if node is None:
        return 0
    assert lo is None or node.key > lo, "BST order violated"
    assert hi is None or node.key < hi, "BST order violated"
    n = _audit(node.left, lo, node.key) + _audit(node.right, node.key, hi) + 1
    assert node.height == 1 + max(_h(node.left), _h(node.right)), "stale height"
    assert abs(_h(node.left) - _h(node.right)) <= 1, "AVL balance violated"
    return n


_MISSING = object()
