"""Red-black tree with parent links (CLRS layout, shared NIL sentinel).

Callers keep the node returned by ``insert`` so that a specific entry can be
deleted later without a search.
"""
from __future__ import annotations

from typing import Iterator, List

RED = True
BLACK = False


class RBNode:
    __slots__ = ("key", "value", "left", "right", "parent", "color")

    def __init__(self, key, value, nil):
        self.key = key
        self.value = value
        self.left = nil
        self.right = nil
        self.parent = nil
        self.color = RED

    def __repr__(self):
        return f"RBNode({self.key!r})"


class RedBlackTree:
    def __init__(self):
        nil = RBNode(None, None, None)
        nil.left = nil.right = nil.parent = nil
        nil.color = BLACK
        self.nil = nil
        self.root = nil
        self._size = 0

    def __len__(self):
        return self._size

    def __bool__(self):
        return self._size > 0

    # rotations -------------------------------------------------------------

    def _left_rotate(self, x):
        y = x.right
        x.right = y.left
        if y.left is not self.nil:
            y.left.parent = x
        y.parent = x.parent
        if x.parent is self.nil:
            self.root = y
        elif x is x.parent.left:
            x.parent.left = y
        else:
            x.parent.right = y
        y.left = x
        x.parent = y

    def _right_rotate(self, x):
        y = x.left
        x.left = y.right
        if y.right is not self.nil:
            y.right.parent = x
        y.parent = x.parent
        if x.parent is self.nil:
            self.root = y
        elif x is x.parent.right:
            x.parent.right = y
        else:
            x.parent.left = y
        y.right = x
        x.parent = y

    # insertion -------------------------------------------------------------

    def insert(self, key, value=None) -> RBNode:
        nil = self.nil
        z = RBNode(key, value, nil)
        y = nil
        x = self.root
        while x is not nil:
            y = x
            x = x.left if key < x.key else x.right
        z.parent = y
        if y is nil:
            self.root = z
        elif key < y.key:
            y.left = z
        else:
            y.right = z
        self._insert_fixup(z)
        self._size += 1
        return z

    def _insert_fixup(self, z):
        while z.parent.color is RED:
            gp = z.parent.parent
            if z.parent is gp.left:
                y = gp.right
                if y.color is RED:
                    z.parent.color = BLACK
                    y.color = BLACK
                    gp.color = RED
                    z = gp
                else:
                    if z is z.parent.right:
                        z = z.parent
                        self._left_rotate(z)
                    z.parent.color = BLACK
                    z.parent.parent.color = RED
                    self._right_rotate(z.parent.parent)
            else:
                y = gp.left
                if y.color is RED:
                    z.parent.color = BLACK
                    y.color = BLACK
                    gp.color = RED
                    z = gp
                else:
                    if z is z.parent.left:
                        z = z.parent
                        self._right_rotate(z)
                    z.parent.color = BLACK
                    z.parent.parent.color = RED
                    self._left_rotate(z.parent.parent)
        self.root.color = BLACK

    # deletion --------------------------------------------------------------

    def _transplant(self, u, v):
        if u.parent is self.nil:
            self.root = v
        elif u is u.parent.left:
            u.parent.left = v
        else:
            u.parent.right = v
        v.parent = u.parent

    def delete(self, z: RBNode) -> None:
        nil = self.nil
        y = z
        y_color = y.color
        if z.left is nil:
            x = z.right
            self._transplant(z, z.right)
        elif z.right is nil:
            x = z.left
            self._transplant(z, z.left)
        else:
            y = self._minimum(z.right)
            y_color = y.color
            x = y.right
            if y.parent is z:
                x.parent = y
            else:
                self._transplant(y, y.right)
                y.right = z.right
                y.right.parent = y
            self._transplant(z, y)
            y.left = z.left
            y.left.parent = y
            y.color = z.color
        if y_color is BLACK:
            self._delete_fixup(x)
        self._size -= 1
        z.left = z.right = z.parent = None

    def _delete_fixup(self, x):
        while x is not self.root and x.color is BLACK:
            if x is x.parent.left:
                w = x.parent.right
                if w.color is RED:
                    w.color = BLACK
                    x.parent.color = RED
                    self._left_rotate(x.parent)
                    w = x.parent.right
                if w.left.color is BLACK and w.right.color is BLACK:
                    w.color = RED
                    x = x.parent
                else:
                    if w.right.color is BLACK:
                        w.left.color = BLACK
                        w.color = RED
                        self._right_rotate(w)
                        w = x.parent.right
                    w.color = x.parent.color
                    x.parent.color = BLACK
                    w.right.color = BLACK
                    self._left_rotate(x.parent)
                    x = self.root
            else:
                w = x.parent.left
                if w.color is RED:
                    w.color = BLACK
                    x.parent.color = RED
                    self._right_rotate(x.parent)
                    w = x.parent.left
                if w.right.color is BLACK and w.left.color is BLACK:
                    w.color = RED
                    x = x.parent
                else:
                    if w.left.color is BLACK:
                        w.right.color = BLACK
                        w.color = RED
                        self._left_rotate(w)
                        w = x.parent.left
                    w.color = x.parent.color
                    x.parent.color = BLACK
                    w.left.color = BLACK
                    self._right_rotate(x.parent)
                    x = self.root
        x.color = BLACK

    # navigation ------------------------------------------------------------

    def _minimum(self, x):
        while x.left is not self.nil:
            x = x.left
        return x

    def first(self):
        """Node with the smallest key, or None when empty."""
        if self.root is self.nil:
            return None
        return self._minimum(self.root)

    def successor(self, x):
        """In-order successor of ``x``, or None."""
        nil = self.nil
        if x.right is not nil:
            return self._minimum(x.right)
        y = x.parent
        while y is not nil and x is y.right:
            x = y
            y = y.parent
        return None if y is nil else y

    def nodes(self) -> Iterator[RBNode]:
        node = self.first()
        while node is not None:
            yield node
            node = self.successor(node)

    def keys(self) -> List:
        return [n.key for n in self.nodes()]

    # invariants ------------------------------------------------------------

    def audit(self) -> None:
        """Raise AssertionError unless every red-black property holds."""
        nil = self.nil
        assert nil.color is BLACK, "sentinel must be black"
        assert self.root is nil or self.root.color is BLACK, "root must be black"
        assert self.root is nil or self.root.parent is nil, "root has a parent"
        count = [0]

        def walk(node, lo, hi):
            if node is nil:
                return 1
            count[0] += 1
            assert lo is None or node.key > lo, "BST order violated"
            assert hi is None or node.key < hi, "BST order violated"
            for child in (node.left, node.right):
                if child is not nil:
                    assert child.parent is node, "broken parent link"
            if node.color is RED:
                assert node.left.color is BLACK and node.right.color is BLACK, "red node with red child"
            lh = walk(node.left, lo, node.key)
            rh = walk(node.right, node.key, hi)
            assert lh == rh, "unequal black heights"
            return lh + (node.color is BLACK)

        walk(self.root, None, None)
        assert count[0] == self._size, f"size {self._size} but {count[0]} nodes"
