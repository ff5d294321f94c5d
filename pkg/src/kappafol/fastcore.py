"""Bitmask engine for propositional forcing over finite frames.

A frame is a reflexive-transitive order on nodes 0..n-1 (n <= 64),
stored as one "future" mask per node. Monotone valuations are upward
closed masks. Propositional formulas compile to a postfix program so the
refutation search does no tree walking in its inner loop.

The compiled twin of this module (`_speedups`, built from Cython when
available) implements the same two entry points over identical program
encodings; `find_refutation` and `check_entailed` dispatch to it at
import. `KAPPAFOL_PURE=1` in the environment forces the pure version.
"""

from __future__ import annotations

import itertools
import os

from .syntax import And, Eq, Imp, Or, Rel

OP_ATOM = 0
OP_AND = 1
OP_OR = 2
OP_IMP = 3

MAX_NODES = 64


class NotPropositional(ValueError):
    pass


class Frame:
    """Finite preorder; up[i] is the bitmask of nodes reachable from i
    (always including i)."""

    def __init__(self, up):
        up = list(up)
        n = len(up)
        if n == 0 or n > MAX_NODES:
            raise ValueError("frame must have between 1 and %d nodes" % MAX_NODES)
        full = (1 << n) - 1
        for i, m in enumerate(up):
            if not (0 <= m <= full) or not (m >> i) & 1:
                raise ValueError("future mask of node %d must include it" % i)
        for i in range(n):
            acc = up[i]
            while True:
                wider = acc
                rest = acc
                while rest:
                    j = (rest & -rest).bit_length() - 1
                    rest &= rest - 1
                    wider |= up[j]
                if wider == acc:
                    break
                acc = wider
            if acc != up[i]:
                raise ValueError("future masks of node %d are not transitive" % i)
        self.up = tuple(up)
        self.size = n
        self.full = full

    @classmethod
    def from_children(cls, children):
        """Build from a successor relation (e.g. tree child lists)."""
        n = len(children)
        up = [1 << i for i in range(n)]
        changed = True
        while changed:
            changed = False
            for i in range(n):
                m = up[i]
                for j in children[i]:
                    m |= up[j]
                if m != up[i]:
                    up[i] = m
                    changed = True
        return cls(up)

    def upsets(self):
        """All upward closed masks."""
        out = []
        for m in range(self.full + 1):
            rest = m
            good = True
            while rest:
                i = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                if self.up[i] & ~m:
                    good = False
                    break
            if good:
                out.append(m)
        return out


def compile_formula(phi, atom_index):
    """Flatten a propositional formula to a postfix program.

    `atom_index` maps nullary relation names to slots; unseen atoms are
    assigned fresh slots (the dict is extended in place)."""
    prog = []

    def walk(f):
        if isinstance(f, Rel):
            if f.args:
                raise NotPropositional("relation %s takes arguments" % f.name)
            if f.name not in atom_index:
                atom_index[f.name] = len(atom_index)
            prog.append((OP_ATOM, atom_index[f.name]))
        elif isinstance(f, And):
            for p in f.parts:
                walk(p)
            prog.append((OP_AND, len(f.parts)))
        elif isinstance(f, Or):
            for p in f.parts:
                walk(p)
            prog.append((OP_OR, len(f.parts)))
        elif isinstance(f, Imp):
            walk(f.lhs)
            walk(f.rhs)
            prog.append((OP_IMP, 0))
        elif isinstance(f, Eq):
            raise NotPropositional("equality is not propositional")
        else:
            raise NotPropositional("quantifier in a propositional formula")

    walk(phi)
    return tuple(prog)


def eval_program(prog, up, full, atoms):
    """Mask of nodes forcing the compiled formula under the valuation
    `atoms` (one upward closed mask per slot)."""
    n = len(up)
    stack = []
    for op, arg in prog:
        if op == OP_ATOM:
            stack.append(atoms[arg])
        elif op == OP_AND:
            v = full
            for _ in range(arg):
                v &= stack.pop()
            stack.append(v)
        elif op == OP_OR:
            v = 0
            for _ in range(arg):
                v |= stack.pop()
            stack.append(v)
        else:
            b = stack.pop()
            a = stack.pop()
            nota = ~a
            m = 0
            for i in range(n):
                if up[i] & a & ~b == 0:
                    m |= 1 << i
            stack.append(m)
    return stack[0]


def _find_refutation_pure(up, full, lhs_prog, rhs_prog, n_atoms, upset_list):
    for combo in itertools.product(upset_list, repeat=n_atoms):
        bad = eval_program(lhs_prog, up, full, combo) & ~eval_program(rhs_prog, up, full, combo)
        if bad:
            return combo, (bad & -bad).bit_length() - 1
    return None


_impl = None
if not os.environ.get("KAPPAFOL_PURE"):
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = None

HAVE_COMPILED = _impl is not None


def find_refutation(frame, lhs_prog, rhs_prog, n_atoms, pure=False):
    """Search all monotone valuations for a node forcing lhs but not rhs.

    Returns (valuation masks, node index) or None."""
    upset_list = frame.upsets()
    if _impl is not None and not pure:
        got = _impl.find_refutation(list(frame.up), frame.full, list(lhs_prog),
                                    list(rhs_prog), n_atoms, upset_list)
        if got is None:
            return None
        return tuple(got[0]), got[1]
    return _find_refutation_pure(frame.up, frame.full, lhs_prog, rhs_prog, n_atoms, upset_list)


def check_entailed(frame, lhs_prog, rhs_prog, n_atoms, pure=False):
    """True when every monotone valuation forces rhs wherever it forces lhs."""
    return find_refutation(frame, lhs_prog, rhs_prog, n_atoms, pure=pure) is None
