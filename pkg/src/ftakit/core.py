"""Ranked alphabets, trees, and nondeterministic bottom-up tree automata.

An automaton runs bottom-up: a nullary symbol evaluates to the set of states
its transitions can produce, and an inner node combines the state sets of its
children through the lifted transition map (``sigma_bar``).  A tree is
accepted when its evaluation meets a final state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import ConfigError, InputError

# Enumerating all trees up to height h explodes doubly exponentially; the
# default guard keeps accidental calls from eating the machine.
MAX_ENUM_HEIGHT = 5

# State identifiers index bit vectors, so absurdly large ids are rejected.
MAX_STATE_ID = 1 << 20


@dataclass(frozen=True)
class RankedAlphabet:
    """A finite symbol set where every symbol carries a fixed arity (rank)."""

    symbols: frozenset[tuple[str, int]]
    _ranks: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        symbols = frozenset(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        ranks: dict[str, int] = {}
        for name, rank in sorted(symbols):
            if not name:
                raise InputError("symbol names must be nonempty")
            if not isinstance(rank, int) or rank < 0:
                raise InputError(f"rank of {name!r} must be a nonnegative integer")
            if name in ranks:
                raise InputError(f"duplicate symbol name {name!r}")
            ranks[name] = rank
        if not any(rank == 0 for rank in ranks.values()):
            raise InputError("alphabet needs at least one nullary symbol")
        object.__setattr__(self, "_ranks", ranks)

    @classmethod
    def of(cls, **ranks: int) -> "RankedAlphabet":
        """Build an alphabet from keyword arguments, e.g. ``of(alpha=0, sigma=2)``."""
        return cls(frozenset(ranks.items()))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "RankedAlphabet":
        return cls(frozenset(pairs))

    def rank(self, name: str) -> int:
        try:
            return self._ranks[name]
        except KeyError:
            raise InputError(f"unknown symbol {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._ranks

    def names(self) -> list[str]:
        """All symbol names, sorted."""
        return sorted(self._ranks)

    def by_rank(self, rank: int) -> list[str]:
        """Names of all symbols of the given rank, sorted."""
        return sorted(name for name, r in self._ranks.items() if r == rank)

    @property
    def nullary(self) -> list[str]:
        return self.by_rank(0)

    @property
    def binary(self) -> list[str]:
        return self.by_rank(2)

    @property
    def is_binary(self) -> bool:
        """True when every rank is 0 or 2."""
        return all(r in (0, 2) for r in self._ranks.values())


@dataclass(frozen=True)
class Tree:
    """A node-labeled ordered tree; leaves may instead hold a state identifier.

    Exactly one of ``label`` (a symbol name) and ``state`` is set.  State
    leaves never have children.  Symbol arity is not known to the tree itself
    and is checked against an alphabet when the tree is evaluated.
    """

    label: str | None
    children: tuple["Tree", ...] = ()
    state: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if (self.label is None) == (self.state is None):
            raise InputError("a tree node carries either a symbol or a state")
        if self.state is not None and self.children:
            raise InputError("state leaves have no children")

    @classmethod
    def of(cls, label: str, *children: "Tree") -> "Tree":
        return cls(label, tuple(children))

    @classmethod
    def state_leaf(cls, state: int) -> "Tree":
        return cls(None, (), state)

    @property
    def is_state_leaf(self) -> bool:
        return self.state is not None

    @property
    def height(self) -> int:
        if not self.children:
            return 0
        return 1 + max(child.height for child in self.children)

    def has_state_leaves(self) -> bool:
        if self.is_state_leaf:
            return True
        return any(child.has_state_leaves() for child in self.children)

    def sort_key(self):
        """Structural ordering key: state leaves first, then by symbol name."""
        if self.is_state_leaf:
            return (0, self.state, ())
        return (1, self.label, tuple(c.sort_key() for c in self.children))

    def __str__(self) -> str:
        if self.is_state_leaf:
            return f"<{self.state}>"
        if not self.children:
            return self.label
        return f"{self.label}({','.join(str(c) for c in self.children)})"


class Transition(NamedTuple):
    """One rewrite rule ``symbol(args...) -> target``."""

    symbol: str
    args: tuple[int, ...]
    target: int


@dataclass(frozen=True)
class StateSet:
    """A set of state identifiers backed by a bit vector (bit q = state q)."""

    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise InputError("state sets cannot hold negative identifiers")

    @classmethod
    def of(cls, *states: int) -> "StateSet":
        return cls.from_iter(states)

    @classmethod
    def from_iter(cls, states: Iterable[int]) -> "StateSet":
        bits = 0
        for q in states:
            if q < 0 or q > MAX_STATE_ID:
                raise InputError(f"state identifier {q} out of range")
            bits |= 1 << q
        return cls(bits)

    def __contains__(self, q: int) -> bool:
        return q >= 0 and (self.bits >> q) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        q = 0
        while bits:
            if bits & 1:
                yield q
            bits >>= 1
            q += 1

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __or__(self, other: "StateSet") -> "StateSet":
        return StateSet(self.bits | other.bits)

    def __and__(self, other: "StateSet") -> "StateSet":
        return StateSet(self.bits & other.bits)

    def __sub__(self, other: "StateSet") -> "StateSet":
        return StateSet(self.bits & ~other.bits)

    def issubset(self, other: "StateSet") -> bool:
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "StateSet") -> bool:
        return self.bits & other.bits == 0

    def __repr__(self) -> str:
        return "StateSet{" + ",".join(str(q) for q in self) + "}"


@dataclass(frozen=True)
class Fta:
    """A nondeterministic bottom-up tree automaton (states, alphabet, finals, rules).

    States are small nonnegative integers; the transition set never contains
    duplicates.  Instances are immutable and safe to share between workers.
    """

    states: frozenset[int]
    alphabet: RankedAlphabet
    finals: frozenset[int]
    transitions: frozenset[Transition]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(
            self, "transitions", frozenset(Transition(*t) for t in self.transitions)
        )
        for q in self.states:
            if not isinstance(q, int) or q < 0 or q > MAX_STATE_ID:
                raise InputError(f"state identifier {q!r} out of range")
        if not self.finals <= self.states:
            raise InputError("final states must be a subset of the states")
        for t in self.transitions:
            rank = self.alphabet.rank(t.symbol)
            if len(t.args) != rank:
                raise InputError(
                    f"transition {t.symbol}{t.args} has {len(t.args)} arguments, "
                    f"rank is {rank}"
                )
            for q in (*t.args, t.target):
                if q not in self.states:
                    raise InputError(f"transition mentions unknown state {q}")

    @property
    def n(self) -> int:
        return len(self.states)

    def final_set(self) -> StateSet:
        return StateSet.from_iter(self.finals)

    def transitions_by_symbol(self) -> dict[str, list[Transition]]:
        index: dict[str, list[Transition]] = {}
        for t in sorted(self.transitions):
            index.setdefault(t.symbol, []).append(t)
        return index


def sigma_bar(fta: Fta, symbol: str, args: Sequence[StateSet]) -> StateSet:
    """Lift the transition rules of ``symbol`` to sets of states.

    Returns every state some rule can produce when each argument position is
    filled with any member of the corresponding argument set.
    """
    rank = fta.alphabet.rank(symbol)
    if len(args) != rank:
        raise InputError(f"{symbol!r} has rank {rank}, got {len(args)} arguments")
    bits = 0
    for t in fta.transitions:
        if t.symbol != symbol:
            continue
        if all(q in args[i] for i, q in enumerate(t.args)):
            bits |= 1 << t.target
    return StateSet(bits)


def evaluate(fta: Fta, tree: Tree) -> StateSet:
    """Run the automaton bottom-up and return the set of states the tree reaches.

    State leaves evaluate to themselves; inner nodes apply ``sigma_bar`` to
    their children's results.  Pure function of its inputs.
    """
    if tree.is_state_leaf:
        if tree.state not in fta.states:
            raise InputError(f"state leaf {tree.state} is not a state of the automaton")
        return StateSet.of(tree.state)
    rank = fta.alphabet.rank(tree.label)
    if len(tree.children) != rank:
        raise InputError(
            f"node {tree.label!r} has {len(tree.children)} children, rank is {rank}"
        )
    return sigma_bar(fta, tree.label, [evaluate(fta, child) for child in tree.children])


def accepts(fta: Fta, tree: Tree) -> bool:
    """True when the tree's evaluation meets a final state.

    The tree must be ground (no state leaves).
    """
    if tree.has_state_leaves():
        raise InputError("accepts() is defined on ground trees only")
    return not evaluate(fta, tree).isdisjoint(fta.final_set())


def is_deterministic(fta: Fta) -> bool:
    """True iff no two rules share the same symbol and argument sequence."""
    seen: set[tuple[str, tuple[int, ...]]] = set()
    for t in fta.transitions:
        lhs = (t.symbol, t.args)
        if lhs in seen:
            return False
        seen.add(lhs)
    return True


def enumerate_trees(
    alphabet: RankedAlphabet, max_height: int, *, height_guard: int = MAX_ENUM_HEIGHT
) -> list[Tree]:
    """All ground trees of height <= max_height, deterministically ordered.

    Trees are listed by height, then structurally within each height; the
    output for height h is a prefix of the output for height h + 1.  Heights
    beyond ``height_guard`` are refused because the count grows doubly
    exponentially.
    """
    if max_height < 0:
        raise InputError("max_height must be nonnegative")
    if max_height > height_guard:
        raise ConfigError(
            f"enumerating trees up to height {max_height} exceeds the guard "
            f"({height_guard}); pass height_guard explicitly to override"
        )
    leaves = [Tree.of(name) for name in alphabet.nullary]
    levels: list[list[Tree]] = [sorted(leaves, key=Tree.sort_key)]
    for h in range(1, max_height + 1):
        below = [(t, d) for d, level in enumerate(levels) for t in level]
        level: list[Tree] = []
        for name in alphabet.names():
            rank = alphabet.rank(name)
            if rank == 0:
                continue
            # At least one child must have height exactly h - 1.
            for combo in itertools.product(below, repeat=rank):
                if max(d for _, d in combo) == h - 1:
                    level.append(Tree.of(name, *(t for t, _ in combo)))
        levels.append(sorted(level, key=Tree.sort_key))
    return [t for level in levels for t in level]


def language_fingerprint(
    fta: Fta, max_height: int, *, height_guard: int = MAX_ENUM_HEIGHT
) -> frozenset[Tree]:
    """The accepted trees of height <= max_height (a finite language sample).

    Shared subtrees are evaluated once, so the cost is linear in the number of
    enumerated trees rather than in their total node count.
    """
    trees = enumerate_trees(fta.alphabet, max_height, height_guard=height_guard)
    rule_index: dict[tuple[str, tuple[int, ...]], int] = {}
    for t in fta.transitions:
        key = (t.symbol, t.args)
        rule_index[key] = rule_index.get(key, 0) | (1 << t.target)
    final_bits = fta.final_set().bits
    cache: dict[Tree, tuple[int, tuple[int, ...]]] = {}
    accepted: list[Tree] = []
    for tree in trees:  # children precede parents in enumeration order
        child_members = [cache[c][1] for c in tree.children]
        bits = 0
        for combo in itertools.product(*child_members):
            bits |= rule_index.get((tree.label, combo), 0)
        cache[tree] = (bits, tuple(StateSet(bits)))
        if bits & final_bits:
            accepted.append(tree)
    return frozenset(accepted)
