"""Beneš rearrangeable networks of arbitrary size and permutation routing.

A network on ``n`` wires is a sequence of 2x2 switches on fixed wire
positions.  For ``n >= 3`` it is an entry stage pairing positions
``(2k, 2k+1)``, an upper subnetwork on the even positions (size
``ceil(n/2)``), a lower subnetwork on the odd positions (size
``floor(n/2)``) and an exit stage pairing the same positions as the entry
stage.  For odd ``n`` the last position is unpaired in both stages and
belongs to the upper subnetwork.

Permutations are 1-based image tuples: ``p[i-1]`` is the output position
reached by whatever enters on input ``i``.  Switch ids and wire positions
inside the data structures are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import count
from typing import Iterator, Mapping, Sequence

from .errors import InternalInvariantError

STRAIGHT = False
CROSSED = True

Permutation = tuple[int, ...]
SwitchSettings = dict[int, bool]


@dataclass(frozen=True)
class Switch:
    id: int
    wires: tuple[int, int]


@dataclass(frozen=True)
class BenesNet:
    n: int
    wires: tuple[int, ...]
    entry: tuple[Switch, ...] = ()
    upper: "BenesNet | None" = None
    lower: "BenesNet | None" = None
    exit: tuple[Switch, ...] = ()

    @cached_property
    def switches(self) -> tuple[Switch, ...]:
        """All switches in stage order, which is also id order."""
        out = list(self.entry)
        for sub in (self.upper, self.lower):
            if sub is not None:
                out.extend(sub.switches)
        out.extend(self.exit)
        return tuple(out)

    @property
    def switch_count(self) -> int:
        return len(self.switches)

    @cached_property
    def _by_wire(self) -> dict[int, list[Switch]]:
        out: dict[int, list[Switch]] = {w: [] for w in self.wires}
        for s in self.switches:
            for w in s.wires:
                out[w].append(s)
        return out

    def switches_on(self, wire: int) -> list[Switch]:
        """Switches touching ``wire``, in the order a signal meets them."""
        return list(self._by_wire[wire])


def build_benes(n: int) -> BenesNet:
    if n < 1:
        raise ValueError("n must be at least 1")
    return _build(tuple(range(n)), count())


def _build(wires: tuple[int, ...], ids: Iterator[int]) -> BenesNet:
    m = len(wires)
    if m == 1:
        return BenesNet(1, wires)
    if m == 2:
        return BenesNet(2, wires, entry=(Switch(next(ids), wires),))
    pairs = m // 2
    entry = tuple(Switch(next(ids), (wires[2 * k], wires[2 * k + 1])) for k in range(pairs))
    upper = _build(wires[0::2], ids)
    lower = _build(wires[1::2], ids)
    exit_ = tuple(Switch(next(ids), (wires[2 * k], wires[2 * k + 1])) for k in range(pairs))
    return BenesNet(m, wires, entry, upper, lower, exit_)


@lru_cache(maxsize=None)
def switch_count(n: int) -> int:
    """Switch count from the size recursion, without building the network."""
    if n <= 1:
        return 0
    if n == 2:
        return 1
    return switch_count((n + 1) // 2) + switch_count(n // 2) + 2 * (n // 2)


def check_permutation(p: Sequence[int], n: int | None = None) -> Permutation:
    p = tuple(int(x) for x in p)
    if n is not None and len(p) != n:
        raise ValueError(f"permutation has length {len(p)}, network has {n} wires")
    if sorted(p) != list(range(1, len(p) + 1)):
        raise ValueError(f"{p} is not a permutation of 1..{len(p)}")
    return p


def parse_permutation(text: str) -> Permutation:
    """Parse whitespace-separated 1-based images, e.g. ``"4 1 3 2"``."""
    try:
        values = [int(tok) for tok in text.split()]
    except ValueError as e:
        raise ValueError(f"bad permutation {text!r}: {e}") from None
    return check_permutation(values)


def format_permutation(p: Sequence[int]) -> str:
    return " ".join(str(x) for x in p)


def apply(net: BenesNet, settings: Mapping[int, bool]) -> Permutation:
    """Permutation realised by propagating every input through the switches."""
    at = list(range(net.n))  # at[w] = input currently on wire w
    for s in net.switches:
        if settings[s.id]:
            a, b = s.wires
            at[a], at[b] = at[b], at[a]
    dest = [0] * net.n
    for w, i in enumerate(at):
        dest[i] = w + 1
    return tuple(dest)


def route(net: BenesNet, p: Sequence[int]) -> SwitchSettings:
    """Switch settings realising ``p``, found by the looping algorithm."""
    p = check_permutation(p, net.n)
    settings: SwitchSettings = {}
    _route(net, [x - 1 for x in p], settings)
    if apply(net, settings) != p:
        raise InternalInvariantError(f"routing {p} produced {apply(net, settings)}")
    return settings


def _route(net: BenesNet, dest: list[int], settings: SwitchSettings) -> None:
    m = net.n
    if m == 1:
        return
    if m == 2:
        settings[net.entry[0].id] = dest[0] == 1
        return
    paired = 2 * (m // 2)
    src = [0] * m
    for i, o in enumerate(dest):
        src[o] = i
    upper_side = [None] * m  # per input: True -> upper subnetwork

    def walk(i: int, up: bool) -> None:
        while True:
            upper_side[i] = up
            o = dest[i]
            if o >= paired:
                if not up:
                    raise InternalInvariantError("bypass output fed from the lower subnetwork")
                return
            j = src[o ^ 1]
            if upper_side[j] is not None:
                if upper_side[j] == up:
                    raise InternalInvariantError("output switch constraint violated")
                return
            upper_side[j] = not up
            if j >= paired:
                if up:
                    raise InternalInvariantError("bypass input sent to the lower subnetwork")
                return
            i = j ^ 1
            if upper_side[i] is not None:
                if upper_side[i] != up:
                    raise InternalInvariantError("input switch constraint violated")
                return

    if m % 2:
        walk(m - 1, True)
    for i in range(m):
        if upper_side[i] is None:
            walk(i, True)

    for k, s in enumerate(net.entry):
        settings[s.id] = not upper_side[2 * k]
    for k, s in enumerate(net.exit):
        settings[s.id] = not upper_side[src[2 * k]]

    up_dest = [0] * net.upper.n
    low_dest = [0] * net.lower.n
    for i in range(m):
        if upper_side[i]:
            up_dest[i // 2] = dest[i] // 2
        else:
            low_dest[i // 2] = dest[i] // 2
    _route(net.upper, up_dest, settings)
    _route(net.lower, low_dest, settings)
