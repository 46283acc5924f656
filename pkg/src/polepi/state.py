"""Mutable per-node simulation state.

Node state lives in flat Python lists (fastest container at the access
sizes of the sweep kernel). Opinion vectors have length `n`: components
0..n-2 are topic stances in {1..m}; component n-1 is the epidemic
awareness flag, 0 = unaware, 1 = aware, compared and copied exactly like
a topic.
"""

from __future__ import annotations

from dataclasses import dataclass

UNAWARE = 0
AWARE = 1


@dataclass(frozen=True)
class AgentState:
    """Immutable view of one agent, used by the pairwise operations."""

    party: int
    opinion: tuple[int, ...]
    infected: bool = False

    @property
    def aware(self) -> bool:
        return self.opinion[-1] == AWARE


class SimState:
    """State of all N agents in one run. Not thread-safe; one run owns it."""

    __slots__ = ("party", "opinions", "infected")

    def __init__(self, party: list[int], opinions: list[list[int]], infected: list[int]):
        self.party = party
        self.opinions = opinions
        self.infected = infected

    @property
    def n_nodes(self) -> int:
        return len(self.party)

    @property
    def n_components(self) -> int:
        return len(self.opinions[0])

    def agent(self, i: int) -> AgentState:
        return AgentState(self.party[i], tuple(self.opinions[i]), bool(self.infected[i]))

    def copy(self) -> "SimState":
        return SimState(list(self.party), [row[:] for row in self.opinions], list(self.infected))
