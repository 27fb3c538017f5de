"""Dialogues, turns, and corpora.

All structures are immutable after construction; user turns carry the
cumulative gold belief state up to and including the turn.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import SchemaError
from .ontology import Ontology
from .states import BeliefState

USER = "user"
SYSTEM = "system"
SPEAKERS = (USER, SYSTEM)


@dataclass(frozen=True)
class Turn:
    """One utterance. ``gold_state`` is set on user turns only."""

    speaker: str
    text: str
    turn_index: int
    gold_state: Optional[BeliefState] = None
    requires_coref: bool = False

    def __post_init__(self):
        if self.speaker not in SPEAKERS:
            raise SchemaError(f"unknown speaker {self.speaker!r}")
        if self.speaker == SYSTEM and self.gold_state is not None:
            raise SchemaError("system turns carry no gold state")

    @property
    def is_user(self) -> bool:
        return self.speaker == USER


@dataclass(frozen=True)
class Dialogue:
    """An ordered conversation with a stable id and domain labels."""

    id: str
    domains: frozenset[str]
    turns: tuple[Turn, ...]

    def __post_init__(self):
        object.__setattr__(self, "domains", frozenset(self.domains))
        object.__setattr__(self, "turns", tuple(self.turns))
        for expected, turn in enumerate(self.turns):
            if turn.turn_index != expected:
                raise SchemaError(
                    f"dialogue {self.id!r}: turn indices must be contiguous from 0, "
                    f"got {turn.turn_index} at position {expected}"
                )
        if self.turns and not self.turns[0].is_user:
            raise SchemaError(f"dialogue {self.id!r} must start with a user turn")
        for prev, cur in zip(self.turns, self.turns[1:]):
            if prev.speaker == cur.speaker:
                raise SchemaError(
                    f"dialogue {self.id!r}: speakers must alternate "
                    f"(turns {prev.turn_index} and {cur.turn_index})"
                )
        for turn in self.turns:
            if turn.is_user and turn.gold_state is None:
                raise SchemaError(
                    f"dialogue {self.id!r}: user turn {turn.turn_index} has no gold state"
                )

    def user_turns(self) -> Iterator[Turn]:
        return (turn for turn in self.turns if turn.is_user)

    def history(self, turn_index: int) -> tuple[str, ...]:
        """Utterance texts up to and including ``turn_index``."""
        if not 0 <= turn_index < len(self.turns):
            raise IndexError(f"turn {turn_index} not in dialogue {self.id!r}")
        return tuple(turn.text for turn in self.turns[: turn_index + 1])

    @property
    def is_single_domain(self) -> bool:
        return len(self.domains) == 1


@dataclass(frozen=True)
class Corpus:
    """A named set of dialogues evaluated against one ontology.

    ``notes`` carries loader observations (state regressions, heuristic
    caveats); it never takes part in equality or serialization.
    """

    name: str
    dialogues: tuple[Dialogue, ...]
    ontology: Ontology
    notes: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dialogues", tuple(self.dialogues))
        object.__setattr__(self, "notes", tuple(self.notes))
        ids = [d.id for d in self.dialogues]
        if len(ids) != len(set(ids)):
            seen, dupes = set(), set()
            for did in ids:
                (dupes if did in seen else seen).add(did)
            raise SchemaError(f"duplicate dialogue ids: {sorted(dupes)}")

    def dialogue(self, dialogue_id: str) -> Dialogue:
        for dlg in self.dialogues:
            if dlg.id == dialogue_id:
                return dlg
        raise KeyError(dialogue_id)

    def user_turns(self) -> Iterator[tuple[Dialogue, Turn]]:
        for dlg in self.dialogues:
            for turn in dlg.user_turns():
                yield dlg, turn

    def user_turn_keys(self) -> set[tuple[str, int]]:
        return {(dlg.id, turn.turn_index) for dlg, turn in self.user_turns()}

    def n_user_turns(self) -> int:
        return sum(1 for _ in self.user_turns())

    def with_notes(self, *extra: str) -> "Corpus":
        return Corpus(self.name, self.dialogues, self.ontology, self.notes + extra)


def gold_state_of(dialogue: Dialogue, turn_index: int) -> BeliefState:
    turn = dialogue.turns[turn_index]
    if not turn.is_user or turn.gold_state is None:
        raise SchemaError(f"turn {turn_index} of {dialogue.id!r} has no gold state")
    return turn.gold_state


def state_regressions(dialogue: Dialogue) -> list[str]:
    """Describe where a later cumulative state drops or rewrites a slot.

    Value changes are legitimate (the user changed their mind); they are
    recorded rather than rejected.
    """
    observations = []
    previous: Optional[BeliefState] = None
    for turn in dialogue.user_turns():
        state = turn.gold_state or BeliefState()
        if previous is not None:
            before = previous.as_dict()
            after = state.as_dict()
            for key, value in before.items():
                if key not in after:
                    observations.append(
                        f"{dialogue.id}:{turn.turn_index} drops {key[0]} {key[1]}"
                    )
                elif after[key] != value:
                    observations.append(
                        f"{dialogue.id}:{turn.turn_index} changes {key[0]} {key[1]} "
                        f"{value!r} -> {after[key]!r}"
                    )
        previous = state
    return observations
