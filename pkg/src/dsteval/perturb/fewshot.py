"""Low-resource splits: seeded sampling of single-domain dialogues.

Per target domain the sampler draws 50 train, 50 valid and 200 test
dialogues without replacement (the attraction test split is capped at 80,
matching the size of the available attraction-only pool).
"""

from __future__ import annotations

import random
from typing import Mapping, Optional

from sklearn.base import BaseEstimator

from ..corpus import Corpus, Dialogue
from ..errors import InsufficientDialoguesError
from ..validation import check_corpus, check_seed

FEWSHOT_DOMAINS = ("attraction", "restaurant", "hotel", "taxi", "train")
DEFAULT_TEST_OVERRIDES = {"attraction": 80}
SPLIT_NAMES = ("train", "valid", "test")


class FewShotSampler(BaseEstimator):
    """Deterministic splitter for the low-resource evaluation protocol.

    ``split`` returns ``{"train": Corpus, "valid": Corpus, "test": Corpus}``
    with pairwise-disjoint, single-domain dialogues, the same result for the
    same seed.
    """

    def __init__(
        self,
        seed: int = 0,
        domains: tuple[str, ...] = FEWSHOT_DOMAINS,
        train_size: int = 50,
        valid_size: int = 50,
        test_size: int = 200,
        test_size_overrides: Optional[Mapping[str, int]] = None,
    ):
        self.seed = seed
        self.domains = domains
        self.train_size = train_size
        self.valid_size = valid_size
        self.test_size = test_size
        self.test_size_overrides = test_size_overrides

    def _test_size(self, domain: str) -> int:
        overrides = (
            self.test_size_overrides
            if self.test_size_overrides is not None
            else DEFAULT_TEST_OVERRIDES
        )
        return int(overrides.get(domain, self.test_size))

    def split(self, corpus: Corpus) -> dict[str, Corpus]:
        check_seed(self.seed)
        check_corpus(corpus)
        pools: dict[str, list[Dialogue]] = {domain: [] for domain in self.domains}
        for dlg in corpus.dialogues:
            if dlg.is_single_domain:
                (domain,) = dlg.domains
                if domain in pools:
                    pools[domain].append(dlg)

        rng = random.Random(self.seed)
        selected: dict[str, set[str]] = {name: set() for name in SPLIT_NAMES}
        for domain in sorted(self.domains):
            test_size = self._test_size(domain)
            needed = self.train_size + self.valid_size + test_size
            pool = sorted(pools[domain], key=lambda dlg: dlg.id)
            if len(pool) < needed:
                raise InsufficientDialoguesError(domain, needed, len(pool))
            ids = [dlg.id for dlg in pool]
            rng.shuffle(ids)
            cut1 = self.train_size
            cut2 = cut1 + self.valid_size
            cut3 = cut2 + test_size
            selected["train"].update(ids[:cut1])
            selected["valid"].update(ids[cut1:cut2])
            selected["test"].update(ids[cut2:cut3])

        splits = {}
        for name in SPLIT_NAMES:
            dialogues = tuple(d for d in corpus.dialogues if d.id in selected[name])
            splits[name] = Corpus(f"{corpus.name}-{name}", dialogues, corpus.ontology)
        return splits


def sample_fewshot(corpus: Corpus, seed: int = 0) -> dict[str, Corpus]:
    """One-shot form of :class:`FewShotSampler` with protocol defaults."""
    return FewShotSampler(seed=seed).split(corpus)
