"""Proof objects: rule tags and derivation trees."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class RuleTag(enum.Enum):
    Identity = "Identity"
    Substitution = "Substitution"
    Cut = "Cut"
    EqRefl = "EqRefl"
    EqSubst = "EqSubst"
    ConjAx = "ConjAx"
    ConjRule = "ConjRule"
    DisjAx = "DisjAx"
    DisjRule = "DisjRule"
    ImplIntro = "ImplIntro"
    ImplElim = "ImplElim"
    ExistsIntro = "ExistsIntro"
    ExistsElim = "ExistsElim"
    ForallIntro = "ForallIntro"
    ForallElim = "ForallElim"
    TTRule = "TTRule"
    HetAx1 = "HetAx1"
    HetAx2 = "HetAx2"
    HetAx3 = "HetAx3"
    HetAx4 = "HetAx4"
    PresAx1 = "PresAx1"
    PresAx2 = "PresAx2"
    DetAx = "DetAx"
    ExcludedMiddle = "ExcludedMiddle"
    TheoryAx = "TheoryAx"


AXIOM_TAGS = frozenset({
    RuleTag.Identity, RuleTag.EqRefl, RuleTag.EqSubst, RuleTag.ConjAx, RuleTag.DisjAx,
    RuleTag.HetAx1, RuleTag.HetAx2, RuleTag.HetAx3, RuleTag.HetAx4, RuleTag.PresAx1,
    RuleTag.PresAx2, RuleTag.DetAx, RuleTag.ExcludedMiddle, RuleTag.TheoryAx,
})


@dataclass(frozen=True)
class ProofTree:
    """A derivation node.  Parameter values are strings, ints, lists, dicts or syntax objects."""
    rule: RuleTag
    conclusion: object                      # Sequent
    params: dict = field(default_factory=dict)
    premises: tuple = ()

    def __hash__(self):
        return id(self)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def nodes(self, path=()):
        """Pre-order (path, node) pairs; a path is a list of premise indices."""
        yield list(path), self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))

    def tags(self) -> set:
        out = {self.rule}
        for p in self.premises:
            out |= p.tags()
        return out

    def replace_at(self, path, new: "ProofTree") -> "ProofTree":
        if not path:
            return new
        i = path[0]
        prem = list(self.premises)
        prem[i] = prem[i].replace_at(path[1:], new)
        return ProofTree(self.rule, self.conclusion, self.params, tuple(prem))
