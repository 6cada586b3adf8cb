"""Single-node corruptions of proof trees, used to probe the kernel."""
from hetlogic.proofs import ProofTree, RuleTag
from hetlogic.syntax import BOTTOM, TOP, Sequent

TAGS = list(RuleTag)


def _retag(n):
    i = TAGS.index(n.rule)
    return ProofTree(TAGS[(i + 1) % len(TAGS)], n.conclusion, n.params, n.premises)


def _falsify(n):
    c = n.conclusion
    if c.succedent != BOTTOM:
        return ProofTree(n.rule, Sequent(c.antecedent, BOTTOM, c.context), n.params, n.premises)
    return ProofTree(n.rule, Sequent(TOP, BOTTOM, c.context), n.params, n.premises)


def _drop_premise(n):
    if not n.premises:
        return None
    return ProofTree(n.rule, n.conclusion, n.params, n.premises[:-1])


def _bad_params(n):
    if n.rule == RuleTag.TheoryAx:
        return ProofTree(n.rule, n.conclusion, {"name": "no_such_axiom"}, n.premises)
    return None


MUTATIONS = (("retag", _retag), ("falsify", _falsify), ("drop", _drop_premise),
             ("params", _bad_params))


def mutants(p):
    """Yield (label, mutant) for every node and mutation kind; ``p`` has parsed conclusions."""
    for path, n in p.nodes():
        for label, fn in MUTATIONS:
            m = fn(n)
            if m is not None:
                yield "%s@%s" % (label, path), p.replace_at(path, m)
