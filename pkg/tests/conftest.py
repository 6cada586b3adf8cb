import json
import os

import pytest

from hetlogic.parser import parse_formula, parse_kripke, parse_structure, parse_theory

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir)
CORPUS = os.path.join(ROOT, "corpus")


def corpus_path(*parts):
    return os.path.join(CORPUS, *parts)


def read(*parts):
    with open(corpus_path(*parts), encoding="utf-8") as fh:
        return fh.read()


def structure(name):
    return parse_structure(read("structures", name + ".str"))


def theory(name):
    return parse_theory(read("theories", name + ".thy"))


def kripke(name):
    return parse_kripke(read("kripke", name + ".krp"))


def formula(name, sig):
    text = read("formulas", name + ".fml").strip()
    ctx = ()
    if text.startswith("[ctx"):
        from hetlogic.parser import parse_ctx
        end = text.index("]") + 1
        ctx = tuple(parse_ctx(text[:end], sig))
        text = text[end:]
    return parse_formula(text, sig, ctx)


def manifest():
    with open(corpus_path("manifest.json"), encoding="utf-8") as fh:
        return json.load(fh)


STRUCTURES = ("m1", "m2", "m3", "m3sym")
FORMULAS = ("copycat", "copycat_dual", "reach_one", "avoid_p", "em_one", "nb", "param_copy")


@pytest.fixture
def m2():
    return structure("m2")


@pytest.fixture
def sig(m2):
    return m2.signature


@pytest.fixture
def copycat(sig):
    return formula("copycat", sig)
