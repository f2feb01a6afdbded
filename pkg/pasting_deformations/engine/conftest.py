"""
Shared fixtures: bundled project files and small hand-built categories
"""

import random
from pathlib import Path

import pytest

from pasting_deformations.engine.exactlinalg import Field
from pasting_deformations.engine.hochschild import Cochain
from pasting_deformations.engine.lincat import LinCategory
from pasting_deformations.engine.project import load_project

PROJECTS = Path(__file__).resolve().parent.parent / "projects"


@pytest.fixture
def projects_dir():
    return PROJECTS


@pytest.fixture
def load():
    def _load(name, field_spec=None):
        return load_project(PROJECTS / f"{name}.pdef", field_spec)

    return _load


@pytest.fixture
def qq():
    return Field("q")


@pytest.fixture
def dual(qq):
    return dual_numbers(qq)


def dual_numbers(field, name="DUAL"):
    """k[x]/(x^2) on one object o with basis e, x."""
    return LinCategory(name, field, ["o"], {("o", "o"): ["e", "x"]}, {"o": "e"}, {("x", "x"): {}})


def random_category(rng, field, name="R"):
    """
    A random finite linear category

    Non-identity arrows compose to zero, except that a single loop x at a
    one-object category may be idempotent up to a scalar (x x = c x).
    """
    objects = [f"v{k}" for k in range(rng.randint(1, 3))]
    hom_basis, identities, products = {}, {}, {}
    for x in objects:
        ids = [f"1{x}"]
        if rng.random() < 0.5:
            ids.append(f"l{x}")
        hom_basis[(x, x)] = ids
        identities[x] = f"1{x}"
    for i, x in enumerate(objects):
        for y in objects[i + 1:]:
            hom_basis[(x, y)] = [f"a{x}{y}{t}" for t in range(rng.randint(0, 2))]
    if len(objects) == 1 and len(hom_basis[(objects[0], objects[0])]) == 2:
        loop = hom_basis[(objects[0], objects[0])][1]
        products[(loop, loop)] = {loop: rng.choice([0, 1, 2])}
    return LinCategory(name, field, objects, hom_basis, identities, products)


def random_cochain(rng, F, G, n, normalized=False):
    """A cochain in C^n(F, G) with small random integer values."""
    field = F.target.field

    def value(objs, idx):
        dim = F.target.dim(F(objs[0]), G(objs[-1]))
        return tuple(field(rng.randint(-2, 2)) for _ in range(dim))

    return Cochain.from_function(F, G, n, value, normalized)


@pytest.fixture
def rng():
    return random.Random(20240611)
