import pytest

from mealybound import formats
from mealybound.words import AuxiliaryGroup


ZOO_NAMES = tuple(formats.builtin_names())


def aux_for(name: str, m) -> AuxiliaryGroup:
    return AuxiliaryGroup.free_product(m, formats.builtin_blocks(name))


@pytest.fixture(scope="session")
def zoo():
    return {name: formats.builtin(name) for name in formats.builtin_names()}


@pytest.fixture(scope="session")
def grig():
    m = formats.builtin("grigorchuk")
    return m, aux_for("grigorchuk", m)
