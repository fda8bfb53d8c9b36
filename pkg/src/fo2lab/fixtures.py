"""Small named structures used throughout the tests and the CLI."""

from importlib import resources

from .structures import FinStructure, disjoint_union, parse_structure


def loop1():
    return FinStructure("LOOP1", 1, {"E": {(0, 0)}})


def edge():
    return FinStructure("EDGE", 2, {"E": {(0, 1)}})


def cycle(n, name=None):
    """Directed n-cycle ``i -> i+1 mod n``."""
    return FinStructure(name or f"C{n}", n, {"E": {(i, (i + 1) % n) for i in range(n)}})


def c3():
    return cycle(3)


def c7():
    return cycle(7)


def c3c7():
    return disjoint_union(c3(), c7(), name="C3C7")


def adn45():
    from .adn import build_adn_model

    return build_adn_model()


BUILDERS = {
    "LOOP1": loop1,
    "EDGE": edge,
    "C3": c3,
    "C7": c7,
    "C3C7": c3c7,
    "ADN45": adn45,
}


def shipped(name):
    """Parse the ``.fos`` file shipped in the package data directory."""
    text = resources.files("fo2lab").joinpath("data", f"{name.lower()}.fos").read_text("utf-8")
    return parse_structure(text)
