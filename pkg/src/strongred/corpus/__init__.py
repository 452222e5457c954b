"""Example models shipped with the package."""

from importlib import resources

from ..fsm import Fsm, parse_fsm


def names():
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".fsm"))


def text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.fsm").read_text(encoding="utf-8")


def load(name: str) -> Fsm:
    return parse_fsm(text(name))
