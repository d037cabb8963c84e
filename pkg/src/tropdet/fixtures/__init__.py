"""Bundled example automata and extended words."""

from importlib.resources import files

from ..wfa import Nfa, Wfa, WfaIF, parse_nfa, parse_wfa


def path(name: str):
    return files(__name__) / name


def text(name: str) -> str:
    return path(name).read_text()


def load(name: str) -> Wfa | WfaIF:
    """Load a bundled automaton, e.g. ``load("fig1")``."""
    return parse_wfa(text(name if "." in name else name + ".wfa"))


def load_nfa(name: str) -> Nfa:
    return parse_nfa(text(name))
