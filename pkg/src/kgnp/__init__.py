"""Deductive querying, embedding and argumentation over networks of
named triplet graphs."""

__version__ = "0.1.0"

from .engine import Engine, Session, Solution  # noqa: F401
from .store import AccessPolicy, KGNetwork, KnowledgeGraph  # noqa: F401
from .terms import Atom, Num, Obj, Struct, Triplet, Var  # noqa: F401
