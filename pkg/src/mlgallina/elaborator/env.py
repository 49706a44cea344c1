"""Static environments: values, types, structures, signatures, functors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .types import TCon, TVar, TypeScheme, apply, free_vars


@dataclass
class DataInfo:
    """A datatype: identity, parameters and constructors.

    Constructor payloads are expressed over ``TVar(p)`` for each parameter.
    """

    ident: str
    display: str
    params: Tuple[str, ...]
    cons: List[Tuple[str, Optional[object]]]
    path: Tuple[str, ...] = ()

    def tcon(self, args=None) -> TCon:
        args = tuple(args) if args is not None else tuple(TVar(p) for p in self.params)
        return TCon(self.ident, args, self.display, self.path)

    def con_names(self) -> List[str]:
        return [c for c, _ in self.cons]

    def payload(self, con: str):
        for c, t in self.cons:
            if c == con:
                return t
        raise KeyError(con)


@dataclass
class TypeInfo:
    """What a type constructor name denotes."""

    kind: str  # datatype | abbrev | abstract
    params: Tuple[str, ...]
    tcon: Optional[TCon] = None  # datatype/abstract identity
    body: Optional[object] = None  # abbrev expansion over TVar(params)
    data: Optional[DataInfo] = None
    name: str = ""
    path: Tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class ValInfo:
    scheme: TypeScheme
    kind: str = "var"  # var | con | basis
    datatype: Optional[str] = None
    overload: frozenset = frozenset()
    equality: bool = False


@dataclass
class Env:
    values: Dict[str, ValInfo] = field(default_factory=dict)
    types: Dict[str, TypeInfo] = field(default_factory=dict)
    structures: Dict[str, "Env"] = field(default_factory=dict)
    signatures: Dict[str, "Sig"] = field(default_factory=dict)
    functors: Dict[str, "FunctorInfo"] = field(default_factory=dict)
    parent: Optional["Env"] = field(default=None, repr=False)
    open_values: List[str] = field(default_factory=list, repr=False)

    def child(self) -> "Env":
        return Env(parent=self)

    def own(self) -> "Env":
        """A detached copy of this frame's tables (a structure's contents)."""
        return Env(dict(self.values), dict(self.types), dict(self.structures), dict(self.signatures), dict(self.functors))

    def absorb(self, other: "Env") -> None:
        self.values.update(other.values)
        self.types.update(other.types)
        self.structures.update(other.structures)
        self.signatures.update(other.signatures)
        self.functors.update(other.functors)
        self.open_values.extend(other.open_values)

    def add_value(self, name: str, info: ValInfo) -> None:
        self.values[name] = info
        if info.kind == "var":
            self.open_values.append(name)

    def _find(self, table: str, name: str):
        env: Optional[Env] = self
        while env is not None:
            t = getattr(env, table)
            if name in t:
                return t[name]
            env = env.parent
        return None

    def structure_path(self, parts: List[str]) -> Optional["Env"]:
        s = self._find("structures", parts[0])
        for p in parts[1:]:
            if s is None:
                return None
            s = s.structures.get(p)
        return s

    def _qualified(self, table: str, name: str):
        if "." in name:
            *path, last = name.split(".")
            s = self.structure_path(path)
            if s is None:
                return None
            return getattr(s, table).get(last)
        return self._find(table, name)

    def lookup_value(self, name: str) -> Optional[ValInfo]:
        return self._qualified("values", name)

    def lookup_type(self, name: str) -> Optional[TypeInfo]:
        return self._qualified("types", name)

    def lookup_structure(self, name: str) -> Optional["Env"]:
        return self.structure_path(name.split("."))

    def lookup_signature(self, name: str) -> Optional["Sig"]:
        return self._find("signatures", name)

    def lookup_functor(self, name: str) -> Optional["FunctorInfo"]:
        return self._find("functors", name)

    def free_type_vars(self, subst) -> frozenset:
        """Free type variables of the monomorphic parts of the environment."""
        out = set()
        env: Optional[Env] = self
        while env is not None:
            for n in env.open_values:
                info = env.values.get(n)
                if info is None:
                    continue
                fv = free_vars(apply(info.scheme.body, subst))
                out |= fv - set(info.scheme.quantified)
            env = env.parent
        return frozenset(out)


@dataclass
class Sig:
    """An elaborated signature.

    ``abstract`` lists the identities of its flexible types.  ``ast`` and
    ``defenv`` allow re-elaboration with fresh identities, which is how a
    signature is instantiated for matching or as a functor parameter.
    """

    env: Env
    abstract: List[str]
    ast: object = None
    defenv: Optional[Env] = field(default=None, repr=False)


@dataclass
class FunctorInfo:
    param: str
    param_sig: object  # signature expression
    body: object  # structure expression, re-elaborated per application
    defenv: Env = field(repr=False)
    result_sig: object = None
    opaque: bool = False
    env: Optional[Env] = None  # body elaborated against the formal parameter
