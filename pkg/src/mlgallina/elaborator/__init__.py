"""Type inference and static checking."""

_EXPORTS = ("AnnotatedDecl", "ElabContract", "Elaborator", "elaborate", "elaborate_program", "unify")


def __getattr__(name):
    # imported lazily: the pattern engine depends on this package's type modules
    if name in _EXPORTS:
        from . import infer as _mod

        return getattr(_mod, name)
    raise AttributeError(name)
