from .lexer import Token, tokenize
from .parser import InfixEnvironment, parse, parse_source

__all__ = ["Token", "tokenize", "InfixEnvironment", "parse", "parse_source"]
