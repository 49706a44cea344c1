"""Command-line driver: ``mlgallina input.sml -o output.v``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from .emitter import EmitConfig
from .errors import MLGallinaError, UnsupportedConstruct
from .evaluator import DEFAULT_FUEL
from .pipeline import EvalGateError, compile_source
from .runtime import install_shims

EXIT_OK = 0
EXIT_FRONT = 1
EXIT_EVAL = 2
EXIT_UNSUPPORTED = 3


@dataclass
class RunConfig:
    input_path: Path
    output_path: Optional[Path] = None  # None writes to standard output
    skip_eval: bool = False
    fuel: int = DEFAULT_FUEL
    no_header: bool = False
    normalize_names: bool = False
    shim_dir: Optional[Path] = None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("fuel must be at least 1")
    return n


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mlgallina", description="Translate pure SML with contracts to Coq/Gallina.")
    p.add_argument("input", type=Path, help="SML source file")
    p.add_argument("-o", dest="output", type=Path, help="output .v file (default: standard output)")
    p.add_argument("--no-eval", action="store_true", help="skip the evaluation gate")
    p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, help="evaluation step budget")
    p.add_argument("--no-header", action="store_true", help="omit the Require Import header")
    p.add_argument(
        "--normalize-names", action="store_true",
        help="renumber fresh names by first appearance (for golden-file comparison)",
    )
    p.add_argument("--shim-dir", type=Path, help="also write the Coq shim libraries into this directory")
    return p


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    name = str(cfg.input_path)
    try:
        source = cfg.input_path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"{name}: cannot read input: {exc.strerror}", file=stderr)
        return EXIT_FRONT
    emit_cfg = EmitConfig(header_enabled=not cfg.no_header, normalize_fresh_names=cfg.normalize_names)
    try:
        result = compile_source(source, emit_cfg, run_eval=not cfg.skip_eval, fuel=cfg.fuel)
    except EvalGateError as err:
        print(err.render(name, source), file=stderr)
        return EXIT_EVAL
    except UnsupportedConstruct as err:
        print(err.render(name, source), file=stderr)
        return EXIT_UNSUPPORTED
    except MLGallinaError as err:
        print(err.render(name, source), file=stderr)
        return EXIT_FRONT
    for w in result.warnings:
        print(w.render(name, source), file=stderr)
    if cfg.output_path is None:
        stdout.write(result.text)
    else:
        cfg.output_path.parent.mkdir(parents=True, exist_ok=True)
        cfg.output_path.write_text(result.text, encoding="utf-8", newline="\n")
    if cfg.shim_dir is not None:
        install_shims(cfg.shim_dir)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    a = parser().parse_args(argv)
    cfg = RunConfig(a.input, a.output, a.no_eval, a.fuel, a.no_header, a.normalize_names, a.shim_dir)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
