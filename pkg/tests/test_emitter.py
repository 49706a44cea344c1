"""Header, layout and fresh-name normalization."""

from __future__ import annotations

import pytest

from mlgallina.emitter import EmitConfig, SHIM_MODULES, emit, emit_header, normalize_fresh_names
from mlgallina.gallina import syntax as G

from helpers import GOLDEN, translate


def test_header_lines():
    lines = emit_header().splitlines()
    assert lines[0] == "Require Import intSml."
    assert lines[:9] == [f"Require Import {m}." for m in SHIM_MODULES]
    assert lines[9] == "From Equations Require Import Equations."
    assert lines[-1] == "Generalizable All Variables."
    assert len(lines) == 11


def test_disabled_header_is_empty():
    assert emit_header(EmitConfig(header_enabled=False)) == ""


def test_empty_body_gives_header_only():
    assert emit([], EmitConfig()) == emit_header()
    assert emit([], EmitConfig(header_enabled=False)) == ""


def test_axiom_sentence():
    ax = G.GAxiom("EmptyException", G.GForall((G.GBinder("a", None, True),), G.GIdent("a")))
    assert emit([ax], EmitConfig(header_enabled=False)) == "Axiom EmptyException : forall{a}, a.\n"


def test_indent_must_be_positive():
    with pytest.raises(ValueError):
        EmitConfig(indent_width=0)


def test_indent_width_is_honoured():
    sents = translate("fun length [] = 0\n  | length (x::l) = 1 + length l")
    text = emit(sents, EmitConfig(header_enabled=False, indent_width=4))
    assert text.splitlines()[1].startswith("    length ")


@pytest.mark.parametrize("name", ["records", "modules", "hd_sum"])
def test_text_shape(name):
    text = emit(translate((GOLDEN / f"{name}.sml").read_text()))
    assert text.endswith("\n") and not text.endswith("\n\n")
    assert "\r" not in text
    assert emit(translate((GOLDEN / f"{name}.sml").read_text())) == text


def test_normalization_renumbers_by_first_appearance():
    text = 'Definition L {_\'41 : Type} := rid_7 mid_3 y9 y2 "rid_9" (* _\'5 *) x_\'7 rid_7.'
    assert normalize_fresh_names(text) == 'Definition L {_\'1 : Type} := rid_1 mid_1 y1 y2 "rid_9" (* _\'5 *) x_\'7 rid_1.'


def test_normalization_is_idempotent():
    text = emit(translate((GOLDEN / "modules.sml").read_text()))
    once = normalize_fresh_names(text)
    assert normalize_fresh_names(once) == once
