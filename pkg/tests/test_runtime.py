"""Shim libraries and the identifier check."""

from __future__ import annotations

import re

import pytest

from mlgallina import basis
from mlgallina.emitter import SHIM_MODULES
from mlgallina.runtime import KINDS, PRELUDE, PROVIDES, external_identifiers, install_shims, shim_files, shim_text, validate_shims

from helpers import CORPUS, GOLDEN, translate


def test_nine_shims_ship():
    assert [s.name for s in shim_files()] == list(SHIM_MODULES)
    for s in shim_files():
        assert s.content.strip()


def test_core_names_need_nothing():
    assert validate_shims({"=", "Z", "list"}) == []


def test_list_hd_is_provided_with_its_exception():
    assert validate_shims({"List.hd"}) == []
    text = shim_text("listSml")
    assert "Axiom EmptyException" in text
    hd = text[text.index("Definition hd"):]
    assert "EmptyException" in hd[: hd.index(".\n")]


def test_unknown_name_is_reported():
    assert validate_shims({"Foo.bar", "Z"}) == ["no shim provides Foo.bar"]


def test_equality_class():
    text = shim_text("notationsSml")
    assert re.search(r"Class eqInfixes A : Type := \{ eqb : A -> A -> bool; neq : A -> A -> bool \}", text)
    assert 'Infix "=" := eqb (at level 70).' in text
    for inst in ["eqZ : eqInfixes Z", "eqString : eqInfixes string", "eqChar : eqInfixes ascii",
                 "eqBool : eqInfixes bool", "eqInfixes (list A)"]:
        assert inst in text


def test_provided_kinds_are_known():
    assert {k for _, k in PROVIDES.values()} <= set(KINDS)


def test_every_basis_function_has_a_shim():
    entries = list(basis.TOPLEVEL) + [e for es in basis.STRUCTURES.values() for e in es]
    for e in entries:
        if e.coq in PRELUDE:
            continue
        assert PROVIDES.get(e.coq, (None,))[0] == e.shim, e.name


@pytest.mark.parametrize("name, kind", [(n, k) for n, (_, k) in PROVIDES.items() if k in ("function", "axiom", "instance", "typeclass")])
def test_provided_names_are_declared_in_their_shim(name, kind):
    shim, _ = PROVIDES[name]
    text = shim_text(shim)
    last = name.rsplit(".", 1)[-1]
    declared = rf"\b(Definition|Fixpoint|Axiom|Class|Instance|Parameter)\s+{re.escape(last)}\b"
    member = rf"[{{;]\s*{re.escape(last)}\s*:"  # typeclass field
    assert re.search(declared, text) or re.search(member, text), name
    if "." in name:
        assert f"Module {name.rsplit('.', 1)[0]}." in text


@pytest.mark.parametrize("path", sorted(GOLDEN.glob("*.sml")) + sorted(CORPUS.glob("*.sml")), ids=lambda p: p.name)
def test_translated_programs_only_use_provided_names(path):
    assert validate_shims(external_identifiers(translate(path.read_text()))) == []


def test_install(tmp_path):
    written = install_shims(tmp_path / "lib")
    assert sorted(p.name for p in written) == sorted(f"{m}.v" for m in SHIM_MODULES)
    assert (tmp_path / "lib" / "listSml.v").read_text() == shim_text("listSml")
