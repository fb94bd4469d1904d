from pathlib import Path

import pytest

import minimod

CORPUS = Path(__file__).resolve().parents[2] / "tests" / "corpus"


def source(name):
    return (CORPUS / name).read_text()


def test_infer_hides_opened_bindings():
    assert minimod.infer("open struct let x = 3 end\nlet y = x") == "val y : int\n"


def test_print_modes():
    src = source("t17_generated_names.mml")
    assert "val f : t' -> t" in minimod.infer(src)
    assert "val f : t -> t" in minimod.infer(src, mode="plain")
    with pytest.raises(ValueError):
        minimod.infer(src, mode="fancy")


def test_elimination_error():
    with pytest.raises(minimod.MiniModError) as exc:
        minimod.check(source("t03_elim_error.mml"))
    assert "introduced by this open appears in the signature" in str(exc.value)


def test_syntax_error():
    with pytest.raises(minimod.MiniModError, match="Syntax error"):
        minimod.check("let x = (1 +")


def test_run():
    assert minimod.run(source("t12_counter.mml")) == ("1", None)
    output, uncaught = minimod.run(source("t11_assert_struct.mml"))
    assert output == ""
    assert "Uncaught exception: Assert_failure" in uncaught


def test_desugar():
    src = "open struct let x = 3 end\nlet y = x"
    assert minimod.desugar(src, "open", via="private") == (
        "private module M0 = struct let x = 3 end\nopen M0\nlet y = x\n"
    )
    assert minimod.desugar("private let x = 3", "private") == "open struct let x = 3 end\n"


def test_cli():
    code, out, err = minimod.cli(["infer", str(CORPUS / "t01_unexported.mml")])
    assert (code, out, err) == (0, "val y : int\n", "")
    code, _, err = minimod.cli(["check", "--no-color", str(CORPUS / "t05_functor_anon.mml")])
    assert code == 1
    assert "functor argument" in err
