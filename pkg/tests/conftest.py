import pathlib

import pytest

import mmlkit

DATA = pathlib.Path(__file__).parent / "data"
GOLDEN = DATA / "golden"


@pytest.fixture(scope="session")
def data_dir() -> pathlib.Path:
    return DATA


@pytest.fixture(scope="session")
def golden_dir() -> pathlib.Path:
    return GOLDEN


@pytest.fixture(scope="session")
def listing1_text() -> str:
    return (DATA / "listing1.mml").read_text(encoding="utf-8")


@pytest.fixture()
def listing1_doc(listing1_text) -> mmlkit.MathDoc:
    doc, _ = mmlkit.parse(listing1_text, "lenient")
    return doc
