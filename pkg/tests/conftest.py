import pathlib

import pytest

from seqc.parser import parse_program

SAMPLES = pathlib.Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture(scope="session")
def samples_dir() -> pathlib.Path:
    return SAMPLES


@pytest.fixture(scope="session")
def bmw_text() -> str:
    return (SAMPLES / "bmw.seqc").read_text(encoding="utf-8")


@pytest.fixture()
def bmw(bmw_text):
    return parse_program(bmw_text, "bmw.seqc")
