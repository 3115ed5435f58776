from __future__ import annotations

import importlib.resources

import pytest

from xdoc.resources import ResourceBundle, load_bundle


def bundle_path(name: str) -> str:
    return str(importlib.resources.files("xdoc") / "bundles" / name)


@pytest.fixture(scope="session")
def en_bio_path() -> str:
    return bundle_path("en-bio.xml")


@pytest.fixture(scope="session")
def de_core_path() -> str:
    return bundle_path("de-core.xml")


@pytest.fixture(scope="session")
def en_bio(en_bio_path: str) -> ResourceBundle:
    return load_bundle(en_bio_path)


@pytest.fixture(scope="session")
def de_core(de_core_path: str) -> ResourceBundle:
    return load_bundle(de_core_path)
