"""Paths to the corpus shipped inside the package."""

import os

import lpspec

CORPUS = os.path.join(os.path.dirname(lpspec.__file__), "corpus")


def path(name: str) -> str:
    return os.path.join(CORPUS, name)


def read(name: str) -> str:
    with open(path(name), encoding="utf-8") as fh:
        return fh.read()
