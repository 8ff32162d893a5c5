import importlib
import os
import sys

import pytest


@pytest.fixture(scope="session")
def lw():
    # ctest points at the build tree; otherwise use the installed package.
    module_dir = os.environ.get("LFW2VEC_MODULE_DIR")
    if module_dir:
        sys.path.insert(0, module_dir)
        return importlib.import_module("_lfw2vec")
    return importlib.import_module("lfw2vec")


@pytest.fixture(scope="session")
def questions_file():
    path = os.environ.get("LFW2VEC_QUESTIONS_FILE")
    if not path:
        path = os.path.join(os.path.dirname(__file__), "..", "..", "data", "questions-words.txt")
    return path
