import json
import os
import shutil

import pytest

from irmtool.pipeline import Pipeline

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures", "ecnp")
GOLD = os.path.join(FIXTURES, "gold")
REQUIREMENTS = os.path.join(FIXTURES, "requirements.txt")
CONLLU = os.path.join(FIXTURES, "ecnp.conllu")
GOLD_JOURNAL = os.path.join(GOLD, "decisions.jsonl")
DEFECTS = os.path.join(FIXTURES, "defects")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def make_pipeline(state_dir, journal=GOLD_JOURNAL, **kw):
    kw.setdefault("input_path", REQUIREMENTS)
    kw.setdefault("conllu_path", CONLLU)
    return Pipeline(state_dir=str(state_dir), journal_path=journal, **kw)


@pytest.fixture(scope="session")
def gold_state(tmp_path_factory):
    """A completed pipeline run over the corpus with the curated journal."""
    state = tmp_path_factory.mktemp("gold-state")
    pipe = make_pipeline(state)
    statuses = pipe.run()
    assert all(s.blocked is None and not s.pending for s in statuses.values()), \
        {k: (v.blocked, v.pending) for k, v in statuses.items()}
    return str(state)


@pytest.fixture
def fresh_state(tmp_path):
    """Factory for untouched state dirs with configurable journals."""
    counter = {"n": 0}

    def build(journal=None, **kw):
        counter["n"] += 1
        state = tmp_path / ("state-%d" % counter["n"])
        if journal is None:
            journal_path = str(state / "decisions.jsonl")
        elif os.path.isabs(str(journal)) and os.path.exists(str(journal)):
            # copy so tests can append without touching the fixture
            state.mkdir(parents=True, exist_ok=True)
            journal_path = str(state / "decisions.jsonl")
            shutil.copy(str(journal), journal_path)
        else:
            journal_path = str(journal)
        return make_pipeline(state, journal=journal_path, **kw)

    return build


@pytest.fixture
def gold_artifact(gold_state):
    def load(name):
        return read_json(os.path.join(gold_state, name))

    return load
