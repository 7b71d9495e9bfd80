"""Shared fixtures and the acceptance-results summary hook."""

from __future__ import annotations

import numpy as np
import pytest

# Populated by tests/test_acceptance.py; printed after the run so each
# criterion gets one visible pass/fail line even under output capture.
ACCEPTANCE_RESULTS: list[tuple[str, str, str]] = []


def record_acceptance(name: str, passed: bool | None, detail: str = "") -> None:
    status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
    ACCEPTANCE_RESULTS.append((name, status, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in ACCEPTANCE_RESULTS:
        line = f"{status}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)


TINY_PAPERS = """\
a\t2000-01\tquark gluon plasma
b\t2000-02\tquark gluon dynamics
c\t2000-03\tlattice quark study
d\t2000-04\tlattice gluon study
e\t2000-05\tstring dual models
f\t2000-06\tstring dual geometry
g\t2001-03\tquark gluon review
h\t2001-06\tstring dual review
"""

# Two co-citation pairs (a,b and e,f), one coupling pair (c,d), and a
# later wave (g, h) that reinforces both sides without changing the
# clustering.  Small enough to trace every weight by hand.
TINY_EDGES = """\
# citation edges
a\te
a\tf

b\te
b\tf
c\ta
c\tb
d\ta
d\tb
g\ta
g\tb
h\te
h\tf
"""


@pytest.fixture
def tiny_corpus_files(tmp_path):
    papers = tmp_path / "papers.tsv"
    edges = tmp_path / "edges.tsv"
    papers.write_text(TINY_PAPERS)
    edges.write_text(TINY_EDGES)
    return papers, edges


@pytest.fixture
def tiny_store(tiny_corpus_files):
    from eqrank.corpus import ingest, read_edges_file, read_papers_file

    papers, edges = tiny_corpus_files
    return ingest(read_papers_file(str(papers)), read_edges_file(str(edges)))
