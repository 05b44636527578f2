from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dlrpm import parse
from dlrpm.model import KnowledgeBase

PAPER_KB_TEXT = """\
signature:
  relation R1(U1, U2, U3, U4, U5)
  relation R2(V1, V2, V3, V4, V5)
  relation R3(W1, W2, W3, W4)

renaming:
  rename V1 V2 V3 V4 V5 -> U1 U2 U3 U4 U5
  rename W1 W2 W3 -> U3 U4 U5

tbox:
  exists[U1,U2] R1 isa exists<=1[U1,U2] R1
  exists[V3,V4] R2 isa exists<=1[V3,V4] exists[V3,V4,V5] R2
  R2 isa R1
  exists[W1,W2,W3] R3 isa exists[U3,U4,U5] R1
"""


@pytest.fixture(scope="session")
def paper_kb() -> KnowledgeBase:
    """The running three-relation example with keys, a functional dependency,
    projection inclusions, and two renaming groups."""
    return parse(PAPER_KB_TEXT)


@pytest.fixture(scope="session")
def paper_kb_weakened(paper_kb: KnowledgeBase) -> KnowledgeBase:
    """Same base without the axiom making R2 a sub-relation of R1."""
    tbox = tuple(ax for i, ax in enumerate(paper_kb.tbox) if i != 2)
    return KnowledgeBase(paper_kb.signature, tbox, paper_kb.renaming)
