"""The eight-item, four-sequence toy database used across docs and tests."""
from __future__ import annotations

from .seqdb import SequenceDatabase, parse_database

TOY_DB = """\
a:2 b:1 -1 c:2 -1 d:4 f:2 -1 -2
a:1 b:3 -1 e:1 f:1 -1 d:2 -1 c:1 -1 h:1 -1 -2
e:2 f:1 -1 g:1 -1 c:3 -1 b:1 -1 -2
e:2 f:1 -1 c:1 d:3 -1 g:3 -1 b:1 -1 -2
"""

TOY_EUTIL = """\
a:2
b:1
c:3
d:1
e:2
f:3
g:2
h:1
"""


def toy_database() -> SequenceDatabase:
    return parse_database(TOY_DB, TOY_EUTIL)
