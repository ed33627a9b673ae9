"""Static sealing analysis for layered message-passing programs.

The package models straight-line programs whose processes exchange messages
over reliable, unordered point-to-point channels. It decides deadlock
freedom, computes compositional signatures, classifies channels as open or
closed, decides whether one layer seals another, and synthesizes small
sealing layers. A brute-force semantic oracle backs every static answer on
programs small enough to enumerate.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    AnalysisError,
    BadProcessId,
    BudgetExceeded,
    CyclicGraph,
    ProcessCountMismatch,
    ShapeError,
    Unbalanced,
    Unsealable,
)
from .graph import (
    EventNode,
    FstDummy,
    GraphNode,
    LstDummy,
    ProgramGraph,
    build_program_graph,
    deadlock_free,
    transitive_closure,
)
from .model import (
    Channel,
    EventRef,
    Program,
    Statement,
    StmtKind,
    channel_traffic,
    channels_of,
    empty_program,
    is_balanced,
    iter_events,
    layer,
    message_transmit,
    program,
    recv,
    send,
)
from .oracle import (
    DEFAULT_BUDGET,
    EventWorld,
    Matching,
    OracleBudget,
    enumerate_matchings,
    has_rel_run,
    oracle_channel_open,
    oracle_seals,
    oracle_tcc,
)
from .parser import (
    ParseError,
    ParseErrorKind,
    SourceSpan,
    format_program,
    parse,
)
from .sealing import (
    ClosedChannelGraph,
    Phase,
    SealPlan,
    closed_channels,
    construct_seal,
    expand_plan,
    format_plan,
    is_seal,
    is_sealable,
    parse_plan,
)
from .signature import (
    FirstSend,
    LastRecv,
    Signature,
    compute_signature,
    signature_compose,
    signature_equal,
)

__all__ = [
    "AnalysisError",
    "BadProcessId",
    "BudgetExceeded",
    "Channel",
    "ClosedChannelGraph",
    "CyclicGraph",
    "DEFAULT_BUDGET",
    "EventNode",
    "EventRef",
    "EventWorld",
    "FirstSend",
    "FstDummy",
    "GraphNode",
    "LastRecv",
    "LstDummy",
    "Matching",
    "OracleBudget",
    "ParseError",
    "ParseErrorKind",
    "Phase",
    "Program",
    "ProgramGraph",
    "ProcessCountMismatch",
    "SealPlan",
    "ShapeError",
    "Signature",
    "SourceSpan",
    "Statement",
    "StmtKind",
    "Unbalanced",
    "Unsealable",
    "build_program_graph",
    "channel_traffic",
    "channels_of",
    "closed_channels",
    "compute_signature",
    "construct_seal",
    "deadlock_free",
    "empty_program",
    "enumerate_matchings",
    "expand_plan",
    "format_plan",
    "format_program",
    "has_rel_run",
    "is_balanced",
    "is_seal",
    "is_sealable",
    "iter_events",
    "layer",
    "message_transmit",
    "oracle_channel_open",
    "oracle_seals",
    "oracle_tcc",
    "parse",
    "parse_plan",
    "program",
    "recv",
    "send",
    "signature_compose",
    "signature_equal",
    "transitive_closure",
    "__version__",
]
