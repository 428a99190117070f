from ._core import (
    Mode,
    Process,
    Program,
    TypingEnv,
    VispiError,
    bisim,
    check,
    compatible,
    generate,
    may_test,
    steps,
    trace_equiv,
    traces,
    typed_steps,
)

__all__ = [
    "Mode",
    "Process",
    "Program",
    "TypingEnv",
    "VispiError",
    "bisim",
    "check",
    "compatible",
    "generate",
    "may_test",
    "steps",
    "trace_equiv",
    "traces",
    "typed_steps",
]
