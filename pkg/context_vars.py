from contextvars import ContextVar

run_context: ContextVar[str | None] = ContextVar("current_run", default=None)
