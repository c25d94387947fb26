import logging

from config import get_settings
from context_vars import run_context

log_format = "%(asctime)s %(name)s %(levelname)s:\trun: %(run)s: %(message)s"


class CustomFormatter(logging.Formatter):
    def format(self, record):
        if not hasattr(record, "run"):
            record.run = "-"
        return super().format(record)


handler = logging.StreamHandler()
handler.setFormatter(CustomFormatter(log_format))

logger = logging.getLogger("torusfold")
logger.setLevel(get_settings().log_level)
logger.addHandler(handler)
logger.propagate = False


# Stamps each record with the run (policy/cube/seed) being simulated.
class ContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord):
        record.run = run_context.get() or "-"
        return True


logger.addFilter(ContextFilter())
