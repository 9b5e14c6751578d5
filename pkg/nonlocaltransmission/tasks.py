import logging
from typing import Optional

from celery import shared_task

from . import __title__
from .app_settings import NTL_TASKS_TIME_LIMIT
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)

# params for all tasks
TASK_DEFAULT_KWARGS = {
    "time_limit": NTL_TASKS_TIME_LIMIT,
}


@shared_task(**TASK_DEFAULT_KWARGS)
def run_subcommand(
    subcommand: str,
    config_text: str = "",
    out_dir: Optional[str] = None,
    overrides: Optional[dict] = None,
) -> int:
    """Runs one subcommand and returns its exit status."""
    from .runner import run

    logger.info("Running %s in background", subcommand)
    result = run(subcommand, config_text, out_dir, overrides)
    if result.violations:
        logger.warning(
            "Background %s rejected: %s", subcommand, "; ".join(result.violations)
        )
    return result.exit_status
