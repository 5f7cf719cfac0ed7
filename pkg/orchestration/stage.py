# orchestration/stage.py
import functools
import logging
import os
from typing import Any, Callable, Dict

from orchestration.state import PipelineState
from utils.errors import StageError

logger = logging.getLogger(__name__)

Node = Callable[[PipelineState], Dict[str, Any]]


def stage(name: str) -> Callable[[Node], Node]:
    """Log a node's entry and exit and wrap any failure in a StageError naming it."""

    def decorator(fn: Node) -> Node:
        @functools.wraps(fn)
        def wrapper(state: PipelineState) -> Dict[str, Any]:
            logger.info("stage %s: start", name)
            try:
                update = fn(state)
            except StageError:
                raise
            except Exception as e:
                logger.error("stage %s failed: %s", name, e)
                raise StageError(name, e) from e
            logger.info("stage %s: done", name)
            return update

        return wrapper

    return decorator


def staged_path(state: PipelineState, name: str) -> str:
    return os.path.join(state["staging_dir"], name)
