"""YAML run-config loading with line-precise validation errors"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml
from pydantic import ValidationError

from src.errors import ConfigError
from src.models.config import RunConfig

logger = logging.getLogger(__name__)

KeyPath = Tuple[Union[str, int], ...]


def index_lines(text: str) -> Dict[KeyPath, int]:
    """Map every key path in a YAML document to its 1-based line"""
    root = yaml.compose(text, Loader=yaml.SafeLoader)
    lines: Dict[KeyPath, int] = {}
    if root is None:
        return lines

    stack = [((), root)]
    while stack:
        path, node = stack.pop()
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                child = path + (key_node.value,)
                lines[child] = key_node.start_mark.line + 1
                stack.append((child, value_node))
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                child = path + (i,)
                lines[child] = item.start_mark.line + 1
                stack.append((child, item))
    return lines


def _line_for(location: KeyPath, lines: Dict[KeyPath, int]) -> Optional[int]:
    """Line of the longest prefix of location that appears in the document"""
    for end in range(len(location), 0, -1):
        key = tuple(str(part) if not isinstance(part, int) else part for part in location[:end])
        if key in lines:
            return lines[key]
    return None


def parse_run_config(text: str, source: str = "<string>") -> RunConfig:
    """
    Validate YAML text into a RunConfig.

    Raises:
        ConfigError: With the source line of the first offending key
    """
    try:
        data = yaml.safe_load(text)
        lines = index_lines(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"invalid YAML: {getattr(exc, 'problem', exc)}", source, line)

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", source, 1)

    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        errors = exc.errors()
        first = errors[0]
        location = tuple(first["loc"])
        message = first["msg"]
        if len(errors) > 1:
            message += f" (and {len(errors) - 1} more)"
        key_path = ".".join(str(part) for part in location) or None
        raise ConfigError(message, source, _line_for(location, lines), key_path)


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    config = parse_run_config(text, source=str(path))
    logger.info(f"[ConfigLoader] Loaded {path} (env={config.env.name.value}, seed={config.seed})")
    return config


def dump_run_config(config: RunConfig) -> str:
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False)


def config_from_dict(data: Dict[str, Any], source: str = "<dict>") -> RunConfig:
    return parse_run_config(yaml.safe_dump(data, sort_keys=False), source)
