"""Environment lookup by name"""

from typing import Dict, Type, Union

from src.errors import ConfigError
from src.models.config import EnvConfig, EnvName
from .base import PointCloudEnv
from .color_touch import ColorTouchEnv
from .point_reach import PointReachEnv

ENVIRONMENTS: Dict[str, Type[PointCloudEnv]] = {
    EnvName.POINT_REACH.value: PointReachEnv,
    EnvName.COLOR_TOUCH.value: ColorTouchEnv,
}


def make_env(config: Union[str, EnvConfig]) -> PointCloudEnv:
    """
    Build an environment from a config or a bare task name.

    Raises:
        ConfigError: If the name is not registered
    """
    if isinstance(config, str):
        if config not in ENVIRONMENTS:
            raise ConfigError(f"unknown environment {config!r}; known: {sorted(ENVIRONMENTS)}", key_path="env.name")
        config = EnvConfig(name=config)
    name = EnvName(config.name).value
    return ENVIRONMENTS[name](config)
