"""Run-config validation"""

from .config_loader import index_lines, parse_run_config, load_run_config, dump_run_config, config_from_dict

__all__ = [
    "index_lines",
    "parse_run_config",
    "load_run_config",
    "dump_run_config",
    "config_from_dict",
]
