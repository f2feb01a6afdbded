"""
Engine configuration settings
"""

import copy

# Default engine configuration
DEFAULT_ENGINE_CONFIG = {
    "field": {
        "spec": "q"  # "q" or "fp:<p>"
    },
    "complex": {
        "max_degree": 4,  # largest Hochschild degree allowed as a differential source
        "normalized": True,
        "windows": {
            "category": (0, 4),
            "functor": (-1, 3),
            "pair": (-1, 3),
            "nat": (-2, 2),
            "identity3": (-3, 1),
            "diagram": (-2, 1),
        },
    },
    "deformation": {
        "max_order": 8
    },
    "report": {
        "include_matrices": False,
        "format": "text"
    },
    "logging": {
        "log_commands": True,
        "log_errors": True,
        "log_builds": False
    },
}

_SECTIONS = ("field", "complex", "deformation", "report", "logging")


def get_engine_config(project_settings=None, overrides=None):
    """
    Get engine configuration merged from defaults, project settings and overrides

    Args:
        project_settings (dict): Settings from the project file's settings block
        overrides (dict): Command-line overrides, applied last

    Returns:
        dict: Engine configuration
    """
    config = copy.deepcopy(DEFAULT_ENGINE_CONFIG)

    for layer in (project_settings, overrides):
        if not layer:
            continue
        for section in _SECTIONS:
            if section not in layer:
                continue
            values = dict(layer[section])
            # Windows merge per kind
            if section == "complex" and "windows" in values:
                config["complex"]["windows"].update(values.pop("windows"))
            config[section].update(values)

    _check_config(config)
    return config


def _check_config(config):
    from pasting_deformations.engine.errors import ConfigurationError
    from pasting_deformations.engine.validators import InputValidator

    is_valid, _, error = InputValidator.validate_field_spec(config["field"]["spec"])
    if not is_valid:
        raise ConfigurationError(error)

    is_valid, _, error = InputValidator.validate_degree(config["complex"]["max_degree"], "max_degree")
    if not is_valid:
        raise ConfigurationError(error)

    for kind, window in config["complex"]["windows"].items():
        lo, hi = window
        if lo > hi:
            raise ConfigurationError(f"Window for {kind} is empty: {lo}:{hi}")


def get_field_config(config=None):
    """
    Get the field specification

    Returns:
        str: "q" or "fp:<p>"
    """
    config = config or get_engine_config()
    return config["field"]["spec"]


def get_complex_config(config=None):
    """
    Get complex assembly settings

    Returns:
        dict: max degree, normalization flag and windows
    """
    config = config or get_engine_config()
    return config["complex"]


def get_window_config(kind, config=None):
    """
    Get the default degree window for a complex kind

    Args:
        kind (str): Complex kind

    Returns:
        tuple: (lo, hi)
    """
    config = config or get_engine_config()
    windows = config["complex"]["windows"]
    return tuple(windows.get(kind, windows["nat"]))


def is_logging_enabled(log_type, config=None):
    """
    Check if a specific type of logging is enabled

    Args:
        log_type (str): Type of logging ('commands', 'errors', 'builds')

    Returns:
        bool: True if logging is enabled for the specified type
    """
    logging_config = (config or DEFAULT_ENGINE_CONFIG)["logging"]

    log_key = f"log_{log_type}"
    return logging_config.get(log_key, True)
