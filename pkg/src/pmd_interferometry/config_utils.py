# Standard imports
import os
import logging
from typing import List, Dict, Any, Optional, Tuple, Union
# Local imports
from .errors import ConfigurationError
from .logger_utils import LoggerUtils
# Third-party imports
import tomlkit
from tomlkit.exceptions import ParseError

# A schema maps each key either to a nested schema (a table) or to (accepted types, required)
Schema = Dict[str, Union["Schema", Tuple[Tuple[type, ...], bool]]]


class ConfigUtils:
    """
    Utility class for handling TOML configuration files.
    """

    @staticmethod
    def _table_for(doc: tomlkit.TOMLDocument, dotted: str) -> Tuple[Any, str]:
        """Returns the (possibly new) table holding a dotted parameter and the leaf key."""
        *tables, leaf = dotted.split(".")
        container = doc
        for name in tables:
            if name not in container:
                container[name] = tomlkit.table()
            container = container[name]
        return container, leaf

    @staticmethod
    def _add_items(doc: tomlkit.TOMLDocument, items: List[Dict[str, Any]]) -> None:
        for item in items:
            container, leaf = ConfigUtils._table_for(doc, item['parameter'])
            description = item['description']
            if description:
                container.add(tomlkit.comment(description))
            container[leaf] = tomlkit.item(item['default_value'])

    @staticmethod
    def _has(doc: Any, dotted: str) -> bool:
        container = doc
        for name in dotted.split("."):
            if not isinstance(container, dict) or name not in container:
                return False
            container = container[name]
        return True

    @staticmethod
    def generate_template_config_file(config_template: List[Dict[str, Any]], output_path: str,
                                      logger: Optional[logging.Logger] = None) -> None:
        """
        Generates or updates a TOML configuration file from a template using tomlkit.

        If output_path does not exist, a new file is written from the template
        with each description as a comment above its parameter. If it exists,
        its formatting and comments are kept and only the parameters it lacks
        are added. Dotted parameter names ("spectrum.tau_minus") go into tables.

        Each item in the template list is a dictionary with keys:
        'parameter': Name of the parameter (str, dots for nesting).
        'default_value': The default value for the parameter.
        'description': A description (comment) for the parameter (str).

        Args:
            config_template: A list of dictionaries defining the configuration parameters.
            output_path: The path where the TOML file will be saved or updated.
            logger: Optional logger instance.

        Raises:
            ConfigurationError: If the path does not end with '.toml', the existing
                                file is not valid TOML, or a template item lacks a key.
            OSError: If the file cannot be read or written.
        """
        logger = logger or LoggerUtils.get_logger()
        if not output_path.lower().endswith('.toml'):
            raise ConfigurationError("The output file must have a .toml extension.")
        try:
            if os.path.exists(output_path):
                doc = ConfigUtils.load_config_file(output_path, logger)
                items_to_add = [item for item in config_template if not ConfigUtils._has(doc, item['parameter'])]
                if not items_to_add:
                    logger.info(f"[CONFIG] {output_path} already holds every template parameter")
                    return
                doc.add(tomlkit.nl())
                doc.add(tomlkit.comment("--- Parameters added from the template ---"))
                ConfigUtils._add_items(doc, items_to_add)
                logger.info(f"[CONFIG] Added {len(items_to_add)} parameters to {output_path}")
            else:
                doc = tomlkit.document()
                ConfigUtils._add_items(doc, config_template)
                logger.info(f"[CONFIG] Template written to {output_path}")
        except KeyError as e:
            raise ConfigurationError(f"Missing key in config_template item: {e}") from e
        try:
            with open(output_path, 'w', encoding='utf-8') as f:
                f.write(tomlkit.dumps(doc))
        except OSError as e:
            logger.error(f"[CONFIG] Error writing config file {output_path}: {e}")
            raise

    @staticmethod
    def load_config_file(config_path: str, logger: Optional[logging.Logger] = None) -> tomlkit.TOMLDocument:
        """
        Loads configuration parameters from a TOML file using tomlkit.

        Args:
            config_path: The path to the TOML configuration file.
            logger: Optional logger instance.

        Returns:
            A tomlkit.TOMLDocument object containing the data and formatting
            from the TOML file. Behaves like a dictionary.

        Raises:
            ConfigurationError: If the path does not end with '.toml' or the content is not valid TOML.
            FileNotFoundError: If the config file doesn't exist.
        """
        logger = logger or LoggerUtils.get_logger()
        if not str(config_path).lower().endswith('.toml'):
            raise ConfigurationError("The configuration file must have a .toml extension.")
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                return tomlkit.load(f)
        except FileNotFoundError:
            logger.error(f"[CONFIG] Configuration file not found at {config_path}")
            raise
        except ParseError as e:
            logger.error(f"[CONFIG] Could not parse TOML file at {config_path}")
            raise ConfigurationError(f"Invalid TOML in {config_path}: {e}") from e

    @staticmethod
    def validate(document: Dict[str, Any], schema: Schema, prefix: str = "") -> None:
        """
        Checks a plain nested dictionary against a schema.

        Unknown keys, missing required keys and values of the wrong type are
        rejected. Integers are accepted where floats are expected; booleans never are.

        Raises:
            ConfigurationError: With the dotted path of the offending field.
        """
        for key in document:
            if key not in schema:
                raise ConfigurationError("Unknown field.", f"{prefix}{key}")
        for key, rule in schema.items():
            path = f"{prefix}{key}"
            if isinstance(rule, dict):
                if key not in document:
                    continue
                if not isinstance(document[key], dict):
                    raise ConfigurationError("Expected a table.", path)
                ConfigUtils.validate(document[key], rule, f"{path}.")
                continue
            types, required = rule
            if key not in document:
                if required:
                    raise ConfigurationError("Missing required field.", path)
                continue
            value = document[key]
            accepted = types + (int,) if float in types else types
            if isinstance(value, bool) and bool not in types:
                raise ConfigurationError(f"Expected {' or '.join(t.__name__ for t in types)}, got a boolean.", path)
            if not isinstance(value, accepted):
                raise ConfigurationError(
                    f"Expected {' or '.join(t.__name__ for t in types)}, got {type(value).__name__}.", path)


if __name__ == "__main__":
    # Example usage
    config_template = [
        {'parameter': 'mode', 'default_value': 'type_a', 'description': 'classical | type_a | type_b | type_b_postponed'},
        {'parameter': 'spectrum.wavelength_nm', 'default_value': 1550.0, 'description': 'Center wavelength (nm).'},
        {'parameter': 'spectrum.tau_minus', 'default_value': 1.0, 'description': 'Downconversion time (fs).'},
    ]
    ConfigUtils.generate_template_config_file(config_template, "example_config.toml")
    loaded = ConfigUtils.load_config_file("example_config.toml")
    ConfigUtils.validate(loaded.unwrap(), {"mode": ((str,), True),
                                           "spectrum": {"wavelength_nm": ((float,), False), "tau_minus": ((float,), False)}})
    print(loaded)
