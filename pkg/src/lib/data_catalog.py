"""Data directory access and singleton management."""
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from src.lib.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_DATA_DIR = Path(__file__).resolve().parents[2] / "data"

ModelT = TypeVar("ModelT", bound=BaseModel)


def parse_model(model_cls: Type[ModelT], data: Any, source: str) -> ModelT:
    """
    Validate `data` into `model_cls`, reporting failures as ConfigError.

    Args:
        model_cls: Pydantic model to build
        data: Raw mapping (usually parsed JSON)
        source: Where the data came from, for the error message
    """
    try:
        return model_cls.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid {model_cls.__name__} in {source}: {e}") from e


class DataCatalog:
    """Read-only view of the JSON data files, each parsed at most once."""

    def __init__(self, data_dir: Optional[Path] = None):
        """
        Args:
            data_dir: Directory holding the data files (defaults to NOVA_DATA_DIR, then <repo>/data)
        """
        env_dir = os.getenv("NOVA_DATA_DIR")
        self.data_dir = Path(data_dir or env_dir or DEFAULT_DATA_DIR)
        if not self.data_dir.is_dir():
            raise ConfigError(f"Data directory not found: {self.data_dir}")
        self._documents: Dict[str, Any] = {}

    def document(self, name: str) -> Any:
        """Parsed contents of <data_dir>/<name>.json."""
        if name not in self._documents:
            path = self.data_dir / f"{name}.json"
            try:
                with open(path, encoding="utf-8") as handle:
                    self._documents[name] = json.load(handle)
            except FileNotFoundError as e:
                raise ConfigError(f"Data file missing: {path}") from e
            except json.JSONDecodeError as e:
                raise ConfigError(f"Data file {path} is not valid JSON: {e}") from e
            logger.debug(f"Loaded data file {path}")
        return self._documents[name]

    def path(self, name: str) -> Path:
        return self.data_dir / f"{name}.json"


# Global catalog instance
_catalog_instance: Optional[DataCatalog] = None


def get_data_catalog() -> DataCatalog:
    """Get or create the global data catalog."""
    global _catalog_instance
    if _catalog_instance is None:
        _catalog_instance = DataCatalog()
        logger.info(f"Data catalog initialized: {_catalog_instance.data_dir}")
    return _catalog_instance


def reset_data_catalog() -> None:
    """Drop the global catalog so the next access re-reads the data directory."""
    global _catalog_instance
    _catalog_instance = None
