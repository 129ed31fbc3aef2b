"""
Crystal Catalog Loader
Reads one JSON file per crystal from the catalog directory
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional

import orjson
from pydantic import ValidationError

from spdcopt.config import get_catalog_dir
from spdcopt.errors import ConfigurationError, UnknownCrystalError
from spdcopt.models.crystal import CrystalSpec

logger = logging.getLogger(__name__)


def load_crystal_file(path: Path) -> CrystalSpec:
    """
    Parse and validate one catalog file

    Args:
        path: JSON file following schemas/catalog.md

    Returns:
        Validated crystal spec
    """
    try:
        data = orjson.loads(Path(path).read_bytes())
        return CrystalSpec.model_validate(data)
    except (orjson.JSONDecodeError, ValidationError) as e:
        raise ConfigurationError(f"invalid catalog file {path}: {e}") from e


class Catalog:
    """Crystal catalog manager, cached per directory"""

    _cache: Dict[Path, Dict[str, CrystalSpec]] = {}

    @classmethod
    def load(cls, directory: Optional[Path] = None) -> Dict[str, CrystalSpec]:
        """Load every *.json crystal in the directory"""
        directory = Path(directory or get_catalog_dir()).resolve()
        if directory in cls._cache:
            return cls._cache[directory]

        if not directory.is_dir():
            raise ConfigurationError(f"catalog directory not found: {directory}")

        crystals: Dict[str, CrystalSpec] = {}
        for path in sorted(directory.glob("*.json")):
            crystal = load_crystal_file(path)
            crystals[crystal.name.lower()] = crystal
        logger.info(f"✅ Loaded {len(crystals)} crystals from {directory}")

        cls._cache[directory] = crystals
        return crystals

    @classmethod
    def get(cls, name: str, directory: Optional[Path] = None) -> CrystalSpec:
        """Get one crystal by (case-insensitive) name"""
        crystals = cls.load(directory)
        try:
            return crystals[name.lower()]
        except KeyError:
            raise UnknownCrystalError(
                f"unknown crystal '{name}' (catalog has: {', '.join(crystals) or 'none'})"
            ) from None

    @classmethod
    def names(cls, directory: Optional[Path] = None) -> List[str]:
        return list(cls.load(directory))

    @classmethod
    def clear(cls) -> None:
        """Forget cached directories"""
        cls._cache.clear()
