"""Bundled scenario files."""
from importlib import resources
from pathlib import Path

NAMES = ("amplifier", "flying_elefant", "raven", "tiger", "tree_felling",
         "tree_felling_soft", "tweety", "umbrella")


def path(name: str) -> Path:
    """Filesystem path of a bundled file; ``.psm`` is appended when no suffix is given."""
    if "." not in name:
        name += ".psm"
    return Path(str(resources.files(__name__).joinpath(name)))


def all_paths() -> list[Path]:
    return [path(n) for n in NAMES]
