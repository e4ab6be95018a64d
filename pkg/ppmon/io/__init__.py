from ._persist import dump, dumps, get_untrusted_types, load, loads
from ._trusted_types import trust_types

__all__ = ["dump", "dumps", "get_untrusted_types", "load", "loads", "trust_types"]
