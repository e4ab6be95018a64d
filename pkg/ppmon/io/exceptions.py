class UnsupportedTypeException(TypeError):
    """Raise when an object of this type is known to be unsupported"""

    def __init__(self, obj):
        super().__init__(
            f"Objects of type {obj.__class__.__name__} are not supported yet."
        )


class UntrustedTypesFoundException(TypeError):
    """Raise when some untrusted objects are found in the file."""

    def __init__(self, unsafe):
        super().__init__(f"Untrusted types found in the file: {sorted(unsafe)}.")


class ModelVersionError(ValueError):
    """Raise when a file was written with a newer persistence protocol."""

    def __init__(self, protocol, supported, version=None):
        written_by = f" by ppmon {version}" if version else ""
        super().__init__(
            f"The file was written{written_by} with protocol {protocol}, this "
            f"version of ppmon reads protocols up to {supported}."
        )
        self.protocol = protocol


class CorruptModelError(ValueError):
    """Raise when a file is not a readable ppmon archive."""
