from __future__ import annotations

import importlib
import io
import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, BinaryIO, Iterator, Sequence
from zipfile import ZIP_DEFLATED, BadZipFile, ZipFile

from packaging.version import InvalidVersion, Version

import ppmon

from ._audit import NODE_TYPE_MAPPING, Node, audit_tree, get_tree
from ._protocol import PROTOCOL
from ._utils import LoadContext, SaveContext, _get_state, get_state
from .exceptions import CorruptModelError, ModelVersionError

logger = logging.getLogger(__name__)

# register the dispatch functions of every state module
for module_name in ["._general", "._numpy"]:
    module = importlib.import_module(module_name, package="ppmon.io")
    for cls, method in getattr(module, "GET_STATE_DISPATCH_FUNCTIONS", []):
        _get_state.register(cls)(method)
    NODE_TYPE_MAPPING.update(module.NODE_TYPE_MAPPING)


def _save(obj: Any, compression: int) -> io.BytesIO:
    buffer = io.BytesIO()

    with ZipFile(buffer, "w", compression=compression) as zip_file:
        save_context = SaveContext(zip_file=zip_file)
        state = get_state(obj, save_context)
        save_context.clear_memo()

        state["protocol"] = save_context.protocol
        state["_ppmon_version"] = ppmon.__version__
        save_context.write_member("schema.json", json.dumps(state, indent=2))

    return buffer


def dump(
    obj: Any, file: str | Path | BinaryIO, *, compression: int = ZIP_DEFLATED
) -> None:
    """Save an object in the ppmon persistence format.

    The file is a zip archive holding ``schema.json``, a json document
    describing the object, and one ``.npy`` member per numpy array. Saving the
    same object twice gives byte-identical files.

    Parameters
    ----------
    obj: object
        The object to be saved, usually a trained
        :class:`~ppmon.pipeline.PredictiveModel`.

    file: str, path, or file-like object
        The file name or a binary file object to write to.

    compression: int, default=zipfile.ZIP_DEFLATED
        The compression method to use. See :class:`zipfile.ZipFile` for more
        information.
    """
    buffer = _save(obj, compression=compression)

    if isinstance(file, (str, Path)):
        with open(file, "wb") as f:
            f.write(buffer.getbuffer())
    else:
        file.write(buffer.getbuffer())


def dumps(obj: Any, *, compression: int = ZIP_DEFLATED) -> bytes:
    """Save an object in the ppmon persistence format as a bytes object."""
    buffer = _save(obj, compression=compression)
    return buffer.getbuffer().tobytes()


@contextmanager
def _open_tree(
    source: str | Path | BinaryIO, trusted: bool | Sequence[str]
) -> Iterator[Node]:
    """Read the node tree of an archive, keeping the archive open while the
    caller constructs it."""
    try:
        with ZipFile(source, "r") as zip_file:
            schema = json.loads(zip_file.read("schema.json"))
            protocol = schema["protocol"]
            version = schema.get("_ppmon_version")
            if protocol > PROTOCOL:
                raise ModelVersionError(protocol, PROTOCOL, version)
            _check_version(version)

            load_context = LoadContext(src=zip_file, protocol=protocol)
            yield get_tree(schema, load_context, trusted=trusted)
    except (BadZipFile, EOFError, json.JSONDecodeError, KeyError) as exc:
        raise CorruptModelError(f"Cannot read the model file: {exc!r}") from exc
    except OSError as exc:
        if isinstance(source, (str, Path)) and not Path(source).exists():
            raise
        raise CorruptModelError(f"Cannot read the model file: {exc!r}") from exc


def _check_version(version: str | None) -> None:
    try:
        written_by = Version(version or "0")
    except InvalidVersion:
        logger.warning(f"The file carries an invalid ppmon version {version!r}")
        return
    if written_by > Version(ppmon.__version__):
        logger.warning(
            f"The file was written by ppmon {written_by}, newer than the running "
            f"{ppmon.__version__}"
        )


def load(file: str | Path | BinaryIO, trusted: bool | Sequence[str] = False) -> Any:
    """Load an object saved in the ppmon persistence format.

    Nothing is imported or instantiated before the whole file has been
    audited: every type it names must be trusted.

    Parameters
    ----------
    file: str, path, or file-like object
        The file name of the object to be loaded.

    trusted: bool, or list of str, default=False
        If ``True``, the object will be loaded without any security checks. If
        ``False``, only ppmon's own classes, numpy arrays and builtins are
        allowed. If a list of strings, the types listed are allowed as well.

    Returns
    -------
    instance: object
        The loaded object.

    Raises
    ------
    ModelVersionError
        If the file was written with a newer protocol.

    CorruptModelError
        If the file is not a ppmon archive, or is truncated or incomplete.

    UntrustedTypesFoundException
        If the file names types that are not trusted.
    """
    with _open_tree(file, trusted) as tree:
        audit_tree(tree)
        return tree.construct()


def loads(data: bytes, trusted: bool | Sequence[str] = False) -> Any:
    """Load an object saved in the ppmon persistence format from a bytes
    object. See :func:`load`."""
    if isinstance(data, str):
        raise TypeError("Can't load ppmon format from string, pass bytes")

    return load(io.BytesIO(data), trusted=trusted)


def get_untrusted_types(
    *, data: bytes | None = None, file: str | Path | None = None
) -> list[str]:
    """Get a list of untrusted types in a ppmon dump.

    Parameters
    ----------
    data: bytes
        The data to be checked, in bytes format.

    file: str or Path
        The file to be checked.

    Returns
    -------
    untrusted_types: list of str
        The list of untrusted types in the dump.

    Notes
    -----
    Only one of data or file should be passed.
    """
    if data and file:
        raise ValueError("Only one of data or file should be passed.")
    if not data and not file:
        raise ValueError("Exactly one of data or file should be passed.")

    source = io.BytesIO(data) if data else file
    with _open_tree(source, trusted=False) as tree:  # type: ignore[arg-type]
        untrusted_types = tree.get_unsafe_set()

    return sorted(untrusted_types)
