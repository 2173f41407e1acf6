"""
Протоколы: граф протокола, встроенные протоколы и загрузка пользовательских.
"""

from dataclasses import replace
from functools import lru_cache
from pathlib import Path

from dsampler.errors import ProtocolError
from dsampler.protocols.custom import load_protocol_file
from dsampler.protocols.det_prep import steane_det_prep
from dsampler.protocols.flag_prep import steane_flag_prep
from dsampler.protocols.ghz import ghz_protocol
from dsampler.protocols.graph import (
    END,
    Next,
    ProtocolGraph,
    ProtocolReport,
    Terminate,
    execute,
    validate,
)

# Встроенные протоколы по именам для CLI
BUILTIN_PROTOCOLS = {
    "ghz": ghz_protocol,
    "steane-det-0": steane_det_prep,
    "steane-flag-0": steane_flag_prep,
}


@lru_cache(maxsize=None)
def get_protocol(ref: str) -> ProtocolGraph:
    """
    Протокол по имени встроенного или пути к файлу описания.

    Raises:
        ProtocolError: если имя неизвестно и файла нет
    """
    if ref in BUILTIN_PROTOCOLS:
        return replace(BUILTIN_PROTOCOLS[ref](), source=ref)
    path = Path(ref)
    if path.is_file():
        return load_protocol_file(path)
    known = ", ".join(sorted(BUILTIN_PROTOCOLS))
    raise ProtocolError(f"Неизвестный протокол {ref!r}. Встроенные: {known}")


__all__ = [
    "BUILTIN_PROTOCOLS",
    "END",
    "Next",
    "ProtocolGraph",
    "ProtocolReport",
    "Terminate",
    "execute",
    "get_protocol",
    "load_protocol_file",
    "validate",
]
