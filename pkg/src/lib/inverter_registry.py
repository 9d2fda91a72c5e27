from __future__ import annotations

from threading import RLock
from typing import Dict, List, Optional

from src.lib.base_inverter import BaseInverter

_registry: Dict[str, BaseInverter] = {}
_lock = RLock()


def _qualify(namespace: Optional[str], name: str) -> str:
    if namespace:
        return f"{namespace}:{name}"
    return name


def register(name: str, inverter: BaseInverter, namespace: Optional[str] = None) -> None:
    """Register an inverter by name (optionally namespaced).

    Raises RuntimeError if the name is already registered.
    """
    q = _qualify(namespace, name)
    with _lock:
        if q in _registry:
            raise RuntimeError(f"inverter already registered: {q}")
        _registry[q] = inverter


def get(name: str) -> Optional[BaseInverter]:
    """Return the registered inverter or None."""
    with _lock:
        return _registry.get(name)


def get_inverter(name: str) -> BaseInverter:
    """Return the inverter for `name`, auto-registering built-ins on first use."""
    inverter = get(name)
    if inverter is None:
        # late import: auto_register imports the inverter modules, which import this one
        from src.services.auto_register import auto_register_inverters

        auto_register_inverters()
        inverter = get(name)
    if inverter is None:
        raise KeyError(f"no inverter registered for method={name!r}; known: {list_inverters()}")
    return inverter


def list_inverters() -> List[str]:
    with _lock:
        return sorted(_registry.keys())


def clear_registry() -> None:
    """Clear all registered inverters (useful for tests)."""
    with _lock:
        _registry.clear()
