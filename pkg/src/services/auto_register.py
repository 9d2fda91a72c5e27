from __future__ import annotations

import importlib
import json
import logging
import pkgutil
import traceback
from pathlib import Path
from types import ModuleType
from typing import Any, Dict, Iterable, List, Optional

from src.lib import inverter_registry
from src.lib.base_inverter import BaseInverter

logger = logging.getLogger(__name__)

DEFAULT_PACKAGES = ("src.lib.inverters",)


class AutoRegisterError(RuntimeError):
    """Raised when auto-registration finds one or more problems.

    The exception carries a `failures` attribute which is a list of dicts
    with the keys: `module`, `type`, and `message` for programmatic
    inspection.
    """

    def __init__(self, failures: List[Dict[str, Any]]):
        self.failures = failures
        msgs = [f"{f.get('module')}: {f.get('type')}: {f.get('message')}" for f in failures]
        msg_text = "Auto-registration found problems:\n"
        msg_text += "\n".join(msgs[:20])
        super(AutoRegisterError, self).__init__(msg_text)


def discover_inverter_modules(packages: Iterable[str]) -> List[str]:
    """Return dotted names of the non-private modules in each package."""
    names: List[str] = []
    for package in packages:
        pkg = importlib.import_module(package)
        for info in pkgutil.iter_modules(getattr(pkg, "__path__", [])):
            if not info.name.startswith("_"):
                names.append(f"{package}.{info.name}")
    return sorted(names)


def _register_if_absent(name: str, inverter: BaseInverter, namespace: Optional[str] = None) -> None:
    # auto-registration is idempotent: names claimed earlier are left alone
    qualified = inverter_registry._qualify(namespace, name)
    if inverter_registry.get(qualified) is None:
        inverter_registry.register(name, inverter, namespace=namespace)


def _register_module(mod: ModuleType) -> None:
    if hasattr(mod, "INVERTER"):
        inverter = getattr(mod, "INVERTER")
        _register_if_absent(getattr(inverter, "name", mod.__name__.rsplit(".", 1)[-1]), inverter)
    elif callable(getattr(mod, "register", None)):
        mod.register(_register_if_absent)
    else:
        raise LookupError("module does not export INVERTER or register()")


def auto_register_inverters(
    packages: Iterable[str] | None = None,
    diagnostics_path: Optional[Path] = None,
) -> List[str]:
    """Discover and register inverse-Ising methods.

    Each module in the searched packages must export an `INVERTER` instance
    or a `register(register)` callable. Returns the registered names.
    """
    failures: List[Dict[str, Any]] = []
    for module_name in discover_inverter_modules(packages or DEFAULT_PACKAGES):
        try:
            mod = importlib.import_module(module_name)
        except Exception as exc:
            failures.append(
                {
                    "module": module_name,
                    "type": "import",
                    "message": str(exc),
                    "traceback": traceback.format_exc(),
                }
            )
            continue
        try:
            _register_module(mod)
        except LookupError as exc:
            failures.append({"module": module_name, "type": "no_entrypoint", "message": str(exc)})
        except Exception as exc:
            failures.append(
                {
                    "module": module_name,
                    "type": "register",
                    "message": str(exc),
                    "traceback": traceback.format_exc(),
                }
            )

    if failures:
        if diagnostics_path is not None:
            try:
                diagnostics_path.parent.mkdir(parents=True, exist_ok=True)
                diagnostics_path.write_text(json.dumps(failures, indent=2), encoding="utf8")
            except Exception:
                # Don't mask the primary error if diagnostics writing fails.
                pass
        raise AutoRegisterError(failures)

    names = inverter_registry.list_inverters()
    logger.debug("registered inverters: %s", ", ".join(names))
    return names
