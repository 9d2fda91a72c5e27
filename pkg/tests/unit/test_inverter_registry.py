import pytest

from src.lib import inverter_registry
from src.lib.base_inverter import BaseInverter
from src.models.inversion_options import InversionReport


class _Dummy(BaseInverter):
    def invert(self, spins, options) -> InversionReport:
        raise NotImplementedError


def test_register_get_and_list(fresh_registry):
    dummy = _Dummy("dummy")
    inverter_registry.register("dummy", dummy)
    assert inverter_registry.get("dummy") is dummy
    assert inverter_registry.list_inverters() == ["dummy"]


def test_duplicate_names_are_rejected(fresh_registry):
    inverter_registry.register("dummy", _Dummy("dummy"))
    with pytest.raises(RuntimeError):
        inverter_registry.register("dummy", _Dummy("dummy"))


def test_namespaces_qualify_names(fresh_registry):
    inverter_registry.register("dummy", _Dummy("dummy"), namespace="lab")
    assert inverter_registry.get("lab:dummy") is not None
    assert inverter_registry.get("dummy") is None


def test_get_inverter_registers_builtins_on_demand(fresh_registry):
    assert inverter_registry.get("tap") is None
    assert inverter_registry.get_inverter("tap").name == "tap"
    assert {"exact", "nmf", "rplm", "tanaka", "tap"} <= set(inverter_registry.list_inverters())
    with pytest.raises(KeyError):
        inverter_registry.get_inverter("boltzmann")
