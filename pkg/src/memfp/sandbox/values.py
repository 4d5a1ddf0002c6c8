"""Runtime value model and canonical value serialization.

Values: Python float (Number), str (String), bool (Boolean), None (null),
the UNDEFINED singleton, JSObject/JSArray, and JSFunction.  Canonical
serialization is total over all of them and is the single format frozen
into invariant logs.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

from ..util import fnv1a64_str, hex16

_STRING_BYTE_LIMIT = 256
_STRUCT_DEPTH = 3


class _Undefined:
    _instance: Optional["_Undefined"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"


UNDEFINED = _Undefined()


class JSObject:
    __slots__ = ("props", "proto", "class_name")

    def __init__(self, proto: Optional["JSObject"] = None, class_name: str = "Object"):
        self.props: dict[str, object] = {}
        self.proto = proto
        self.class_name = class_name

    def get(self, name: str):
        obj: Optional[JSObject] = self
        while obj is not None:
            if name in obj.props:
                return obj.props[name]
            obj = obj.proto
        return UNDEFINED

    def has(self, name: str) -> bool:
        obj: Optional[JSObject] = self
        while obj is not None:
            if name in obj.props:
                return True
            obj = obj.proto
        return False


class JSArray(JSObject):
    __slots__ = ("elements",)

    def __init__(self, elements: Optional[list] = None):
        super().__init__(None, "Array")
        self.elements: list = elements if elements is not None else []


class JSFunction:
    """User function (closure over its defining environment) or native."""

    __slots__ = ("node", "env", "name", "loc", "orig_name", "native", "props")

    def __init__(
        self,
        node=None,
        env=None,
        name: str = "",
        loc: str = "",
        orig_name: str = "",
        native: Optional[Callable] = None,
    ):
        self.node = node
        self.env = env
        self.name = name
        self.loc = loc
        self.orig_name = orig_name
        self.native = native
        self.props: dict[str, object] = {}

    @property
    def is_native(self) -> bool:
        return self.native is not None

    def prototype(self) -> JSObject:
        proto = self.props.get("prototype")
        if not isinstance(proto, JSObject):
            proto = JSObject()
            self.props["prototype"] = proto
        return proto


def canon_num(value: float) -> str:
    """Canonical number text: integers in decimal, else 17 significant
    digits; NaN/Infinity by name; negative zero collapses to "0"."""
    if isinstance(value, bool):
        value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if value == 0.0:
        return "0"
    if float(value).is_integer() and abs(value) < 2**63:
        return str(int(value))
    return format(value, ".17g")


def canon_str(value: str) -> str:
    raw = value.encode("utf-8")
    if len(raw) <= _STRING_BYTE_LIMIT:
        return value
    prefix = raw[:_STRING_BYTE_LIMIT].decode("utf-8", errors="ignore")
    return f"{prefix}…{len(raw)}:{hex16(fnv1a64_str(value))}"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _struct_text(value, depth: int, seen: set[int], name_sink: Optional[set[str]]) -> str:
    if isinstance(value, JSArray):
        if id(value) in seen:
            return "↺"
        if depth >= _STRUCT_DEPTH:
            return "…"
        seen.add(id(value))
        inner = ",".join(_struct_text(e, depth + 1, seen, name_sink) for e in value.elements)
        seen.discard(id(value))
        return f"[{inner}]"
    if isinstance(value, JSObject):
        if id(value) in seen:
            return "↺"
        if depth >= _STRUCT_DEPTH:
            return "…"
        seen.add(id(value))
        parts = []
        for key in sorted(value.props):
            if name_sink is not None:
                name_sink.add(key)
            parts.append(f"{key}:{_struct_text(value.props[key], depth + 1, seen, name_sink)}")
        seen.discard(id(value))
        return "{" + ",".join(parts) + "}"
    if isinstance(value, JSFunction):
        return _fn_text(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return canon_num(float(value))
    if isinstance(value, str):
        return _quote(canon_str(value))
    if value is None:
        return "null"
    return "undefined"


def _fn_text(fn: JSFunction) -> str:
    if fn.is_native:
        return f"fn:native:{fn.name}"
    return f"fn:{fn.loc or fn.name or 'anonymous'}"


def canonicalize_value(value, name_sink: Optional[set[str]] = None) -> tuple[str, str]:
    """Total canonical serialization: (canonical string, type tag).

    Objects and arrays serialize to depth-3 key-sorted structural text
    which is then replaced by ``obj:`` plus its 16-hex content hash; the
    optional name_sink collects property names encountered on the way.
    """
    if value is UNDEFINED:
        return "undefined", "Undefined"
    if value is None:
        return "null", "Null"
    if isinstance(value, bool):
        return ("true" if value else "false"), "Boolean"
    if isinstance(value, (int, float)):
        return canon_num(float(value)), "Number"
    if isinstance(value, str):
        return canon_str(value), "String"
    if isinstance(value, JSFunction):
        return _fn_text(value), "Function"
    if isinstance(value, JSArray):
        text = _struct_text(value, 0, set(), name_sink)
        return f"obj:{hex16(fnv1a64_str(text))}", "Array"
    if isinstance(value, JSObject):
        text = _struct_text(value, 0, set(), name_sink)
        return f"obj:{hex16(fnv1a64_str(text))}", "Object"
    raise TypeError(f"not a runtime value: {value!r}")  # pragma: no cover
