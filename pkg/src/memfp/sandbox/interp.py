"""Tree-walking interpreter for the supported ECMAScript subset.

Executes parsed (or normalized/instrumented) syntax trees against an
injected set of host globals.  All nondeterminism lives in the host
layer; the interpreter itself is a pure function of (tree, globals,
fuel).  Execution cost is metered by a deterministic fuel counter so
runaway programs cut off at the same point on every run.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

from ..source.jsast import Node
from .values import UNDEFINED, JSArray, JSFunction, JSObject, canon_num

_MAX_CALL_DEPTH = 250


class JSThrow(Exception):
    """A thrown subject-language value."""

    def __init__(self, value):
        self.value = value
        super().__init__()


class OutOfFuel(Exception):
    """Deterministic execution budget exhausted."""


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class Env:
    __slots__ = ("vars", "parent")

    def __init__(self, parent: Optional["Env"] = None):
        self.vars: dict[str, object] = {}
        self.parent = parent

    def lookup_env(self, name: str) -> Optional["Env"]:
        env: Optional[Env] = self
        while env is not None:
            if name in env.vars:
                return env
            env = env.parent
        return None


def _collect_decls(node: Node, var_names: list[str], funcs: list[Node]) -> None:
    if node.kind == "VarDecl":
        for decl in node.children:
            var_names.append(decl.children[0].token)
    elif node.kind == "FuncDecl":
        funcs.append(node)
        return
    elif node.kind == "FuncExpr":
        return
    for child in node.children:
        _collect_decls(child, var_names, funcs)


def to_number(value) -> float:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        if text == "":
            return 0.0
        try:
            if text.startswith(("0x", "0X")):
                return float(int(text, 16))
            return float(text)
        except ValueError:
            return math.nan
    if value is None:
        return 0.0
    if value is UNDEFINED:
        return math.nan
    if isinstance(value, JSArray):
        if not value.elements:
            return 0.0
        if len(value.elements) == 1:
            return to_number(value.elements[0])
        return math.nan
    return math.nan


def to_string(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return canon_num(float(value))
    if isinstance(value, str):
        return value
    if value is None:
        return "null"
    if value is UNDEFINED:
        return "undefined"
    if isinstance(value, JSFunction):
        return f"function {value.name or ''}() {{ [code] }}"
    if isinstance(value, JSArray):
        return ",".join(
            "" if (e is None or e is UNDEFINED) else to_string(e) for e in value.elements
        )
    return "[object Object]"


def to_primitive(value):
    if isinstance(value, (JSArray,)):
        return to_string(value)
    if isinstance(value, JSFunction):
        return to_string(value)
    if isinstance(value, JSObject):
        return "[object Object]"
    return value


def truthy(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return value != 0 and not math.isnan(value)
    if isinstance(value, str):
        return value != ""
    if value is None or value is UNDEFINED:
        return False
    return True


def to_int32(value) -> int:
    num = to_number(value)
    if math.isnan(num) or math.isinf(num):
        return 0
    n = int(num) % (1 << 32)
    return n - (1 << 32) if n >= (1 << 31) else n


def to_uint32(value) -> int:
    num = to_number(value)
    if math.isnan(num) or math.isinf(num):
        return 0
    return int(num) % (1 << 32)


def strict_eq(a, b) -> bool:
    if a is UNDEFINED or b is UNDEFINED:
        return a is b
    if a is None or b is None:
        return a is b
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return float(a) == float(b)
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return a is b


def loose_eq(a, b) -> bool:
    null_like = (None, UNDEFINED)
    if (a in null_like if not isinstance(a, (JSObject, JSFunction)) else False) or (
        b in null_like if not isinstance(b, (JSObject, JSFunction)) else False
    ):
        return (a is None or a is UNDEFINED) and (b is None or b is UNDEFINED)
    if isinstance(a, bool):
        return loose_eq(to_number(a), b)
    if isinstance(b, bool):
        return loose_eq(a, to_number(b))
    if isinstance(a, (int, float)) and isinstance(b, str):
        return float(a) == to_number(b)
    if isinstance(a, str) and isinstance(b, (int, float)):
        return to_number(a) == float(b)
    if isinstance(a, (JSObject, JSFunction)) and isinstance(b, (JSObject, JSFunction)):
        return a is b
    if isinstance(a, (JSObject, JSFunction)):
        return loose_eq(to_primitive(a), b)
    if isinstance(b, (JSObject, JSFunction)):
        return loose_eq(a, to_primitive(b))
    return strict_eq(a, b)


class Interpreter:
    """Evaluator over one global environment.

    The host (executor) populates ``global_env`` with shims, installs an
    ``eval_hook``, and drives the program's entry points.
    """

    def __init__(self, fuel: int = 10_000_000):
        self.global_env = Env()
        self.global_this = JSObject()
        self.fuel = fuel
        self.call_depth = 0
        self.call_counts: dict[str, int] = {}
        self.fn_names: dict[str, str] = {}
        self.eval_hook: Optional[Callable[[str], Node]] = None
        self.eval_texts: list[str] = []

    # -- errors ----------------------------------------------------------

    def throw_error(self, name: str, message: str):
        err = JSObject(class_name="Error")
        err.props["name"] = name
        err.props["message"] = message
        raise JSThrow(err)

    def _burn(self) -> None:
        self.fuel -= 1
        if self.fuel <= 0:
            raise OutOfFuel()

    # -- functions ---------------------------------------------------------

    def make_function(self, node: Node, env: Env) -> JSFunction:
        return JSFunction(
            node=node,
            env=env,
            name=node.token,
            loc=node.meta.get("profile_key", ""),
            orig_name=node.meta.get("orig_name", node.token),
        )

    def call_function(self, fn, this, args: list):
        if not isinstance(fn, JSFunction):
            self.throw_error("TypeError", "value is not a function")
        if fn.is_native:
            return fn.native(self, this, args)
        if self.call_depth >= _MAX_CALL_DEPTH:
            self.throw_error("RangeError", "call stack size exceeded")
        if fn.loc:
            self.call_counts[fn.loc] = self.call_counts.get(fn.loc, 0) + 1
            if fn.orig_name:
                self.fn_names.setdefault(fn.loc, fn.orig_name)
        env = Env(fn.env)
        params = fn.node.children[0].children
        for i, p in enumerate(params):
            env.vars[p.token] = args[i] if i < len(args) else UNDEFINED
        body = fn.node.children[1]
        self._hoist(body, env)
        if this is None or this is UNDEFINED:
            this = self.global_this
        self.call_depth += 1
        try:
            self.exec_stmt(body, env, this)
        except _Return as ret:
            return ret.value
        finally:
            self.call_depth -= 1
        return UNDEFINED

    def construct(self, fn, args: list):
        if not isinstance(fn, JSFunction):
            self.throw_error("TypeError", "value is not a constructor")
        if fn.is_native:
            return fn.native(self, None, args)
        obj = JSObject(proto=fn.prototype())
        result = self.call_function(fn, obj, args)
        if isinstance(result, (JSObject, JSFunction)):
            return result
        return obj

    def _hoist(self, body: Node, env: Env) -> None:
        var_names: list[str] = []
        funcs: list[Node] = []
        for child in body.children:
            _collect_decls(child, var_names, funcs)
        for name in var_names:
            if name not in env.vars:
                env.vars[name] = UNDEFINED
        for fnode in funcs:
            env.vars[fnode.token] = self.make_function(fnode, env)

    # -- program entry -----------------------------------------------------

    def run_program(self, program: Node) -> None:
        self._hoist(program, self.global_env)
        for stmt in program.children:
            self.exec_stmt(stmt, self.global_env, self.global_this)

    def run_eval(self, program: Node, env: Env, this):
        """Direct-eval semantics: declarations join the caller's scope."""
        self._hoist(program, env)
        completion = UNDEFINED
        for stmt in program.children:
            if stmt.kind == "ExprStmt":
                completion = self.eval_expr(stmt.children[0], env, this)
            else:
                self.exec_stmt(stmt, env, this)
        return completion

    # -- statements ----------------------------------------------------------

    def exec_stmt(self, node: Node, env: Env, this) -> None:
        self._burn()
        kind = node.kind
        if kind == "ExprStmt":
            self.eval_expr(node.children[0], env, this)
        elif kind == "VarDecl":
            for decl in node.children:
                if len(decl.children) == 2:
                    value = self.eval_expr(decl.children[1], env, this)
                    self._env_set(env, decl.children[0].token, value)
        elif kind == "Block" or kind == "Program":
            for child in node.children:
                self.exec_stmt(child, env, this)
        elif kind == "If":
            if truthy(self.eval_expr(node.children[0], env, this)):
                self.exec_stmt(node.children[1], env, this)
            elif len(node.children) == 3:
                self.exec_stmt(node.children[2], env, this)
        elif kind == "While":
            while truthy(self.eval_expr(node.children[0], env, this)):
                self._burn()
                try:
                    self.exec_stmt(node.children[1], env, this)
                except _Break:
                    break
                except _Continue:
                    continue
        elif kind == "DoWhile":
            while True:
                self._burn()
                try:
                    self.exec_stmt(node.children[0], env, this)
                except _Break:
                    break
                except _Continue:
                    pass
                if not truthy(self.eval_expr(node.children[1], env, this)):
                    break
        elif kind == "For":
            init, test, update, body = node.children
            if init.kind == "VarDecl":
                self.exec_stmt(init, env, this)
            elif init.kind == "ExprStmt":
                self.eval_expr(init.children[0], env, this)
            while test.kind == "Empty" or truthy(self.eval_expr(test, env, this)):
                self._burn()
                try:
                    self.exec_stmt(body, env, this)
                except _Break:
                    break
                except _Continue:
                    pass
                if update.kind != "Empty":
                    self.eval_expr(update, env, this)
        elif kind == "ForIn":
            self._exec_forin(node, env, this)
        elif kind == "Return":
            value = self.eval_expr(node.children[0], env, this) if node.children else UNDEFINED
            raise _Return(value)
        elif kind == "Break":
            raise _Break()
        elif kind == "Continue":
            raise _Continue()
        elif kind == "FuncDecl" or kind == "Empty":
            pass  # declarations are hoisted
        elif kind == "Switch":
            self._exec_switch(node, env, this)
        elif kind == "Throw":
            raise JSThrow(self.eval_expr(node.children[0], env, this))
        elif kind == "Try":
            self._exec_try(node, env, this)
        else:  # pragma: no cover - exhaustive over statement kinds
            raise ValueError(f"cannot execute kind {kind}")

    def _exec_forin(self, node: Node, env: Env, this) -> None:
        target, obj_expr, body = node.children
        obj = self.eval_expr(obj_expr, env, this)
        keys: list[str]
        if isinstance(obj, JSArray):
            keys = [str(i) for i in range(len(obj.elements))] + list(obj.props)
        elif isinstance(obj, JSObject):
            keys = list(obj.props)
        elif isinstance(obj, str):
            keys = [str(i) for i in range(len(obj))]
        else:
            return
        if target.kind == "VarDecl":
            name = target.children[0].children[0].token
            assign: Callable = lambda k: self._env_set(env, name, k)
        elif target.kind == "Ident":
            assign = lambda k: self._env_set(env, target.token, k)
        else:
            assign = lambda k: self._assign_member(target, k, env, this)
        for key in keys:
            self._burn()
            assign(key)
            try:
                self.exec_stmt(body, env, this)
            except _Break:
                break
            except _Continue:
                continue

    def _exec_switch(self, node: Node, env: Env, this) -> None:
        disc = self.eval_expr(node.children[0], env, this)
        cases = node.children[1:]
        start = None
        for i, case in enumerate(cases):
            if case.kind == "Case" and strict_eq(disc, self.eval_expr(case.children[0], env, this)):
                start = i
                break
        if start is None:
            for i, case in enumerate(cases):
                if case.kind == "Default":
                    start = i
                    break
        if start is None:
            return
        try:
            for case in cases[start:]:
                stmts = case.children[1:] if case.kind == "Case" else case.children
                for stmt in stmts:
                    self.exec_stmt(stmt, env, this)
        except _Break:
            pass

    def _exec_try(self, node: Node, env: Env, this) -> None:
        catch = next((c for c in node.children[1:] if c.kind == "Catch"), None)
        fin = next((c for c in node.children[1:] if c.kind == "Finally"), None)
        try:
            try:
                self.exec_stmt(node.children[0], env, this)
            except JSThrow as exc:
                if catch is None:
                    raise
                cenv = Env(env)
                cenv.vars[catch.children[0].token] = exc.value
                self.exec_stmt(catch.children[1], cenv, this)
        finally:
            if fin is not None:
                self.exec_stmt(fin.children[0], env, this)

    # -- expressions -----------------------------------------------------

    def eval_expr(self, node: Node, env: Env, this):
        self._burn()
        kind = node.kind
        if kind == "Num":
            cached = node.meta.get("numval")
            if cached is None:
                text = node.token
                cached = float(int(text, 16)) if text.startswith(("0x", "0X")) else float(text)
                node.meta["numval"] = cached
            return cached
        if kind == "Str":
            return node.token
        if kind == "Ident":
            owner = env.lookup_env(node.token)
            if owner is None:
                self.throw_error("ReferenceError", f"{node.token} is not defined")
            return owner.vars[node.token]
        if kind == "Bool":
            return node.token == "true"
        if kind == "Null":
            return None
        if kind == "This":
            return this
        if kind == "Binary":
            return self._eval_binary(node, env, this)
        if kind == "Logical":
            left = self.eval_expr(node.children[0], env, this)
            if node.token == "&&":
                return self.eval_expr(node.children[1], env, this) if truthy(left) else left
            return left if truthy(left) else self.eval_expr(node.children[1], env, this)
        if kind == "Assign":
            return self._eval_assign(node, env, this)
        if kind == "Cond":
            test = self.eval_expr(node.children[0], env, this)
            branch = node.children[1] if truthy(test) else node.children[2]
            return self.eval_expr(branch, env, this)
        if kind == "Call":
            return self._eval_call(node, env, this)
        if kind == "New":
            fn = self.eval_expr(node.children[0], env, this)
            args = [self.eval_expr(a, env, this) for a in node.children[1:]]
            return self.construct(fn, args)
        if kind == "Member":
            obj = self.eval_expr(node.children[0], env, this)
            return self.get_member(obj, node.token)
        if kind == "Index":
            obj = self.eval_expr(node.children[0], env, this)
            key = self.eval_expr(node.children[1], env, this)
            return self.get_member(obj, self._index_key(key))
        if kind == "Unary":
            return self._eval_unary(node, env, this)
        if kind == "Update":
            return self._eval_update(node, env, this)
        if kind == "Array":
            return JSArray([self.eval_expr(c, env, this) for c in node.children])
        if kind == "Object":
            obj = JSObject()
            for prop in node.children:
                obj.props[prop.token] = self.eval_expr(prop.children[0], env, this)
            return obj
        if kind == "FuncExpr":
            if node.token:
                wrapper = Env(env)
                fn = self.make_function(node, wrapper)
                wrapper.vars[node.token] = fn
                return fn
            return self.make_function(node, env)
        if kind == "FuncDecl":
            return self.make_function(node, env)
        if kind == "Seq":
            value = UNDEFINED
            for child in node.children:
                value = self.eval_expr(child, env, this)
            return value
        raise ValueError(f"cannot evaluate kind {kind}")  # pragma: no cover

    def _eval_binary(self, node: Node, env: Env, this):
        op = node.token
        left = self.eval_expr(node.children[0], env, this)
        right = self.eval_expr(node.children[1], env, this)
        return self.binary_op(op, left, right)

    def binary_op(self, op: str, left, right):
        if op == "+":
            lp, rp = to_primitive(left), to_primitive(right)
            if isinstance(lp, str) or isinstance(rp, str):
                return to_string(lp) + to_string(rp)
            return to_number(lp) + to_number(rp)
        if op == "-":
            return to_number(left) - to_number(right)
        if op == "*":
            return to_number(left) * to_number(right)
        if op == "/":
            ln, rn = to_number(left), to_number(right)
            if rn == 0:
                if ln == 0 or math.isnan(ln):
                    return math.nan
                sign = math.copysign(1.0, ln) * math.copysign(1.0, rn)
                return math.inf * sign
            return ln / rn
        if op == "%":
            ln, rn = to_number(left), to_number(right)
            if rn == 0 or math.isnan(ln) or math.isinf(ln):
                return math.nan
            if math.isinf(rn):
                return ln
            return math.fmod(ln, rn)
        if op in ("<", ">", "<=", ">="):
            lp, rp = to_primitive(left), to_primitive(right)
            if isinstance(lp, str) and isinstance(rp, str):
                pass
            else:
                lp, rp = to_number(lp), to_number(rp)
                if math.isnan(lp) or math.isnan(rp):
                    return False
            if op == "<":
                return lp < rp
            if op == ">":
                return lp > rp
            if op == "<=":
                return lp <= rp
            return lp >= rp
        if op == "==":
            return loose_eq(left, right)
        if op == "!=":
            return not loose_eq(left, right)
        if op == "===":
            return strict_eq(left, right)
        if op == "!==":
            return not strict_eq(left, right)
        if op == "&":
            return float(_wrap32(to_int32(left) & to_int32(right)))
        if op == "|":
            return float(_wrap32(to_int32(left) | to_int32(right)))
        if op == "^":
            return float(_wrap32(to_int32(left) ^ to_int32(right)))
        if op == "<<":
            return float(_wrap32(to_int32(left) << (to_uint32(right) & 31)))
        if op == ">>":
            return float(to_int32(left) >> (to_uint32(right) & 31))
        if op == ">>>":
            return float(to_uint32(left) >> (to_uint32(right) & 31))
        if op == "instanceof":
            if not isinstance(right, JSFunction):
                self.throw_error("TypeError", "right side of instanceof is not callable")
            if not isinstance(left, JSObject):
                return False
            proto = right.props.get("prototype")
            cur = left.proto
            while cur is not None:
                if cur is proto:
                    return True
                cur = cur.proto
            return False
        if op == "in":
            key = self._index_key(left)
            if isinstance(right, JSArray):
                idx = _array_index(key)
                if idx is not None:
                    return idx < len(right.elements)
                return key == "length" or right.has(key)
            if isinstance(right, JSObject):
                return right.has(key)
            self.throw_error("TypeError", "'in' expects an object")
        raise ValueError(f"unknown operator {op}")  # pragma: no cover

    def _eval_unary(self, node: Node, env: Env, this):
        op = node.token
        operand = node.children[0]
        if op == "typeof":
            if operand.kind == "Ident":
                owner = env.lookup_env(operand.token)
                value = owner.vars[operand.token] if owner else UNDEFINED
            else:
                value = self.eval_expr(operand, env, this)
            return _typeof(value)
        if op == "delete":
            if operand.kind == "Member":
                obj = self.eval_expr(operand.children[0], env, this)
                return self._delete_member(obj, operand.token)
            if operand.kind == "Index":
                obj = self.eval_expr(operand.children[0], env, this)
                key = self._index_key(self.eval_expr(operand.children[1], env, this))
                return self._delete_member(obj, key)
            self.eval_expr(operand, env, this)
            return True
        value = self.eval_expr(operand, env, this)
        if op == "-":
            return -to_number(value)
        if op == "+":
            return to_number(value)
        if op == "!":
            return not truthy(value)
        if op == "~":
            return float(_wrap32(~to_int32(value)))
        if op == "void":
            return UNDEFINED
        raise ValueError(f"unknown unary {op}")  # pragma: no cover

    def _eval_update(self, node: Node, env: Env, this):
        op, pos = node.token.split("_")
        target = node.children[0]
        old = to_number(self._read_target(target, env, this))
        new = old + 1 if op == "++" else old - 1
        self._write_target(target, new, env, this)
        return new if pos == "pre" else old

    def _eval_assign(self, node: Node, env: Env, this):
        target, value_node = node.children
        op = node.token
        if op == "=":
            value = self.eval_expr(value_node, env, this)
        else:
            current = self._read_target(target, env, this)
            rhs = self.eval_expr(value_node, env, this)
            value = self.binary_op(op[:-1], current, rhs)
        self._write_target(target, value, env, this)
        return value

    def _read_target(self, target: Node, env: Env, this):
        if target.kind == "Ident":
            owner = env.lookup_env(target.token)
            if owner is None:
                self.throw_error("ReferenceError", f"{target.token} is not defined")
            return owner.vars[target.token]
        if target.kind == "Member":
            obj = self.eval_expr(target.children[0], env, this)
            return self.get_member(obj, target.token)
        if target.kind == "Index":
            obj = self.eval_expr(target.children[0], env, this)
            key = self.eval_expr(target.children[1], env, this)
            return self.get_member(obj, self._index_key(key))
        raise ValueError("invalid assignment target")  # pragma: no cover

    def _write_target(self, target: Node, value, env: Env, this) -> None:
        if target.kind == "Ident":
            self._env_set(env, target.token, value)
        elif target.kind == "Member":
            obj = self.eval_expr(target.children[0], env, this)
            self.set_member(obj, target.token, value)
        elif target.kind == "Index":
            obj = self.eval_expr(target.children[0], env, this)
            key = self.eval_expr(target.children[1], env, this)
            self.set_member(obj, self._index_key(key), value)

    def _assign_member(self, target: Node, value, env: Env, this) -> None:
        self._write_target(target, value, env, this)

    def _env_set(self, env: Env, name: str, value) -> None:
        owner = env.lookup_env(name)
        if owner is None:
            owner = self.global_env  # sloppy-mode implicit global
        owner.vars[name] = value

    def _eval_call(self, node: Node, env: Env, this):
        callee = node.children[0]
        args = None
        if callee.kind == "Member":
            obj = self.eval_expr(callee.children[0], env, this)
            fn = self.get_member(obj, callee.token)
            recv = obj
        elif callee.kind == "Index":
            obj = self.eval_expr(callee.children[0], env, this)
            key = self.eval_expr(callee.children[1], env, this)
            fn = self.get_member(obj, self._index_key(key))
            recv = obj
        else:
            fn = self.eval_expr(callee, env, this)
            recv = UNDEFINED
            if callee.kind == "Ident" and callee.token == "eval":
                args = [self.eval_expr(a, env, this) for a in node.children[1:]]
                if isinstance(fn, JSFunction) and fn.name == "eval" and fn.is_native:
                    return self._direct_eval(args, env, this)
        if args is None:
            args = [self.eval_expr(a, env, this) for a in node.children[1:]]
        if not isinstance(fn, JSFunction):
            name = callee.token if callee.kind in ("Ident", "Member") else "expression"
            self.throw_error("TypeError", f"{name} is not a function")
        return self.call_function(fn, recv, args)

    def _direct_eval(self, args: list, env: Env, this):
        if not args or not isinstance(args[0], str):
            return args[0] if args else UNDEFINED
        code = args[0]
        self.eval_texts.append(code)
        if self.eval_hook is None:
            self.throw_error("Error", "eval is not enabled in this sandbox")
        program = self.eval_hook(code)
        return self.run_eval(program, env, this)

    # -- member protocol ----------------------------------------------------

    def _index_key(self, key) -> str:
        if isinstance(key, str):
            return key
        return to_string(key)

    def get_member(self, obj, name: str):
        if isinstance(obj, JSArray):
            idx = _array_index(name)
            if idx is not None:
                return obj.elements[idx] if idx < len(obj.elements) else UNDEFINED
            if name == "length":
                return float(len(obj.elements))
            method = _array_method(self, obj, name)
            if method is not None:
                return method
            return obj.get(name)
        if isinstance(obj, JSObject):
            return obj.get(name)
        if isinstance(obj, str):
            return _string_member(self, obj, name)
        if isinstance(obj, JSFunction):
            if name == "prototype":
                return obj.prototype()
            if name == "name":
                return obj.orig_name or obj.name
            if name == "call":
                return JSFunction(
                    name="call",
                    native=lambda interp, this, args, target=obj: interp.call_function(
                        target, args[0] if args else UNDEFINED, list(args[1:])
                    ),
                )
            if name == "apply":
                def _apply(interp, this, args, target=obj):
                    call_this = args[0] if args else UNDEFINED
                    rest = args[1] if len(args) > 1 else None
                    call_args = list(rest.elements) if isinstance(rest, JSArray) else []
                    return interp.call_function(target, call_this, call_args)
                return JSFunction(name="apply", native=_apply)
            return obj.props.get(name, UNDEFINED)
        if isinstance(obj, (int, float, bool)):
            if name == "toString":
                return JSFunction(
                    name="toString",
                    native=lambda interp, this, args, v=obj: _num_to_string(interp, v, args),
                )
            return UNDEFINED
        if obj is None or obj is UNDEFINED:
            self.throw_error("TypeError", f"cannot read property '{name}' of {to_string(obj)}")
        return UNDEFINED

    def set_member(self, obj, name: str, value) -> None:
        if isinstance(obj, JSArray):
            idx = _array_index(name)
            if idx is not None:
                while len(obj.elements) <= idx:
                    obj.elements.append(UNDEFINED)
                obj.elements[idx] = value
                return
            if name == "length":
                new_len = int(to_number(value))
                del obj.elements[new_len:]
                while len(obj.elements) < new_len:
                    obj.elements.append(UNDEFINED)
                return
            obj.props[name] = value
            return
        if isinstance(obj, JSObject):
            obj.props[name] = value
            return
        if isinstance(obj, JSFunction):
            obj.props[name] = value
            return
        if obj is None or obj is UNDEFINED:
            self.throw_error("TypeError", f"cannot set property '{name}' of {to_string(obj)}")
        # primitive receivers silently drop writes

    def _delete_member(self, obj, name: str) -> bool:
        if isinstance(obj, JSArray):
            idx = _array_index(name)
            if idx is not None and idx < len(obj.elements):
                obj.elements[idx] = UNDEFINED
                return True
        if isinstance(obj, (JSObject, JSFunction)):
            obj.props.pop(name, None)
            return True
        return True


def _wrap32(n: int) -> int:
    n &= 0xFFFFFFFF
    return n - (1 << 32) if n >= (1 << 31) else n


def _typeof(value) -> str:
    if value is UNDEFINED:
        return "undefined"
    if value is None:
        return "object"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, JSFunction):
        return "function"
    return "object"


def _array_index(name: str) -> Optional[int]:
    if name.isdigit():
        return int(name)
    return None


def _num_to_string(interp: Interpreter, value, args):
    if args:
        radix = int(to_number(args[0]))
        n = int(to_number(value))
        if radix == 10 or n == 0:
            return canon_num(float(n))
        digits = "0123456789abcdefghijklmnopqrstuvwxyz"
        neg = n < 0
        n = abs(n)
        out = ""
        while n:
            out = digits[n % radix] + out
            n //= radix
        return ("-" if neg else "") + out
    return to_string(value)


def _string_member(interp: Interpreter, s: str, name: str):
    if name == "length":
        return float(len(s))
    idx = _array_index(name)
    if idx is not None:
        return s[idx] if idx < len(s) else UNDEFINED

    def native(fn):
        return JSFunction(name=name, native=fn)

    if name == "charCodeAt":
        return native(lambda i, t, a: float(ord(s[int(to_number(a[0] if a else 0.0))]))
                      if 0 <= int(to_number(a[0] if a else 0.0)) < len(s) else math.nan)
    if name == "charAt":
        return native(lambda i, t, a: s[int(to_number(a[0] if a else 0.0))]
                      if 0 <= int(to_number(a[0] if a else 0.0)) < len(s) else "")
    if name == "indexOf":
        return native(lambda i, t, a: float(s.find(to_string(a[0]) if a else "undefined",
                                                   int(to_number(a[1])) if len(a) > 1 else 0)))
    if name == "lastIndexOf":
        return native(lambda i, t, a: float(s.rfind(to_string(a[0]) if a else "undefined")))
    if name == "slice":
        def _slice(i, t, a):
            start = int(to_number(a[0])) if a else 0
            end = int(to_number(a[1])) if len(a) > 1 and a[1] is not UNDEFINED else len(s)
            return s[slice(*_norm_range(start, end, len(s)))]
        return native(_slice)
    if name == "substring":
        def _substring(i, t, a):
            start = max(0, min(len(s), int(to_number(a[0])) if a else 0))
            end = max(0, min(len(s), int(to_number(a[1])) if len(a) > 1 and a[1] is not UNDEFINED else len(s)))
            if start > end:
                start, end = end, start
            return s[start:end]
        return native(_substring)
    if name == "substr":
        def _substr(i, t, a):
            start = int(to_number(a[0])) if a else 0
            if start < 0:
                start = max(0, len(s) + start)
            count = int(to_number(a[1])) if len(a) > 1 else len(s) - start
            return s[start : start + max(0, count)]
        return native(_substr)
    if name == "split":
        def _split(i, t, a):
            if not a or a[0] is UNDEFINED:
                return JSArray([s])
            sep = to_string(a[0])
            if sep == "":
                return JSArray(list(s))
            return JSArray(s.split(sep))
        return native(_split)
    if name == "toUpperCase":
        return native(lambda i, t, a: s.upper())
    if name == "toLowerCase":
        return native(lambda i, t, a: s.lower())
    if name == "replace":
        def _replace(i, t, a):
            pat = to_string(a[0]) if a else "undefined"
            rep = to_string(a[1]) if len(a) > 1 else "undefined"
            return s.replace(pat, rep, 1)
        return native(_replace)
    if name == "concat":
        return native(lambda i, t, a: s + "".join(to_string(x) for x in a))
    if name == "trim":
        return native(lambda i, t, a: s.strip())
    if name == "toString":
        return native(lambda i, t, a: s)
    return UNDEFINED


def _norm_range(start: int, end: int, length: int) -> tuple[int, int]:
    if start < 0:
        start = max(0, length + start)
    if end < 0:
        end = max(0, length + end)
    return min(start, length), min(end, length)


def _array_method(interp: Interpreter, arr: JSArray, name: str):
    def native(fn):
        return JSFunction(name=name, native=fn)

    if name == "push":
        def _push(i, t, a):
            arr.elements.extend(a)
            return float(len(arr.elements))
        return native(_push)
    if name == "pop":
        return native(lambda i, t, a: arr.elements.pop() if arr.elements else UNDEFINED)
    if name == "shift":
        return native(lambda i, t, a: arr.elements.pop(0) if arr.elements else UNDEFINED)
    if name == "unshift":
        def _unshift(i, t, a):
            arr.elements[0:0] = a
            return float(len(arr.elements))
        return native(_unshift)
    if name == "indexOf":
        def _index_of(i, t, a):
            needle = a[0] if a else UNDEFINED
            for pos, item in enumerate(arr.elements):
                if strict_eq(item, needle):
                    return float(pos)
            return -1.0
        return native(_index_of)
    if name == "join":
        def _join(i, t, a):
            sep = to_string(a[0]) if a and a[0] is not UNDEFINED else ","
            return sep.join(
                "" if (e is None or e is UNDEFINED) else to_string(e) for e in arr.elements
            )
        return native(_join)
    if name == "slice":
        def _slice(i, t, a):
            start = int(to_number(a[0])) if a else 0
            end = int(to_number(a[1])) if len(a) > 1 and a[1] is not UNDEFINED else len(arr.elements)
            lo, hi = _norm_range(start, end, len(arr.elements))
            return JSArray(arr.elements[lo:hi])
        return native(_slice)
    if name == "concat":
        def _concat(i, t, a):
            out = list(arr.elements)
            for item in a:
                if isinstance(item, JSArray):
                    out.extend(item.elements)
                else:
                    out.append(item)
            return JSArray(out)
        return native(_concat)
    if name == "reverse":
        def _reverse(i, t, a):
            arr.elements.reverse()
            return arr
        return native(_reverse)
    if name == "splice":
        def _splice(i, t, a):
            start = int(to_number(a[0])) if a else 0
            if start < 0:
                start = max(0, len(arr.elements) + start)
            count = int(to_number(a[1])) if len(a) > 1 else len(arr.elements) - start
            removed = arr.elements[start : start + max(0, count)]
            arr.elements[start : start + max(0, count)] = list(a[2:])
            return JSArray(removed)
        return native(_splice)
    return None
