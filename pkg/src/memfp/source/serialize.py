"""Deterministic source emission from syntax trees.

Emits a flat token stream (shared with the static fingerprinter) and
joins it into parseable text.  Output of a normalized tree re-parses to
an identical normalized tree.
"""

from __future__ import annotations

import re

from .jsast import Node

_PREC = {
    "Seq": 0, "Assign": 1, "Cond": 2,
    "Unary": 13, "Update": 14,
    "Call": 15, "New": 15, "Member": 15, "Index": 15,
}
_BIN_PREC = {
    "||": 3, "&&": 4, "|": 5, "^": 6, "&": 7,
    "==": 8, "!=": 8, "===": 8, "!==": 8,
    "<": 9, ">": 9, "<=": 9, ">=": 9, "instanceof": 9, "in": 9,
    "<<": 10, ">>": 10, ">>>": 10,
    "+": 11, "-": 11,
    "*": 12, "/": 12, "%": 12,
}

_IDENT_RE = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")
_WORDY = re.compile(r"[A-Za-z0-9_$]")


def _prec(node: Node) -> int:
    if node.kind in ("Binary", "Logical"):
        return _BIN_PREC[node.token]
    return _PREC.get(node.kind, 16)


def _escape_string(value: str) -> str:
    out = ['"']
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\x{ord(ch):02x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _starts_with_func_or_obj(node: Node) -> bool:
    cur = node
    while True:
        if cur.kind in ("FuncExpr", "Object"):
            return True
        if cur.kind in ("Binary", "Logical", "Assign", "Cond", "Seq", "Call",
                        "Member", "Index"):
            cur = cur.children[0]
            continue
        if cur.kind == "Update" and cur.token.endswith("_post"):
            cur = cur.children[0]
            continue
        return False


def _chain_has_call(node: Node) -> bool:
    cur = node
    while cur.kind in ("Member", "Index"):
        cur = cur.children[0]
    return cur.kind == "Call"


class Emitter:
    def __init__(self):
        self.toks: list[str] = []

    # -- expressions ---------------------------------------------------

    def expr(self, node: Node, min_prec: int) -> None:
        if _prec(node) < min_prec:
            self.toks.append("(")
            self.expr(node, 0)
            self.toks.append(")")
            return
        k = node.kind
        if k == "Num":
            self.toks.append(node.token)
        elif k == "Str":
            self.toks.append(_escape_string(node.token))
        elif k in ("Bool", "Null"):
            self.toks.append(node.token)
        elif k == "Ident":
            self.toks.append(node.token)
        elif k == "This":
            self.toks.append("this")
        elif k == "Seq":
            for i, child in enumerate(node.children):
                if i:
                    self.toks.append(",")
                self.expr(child, 1)
        elif k == "Assign":
            self.expr(node.children[0], 14)
            self.toks.append(node.token)
            self.expr(node.children[1], 1)
        elif k == "Cond":
            self.expr(node.children[0], 3)
            self.toks.append("?")
            self.expr(node.children[1], 1)
            self.toks.append(":")
            self.expr(node.children[2], 1)
        elif k in ("Binary", "Logical"):
            p = _BIN_PREC[node.token]
            self.expr(node.children[0], p)
            self.toks.append(node.token)
            self.expr(node.children[1], p + 1)
        elif k == "Unary":
            self.toks.append(node.token)
            self.expr(node.children[0], 13)
        elif k == "Update":
            op, pos = node.token.split("_")
            if pos == "pre":
                self.toks.append(op)
                self.expr(node.children[0], 14)
            else:
                self.expr(node.children[0], 15)
                self.toks.append(op)
        elif k == "Call":
            self.expr(node.children[0], 15)
            self._args(node.children[1:])
        elif k == "New":
            self.toks.append("new")
            callee = node.children[0]
            if _chain_has_call(callee):
                self.toks.append("(")
                self.expr(callee, 0)
                self.toks.append(")")
            else:
                self.expr(callee, 15)
            self._args(node.children[1:])
        elif k == "Member":
            self.expr(node.children[0], 15)
            self.toks.append(".")
            self.toks.append(node.token)
        elif k == "Index":
            self.expr(node.children[0], 15)
            self.toks.append("[")
            self.expr(node.children[1], 0)
            self.toks.append("]")
        elif k == "Array":
            self.toks.append("[")
            for i, child in enumerate(node.children):
                if i:
                    self.toks.append(",")
                self.expr(child, 1)
            self.toks.append("]")
        elif k == "Object":
            self.toks.append("{")
            for i, prop in enumerate(node.children):
                if i:
                    self.toks.append(",")
                key = prop.token
                if _IDENT_RE.match(key) or key.replace(".", "").isdigit():
                    self.toks.append(key)
                else:
                    self.toks.append(_escape_string(key))
                self.toks.append(":")
                self.expr(prop.children[0], 1)
            self.toks.append("}")
        elif k == "FuncExpr":
            self._function(node)
        else:  # pragma: no cover - exhaustive over expression kinds
            raise ValueError(f"cannot emit expression kind {k}")

    def _args(self, args: list[Node]) -> None:
        self.toks.append("(")
        for i, arg in enumerate(args):
            if i:
                self.toks.append(",")
            self.expr(arg, 1)
        self.toks.append(")")

    def _function(self, node: Node) -> None:
        self.toks.append("function")
        if node.token:
            self.toks.append(node.token)
        self.toks.append("(")
        params = node.children[0]
        for i, p in enumerate(params.children):
            if i:
                self.toks.append(",")
            self.toks.append(p.token)
        self.toks.append(")")
        self.stmt(node.children[1])

    # -- statements ----------------------------------------------------

    def stmt(self, node: Node) -> None:
        k = node.kind
        if k == "Program":
            for child in node.children:
                self.stmt(child)
        elif k == "Block":
            self.toks.append("{")
            for child in node.children:
                self.stmt(child)
            self.toks.append("}")
        elif k == "VarDecl":
            self._var_decl(node)
            self.toks.append(";")
        elif k == "FuncDecl":
            self._function(node)
        elif k == "ExprStmt":
            expr = node.children[0]
            if _starts_with_func_or_obj(expr):
                self.toks.append("(")
                self.expr(expr, 0)
                self.toks.append(")")
            else:
                self.expr(expr, 0)
            self.toks.append(";")
        elif k == "If":
            self.toks.append("if")
            self.toks.append("(")
            self.expr(node.children[0], 0)
            self.toks.append(")")
            self.stmt(node.children[1])
            if len(node.children) == 3:
                self.toks.append("else")
                self.stmt(node.children[2])
        elif k == "While":
            self.toks.append("while")
            self.toks.append("(")
            self.expr(node.children[0], 0)
            self.toks.append(")")
            self.stmt(node.children[1])
        elif k == "DoWhile":
            self.toks.append("do")
            self.stmt(node.children[0])
            self.toks.append("while")
            self.toks.append("(")
            self.expr(node.children[1], 0)
            self.toks.append(")")
            self.toks.append(";")
        elif k == "For":
            self.toks.append("for")
            self.toks.append("(")
            init = node.children[0]
            if init.kind == "VarDecl":
                self._var_decl(init)
            elif init.kind == "ExprStmt":
                self.expr(init.children[0], 0)
            self.toks.append(";")
            if node.children[1].kind != "Empty":
                self.expr(node.children[1], 0)
            self.toks.append(";")
            if node.children[2].kind != "Empty":
                self.expr(node.children[2], 0)
            self.toks.append(")")
            self.stmt(node.children[3])
        elif k == "ForIn":
            self.toks.append("for")
            self.toks.append("(")
            target = node.children[0]
            if target.kind == "VarDecl":
                self._var_decl(target)
            else:
                self.expr(target, 14)
            self.toks.append("in")
            self.expr(node.children[1], 0)
            self.toks.append(")")
            self.stmt(node.children[2])
        elif k == "Return":
            self.toks.append("return")
            if node.children:
                self.expr(node.children[0], 0)
            self.toks.append(";")
        elif k in ("Break", "Continue"):
            self.toks.append(k.lower())
            self.toks.append(";")
        elif k == "Empty":
            self.toks.append(";")
        elif k == "Switch":
            self.toks.append("switch")
            self.toks.append("(")
            self.expr(node.children[0], 0)
            self.toks.append(")")
            self.toks.append("{")
            for case in node.children[1:]:
                if case.kind == "Case":
                    self.toks.append("case")
                    self.expr(case.children[0], 0)
                    self.toks.append(":")
                    for child in case.children[1:]:
                        self.stmt(child)
                else:
                    self.toks.append("default")
                    self.toks.append(":")
                    for child in case.children:
                        self.stmt(child)
            self.toks.append("}")
        elif k == "Throw":
            self.toks.append("throw")
            self.expr(node.children[0], 0)
            self.toks.append(";")
        elif k == "Try":
            self.toks.append("try")
            self.stmt(node.children[0])
            for part in node.children[1:]:
                if part.kind == "Catch":
                    self.toks.append("catch")
                    self.toks.append("(")
                    self.toks.append(part.children[0].token)
                    self.toks.append(")")
                    self.stmt(part.children[1])
                else:
                    self.toks.append("finally")
                    self.stmt(part.children[0])
        else:  # pragma: no cover
            raise ValueError(f"cannot emit statement kind {k}")

    def _var_decl(self, node: Node) -> None:
        self.toks.append("var")
        for i, decl in enumerate(node.children):
            if i:
                self.toks.append(",")
            self.toks.append(decl.children[0].token)
            if len(decl.children) == 2:
                self.toks.append("=")
                self.expr(decl.children[1], 1)


def _needs_space(prev: str, nxt: str) -> bool:
    a, b = prev[-1], nxt[0]
    if _WORDY.match(a) and _WORDY.match(b):
        return True
    if a == b and a in "+-<>&|=":
        return True
    if prev in ("++", "--") and b == a:
        return True
    return False


def join_tokens(tokens: list[str]) -> str:
    out: list[str] = []
    for tok in tokens:
        if out and _needs_space(out[-1], tok):
            out.append(" ")
        out.append(tok)
    return "".join(out)


def emit_tokens(node: Node) -> list[str]:
    """Flat token stream for a statement-level node (Program/Block/…)."""
    emitter = Emitter()
    emitter.stmt(node)
    return emitter.toks


def to_source(node: Node) -> str:
    return join_tokens(emit_tokens(node))
