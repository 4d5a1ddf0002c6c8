"""Recursive-descent parser for the supported ECMAScript subset.

ES5 core plus function expressions, closures, prototypes and ``eval``.
``let``/``const`` parse as ``var``; ``class`` declarations desugar into a
constructor function plus prototype assignments; ``export`` prefixes are
stripped.  Generators, async, modules with ``import``, template literals,
regex literals, arrow functions, and ``with`` are rejected.
"""

from __future__ import annotations

from typing import Optional

from ..errors import JsSyntaxError, UnsupportedConstruct
from .jsast import Node
from .lexer import Token, tokenize

_BINARY_PREC = {
    "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7, "in": 7,
    "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
_LOGICAL_PREC = {"||": 1, "&&": 2}

_ASSIGN_OPS = frozenset(
    {"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", ">>>=", "&=", "|=", "^="}
)

_UNARY_OPS = frozenset({"-", "+", "!", "~", "typeof", "void", "delete"})


class Parser:
    def __init__(self, text: str, path: str = "<source>"):
        self.path = path
        self.toks = tokenize(text, path)
        self.pos = 0

    # -- token plumbing ------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def peek(self, offset: int = 1) -> Token:
        idx = min(self.pos + offset, len(self.toks) - 1)
        return self.toks[idx]

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        if self.pos < len(self.toks) - 1:
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        return self.cur.value == value and self.cur.type in ("punct", "keyword")

    def eat(self, value: str) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.error(f"expected {value!r}, found {self.cur.value!r}")
        return self.advance()

    def error(self, message: str, exc=JsSyntaxError):
        raise exc(message, self.path, self.cur.line, self.cur.col)

    def _same_line(self) -> bool:
        return self.cur.line == self.toks[self.pos - 1].line

    def _semicolon(self) -> None:
        """Consume an explicit `;` or apply automatic insertion."""
        if self.eat(";"):
            return
        if self.at("}") or self.cur.type == "eof":
            return
        if not self._same_line():
            return
        self.error(f"expected ';', found {self.cur.value!r}")

    # -- entry point ---------------------------------------------------

    def parse_program(self) -> Node:
        stmts: list[Node] = []
        start = self.cur.start
        while self.cur.type != "eof":
            stmts.extend(self.statement_list_item())
        return Node("Program", "", stmts, (start, self.cur.end))

    # -- statements ----------------------------------------------------

    def statement_list_item(self) -> list[Node]:
        """One statement; class/export desugaring may yield several."""
        if self.at("export"):
            self.advance()
            if self.at("default"):
                self.error("'export default' is not supported", UnsupportedConstruct)
            return self.statement_list_item()
        if self.at("class"):
            return self.class_declaration()
        return [self.statement()]

    def statement(self) -> Node:
        tok = self.cur
        if tok.type == "punct" and tok.value == "{":
            return self.block()
        if tok.type == "punct" and tok.value == ";":
            self.advance()
            return Node("Empty", "", [], (tok.start, tok.end))
        if tok.type == "keyword":
            kw = tok.value
            if kw in ("var", "let", "const"):
                return self.var_statement()
            if kw == "function":
                return self.function_node(declaration=True)
            if kw == "if":
                return self.if_statement()
            if kw == "while":
                return self.while_statement()
            if kw == "do":
                return self.do_statement()
            if kw == "for":
                return self.for_statement()
            if kw == "return":
                return self.return_statement()
            if kw == "break" or kw == "continue":
                self.advance()
                if self.cur.type == "ident" and self._same_line():
                    self.error("labeled break/continue is not supported", UnsupportedConstruct)
                node = Node(kw.capitalize(), "", [], (tok.start, tok.end))
                self._semicolon()
                return node
            if kw == "switch":
                return self.switch_statement()
            if kw == "throw":
                self.advance()
                if not self._same_line():
                    self.error("throw requires an expression on the same line")
                arg = self.expression()
                node = Node("Throw", "", [arg], (tok.start, arg.span[1]))
                self._semicolon()
                return node
            if kw == "try":
                return self.try_statement()
            if kw == "import":
                self.error("'import' is not supported; bundle sources instead", UnsupportedConstruct)
            if kw == "class":
                self.error("class must appear at statement-list level", UnsupportedConstruct)
        expr = self.expression()
        node = Node("ExprStmt", "", [expr], expr.span)
        self._semicolon()
        return node

    def block(self) -> Node:
        start = self.expect("{").start
        stmts: list[Node] = []
        while not self.at("}"):
            if self.cur.type == "eof":
                self.error("unexpected end of input in block")
            stmts.extend(self.statement_list_item())
        end = self.expect("}").end
        return Node("Block", "", stmts, (start, end))

    def var_statement(self) -> Node:
        start = self.advance().start  # var / let / const
        decl = self.var_declaration_list(no_in=False)
        decl.span = (start, decl.span[1])
        self._semicolon()
        return decl

    def var_declaration_list(self, no_in: bool) -> Node:
        declarators: list[Node] = []
        while True:
            name = self.identifier_node(declaration=True)
            if self.eat("="):
                init = self.assignment(no_in)
                declarators.append(Node("Declarator", "", [name, init], (name.span[0], init.span[1])))
            else:
                declarators.append(Node("Declarator", "", [name], name.span))
            if not self.eat(","):
                break
        return Node("VarDecl", "", declarators, (declarators[0].span[0], declarators[-1].span[1]))

    def identifier_node(self, declaration: bool = False) -> Node:
        tok = self.cur
        if tok.type != "ident":
            self.error(f"expected identifier, found {tok.value!r}")
        self.advance()
        node = Node("Ident", tok.value, [], (tok.start, tok.end))
        if declaration:
            node.meta["decl"] = True
        return node

    def function_node(self, declaration: bool) -> Node:
        start = self.expect("function").start
        if self.at("*"):
            self.error("generator functions are not supported", UnsupportedConstruct)
        name = ""
        if self.cur.type == "ident":
            name = self.advance().value
        elif declaration:
            self.error("function declaration requires a name")
        params = self.param_list()
        body = self.block()
        kind = "FuncDecl" if declaration else "FuncExpr"
        node = Node(kind, name, [params, body], (start, body.span[1]))
        node.meta["orig_name"] = name
        return node

    def param_list(self) -> Node:
        start = self.expect("(").start
        params: list[Node] = []
        while not self.at(")"):
            params.append(self.identifier_node(declaration=True))
            if not self.at(")"):
                self.expect(",")
        end = self.expect(")").end
        return Node("Params", "", params, (start, end))

    def class_declaration(self) -> list[Node]:
        start = self.expect("class").start
        name_tok = self.cur
        name = self.identifier_node(declaration=True)
        if self.at("extends"):
            self.error("class inheritance is not supported", UnsupportedConstruct)
        self.expect("{")
        ctor: Optional[Node] = None
        methods: list[tuple[str, bool, Node]] = []  # (name, static, FuncExpr)
        while not self.at("}"):
            if self.eat(";"):
                continue
            is_static = False
            if self.cur.type == "ident" and self.cur.value == "static" and self.peek().value != "(":
                is_static = True
                self.advance()
            mtok = self.cur
            if mtok.type not in ("ident", "keyword"):
                self.error("expected method name")
            mname = self.advance().value
            params = self.param_list()
            body = self.block()
            fn = Node("FuncExpr", "", [params, body], (mtok.start, body.span[1]))
            fn.meta["orig_name"] = mname
            if mname == "constructor" and not is_static:
                ctor = fn
            else:
                methods.append((mname, is_static, fn))
        end = self.expect("}").end

        if ctor is None:
            ctor = Node(
                "FuncExpr", "",
                [Node("Params", "", [], (start, start)), Node("Block", "", [], (start, start))],
                (name_tok.start, name_tok.end),
            )
        decl = Node("FuncDecl", name.token, [ctor.children[0], ctor.children[1]], (start, end))
        decl.meta["orig_name"] = name.token
        out = [decl]
        for mname, is_static, fn in methods:
            fn.token = ""
            base: Node = Node("Ident", name.token, [], fn.span)
            if not is_static:
                base = Node("Member", "prototype", [base], fn.span)
            target = Node("Member", mname, [base], fn.span)
            assign = Node("Assign", "=", [target, fn], fn.span)
            out.append(Node("ExprStmt", "", [assign], fn.span))
        return out

    def if_statement(self) -> Node:
        start = self.expect("if").start
        self.expect("(")
        test = self.expression()
        self.expect(")")
        cons = self.statement()
        children = [test, cons]
        end = cons.span[1]
        if self.eat("else"):
            alt = self.statement()
            children.append(alt)
            end = alt.span[1]
        return Node("If", "", children, (start, end))

    def while_statement(self) -> Node:
        start = self.expect("while").start
        self.expect("(")
        test = self.expression()
        self.expect(")")
        body = self.statement()
        return Node("While", "", [test, body], (start, body.span[1]))

    def do_statement(self) -> Node:
        start = self.expect("do").start
        body = self.statement()
        self.expect("while")
        self.expect("(")
        test = self.expression()
        end = self.expect(")").end
        self._semicolon()
        return Node("DoWhile", "", [body, test], (start, end))

    def for_statement(self) -> Node:
        start = self.expect("for").start
        self.expect("(")
        init: Node
        if self.at(";"):
            init = Node("Empty", "", [], (self.cur.start, self.cur.start))
        elif self.at("var") or self.at("let") or self.at("const"):
            vstart = self.advance().start
            init = self.var_declaration_list(no_in=True)
            init.span = (vstart, init.span[1])
            if self.at("in") and len(init.children) == 1 and len(init.children[0].children) == 1:
                return self._for_in_tail(start, init)
        else:
            init_expr = self.expression(no_in=True)
            if self.at("in"):
                if init_expr.kind not in ("Ident", "Member", "Index"):
                    self.error("invalid for-in target")
                return self._for_in_tail(start, init_expr)
            init = Node("ExprStmt", "", [init_expr], init_expr.span)
        self.expect(";")
        test = Node("Empty", "", [], (self.cur.start, self.cur.start)) if self.at(";") else self.expression()
        self.expect(";")
        update = Node("Empty", "", [], (self.cur.start, self.cur.start)) if self.at(")") else self.expression()
        self.expect(")")
        body = self.statement()
        return Node("For", "", [init, test, update, body], (start, body.span[1]))

    def _for_in_tail(self, start: int, target: Node) -> Node:
        self.expect("in")
        obj = self.expression()
        self.expect(")")
        body = self.statement()
        return Node("ForIn", "", [target, obj, body], (start, body.span[1]))

    def return_statement(self) -> Node:
        tok = self.expect("return")
        if self.at(";") or self.at("}") or self.cur.type == "eof" or not self._same_line():
            node = Node("Return", "", [], (tok.start, tok.end))
        else:
            arg = self.expression()
            node = Node("Return", "", [arg], (tok.start, arg.span[1]))
        self._semicolon()
        return node

    def switch_statement(self) -> Node:
        start = self.expect("switch").start
        self.expect("(")
        disc = self.expression()
        self.expect(")")
        self.expect("{")
        cases: list[Node] = []
        seen_default = False
        while not self.at("}"):
            if self.at("case"):
                cstart = self.advance().start
                test = self.expression()
                self.expect(":")
                stmts = self._case_body()
                cases.append(Node("Case", "", [test, *stmts], (cstart, stmts[-1].span[1] if stmts else cstart)))
            elif self.at("default"):
                if seen_default:
                    self.error("duplicate default clause")
                seen_default = True
                cstart = self.advance().start
                self.expect(":")
                stmts = self._case_body()
                cases.append(Node("Default", "", stmts, (cstart, stmts[-1].span[1] if stmts else cstart)))
            else:
                self.error("expected 'case' or 'default'")
        end = self.expect("}").end
        return Node("Switch", "", [disc, *cases], (start, end))

    def _case_body(self) -> list[Node]:
        stmts: list[Node] = []
        while not (self.at("case") or self.at("default") or self.at("}")):
            if self.cur.type == "eof":
                self.error("unexpected end of input in switch")
            stmts.extend(self.statement_list_item())
        return stmts

    def try_statement(self) -> Node:
        start = self.expect("try").start
        block = self.block()
        children = [block]
        end = block.span[1]
        if self.at("catch"):
            cstart = self.advance().start
            self.expect("(")
            param = self.identifier_node(declaration=True)
            self.expect(")")
            cbody = self.block()
            children.append(Node("Catch", param.token, [param, cbody], (cstart, cbody.span[1])))
            end = cbody.span[1]
        if self.at("finally"):
            fstart = self.advance().start
            fbody = self.block()
            children.append(Node("Finally", "", [fbody], (fstart, fbody.span[1])))
            end = fbody.span[1]
        if len(children) == 1:
            self.error("try requires catch or finally")
        return Node("Try", "", children, (start, end))

    # -- expressions ---------------------------------------------------

    def expression(self, no_in: bool = False) -> Node:
        first = self.assignment(no_in)
        if not self.at(","):
            return first
        exprs = [first]
        while self.eat(","):
            exprs.append(self.assignment(no_in))
        return Node("Seq", "", exprs, (first.span[0], exprs[-1].span[1]))

    def assignment(self, no_in: bool = False) -> Node:
        left = self.conditional(no_in)
        if self.cur.type == "punct" and self.cur.value in _ASSIGN_OPS:
            op = self.advance().value
            if left.kind not in ("Ident", "Member", "Index"):
                self.error("invalid assignment target")
            right = self.assignment(no_in)
            return Node("Assign", op, [left, right], (left.span[0], right.span[1]))
        return left

    def conditional(self, no_in: bool) -> Node:
        test = self.binary(1, no_in)
        if not self.eat("?"):
            return test
        cons = self.assignment(False)
        self.expect(":")
        alt = self.assignment(no_in)
        return Node("Cond", "", [test, cons, alt], (test.span[0], alt.span[1]))

    def binary(self, min_prec: int, no_in: bool) -> Node:
        left = self.unary()
        while True:
            tok = self.cur
            op = tok.value
            if op == "=>":
                self.error("arrow functions are not supported", UnsupportedConstruct)
            if op == "in" and no_in:
                break
            prec = _LOGICAL_PREC.get(op) or _BINARY_PREC.get(op)
            if prec is None or prec < min_prec:
                break
            if tok.type not in ("punct", "keyword"):
                break
            self.advance()
            right = self.binary(prec + 1, no_in)
            kind = "Logical" if op in _LOGICAL_PREC else "Binary"
            left = Node(kind, op, [left, right], (left.span[0], right.span[1]))
        return left

    def unary(self) -> Node:
        tok = self.cur
        if (tok.type == "punct" and tok.value in ("-", "+", "!", "~")) or (
            tok.type == "keyword" and tok.value in ("typeof", "void", "delete")
        ):
            self.advance()
            operand = self.unary()
            return Node("Unary", tok.value, [operand], (tok.start, operand.span[1]))
        if tok.type == "punct" and tok.value in ("++", "--"):
            self.advance()
            operand = self.unary()
            if operand.kind not in ("Ident", "Member", "Index"):
                self.error("invalid increment/decrement target")
            return Node("Update", tok.value + "_pre", [operand], (tok.start, operand.span[1]))
        if tok.type == "punct" and tok.value == "/":
            self.error("regular expression literals are not supported", UnsupportedConstruct)
        return self.postfix()

    def postfix(self) -> Node:
        expr = self.call_member(new_ok=True)
        tok = self.cur
        if tok.type == "punct" and tok.value in ("++", "--") and self._same_line():
            if expr.kind not in ("Ident", "Member", "Index"):
                self.error("invalid increment/decrement target")
            self.advance()
            return Node("Update", tok.value + "_post", [expr], (expr.span[0], tok.end))
        return expr

    def member_expr(self) -> Node:
        """MemberExpression: primary or `new` form plus dot/bracket chains."""
        if self.at("new"):
            start = self.advance().start
            callee = self.member_expr()
            args: list[Node] = []
            end = callee.span[1]
            if self.at("("):
                args, end = self._arguments()
            expr: Node = Node("New", "", [callee, *args], (start, end))
        else:
            expr = self.primary()
        while True:
            if self.at("."):
                self.advance()
                prop = self.cur
                if prop.type not in ("ident", "keyword"):
                    self.error("expected property name after '.'")
                self.advance()
                expr = Node("Member", prop.value, [expr], (expr.span[0], prop.end))
            elif self.at("["):
                self.advance()
                key = self.expression()
                end = self.expect("]").end
                expr = Node("Index", "", [expr, key], (expr.span[0], end))
            else:
                return expr

    def call_member(self, new_ok: bool) -> Node:
        expr = self.member_expr()
        while True:
            if self.at("."):
                self.advance()
                prop = self.cur
                if prop.type not in ("ident", "keyword"):
                    self.error("expected property name after '.'")
                self.advance()
                expr = Node("Member", prop.value, [expr], (expr.span[0], prop.end))
            elif self.at("["):
                self.advance()
                key = self.expression()
                end = self.expect("]").end
                expr = Node("Index", "", [expr, key], (expr.span[0], end))
            elif self.at("("):
                args, end = self._arguments()
                expr = Node("Call", "", [expr, *args], (expr.span[0], end))
            else:
                return expr

    def _arguments(self) -> tuple[list[Node], int]:
        self.expect("(")
        args: list[Node] = []
        while not self.at(")"):
            args.append(self.assignment())
            if not self.at(")"):
                self.expect(",")
        end = self.expect(")").end
        return args, end

    def primary(self) -> Node:
        tok = self.cur
        if tok.type == "num":
            self.advance()
            return Node("Num", tok.value, [], (tok.start, tok.end))
        if tok.type == "str":
            self.advance()
            return Node("Str", tok.value, [], (tok.start, tok.end))
        if tok.type == "ident":
            self.advance()
            return Node("Ident", tok.value, [], (tok.start, tok.end))
        if tok.type == "keyword":
            if tok.value in ("true", "false"):
                self.advance()
                return Node("Bool", tok.value, [], (tok.start, tok.end))
            if tok.value == "null":
                self.advance()
                return Node("Null", "null", [], (tok.start, tok.end))
            if tok.value == "this":
                self.advance()
                return Node("This", "", [], (tok.start, tok.end))
            if tok.value == "function":
                return self.function_node(declaration=False)
            if tok.value == "class":
                self.error("class expressions are not supported", UnsupportedConstruct)
        if self.at("("):
            self.advance()
            expr = self.expression()
            self.expect(")")
            return expr
        if self.at("["):
            start = self.advance().start
            elements: list[Node] = []
            while not self.at("]"):
                if self.at(","):
                    self.error("array holes are not supported", UnsupportedConstruct)
                elements.append(self.assignment())
                if not self.at("]"):
                    self.expect(",")
            end = self.expect("]").end
            return Node("Array", "", elements, (start, end))
        if self.at("{"):
            return self._object_literal()
        self.error(f"unexpected token {tok.value!r}")
        raise AssertionError  # unreachable

    def _object_literal(self) -> Node:
        start = self.expect("{").start
        props: list[Node] = []
        while not self.at("}"):
            key_tok = self.cur
            if key_tok.type in ("ident", "keyword", "str"):
                key = key_tok.value
            elif key_tok.type == "num":
                key = key_tok.value
            else:
                self.error("invalid object literal key")
            self.advance()
            if self.at("("):
                self.error("method shorthand is not supported", UnsupportedConstruct)
            self.expect(":")
            value = self.assignment()
            props.append(Node("Prop", key, [value], (key_tok.start, value.span[1])))
            if not self.at("}"):
                self.expect(",")
        end = self.expect("}").end
        return Node("Object", "", props, (start, end))


def parse_text(text: str, path: str = "<source>") -> Node:
    """Parse source text into a raw (un-normalized) syntax tree."""
    return Parser(text, path).parse_program()
