"""
.lkt 程序解析器 - 词法分析、递归下降语法分析、引用与类型检查，以及规范化输出

    file      := stmt*
    stmt      := blockdef | classdef | letdef | directive
    blockdef  := "block" IDENT "{" (key "=" value ";")* "}"
    classdef  := "class" IDENT "{" (key "=" value ";")* "}"
    letdef    := "let" IDENT "=" expr ";"
    expr      := IDENT | "sum" "(" expr ("," expr)+ ")" | "unitize" "(" expr ")"
               | "stabilize" "(" expr ")"
               | "extension" "(" expr "," expr "," "class" "=" ("split" | IDENT) ")"
    directive := "check" IDENT ";" | "report" IDENT ";"
               | "compare" IDENT IDENT "mode" ("graded" | "lambda" | "latticed") ";"
"""

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from core.catalog import BLOCK_KINDS
from core.vmorphism import SEARCH_MODES

# 每个程序都可以直接引用的内置模型
BUILTIN_NAMES = ('zero', 'C')

ERROR_CODES = ('lexical', 'syntax', 'reference', 'type')


class LktError(ValueError):
    """带错误码、位置与期望记号集合的解析错误"""

    def __init__(self, code: str, message: str, line: int = 0, column: int = 0,
                 expected: Iterable[str] = ()):
        self.code = code
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        where = f"{line}:{column}: " if line else ""
        hint = f" (期望: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"[{code}] {where}{message}{hint}")


# ---------------------------------------------------------------- 语法树

@dataclass(frozen=True)
class GroupExpr:
    """Z^free ⊕ Z/c1 ⊕ ...，循环因子按书写顺序保存"""
    free: int = 0
    cyclic: Tuple[int, ...] = ()


@dataclass(frozen=True)
class LayerExpr:
    """∪ offset + N{periods}"""
    offsets: Tuple[Tuple[int, ...], ...]
    periods: Tuple[Tuple[int, ...], ...] = ()


Value = Union[str, int, GroupExpr, LayerExpr, Tuple[int, ...], Tuple[Tuple[int, ...], ...]]


@dataclass(frozen=True)
class Entry:
    key: str
    value: Value
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BlockDef:
    name: str
    entries: Tuple[Entry, ...]
    line: int = field(default=0, compare=False)

    def get(self, key: str, default=None):
        return next((e.value for e in self.entries if e.key == key), default)


@dataclass(frozen=True)
class ClassDef(BlockDef):
    pass


@dataclass(frozen=True)
class Ref:
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    op: str
    args: Tuple['Expr', ...]
    extension_class: Optional[str] = None


Expr = Union[Ref, Call]


@dataclass(frozen=True)
class LetDef:
    name: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Directive:
    kind: str
    names: Tuple[str, ...]
    mode: Optional[str] = None
    line: int = field(default=0, compare=False)


Statement = Union[BlockDef, ClassDef, LetDef, Directive]


@dataclass(frozen=True)
class Program:
    statements: Tuple[Statement, ...] = ()

    def definitions(self) -> Dict[str, Statement]:
        return {s.name: s for s in self.statements if not isinstance(s, Directive)}

    def directives(self) -> List[Directive]:
        return [s for s in self.statements if isinstance(s, Directive)]


# ---------------------------------------------------------------- 词法

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_~]*)
  | (?P<symbol>[{}()\[\],;=+^/:])
""", re.VERBOSE)

KEYWORDS = {'block', 'class', 'let', 'check', 'compare', 'report'}


def tokenize(text: str) -> List[Token]:
    """
    词法分析

    Raises:
        LktError: code='lexical'
    """
    tokens: List[Token] = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise LktError('lexical', f"无法识别的字符 {text[pos]!r}", line, pos - start + 1)
        kind = match.lastgroup
        if kind == 'newline':
            line, start = line + 1, match.end()
        elif kind not in ('ws', 'comment'):
            tokens.append(Token(kind, match.group(), line, pos - start + 1))
        pos = match.end()
    tokens.append(Token('eof', '', line, pos - start + 1))
    return tokens


# ---------------------------------------------------------------- 语法

BLOCK_KEYS = {
    'kind': 'ident', 'k0': 'group', 'k1': 'group', 'cone': 'tuples', 'unit': 'tuple',
    'shape': 'shape', 'copies': 'copies', 'layer': 'layer',
}
CLASS_KEYS = {
    'k0': 'group', 'k1': 'group', 'iota0': 'tuples', 'iota1': 'tuples', 'pi0': 'tuples', 'pi1': 'tuples',
}
OPERATORS = ('sum', 'unitize', 'stabilize', 'extension')


class LktParser:
    """递归下降解析器"""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # ------------------------------------------------------------ 记号操作

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def _error(self, message: str, expected: Iterable[str]) -> LktError:
        token = self.current
        found = token.text or 'end of input'
        return LktError('syntax', f"{message}，遇到 {found!r}", token.line, token.column, expected)

    def _expect(self, text: str) -> Token:
        if self.current.text != text or self.current.kind == 'eof':
            raise self._error("语法错误", [text])
        return self._advance()

    def _expect_kind(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            raise self._error(f"期望{what}", [kind.upper()])
        return self._advance()

    def _accept(self, text: str) -> bool:
        if self.current.text == text and self.current.kind != 'eof':
            self.pos += 1
            return True
        return False

    # ------------------------------------------------------------ 语句

    def parse_program(self) -> Program:
        statements = []
        while self.current.kind != 'eof':
            statements.append(self._statement())
        return Program(tuple(statements))

    def _statement(self) -> Statement:
        token = self.current
        if token.kind == 'ident' and token.text == 'block':
            return self._definition(BlockDef, BLOCK_KEYS)
        if token.kind == 'ident' and token.text == 'class':
            return self._definition(ClassDef, CLASS_KEYS)
        if token.kind == 'ident' and token.text == 'let':
            self._advance()
            name = self._expect_kind('ident', "名字")
            self._expect('=')
            expr = self._expr()
            self._expect(';')
            return LetDef(name.text, expr, token.line)
        if token.kind == 'ident' and token.text in ('check', 'report'):
            self._advance()
            name = self._expect_kind('ident', "名字")
            self._expect(';')
            return Directive(token.text, (name.text,), None, token.line)
        if token.kind == 'ident' and token.text == 'compare':
            self._advance()
            first = self._expect_kind('ident', "名字")
            second = self._expect_kind('ident', "名字")
            self._expect('mode')
            if self.current.text not in SEARCH_MODES:
                raise self._error("未知的比较模式", SEARCH_MODES)
            mode = self._advance().text
            self._expect(';')
            return Directive('compare', (first.text, second.text), mode, token.line)
        raise self._error("期望语句", sorted(KEYWORDS))

    def _definition(self, cls, keys: Dict[str, str]) -> BlockDef:
        head = self._advance()
        name = self._expect_kind('ident', "名字")
        self._expect('{')
        entries = []
        while not self._accept('}'):
            key = self._expect_kind('ident', "键")
            if key.text not in keys:
                raise LktError('type', f"{head.text} 不支持键 {key.text!r}", key.line, key.column, keys)
            self._expect('=')
            value = self._value(keys[key.text])
            self._expect(';')
            entries.append(Entry(key.text, value, key.line, key.column))
        return cls(name.text, tuple(entries), head.line)

    # ------------------------------------------------------------ 值

    def _value(self, kind: str) -> Value:
        if kind == 'ident':
            return self._expect_kind('ident', "标识符").text
        if kind == 'group':
            return self._group()
        if kind == 'tuple':
            return self._tuple()
        if kind == 'tuples':
            return self._tuple_list()
        if kind == 'layer':
            offsets = self._tuple_list()
            periods = ()
            if self._accept('periods'):
                periods = self._tuple_list()
            return LayerExpr(offsets, periods)
        if kind == 'shape':
            word = self._expect_kind('ident', "形状")
            if word.text == 'chain':
                self._expect(':')
                return f"chain:{self._int()}"
            return word.text
        if self.current.text == 'countable':
            return self._advance().text
        return self._int()

    def _int(self) -> int:
        return int(self._expect_kind('int', "整数").text)

    def _group(self) -> GroupExpr:
        free, cyclic = 0, []
        while True:
            token = self.current
            if token.kind == 'int' and token.text == '0':
                self._advance()
            elif token.text == 'Z':
                self._advance()
                if self._accept('^'):
                    free += self._int()
                elif self._accept('/'):
                    order = self._int()
                    if order < 1:
                        raise LktError('type', f"循环群的阶必须为正: {order}", token.line, token.column)
                    cyclic.append(order)
                else:
                    free += 1
            else:
                raise self._error("期望群表达式", ['Z', 'Z^', 'Z/', '0'])
            if not self._accept('+'):
                return GroupExpr(free, tuple(cyclic))

    def _tuple(self) -> Tuple[int, ...]:
        if self.current.kind == 'int':
            return (self._int(),)
        self._expect('(')
        items = []
        if not self._accept(')'):
            items.append(self._int())
            while self._accept(','):
                items.append(self._int())
            self._expect(')')
        return tuple(items)

    def _tuple_list(self) -> Tuple[Tuple[int, ...], ...]:
        self._expect('[')
        items = []
        if not self._accept(']'):
            items.append(self._tuple())
            while self._accept(','):
                items.append(self._tuple())
            self._expect(']')
        return tuple(items)

    # ------------------------------------------------------------ 表达式

    def _expr(self) -> Expr:
        token = self._expect_kind('ident', "表达式")
        if token.text not in OPERATORS or self.current.text != '(':
            return Ref(token.text, token.line, token.column)
        self._expect('(')
        args = [self._expr()]
        extension_class = None
        if token.text == 'sum':
            self._expect(',')
            args.append(self._expr())
            while self._accept(','):
                args.append(self._expr())
        elif token.text == 'extension':
            self._expect(',')
            args.append(self._expr())
            self._expect(',')
            self._expect('class')
            self._expect('=')
            extension_class = self._expect_kind('ident', "扩张类").text
        self._expect(')')
        return Call(token.text, tuple(args), extension_class)


# ---------------------------------------------------------------- 检查

def _refs(expr: Expr) -> List[Ref]:
    if isinstance(expr, Ref):
        return [expr]
    return [r for arg in expr.args for r in _refs(arg)]


def check_program(program: Program) -> None:
    """
    重名、引用与类型检查（允许前向引用，环由求值时检测）

    Raises:
        LktError: code='reference' 或 'type'
    """
    defined: Dict[str, Statement] = {}
    for stmt in program.statements:
        if isinstance(stmt, Directive):
            continue
        if stmt.name in defined or stmt.name in BUILTIN_NAMES:
            raise LktError('type', f"重复定义: {stmt.name}", stmt.line, 1)
        defined[stmt.name] = stmt

    models = {n for n, s in defined.items() if not isinstance(s, ClassDef)} | set(BUILTIN_NAMES)
    for stmt in program.statements:
        if isinstance(stmt, ClassDef):
            missing = [k for k in CLASS_KEYS if stmt.get(k) is None]
            if missing:
                raise LktError('type', f"扩张类 {stmt.name} 缺少键: {', '.join(missing)}", stmt.line, 1)
        elif isinstance(stmt, BlockDef):
            kind = stmt.get('kind')
            if kind is None:
                raise LktError('type', f"块 {stmt.name} 缺少 kind", stmt.line, 1, ['kind'])
            if kind not in BLOCK_KINDS:
                raise LktError('type', f"未知的块类型 {kind!r}", stmt.line, 1, BLOCK_KINDS)
        elif isinstance(stmt, LetDef):
            for ref in _refs(stmt.expr):
                if ref.name not in defined and ref.name not in BUILTIN_NAMES:
                    raise LktError('reference', f"未定义的名字: {ref.name}", ref.line, ref.column)
                if ref.name not in models:
                    raise LktError('type', f"{ref.name} 是扩张类，不是模型", ref.line, ref.column)
            _check_classes(stmt.expr, defined, stmt.line)
        else:
            for name in stmt.names:
                if name not in models:
                    code = 'type' if name in defined else 'reference'
                    raise LktError(code, f"指令引用了未定义的模型: {name}", stmt.line, 1)


def _check_classes(expr: Expr, defined: Dict[str, Statement], line: int) -> None:
    if isinstance(expr, Ref):
        return
    cls = expr.extension_class
    if cls is not None and cls != 'split':
        if cls not in defined:
            raise LktError('reference', f"未定义的扩张类: {cls}", line, 1)
        if not isinstance(defined[cls], ClassDef):
            raise LktError('type', f"{cls} 不是扩张类", line, 1)
    for arg in expr.args:
        _check_classes(arg, defined, line)


def parse(text: str) -> Program:
    """
    解析并检查 .lkt 程序

    Args:
        text: 程序文本

    Returns:
        Program（空文本得到空程序）

    Raises:
        LktError: 词法、语法、引用或类型错误
    """
    program = LktParser(text).parse_program()
    check_program(program)
    return program


def parse_file(path: str) -> Program:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"程序文件不存在: {path}")
    return parse(text)


# ---------------------------------------------------------------- 输出

def _format_tuple(t: Tuple[int, ...]) -> str:
    return "(" + ", ".join(str(x) for x in t) + ")"


def _format_tuples(items: Tuple[Tuple[int, ...], ...]) -> str:
    return "[" + ", ".join(_format_tuple(t) for t in items) + "]"


def _format_value(value: Value, kind: str) -> str:
    if kind == 'group':
        parts = ([f"Z^{value.free}"] if value.free else []) + [f"Z/{c}" for c in value.cyclic]
        return " + ".join(parts) if parts else "0"
    if kind == 'layer':
        text = _format_tuples(value.offsets)
        return f"{text} periods {_format_tuples(value.periods)}" if value.periods else text
    if kind == 'tuple':
        return _format_tuple(value)
    if kind == 'tuples':
        return _format_tuples(value)
    return str(value)


def _format_expr(expr: Expr) -> str:
    if isinstance(expr, Ref):
        return expr.name
    args = ", ".join(_format_expr(a) for a in expr.args)
    if expr.op == 'extension':
        return f"extension({args}, class = {expr.extension_class})"
    return f"{expr.op}({args})"


def serialize(program: Program) -> str:
    """规范化输出；parse(serialize(p)) == p"""
    lines = []
    for stmt in program.statements:
        if isinstance(stmt, BlockDef):
            head, keys = ('class', CLASS_KEYS) if isinstance(stmt, ClassDef) else ('block', BLOCK_KEYS)
            lines.append(f"{head} {stmt.name} {{")
            for entry in stmt.entries:
                lines.append(f"    {entry.key} = {_format_value(entry.value, keys[entry.key])};")
            lines.append("}")
        elif isinstance(stmt, LetDef):
            lines.append(f"let {stmt.name} = {_format_expr(stmt.expr)};")
        elif stmt.kind == 'compare':
            lines.append(f"compare {stmt.names[0]} {stmt.names[1]} mode {stmt.mode};")
        else:
            lines.append(f"{stmt.kind} {stmt.names[0]};")
    return "\n".join(lines) + ("\n" if lines else "")
