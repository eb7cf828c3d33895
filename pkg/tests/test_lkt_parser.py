"""
.lkt 解析器测试
"""

import pytest

from program.lkt_parser import (
    BlockDef, Call, ClassDef, Directive, GroupExpr, LayerExpr, LetDef, LktError, Ref, parse, parse_file,
    serialize, tokenize,
)

O4_TEXT = """
# Cuntz algebra O4
block O4 {
    kind = kirchberg;
    k0 = Z/3;
    unit = 1;
}
check O4;
"""


def test_tokenize_positions():
    tokens = tokenize("block X {\n  k0 = Z^2 + Z/4; # comment\n}")
    assert [t.text for t in tokens[:3]] == ['block', 'X', '{']
    k0 = tokens[3]
    assert (k0.text, k0.line, k0.column) == ('k0', 2, 3)
    assert tokens[-1].kind == 'eof'


def test_parse_block():
    program = parse(O4_TEXT)
    block, directive = program.statements
    assert isinstance(block, BlockDef)
    assert block.name == 'O4'
    assert block.get('kind') == 'kirchberg'
    assert block.get('k0') == GroupExpr(0, (3,))
    assert block.get('unit') == (1,)
    assert block.get('k1') is None
    assert directive == Directive('check', ('O4',), None)
    assert block.line == 3


def test_parse_group_forms():
    program = parse("block A { kind = kirchberg; k0 = Z + Z^2 + Z/2 + 0; k1 = 0; }")
    block = program.statements[0]
    assert block.get('k0') == GroupExpr(3, (2,))
    assert block.get('k1') == GroupExpr(0, ())


def test_parse_layer_and_shape():
    program = parse("""
        block S { kind = stably_finite_simple; k0 = Z^2; cone = [(1, 0), (0, 1)];
                  layer = [(1, 0), (0, 1)] periods [(1, 0), (0, 1)]; }
        block O { kind = o2_stable; shape = chain:3; }
        block K { kind = compacts_like; copies = countable; }
    """)
    s, o, k = program.statements
    assert s.get('layer') == LayerExpr(((1, 0), (0, 1)), ((1, 0), (0, 1)))
    assert s.get('cone') == ((1, 0), (0, 1))
    assert o.get('shape') == 'chain:3'
    assert k.get('copies') == 'countable'


def test_parse_expressions_and_classes():
    program = parse("""
        block K { kind = compacts_like; }
        class c { k0 = Z^2; k1 = 0; iota0 = [(1, 0)]; iota1 = []; pi0 = [(0), (1)]; pi1 = []; }
        let E = extension(K, C, class = c);
        let T = unitize(sum(K, K, zero));
        compare E T mode lambda;
    """)
    definitions = program.definitions()
    assert isinstance(definitions['c'], ClassDef)
    assert definitions['E'].expr == Call('extension', (Ref('K'), Ref('C')), 'c')
    assert definitions['T'].expr == Call('unitize', (Call('sum', (Ref('K'), Ref('K'), Ref('zero'))),))
    assert program.directives() == [Directive('compare', ('E', 'T'), 'lambda')]


def test_forward_references_are_allowed():
    program = parse("let T = unitize(K);\nblock K { kind = compacts_like; }")
    assert isinstance(program.statements[0], LetDef)


def test_empty_program():
    program = parse("# nothing here\n")
    assert program.statements == ()
    assert serialize(program) == ""


@pytest.mark.parametrize('text, code, line', [
    ("block X { kind = kirchberg; } @", 'lexical', 1),
    ("block X {\n kind = kirchberg\n}", 'syntax', 3),
    ("let = K;", 'syntax', 1),
    ("compare A B mode exact;", 'syntax', 1),
    ("block X { kind = kirchberg; k0 = Q; }", 'syntax', 1),
    ("check Y;", 'reference', 1),
    ("block K { kind = compacts_like; }\nlet T = unitize(L);", 'reference', 2),
    ("block K { kind = compacts_like; }\nlet E = extension(K, C, class = nope);", 'reference', 2),
    ("block X { kind = kirchberg; }\nblock X { kind = kirchberg; }", 'type', 2),
    ("block C { kind = kirchberg; }", 'type', 1),
    ("block X { flavour = 1; }", 'type', 1),
    ("block X { k0 = Z; }", 'type', 1),
    ("block X { kind = type_iii; }", 'type', 1),
    ("block X { kind = kirchberg; k0 = Z/0; }", 'type', 1),
    ("class c { k0 = Z; }", 'type', 1),
    ("class c { k0 = Z; k1 = 0; iota0 = []; iota1 = []; pi0 = []; pi1 = []; }\nlet T = unitize(c);", 'type', 2),
])
def test_error_codes(text, code, line):
    with pytest.raises(LktError) as info:
        parse(text)
    assert info.value.code == code
    assert info.value.line == line


def test_syntax_error_lists_expected_tokens():
    with pytest.raises(LktError) as info:
        parse("block X { kind = kirchberg }")
    assert ';' in info.value.expected


def test_serialize_round_trip(corpus_files):
    assert corpus_files
    for path in corpus_files:
        program = parse_file(path)
        text = serialize(program)
        assert parse(text) == program
        assert serialize(parse(text)) == text


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_file(str(tmp_path / 'absent.lkt'))
