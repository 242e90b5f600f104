"""
Formula grammar: text to AST
"""

import re
from typing import List
import pyparsing as pp
from models.formula import (
    And, Const, Div, Eq, Exists, FALSE, Floor, Forall, Formula, Implies, IsInt,
    Le, Lt, Not, Or, Scale, Sum, TRUE, Term, Var, make_cong
)
from models.normalize import raw_form
from utils.helpers import FormulaSyntaxError, RationalHelper, UnknownIdentifierError

pp.ParserElement.enable_packrat()

KEYWORDS = ("E", "A", "Z", "floor", "div", "cong", "true", "false")
FUNCTION_WORDS = {"Z", "floor", "div", "cong"}

_CALL = re.compile(r"\b([A-Za-z_]\w*)\s*\(")


def _fold_sum(tokens) -> Term:
    items = list(tokens)
    term = items[0]
    for op, right in zip(items[1::2], items[2::2]):
        term = Sum(term, right if op == "+" else Scale(RationalHelper.parse("-1"), right))
    return term


def _comparison(tokens) -> Formula:
    left, op, right = tokens
    form = raw_form(Sum(left, Scale(RationalHelper.parse("-1"), right)))
    return {"=": Eq, "<": Lt, "<=": Le}[op](form)


def _congruence(s, loc, tokens) -> Formula:
    term, modulus, residue = tokens
    if modulus < 1:
        raise pp.ParseFatalException(s, loc, f"cong modulus must be positive, got {modulus}")
    return make_cong(raw_form(term), modulus, residue % modulus)


def _fold_nary(node_type):
    def action(tokens):
        items = list(tokens)
        return items[0] if len(items) == 1 else node_type(tuple(items))
    return action


def _implication(tokens):
    items = list(tokens)
    return items[0] if len(items) == 1 else Implies(items[0], items[1])


def _quantifier(tokens):
    quant, var, body = tokens
    return Exists(var, body) if quant == "E" else Forall(var, body)


def _rational(s, loc, tokens):
    try:
        return RationalHelper.parse(tokens[0])
    except ValueError as e:
        raise pp.ParseFatalException(s, loc, str(e)) from e


def _build_grammar():
    """Construct the formula and term grammars"""
    LPAR, RPAR, COMMA, DOT = map(pp.Suppress, "(),.")
    keyword = pp.MatchFirst([pp.Keyword(k) for k in KEYWORDS])

    identifier = (~keyword + pp.Regex(r"[A-Za-z_]\w*")).set_name("variable")
    integer = pp.Regex(r"-?\d+").set_parse_action(lambda t: int(t[0]))
    rational = pp.Regex(r"-?\d+(\s*/\s*\d+)?").set_name("rational")
    rational.set_parse_action(_rational)

    term = pp.Forward().set_name("term")
    factor = pp.Forward()

    floor_term = (pp.Suppress(pp.Keyword("floor")) + LPAR + term + RPAR).set_parse_action(
        lambda t: Floor(t[0]))
    var_term = identifier.copy().set_parse_action(lambda t: Var(t[0]))
    const_term = rational.copy().add_parse_action(lambda t: Const(t[0]))
    scaled = (rational + pp.Suppress("*") + factor).set_parse_action(lambda t: Scale(t[0], t[1]))
    negated = (pp.Suppress("-") + factor).set_parse_action(
        lambda t: Scale(RationalHelper.parse("-1"), t[0]))
    factor <<= scaled | const_term | negated | floor_term | (LPAR + term + RPAR) | var_term
    term <<= (factor + pp.ZeroOrMore(pp.one_of("+ -") + factor)).set_parse_action(_fold_sum)

    formula = pp.Forward().set_name("formula")
    literal = pp.Forward()

    comparison = (term + pp.one_of("<= < =") + term).set_parse_action(_comparison)
    is_int = (pp.Suppress(pp.Keyword("Z")) + LPAR + term + RPAR).set_parse_action(
        lambda t: IsInt(t[0]))
    divisibility = (pp.Suppress(pp.Keyword("div")) + LPAR + term + COMMA + term + RPAR)
    divisibility.set_parse_action(lambda t: Div(t[0], t[1]))
    congruence = (pp.Suppress(pp.Keyword("cong")) + LPAR + term + COMMA + integer
                  + COMMA + integer + RPAR).set_parse_action(_congruence)
    truth = (pp.Keyword("true").set_parse_action(lambda: TRUE)
             | pp.Keyword("false").set_parse_action(lambda: FALSE))
    atom = (is_int | divisibility | congruence | truth | comparison).set_name("atom")

    # a quantifier body extends as far right as possible, also after & | ->
    quantified = ((pp.Keyword("E") | pp.Keyword("A")) + identifier + DOT + formula)
    quantified.set_parse_action(_quantifier)
    literal <<= ((pp.Suppress("~") + literal).set_parse_action(lambda t: Not(t[0]))
                 | (LPAR + formula + RPAR)
                 | quantified
                 | atom)
    conj = (literal + pp.ZeroOrMore(pp.Suppress("&") + literal)).set_parse_action(_fold_nary(And))
    disj = (conj + pp.ZeroOrMore(pp.Suppress("|") + conj)).set_parse_action(_fold_nary(Or))
    implication = pp.Forward()
    implication <<= (disj + pp.Optional(pp.Suppress("->") + implication)).set_parse_action(
        _implication)
    formula <<= implication
    return formula, term


_FORMULA, _TERM = _build_grammar()


def _check_identifiers(text: str) -> None:
    """Reject applications of anything that is not a language function word"""
    for match in _CALL.finditer(text):
        name = match.group(1)
        if name in FUNCTION_WORDS:
            continue
        position = match.start(1)
        raise UnknownIdentifierError(
            f"Unknown identifier '{name}'",
            pp.lineno(position, text), pp.col(position, text))


def _run(grammar, text: str):
    _check_identifiers(text)
    try:
        results: List = grammar.parse_string(text, parse_all=True).as_list()
    except (pp.ParseException, pp.ParseFatalException) as e:
        raise FormulaSyntaxError(f"Syntax error: {e.msg}", e.lineno, e.col) from e
    return results[0]


def parse_formula(text: str) -> Formula:
    """Parse formula text into an AST"""
    return _run(_FORMULA, text)


def parse_term(text: str) -> Term:
    """Parse a single term"""
    return _run(_TERM, text)
