#!/usr/bin/env python3
"""Reference SMT solver for the narrow string grammar the package emits.

Standalone on purpose: it decides satisfiability by enumerating each String
variable's bounded domain and evaluating the asserted terms, with regular
expressions translated to Python ``re`` patterns.  It answers ``unknown``
when the assignment space is too large, so keep it to small test instances.

Reads SMT-LIB2 from stdin (or a file argument), prints sat/unsat/unknown and
a model on sat.
"""

import itertools
import re
import sys

MAX_ASSIGNMENTS = 2_000_000


def tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in "()":
            tokens.append(c)
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            tokens.append(text[i : j + 1])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"':
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def parse(tokens):
    out = []
    stack = [out]
    for tok in tokens:
        if tok == "(":
            node = []
            stack[-1].append(node)
            stack.append(node)
        elif tok == ")":
            stack.pop()
        else:
            stack[-1].append(tok)
    return out


def unquote(lit):
    body = lit[1:-1]
    out = []
    i = 0
    while i < len(body):
        if body[i] == '"' and i + 1 < len(body) and body[i + 1] == '"':
            out.append('"')
            i += 2
        elif body[i] == "\\" and body[i : i + 3] == "\\u{":
            end = body.index("}", i)
            out.append(chr(int(body[i + 3 : end], 16)))
            i = end + 1
        else:
            out.append(body[i])
            i += 1
    return "".join(out)


def quote(s):
    out = []
    for c in s:
        if c == '"':
            out.append('""')
        elif 0x20 <= ord(c) <= 0x7E:
            out.append(c)
        else:
            out.append("\\u{%x}" % ord(c))
    return '"' + "".join(out) + '"'


def regex_to_python(node):
    """Translate the emitted re.* subset into a Python regex string."""
    if isinstance(node, str):
        raise ValueError(f"unexpected bare regex token: {node}")
    head = node[0]
    if head == "str.to_re":
        return re.escape(unquote(node[1]))
    if head == "re.range":
        lo, hi = unquote(node[1]), unquote(node[2])
        return "[" + re.escape(lo) + "-" + re.escape(hi) + "]"
    if head == "re.union":
        return "(?:" + "|".join(regex_to_python(c) for c in node[1:]) + ")"
    if head == "re.++":
        return "".join(regex_to_python(c) for c in node[1:])
    if head == "re.none":
        return "(?!)"
    if isinstance(head, list) and head and head[0] == "_" and head[1] == "re.loop":
        lo, hi = int(head[2]), int(head[3])
        return "(?:" + regex_to_python(node[1]) + "){%d,%d}" % (lo, hi)
    raise ValueError(f"unsupported regex node: {node}")


def regex_chars(node, acc):
    """All characters a regex built from the emitted grammar can produce."""
    head = node[0]
    if head == "str.to_re":
        acc.update(unquote(node[1]))
    elif head == "re.range":
        lo, hi = unquote(node[1]), unquote(node[2])
        for cp in range(ord(lo), ord(hi) + 1):
            acc.add(chr(cp))
    elif head in ("re.union", "re.++"):
        for c in node[1:]:
            regex_chars(c, acc)
    elif isinstance(head, list) and head[0] == "_":
        regex_chars(node[1], acc)


class Evaluator:
    def __init__(self):
        self.regex_cache = {}

    def holds(self, term, env):
        if term == "true":
            return True
        if term == "false":
            return False
        head = term[0]
        if head == "and":
            return all(self.holds(t, env) for t in term[1:])
        if head == "or":
            return any(self.holds(t, env) for t in term[1:])
        if head == "not":
            return not self.holds(term[1], env)
        if head == "=":
            return env[term[1]] == unquote(term[2])
        if head == "str.in_re":
            key = id(term[2])
            rx = self.regex_cache.get(key)
            if rx is None:
                rx = self.regex_cache[key] = re.compile(regex_to_python(term[2]))
            return rx.fullmatch(env[term[1]]) is not None
        raise ValueError(f"unsupported term: {term}")


def domain_of(var, asserts):
    """Candidate values for one variable, from its domain-shaped assertion."""
    for term in asserts:
        if isinstance(term, str):
            continue
        if term[0] == "str.in_re" and term[1] == var:
            loop = term[2]
            if isinstance(loop[0], list) and loop[0][0] == "_" and loop[0][1] == "re.loop":
                hi = int(loop[0][3])
                chars = set()
                regex_chars(loop[1], chars)
                words = [""]
                frontier = [""]
                for _ in range(hi):
                    frontier = [w + c for w in frontier for c in sorted(chars)]
                    words.extend(frontier)
                    if len(words) > MAX_ASSIGNMENTS:
                        return None
                return words
        if term[0] == "=" and term[1] == var:
            return [unquote(term[2])]
        if term[0] == "or" and all(
            isinstance(c, list) and c[0] == "=" and c[1] == var for c in term[1:]
        ):
            return [unquote(c[2]) for c in term[1:]]
    return None


def main():
    if len(sys.argv) > 1:
        text = open(sys.argv[1], encoding="utf-8").read()
    else:
        text = sys.stdin.read()
    nodes = parse(tokenize(text))
    variables = []
    asserts = []
    for node in nodes:
        if not isinstance(node, list) or not node:
            continue
        if node[0] == "declare-fun" and node[3] == "String":
            variables.append(node[1])
        elif node[0] == "declare-const" and node[2] == "String":
            variables.append(node[1])
        elif node[0] == "assert":
            asserts.append(node[1])

    domains = []
    total = 1
    for var in variables:
        dom = domain_of(var, asserts)
        if dom is None:
            print("unknown")
            return
        domains.append(dom)
        total *= max(len(dom), 1)
        if total > MAX_ASSIGNMENTS:
            print("unknown")
            return

    ev = Evaluator()
    for combo in itertools.product(*domains):
        env = dict(zip(variables, combo))
        try:
            if all(ev.holds(t, env) for t in asserts):
                print("sat")
                print("(")
                for var in variables:
                    print(f"  (define-fun {var} () String {quote(env[var])})")
                print(")")
                return
        except ValueError:
            print("unknown")
            return
    print("unsat")


if __name__ == "__main__":
    main()
