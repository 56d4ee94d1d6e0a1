#!/usr/bin/env python3
"""Solver stub answering sat with a well-formed but wrong model.

Parses the declared variables and invents values from each variable's
domain assertion shape so the model decodes but witnesses nothing.
"""
import sys

text = sys.stdin.read()
names = []
for line in text.splitlines():
    line = line.strip()
    if line.startswith("(declare-fun "):
        names.append(line.split()[1])
print("sat")
print("(")
for name in names:
    print(f'  (define-fun {name} () String "")')
print(")")
