#!/usr/bin/env python3
"""Solver stub that always gives up."""
import sys

sys.stdin.read()
print("unknown")
