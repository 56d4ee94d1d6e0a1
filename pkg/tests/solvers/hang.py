#!/usr/bin/env python3
"""Solver stub that never answers; exercises the timeout/kill path."""
import sys
import time

sys.stdin.read()
time.sleep(3600)
