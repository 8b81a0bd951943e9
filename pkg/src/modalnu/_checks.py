"""Switch for expensive internal consistency checks.

The test suite turns these on (see ``tests/conftest.py``); library users pay
nothing for them. ``counts`` records how often each check ran so tests can
assert that the checks actually fired.
"""
from collections import Counter

enabled = False
counts = Counter()


def enable(flag=True):
    global enabled
    enabled = flag
