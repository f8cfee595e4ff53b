import random

import pytest

from packsearch import Alphabet, clear_table_registry, pack


def letters(s: str) -> list[int]:
    """Map a..z to 0..25 (the convention used by the worked examples)."""
    return [ord(c) - ord("a") for c in s]


def packed(s: str, sigma: int = 3):
    return pack(letters(s), Alphabet(sigma))


def random_codes(rng: random.Random, sigma: int, n: int) -> list[int]:
    return [rng.randrange(sigma) for _ in range(n)]


@pytest.fixture(autouse=True)
def _fresh_tables():
    clear_table_registry()
    yield
    clear_table_registry()
