# Keeps the tests directory importable (shared corpus helpers live in corpus.py).
