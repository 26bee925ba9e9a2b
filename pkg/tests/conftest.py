import numpy as np
import pytest

from parasort.core import ElementWidth, PayloadMode, SortSequence
from parasort.runtime import Runtime


@pytest.fixture(scope="session")
def rt4():
    """Four workers and tiny chunks, so modest inputs still span many work items."""
    with Runtime(workers=4, chunk_size=256) as rt:
        yield rt


@pytest.fixture(scope="session")
def runtimes():
    """One runtime per worker count used by the determinism checks."""
    rts = {w: Runtime(workers=w, chunk_size=256) for w in (1, 2, 4, 8)}
    yield rts
    for r in rts.values():
        r.close()


def random_seq(rng: np.random.Generator, n: int, width=ElementWidth.W32, pairs=False, distinct=None) -> SortSequence:
    hi = np.iinfo(width.dtype).max
    if distinct is None:
        keys = rng.integers(0, hi, size=n, dtype=width.dtype, endpoint=True)
    else:
        pool = rng.integers(0, hi, size=distinct, dtype=width.dtype, endpoint=True)
        keys = pool[rng.integers(0, distinct, size=n)]
    vals = np.arange(n, dtype=width.dtype) if pairs else None
    return SortSequence(keys, vals)


def stable_oracle(seq: SortSequence) -> SortSequence:
    """Stable sort written independently of the package: Python's timsort on (key, index)."""
    order = sorted(range(seq.n), key=lambda i: int(seq.keys[i]))
    keys = seq.keys[np.array(order, dtype=np.int64)] if seq.n else seq.keys.copy()
    vals = None
    if seq.values is not None:
        vals = seq.values[np.array(order, dtype=np.int64)] if seq.n else seq.values.copy()
    return SortSequence(keys, vals)


PAYLOADS = (PayloadMode.KEYS_ONLY, PayloadMode.KEY_VALUE)
WIDTHS = (ElementWidth.W32, ElementWidth.W64)


# acceptance criteria report: test_acceptance.py records one verdict per criterion
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: (int("".join(ch for ch in c if ch.isdigit())), c)):
        ok, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"criterion {cid:>3}: {'PASS' if ok else 'FAIL'}  {detail}")
