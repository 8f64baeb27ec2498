import random
from pathlib import Path

import pytest

from canext.exact import Matrix
from canext.monodromy import exp_action_poly, model_from_json, model_from_logs, validate_model
from canext.poly import MultiPoly, substitute, var_names

DATA = Path(__file__).resolve().parents[1] / "src" / "canext" / "data"


def E(d, i, j):
    """Matrix unit with 1-based indices."""
    return Matrix.unit(d, i - 1, j - 1)


def jordan(d):
    return sum((E(d, i, i + 1) for i in range(1, d)), Matrix.zeros(d, d))


def block_diag(*blocks):
    d = sum(b.nrows for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for r in b.rows():
            rows.append((0,) * off + tuple(r) + (0,) * (d - off - b.nrows))
        off += b.nrows
    return Matrix(rows, d)


def _corpus():
    J4 = jordan(4)
    J2 = jordan(2)
    Z2 = Matrix.zeros(2, 2)
    N1 = block_diag(J2, Z2)
    N2 = block_diag(Z2, J2)
    e = E
    return {
        "worked": (model_from_logs([e(2, 1, 2), -e(2, 1, 2)]), (0, 1)),
        "no_contact": (model_from_logs([e(2, 1, 2), e(2, 1, 2) * 2]), (0, 1)),
        "s12": (model_from_logs([e(2, 1, 2) * 2, -e(2, 1, 2)]), (0, 1)),
        "invariant_h": (model_from_logs([e(2, 1, 2), -e(2, 1, 2)]), (1, 0)),
        "jordan3": (model_from_json((DATA / "jordan3.json").read_text()), (0, 0, 1)),
        "two_dirs_closed": (model_from_logs([e(3, 1, 3), e(3, 2, 3)]), (0, 0, 1)),
        "two_dirs_contact": (model_from_logs([e(3, 1, 3), e(3, 2, 3), -e(3, 1, 3) - e(3, 2, 3)]), (0, 0, 1)),
        "rank2_stabilizer": (model_from_logs([e(2, 1, 2), e(2, 1, 2), e(2, 1, 2) * -2]), (0, 1)),
        "jordan4_powers": (model_from_logs([J4, J4 @ J4, -J4 - J4 @ J4]), (0, 0, 0, 1)),
        "two_blocks": (model_from_logs([N1, N2, -N1 - N2]), (0, 1, 0, 1)),
        "jordan4_scaled": (model_from_logs([J4, J4 * -2]), (0, 0, 1, 3)),
    }


CORPUS = _corpus()
CONTACT_CASES = [name for name in CORPUS if name not in ("no_contact", "two_dirs_closed")]


@pytest.fixture(params=sorted(CORPUS))
def instance(request):
    model, h = CORPUS[request.param]
    return request.param, model, h


@pytest.fixture
def worked():
    return CORPUS["worked"][0]


def random_unipotent_generators(rng: random.Random, d: int, count: int):
    """Commuting integer unipotent matrices built as words in I + J^m for one nilpotent J."""
    J = Matrix([[rng.randint(-2, 2) if j > i else 0 for j in range(d)] for i in range(d)])
    basics = [Matrix.identity(d) + J**m for m in range(1, d)] or [Matrix.identity(d)]
    out = []
    for _ in range(count):
        T = Matrix.identity(d)
        for b in basics:
            T = T @ (b ** rng.randint(-1, 1))
        out.append(T)
    return out


def random_model(rng: random.Random, n: int, d: int, contact: bool = False):
    """Random commuting unipotent model; with ``contact`` the last generator closes a positive relation."""
    if not contact:
        return validate_model(random_unipotent_generators(rng, d, n))
    Ts = random_unipotent_generators(rng, d, n - 1)
    weights = [rng.randint(1, 2) for _ in Ts]
    prod = Matrix.identity(d)
    for T, a in zip(Ts, weights):
        prod = prod @ (T**a)
    return validate_model(Ts + [prod.inverse()])


def symbolic_left_inverse(pres) -> bool:
    """``p_s(exp(-sum w_s M_s) h) == w_s`` and every eqA component vanishes on the orbit map."""
    k = pres.k
    ws = var_names("w", k)
    orbit = exp_action_poly(pres.M[:k], pres.h, ws)
    assignment = dict(zip(pres.variables, orbit))
    ok = all(substitute(p, assignment) == w for p, w in zip(pres.p, MultiPoly.gens(ws)))
    return ok and all(substitute(e, assignment).is_zero() for e in pres.eqA)


# acceptance criteria report: number -> (passed, title, detail)
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}  {detail}")
