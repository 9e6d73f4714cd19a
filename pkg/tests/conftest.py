"""Shared helpers, including a slow reference simulator.

The reference builds every op as an explicit permutation or matrix over
computational basis digit tuples and multiplies dense matrices. It shares no
code with the package simulator, so it serves as an independent oracle on
small circuits.
"""

import itertools

import numpy as np
import pytest

from qdecontrol.circuit import Adder, CSwap, Gate, OracleCall, apply_variant


def _basis(dims):
    return list(itertools.product(*[range(d) for d in dims]))


def _flat(digits, dims):
    i = 0
    for x, d in zip(digits, dims):
        i = i * d + x
    return i


def _local(layout, op_regs, digits):
    idx = 0
    for r in op_regs:
        k = layout.names.index(r)
        idx = idx * layout.dims[k] + digits[k]
    return idx


def _with_local(layout, op_regs, digits, value):
    out = list(digits)
    for r in reversed(op_regs):
        k = layout.names.index(r)
        out[k] = value % layout.dims[k]
        value //= layout.dims[k]
    return tuple(out)


def dense_op(layout, op, u, phase=1.0):
    dims = layout.dims
    n = int(np.prod(dims))
    m = np.zeros((n, n), dtype=complex)
    names = layout.names
    for digits in _basis(dims):
        col = _flat(digits, dims)
        if isinstance(op, Gate) or isinstance(op, OracleCall):
            if isinstance(op, Gate):
                regs, g, active = op.regs, op.matrix, True
            else:
                target = [r.name for r in layout.registers if r.role == op.target][0]
                regs, g = (target,), apply_variant(phase * np.asarray(u), op.variant)
                active = (not op.controlled) or digits[names.index(op.control)] == 1
            if not active:
                m[col, col] = 1
                continue
            i = _local(layout, regs, digits)
            for j in range(g.shape[0]):
                m[_flat(_with_local(layout, regs, digits, j), dims), col] += g[j, i]
        elif isinstance(op, Adder):
            out = list(digits)
            if op.control is None or digits[names.index(op.control)] == 1:
                k = names.index(op.reg)
                out[k] = (out[k] + op.shift) % dims[k]
            m[_flat(out, dims), col] = 1
        elif isinstance(op, CSwap):
            out = list(digits)
            if digits[names.index(op.control)] == 1:
                a, b = names.index(op.a), names.index(op.b)
                out[a], out[b] = out[b], out[a]
            m[_flat(out, dims), col] = 1
        else:
            raise TypeError(op)
    return m


def dense_unitary(c, u, phase=1.0):
    n = c.layout.total_dim
    total = np.eye(n, dtype=complex)
    for op in c.ops:
        total = dense_op(c.layout, op, u, phase) @ total
    return total


def dense_state(c, u, phase=1.0):
    return dense_unitary(c, u, phase)[:, 0]


def loop_partial_trace(rho, dims, keep):
    """Double-sum definition of the partial trace."""
    keep = sorted(keep)
    kd = [dims[i] for i in keep]
    td = [dims[i] for i in range(len(dims)) if i not in keep]
    out = np.zeros((int(np.prod(kd)) if kd else 1,) * 2, dtype=complex)

    def join(k, t):
        digits, ki, ti = [], 0, 0
        for i in range(len(dims)):
            if i in keep:
                digits.append(k[ki]); ki += 1
            else:
                digits.append(t[ti]); ti += 1
        return _flat(digits, dims)

    kb, tb = _basis(kd), _basis(td)
    for a, ka in enumerate(kb):
        for b, kb_ in enumerate(kb):
            out[a, b] = sum(rho[join(ka, t), join(kb_, t)] for t in tb)
    return out


def dense_density(c, u, phase=1.0):
    psi = dense_state(c, u, phase)
    keep = [i for i, r in enumerate(c.layout.registers) if r.name not in c.layout.traced]
    return loop_partial_trace(np.outer(psi, psi.conj()), c.layout.dims, keep)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance report -------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
