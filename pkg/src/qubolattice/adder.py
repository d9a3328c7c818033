"""Integer addition as a QUBO with coupling constants independent of width.

The grade-school algorithm is encoded column by column: each column constraint
(y_j + 2 z_{j+1} - x1_j - x2_j - z_j)^2 vanishes exactly when the output and
carry bits are consistent, so the total is zero iff Y = X1 + X2.  The incoming
carry z_0 is omitted (it is identically zero) and the top output bit doubles
as the final carry, giving 4n bits for n-bit inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .qubo import BINARY, Qubo, QuboBuilder, clamp  # noqa: F401  (clamp re-exported)


class AdderError(ValueError):
    """Invalid adder parameter."""


@dataclass
class AdderQubo:
    """Adder objective plus the variable-role map."""

    n: int
    qubo: Qubo
    role_index: dict[str, int]

    def input_roles(self, which: int) -> list[str]:
        return [f"x{which}:{j}" for j in range(self.n)]

    def output_roles(self) -> list[str]:
        return [f"y:{j}" for j in range(self.n + 1)]


def _column_terms(builder: QuboBuilder, out_bit: str, carry_out: str | None,
                  carry_in: str | None, addends: list[tuple[str, float]]) -> None:
    terms: list[tuple[str, float]] = [(out_bit, 1.0)]
    if carry_out is not None:
        terms.append((carry_out, 2.0))
    if carry_in is not None:
        terms.append((carry_in, -1.0))
    terms.extend((name, -coeff) for name, coeff in addends)
    builder.add_squared_affine(0.0, terms)


def build_adder(n: int) -> AdderQubo:
    """Column-wise adder for two n-bit inputs.

    Variables: x1:j, x2:j (inputs), y:j (outputs, j <= n), z:j (carries,
    1 <= j < n).  y:n is the aliased top carry.  Zero energy iff the outputs
    and carries encode X1 + X2 exactly.
    """
    if n < 1:
        raise AdderError("adder width must be at least 1")
    builder = QuboBuilder(BINARY)
    for which in (1, 2):
        for j in range(n):
            builder.var(f"x{which}:{j}")
    for j in range(n + 1):
        builder.var(f"y:{j}")
    for j in range(1, n):
        builder.var(f"z:{j}")
    for j in range(n):
        carry_out = f"y:{n}" if j == n - 1 else f"z:{j + 1}"
        carry_in = None if j == 0 else f"z:{j}"
        _column_terms(
            builder,
            f"y:{j}",
            carry_out,
            carry_in,
            [(f"x1:{j}", 1.0), (f"x2:{j}", 1.0)],
        )
    q = builder.build()
    roles = {q.name_of(i): i for i in range(q.num_vars)}
    return AdderQubo(n, q, roles)


def build_naive_adder(n: int) -> AdderQubo:
    """Single squared constraint with power-of-two weights.

    Reference oracle only: its couplings grow like 4^n, which is useless for
    hardware but convenient to compare ground sets against build_adder.
    """
    if n < 1:
        raise AdderError("adder width must be at least 1")
    builder = QuboBuilder(BINARY)
    terms: list[tuple[str, float]] = []
    for j in range(n):
        terms.append((f"x1:{j}", -float(2**j)))
        terms.append((f"x2:{j}", -float(2**j)))
    for j in range(n + 1):
        terms.append((f"y:{j}", float(2**j)))
    builder.add_squared_affine(0.0, terms)
    q = builder.build()
    roles = {q.name_of(i): i for i in range(q.num_vars)}
    return AdderQubo(n, q, roles)


def build_selectable_adder(
    constants: tuple[int, int],
    selectors: tuple[str, str] = ("xa", "xb"),
    prefix: str = "X",
) -> tuple[Qubo, dict[str, int], int]:
    """Adder whose two addends are fixed integers gated by selector bits.

    Ground states have output register = n_a * x_a + n_b * x_b for every
    selector combination.  Returns (qubo, role index, output width M + 1)
    where M is the bit width of the larger constant.
    """
    n_a, n_b = constants
    if n_a < 0 or n_b < 0:
        raise AdderError("selectable adder constants must be nonnegative")
    M = max(1, max(n_a, n_b).bit_length())
    builder = QuboBuilder(BINARY)
    builder.var(selectors[0])
    builder.var(selectors[1])
    for j in range(M + 1):
        builder.var(f"{prefix}:{j}")
    for j in range(1, M):
        builder.var(f"Z{prefix}:{j}")
    for j in range(M):
        carry_out = f"{prefix}:{M}" if j == M - 1 else f"Z{prefix}:{j + 1}"
        carry_in = None if j == 0 else f"Z{prefix}:{j}"
        addends = []
        if (n_a >> j) & 1:
            addends.append((selectors[0], 1.0))
        if (n_b >> j) & 1:
            addends.append((selectors[1], 1.0))
        _column_terms(builder, f"{prefix}:{j}", carry_out, carry_in, addends)
    q = builder.build()
    roles = {q.name_of(i): i for i in range(q.num_vars)}
    return q, roles, M + 1


def read_register(assignment, roles: dict[str, int], prefix: str, width: int) -> int:
    """Integer value of a register from its bit roles."""
    total = 0
    for j in range(width):
        total += (1 << j) * int(assignment[roles[f"{prefix}:{j}"]])
    return total
