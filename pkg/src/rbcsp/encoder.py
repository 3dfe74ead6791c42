"""CNF encoding and file formats.

Direct encoding: propositional variable x(u, v) = u*d + v + 1 asserts
"CSP variable u takes value v".  Clauses are emitted in a fixed order:

1. one domain clause per variable:  x(u,0) v ... v x(u,d-1);
2. pairwise at-most-one clauses per variable:  -x(u,v) v -x(u,v') for v < v';
3. one conflict clause per forbidden tuple, constraints in instance order,
   tuples in ascending rank order:  -x(u1,v1) v ... v -x(uk,vk).

Domain and at-most-one clauses make CNF models biject with total CSP
assignments, so the model count equals the solution count.  With
``split_width`` w >= 3, domain clauses wider than w are decomposed into a
chain of width-<=w clauses over fresh auxiliary variables (allocated after
n*d in emission order); satisfiability and the model count projected onto
the x(u,v) variables are preserved.

Native text format ``RBCSP 1`` (UTF-8, "\\n" endings, 1-indexed variables
and values, reals printed with 17 significant digits)::

    RBCSP 1
    params <model> <k> <n> <alpha> <r> <p> <seed>
    sizes <d> <m>
    c <i1> ... <ik>         one per constraint, ascending variable indices
    t <v1> ... <vk>         forbidden tuples of the constraint above,
                            ascending rank order

The hidden assignment of a forced instance is never written into either
format; on request it goes to a sidecar ``.solution`` file of 1-indexed
"<variable> <value>" lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Assignment,
    Constraint,
    CspInstance,
    CspParams,
    ModelKind,
    ParameterError,
    ParseError,
    derive_sizes,
    tuple_rank,
)

__all__ = [
    "CnfFormula",
    "encode_cnf",
    "write_dimacs",
    "write_csp_native",
    "read_csp_native",
    "write_solution",
]


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    metadata: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ParameterError(f"literal {lit} out of range in clause {clause}")


def _fmt_real(x: float) -> str:
    return f"{x:.17g}"


def _split_clause(literals: list[int], width: int, next_aux: int) -> tuple[list[list[int]], int]:
    """Chain decomposition of a wide clause into width-<=w pieces.

    Each link carries the previous auxiliary negated, a chunk of original
    literals, and a fresh carry auxiliary; the carry means "no literal so
    far was true".
    """
    chunks: list[list[int]] = []
    rest = literals
    carry: int | None = None
    while True:
        room = width - (1 if carry is not None else 0)
        if len(rest) <= room:
            chunk = ([-carry] if carry is not None else []) + rest
            chunks.append(chunk)
            break
        take = room - 1
        aux = next_aux
        next_aux += 1
        chunk = ([-carry] if carry is not None else []) + rest[:take] + [aux]
        chunks.append(chunk)
        carry = aux
        rest = rest[take:]
    return chunks, next_aux


def encode_cnf(instance: CspInstance, split_width: int | None = None) -> CnfFormula:
    """Direct encoding; see the module docstring for numbering and order."""
    if split_width is not None and split_width < 3:
        raise ParameterError(f"split_width must be >= 3, got {split_width}")
    n = instance.params.n
    d = instance.sizes.d

    def var(u: int, v: int) -> int:
        return u * d + v + 1

    clauses: list[tuple[int, ...]] = []
    next_aux = n * d + 1
    for u in range(n):
        domain = [var(u, v) for v in range(d)]
        if split_width is not None and len(domain) > split_width:
            pieces, next_aux = _split_clause(domain, split_width, next_aux)
            clauses.extend(tuple(p) for p in pieces)
        else:
            clauses.append(tuple(domain))
    for u in range(n):
        for v in range(d):
            for w in range(v + 1, d):
                clauses.append((-var(u, v), -var(u, w)))
    for con in instance.constraints:
        for values in con.incompatible:
            clauses.append(tuple(-var(u, v) for u, v in zip(con.scope, values)))

    p = instance.params
    meta = (
        ("model", p.model.value),
        ("k", str(p.k)),
        ("n", str(p.n)),
        ("alpha", repr(p.alpha)),
        ("r", repr(p.r)),
        ("p", repr(p.p)),
        ("d", str(d)),
        ("m", str(instance.sizes.m)),
        ("q", str(instance.sizes.q)),
        ("seed", str(instance.seed)),
        ("forced", "1" if instance.forced is not None else "0"),
    )
    return CnfFormula(num_vars=next_aux - 1, clauses=tuple(clauses), metadata=meta)


def write_dimacs(cnf: CnfFormula) -> str:
    lines = [f"c {key}={value}" for key, value in cnf.metadata]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for clause in cnf.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def write_csp_native(instance: CspInstance) -> str:
    p = instance.params
    lines = [
        "RBCSP 1",
        "params {} {} {} {} {} {} {}".format(
            p.model.value, p.k, p.n, _fmt_real(p.alpha), _fmt_real(p.r),
            _fmt_real(p.p), instance.seed,
        ),
        f"sizes {instance.sizes.d} {instance.sizes.m}",
    ]
    for con in instance.constraints:
        lines.append("c " + " ".join(str(u + 1) for u in con.scope))
        for values in con.incompatible:
            lines.append("t " + " ".join(str(v + 1) for v in values))
    return "\n".join(lines) + "\n"


def read_csp_native(text: str) -> CspInstance:
    """Parse the RBCSP 1 format back into an instance (hidden assignments
    are not part of the format, so `forced` comes back None)."""
    lines = text.splitlines()

    def fail(no: int, msg: str):
        raise ParseError(no + 1, msg)

    if not lines or lines[0].strip() != "RBCSP 1":
        fail(0, "expected header 'RBCSP 1'")

    if len(lines) < 3:
        fail(len(lines) - 1, "truncated file: missing params/sizes lines")
    parts = lines[1].split()
    if len(parts) != 8 or parts[0] != "params":
        fail(1, "expected 'params <model> <k> <n> <alpha> <r> <p> <seed>'")
    try:
        model = ModelKind(parts[1])
        params = CspParams(
            model=model, k=int(parts[2]), n=int(parts[3]),
            alpha=float(parts[4]), r=float(parts[5]), p=float(parts[6]),
        )
        seed = int(parts[7])
    except (ValueError, ParameterError) as exc:
        raise ParseError(2, f"bad params line: {exc}") from None

    sizes = derive_sizes(params)
    parts = lines[2].split()
    if len(parts) != 3 or parts[0] != "sizes":
        fail(2, "expected 'sizes <d> <m>'")
    try:
        declared = (int(parts[1]), int(parts[2]))
    except ValueError:
        declared = None
    if declared != (sizes.d, sizes.m):
        fail(2, f"declared sizes {parts[1:]} disagree with derived ({sizes.d}, {sizes.m})")

    constraints: list[Constraint] = []
    scope: tuple[int, ...] | None = None
    tuples: list[tuple[int, ...]] = []

    def flush(no: int):
        if scope is None:
            return
        if params.model is ModelKind.RB and len(tuples) != sizes.q:
            fail(no, f"RB constraint has {len(tuples)} tuples, expected q = {sizes.q}")
        constraints.append(Constraint(scope=scope, incompatible=tuple(tuples)))

    for no, line in enumerate(lines[3:], start=3):
        stripped = line.strip()
        if not stripped:
            continue
        fields = stripped.split()
        if fields[0] == "c":
            flush(no)
            if len(fields) != params.k + 1:
                fail(no, f"scope needs {params.k} variables, got {len(fields) - 1}")
            try:
                scope = tuple(int(f) - 1 for f in fields[1:])
            except ValueError:
                fail(no, f"non-integer variable index in {stripped!r}")
            if any(not 0 <= u < params.n for u in scope):
                fail(no, f"variable index out of range in {stripped!r}")
            tuples = []
        elif fields[0] == "t":
            if scope is None:
                fail(no, "tuple line before any constraint line")
            if len(fields) != params.k + 1:
                fail(no, f"tuple needs {params.k} values, got {len(fields) - 1}")
            try:
                values = tuple(int(f) - 1 for f in fields[1:])
            except ValueError:
                fail(no, f"non-integer value in {stripped!r}")
            if any(not 0 <= v < sizes.d for v in values):
                fail(no, f"value out of range in {stripped!r}")
            if tuples and tuple_rank(values, sizes.d) <= tuple_rank(tuples[-1], sizes.d):
                fail(no, "tuples out of ascending rank order")
            tuples.append(values)
        else:
            fail(no, f"unrecognized line {stripped!r}")
    flush(len(lines))

    if len(constraints) != sizes.m:
        raise ParseError(len(lines), f"found {len(constraints)} constraints, expected m = {sizes.m}")
    return CspInstance(params=params, sizes=sizes, constraints=tuple(constraints), seed=seed)


def write_solution(assignment: Assignment) -> str:
    """Sidecar text for a hidden assignment: 1-indexed '<variable> <value>' lines."""
    return "\n".join(f"{u + 1} {v + 1}" for u, v in enumerate(assignment.values)) + "\n"
