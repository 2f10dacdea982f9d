"""Command-line front end: JSON files in, one JSON document out.

Every command prints ``{"value": ..., "certificate": ..., "seed": ...}``
(plus ``"status"`` and ``"diagnostics"``) and exits with 0 when the result
was computed, 1 when the tested predicate is false or a search failed, and
2 on bad input.  Output uses sorted keys, so identical inputs and seeds give
byte-identical output.
"""

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import acceptance
from ._validation import DEFAULT_TOL, DimensionError
from .gentrans import (
    GenTransposition,
    PartialGenTransposition,
    fractional_transpose,
    gen_transpose,
    gen_transpose_channel,
    is_compatible_channel,
    is_unital_gt,
    prep_compat,
    ubb_search,
)
from .io import (
    SchemaError,
    channel_from_json,
    channel_to_json,
    choi_from_json,
    dumps,
    load_json,
    matrix_from_json,
    tensor_from_json,
)
from .matcore import is_unitary
from .measures import (
    HypothesisError,
    geometric_capacity,
    info_destruction,
    leakage,
    solve_diamond,
    verify_cauloc,
    verify_cauloc2,
    xi_nonswappability,
)
from .optim import UnitaryOptimizer
from .tensors import (
    TensorNode,
    dynamics_tensor_witness,
    is_perfect_tensor,
    is_rotationally_perfect,
    proper_dynamics_witness,
)

__all__ = ["CommandResult", "run", "selftest", "main", "EXIT_CODES"]

EXIT_CODES = {"ok": 0, "predicate_false": 1, "input_error": 2}


@dataclass(frozen=True)
class CommandResult:
    status: str
    payload: object
    diagnostics: list = field(default_factory=list)
    seed: object = None

    def __post_init__(self):
        if self.status not in EXIT_CODES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def exit_code(self):
        return EXIT_CODES[self.status]

    def to_json(self):
        doc = {"status": self.status, "diagnostics": list(self.diagnostics), "seed": self.seed}
        if isinstance(self.payload, dict):
            doc.update(self.payload)
        else:
            doc["value"] = self.payload
        return dumps(doc)


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so that ``run`` can report input errors."""

    def error(self, message):
        raise _InputError(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        if status:
            raise _InputError(message or f"{self.prog}: exit {status}")
        raise _InputError(message or "help requested")


# file loaders: every error names the flag and file


def _load(path, flag, reader):
    name = f"{flag} {path}"
    try:
        return reader(load_json(path, name), name)
    except (ValueError, TypeError) as exc:
        if name in str(exc):
            raise
        raise SchemaError(f"{name}: {exc}") from None


def _matrix(path, flag):
    return _load(path, flag, matrix_from_json)


def _channel(path, flag):
    return _load(path, flag, channel_from_json)


def _square_size(m, flag, size):
    if m.shape != (size, size):
        raise DimensionError(f"{flag}: expected a {size}x{size} matrix, got {m.shape[0]}x{m.shape[1]}")


def _w_side(w, flag="--w"):
    d = int(round(np.sqrt(w.shape[0])))
    if w.shape[0] != w.shape[1] or d * d != w.shape[0]:
        raise DimensionError(f"{flag}: expected a d²xd² matrix, got {w.shape[0]}x{w.shape[1]}")
    return d


def _optimizer(args, restarts=8):
    kw = {"restarts": restarts, "seed": args.seed}
    if args.max_iter is not None:
        kw["max_iter"] = args.max_iter
    return UnitaryOptimizer(**kw)


def _doc(value, certificate=None, seed=None):
    return {"value": value, "certificate": certificate or {}, "seed": seed}


def _ok(value, certificate=None, seed=None, diagnostics=()):
    return CommandResult("ok", _doc(value, certificate, seed), list(diagnostics), seed)


def _false(value, certificate=None, seed=None, diagnostics=()):
    return CommandResult("predicate_false", _doc(value, certificate, seed), list(diagnostics), seed)


def _measure_payload(res):
    return _doc(res.value, res.certificate, res.seed)


# gtrans


def _gtrans_apply(args):
    w = _matrix(args.w, "--w")
    d = _w_side(w)
    m = _matrix(args.m, "--m")
    _square_size(m, "--m", d)
    t = GenTransposition(w, d)
    cert = {"w_unitary": t.is_unitary, "unital": bool(is_unital_gt(t, args.tol))}
    return _ok(gen_transpose(m, t), cert)


def _gtrans_fractional(args):
    m = _matrix(args.m, "--m")
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"--m: expected a square matrix, got {m.shape[0]}x{m.shape[1]}")
    return _ok(fractional_transpose(m, args.theta), {"theta": args.theta})


def _gtrans_compat(args):
    n = _channel(args.channel, "--channel")
    w = _matrix(args.w, "--w")
    d = _w_side(w)
    if n.in_dim != n.out_dim:
        raise DimensionError(f"--channel: needs equal in/out dimensions, got {n.in_dim}->{n.out_dim}")
    inner = GenTransposition(w, d)
    if args.partial is None:
        if n.in_dim != d:
            raise DimensionError(f"--channel: dimension {n.in_dim} does not match --w side {d}")
        t = inner
    else:
        if n.in_dim % d:
            raise DimensionError(f"--channel: dimension {n.in_dim} is not a multiple of --w side {d}")
        other = n.in_dim // d
        dims, target = ((other, d), 1) if args.partial == "B" else ((d, other), 0)
        t = PartialGenTransposition(inner, dims, target)
    if not inner.is_unitary:
        return _false(None, {"reason": "w is not unitary"})
    image = gen_transpose_channel(n, t)
    ok = is_compatible_channel(n, t, args.tol)
    cert = {"compatible": bool(ok), "partial": args.partial}
    if image.is_unitary_channel(args.tol):
        u = np.asarray(image.terms[0][1])
        cert["image_unitary"] = u * np.sqrt(abs(image.terms[0][0]))
    return (_ok if ok else _false)(channel_to_json(image), cert)


def _gtrans_prep_compat(args):
    w = _matrix(args.w, "--w")
    d = _w_side(w)
    sigma = _matrix(args.sigma, "--sigma")
    _square_size(sigma, "--sigma", d)
    tau = prep_compat(w, sigma, args.tol)
    if tau is None:
        return _false(None, {"compatible": False})
    return _ok(tau, {"compatible": True})


def _gtrans_ubb(args):
    w = _matrix(args.w, "--w")
    _w_side(w)
    kw = {"rng": args.seed, "restarts": args.restarts}
    if args.max_iter is not None:
        kw["max_iter"] = args.max_iter
    res = ubb_search(w, tol=min(args.tol, 1e-10), **kw)
    cert = {
        "success": res.success,
        "residual": res.residual,
        "fidelity": res.fidelity,
        "iterations": res.iterations,
        "restarts": res.restarts,
    }
    value = {"u": res.u, "v": res.v} if res.success else None
    return (_ok if res.success else _false)(value, cert, args.seed)


# tensor


def _tensor_witness(args):
    x = _matrix(args.x, "--x")
    if x.shape[0] != x.shape[1]:
        raise DimensionError(f"--x: expected a square matrix, got {x.shape[0]}x{x.shape[1]}")
    w = proper_dynamics_witness(x) if args.unital else dynamics_tensor_witness(x)
    img = gen_transpose(x, w)
    nrm = np.linalg.norm(img[:, 0])
    cert = {
        "unital": bool(is_unital_gt(GenTransposition(w), 1e-9)),
        "image": img,
        "image_proportional_to_unitary": bool(nrm > 0 and is_unitary(img / nrm, 1e-8)),
        "image_unitary": bool(is_unitary(img, args.tol)),
    }
    return _ok(w, cert)


def _tensor_perfect(args):
    obj = _load(args.t, "--t", tensor_from_json)
    if isinstance(obj, TensorNode):
        t = obj
        if len(t.leg_dims) != args.legs or set(t.leg_dims) != {args.dim}:
            raise DimensionError(
                f"--t: tensor has leg dims {list(t.leg_dims)}, expected {args.legs} legs of {args.dim}"
            )
    else:
        need = args.dim**args.legs
        if obj.size != need:
            raise DimensionError(f"--t: {obj.size} entries, {args.legs} legs of {args.dim} need {need}")
        t = TensorNode(obj, (args.dim,) * args.legs)
    ok = is_perfect_tensor(t, args.tol)
    return (_ok if ok else _false)(bool(ok), {"legs": args.legs, "dim": args.dim})


def _tensor_rot_perfect(args):
    m = _matrix(args.m, "--m")
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"--m: expected a square matrix, got {m.shape[0]}x{m.shape[1]}")
    ok = is_rotationally_perfect(m, tol=args.tol)
    return (_ok if ok else _false)(bool(ok), {"grid": "chebyshev-64"})


# measure


def _measure_diamond(args):
    j = _load(args.choi, "--choi", choi_from_json)
    kw = {"tol": args.tol}
    if args.max_iter is not None:
        kw["max_iter"] = args.max_iter
    r = solve_diamond(j, **kw)
    cert = {
        "lower": r.lower,
        "upper": r.upper,
        "status": r.status,
        "iterations": r.iterations,
        "input_state": r.input_state,
    }
    return (_ok if r.status in ("optimal", "inaccurate") else _false)(r.value, cert)


def _measure_xi(args):
    res = xi_nonswappability(_channel(args.channel, "--channel"), _optimizer(args))
    return CommandResult("ok", _measure_payload(res), [], args.seed)


def _measure_cg(args):
    res = geometric_capacity(_channel(args.channel, "--channel"), tol=args.tol)
    return CommandResult("ok", _measure_payload(res), [], None)


def _measure_ds(args):
    res = info_destruction(_channel(args.channel, "--channel"), _optimizer(args))
    return CommandResult("ok", _measure_payload(res), [], args.seed)


def _parse_dims(text, flag="--dims"):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise DimensionError(f"{flag}: expected comma-separated integers, got {text!r}") from None


def _measure_leak(args):
    m = _channel(args.channel, "--channel")
    sigma = _matrix(args.sigma, "--sigma")
    res = leakage(m, sigma, _parse_dims(args.dims))
    return CommandResult("ok", _measure_payload(res), [], None)


def _verify(args, fn):
    u = _matrix(args.u, "--u")
    w = _matrix(args.w, "--w")
    sigma = _matrix(args.sigma, "--sigma")
    r = fn(u, w, sigma, _parse_dims(args.dims), _optimizer(args, restarts=4), args.slack)
    cert = {"lhs": r.lhs, "rhs": r.rhs, "slack": r.slack}
    cert.update(r.details)
    return (_ok if r.holds else _false)(r.holds, cert, args.seed)


def selftest(seed=0, criteria=None):
    """Run the acceptance criteria (all, or the listed numbers)."""
    chosen = range(1, 15) if not criteria else criteria
    results = [acceptance.CRITERIA[k - 1](seed=seed) for k in chosen]
    rows = [
        {"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
        for r in results
    ]
    passed = all(r.passed for r in results)
    cert = {"passed": sum(r.passed for r in results), "total": len(results)}
    diag = [r.line() for r in results]
    return (_ok if passed else _false)(rows, cert, seed, diag)


def _selftest(args):
    nums = None
    if args.criteria:
        nums = _parse_dims(args.criteria, "--criteria")
        bad = [k for k in nums if not 1 <= k <= 14]
        if bad:
            raise DimensionError(f"--criteria: no criterion numbered {bad[0]}")
    return selftest(args.seed, nums)


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-iter", type=int, default=argparse.SUPPRESS)

    p = _Parser(prog="chronoglass", description="Generalized transpositions and their measures.")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=None)
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def cmd(group, name, handler, **flags):
        sp = group.add_parser(name, parents=[common])
        for flag, kw in flags.items():
            sp.add_argument("--" + flag.replace("_", "-"), **kw)
        sp.set_defaults(handler=handler)
        return sp

    req = {"required": True}
    g = top.add_parser("gtrans").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    cmd(g, "apply", _gtrans_apply, w=req, m=req)
    cmd(g, "fractional", _gtrans_fractional, theta={"type": float, "required": True}, m=req)
    cmd(g, "compat", _gtrans_compat, channel=req, w=req, partial={"choices": ["A", "B"]})
    cmd(g, "prep-compat", _gtrans_prep_compat, w=req, sigma=req)
    cmd(g, "ubb", _gtrans_ubb, w=req, restarts={"type": int, "default": 32})

    t = top.add_parser("tensor").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    cmd(t, "witness", _tensor_witness, x=req, unital={"action": "store_true"})
    cmd(
        t,
        "perfect",
        _tensor_perfect,
        t=req,
        legs={"type": int, "default": 4},
        dim={"type": int, "required": True},
    )
    cmd(t, "rot-perfect", _tensor_rot_perfect, m=req)

    m = top.add_parser("measure").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    cmd(m, "diamond", _measure_diamond, choi=req)
    cmd(m, "xi", _measure_xi, channel=req)
    cmd(m, "cg", _measure_cg, channel=req)
    cmd(m, "ds", _measure_ds, channel=req)
    cmd(m, "leak", _measure_leak, channel=req, sigma=req, dims={})

    v = top.add_parser("verify").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn in (("cauloc", verify_cauloc), ("cauloc2", verify_cauloc2)):
        cmd(
            v,
            name,
            lambda a, fn=fn: _verify(a, fn),
            u=req,
            w=req,
            sigma=req,
            dims={},
            slack={"type": float, "default": 1e-4},
        )

    st = top.add_parser("selftest", parents=[common])
    st.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    st.set_defaults(handler=_selftest)
    return p


def run(argv):
    """Parse ``argv`` and execute; never raises for bad input."""
    try:
        args = _build_parser().parse_args(list(argv))
    except _InputError as exc:
        return CommandResult("input_error", _doc(None), [str(exc).strip()])
    seed = args.seed
    try:
        return args.handler(args)
    except HypothesisError as exc:
        return CommandResult(
            "input_error", _doc(None, {"reason": exc.reason}), [f"{exc.reason}: {exc}"], seed
        )
    except (ValueError, OSError) as exc:
        return CommandResult("input_error", _doc(None), [str(exc)], seed)


def main(argv=None):
    res = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(res.to_json() + "\n")
    for line in res.diagnostics:
        if res.status == "input_error":
            sys.stderr.write(line + "\n")
    return res.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
