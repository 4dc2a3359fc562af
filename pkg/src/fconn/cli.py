"""Command-line entry point: ``fconn <verb> [options]``.

Exit status 0 on success, 2 on malformed input (with a JSON error object on
stdout), 1 when a computation raises a toolkit error.
"""

import argparse
import json
import os
import sys

from .errors import FconnError, SchemaError

DEFAULT_ORDER = 12


def _default_order():
    raw = os.environ.get("FCONN_ORDER")
    if raw is None:
        return DEFAULT_ORDER
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"FCONN_ORDER must be an integer, got {raw!r}") from None


class ParseError(ValueError):
    pass


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def _schema(fn, data, what):
    try:
        return fn(data)
    except (KeyError, TypeError, IndexError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"invalid {what}: {exc}") from None


# ---------------------------------------------------------------- verbs


def _connection_from(data):
    from .formalconn import RationalConnection
    body = data.get("connection", data) if isinstance(data, dict) else data
    return _schema(RationalConnection.from_json, body, "connection")


def pipeline_summary(rep):
    et = rep.get("exp_type")
    if et is None:
        return "no exponential-type decomposition"
    trivial = all(e.startswith("0 ") for b in et["blocks"] for e in b["monodromy_exponents"])
    if et["classification"] == "nonsingular" and trivial:
        return "nonsingular; trivial monodromy"
    parts = [f"lambda={b['lambda']} exponents {{{', '.join(b['monodromy_exponents'])}}}" for b in et["blocks"]]
    return f"{et['classification']}; " + "; ".join(parts)


def cmd_analyze(args):
    from .formalconn import GradingVector
    from .quantumex import PipelineOptions, analyze_pipeline
    data = _load(args.input)
    conn = _connection_from(data)
    meta = data if isinstance(data, dict) else {}
    grading = args.grading or meta.get("grading")
    opts = PipelineOptions(
        grading=GradingVector(tuple(int(g) for g in grading)) if grading else None,
        split_chart=args.chart or meta.get("split_chart"),
        order=args.order,
        dim=args.dim if args.dim is not None else meta.get("dim"))
    out = analyze_pipeline(conn, opts).to_json()
    out["summary"] = pipeline_summary(out)
    return out


def cmd_newton(args):
    from .formalconn import change_chart
    from .newton import ScalarOperator, cyclic_operator, newton_polygon
    data = _load(args.input)
    if isinstance(data, dict) and "coeffs" in data:
        op = _schema(ScalarOperator.from_json, data, "operator")
        return {"operator": op.to_json(), "newton": newton_polygon(op).to_json()}
    conn = _connection_from(data)
    if args.chart and args.chart != conn.var:
        conn = change_chart(conn, args.chart)
    v, op = cyclic_operator(conn)
    return {"chart": conn.var, "cyclic_vector": [str(x) for x in v], "operator": op.to_json(),
            "operator_text": str(op), "newton": newton_polygon(op).to_json()}


def cmd_fl_local(args):
    from .formalconn import split_exponential_type
    from .weylfl import LocalModel, flanders_compare, local_model_connections
    model = _schema(LocalModel.from_json, _load(args.input), "local model")
    cmp = flanders_compare(model.U, model.V)
    out = {"model": model.to_json(),
           "flanders": {"nonzero_match": cmp["nonzero_match"], "zero_defect": cmp["zero_defect"],
                        "VU": cmp["VU"].to_json(), "UV": cmp["UV"].to_json()},
           "connections": {}}
    for side, conn in local_model_connections(model).items():
        entry = {"connection": conn.to_json()}
        try:
            rep, _ = split_exponential_type(conn, args.order)
            entry["exp_type"] = rep.to_json()
        except FconnError as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
        out["connections"][side] = entry
    return out


def cmd_gm(args):
    from .gaussmanin import LaurentPoly, singularity_report
    data = _load(args.input)
    body = data.get("superpotential", data) if isinstance(data, dict) else data
    if isinstance(body, dict) and "terms" in body:
        w = _schema(lambda b: LaurentPoly.from_dict({int(k): v for k, v in b["terms"].items()},
                                                    b.get("var", "z")), body, "superpotential")
    else:
        w = _schema(LaurentPoly.from_json, body, "superpotential")
    return singularity_report(w, order=args.order).to_json()


def cmd_toy(args):
    from .quantumex import PipelineOptions, analyze_pipeline
    from .toymodel import TOY_INPUTS, ToyInput, toy_dmodule_check, toy_q_inverted_connection
    if args.id:
        if args.id not in TOY_INPUTS:
            raise SchemaError(f"unknown toy input {args.id!r}; choose from {', '.join(TOY_INPUTS)}")
        inp = TOY_INPUTS[args.id]()
    elif args.input:
        inp = _schema(ToyInput.from_json, _load(args.input), "toy input")
    else:
        raise SchemaError("toy needs --id or --input")
    conn = toy_q_inverted_connection(inp, args.parity)
    out = {"input": inp.to_json(), "dmodule": toy_dmodule_check(inp, args.parity).to_json(),
           "q_inverted_connection": conn.to_json()}
    if args.analyze:
        out["analysis"] = analyze_pipeline(conn, PipelineOptions(order=args.order,
                                                                 dim=inp.complex_dimension)).to_json()
    return out


def cmd_cyclic_check(args):
    from .cychom import TEST_DGAS, Bounds, FiniteDGA, check_ncft_diagrams
    if args.input:
        dga = _schema(FiniteDGA.from_json, _load(args.input), "dga")
    else:
        if args.dga not in TEST_DGAS:
            raise SchemaError(f"unknown dga {args.dga!r}; choose from {', '.join(TEST_DGAS)}")
        dga = TEST_DGAS[args.dga]()
    bounds = Bounds(args.L, args.Kq, args.Ku, args.Kt)
    return check_ncft_diagrams(dga, bounds).to_json()


def cmd_example(args):
    from .quantumex import PipelineOptions, analyze_pipeline, build_example
    try:
        ex = build_example(args.id)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    out = {"id": ex.id, "connection": ex.connection.to_json(),
           "grading": list(ex.grading.degrees) if ex.grading else None,
           "split_chart": ex.split_chart, "dim": ex.dim}
    if args.analyze:
        rep = analyze_pipeline(ex.connection, PipelineOptions.for_example(ex, order=args.order)).to_json()
        rep["summary"] = pipeline_summary(rep)
        out["analysis"] = rep
    return out


# ---------------------------------------------------------------- output


def _text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            lines.append(pad + ", ".join(str(x) for x in obj))
        else:
            for x in obj:
                sub = _text(x, indent + 1)
                lines.append(f"{pad}- " + sub[0].lstrip() if sub else f"{pad}-")
                lines.extend(sub[1:])
    else:
        lines.append(f"{pad}{obj}")
    return lines


def build_parser():
    order = _default_order()
    p = argparse.ArgumentParser(prog="fconn", description="Exact analysis of formal meromorphic connections.")
    p.add_argument("--format", choices=("json", "text"), default="json")
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--order", type=int, default=order, help=f"truncation order (default {order})")
        sp.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
        sp.set_defaults(func=fn)
        return sp

    sp = add("analyze", cmd_analyze, "exponential type, monodromy, Newton polygons and duality of a connection")
    sp.add_argument("--input", required=True)
    sp.add_argument("--grading", type=lambda s: [int(x) for x in s.split(",")], default=None)
    sp.add_argument("--chart", default=None, help="chart to split in (q or Q)")
    sp.add_argument("--dim", type=int, default=None)

    sp = add("newton", cmd_newton, "cyclic operator and Newton polygon")
    sp.add_argument("--input", required=True)
    sp.add_argument("--chart", default=None)

    sp = add("fl-local", cmd_fl_local, "Fourier-Laplace local model (U, V, sigma)")
    sp.add_argument("--input", required=True)

    sp = add("gm", cmd_gm, "Gauss-Manin connection of a Laurent polynomial")
    sp.add_argument("--input", required=True)

    sp = add("toy", cmd_toy, "cohomology-level toy model")
    sp.add_argument("--id", default=None)
    sp.add_argument("--input", default=None)
    sp.add_argument("--parity", type=int, default=0, choices=(0, 1))
    sp.add_argument("--analyze", action="store_true")

    sp = add("cyclic-check", cmd_cyclic_check, "chain-level cyclic homology identities")
    sp.add_argument("--dga", default="ground_field")
    sp.add_argument("--input", default=None)
    sp.add_argument("--L", type=int, default=4)
    sp.add_argument("--Kq", type=int, default=3)
    sp.add_argument("--Ku", type=int, default=3)
    sp.add_argument("--Kt", type=int, default=3)

    sp = add("example", cmd_example, "builtin quantum connections")
    sp.add_argument("--id", required=True)
    sp.add_argument("--analyze", action="store_true")
    return p


def _emit(obj, fmt, stream):
    if fmt == "text":
        stream.write("\n".join(_text(obj)) + "\n")
    else:
        stream.write(json.dumps(obj, indent=2) + "\n")


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SchemaError as exc:
        _emit({"error": "SchemaError", "message": str(exc)}, "json", sys.stdout)
        return 2
    try:
        out = args.func(args)
    except ParseError as exc:
        _emit({"error": "ParseError", "message": str(exc)}, "json", sys.stdout)
        return 2
    except SchemaError as exc:
        _emit({"error": "SchemaError", "message": str(exc)}, "json", sys.stdout)
        return 2
    except FconnError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, "json", sys.stdout)
        return 1
    _emit(out, args.format, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
