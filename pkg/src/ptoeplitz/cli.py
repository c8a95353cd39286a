"""Command-line entry point: ``ptoeplitz <subcommand> [options]``.

Exit codes: 0 success, 2 invalid input, 3 numerical certification failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import omega_pair, szego_sweep, trace_section
from .cumulants import cumulant_recursion, hankel_trace
from .determinants import angular_mgf, log_det, quadrature_oracle
from .errors import CertificationError, PToeplitzError, ValidationError
from .ensemble import empirical_statistic, mean_density, sample_dpp
from .radial_measures import measure_from_name, rho_matrix
from .sections import m_section
from .symbols import exp_symbol, from_csv, from_trig, invert_symbol, scale

EXIT_OK, EXIT_INVALID, EXIT_CERT, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def fmt(x) -> str:
    return format(float(x), ".17g")


# -- literal parsing ------------------------------------------------------


def parse_grid(text: str, integer: bool = False) -> list:
    """Comma list of numbers or ``start:stop:step`` ranges (stop included)."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ValidationError(f"bad range {part!r}; use start:stop:step")
            start, stop, step = (float(b) for b in bits)
            if step == 0 or (stop - start) * step < 0:
                raise ValidationError(f"range {part!r} does not progress")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(start + i * step for i in range(count))
        else:
            out.append(float(part))
    if not out:
        raise ValidationError("empty grid")
    if integer:
        if any(v != int(v) for v in out):
            raise ValidationError("integer grid expected")
        return [int(v) for v in out]
    return out


def parse_symbol(text: str):
    """``trig:k,re,im;...``, ``file:path.csv`` or ``exp:<literal>``."""
    text = text.strip()
    if text.startswith("exp:"):
        return exp_symbol(parse_symbol(text[4:]))
    if text.startswith("file:"):
        return from_csv(text[5:])
    if text.startswith("trig:"):
        terms = []
        for chunk in text[5:].split(";"):
            if not chunk.strip():
                continue
            bits = chunk.split(",")
            if len(bits) != 3:
                raise ValidationError(f"bad trig term {chunk!r}; use k,re,im")
            try:
                terms.append((int(bits[0]), complex(float(bits[1]), float(bits[2]))))
            except ValueError as exc:
                raise ValidationError(f"bad trig term {chunk!r}") from exc
        return from_trig(terms)
    raise ValidationError(f"unknown symbol literal {text!r}")


# -- output ---------------------------------------------------------------


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, (int, np.integer)) else fmt(v)) for v in row) + "\n")
    return buf.getvalue()


def _json_text(obj) -> str:
    def enc(o):
        if isinstance(o, dict):
            return {k: enc(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [enc(v) for v in o]
        if isinstance(o, (bool, str)) or o is None:
            return o
        if isinstance(o, (int, np.integer)):
            return int(o)
        if isinstance(o, complex):
            return {"re": float(fmt(o.real)), "im": float(fmt(o.imag))}
        return float(fmt(o))

    return json.dumps(enc(obj), indent=2, sort_keys=True) + "\n"


def _table(args, header, rows):
    if args.format == "json":
        return _json_text({"columns": header, "rows": [list(r) for r in rows]})
    return _csv_text(header, rows)


def _emit(args, text: str, params: dict, started: float):
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.write_text(text)
    manifest = {
        "subcommand": args.command,
        "parameters": params,
        "seed": params.get("seed"),
        "version": __version__,
        "wall_clock_seconds": round(time.time() - started, 3),
        "outputs": {out.name: hashlib.sha256(text.encode()).hexdigest()},
    }
    Path(str(out) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _pool(args):
    return ThreadPoolExecutor(args.threads) if args.threads and args.threads > 1 else nullcontext(None)


def _map(pool, fn, items):
    return list(pool.map(fn, items)) if pool is not None else [fn(x) for x in items]


# -- subcommands ----------------------------------------------------------


def cmd_moments(args):
    mu = measure_from_name(args.measure)
    xi = parse_grid(args.xi)
    c2 = mu.regularity is not None and mu.regularity.kind == "C2"
    rows = []
    for x in xi:
        row = [x, mu.log_moment(x), mu.log_moment_dd(x) if x > 0 else float("nan")]
        if c2:
            row += [mu.h(x) if x > 0 else float("nan"), mu.iota(x) if x >= 1 else float("nan")]
        rows.append(row)
    header = ["xi", "log_moment", "log_moment_dd"] + (["h", "iota"] if c2 else [])
    return _table(args, header, rows)


def cmd_rho(args):
    mu = measure_from_name(args.measure)
    n = max(parse_grid(args.n, integer=True))
    r = rho_matrix(mu, n)
    rows = [[j, k, r[j, k]] for j in range(n) for k in range(n)]
    return _table(args, ["j", "k", "rho"], rows)


def cmd_genfun(args):
    mu = measure_from_name(args.measure)
    f = parse_symbol(args.f)
    lams = parse_grid(args.lam)
    ns = parse_grid(args.n, integer=True)
    cells = sorted((n, lam) for n in ns for lam in lams)
    with _pool(args) as pool:
        vals = _map(pool, lambda c: angular_mgf(mu, f, c[1], c[0]), cells)
    rows = [[n, lam, v.log_abs, v.phase] for (n, lam), v in zip(cells, vals)]
    return _table(args, ["n", "lambda", "log_abs", "phase"], rows)


def cmd_cumulants(args):
    mu = measure_from_name(args.measure)
    f = parse_symbol(args.f)
    rep = cumulant_recursion(mu, f, args.mmax, args.N)
    return _json_text(
        {
            "measure": rep.measure,
            "N_trunc": rep.N_trunc,
            "orders": list(range(2, args.mmax + 1)),
            "traces": rep.traces,
            "cumulants": rep.c,
            "extrapolated": rep.extrapolated,
            "tail_certificates": rep.tail_certificates,
            "certified": rep.certified,
            "hankel_trace": hankel_trace(f),
        }
    )


def cmd_szego(args):
    mu = measure_from_name(args.measure)
    a = parse_symbol(args.a)
    ns = parse_grid(args.n, integer=True)
    with _pool(args) as pool:
        rep = szego_sweep(mu, a, ns, args.mode, executor=pool)
    rows = [
        {"n": n, "log_ratio_re": v.real, "log_ratio_im": v.imag, "iota": io}
        for n, v, io in zip(rep.n_grid, rep.log_ratios, rep.diagnostics["iota"])
    ]
    return _json_text(
        {"measure": mu.name, "symbol": args.a, "mode": args.mode, "rows": rows, "extrapolated_limit": rep.extrapolated_limit}
    )


def cmd_trace(args):
    mu = measure_from_name(args.measure)
    a = parse_symbol(args.a)
    b = parse_symbol(args.b) if args.b else invert_symbol(a)
    ns = parse_grid(args.n, integer=True)
    om = omega_pair(a, b)
    rows = []
    for n in ns:
        t = trace_section(mu, b, a, n)
        rows.append([n, t.real, t.imag, om.real, om.imag])
    return _table(args, ["n", "trace_re", "trace_im", "omega_re", "omega_im"], rows)


def cmd_clt(args):
    mu = measure_from_name(args.measure)
    f = parse_symbol(args.f)
    if not f.real:
        raise ValidationError("f must be real-valued")
    lams = parse_grid(args.lam)
    ns = parse_grid(args.n, integer=True)
    cells = sorted((n, lam) for n in ns for lam in lams)

    def one(cell):
        n, lam = cell
        s = math.sqrt(mu.iota(2 * n))
        return angular_mgf(mu, scale(f, 1 / s), lam, n, center=True)

    with _pool(args) as pool:
        vals = _map(pool, one, cells)
    rows = [[n, lam, v.log_abs, v.phase] for (n, lam), v in zip(cells, vals)]
    return _table(args, ["n", "lambda", "log_re", "log_im"], rows)


def cmd_meanmeasure(args):
    mu = measure_from_name(args.measure)
    n = parse_grid(args.n, integer=True)[0]
    r = np.asarray(parse_grid(args.r))
    d = mean_density(mu, n, r)
    return _table(args, ["r", "density"], zip(r.tolist(), np.atleast_1d(d).tolist()))


def cmd_sample(args):
    mu = measure_from_name(args.measure)
    n = parse_grid(args.n, integer=True)[0]
    with _pool(args) as pool:
        samples = _map(pool, lambda rep: sample_dpp(mu, n, args.seed, rep), range(args.replicas))
    rows = [[s.replica, i, r, t] for s in samples for i, (r, t) in enumerate(zip(s.radii, s.angles))]
    if args.f:
        f = parse_symbol(args.f)
        stat = [[s.replica, empirical_statistic(s, f)] for s in samples]
        sys.stderr.write(_csv_text(["replica", "X"], stat))
    return _table(args, ["replica", "index", "r", "theta"], rows)


def _appendix_cases():
    one = from_trig([(0, 1.0)])
    phi = from_trig([(0, 1.0), (1, 1.0), (-1, 1.0)])
    osc = exp_symbol(from_trig([(1, 0.3j), (-1, 0.3j)]))
    for mname in ("bergman", "ginibre"):
        mu = measure_from_name(mname)
        for label, sym in (("1", one), ("1+2cos", phi), ("exp(0.6i cos)", osc)):
            for n in (1, 2, 3):
                yield f"appendix {mname} phi={label} n={n}", mu, sym, n


def cmd_verify(args):
    lines, ok_all = [], True
    if args.suite in ("appendix", "all"):
        for name, mu, sym, n in _appendix_cases():
            ref = quadrature_oracle(mu, sym, n)
            det = log_det(m_section(mu, sym, n)).value
            err = abs(ref - det)
            ok = err <= 1e-8 * (1 + abs(det))
            ok_all &= ok
            lines.append(f"{'PASS' if ok else 'FAIL'} {name} err={err:.3e}")
    if args.suite in ("szego", "all"):
        cue = measure_from_name("cue")
        e = exp_symbol(from_trig([(1, 1.0), (-1, 1.0)]))
        val = log_det(m_section(cue, e, 64)).value
        ok = abs(val - math.e) < 1e-6
        ok_all &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} cue strong szego n=64 err={abs(val - math.e):.3e}")
    text = "\n".join(lines) + "\n"
    if not ok_all:
        sys.stdout.write(text)
        raise CertificationError("verification suite had failures")
    return text


COMMANDS = {
    "moments": cmd_moments,
    "rho": cmd_rho,
    "genfun": cmd_genfun,
    "cumulants": cmd_cumulants,
    "szego": cmd_szego,
    "trace": cmd_trace,
    "clt": cmd_clt,
    "meanmeasure": cmd_meanmeasure,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ptoeplitz", description="Moment-perturbed Toeplitz determinants and radial ensembles.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, table=True):
        sp.add_argument("--config", help="JSON file with default values for these options")
        sp.add_argument("--out", help="output file (stdout if omitted); a manifest is written next to it")
        sp.add_argument("--threads", type=int, default=1)
        if table:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("moments", help="log-moments and derivatives on a xi grid")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--xi", default="0:10:1")
    common(sp)

    sp = sub.add_parser("rho", help="matrix of moment ratios rho(j, k)")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--n", default="8")
    common(sp)

    sp = sub.add_parser("genfun", help="log E exp(i lambda X_f) on an (n, lambda) grid")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--n", required=True)
    common(sp)

    sp = sub.add_parser("cumulants", help="cumulants of the limit variable from the recursion")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--mmax", type=int, default=4)
    sp.add_argument("--N", type=int, default=256)
    common(sp, table=False)

    sp = sub.add_parser("szego", help="Szego-type ratio sweep")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--a", required=True)
    sp.add_argument("--n", default="16,32,64,128")
    sp.add_argument("--mode", choices=("C1", "C2"), default="C1")
    common(sp, table=False)

    sp = sub.add_parser("trace", help="finite traces t_n(b, a); b defaults to 1/a")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b")
    sp.add_argument("--n", required=True)
    common(sp)

    sp = sub.add_parser("clt", help="log characteristic function of the scaled statistic")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--lambda", dest="lam", default="1")
    sp.add_argument("--n", required=True)
    common(sp)

    sp = sub.add_parser("meanmeasure", help="radial density of the mean measure")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--r", default="0:2:0.1")
    common(sp)

    sp = sub.add_parser("sample", help="exact samples of the point process")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--replicas", type=int, default=1)
    sp.add_argument("--f", help="also print X_f per replica to stderr")
    common(sp)

    sp = sub.add_parser("verify", help="built-in consistency checks")
    sp.add_argument("--suite", choices=("appendix", "szego", "all"), default="all")
    common(sp, table=False)
    return p


def _config_argv(argv):
    """Append ``--key=value`` for config-file keys not given on the command line.

    Unknown keys then surface as ordinary usage errors.
    """
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    try:
        conf = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(conf, dict):
        raise ValidationError("config must be a JSON object")
    given = {a.split("=")[0] for a in argv if a.startswith("--")}
    extra = []
    for key, value in conf.items():
        flag = "--" + key
        if flag in given:
            continue
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        extra.append(f"{flag}={value}")
    return list(argv) + extra


def _glue_negative_values(argv):
    """Turn ``--opt -1:1:0.5`` into ``--opt=-1:1:0.5`` so ranges may start negative."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok.startswith("--") and "=" not in tok and nxt and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    started = time.time()
    try:
        argv = _config_argv(argv)
        args = parser.parse_args(argv)
        text = COMMANDS[args.command](args)
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "threads")}
        _emit(args, text, params, started)
        return EXIT_OK
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_USAGE
    except ValidationError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID
    except (CertificationError, PToeplitzError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_CERT


def console():
    sys.exit(main())


if __name__ == "__main__":
    console()
