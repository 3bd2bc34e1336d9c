"""Command-line entry point: ``rid bench | decompose | verify | generate``.

Exit status is 0 on success, 1 on a contract or configuration error and 2 on
an I/O error.
"""

import argparse
import logging
import sys

from .bench import BenchConfig, emit_report, generate_low_rank, run_benchmark
from .errors import RidError
from .interpolative import (
    DEFAULT_DELTA,
    DEFAULT_EPSILON,
    IdResult,
    IdDiagnostics,
    error_bound,
    randomized_id,
    reconstruction_error,
    save_result,
    sigma_estimate_noise_floor,
)
from .matrix import read_matrix, write_matrix
from .rng import RngState

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONTRACT, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    parser = _Parser(prog="rid", description="Randomized interpolative decomposition toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="time the decomposition phases over a worker-count sweep")
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--l", type=int, default=None)
    b.add_argument("--seeds", type=_int_list, default=[1])
    b.add_argument("--workers", type=_int_list, default=[1])
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--spectral-error", action="store_true")
    b.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    b.add_argument("--out", required=True)
    b.add_argument("--format", choices=("csv", "json"), default="csv")

    d = sub.add_parser("decompose", help="factor a matrix file into B and P")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--l", type=int, default=None)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--stream", type=int, default=0)
    d.add_argument("--workers", type=int, default=None)
    d.add_argument("--out-prefix", required=True)

    v = sub.add_parser("verify", help="report ||A - BP|| and the probabilistic bound")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--b", required=True)
    v.add_argument("--p", required=True)
    v.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    v.add_argument("--sigma", type=float, default=None, help="sigma_{k+1} of A; default is the rounding-noise floor")
    v.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--workers", type=int, default=None)

    g = sub.add_parser("generate", help="write a synthetic Gaussian rank-k matrix")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    return parser


def _bench(args):
    cfg = BenchConfig(
        m=args.m, n=args.n, k=args.k, l=args.l, seeds=args.seeds, worker_counts=args.workers,
        repeats=args.repeats, epsilon=args.epsilon, compute_spectral_error=args.spectral_error,
        output=args.out, format=args.format,
    )
    records = run_benchmark(cfg)
    emit_report(records, cfg.format, cfg.output)
    print(f"wrote {len(records)} records to {cfg.output}")


def _decompose(args):
    a = read_matrix(args.input)
    res = randomized_id(a, args.k, args.l, RngState(args.seed, args.stream), workers=args.workers)
    save_result(args.out_prefix, res, seed=args.seed, stream=args.stream)
    secs = res.diagnostics.phase_seconds
    print(f"m={a.shape[0]} n={a.shape[1]} k={res.k} retries={res.diagnostics.sketch_rank_retries}")
    print("phases " + " ".join(f"{name}={secs[name]:.6g}" for name in secs))
    print(f"wrote {args.out_prefix}_b.ridm {args.out_prefix}_p.ridm {args.out_prefix}.json")


def _verify(args):
    a = read_matrix(args.input)
    b = read_matrix(args.b)
    p = read_matrix(args.p)
    m, n = a.shape
    k = b.shape[1]
    res = IdResult(b=b, p=p, pivots=None, diagnostics=IdDiagnostics())
    spec, fro = reconstruction_error(a, res, rng=RngState(args.seed), workers=args.workers)
    sigma = args.sigma if args.sigma is not None else sigma_estimate_noise_floor(m, n, args.delta)
    bound = error_bound(m, n, k, args.epsilon, sigma)
    print(f"m={m} n={n} k={k}")
    print(f"err_spectral={spec:.2e}")
    print(f"err_frobenius={fro:.2e}")
    print(f"sigma_kplus1={sigma:.2e} epsilon={args.epsilon:.2e}")
    print(f"bound_value={bound:.2e}")
    print(f"bound_satisfied={'true' if spec <= bound else 'false'}")


def _generate(args):
    a = generate_low_rank(args.m, args.n, args.k, RngState(args.seed))
    write_matrix(args.out, a)
    print(f"wrote {args.m}x{args.n} rank-{args.k} matrix to {args.out}")


_COMMANDS = {"bench": _bench, "decompose": _decompose, "verify": _verify, "generate": _generate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _COMMANDS[args.command](args)
    except RidError as exc:
        print(f"rid: error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"rid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
