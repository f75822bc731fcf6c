import argparse
import contextlib
import io
import logging
import os
import sys

from listpac import __version__
from listpac.config import CONFIG_FILE, DEFAULT_SETTINGS, LOG_FORMAT, load_settings
from listpac.dims import dimension, sauer_check
from listpac.errors import DomainError, ListPacError
from listpac.hclass import (generate_example1, generate_grid, random_class, read_class, read_sample,
                            serialize_class)
from listpac.learn import compress, format_compression, one_inclusion_predict, read_compression, reconstruct
from listpac.oig import build_oig, degree_histogram, degree_stats
from listpac.orient import (ds_regime_bound, exact_min_max_outdegree, exp_regime_bound, greedy_orientation,
                            orientation_rows, validate)
from listpac.rng import PRNG_NAME, make_rng
from listpac.shift import shift_fixed_point, shift_trace_rows
from listpac.xp import (ExperimentConfig, FiniteDistribution, hard_instance_error, learning_curve,
                        write_curve_csv)

logger = logging.getLogger("listpac.cli")

DIMENSION_KINDS = {
    'ds': 'DS',
    'kds': 'kDS',
    'natarajan': 'Natarajan',
    'knat': 'kNatarajan',
    'exp': 'Exponential',
    'kexp': 'kExponential',
}


# --- Argument types ---

def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def probability(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return value


def int_list(text):
    try:
        values = [positive_int(tok) for tok in text.split(',') if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated positive integers, got {text}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one sample size")
    return values


# --- Subcommands ---
# Each handler returns the text written to the output stream.

def cmd_dims(args, settings):
    H = read_class(args.hclass)
    report = dimension(H, DIMENSION_KINDS[args.kind], args.k, args.cap or settings.dimension_cap)
    return report.csv_row() + '\n'


def cmd_oig(args, settings):
    G = build_oig(read_class(args.hclass))
    stats = degree_stats(G, args.k)
    lines = ['vertices,edges,k,avd,savd',
             f"{G.num_vertices},{G.num_edges},{args.k},{stats.avd},{stats.savd}",
             'degree,count']
    lines.extend(f"{degree},{count}" for degree, count in degree_histogram(stats))
    return '\n'.join(lines) + '\n'


def cmd_shift(args, settings):
    trace = shift_fixed_point(read_class(args.hclass))
    rows = ['step,direction,changed,potential']
    rows.extend(','.join(map(str, row)) for row in shift_trace_rows(trace))
    text = serialize_class(trace.final)
    if args.trace:
        with open(args.trace, 'w') as f:
            f.write('\n'.join(rows) + '\n')
        return text
    # comment lines keep the output a valid HCF file
    return text + ''.join(f"# {row}\n" for row in rows)


def cmd_orient(args, settings):
    G = build_oig(read_class(args.hclass))
    bound_fn = {
        'none': None,
        'ds': lambda graph, k: ds_regime_bound(graph, k, settings.dimension_cap),
        'exp': lambda graph, k: exp_regime_bound(graph, k, settings.dimension_cap),
    }[args.bound]
    if args.mode == 'exact':
        sigma = exact_min_max_outdegree(G, args.k, settings.orient_search_cap)
        bound = bound_fn(G, args.k) if bound_fn else None
    else:
        sigma = greedy_orientation(G, args.k, bound_fn)
        bound = sigma.bound
    report = validate(sigma)
    lines = ['direction,key,vertices']
    lines.extend(f"{direction},{key},{vertices}" for direction, key, vertices in orientation_rows(sigma))
    lines.append(f"max_outdegree,{report.max_outdegree},bound,{'none' if bound is None else bound}")
    return '\n'.join(lines) + '\n'


def cmd_predict(args, settings):
    labels = one_inclusion_predict(read_class(args.hclass), read_sample(args.sample), args.point, args.k)
    return ' '.join(map(str, labels)) + '\n'


def cmd_compress(args, settings):
    H = read_class(args.hclass)
    result = compress(H, read_sample(args.sample), args.k, args.t, seed=args.seed, settings=settings,
                      n=args.n, l=args.l)
    if not result.certified:
        raise ListPacError("compression did not certify a cover of the sample")
    return format_compression(result)


def cmd_reconstruct(args, settings):
    H = read_class(args.hclass)
    params, selected = read_compression(args.compressed)
    mu = reconstruct(H, selected, params)
    lines = ['point,labels']
    lines.extend(f"{x},{' '.join(map(str, labels))}" for x, labels in mu.table)
    return '\n'.join(lines) + '\n'


def cmd_simulate(args, settings):
    H = read_class(args.hclass)
    if args.target_row is None:
        target = H.rows[int(make_rng(args.seed).integers(len(H)))]
    elif args.target_row < len(H):
        target = H.rows[args.target_row]
    else:
        raise DomainError(f"--target-row {args.target_row} outside [0..{len(H) - 1}]")
    config = ExperimentConfig(args.seed, args.trials, args.m_grid, args.k, args.t, args.delta, args.epsilon)
    settings = settings.with_overrides(stage2_n=args.n, stage2_l=args.l)
    rows = learning_curve(H, FiniteDistribution.labelled_by(target), args.k, args.t, config, settings)
    buffer = io.StringIO()
    write_curve_csv(rows, buffer, settings)
    return buffer.getvalue()


def cmd_lowerbound(args, settings):
    report = hard_instance_error(read_class(args.hclass), args.k, args.m, args.trials, args.seed, settings)
    exact = 'none' if report.exact is None else report.exact
    holds = 'none' if report.holds is None else str(report.holds).lower()
    return ('coords,mu,bound,rational_bound,exact,estimate,holds\n'
            f"{' '.join(map(str, report.coords))},{report.mu},{report.bound!r},{report.rational_bound},"
            f"{exact},{report.estimate},{holds}\n")


def cmd_sauer(args, settings):
    report = sauer_check(read_class(args.hclass), args.k, args.cap or settings.dimension_cap)
    if not report.holds:
        raise ListPacError(f"FAIL bound={report.bound} size={report.size}")
    return f"OK bound={report.bound} size={report.size}\n"


def cmd_generate(args, settings):
    if args.kind == 'grid':
        H = generate_grid(args.d, args.labels, settings.grid_row_cap)
    elif args.kind == 'example1':
        H = generate_example1(args.m, args.blocks)
    else:
        H = random_class(args.m, args.labels, args.size, args.seed)
    return serialize_class(H)


# --- Parser ---

def build_parser():
    parser = argparse.ArgumentParser(prog='listpac', description="List PAC learning toolkit for finite hypothesis classes")
    parser.add_argument('--version', action='version',
                        version=f"listpac {__version__} schema={DEFAULT_SETTINGS.csv_schema} prng={PRNG_NAME}")
    parser.add_argument('--config', help=f"settings file (default: {CONFIG_FILE} if present)")
    parser.add_argument('-v', '--verbose', action='store_true', help="log at DEBUG level")
    parser.add_argument('--threads', type=positive_int, help="worker threads for independent trials")
    parser.add_argument('--out', help="write data to this file instead of standard output")
    sub = parser.add_subparsers(dest='command', required=True)

    def command(name, handler, help_text, with_class=True):
        p = sub.add_parser(name, help=help_text)
        if with_class:
            p.add_argument('--class', dest='hclass', required=True, help="HCF class file")
        p.set_defaults(handler=handler)
        return p

    p = command('dims', cmd_dims, "dimension of a class")
    p.add_argument('--kind', choices=sorted(DIMENSION_KINDS), required=True)
    p.add_argument('--k', type=positive_int, default=1)
    p.add_argument('--cap', type=positive_int, help="shattering-check budget")

    p = command('oig', cmd_oig, "one-inclusion graph statistics")
    p.add_argument('--k', type=positive_int, required=True)

    p = command('shift', cmd_shift, "shift to the downward-closed fixed point")
    p.add_argument('--trace', help="write the shifting trace CSV here")

    p = command('orient', cmd_orient, "k-list orientation of the one-inclusion graph")
    p.add_argument('--k', type=positive_int, required=True)
    p.add_argument('--mode', choices=('greedy', 'exact'), default='greedy')
    p.add_argument('--bound', choices=('none', 'ds', 'exp'), default='none')

    p = command('predict', cmd_predict, "one-inclusion list prediction")
    p.add_argument('--sample', required=True)
    p.add_argument('--point', type=positive_int, required=True)
    p.add_argument('--k', type=positive_int, required=True)

    p = command('compress', cmd_compress, "two-stage list sample compression")
    p.add_argument('--sample', required=True)
    p.add_argument('--k', type=positive_int, required=True)
    p.add_argument('--t', type=nonneg_int, default=1)
    p.add_argument('--seed', type=nonneg_int, default=None)
    p.add_argument('--n', type=positive_int, help="stage-2 sequence length override")
    p.add_argument('--l', type=positive_int, help="stage-2 sequence count override")

    p = command('reconstruct', cmd_reconstruct, "rebuild lists from a compression file")
    p.add_argument('--compressed', required=True)

    p = command('simulate', cmd_simulate, "learning curve on a realizable distribution")
    p.add_argument('--k', type=positive_int, required=True)
    p.add_argument('--t', type=nonneg_int, default=1)
    p.add_argument('--m-grid', type=int_list, required=True)
    p.add_argument('--trials', type=positive_int, default=200)
    p.add_argument('--seed', type=nonneg_int, default=None)
    p.add_argument('--delta', type=probability, default=0.1)
    p.add_argument('--epsilon', type=probability, default=0.1)
    p.add_argument('--target-row', type=nonneg_int, help="index of the labelling row (default: seeded draw)")
    p.add_argument('--n', type=positive_int)
    p.add_argument('--l', type=positive_int)

    p = command('lowerbound', cmd_lowerbound, "hard-instance transductive error")
    p.add_argument('--k', type=positive_int, required=True)
    p.add_argument('--m', type=positive_int, required=True)
    p.add_argument('--trials', type=nonneg_int, default=10000)
    p.add_argument('--seed', type=nonneg_int, default=None)

    p = command('sauer', cmd_sauer, "check the list Sauer bound")
    p.add_argument('--k', type=positive_int, required=True)
    p.add_argument('--cap', type=positive_int)

    p = command('generate', cmd_generate, "write a generated class as HCF", with_class=False)
    p.add_argument('--kind', choices=('grid', 'example1', 'random'), required=True)
    p.add_argument('--d', type=positive_int, default=2, help="grid dimension")
    p.add_argument('--labels', type=positive_int, default=3, help="labels per coordinate (grid, random)")
    p.add_argument('--m', type=positive_int, default=4, help="coordinates (example1, random)")
    p.add_argument('--blocks', type=positive_int, default=1, help="blocks (example1)")
    p.add_argument('--size', type=positive_int, default=20, help="rows (random)")
    p.add_argument('--seed', type=nonneg_int, default=None)
    return parser


def _settings_for(args):
    if args.config:
        settings = load_settings(args.config)
    elif os.path.exists(CONFIG_FILE):
        settings = load_settings(CONFIG_FILE)
    else:
        settings = DEFAULT_SETTINGS
    return settings.with_overrides(threads=args.threads)


def run(argv=None, stdout=None, stderr=None):
    """
    Parse argv, dispatch to the subcommand and write its data.

    Returns:
        int: 0 on success, 1 on a listpac error, 2 on a usage error.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        # usage errors and --version go to the injected streams
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else e.code

    try:
        settings = _settings_for(args)
        level = logging.DEBUG if args.verbose else settings.log_level
        logging.basicConfig(level=level, format=LOG_FORMAT, stream=stderr, force=True)
        if getattr(args, 'seed', 0) is None:
            args.seed = settings.default_seed
        output = args.handler(args, settings)
    except ListPacError as e:
        stderr.write(f"Error: {e}\n")
        return 1
    except OSError as e:
        stderr.write(f"Error: {e}\n")
        return 1

    if args.out:
        with open(args.out, 'w') as f:
            f.write(output)
    else:
        stdout.write(output)
    return 0
