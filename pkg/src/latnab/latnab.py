import argparse
import json
import logging
import sys

from collections import Counter
from os import getenv
from pathlib import Path
from time import perf_counter
from typing import Any

from latnab import __version__
from latnab.cache import ThetaCache
from latnab.catalog import catalog, catalog_names
from latnab.config import Config, IsometryPolicy, load_config, parse_count, parse_rational
from latnab.config.classes import LoggingConfig
from latnab.designs import configuration
from latnab.errors import InvalidValueError, LatnabError, UnknownLatticeError
from latnab.exact import format_rational
from latnab.isometry import fingerprint, is_isometric
from latnab.lattice import Lattice, LatticeVector, lattice_to_dict, load_lattice, neighbor, parse_vector
from latnab.overlattice import bucket_counts, classify_census, integral_overlattices
from latnab.quotient import coset_classes, rows_from_classes
from latnab.reproduce import construction_vector, reproduce, require_pass
from latnab.shells import kissing, minimum, shell, theta
from latnab.venkov import venkov_project, venkov_sweep


def init_logger(logger: LoggingConfig):

    level = getattr(logging, logger.level.upper(), logging.WARNING)
    # [year-month-day hour:minute:second] [LEVEL] <logger name>: message
    log_format = "[%(asctime)s] [%(levelname)s] <%(name)s>: %(message)s"
    date_format = "%Y-%m-%d %H:%M:%S"

    handlers: list[logging.Handler] = []
    handlers.append(logging.StreamHandler())
    if logger.file is not None:
        handlers.append(logging.FileHandler(logger.file, encoding="utf-8"))

    logging.basicConfig(encoding="utf-8", level=level, handlers=handlers, format=log_format, datefmt=date_format, force=True)


def find_config_file() -> Path | None:
    # Look for a config file in the following locations, in order:
    # 1. Environment variable LATNAB_CONFIG
    # 2. User home directory
    # 3. Current directory ./latnab.yaml
    # 4. /etc/latnab/ (Linux only)
    # None when nothing is found, the defaults apply then.

    env_var = "LATNAB_CONFIG"
    env_var_value = getenv(env_var)
    possible_locations: list[Path] = []

    if env_var_value is not None:
        possible_locations.append(Path(env_var_value))

    possible_locations += [
        Path.home() / ".latnab" / "config.yaml",
        Path.home() / ".latnab" / "config.yml",

        Path.home() / ".config" / "latnab" / "config.yaml",
        Path.home() / ".config" / "latnab" / "config.yml",

        Path.home() / ".latnab.yaml",
        Path.home() / ".latnab.yml",

        Path.cwd() / "latnab.yaml",
        Path.cwd() / "latnab.yml",
    ]

    if Path("/etc").exists():
        possible_locations += [
            Path("/etc/latnab/latnab.yaml"),
            Path("/etc/latnab/latnab.yml"),
        ]

    for loc in possible_locations:
        if loc.is_file():
            return loc
    return None


def init(config_file: str | Path | None, verbose: int = 0, threads: int | None = None) -> tuple[Config, ThetaCache]:
    config = load_config(config_file) if config_file is not None else Config()

    env_threads = getenv("LATNAB_THREADS")
    if threads is None and env_threads:
        if not env_threads.strip().isdigit():
            raise InvalidValueError(f"LATNAB_THREADS must be a positive integer, got {env_threads!r}.")
        threads = int(env_threads)
    if threads is not None:
        config = config._replace(performance=config.performance._replace(threads=max(1, threads)))
    if verbose:
        level = "DEBUG" if verbose > 1 else "INFO"
        config = config._replace(logging=config.logging._replace(level=level))

    init_logger(config.logging)
    log = logging.getLogger("latnab")
    if config_file is None:
        log.debug("No configuration file found, using the defaults")
    else:
        log.debug(f"Configuration loaded from {config_file}")
    log.debug(f"{config.performance!r}")

    cache = ThetaCache(config.general.cache_file)
    cache.load()
    return config, cache


# Argument helpers

def _load_lattice(arg: str) -> Lattice:
    # A catalog name, or a path to a lattice file
    path = Path(arg)
    if path.suffix == ".json" or path.is_file():
        return load_lattice(path)
    return catalog(arg)


def _vector(text: str, L: Lattice) -> LatticeVector:
    # '1/2,0,0,1/2' in frame coordinates, or a construction such as '(e1+e3)/2' or 'eps1'
    if "," in text:
        return parse_vector(text)
    return construction_vector(text, L)


def _summary(L: Lattice, config: Config) -> dict[str, Any]:
    perf = config.performance
    data = lattice_to_dict(L)
    data["gram_matrix"] = [[format_rational(x) for x in row] for row in L.gram.entries]
    data["det"] = format_rational(L.determinant)
    data["integral"] = L.is_integral()
    data["even"] = L.is_even()
    data["minimum"] = format_rational(minimum(L, perf))
    data["kissing"] = kissing(L, perf)
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latnab", description="Exact workbench for Euclidean lattices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="configuration file, overrides the search")
    parser.add_argument("--threads", type=int, help="worker count")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="catalog names")
    p.add_argument("action", choices=["list"])

    p = sub.add_parser("show", help="basis, Gram matrix and invariants")
    p.add_argument("lattice")

    p = sub.add_parser("theta", help="theta series coefficients")
    p.add_argument("lattice")
    p.add_argument("--max-norm", default="12")

    p = sub.add_parser("shell", help="vectors of one norm")
    p.add_argument("lattice")
    p.add_argument("-m", "--norm", required=True)
    p.add_argument("--dump", help="write the vectors to this file")

    p = sub.add_parser("classes", help="classes of the dual quotient")
    p.add_argument("lattice")

    p = sub.add_parser("neighbor", help="index-2 overlattice <L, x>")
    p.add_argument("lattice")
    p.add_argument("--vector", required=True)

    p = sub.add_parser("census", help="all integral overlattices")
    p.add_argument("lattice")
    p.add_argument("--classify", nargs="?", type=IsometryPolicy, choices=[IsometryPolicy.FAST, IsometryPolicy.STRICT],
                   const=IsometryPolicy.AUTO, metavar="{fast,strict}",
                   help="classify the members up to isometry, strict or fast; by dimension when no value is given")

    p = sub.add_parser("isometric", help="isometry test")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--policy", choices=[p.value for p in IsometryPolicy])

    p = sub.add_parser("design", help="(d, n, s, t) of a shell")
    p.add_argument("lattice")
    p.add_argument("-m", "--norm", required=True)
    p.add_argument("--t-cap", type=int)
    p.add_argument("--budget", help="pairwise budget, e.g. 100K")

    p = sub.add_parser("venkov", help="projection at a minimal vector")
    p.add_argument("lattice")
    p.add_argument("--vector", help="sweep every minimal vector when omitted")

    p = sub.add_parser("reproduce", help="regenerate the tables and compare")
    p.add_argument("--section", type=int, action="append")
    p.add_argument("--fast", action="store_true")

    return parser


def main(args: argparse.Namespace, config: Config, cache: ThetaCache) -> Any:
    log = logging.getLogger("latnab")
    perf = config.performance
    policy = IsometryPolicy(args.policy) if getattr(args, "policy", None) else None

    match args.command:
        case "catalog":
            return catalog_names()
        case "show":
            return _summary(_load_lattice(args.lattice), config)
        case "theta":
            L = _load_lattice(args.lattice)
            return theta(L, parse_rational(args.max_norm), perf, cache).to_dict()
        case "shell":
            L = _load_lattice(args.lattice)
            X = shell(L, parse_rational(args.norm), perf)
            if args.dump:
                with open(args.dump, "w", encoding="utf-8") as f:
                    f.write(X.dump())
                log.info(f"Wrote {X.count} vectors to {args.dump}")
            return {"norm": format_rational(X.norm), "count": X.count, "materialized": X.materialized}
        case "classes":
            L = _load_lattice(args.lattice)
            classes = coset_classes(L, config.quotient, perf)
            return {
                "rows": [r.to_dict() for r in rows_from_classes(classes)],
                "classes": [{"index": c.index, "element": list(c.element), "leader": str(c.leader),
                             "norm": format_rational(c.leader_norm), "order": c.group_order} for c in classes],
            }
        case "neighbor":
            L = _load_lattice(args.lattice)
            M = neighbor(L, _vector(args.vector, L), name=f"{L.name or 'L'}({args.vector})")
            return _summary(M, config)
        case "census":
            L = _load_lattice(args.lattice)
            census = integral_overlattices(L, config.quotient, perf, config.census)
            if args.classify is None:
                return {"base": L.name, "total": census.total,
                        "by_index": {str(k): v for k, v in sorted(Counter(m.order for m in census.members).items())}}
            classify_census(census, args.classify, None, config.isometry, perf)
            data = census.to_dict()
            data["counts"] = dict(bucket_counts(census))
            return data
        case "isometric":
            L1, L2 = _load_lattice(args.first), _load_lattice(args.second)
            return is_isometric(L1, L2, policy, config.isometry, perf).to_dict()
        case "design":
            L = _load_lattice(args.lattice)
            cfg = config.design if args.t_cap is None else config.design._replace(t_cap=args.t_cap)
            if args.budget is not None:
                perf = perf._replace(pairwise_budget=parse_count(args.budget))
            return configuration(L, parse_rational(args.norm), cfg, perf).to_dict()
        case "venkov":
            L = _load_lattice(args.lattice)
            if args.vector:
                return venkov_project(L, _vector(args.vector, L), perf=perf).to_dict()
            results = venkov_sweep(L, perf)
            keys = {fingerprint(r.projected, config.isometry, perf, decomposition=False).key() for r in results}
            return {"projections": len(results), "classes": len(keys), "first": results[0].to_dict()}
        case "reproduce":
            reports = reproduce(args.section, config, args.fast, cache)
            print(json.dumps([r.to_dict() for r in reports], indent=2))
            require_pass(reports)
            return None
    raise UnknownLatticeError(f"Unknown command {args.command}")


def run(argv: list[str] | None = None) -> None:
    # Entry point for the application
    args = build_parser().parse_args(argv)
    log = logging.getLogger("latnab")
    cache: ThetaCache | None = None
    code = 0
    try:
        config_file = Path(args.config) if args.config else find_config_file()
        config, cache = init(config_file, args.verbose, args.threads)
        t0 = perf_counter()
        result = main(args, config, cache)
        if result is not None:
            print(json.dumps(result, indent=2))
        t1 = perf_counter()
        log.info(f"Completed in {t1 - t0:.2f} seconds.")
    except LatnabError as e:
        log.error(str(e))
        code = e.exit_code
    except KeyboardInterrupt:
        log.info("Interrupted.")
        code = 130
    finally:
        if cache is not None:
            log.debug(f"Saving theta cache ({len(cache)} entries)...")
            cache.save()
    if code:
        sys.exit(code)


if __name__ == '__main__':
    run()
