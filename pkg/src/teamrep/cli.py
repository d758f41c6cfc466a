"""Command-line entry point: ``teamrep {ingest,detect,recommend,evaluate,synth}``.

Every option can also be given in a ``key = value`` config file passed with
``--config``; flags on the command line win. Outputs are CSV with headers,
floats printed with 12 significant digits. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, fields
from pathlib import Path

from . import corpus, familiarity, kernel, metrics, motifs, synth
from .errors import TeamrepError

logger = logging.getLogger("teamrep")


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass
class RunConfig:
    command: str
    publications: str | None = None
    teams: str | None = None
    ground_truth: str | None = None
    output: str | None = None
    window: tuple[int, int] | None = None
    train: tuple[int, int] = (2005, 2012)
    test: tuple[int, int] = (2013, 2015)
    max_skills: int = corpus.DEFAULT_MAX_SKILLS
    min_size: int = corpus.MIN_TEAM_SIZE
    max_size: int = corpus.MAX_TEAM_SIZE
    motif_order: int = motifs.DEFAULT_ORDER
    mode: str = familiarity.HIGHER_ORDER
    mu: float = kernel.DEFAULT_MU
    tol: float = kernel.DEFAULT_TOL
    max_iter: int = kernel.DEFAULT_MAX_ITER
    hops: int = kernel.DEFAULT_HOPS
    top_k: int = kernel.DEFAULT_TOP_K
    outlier_threshold: float | None = None
    team_id: str | None = None
    outlier: str | None = None
    methods: tuple[str, ...] = tuple(metrics.METHODS)
    threads: int = 1
    motifs_out: str | None = None
    seed: int = 0
    count: int = 7
    team_size: int | None = None
    pool_size: int = 8
    noise: float = 0.0
    skills: int = 6
    out_dir: str | None = None


def _years(text):
    parts = str(text).replace(",", " ").replace("-", " ").split()
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two years, got {text!r}")
    return int(parts[0]), int(parts[1])


def _common(p, network=True):
    p.add_argument("--config", help="key = value file with option defaults")
    p.add_argument("-o", "--output", help="output CSV (default: stdout)")
    if network:
        p.add_argument("--publications", required=False, help="publication records, one JSON object per line")
        p.add_argument("--max-skills", type=int, default=corpus.DEFAULT_MAX_SKILLS,
                       help="keep the most common skill labels (default: %(default)s)")
        p.add_argument("--motif-order", type=int, default=motifs.DEFAULT_ORDER,
                       help="clique size of a motif (default: %(default)s)")


def _teams(p):
    p.add_argument("--teams", help="CSV with header team_id,member_id")
    p.add_argument("--min-size", type=int, default=corpus.MIN_TEAM_SIZE)
    p.add_argument("--max-size", type=int, default=corpus.MAX_TEAM_SIZE)


def _window(p):
    p.add_argument("--window", type=_years, metavar="START-END",
                   help="inclusive publication years used for the network (default: all)")


def _kernel(p):
    p.add_argument("--mode", choices=familiarity.MODES, default=familiarity.HIGHER_ORDER,
                   help="familiarity used by the kernel (default: %(default)s)")
    p.add_argument("--mu", type=float, default=kernel.DEFAULT_MU, help="walk decay (default: %(default)s)")
    p.add_argument("--tol", type=float, default=kernel.DEFAULT_TOL, help="(default: %(default)s)")
    p.add_argument("--max-iter", type=int, default=kernel.DEFAULT_MAX_ITER, help="(default: %(default)s)")
    p.add_argument("--hops", type=int, default=kernel.DEFAULT_HOPS,
                   help="candidate search radius, 0 = whole network (default: %(default)s)")
    p.add_argument("--top-k", type=int, default=kernel.DEFAULT_TOP_K, help="(default: %(default)s)")
    p.add_argument("--threads", type=int, default=1, help="scoring workers (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teamrep", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="summarise the collaboration network of a corpus")
    _common(p)
    _window(p)
    p.add_argument("--motifs-out", help="also write motif instances to this CSV")

    p = sub.add_parser("detect", help="rank team members by outlier degree")
    _common(p)
    _window(p)
    _teams(p)
    p.add_argument("--outlier-threshold", type=float,
                   help="only emit members with outlier degree <= this value")

    p = sub.add_parser("recommend", help="rank replacements for each team's outlier")
    _common(p)
    _window(p)
    _teams(p)
    _kernel(p)
    p.add_argument("--team-id", help="only this team")
    p.add_argument("--outlier", help="member to replace (default: detected outlier); needs --team-id")

    p = sub.add_parser("evaluate", help="temporal-split evaluation against ground truth")
    _common(p)
    _teams(p)
    _kernel(p)
    p.add_argument("--ground-truth", help="CSV with header team_id,departed_id,joiner_id")
    p.add_argument("--train", type=_years, default=(2005, 2012), metavar="START-END",
                   help="years used for prediction (default: 2005-2012)")
    p.add_argument("--test", type=_years, default=(2013, 2015), metavar="START-END",
                   help="later years holding departures and joiners (default: 2013-2015)")
    p.add_argument("--methods", default=",".join(metrics.METHODS),
                   help="comma-separated subset of %(default)s")

    p = sub.add_parser("synth", help="write a planted-instance fixture corpus")
    p.add_argument("--config", help="key = value file with option defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=7, help="number of planted teams (default: %(default)s)")
    p.add_argument("--team-size", type=int, help="fixed team size (default: cycle through 3..9)")
    p.add_argument("--pool-size", type=int, default=8)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--skills", type=int, default=6, help="skill vocabulary size")
    p.add_argument("--out-dir", help="directory for publications.jsonl, teams.csv, ground_truth.csv")
    return parser


def read_config(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise TeamrepError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def parse_config(argv=None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    if getattr(args, "config", None):
        try:
            values = read_config(args.config)
        except (OSError, TeamrepError) as exc:
            parser.error(str(exc))
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, raw in values.items():
            action = known.get(key)
            if action is None or key in ("config", "help"):
                sub.error(f"unknown config key {key!r}")
            try:
                defaults[key] = action.type(raw) if action.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                sub.error(f"config key {key!r}: {exc}")
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)

    ns = vars(args)
    names = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in ns.items() if k in names and v is not None})
    if isinstance(ns.get("methods"), str):
        cfg.methods = tuple(m.strip() for m in ns["methods"].split(",") if m.strip())
    _validate(sub, cfg)
    logging.basicConfig(
        level=logging.INFO if ns.get("verbose") else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    return cfg


def _validate(sub, cfg: RunConfig) -> None:
    need = {
        "ingest": ["publications"],
        "detect": ["publications", "teams"],
        "recommend": ["publications", "teams"],
        "evaluate": ["publications", "teams", "ground_truth"],
        "synth": ["out_dir"],
    }[cfg.command]
    for name in need:
        if getattr(cfg, name) is None:
            sub.error(f"--{name.replace('_', '-')} is required")
    if cfg.outlier is not None and cfg.team_id is None:
        sub.error("--outlier needs --team-id")
    if cfg.threads < 1:
        sub.error("--threads must be >= 1")
    if cfg.top_k < 1:
        sub.error("--top-k must be >= 1")
    if cfg.hops < 0:
        sub.error("--hops must be >= 0")
    if cfg.mu < 0 or cfg.tol <= 0 or cfg.max_iter < 1:
        sub.error("--mu must be >= 0, --tol > 0 and --max-iter >= 1")
    if cfg.motif_order < 3:
        sub.error("--motif-order must be >= 3")
    if cfg.min_size > cfg.max_size:
        sub.error("--min-size exceeds --max-size")
    bad = [m for m in cfg.methods if m not in metrics.METHODS]
    if bad:
        sub.error(f"unknown method(s) {', '.join(bad)}")
    if cfg.window is not None and cfg.window[0] > cfg.window[1]:
        sub.error("--window start is after its end")
    if cfg.command == "evaluate" and max(cfg.train[0], cfg.test[0]) <= min(cfg.train[1], cfg.test[1]):
        sub.error("--train and --test years overlap")
    if cfg.command == "synth" and not 0 <= cfg.noise <= 1:
        sub.error("--noise must lie in [0, 1]")


@contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _network(cfg: RunConfig, window=None):
    pubs = corpus.read_publications(cfg.publications)
    net = corpus.build_network(pubs, window or cfg.window, cfg.max_skills)
    logger.info("network: %d scholars, %d edges", len(net), net.n_edges)
    return pubs, net


def cmd_ingest(cfg: RunConfig) -> None:
    _, net = _network(cfg)
    index = motifs.enumerate_motifs(net, cfg.motif_order)
    stats = {**net.summary(), "motif_order": cfg.motif_order, "motif_instances": len(index)}
    with _open_out(cfg.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "value"])
        w.writerows(stats.items())
    if cfg.motifs_out:
        with open(cfg.motifs_out, "w", encoding="utf-8", newline="") as fh:
            motifs.write_instances(index, fh)


def _teams_and_index(cfg, net):
    teams = corpus.load_teams(cfg.teams, net, cfg.min_size, cfg.max_size)
    index = motifs.enumerate_motifs(net, cfg.motif_order)
    return teams, index


def cmd_detect(cfg: RunConfig) -> None:
    _, net = _network(cfg)
    teams, index = _teams_and_index(cfg, net)
    with _open_out(cfg.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(familiarity.OUTLIER_HEADER)
        for team in teams:
            ranking = familiarity.detect_outliers(net, index, team)
            if cfg.outlier_threshold is not None:
                flagged = {s.scholar for s in familiarity.flag_outliers(ranking, cfg.outlier_threshold)}
                rows = [(r, s) for r, s in enumerate(ranking, 1) if s.scholar in flagged]
            else:
                rows = list(enumerate(ranking, 1))
            for rank, s in rows:
                w.writerow([s.team, s.scholar, s.pairwise, s.higher_order, fmt(s.outlier_degree), rank])


def cmd_recommend(cfg: RunConfig) -> None:
    _, net = _network(cfg)
    teams, index = _teams_and_index(cfg, net)
    if cfg.team_id is not None:
        teams = [t for t in teams if t.team_id == cfg.team_id]
        if not teams:
            raise TeamrepError(f"team {cfg.team_id!r} not found (or skipped for its size)")
    with _open_out(cfg.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(kernel.RECOMMEND_HEADER)
        for team in teams:
            p = cfg.outlier or familiarity.detect_outliers(net, index, team)[0].scholar
            ranking = kernel.recommend(
                net, index, team, p, k=cfg.top_k, mode=cfg.mode, mu=cfg.mu, hops=cfg.hops,
                tol=cfg.tol, max_iter=cfg.max_iter, threads=cfg.threads,
            )
            if ranking.status != "ok":
                logger.warning("team %s: no candidates within %d hops", team.team_id, cfg.hops)
            w.writerows(kernel.recommendation_rows(ranking, fmt))


def cmd_evaluate(cfg: RunConfig) -> None:
    pubs = corpus.read_publications(cfg.publications)
    _standard, testing = metrics.temporal_split(pubs, cfg.train, cfg.test)
    net = corpus.build_network(testing, cfg.train, cfg.max_skills)
    teams, index = _teams_and_index(cfg, net)
    truth = metrics.load_ground_truth(cfg.ground_truth)
    report = metrics.evaluate_run(
        net, index, teams, truth, cfg.methods, k=cfg.top_k, mu=cfg.mu, hops=cfg.hops,
        tol=cfg.tol, max_iter=cfg.max_iter, threads=cfg.threads,
        sizes=range(cfg.min_size, cfg.max_size + 1),
    )
    with _open_out(cfg.output) as fh:
        metrics.write_report(report, fh, fmt)
    print(metrics.format_summary(report), file=sys.stderr)


def cmd_synth(cfg: RunConfig) -> None:
    sizes = [cfg.team_size] if cfg.team_size else range(corpus.MIN_TEAM_SIZE, corpus.MAX_TEAM_SIZE + 1)
    pubs, teams, truth, _ = synth.planted_corpus(
        cfg.seed, cfg.count, cfg.pool_size, cfg.noise, cfg.skills,
        train_year=cfg.train[1] - 2, test_year=cfg.test[0] + 1, sizes=sizes,
    )
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "publications.jsonl", "w", encoding="utf-8") as fh:
        corpus.write_publications(pubs, fh)
    with open(out / "teams.csv", "w", encoding="utf-8", newline="") as fh:
        corpus.write_teams(teams, fh)
    with open(out / "ground_truth.csv", "w", encoding="utf-8", newline="") as fh:
        metrics.write_ground_truth(truth, fh)
    logger.info("wrote %d publications and %d teams to %s", len(pubs), len(teams), out)


COMMANDS = {
    "ingest": cmd_ingest,
    "detect": cmd_detect,
    "recommend": cmd_recommend,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
}


def run(cfg: RunConfig) -> int:
    try:
        COMMANDS[cfg.command](cfg)
    except (TeamrepError, OSError) as exc:
        print(f"teamrep {cfg.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
