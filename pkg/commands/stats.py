import logging
from argparse import Namespace
from dataclasses import asdict

from services.jobspec import parse_sizes
from services.render import csv_text, envelope, require_format

logger = logging.getLogger(__name__)

SWEEP_HEADER = ("i", "plus", "minus", "ratio")


class StatsCommands:
    """stats: sign counts of a solved job, or the A2 identity sweep"""

    def __init__(self, app):
        self.app = app

    def stats(self, args: Namespace) -> str:
        fmt = args.format or "csv"
        require_format(fmt, ("csv", "json"), "stats")
        if args.sweep is not None:
            return self._sweep(args, fmt)

        job = self.app.job(args)
        report = self.app.engine.stats(job)
        if fmt == "csv":
            row = report.row
            return csv_text(SWEEP_HEADER + ("zeros",), [row.csv() + [str(row.zeros)]])
        result = {
            "row": {"i": report.row.i, "plus": report.row.plus, "minus": report.row.minus,
                    "ratio": report.row.ratio},
            "arrangement": asdict(report.arrangement),
            "admissible": asdict(report.admissible),
            "fset": asdict(report.fset),
        }
        return envelope(job.echo(), result, genericity=self.app.engine.last.genericity)

    def _sweep(self, args: Namespace, fmt: str) -> str:
        sizes = parse_sizes(args.sweep or self.app.config.sweep)
        job = self.app.load_job(args.job) if args.job else None
        rows = self.app.engine.sweep(job, sizes)
        if fmt == "csv":
            return csv_text(SWEEP_HEADER, [r.csv() for r in rows])
        result = [{"i": r.i, "plus": r.plus, "minus": r.minus, "zeros": r.zeros, "ratio": r.ratio} for r in rows]
        return envelope(job.echo() if job else None, result)


def setup(app):
    cmd = StatsCommands(app)
    sub = app.add_command("stats", cmd.stats, "sign statistics (CSV by default)")
    sub.add_argument("--sweep", nargs="?", const="", default=None, metavar="a..b",
                     help="A2 identity sweep over even block sizes, counting arrangement cells (default from config)")
