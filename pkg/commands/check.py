import logging
from argparse import Namespace

from services.jobspec import parse_sizes
from services.render import basis_payload, envelope, group_text, require_format, schur_payload

logger = logging.getLogger(__name__)

CHECKS = ("homomorphism", "spiral", "nullset", "ladder", "basis")


class CheckCommands:
    """check: report-style verifications of the path invariants"""

    def __init__(self, app):
        self.app = app

    def check(self, args: Namespace) -> str:
        require_format(self.app.output_format(args), ("json",), "check")
        engine = self.app.engine
        warnings = []

        if args.what == "basis":
            job = self.app.load_job(args.job) if args.job else None
            report = engine.basis(job, parse_sizes(args.sizes or self.app.config.sweep))
            if not report.independent:
                warnings.append(f"rank {report.rank} < {report.size}")
            return envelope(job.echo() if job else None, basis_payload(report), warnings)

        job = self.app.job(args)
        report = engine.check(job, args.what)

        if args.what == "homomorphism":
            result = {
                "passed": report.passed,
                "empty_image": report.empty_image,
                "matches": [
                    {
                        "group": group_text(m.group),
                        "x_group": None if m.x_group is None else group_text(m.x_group),
                        "y_group": None if m.y_group is None else group_text(m.y_group),
                        "matched": m.matched,
                    }
                    for m in report.matches
                ],
                "remainder": schur_payload(report.remainder) if report.remainder is not None else None,
            }
            if not report.passed:
                warnings.append("homomorphism check failed")
        elif args.what == "spiral":
            result = [{"name": z.name, "arcs": z.arcs, "groups": z.groups, "vanishes": z.vanishes} for z in report]
            warnings.extend(f"{z.name} does not vanish" for z in report if not z.vanishes)
        elif args.what == "nullset":
            result = {
                "restricted": schur_payload(report.restricted),
                "removed": schur_payload(report.removed),
                "restricted_vanishes": report.restricted_vanishes,
                "removed_vanishes": report.removed_vanishes,
            }
            if not report.restricted_vanishes:
                warnings.append("the invariant restricted to the null-set does not vanish")
        else:
            result = {"expected": report.expected, "observed": report.observed}
            if report.expected != report.observed:
                warnings.append(f"expected {report.expected} summands, found {report.observed}")

        for w in warnings:
            logger.warning(w)
        return envelope(job.echo(), result, warnings)


def setup(app):
    cmd = CheckCommands(app)
    sub = app.add_command("check", cmd.check, "homomorphism, spiral, null-set, ladder and basis checks")
    sub.add_argument("what", choices=CHECKS)
    sub.add_argument("--sizes", metavar="a..b", help="A2 identity sizes for the basis check")
