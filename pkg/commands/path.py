import logging
from argparse import Namespace

from services.errors import ValidationError
from services.paths import path_dot
from services.render import envelope, require_format, schur_payload

logger = logging.getLogger(__name__)


class PathCommands:
    """path: P-tilde, P-hat and partial sums on the circulant quiver"""

    def __init__(self, app):
        self.app = app

    def path(self, args: Namespace) -> str:
        job = self.app.job(args)
        fmt = self.app.output_format(args)
        engine = self.app.engine

        if args.zsum:
            require_format(fmt, ("json", "latex"), "path --zsum")
            expr = engine.zsum(job)
            if fmt == "latex":
                return expr.latex()
            return envelope(job.echo(), {"zsum": list(job.paths.zsum), "k": job.paths.zk, **schur_payload(expr)})

        if not args.name:
            raise ValidationError("path needs a path name or --zsum")
        if fmt == "dot":
            spec = job.paths
            parts = spec.unions.get(args.name, (args.name,))
            return path_dot([engine.resolve_path(job, p) for p in parts])

        require_format(fmt, ("json", "latex", "dot"), "path")
        report = engine.path(job, args.name)
        if fmt == "latex":
            return "\n".join([
                rf"\tilde P_+ = {report.plus.latex()}",
                rf"\tilde P_- = {report.minus.latex()}",
                rf"\hat P = {report.hat.latex()}",
            ])
        result = {
            "name": report.name,
            "plus": schur_payload(report.plus),
            "minus": schur_payload(report.minus),
            "hat": schur_payload(report.hat),
        }
        return envelope(job.echo(), result, report.warnings)


def setup(app):
    cmd = PathCommands(app)
    sub = app.add_command("path", cmd.path, "invariants of a named path in the circulant quiver")
    sub.add_argument("name", nargs="?", help="path, loop or union name from [paths]")
    sub.add_argument("--zsum", action="store_true", help="partial sum over the job's zsum paths")
