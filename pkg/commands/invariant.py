import logging
from argparse import Namespace

from services.render import envelope, hpoly_payload, require_format, schur_payload
from services.symfunc import HPoly

logger = logging.getLogger(__name__)


class InvariantCommands:
    """invariant: the Schur-sum P or P-tilde of a job"""

    def __init__(self, app):
        self.app = app

    def invariant(self, args: Namespace) -> str:
        job = self.app.job(args)
        fmt = self.app.output_format(args)
        require_format(fmt, ("json", "latex"), "invariant")

        expr = self.app.engine.invariant(job, args.mode, args.basis)
        genericity = self.app.engine.last.genericity if self.app.engine.last else []
        if fmt == "latex":
            return expr.latex()
        payload = hpoly_payload(expr) if isinstance(expr, HPoly) else schur_payload(expr)
        payload.update(mode=args.mode, basis=args.basis)
        warnings = []
        if self.app.engine.last and self.app.engine.last.solution.residual:
            warnings.append("the solve left residual relations; the invariant is partial")
        return envelope(job.echo(), payload, warnings, genericity)


def setup(app):
    cmd = InvariantCommands(app)
    sub = app.add_command("invariant", cmd.invariant, "assemble the Schur-sum invariant")
    sub.add_argument("--mode", choices=("P", "Ptilde"), default="Ptilde")
    sub.add_argument("--basis", choices=("schur", "h"), default="schur")
