import logging
from argparse import Namespace

from services.render import assignment_latex, envelope, require_format, solved_payload

logger = logging.getLogger(__name__)


class SolveCommands:
    """solve: eliminate the job's relations and report the Fset"""

    def __init__(self, app):
        self.app = app

    def solve(self, args: Namespace) -> str:
        job = self.app.job(args)
        fmt = self.app.output_format(args)
        require_format(fmt, ("json", "latex"), "solve")

        solved = self.app.engine.solve(job, include_pluecker=True if args.pluecker else None)
        sol = solved.solution
        if fmt == "latex":
            return assignment_latex(solved.record.symbols, solved.record.values)

        warnings = []
        if sol.residual:
            warnings.append(f"{len(sol.residual)} relation(s) left unsolved")
        if sol.free:
            warnings.append(f"{len(sol.free)} free symbol(s): " + ", ".join(str(s) for s in sol.free))
        return envelope(job.echo(), solved_payload(solved), warnings, sol.genericity)


def setup(app):
    cmd = SolveCommands(app)
    sub = app.add_command("solve", cmd.solve, "solve the relations and print the Fset")
    sub.add_argument("--pluecker", action="store_true", help="include Plücker relations even if the job does not")
