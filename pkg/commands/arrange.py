import logging
from argparse import Namespace

from services.render import arrangement_payload, envelope, require_format

logger = logging.getLogger(__name__)


class ArrangeCommands:
    """arrange: the d x d matrix of Fset values around I"""

    def __init__(self, app):
        self.app = app

    def arrange(self, args: Namespace) -> str:
        job = self.app.job(args)
        fmt = self.app.output_format(args)
        require_format(fmt, ("json", "latex"), "arrange")

        arr = self.app.engine.arrange(job, args.keep_inadmissible)
        if fmt == "latex":
            return arr.latex()
        return envelope(job.echo(), arrangement_payload(arr), genericity=self.app.engine.last.genericity)


def setup(app):
    cmd = ArrangeCommands(app)
    sub = app.add_command("arrange", cmd.arrange, "sparse dump of the Fset arrangement")
    sub.add_argument("--keep-inadmissible", action="store_true",
                     help="show inadmissible cells as raw symbols instead of 0")
