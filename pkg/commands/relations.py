import logging
from argparse import Namespace

from services.grassmann import RelationKind
from services.render import envelope, relation_payload, relations_latex, require_format

logger = logging.getLogger(__name__)


class RelationCommands:
    """relations: the quiver, vanishing and Plücker relations of a job"""

    def __init__(self, app):
        self.app = app

    def relations(self, args: Namespace) -> str:
        job = self.app.job(args)
        fmt = self.app.output_format(args)
        require_format(fmt, ("json", "latex"), "relations")

        rels = self.app.engine.relations(job)
        if args.kind:
            rels = [r for r in rels if r.kind is RelationKind(args.kind)]
        if not args.with_trivial:
            rels = [r for r in rels if not r.is_trivial]
        logger.info(f"{len(rels)} relations")

        if fmt == "latex":
            return relations_latex(rels)
        counts = {k.value: sum(1 for r in rels if r.kind is k) for k in RelationKind}
        counts["components"] = sum(r.components for r in rels if r.kind is RelationKind.QUIVER)
        return envelope(job.echo(), {"counts": counts, "relations": [relation_payload(r) for r in rels]})


def setup(app):
    cmd = RelationCommands(app)
    sub = app.add_command("relations", cmd.relations, "emit all relations of the job's system")
    sub.add_argument("--kind", choices=[k.value for k in RelationKind], help="only relations of this kind")
    sub.add_argument("--with-trivial", action="store_true", help="keep relations that cancel to 0")
