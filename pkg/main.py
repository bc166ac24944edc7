#!/usr/bin/env python3
import os
import sys
import argparse
import importlib
import logging
from typing import Callable, List, Optional

from dotenv import load_dotenv

from services.config import Config
from services.engine import PluqEngine
from services.errors import PluqError, ValidationError
from services.jobspec import JobSpec, parse_jobspec
from services.quiverrep import SOURCE_RULE_WARNING, SignRule
from services.render import FORMATS

logger = logging.getLogger("pluq")


def configure_logging(config: Config) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.log_file:
        handlers.insert(0, logging.FileHandler(config.log_file))
    logging.basicConfig(
        level=getattr(logging, config.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


class PluqApp:
    """Command-line application with all services attached"""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()
        self.engine = PluqEngine(self.config)

        # options every command accepts
        self.common = argparse.ArgumentParser(add_help=False)
        self.common.add_argument("--job", help="job file")
        self.common.add_argument("--out", help="write the result here instead of stdout")
        self.common.add_argument("--format", choices=FORMATS, default=None,
                                 help=f"output format (default {self.config.default_format})")

        self.parser = argparse.ArgumentParser(
            prog="pluq",
            description="Exact Plücker-coordinate computations on quiver Grassmannians",
        )
        self.subparsers = self.parser.add_subparsers(dest="command", metavar="<command>")
        logger.debug("PluqApp services initialized")

    def add_command(self, name: str, handler: Callable[[argparse.Namespace], str],
                    help: str) -> argparse.ArgumentParser:
        sub = self.subparsers.add_parser(name, help=help, parents=[self.common])
        sub.set_defaults(handler=handler)
        return sub

    def load_commands(self) -> None:
        """Register every module in commands/"""
        commands_folder = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'commands')
        for filename in sorted(os.listdir(commands_folder)):
            if filename.endswith('.py') and not filename.startswith('__'):
                module_path = f'commands.{filename[:-3]}'
                try:
                    module = importlib.import_module(module_path)
                    module.setup(self)
                    logger.debug(f"✅ Loaded command module: {module_path}")
                except Exception as e:
                    logger.error(f"❌ Failed to load {module_path}: {e}")

    # ----- jobs -----

    def load_job(self, path: str) -> JobSpec:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ValidationError(f"cannot read job file {path}: {e.strerror}")
        job = parse_jobspec(text)
        if job.max_passes is not None:
            self.config.update_from_dict({"max_passes": job.max_passes})
        logger.info(f"job {path}: {job.vertices} vertices, dims {job.dims}")
        if job.sign_rule is SignRule.SOURCE:
            logger.warning(f"job {path}: {SOURCE_RULE_WARNING}")
        return job

    def job(self, args: argparse.Namespace) -> JobSpec:
        if not args.job:
            raise ValidationError(f"{args.command} needs --job <file>")
        return self.load_job(args.job)

    def output_format(self, args: argparse.Namespace) -> str:
        return args.format or self.config.default_format

    # ----- running -----

    def emit(self, text: str, out: Optional[str]) -> None:
        if not text.endswith("\n"):
            text += "\n"
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
            logger.info(f"wrote {out}")
        else:
            sys.stdout.write(text)

    def run(self, argv: Optional[List[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        if not getattr(args, "handler", None):
            self.parser.print_usage(sys.stderr)
            return 1
        try:
            self.emit(args.handler(args), args.out)
            return 0
        except PluqError as e:
            logger.error(e.reason())
            print(e.reason(), file=sys.stderr)
            return e.exit_code
        except Exception as e:
            logger.exception(f"⚠️ Error in {args.command}: {e}")
            print(f"error internal: {e}", file=sys.stderr)
            return 1


# ----- Main entrypoint -----

def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    config = Config()
    configure_logging(config)
    app = PluqApp(config)
    app.load_commands()
    return app.run(argv)


if __name__ == "__main__":
    sys.exit(main())
