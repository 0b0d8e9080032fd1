import argparse
import logging
import os
import sys
from datetime import datetime

from src.cli import COMMANDS, RunConfig, write_effective_config
from src.errors import ConfigError, MeshFormatError, ProblemError, RfemError
from src.utils.data_loader import apply_overrides, load_config

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


class Logger(object):
    def __init__(self, log_file):
        self.terminal = sys.stdout
        self.log = open(log_file, "a")

    def write(self, message):
        self.terminal.write(message)
        self.log.write(message)

    def flush(self):
        self.terminal.flush()
        self.log.flush()


def build_parser():
    parser = argparse.ArgumentParser(prog="rfem", description="Recovered finite elements on polygonal meshes")
    parser.add_argument('command', choices=sorted(COMMANDS), help="mesh: generate and write a mesh; "
                        "solve: one assemble/solve/report run; study: convergence study over refinement levels")
    parser.add_argument('--config', type=str, help="Path to a JSON run configuration (defaults are used when omitted)")
    parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help="Override a config field by dotted path, e.g. --set mesh.n_cells=256 (repeatable)")
    parser.add_argument('--out', type=str, help="Output directory (default: runs/<timestamp>)")
    parser.add_argument('--verbose', action='store_true', help="Log debug messages")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    # 0. Setup Run Directory
    run_dir = args.out or os.path.join("runs", datetime.now().strftime("%Y%m%d_%H%M%S"))
    os.makedirs(run_dir, exist_ok=True)

    # Setup Logger
    stdout = sys.stdout
    sys.stdout = Logger(os.path.join(run_dir, "run.log"))
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if args.verbose else logging.INFO)

    try:
        print(f"--- Command: {args.command} | Output Directory: {run_dir} ---")
        print(f"Command: {' '.join(sys.argv)}")

        # 1. Load Config
        print("--- Loading Config ---")
        try:
            raw = load_config(args.config) if args.config else {}
            config = RunConfig.from_dict(apply_overrides(raw, args.overrides))
        except (ConfigError, FileNotFoundError) as e:
            print(f"Error loading config: {e}")
            return EXIT_INPUT
        write_effective_config(config, run_dir)

        # 2. Run
        try:
            COMMANDS[args.command](config, run_dir)
        except (ConfigError, MeshFormatError, ProblemError, FileNotFoundError) as e:
            print(f"Input error: {e}")
            return EXIT_INPUT
        except RfemError as e:
            print(f"Numerical failure ({type(e).__name__}): {e}")
            return EXIT_NUMERICAL
        return EXIT_OK
    finally:
        root.removeHandler(handler)
        sys.stdout.flush()
        sys.stdout.log.close()
        sys.stdout = stdout


if __name__ == "__main__":
    sys.exit(main())
