import sys

from containers import Container
from experiment.interface.cli import main


def run():
    container = Container()  # noqa: F841 (wires experiment.interface)
    sys.exit(main())


if __name__ == "__main__":
    run()
