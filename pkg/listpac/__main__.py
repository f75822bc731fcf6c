import sys

from listpac.cli import run

sys.exit(run(sys.argv[1:]))
