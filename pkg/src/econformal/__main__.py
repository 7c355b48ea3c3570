from econformal.cli import run

run()
