"""Enable CLI to be called as a Python module (`python -m ehcavity ...`)."""
from ehcavity.cli import main

main()
