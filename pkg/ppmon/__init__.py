import sys

# PEP 440 version; the development branch carries 'X.Y.devN'
__version__ = "0.2.dev0"

try:
    # set in builtins by setup.py so the version can be read before the
    # dependencies are installed
    __PPMON_SETUP__  # type: ignore
except NameError:
    __PPMON_SETUP__ = False

if __PPMON_SETUP__:
    sys.stderr.write("Partial import of ppmon during the build process.\n")
