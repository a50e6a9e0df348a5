"""fano-mck - exact verification of the tautological ring and MCK calculus of genus 10 prime Fano threefolds."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("fano-mck")
except PackageNotFoundError:
    __version__ = "0.0.0+local"

__author__ = "antonkulaga"
__email__ = "antonkulaga@gmail.com"
