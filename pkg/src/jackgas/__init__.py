"""Jack measures on partitions as discrete beta-ensembles."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("jackgas")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"
