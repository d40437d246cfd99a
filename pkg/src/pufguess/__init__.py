"""PUF simulation, quality metrics and guesswork-based security analysis."""

__version__ = "0.1.0"

from .bits import BitVector
from .puf_model import PRESETS, Population, PufSpec, preset, sample_population

__all__ = ["BitVector", "PRESETS", "Population", "PufSpec", "preset", "sample_population", "__version__"]
