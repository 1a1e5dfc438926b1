"""Period determinants of d + dy on the Legendre curve y^2 = x(x-1)(x-lam)."""

__version__ = "0.1.0"

from .curve import CriticalData, CurveParams, critical_data  # noqa: E402
from .numeric import get_context  # noqa: E402

__all__ = ["CriticalData", "CurveParams", "critical_data", "get_context", "__version__"]
