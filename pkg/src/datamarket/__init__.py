"""Cost optimization for geo-distributed cloud data markets.

Exact single-data-center purchasing, the two-step Datum purchase/placement
heuristic, exact enumeration baselines, facility-location conversions, and a
seeded synthetic case-study generator. All monetary arithmetic is exact
(fractions over decimal inputs quantized at 1e-6).
"""

from datamarket.model import (
    Client,
    CostBreakdown,
    DataCenter,
    ExecCostModel,
    MarketInstance,
    Plan,
    Provider,
    ProviderSubproblem,
    QualityLevel,
    evaluate_cost,
    split_by_provider,
    validate_instance,
)

__all__ = [
    "Client",
    "CostBreakdown",
    "DataCenter",
    "ExecCostModel",
    "MarketInstance",
    "Plan",
    "Provider",
    "ProviderSubproblem",
    "QualityLevel",
    "evaluate_cost",
    "split_by_provider",
    "validate_instance",
]

__version__ = "0.1.0"
