"""Deterministic synthetic case-study generator.

Geography: one data center per listed state, sited at the state's largest
city; providers round-robin over the second and third largest cities of
those states; clients sampled from the city table with probability
proportional to population. Demands: each (client, provider) pair is
included independently so the expected request size matches
avg_providers_per_client (clients with no demands are redrawn); the level
requested per demand is Zipf-distributed around the middle level. Fees per
provider are sorted Pareto draws. Transfer costs are haversine distance
times the rate, rescaled so the aggregate bandwidth-to-fee and
internal-to-external cost ratios hit the configured log10 targets.

Determinism: generate() is a pure function of its params. One SplitMix64
stream seeded by params.seed is consumed in this exact order:
  1. data centers       (no draws; deterministic siting)
  2. providers          (no draws; deterministic round-robin)
  3. clients            (one weighted city draw each)
  4. demands            (per client: one uniform per provider per attempt,
                         repeating the full round while the set is empty)
  5. levels             (one uniform per demanded (client, provider), in
                         client then provider order)
  6. fees               (levels_per_provider uniforms per provider)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from datamarket.cities import CITIES, DC_STATES, cities_in_state
from datamarket.model import (
    Client,
    DataCenter,
    ExecCostModel,
    MarketInstance,
    Provider,
    QualityLevel,
)
from datamarket.numeric import QUANTUM, distance_cost, quantize, to_rational
from datamarket.rng import SplitMix64

ZERO = Fraction(0)


class InvalidRatioTargets(Exception):
    """The two ratio targets admit no positive calibration scales."""


@dataclass(frozen=True)
class ScenarioParams:
    seed: int = 0
    num_data_centers: int = 10
    num_providers: int = 20
    num_clients: int = 40
    levels_per_provider: int = 8
    # Expected providers per client request; None means half the providers.
    avg_providers_per_client: float | None = None
    zipf_shape: float = 30.0
    pareto_mean: float = 10.0
    pareto_shape: float = 2.0
    rate_per_gigameter: str | Fraction = "1"
    ratio_band_to_fee: float = -0.5  # target log10((alpha+beta)/f)
    ratio_internal_to_external: float = -1.0  # target log10(alpha/(beta+f))
    max_replicas: int = 2

    def demand_probability(self) -> float:
        avg = self.avg_providers_per_client
        if avg is None:
            return 0.5
        return avg / self.num_providers

    def validate(self) -> None:
        if not 1 <= self.num_data_centers <= len(DC_STATES):
            raise ValueError(f"num_data_centers must be in 1..{len(DC_STATES)}")
        for name in ("num_providers", "num_clients", "levels_per_provider", "max_replicas"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.demand_probability() <= 1:
            raise ValueError("avg_providers_per_client must be in (0, num_providers]")
        if self.pareto_shape <= 1:
            raise ValueError("pareto_shape must exceed 1 for a finite mean")
        if self.ratio_band_to_fee <= self.ratio_internal_to_external:
            raise InvalidRatioTargets(
                "ratio_band_to_fee must exceed ratio_internal_to_external"
                " (alpha <= alpha+beta forces the first ratio above the second)"
            )


def calibration_scales(
    alpha_sum: Fraction, beta_sum: Fraction, fee_sum: Fraction, r1: Fraction, r2: Fraction
) -> tuple[Fraction, Fraction]:
    """Scales (s_alpha, s_beta) solving
    s_alpha*A + s_beta*B = r1*F  and  s_alpha*A = r2*(s_beta*B + F)."""
    if alpha_sum <= 0 or beta_sum <= 0 or fee_sum <= 0:
        raise InvalidRatioTargets("calibration needs positive raw cost and fee sums")
    s_beta = fee_sum * (r1 - r2) / (beta_sum * (1 + r2))
    s_alpha = r2 * (s_beta * beta_sum + fee_sum) / alpha_sum
    if s_alpha <= 0 or s_beta <= 0:
        raise InvalidRatioTargets(f"non-positive calibration scales ({s_alpha}, {s_beta})")
    return s_alpha, s_beta


def zipf_level(rng: SplitMix64, num_levels: int, shape: float) -> int:
    """Level draw centered on the middle of the menu.

    Levels are ranked by distance from round(L/2), ties toward the lower
    level; rank r is drawn with probability proportional to r^-shape.
    """
    center = round(num_levels / 2)
    ranked = sorted(range(1, num_levels + 1), key=lambda l: (abs(l - center), l))
    weights = [1.0 / (r**shape) for r in range(1, num_levels + 1)]
    return ranked[rng.weighted_index(weights)]


def pareto_draw(rng: SplitMix64, mean: float, shape: float) -> Fraction:
    """Quantized Pareto draw with the given mean: scale x_m = mean*(a-1)/a."""
    x_m = mean * (shape - 1) / shape
    u = rng.unit_open()
    return quantize(x_m / (u ** (1.0 / shape)))


def generate(params: ScenarioParams) -> MarketInstance:
    """Build the synthetic market instance for the given parameters."""
    params.validate()
    rng = SplitMix64(params.seed)
    rate = to_rational(params.rate_per_gigameter)

    # Phase 1: data centers, largest city of each listed state.
    states = DC_STATES[: params.num_data_centers]
    dc_cities = [cities_in_state(s)[0] for s in states]
    data_centers = tuple(
        DataCenter(id=f"dc{i + 1}", location=(c.lat, c.lon)) for i, c in enumerate(dc_cities)
    )

    # Phase 2: providers, round-robin over second and third cities.
    provider_cities = []
    for i in range(params.num_providers):
        state = states[i % len(states)]
        rank = 1 + (i // len(states)) % 2  # index 1 = second city, 2 = third
        provider_cities.append(cities_in_state(state)[rank])

    # Phase 3: client cities, population-weighted.
    weights = [float(c.population) for c in CITIES]
    client_cities = [CITIES[rng.weighted_index(weights)] for _ in range(params.num_clients)]

    # Phase 4: demand sets.
    prob = params.demand_probability()
    demand_sets: list[list[int]] = []
    for _ in range(params.num_clients):
        chosen: list[int] = []
        while not chosen:
            chosen = [p for p in range(params.num_providers) if rng.random() < prob]
        demand_sets.append(chosen)

    # Phase 5: demanded levels.
    levels = params.levels_per_provider
    demand_levels = [
        [zipf_level(rng, levels, params.zipf_shape) for _ in chosen] for chosen in demand_sets
    ]

    # Phase 6: fees, sorted ascending with strictness enforced at the quantum.
    fee_table: list[list[Fraction]] = []
    for _ in range(params.num_providers):
        draws = sorted(
            pareto_draw(rng, params.pareto_mean, params.pareto_shape) for _ in range(levels)
        )
        for k in range(1, levels):
            if draws[k] <= draws[k - 1]:
                draws[k] = draws[k - 1] + QUANTUM
        fee_table.append(draws)

    # Raw distance costs, then calibration to the ratio targets.
    beta_raw = [
        [distance_cost(pc.lat, pc.lon, dc.lat, dc.lon, rate) for dc in dc_cities]
        for pc in provider_cities
    ]
    alpha_raw = [
        [distance_cost(dc.lat, dc.lon, cc.lat, cc.lon, rate) for cc in client_cities]
        for dc in dc_cities
    ]
    alpha_sum = sum((v for row in alpha_raw for v in row), ZERO)
    beta_sum = sum((v for row in beta_raw for v in row), ZERO)
    fee_sum = sum((f for fees in fee_table for f in fees), ZERO)
    r1 = quantize(10.0**params.ratio_band_to_fee)
    r2 = quantize(10.0**params.ratio_internal_to_external)
    s_alpha, s_beta = calibration_scales(alpha_sum, beta_sum, fee_sum, r1, r2)

    providers = tuple(
        Provider(
            id=f"p{p + 1}",
            levels=tuple(
                QualityLevel(index=l + 1, quality=Fraction(l + 1), per_query_fee=fee_table[p][l])
                for l in range(levels)
            ),
            oper_cost=tuple(
                tuple(quantize(s_beta * beta_raw[p][d]) for _ in range(levels))
                for d in range(params.num_data_centers)
            ),
        )
        for p in range(params.num_providers)
    )
    clients = tuple(
        Client(
            id=f"c{c + 1}",
            demands=tuple(
                (f"p{p + 1}", Fraction(level))
                for p, level in zip(demand_sets[c], demand_levels[c])
            ),
            location=(client_cities[c].lat, client_cities[c].lon),
        )
        for c in range(params.num_clients)
    )
    return MarketInstance(
        providers=providers,
        data_centers=data_centers,
        clients=clients,
        exec_cost=ExecCostModel(
            mode="distance",
            level_independent=True,
            rate_per_gigameter=quantize(s_alpha * rate),
        ),
        contracting="per_query",
    )


def sweep_params(
    base: ScenarioParams, knob: str, start: float, stop: float, steps: int
) -> list[ScenarioParams]:
    """Evenly spaced log10 ratio targets for one knob, seed-stable.

    The non-swept ratio keeps its base value whenever feasible; when the
    swept target would cross it (the targets must satisfy band_to_fee >
    internal_to_external), it shifts along, preserving the base gap.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    if knob not in ("band_to_fee", "internal_to_external"):
        raise ValueError(f"unknown knob {knob!r}")
    base.validate()
    gap = base.ratio_band_to_fee - base.ratio_internal_to_external
    points = []
    for k in range(steps):
        target = start + k * (stop - start) / (steps - 1)
        if knob == "band_to_fee":
            other = min(base.ratio_internal_to_external, target - gap)
            point = replace(
                base, ratio_band_to_fee=target, ratio_internal_to_external=other
            )
        else:
            other = max(base.ratio_band_to_fee, target + gap)
            point = replace(
                base, ratio_internal_to_external=target, ratio_band_to_fee=other
            )
        point.validate()
        points.append(point)
    return points


def instance_log_ratios(instance: MarketInstance) -> tuple[float, float]:
    """Realized (log10((alpha+beta)/f), log10(alpha/(beta+f))) of an instance,
    using the same aggregates calibration targets: alpha summed over all
    (data center, client) pairs, beta over (provider, data center) pairs at
    level one, fees over all (provider, level) pairs."""
    from datamarket.model import exec_cost_value

    alpha_sum = ZERO
    for d in range(len(instance.data_centers)):
        for c in range(len(instance.clients)):
            alpha_sum += exec_cost_value(instance, instance.providers[0].id, d, c, 1)
    beta_sum = sum(
        (p.oper_cost[d][0] for p in instance.providers for d in range(len(instance.data_centers))),
        ZERO,
    )
    fee_sum = sum((l.per_query_fee for p in instance.providers for l in p.levels), ZERO)
    return (
        math.log10(float((alpha_sum + beta_sum) / fee_sum)),
        math.log10(float(alpha_sum / (beta_sum + fee_sum))),
    )
