"""Scenario, covariance and sweep files: strict parsing plus full re-validation."""
import copy
import logging
import math
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from jamming_game.errors import InvalidCovariance, InvalidSweep
from jamming_game.mixed import GaussianJammerCovariance
from jamming_game.model import (
    ChannelAggregate,
    GameConfig,
    JammerBudget,
    NetworkParams,
    Priors,
    aggregate,
)
from jamming_game.utils import load_document

logger = logging.getLogger("jamming-game")


class ScenarioFile(BaseModel):
    """Top-level scenario document: network, priors, jammer and game sections."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    network: NetworkParams
    priors: Priors
    jammer: JammerBudget
    game: GameConfig = Field(default_factory=GameConfig)


class Scenario(BaseModel):
    """A validated scenario with its derived aggregate and threshold bound R."""

    model_config = ConfigDict(frozen=True)

    document: ScenarioFile
    agg: ChannelAggregate
    bound: float

    @property
    def network(self) -> NetworkParams:
        return self.document.network

    @property
    def priors(self) -> Priors:
        return self.document.priors

    @property
    def budget(self) -> JammerBudget:
        return self.document.jammer

    @property
    def tolerances(self):
        return self.document.game.tolerances


def parse_scenario(data: Dict[str, Any]) -> Scenario:
    document = ScenarioFile.model_validate(data)
    agg = aggregate(document.network, document.priors)
    bound = document.game.resolve(agg, document.jammer)
    logger.debug("scenario: dims=%s a=%.6g c=%.6g sigma2=%.6g R=%.6g", document.network.dims, agg.a, agg.c, agg.sigma2, bound)
    return Scenario(document=document, agg=agg, bound=bound)


def load_scenario(path: str) -> Scenario:
    return parse_scenario(load_document(path))


class CovarianceFile(BaseModel):
    """Covariance document: declared dimension and a row-major matrix."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    dimension: int = Field(..., ge=0)
    matrix: List[List[float]]


def load_covariance(path: str, scenario: Scenario) -> GaussianJammerCovariance:
    """Read a covariance file and validate it against the scenario's jammer gains and budget."""
    document = CovarianceFile.model_validate(load_document(path))
    if len(document.matrix) != document.dimension or any(len(row) != document.dimension for row in document.matrix):
        raise InvalidCovariance(f"matrix is not {document.dimension} x {document.dimension}.")
    if document.dimension != scenario.agg.dim:
        raise InvalidCovariance(
            f"covariance dimension {document.dimension} does not match L + M = {scenario.agg.dim}."
        )
    cov = GaussianJammerCovariance.of(document.matrix, scenario.budget.power)
    cov.check(scenario.agg.dim)
    return cov


class SweepSpec(BaseModel):
    """A scalar scenario field, the values it takes, and the report kinds per value."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    parameter: str = Field(..., description="Dotted path such as jammer.power or priors.pi0.")
    values: Tuple[float, ...] = Field(..., min_length=1)
    outputs: Tuple[str, ...] = Field(..., min_length=1)

    @field_validator("parameter")
    @classmethod
    def _dotted(cls, value: str) -> str:
        if not value or any(not part for part in value.split(".")):
            raise ValueError(f"malformed parameter path {value!r}.")
        return value


def set_parameter(data: Dict[str, Any], path: str, value: float) -> Dict[str, Any]:
    """Return a copy of the raw scenario document with the scalar at `path` replaced."""
    if not math.isfinite(value):
        raise InvalidSweep(f"sweep value {value} is not finite.")
    updated = copy.deepcopy(data)
    *parents, leaf = path.split(".")
    node = updated
    for key in parents:
        if not isinstance(node, dict):
            raise InvalidSweep(f"{path} does not resolve to a scalar field.")
        node = node.setdefault(key, {})
    if not isinstance(node, dict) or isinstance(node.get(leaf), (dict, list)):
        raise InvalidSweep(f"{path} does not resolve to a scalar field.")
    node[leaf] = value
    if path == "priors.pi0" and "pi1" in node:
        node["pi1"] = 1.0 - value
    return updated
