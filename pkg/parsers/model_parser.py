"""
Model Parser - Reads JSON model files into transfer systems

A model file gives either explicit generators

    {"graph": {"vertices": ["a", "b"], "edges": [["a", "b"]]},
     "dimension": 2,
     "generators": {"a": {"N": 2, "F": [[1, 1], [1, 1]], "rank": 2}, ...},
     "traces": {"uniform": [0.5, 0.5]}}

or a builder directive such as {"builder": {"kind": "kgraph", ...}}.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from services.monoid_service import SimpleGraph, WeightMap
from services.transfer_service import (
    KGraphModel, LocalMapModel, TraceVec, TransferSystem, ensure_valid, example_optimal,
    from_kgraph, from_local_maps, trivial_system,
)
from utils.errors import KMSError, ModelFileError
from utils.logger import get_logger

logger = get_logger(__name__)

Number = Union[int, float]
Weights = Union[Annotated[float, Field(gt=0)], List[Annotated[float, Field(gt=0)]]]


class GraphSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertices: List[str] = Field(min_length=1)
    edges: List[List[str]] = Field(default_factory=list)


class GeneratorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N: float = Field(gt=0)
    F: List[List[Number]]
    rank: Optional[int] = Field(default=None, ge=1)


class KGraphBuilder(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["kgraph"]
    matrices: List[List[List[int]]] = Field(min_length=1)
    N: Weights


class LocalMapsBuilder(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["local_maps"]
    states: Optional[List[str]] = None
    maps: List[List[int]] = Field(min_length=1)
    N: Weights


class TrivialBuilder(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["trivial"]
    N: Weights


class ExampleOptimalBuilder(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["example_optimal"]
    n: int = Field(ge=2)
    I: List[int] = Field(min_length=1)
    alpha: float = Field(gt=2)


Builder = Annotated[
    Union[KGraphBuilder, LocalMapsBuilder, TrivialBuilder, ExampleOptimalBuilder],
    Field(discriminator="kind"),
]


class ModelFile(BaseModel):
    """Schema of a model file"""

    model_config = ConfigDict(extra="forbid")

    graph: Optional[GraphSpec] = None
    dimension: Optional[int] = Field(default=None, ge=1)
    generators: Optional[Dict[str, GeneratorSpec]] = None
    traces: Dict[str, List[float]] = Field(default_factory=dict)
    builder: Optional[Builder] = None
    label: Optional[str] = None

    @model_validator(mode="after")
    def check_source(self) -> "ModelFile":
        if (self.generators is None) == (self.builder is None):
            raise ValueError("exactly one of 'generators' and 'builder' is required")
        if self.generators is not None:
            if self.graph is None or self.dimension is None:
                raise ValueError("explicit generators need 'graph' and 'dimension'")
            if sorted(self.generators) != sorted(self.graph.vertices):
                raise ValueError(
                    f"generators {sorted(self.generators)} do not match vertices {sorted(self.graph.vertices)}"
                )
        if isinstance(self.builder, TrivialBuilder) and self.graph is None:
            raise ValueError("the trivial builder needs 'graph'")
        return self


@dataclass
class LoadedModel:
    """Validated system with its named traces"""

    system: TransferSystem
    traces: Dict[str, TraceVec] = field(default_factory=dict)
    source: str = "<string>"

    def trace(self, name: str) -> TraceVec:
        if name not in self.traces:
            raise ModelFileError(f"unknown trace {name!r}; available: {sorted(self.traces)}", "traces")
        return self.traces[name]


def _weights(N: Union[float, List[float]], count: int, location: str) -> WeightMap:
    values = [float(N)] * count if isinstance(N, (int, float)) else [float(x) for x in N]
    if len(values) != count:
        raise ModelFileError(f"expected {count} weights, got {len(values)}", location)
    return WeightMap(tuple(values))


def _graph(spec: GraphSpec) -> SimpleGraph:
    return SimpleGraph.from_names(spec.vertices, spec.edges)


def _explicit_system(model: ModelFile) -> TransferSystem:
    graph = _graph(model.graph)
    specs = [model.generators[name] for name in graph.vertices]
    for name, spec in zip(graph.vertices, specs):
        rows = len(spec.F)
        if rows != model.dimension or any(len(row) != model.dimension for row in spec.F):
            raise ModelFileError(
                f"F must be {model.dimension} x {model.dimension}", f"generators.{name}.F"
            )
    ranks = [spec.rank for spec in specs]
    rank_hint = ranks if all(r is not None for r in ranks) else None
    return TransferSystem.build(
        graph,
        [spec.F for spec in specs],
        WeightMap(tuple(spec.N for spec in specs)),
        rank_hint,
        label=model.label or "custom",
    )


def _built_system(model: ModelFile) -> tuple:
    builder = model.builder
    extra: Dict[str, TraceVec] = {}
    if isinstance(builder, KGraphBuilder):
        kgraph = KGraphModel.of(builder.matrices)
        system = from_kgraph(kgraph, _weights(builder.N, kgraph.rank, "builder.N"))
    elif isinstance(builder, LocalMapsBuilder):
        size = len(builder.maps[0])
        states = builder.states or [str(z) for z in range(size)]
        local = LocalMapModel.of(states, builder.maps)
        system = from_local_maps(local, _weights(builder.N, len(local.maps), "builder.N"))
    elif isinstance(builder, TrivialBuilder):
        graph = _graph(model.graph)
        system = trivial_system(graph, _weights(builder.N, graph.size, "builder.N"))
    else:
        system, mu = example_optimal(builder.n, builder.I, builder.alpha)
        extra["mu"] = mu
    return system, extra


def _location(error: dict) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "<root>"


def parse_model(text: str, source: str = "<string>") -> LoadedModel:
    """
    Parse and validate a model document

    Raises:
        ModelFileError: with "line L, column C" for malformed JSON and a
            dotted path for schema or model violations
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(e.msg, f"{source}: line {e.lineno}, column {e.colno}")

    try:
        model = ModelFile.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        raise ModelFileError(
            f"{first['msg']} ({e.error_count()} error(s))", f"{source}: {_location(first)}"
        )

    try:
        if model.generators is not None:
            system, traces = _explicit_system(model), {}
        else:
            system, traces = _built_system(model)
        ensure_valid(system)
    except ModelFileError as e:
        raise ModelFileError(str(e.args[0]), source)
    except KMSError as e:
        raise ModelFileError(str(e), f"{source}: {'generators' if model.generators else 'builder'}")

    for name, values in model.traces.items():
        if len(values) != system.dim:
            raise ModelFileError(
                f"trace has {len(values)} entries, system dimension is {system.dim}",
                f"{source}: traces.{name}",
            )
        try:
            traces[name] = TraceVec.of(values)
        except KMSError as e:
            raise ModelFileError(str(e), f"{source}: traces.{name}")

    logger.info("Loaded %s model from %s (%d generators, dimension %d)",
                system.label, source, system.graph.size, system.dim)
    return LoadedModel(system, traces, source)


def load_model(path: Union[str, Path]) -> LoadedModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFileError(f"cannot read model file: {e.strerror}", str(path))
    return parse_model(text, str(path))
