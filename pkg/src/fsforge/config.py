"""Pipeline configuration and its INI-style file form."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, fields, replace

from .resampling import SYNTHETIC_ONLY, SmoteParams
from .wrapper import GaParams

METHODS = ("all_features", "info_gain", "ga_wrapper", "su_ga_wrapper", "hybrid")
USES_RANKING = {"info_gain", "su_ga_wrapper", "hybrid"}
USES_GA = {"ga_wrapper", "su_ga_wrapper", "hybrid"}
USES_SMOTE = {"hybrid"}
FORMATS = ("arff", "csv", "lung-cancer")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    data: str = ""
    format: str | None = None
    class_column: int | None = None
    all_nominal: bool = False
    seed: int = 1
    method: str = "hybrid"
    smote: SmoteParams = field(default_factory=SmoteParams)
    ig_threshold: float = 0.0
    ig_top_k: int | None = None
    ga: GaParams = field(default_factory=GaParams)
    outer_folds: int = 10
    wrapper_folds: int = 5
    filter_scope: str = SYNTHETIC_ONLY
    leak_free: bool = False
    evaluation: str = "cv"
    averaging: str = "macro"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; valid methods: {', '.join(METHODS)}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; expected one of {', '.join(FORMATS)}")
        if self.outer_folds < 2 or self.wrapper_folds < 2:
            raise ConfigError("fold counts must be at least 2")
        if self.evaluation not in ("cv", "resubstitution"):
            raise ConfigError("evaluation must be 'cv' or 'resubstitution'")
        if self.averaging not in ("macro", "micro"):
            raise ConfigError("averaging must be 'macro' or 'micro'")
        if self.filter_scope not in (SYNTHETIC_ONLY, "all"):
            raise ConfigError(f"unknown filter scope {self.filter_scope!r}")
        if self.ig_top_k is not None and self.ig_top_k < 1:
            raise ConfigError("ig_top_k must be >= 1")

    def with_method(self, method: str) -> "PipelineConfig":
        return replace(self, method=method)

    # -- file form ---------------------------------------------------------

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["data"] = {"path": self.data, "format": self.format or "",
                      "class_column": "" if self.class_column is None else str(self.class_column),
                      "all_nominal": str(self.all_nominal).lower()}
        cp["run"] = {"method": self.method, "seed": str(self.seed),
                     "outer_folds": str(self.outer_folds), "evaluation": self.evaluation,
                     "averaging": self.averaging, "leak_free": str(self.leak_free).lower()}
        if self.method in USES_SMOTE:
            cp["smote"] = {"k_neighbors": str(self.smote.k_neighbors),
                           "filter_scope": self.filter_scope}
        if self.method in USES_RANKING:
            cp["ranking"] = {"ig_threshold": repr(self.ig_threshold),
                             "ig_top_k": "" if self.ig_top_k is None else str(self.ig_top_k)}
        if self.method in USES_GA:
            g = self.ga
            cp["ga"] = {"population_size": str(g.population_size),
                        "max_generations": str(g.max_generations),
                        "crossover_probability": repr(g.crossover_probability),
                        "mutation_probability": repr(g.mutation_probability),
                        "elitism": str(g.elitism), "wrapper_folds": str(self.wrapper_folds)}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        return cls.from_mapping(flatten_text(text))

    @classmethod
    def from_mapping(cls, values: dict) -> "PipelineConfig":
        """Build from flat keys (``ga_pop``, ``seed``...); absent keys keep defaults."""
        base = cls()
        try:
            seed = int(values.get("seed", base.seed))
            # component seeds are derived from the run seed inside the pipeline
            smote = SmoteParams(k_neighbors=int(values.get("smote_k", base.smote.k_neighbors)))
            ga = GaParams(
                crossover_probability=float(values.get("ga_crossover", base.ga.crossover_probability)),
                max_generations=int(values.get("ga_gens", base.ga.max_generations)),
                mutation_probability=float(values.get("ga_mutation", base.ga.mutation_probability)),
                population_size=int(values.get("ga_pop", base.ga.population_size)),
                elitism=int(values.get("elitism", base.ga.elitism)))
            top_k = values.get("ig_top_k")
            class_col = values.get("class_column")
            return cls(
                data=str(values.get("data", base.data)),
                format=values.get("format") or None,
                class_column=None if class_col in (None, "") else int(class_col),
                all_nominal=_bool(values.get("all_nominal", base.all_nominal)),
                seed=seed,
                method=str(values.get("method", base.method)),
                smote=smote,
                ig_threshold=float(values.get("ig_threshold", base.ig_threshold)),
                ig_top_k=None if top_k in (None, "") else int(top_k),
                ga=ga,
                outer_folds=int(values.get("folds", base.outer_folds)),
                wrapper_folds=int(values.get("wrapper_folds", base.wrapper_folds)),
                filter_scope=str(values.get("filter_scope", base.filter_scope)),
                leak_free=_bool(values.get("leak_free", base.leak_free)),
                evaluation=str(values.get("evaluation", base.evaluation)),
                averaging=str(values.get("averaging", base.averaging)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    def to_mapping(self) -> dict:
        return flatten_text(self.to_text())


_FILE_KEYS = {
    ("data", "path"): "data", ("data", "format"): "format",
    ("data", "class_column"): "class_column", ("data", "all_nominal"): "all_nominal",
    ("run", "method"): "method", ("run", "seed"): "seed", ("run", "outer_folds"): "folds",
    ("run", "evaluation"): "evaluation", ("run", "averaging"): "averaging",
    ("run", "leak_free"): "leak_free",
    ("smote", "k_neighbors"): "smote_k", ("smote", "filter_scope"): "filter_scope",
    ("ranking", "ig_threshold"): "ig_threshold", ("ranking", "ig_top_k"): "ig_top_k",
    ("ga", "population_size"): "ga_pop", ("ga", "max_generations"): "ga_gens",
    ("ga", "crossover_probability"): "ga_crossover",
    ("ga", "mutation_probability"): "ga_mutation", ("ga", "elitism"): "elitism",
    ("ga", "wrapper_folds"): "wrapper_folds",
}


def flatten(cp: configparser.ConfigParser) -> dict:
    out = {}
    for section in cp.sections():
        for key, value in cp[section].items():
            flat = _FILE_KEYS.get((section, key))
            if flat is None:
                raise ConfigError(f"unknown config key [{section}] {key}")
            out[flat] = value
    return out


def flatten_text(text: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from None
    return flatten(cp)


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def config_fields() -> list[str]:
    return [f.name for f in fields(PipelineConfig)]
