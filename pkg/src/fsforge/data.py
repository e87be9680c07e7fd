"""Dataset representation, ARFF/CSV ingestion, imputation and fold plans.

Cells are stored in a float matrix: nominal attributes hold the index of the
value in the attribute's domain, numeric attributes hold the value itself, and
missing cells are NaN.  Datasets are treated as immutable; every transform
returns a new object.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

NOMINAL = "nominal"
NUMERIC = "numeric"
ORIGINAL = "original"
SYNTHETIC = "synthetic"


class DataError(ValueError):
    """Raised for malformed input data or violated dataset preconditions."""


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str = NOMINAL
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (NOMINAL, NUMERIC):
            raise DataError(f"unknown attribute kind {self.kind!r}")
        if self.kind == NOMINAL:
            if not self.values:
                raise DataError(f"nominal attribute {self.name!r} has an empty domain")
            if len(set(self.values)) != len(self.values):
                raise DataError(f"nominal attribute {self.name!r} has duplicate values")
        elif self.values:
            raise DataError(f"numeric attribute {self.name!r} cannot carry a value domain")

    @property
    def is_nominal(self) -> bool:
        return self.kind == NOMINAL


@dataclass(frozen=True)
class Instance:
    values: tuple
    label: str
    origin: str = ORIGINAL


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of instances.

    ``X`` is (n, m) float with NaN for missing cells, ``y`` holds class
    indices into ``class_domain`` and ``synthetic`` flags instances created by
    oversampling.
    """

    schema: tuple[AttributeSpec, ...]
    class_domain: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    synthetic: np.ndarray = None
    relation: str = "data"
    class_name: str = "class"

    def __post_init__(self):
        X = np.array(self.X, dtype=float, copy=True).reshape(len(self.y), len(self.schema))
        y = np.array(self.y, dtype=np.int64, copy=True)
        syn = (np.zeros(len(y), dtype=bool) if self.synthetic is None
               else np.array(self.synthetic, dtype=bool, copy=True))
        if len(self.class_domain) < 2:
            raise DataError("class domain needs at least two symbols")
        if len(set(self.class_domain)) != len(self.class_domain):
            raise DataError("class domain has duplicate symbols")
        names = [a.name for a in self.schema]
        if len(set(names)) != len(names):
            raise DataError("attribute names must be unique")
        if len(y) and (y.min() < 0 or y.max() >= len(self.class_domain)):
            raise DataError("label outside the class domain")
        if syn.shape != y.shape:
            raise DataError("origin flags do not match instance count")
        for j, attr in enumerate(self.schema):
            if attr.is_nominal:
                col = X[:, j]
                present = col[~np.isnan(col)]
                if present.size and (np.any(present < 0) or np.any(present >= len(attr.values))
                                     or np.any(present != np.round(present))):
                    raise DataError(f"nominal index out of range for {attr.name!r}")
        for arr in (X, y, syn):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "synthetic", syn)

    def __len__(self) -> int:
        return len(self.y)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.schema == other.schema
                and self.class_domain == other.class_domain
                and np.array_equal(self.X, other.X, equal_nan=True)
                and np.array_equal(self.y, other.y)
                and np.array_equal(self.synthetic, other.synthetic))

    __hash__ = None

    @property
    def n_features(self) -> int:
        return len(self.schema)

    @property
    def n_classes(self) -> int:
        return len(self.class_domain)

    @property
    def feature_names(self) -> list[str]:
        return [a.name for a in self.schema]

    @property
    def all_nominal(self) -> bool:
        return all(a.is_nominal for a in self.schema)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def class_count_map(self) -> dict[str, int]:
        return dict(zip(self.class_domain, self.class_counts().tolist()))

    def has_missing(self) -> bool:
        return bool(np.isnan(self.X).any())

    def instance(self, i: int) -> Instance:
        cells = []
        for j, attr in enumerate(self.schema):
            v = self.X[i, j]
            if np.isnan(v):
                cells.append(None)
            elif attr.is_nominal:
                cells.append(int(v))
            else:
                cells.append(float(v))
        return Instance(tuple(cells), self.class_domain[self.y[i]],
                        SYNTHETIC if self.synthetic[i] else ORIGINAL)

    @property
    def instances(self) -> list[Instance]:
        return [self.instance(i) for i in range(len(self))]

    def replace(self, **changes) -> "Dataset":
        fields = dict(schema=self.schema, class_domain=self.class_domain, X=self.X,
                      y=self.y, synthetic=self.synthetic, relation=self.relation,
                      class_name=self.class_name)
        fields.update(changes)
        return Dataset(**fields)

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return self.replace(X=self.X[rows], y=self.y[rows], synthetic=self.synthetic[rows])

    def select_features(self, columns: Sequence[int]) -> "Dataset":
        """Projection onto a feature subset, in the given column order."""
        columns = [int(c) for c in columns]
        return self.replace(schema=tuple(self.schema[c] for c in columns),
                            X=self.X[:, columns])

    def concat(self, other: "Dataset") -> "Dataset":
        if other.schema != self.schema or other.class_domain != self.class_domain:
            raise DataError("cannot concatenate datasets with different schemas")
        return self.replace(X=np.vstack([self.X, other.X]),
                            y=np.concatenate([self.y, other.y]),
                            synthetic=np.concatenate([self.synthetic, other.synthetic]))

    @classmethod
    def from_instances(cls, schema, class_domain, instances: Iterable[Instance], **kw) -> "Dataset":
        instances = list(instances)
        X = np.array([[np.nan if v is None else v for v in inst.values] for inst in instances],
                     dtype=float).reshape(len(instances), len(schema))
        index = {c: k for k, c in enumerate(class_domain)}
        try:
            y = [index[inst.label] for inst in instances]
        except KeyError as exc:
            raise DataError(f"label {exc.args[0]!r} not in class domain") from None
        syn = [inst.origin == SYNTHETIC for inst in instances]
        return cls(tuple(schema), tuple(class_domain), X, y, syn, **kw)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        a = np.array(self.assignments, dtype=np.int64, copy=True)
        if a.size and (a.min() < 0 or a.max() >= self.k):
            raise DataError("fold index outside [0, k)")
        a.setflags(write=False)
        object.__setattr__(self, "assignments", a)

    def __len__(self) -> int:
        return len(self.assignments)

    def splits(self):
        """Yield (train_rows, test_rows) per fold; empty folds are skipped."""
        for f in range(self.k):
            test = np.flatnonzero(self.assignments == f)
            if test.size == 0:
                continue
            yield np.flatnonzero(self.assignments != f), test

    def describe(self) -> dict:
        return {"k": self.k, "seed": int(self.seed), "n": len(self)}


# ---------------------------------------------------------------------------
# ARFF

_ARFF_ATTR = re.compile(r"@attribute\s+('(?:[^'\\]|\\.)*'|\"(?:[^\"\\]|\\.)*\"|\S+)\s+(.*)$",
                        re.IGNORECASE)


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1].replace("\\" + token[0], token[0])
    return token


def _split_row(text: str) -> list[str]:
    return next(csv.reader([text], quotechar="'", skipinitialspace=True))


def _to_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data


def load_arff(source: IO | bytes | str, class_index: int = -1) -> Dataset:
    """Parse an ARFF document.  ``class_index`` selects the class attribute
    (last by default)."""
    text = _to_text(source)
    relation = "data"
    attrs: list[tuple[str, str, tuple[str, ...]]] = []
    rows: list[tuple[int, list[str]]] = []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            if line.startswith("{"):
                raise ParseError("sparse ARFF rows are not supported", lineno)
            rows.append((lineno, [c.strip() for c in _split_row(line)]))
            continue
        low = line.lower()
        if low.startswith("@relation"):
            relation = _unquote(line[len("@relation"):].strip()) or "data"
        elif low.startswith("@attribute"):
            m = _ARFF_ATTR.match(line)
            if not m:
                raise ParseError(f"malformed attribute declaration: {line!r}", lineno)
            name, decl = _unquote(m.group(1)), m.group(2).strip()
            if decl.startswith("{"):
                if not decl.endswith("}"):
                    raise ParseError("unterminated nominal domain", lineno)
                body = decl[1:-1].strip()
                values = tuple(_unquote(v) for v in _split_row(body)) if body else ()
                if not values:
                    raise ParseError(f"empty nominal domain for {name!r}", lineno)
                attrs.append((name, NOMINAL, values))
            elif decl.lower() in ("numeric", "real", "integer"):
                attrs.append((name, NUMERIC, ()))
            else:
                raise ParseError(f"unsupported attribute type {decl!r}", lineno)
        elif low.startswith("@data"):
            in_data = True
        else:
            raise ParseError(f"unexpected header line {line!r}", lineno)
    if not in_data:
        raise ParseError("missing @data section")
    if len(attrs) < 2:
        raise ParseError("need at least one predictive attribute and a class")
    ci = class_index % len(attrs)
    cname, ckind, cvalues = attrs[ci]
    if ckind != NOMINAL:
        raise ParseError(f"class attribute {cname!r} must be nominal")
    pred = [a for k, a in enumerate(attrs) if k != ci]
    try:
        schema = tuple(AttributeSpec(n, kd, v) for n, kd, v in pred)
    except DataError as exc:
        raise ParseError(str(exc)) from None
    lookups = [{v: k for k, v in enumerate(a.values)} for a in schema]
    class_lookup = {v: k for k, v in enumerate(cvalues)}
    X = np.empty((len(rows), len(schema)))
    y = np.empty(len(rows), dtype=np.int64)
    for r, (lineno, cells) in enumerate(rows):
        if len(cells) != len(attrs):
            raise ParseError(f"expected {len(attrs)} values, got {len(cells)}", lineno)
        label = _unquote(cells[ci])
        if label not in class_lookup:
            raise ParseError(f"unknown class symbol {label!r}", lineno)
        y[r] = class_lookup[label]
        pcells = cells[:ci] + cells[ci + 1:]
        for j, (attr, cell) in enumerate(zip(schema, pcells)):
            X[r, j] = _parse_cell(attr, lookups[j], _unquote(cell), lineno)
    try:
        return Dataset(schema, tuple(cvalues), X, y, relation=relation, class_name=cname)
    except DataError as exc:
        raise ParseError(str(exc)) from None


def _parse_cell(attr: AttributeSpec, lookup: dict, cell: str, lineno: int) -> float:
    if cell == "?":
        return np.nan
    if attr.is_nominal:
        if cell not in lookup:
            raise ParseError(f"unknown nominal symbol {cell!r} for {attr.name!r}", lineno)
        return float(lookup[cell])
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"non-numeric value {cell!r} for {attr.name!r}", lineno) from None


def _quote(symbol: str) -> str:
    if symbol == "" or re.search(r"[\s,{}'\"%]", symbol) or symbol == "?":
        return "'" + symbol.replace("'", "\\'") + "'"
    return symbol


def dump_arff(d: Dataset) -> str:
    """Serialize to ARFF with the class as the last attribute."""
    out = io.StringIO()
    out.write(f"@relation {_quote(d.relation)}\n\n")
    for attr in d.schema:
        if attr.is_nominal:
            out.write(f"@attribute {_quote(attr.name)} {{{','.join(_quote(v) for v in attr.values)}}}\n")
        else:
            out.write(f"@attribute {_quote(attr.name)} numeric\n")
    out.write(f"@attribute {_quote(d.class_name)} {{{','.join(_quote(c) for c in d.class_domain)}}}\n")
    out.write("\n@data\n")
    for i in range(len(d)):
        cells = []
        for j, attr in enumerate(d.schema):
            v = d.X[i, j]
            if np.isnan(v):
                cells.append("?")
            elif attr.is_nominal:
                cells.append(_quote(attr.values[int(v)]))
            else:
                cells.append(repr(float(v)))
        cells.append(_quote(d.class_domain[d.y[i]]))
        out.write(",".join(cells) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# CSV


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(source: IO | bytes | str, class_column: int = -1,
             declared_kinds: Sequence[str | None] | None = None,
             header: bool | None = None, missing: str = "?") -> Dataset:
    """Load a rectangular CSV.

    Undeclared columns are numeric when every non-missing cell parses as a
    number, otherwise nominal with values in first-appearance order.  Class
    symbols are always nominal.  ``header=None`` sniffs: the first row is a
    header when some cell of it is non-numeric while the column below is
    numeric, or when ``declared_kinds`` is absent and every first-row cell is
    distinct non-numeric text that never reappears in its column.
    """
    text = _to_text(source)
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty CSV document")
    width = len(rows[0])
    for k, r in enumerate(rows, start=1):
        if len(r) != width:
            raise ParseError(f"ragged row: expected {width} cells, got {len(r)}", k)
    rows = [[c.strip() for c in r] for r in rows]
    if header is None:
        header = _sniff_header(rows)
    names = rows[0] if header else [f"a{j}" for j in range(width)]
    body = rows[1:] if header else rows
    if not body:
        raise ParseError("CSV has no data rows")
    if width < 2:
        raise ParseError("need at least one predictive column and a class column")
    ci = class_column % width
    if declared_kinds is not None and len(declared_kinds) != width:
        raise ParseError("declared_kinds must give one entry per column")

    def is_missing(c: str) -> bool:
        return c == missing or c == ""

    schema, columns = [], []
    for j in range(width):
        if j == ci:
            continue
        cells = [r[j] for r in body]
        kind = declared_kinds[j] if declared_kinds is not None else None
        if kind is None:
            present = [c for c in cells if not is_missing(c)]
            kind = NUMERIC if present and all(_is_number(c) for c in present) else NOMINAL
        if kind == NUMERIC:
            col = []
            for k, c in enumerate(cells):
                if is_missing(c):
                    col.append(np.nan)
                elif _is_number(c):
                    col.append(float(c))
                else:
                    raise ParseError(f"non-numeric value {c!r} in numeric column {names[j]!r}",
                                     k + 1 + int(header))
            schema.append(AttributeSpec(names[j], NUMERIC))
        else:
            domain = list(dict.fromkeys(c for c in cells if not is_missing(c))) or ["?"]
            lookup = {v: k for k, v in enumerate(domain)}
            col = [np.nan if is_missing(c) else float(lookup[c]) for c in cells]
            schema.append(AttributeSpec(names[j], NOMINAL, tuple(domain)))
        columns.append(col)
    labels = [r[ci] for r in body]
    if any(is_missing(c) for c in labels):
        raise ParseError("missing class label")
    class_domain = tuple(dict.fromkeys(labels))
    if len(class_domain) < 2:
        # keep a well-formed domain even for degenerate files
        raise ParseError("class column needs at least two distinct symbols")
    lookup = {c: k for k, c in enumerate(class_domain)}
    X = np.array(columns, dtype=float).T.reshape(len(body), len(schema))
    return Dataset(tuple(schema), class_domain, X, [lookup[c] for c in labels],
                   class_name=names[ci])


def _sniff_header(rows: list[list[str]]) -> bool:
    if len(rows) < 2:
        return False
    first, rest = rows[0], rows[1:]
    for j, cell in enumerate(first):
        below = [r[j] for r in rest if r[j] not in ("?", "")]
        if not _is_number(cell) and below and all(_is_number(c) for c in below):
            return True
    return False


def load_path(path: str, fmt: str | None = None, class_column: int | None = None,
              all_nominal: bool = False) -> Dataset:
    """Load ARFF or CSV from disk.  ``.data`` files are read as header-less CSV."""
    fmt = fmt or ("arff" if str(path).lower().endswith(".arff") else "csv")
    with open(path, "rb") as fh:
        raw = fh.read()
    if fmt == "arff":
        return load_arff(raw, -1 if class_column is None else class_column)
    if fmt != "csv":
        raise DataError(f"unknown format {fmt!r}")
    header = False if str(path).lower().endswith(".data") else None
    width = len(next(csv.reader(io.StringIO(raw.decode("utf-8")))))
    kinds = [NOMINAL] * width if all_nominal else None
    return load_csv(raw, -1 if class_column is None else class_column, kinds, header=header)


def load_lung_cancer(path: str) -> Dataset:
    """UCI Lung-Cancer layout: header-less CSV, class in column 0, every
    attribute an integer-coded category."""
    d = load_path(path, fmt="csv", class_column=0, all_nominal=True)
    d = _sort_nominal_domains(d, extra=LUNG_CANCER_CODES)
    return d.replace(relation="lung-cancer",
                     schema=tuple(AttributeSpec(f"A{j + 1}", a.kind, a.values)
                                  for j, a in enumerate(d.schema)))


LUNG_CANCER_CODES = ("0", "1", "2", "3")


def _sort_nominal_domains(d: Dataset, extra: tuple[str, ...] = ()) -> Dataset:
    """Reorder nominal domains (and class domain) into natural sort order,
    widening attribute domains with ``extra`` symbols."""

    def key(v: str):
        return (0, float(v), v) if _is_number(v) else (1, 0.0, v)

    X = d.X.copy()
    schema = []
    for j, attr in enumerate(d.schema):
        if not attr.is_nominal:
            schema.append(attr)
            continue
        order = sorted(set(attr.values) | set(extra), key=key)
        remap = np.array([order.index(v) for v in attr.values], dtype=float)
        col = X[:, j]
        ok = ~np.isnan(col)
        col[ok] = remap[col[ok].astype(int)]
        schema.append(AttributeSpec(attr.name, NOMINAL, tuple(order)))
    classes = sorted(d.class_domain, key=key)
    cremap = np.array([classes.index(c) for c in d.class_domain])
    return d.replace(schema=tuple(schema), class_domain=tuple(classes), X=X, y=cremap[d.y])


# ---------------------------------------------------------------------------
# preprocessing


def impute_missing(d: Dataset) -> Dataset:
    """Replace missing cells by the per-class mode (nominal) or mean (numeric).

    Mode ties go to the lowest domain index.  When a class has no observed
    value for an attribute the global mode/mean is used instead.
    """
    if not d.has_missing():
        return d
    X = d.X.copy()
    for j, attr in enumerate(d.schema):
        col = d.X[:, j]
        miss = np.isnan(col)
        if not miss.any():
            continue
        observed = col[~miss]
        if observed.size == 0:
            raise DataError(f"attribute {attr.name!r} has no observed values")
        global_fill = _fill_value(attr, observed)
        for c in range(d.n_classes):
            rows = d.y == c
            target = rows & miss
            if not target.any():
                continue
            seen = col[rows & ~miss]
            X[target, j] = _fill_value(attr, seen) if seen.size else global_fill
    return d.replace(X=X)


def _fill_value(attr: AttributeSpec, observed: np.ndarray) -> float:
    if attr.is_nominal:
        counts = np.bincount(observed.astype(int), minlength=len(attr.values))
        return float(np.argmax(counts))
    return float(observed.mean())


def stratified_folds(d: Dataset, k: int, seed: int = 0) -> FoldPlan:
    """Stratified fold assignment.

    Instances of each class are shuffled and dealt round-robin; the dealing
    position carries over between classes so fold sizes stay balanced too.
    """
    if k < 2:
        raise DataError("fold count must be at least 2")
    if k > len(d):
        raise DataError(f"fold count {k} exceeds instance count {len(d)}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), 0x5F01D]))
    assignments = np.empty(len(d), dtype=np.int64)
    offset = 0
    for c in range(d.n_classes):
        members = np.flatnonzero(d.y == c)
        members = members[rng.permutation(members.size)]
        assignments[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    return FoldPlan(k, assignments, seed)
