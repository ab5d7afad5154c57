"""
Various wrenchkit utilities: sample dataset loading, JSON configuration
parsing with line-aware diagnostics, random state handling and fixed
precision CSV output.
"""
import json
import os.path
import re
import numpy as np
import pandas as pd
from numpy.random import RandomState


# Float format shared by every CSV written by wrenchkit.
CSV_FLOAT_FORMAT = "%.17g"

_REQUIRED = object()



class ConfigError(ValueError):
    """
    Raised for malformed design, task and experiment files. The message
    names the offending field and, when it can be located, the line.
    """
    def __init__(self, message, field=None, line=None, source=None):
        self.field = field
        self.line = line
        self.source = source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append("line {}".format(line))
        if field is not None:
            where.append("field `{}`".format(field))
        prefix = "{}: ".format(", ".join(where)) if where else ""
        super().__init__("{}{}".format(prefix, message))



class Config:
    """
    Parsed JSON configuration that remembers its source text, so field
    lookups can report the line on which a bad value appears.
    """
    def __init__(self, data, text="", source=None, prefix=""):
        self.data = data
        self.text = text
        self.source = source
        self.prefix = prefix


    @classmethod
    def read(cls, path):
        """
        Parse the JSON file at ``path``.

        Parameters
        ----------
        path: str

        Returns
        -------
        Config
        """
        if not os.path.isfile(path):
            raise ConfigError("file does not exist.", source=path)
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        return(cls.parse(text, source=path))


    @classmethod
    def parse(cls, text, source=None):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, line=exc.lineno, source=source) from exc
        if not isinstance(data, dict):
            raise ConfigError("top level must be an object.", line=1, source=source)
        return(cls(data, text=text, source=source))


    def locate(self, key, value=_REQUIRED):
        """
        Return the 1-based line on which ``key`` appears in the source text,
        or None. When ``value`` is a scalar the line holding that exact
        key-value pair is preferred.
        """
        match = None
        if isinstance(value, (str, int, float, bool)):
            pattern = r'"{}"\s*:\s*{}'.format(re.escape(key), re.escape(json.dumps(value)))
            match = re.search(pattern, self.text)
        if match is None:
            match = re.search(r'"{}"\s*:'.format(re.escape(key)), self.text)
        if match is None:
            return(None)
        return(self.text.count("\n", 0, match.start()) + 1)


    def error(self, key, message):
        field = "{}{}".format(self.prefix, key)
        line = self.locate(key, self.data.get(key, _REQUIRED))
        return(ConfigError(message, field=field, line=line, source=self.source))


    def __contains__(self, key):
        return(key in self.data)


    def get(self, key, kind=None, default=_REQUIRED):
        """
        Fetch ``key``, coercing it with ``kind``.

        Parameters
        ----------
        key: str

        kind: callable
            Conversion applied to the raw value, e.g. ``float`` or
            ``vector(3)``. Conversion failures become ``ConfigError``.

        default: object
            Returned when ``key`` is absent. If omitted the key is required.

        Returns
        -------
        object
        """
        if key not in self.data:
            if default is _REQUIRED:
                raise ConfigError(
                    "required field is missing.", field="{}{}".format(self.prefix, key),
                    source=self.source,
                    )
            return(default)
        value = self.data[key]
        if kind is None:
            return(value)
        try:
            return(kind(value))
        except (TypeError, ValueError) as exc:
            raise self.error(key, "invalid value {!r} ({}).".format(value, exc)) from exc


    def child(self, key, index=None):
        """
        Nested ``Config`` for an object-valued field or list element.
        """
        value = self.data[key] if index is None else self.data[key][index]
        label = key if index is None else "{}[{}]".format(key, index)
        if not isinstance(value, dict):
            raise self.error(key, "expected an object for `{}`.".format(label))
        return(Config(value, text=self.text, source=self.source,
                      prefix="{}{}.".format(self.prefix, label)))


    def children(self, key):
        value = self.get(key)
        if not isinstance(value, list):
            raise self.error(key, "expected a list.")
        return([self.child(key, ii) for ii in range(len(value))])


    def resolve_path(self, path):
        """
        Interpret ``path`` relative to the configuration file's directory.
        """
        if os.path.isabs(path) or self.source is None:
            return(path)
        return(os.path.join(os.path.dirname(os.path.abspath(self.source)), path))



def vector(size=None):
    """
    Build a converter that turns a list of numbers into a float ndarray,
    optionally checking its length.
    """
    def _convert(value):
        arr = np.asarray(value, dtype=float)
        if arr.ndim!=1:
            raise ValueError("expected a flat list of numbers")
        if size is not None and arr.size!=size:
            raise ValueError("expected {} entries, got {}".format(size, arr.size))
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        return(arr)
    return(_convert)



def positive(kind=float):
    def _convert(value):
        value = kind(value)
        if not value > 0:
            raise ValueError("must be positive")
        return(value)
    return(_convert)



def check_random_state(random_state=None):
    """
    Turn ``random_state`` into a ``RandomState`` instance.

    Parameters
    ----------
    random_state: int, np.random.RandomState or None
        If int, random_state is the seed used by the random number
        generator; If RandomState instance, random_state is the random
        number generator; If None, a freshly seeded RandomState is used.

    Returns
    -------
    np.random.RandomState
    """
    if random_state is None:
        return(RandomState())
    elif isinstance(random_state, RandomState):
        return(random_state)
    elif isinstance(random_state, (int, np.integer)):
        return(RandomState(int(random_state)))
    raise TypeError("`random_state` must be an int or RandomState instance.")



def write_csv(df, path, index=False):
    """
    Write ``df`` to ``path`` with 17 significant digits so reruns reproduce
    files byte-for-byte.
    """
    df.to_csv(path, index=index, float_format=CSV_FLOAT_FORMAT, encoding="utf-8",
              lineterminator="\n")



def _load(dataset, dataref=None):
    """
    Load the specified sample dataset. Design presets are returned as
    ``ArmDesign`` instances, characterization grids as ``ForceGrid``
    instances, shape plans as ``ShapePlanSpec`` and experiment files as
    ``ExperimentSpec`` instances.

    Parameters
    ----------
    dataset: str
        Specifies which sample dataset to load. The complete set of sample
        datasets can be obtained by calling ``get_datasets``.

    dataref: dict
        Mapping of dataset name to location.

    Returns
    -------
    ArmDesign, ForceGrid, ShapePlanSpec or ExperimentSpec
    """
    dataset_ = dataset.lower()
    if dataset_ not in dataref:
        raise ValueError("Specified dataset does not exist: `{}`".format(dataset))

    datapath = dataref[dataset_]
    if datapath.endswith(".csv"):
        from .actuators import ForceGrid
        return(ForceGrid.from_csv(datapath))

    cfg = Config.read(datapath)
    if "actuators" in cfg:
        from .arm import todesign
        return(todesign(datapath))
    if "candidates" in cfg:
        from .harness import read_shape_plan
        return(read_shape_plan(datapath))
    from .harness import ExperimentSpec
    return(ExperimentSpec.read(datapath))



def _get_datasets(dataref):
    """
    Generate a list containing the names of available sample datasets.

    Parameters
    ----------
    dataref: dict
        Location of dataset reference.

    Returns
    -------
    list
        Names of available sample datasets.
    """
    return(list(dataref.keys()))
