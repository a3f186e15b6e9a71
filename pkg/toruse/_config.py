#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""
Run configuration.

Values are looked up, lowest precedence first, in :data:`DEFAULTS`, the
environment, a TOML file and command line flags. Keys are the long flag
names with dashes turned into underscores (``dim``, ``lr``,
``data_dir``, ...).
"""

import toml
from decouple import config as env

from toruse._exception import InvalidArgumentError


# best WN18 configuration, ``score`` None resolves per model kind
DEFAULTS = {
	"model": "toruse",
	"score": None,
	"dim": 10000,
	"margin": 2000.0,
	"lr": 0.0005,
	"epochs": 500,
	"groups": 100,
	"seed": 0,
	"threads": 1,
	"data_dir": None,
	"log_level": "INFO",
	"filter_negatives": False,
	"parallel": False,
	"valid_every": 0,
}

# published search ranges
GRID = {
	"margins": [2000.0, 1000.0, 500.0, 200.0, 100.0],
	"lrs": [0.002, 0.001, 0.0005, 0.0002, 0.0001],
	"scores": ["l1", "l2", "el2"],
}

_SECTIONS = ("train", "eval", "bench", "sweep")

_TYPES = {
	"dim": int,
	"epochs": int,
	"groups": int,
	"seed": int,
	"threads": int,
	"valid_every": int,
	"margin": float,
	"lr": float,
	"filter_negatives": bool,
	"parallel": bool,
}


def load_config(path):
	""" Read a TOML configuration file.

	Top level keys and the keys of the optional ``[train]``, ``[eval]``,
	``[bench]`` and ``[sweep]`` tables are merged into one flat mapping;
	table keys win over top level ones.

	:type path: str
	:param path: Path of the TOML file.

	:rtype: dict

	:raises InvalidArgumentError: If the file is not valid TOML or a
		value has the wrong type.
	"""

	try:
		document = toml.load(path)
	except toml.TomlDecodeError as e:
		raise InvalidArgumentError("{0}: {1}".format(path, e))

	flat = {key.replace('-', '_'): value for key, value in document.items() if key not in _SECTIONS}

	for section in _SECTIONS:
		for key, value in document.get(section, {}).items():
			flat[key.replace('-', '_')] = value

	return _coerce(flat)


def env_defaults():
	""" Optional overrides from the environment or a ``.env`` file.

	``TORUSE_THREADS``, ``TORUSE_LOG_LEVEL`` and ``TORUSE_DATA_DIR``
	are read; none is required.

	:rtype: dict
	"""

	values = {
		"threads": env('TORUSE_THREADS', default=None, cast=_optional_int),
		"log_level": env('TORUSE_LOG_LEVEL', default=None),
		"data_dir": env('TORUSE_DATA_DIR', default=None),
	}

	return {key: value for key, value in values.items() if value is not None}


def _optional_int(value):
	if value is None:
		return None

	try:
		return int(value)
	except ValueError:
		raise InvalidArgumentError("TORUSE_THREADS must be an integer, got {0!r}".format(value))


def merge(*sources):
	""" Merge configuration mappings, later sources win.

	:data:`None` values never override, so unset command line flags
	fall through to the file, environment and defaults.

	:rtype: dict
	"""

	merged = {}

	for source in sources:
		for key, value in (source or {}).items():
			if value is not None:
				merged[key] = value

	return merged


def _coerce(values):
	coerced = dict(values)

	for key, kind in _TYPES.items():
		if key not in coerced:
			continue

		value = coerced[key]

		if kind is bool:
			if not isinstance(value, bool):
				raise InvalidArgumentError("{0} must be true or false".format(key))
			continue

		try:
			coerced[key] = kind(value)
		except (TypeError, ValueError):
			raise InvalidArgumentError("{0} must be {1}, got {2!r}".format(key, kind.__name__, value))

	return coerced
