#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import json
import datetime

from toruse.kg_data import SPLITS, split_paths, checksum
from toruse._exception import ConsistencyError, InvalidArgumentError


MANIFEST_NAME = 'manifest.json'


def _timestamp(moment):
	return moment.astimezone(datetime.timezone.utc).isoformat()


def dataset_checksums(data_dir):
	""" SHA-256 of the three split files of ``data_dir``.

	:rtype: dict
	"""

	paths = split_paths(data_dir)

	return {name: checksum(paths[name]) for name in SPLITS}


def build_manifest(config, data_dir, started, finished, artifacts, version):
	""" Everything needed to replay a training run.

	:type config: dict
	:param config: Fully resolved configuration.

	:type data_dir: str
	:param data_dir: Dataset directory.

	:type started: :class:`datetime.datetime`
	:param started: Start of the run.

	:type finished: :class:`datetime.datetime`
	:param finished: End of the run.

	:type artifacts: dict
	:param artifacts: Written files keyed by kind.

	:type version: str
	:param version: Package version.

	:rtype: dict
	"""

	return {
		"version": version,
		"config": dict(config),
		"seed": config["seed"],
		"data_dir": data_dir,
		"checksums": dataset_checksums(data_dir),
		"started": _timestamp(started),
		"finished": _timestamp(finished),
		"seconds": (finished - started).total_seconds(),
		"artifacts": dict(artifacts),
	}


def write_manifest(manifest, path):
	with open(path, 'w', encoding='utf-8') as stream:
		json.dump(manifest, stream, indent=2, sort_keys=True)
		stream.write("\n")


def read_manifest(path):
	""" Load a manifest written by :func:`write_manifest`.

	:rtype: dict
	"""

	with open(path, 'r', encoding='utf-8') as stream:
		try:
			return json.load(stream)
		except ValueError as e:
			raise InvalidArgumentError("{0}: not a manifest: {1}".format(path, e))


def check_replay(manifest, data_dir):
	""" Refuse to replay a manifest against different data.

	:raises ConsistencyError: If a split file changed since the run.
	"""

	recorded = manifest.get("checksums", {})
	current = dataset_checksums(data_dir)

	changed = [name for name in SPLITS if name in recorded and recorded[name] != current[name]]

	if changed:
		raise ConsistencyError("dataset differs from the manifest in: {0}".format(", ".join(changed)))
