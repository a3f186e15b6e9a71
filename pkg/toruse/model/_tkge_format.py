#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import json
import struct
from collections import namedtuple

import numpy as np

from toruse._exception import ModelFormatError


MAGIC = b'TKGE'
VERSION = 1

# magic, version, model kind, score kind, n, |E|, |R|
_HEADER = struct.Struct('<4sHBBIII')

_MODEL_CODES = {'toruse': 0, 'transe': 1}
_SCORE_CODES = {'l1': 0, 'l2': 1, 'el2': 2, 'l2sq': 3}

_BODY_DTYPE = np.dtype('<f8')


TKGEHeader = namedtuple('TKGEHeader', ['version', 'model', 'score', 'dimension', 'num_entities', 'num_relations'])


def _code_of(codes, name, what):
	try:
		return codes[name]
	except KeyError:
		raise ModelFormatError("no {0} code for {1!r}".format(what, name))


def _name_of(codes, code, what):
	for name, value in codes.items():
		if value == code:
			return name

	raise ModelFormatError("unknown {0} code {1}".format(what, code))


def convert_to_tkge(model):
	""" Serializes a model to the TKGE binary layout.

	The header is the magic ``TKGE``, the format version (u16), model
	kind and score kind (u8 each), then ``n``, ``|E|`` and ``|R|``
	(u32 each), all little endian; the entity table then the relation
	table follow as row-major little endian float64.

	:type model: EmbeddingModel
	:param model: Model to serialize.

	:rtype: bytes
	"""

	header = _HEADER.pack(
		MAGIC,
		VERSION,
		_code_of(_MODEL_CODES, model.kind.value, "model"),
		_code_of(_SCORE_CODES, model.score_kind.value, "score"),
		model.dimension,
		model.num_entities,
		model.num_relations,
	)

	return b''.join([
		header,
		np.ascontiguousarray(model.entities, dtype=_BODY_DTYPE).tobytes(),
		np.ascontiguousarray(model.relations, dtype=_BODY_DTYPE).tobytes(),
	])


def read_header(data):
	""" Parses the header of a TKGE document.

	:type data: bytes
	:param data: At least the first 20 bytes of the document.

	:rtype: TKGEHeader

	:raises ModelFormatError: For a short header, a wrong magic or an
		unsupported version.
	"""

	if len(data) < _HEADER.size:
		raise ModelFormatError("truncated TKGE header")

	magic, version, model_code, score_code, dimension, num_entities, num_relations = _HEADER.unpack_from(data)

	if magic != MAGIC:
		raise ModelFormatError("bad magic bytes {0!r}".format(magic))

	if version != VERSION:
		raise ModelFormatError("unsupported TKGE version {0}".format(version))

	return TKGEHeader(
		version,
		_name_of(_MODEL_CODES, model_code, "model"),
		_name_of(_SCORE_CODES, score_code, "score"),
		dimension,
		num_entities,
		num_relations,
	)


def convert_from_tkge(data):
	""" Rebuilds a model from a TKGE document.

	:type data: bytes
	:param data: Output of :func:`convert_to_tkge`.

	:rtype: EmbeddingModel

	:raises ModelFormatError: For malformed documents.
	"""

	from toruse.model import EmbeddingModel

	header = read_header(data)
	n = header.dimension

	expected = _HEADER.size + _BODY_DTYPE.itemsize * n * (header.num_entities + header.num_relations)

	if len(data) != expected:
		raise ModelFormatError("TKGE body holds {0} bytes, expected {1}".format(len(data), expected))

	body = np.frombuffer(data, dtype=_BODY_DTYPE, offset=_HEADER.size)
	split = header.num_entities * n

	entities = body[:split].reshape(header.num_entities, n).astype(np.float64)
	relations = body[split:].reshape(header.num_relations, n).astype(np.float64)

	try:
		return EmbeddingModel(header.model, header.score, entities, relations)
	except ValueError as e:
		raise ModelFormatError(str(e))


def save_model(model, path):
	""" Write ``model`` to ``path`` in the TKGE format. """

	with open(path, 'wb') as stream:
		stream.write(convert_to_tkge(model))


def load_model(path):
	""" Read a TKGE model file.

	:rtype: EmbeddingModel
	"""

	with open(path, 'rb') as stream:
		return convert_from_tkge(stream.read())


def write_vocabulary(vocabulary, path):
	""" Write the companion vocabulary: UTF-8 JSON with ordered
	``entities`` and ``relations`` name arrays.
	"""

	with open(path, 'w', encoding='utf-8') as stream:
		json.dump(vocabulary.to_dict(), stream, ensure_ascii=False)


def read_vocabulary(path):
	""" Read a companion vocabulary file.

	:rtype: Vocabulary
	"""

	from toruse.kg_data import Vocabulary

	with open(path, 'r', encoding='utf-8') as stream:
		return Vocabulary.from_dict(json.load(stream))
