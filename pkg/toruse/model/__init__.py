#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""
Embedding tables and scoring for TorusE and the TransE baseline.

TorusE places entities and relations on the torus and scores a triple
by how far ``[h] + [r]`` is from ``[t]``; it needs no regularization.
TransE works in ``R^n`` and rescales every entity onto the unit sphere
after each update, the constraint TorusE removes.

Scoring reads the tables only and is safe from many threads; updates
and normalization need exclusive access.
"""

import enum

import numpy as np

from toruse import torus_math
from toruse.kg_data import Triple
from toruse.torus_math import ScoreKind
from toruse._exception import InvalidArgumentError, InvalidStateError
from ._tkge_format import save_model, load_model, read_header, write_vocabulary, read_vocabulary


# rows per chunk when scoring every replacement, bounds the scratch memory
_CHUNK_ELEMENTS = 1 << 22


class ModelKind(str, enum.Enum):
	TORUSE = 'toruse'
	TRANSE = 'transe'

	@classmethod
	def parse(cls, value):
		if isinstance(value, cls):
			return value

		try:
			return cls(str(value).lower())
		except ValueError:
			raise InvalidArgumentError("unknown model kind: {0!r}".format(value))


class TransEScore(str, enum.Enum):
	""" TransE dissimilarities: ``||h + r - t||_1`` or
	``||h + r - t||_2^2``.
	"""

	L1 = 'l1'
	L2SQ = 'l2sq'


def parse_score_kind(model_kind, value):
	""" Resolve the score kind valid for ``model_kind``.

	:type model_kind: ModelKind or str
	:param model_kind: ``toruse`` or ``transe``.

	:type value: str
	:param value: ``l1``, ``l2``, ``el2`` for TorusE; ``l1``, ``l2sq``
		for TransE.

	:rtype: ScoreKind or TransEScore

	:raises InvalidArgumentError: If the score does not exist for the
		model.
	"""

	model_kind = ModelKind.parse(model_kind)

	if model_kind is ModelKind.TORUSE:
		return ScoreKind.parse(value)

	if isinstance(value, TransEScore):
		return value

	try:
		return TransEScore(str(value).lower())
	except ValueError:
		raise InvalidArgumentError("unknown TransE score kind: {0!r}".format(value))


class EmbeddingModel:
	""" Entity and relation tables with their scoring function.

	:type kind: ModelKind or str
	:param kind: ``toruse`` or ``transe``.

	:type score_kind: ScoreKind or TransEScore or str
	:param score_kind: Scoring function valid for ``kind``.

	:type entities: :class:`numpy.ndarray`
	:param entities: ``|E| x n`` entity table.

	:type relations: :class:`numpy.ndarray`
	:param relations: ``|R| x n`` relation table.

	:raises InvalidArgumentError: If the tables are not finite, or a
		TorusE coordinate lies outside ``[0, 1)``.
	"""

	def __init__(self, kind, score_kind, entities, relations):
		""" Constructor """

		self.kind = ModelKind.parse(kind)
		self.score_kind = parse_score_kind(self.kind, score_kind)

		self.entities = np.ascontiguousarray(entities, dtype=np.float64)
		self.relations = np.ascontiguousarray(relations, dtype=np.float64)

		if self.entities.ndim != 2 or self.relations.ndim != 2:
			raise InvalidArgumentError("embedding tables must be matrices")

		if self.entities.shape[1] != self.relations.shape[1]:
			raise InvalidArgumentError("entity and relation tables differ in dimension")

		if self.entities.shape[1] < 1:
			raise InvalidArgumentError("dimension must be at least 1")

		for table in (self.entities, self.relations):
			if not np.all(np.isfinite(table)):
				raise InvalidArgumentError("embedding tables must be finite")

			if self.is_torus and not np.all((table >= 0.0) & (table < 1.0)):
				raise InvalidArgumentError("torus coordinates must lie in [0, 1)")

	@property
	def dimension(self):
		return self.entities.shape[1]

	@property
	def num_entities(self):
		return self.entities.shape[0]

	@property
	def num_relations(self):
		return self.relations.shape[0]

	@property
	def is_torus(self):
		return self.kind is ModelKind.TORUSE

	def _check_ids(self, head, relation, tail):
		if not (0 <= head < self.num_entities and 0 <= tail < self.num_entities):
			raise InvalidArgumentError("entity id out of range")

		if not 0 <= relation < self.num_relations:
			raise InvalidArgumentError("relation id out of range")

	def residual(self, triple):
		""" ``h + r - t`` of a triple, wrapped into ``(-0.5, 0.5]`` on
		the torus.

		:type triple: Triple
		:param triple: Ids of the triple.

		:rtype: :class:`numpy.ndarray`
		"""

		head, relation, tail = (int(x) for x in triple)
		self._check_ids(head, relation, tail)

		return self._residuals(self.entities[head] + self.relations[relation] - self.entities[tail])

	def _residuals(self, raw):
		if self.is_torus:
			return torus_math.wrap(raw)

		return raw

	def scores_from_residuals(self, residuals):
		""" Scores of an array of residuals (last axis = coordinates).

		:rtype: :class:`numpy.ndarray` or float
		"""

		if self.is_torus:
			return torus_math.score_from_diff(self.score_kind, residuals)

		if self.score_kind is TransEScore.L1:
			return np.abs(residuals).sum(axis=-1)

		return np.square(residuals).sum(axis=-1)

	def residual_gradient(self, residual):
		""" Gradient of the score with respect to the residual.

		:rtype: :class:`numpy.ndarray`
		"""

		if self.is_torus:
			return torus_math.score_gradient(self.score_kind, residual)

		if self.score_kind is TransEScore.L1:
			return np.sign(residual)

		return 2.0 * residual

	def score_triple(self, triple):
		""" Score of one triple; lower is more plausible.

		:type triple: Triple
		:param triple: Ids of the triple.

		:return: ``f_d`` of the torus, or ``||h + r - t||_1`` /
			``||h + r - t||_2^2`` for TransE.
		:rtype: float

		:raises InvalidArgumentError: For ids out of range.
		"""

		residual = self.residual(triple)

		return float(self.scores_from_residuals(residual[np.newaxis, :])[0])

	def score_all_replacements(self, triple, position):
		""" Scores of the triple with every entity substituted at
		``position``.

		:type triple: Triple
		:param triple: Ids of the triple.

		:type position: str
		:param position: ``head`` or ``tail``.

		:return: Vector of length ``|E|``; entry ``e`` equals
			:meth:`score_triple` with ``e`` at ``position``.
		:rtype: :class:`numpy.ndarray`

		:raises InvalidArgumentError: For ids out of range or an unknown
			position.
		"""

		head, relation, tail = (int(x) for x in triple)
		self._check_ids(head, relation, tail)

		if position not in ('head', 'tail'):
			raise InvalidArgumentError("position must be 'head' or 'tail'")

		entities = self.entities
		relation_row = self.relations[relation]

		scores = np.empty(self.num_entities)
		step = max(1, _CHUNK_ELEMENTS // self.dimension)

		for start in range(0, self.num_entities, step):
			block = entities[start:start + step]

			if position == 'tail':
				raw = (entities[head] + relation_row) - block
			else:
				raw = (block + relation_row) - entities[tail]

			scores[start:start + step] = self.scores_from_residuals(self._residuals(raw))

		return scores

	def canonicalize_rows(self, entity_rows=(), relation_rows=()):
		""" Bring updated torus rows back into ``[0, 1)``. """

		if not self.is_torus:
			return

		for row in entity_rows:
			self.entities[row] = torus_math.frac(self.entities[row])

		for row in relation_rows:
			self.relations[row] = torus_math.frac(self.relations[row])

	def normalize_entities(self):
		""" Rescale every entity row to unit Euclidean norm (TransE
		only); relation rows are left alone.

		:raises InvalidStateError: On a TorusE model, which needs no
			regularization, or if an entity row has zero norm.
		"""

		if self.is_torus:
			raise InvalidStateError("TorusE embeddings are not normalized")

		norms = np.linalg.norm(self.entities, axis=1)

		if np.any(norms == 0.0):
			raise InvalidStateError("cannot normalize a zero entity embedding")

		self.entities /= norms[:, np.newaxis]

	def copy(self):
		return EmbeddingModel(self.kind, self.score_kind, self.entities.copy(), self.relations.copy())

	def describe(self):
		""" Summary of the model for inspection.

		:rtype: dict
		"""

		entity_norms = np.linalg.norm(self.entities, axis=1) if self.num_entities else np.zeros(1)

		return {
			"model": self.kind.value,
			"score": self.score_kind.value,
			"dimension": self.dimension,
			"entities": self.num_entities,
			"relations": self.num_relations,
			"entity_min": float(self.entities.min()) if self.entities.size else 0.0,
			"entity_max": float(self.entities.max()) if self.entities.size else 0.0,
			"entity_norm_mean": float(entity_norms.mean()),
			"relation_norm_mean": float(np.linalg.norm(self.relations, axis=1).mean()) if self.num_relations else 0.0,
		}


def init_model(kind, num_entities, num_relations, dimension, score_kind, rng):
	""" Initializes and returns a new embedding model.

	TorusE coordinates are i.i.d. uniform on ``[0, 1)``, the uniform
	measure of the torus. TransE rows are uniform on
	``[-6 / sqrt(n), 6 / sqrt(n)]`` with entity rows then rescaled to
	unit norm.

	:type kind: ModelKind or str
	:param kind: ``toruse`` or ``transe``.

	:type num_entities: int
	:param num_entities: ``|E| >= 1``.

	:type num_relations: int
	:param num_relations: ``|R| >= 0``.

	:type dimension: int
	:param dimension: ``n >= 1``.

	:type score_kind: str
	:param score_kind: Scoring function valid for ``kind``.

	:type rng: :class:`numpy.random.Generator`
	:param rng: Random state the tables are drawn from.

	:return: A newly initialized model.
	:rtype: EmbeddingModel

	:raises InvalidArgumentError: For a zero dimension or no entities.
	"""

	kind = ModelKind.parse(kind)

	if dimension < 1:
		raise InvalidArgumentError("dimension must be at least 1")

	if num_entities < 1 or num_relations < 0:
		raise InvalidArgumentError("need at least one entity and a non-negative relation count")

	if kind is ModelKind.TORUSE:
		entities = rng.random((num_entities, dimension))
		relations = rng.random((num_relations, dimension))

		return EmbeddingModel(kind, score_kind, entities, relations)

	bound = 6.0 / np.sqrt(dimension)
	entities = rng.uniform(-bound, bound, (num_entities, dimension))
	relations = rng.uniform(-bound, bound, (num_relations, dimension))

	model = EmbeddingModel(kind, score_kind, entities, relations)
	model.normalize_entities()

	return model


def positive_score_ratio(model, triples, rng):
	""" Mean score of ``triples`` over the mean score of uniform
	corruptions of them.

	A scale free measure of how closely a model satisfies its
	translation principle on known facts: 0 when every positive scores
	perfectly, about 1 when positives look like random triples.

	:type model: EmbeddingModel
	:param model: Trained model.

	:type triples: :class:`numpy.ndarray`
	:param triples: ``k x 3`` positive triples.

	:type rng: :class:`numpy.random.Generator`
	:param rng: Random state for the corruptions.

	:rtype: float
	"""

	positive, negative = 0.0, 0.0

	for head, relation, tail in np.asarray(triples).tolist():
		positive += model.score_triple(Triple(head, relation, tail))

		replacement = int(rng.integers(model.num_entities - 1))
		if rng.random() < 0.5:
			corrupted = Triple(replacement + (replacement >= head), relation, tail)
		else:
			corrupted = Triple(head, relation, replacement + (replacement >= tail))

		negative += model.score_triple(corrupted)

	return positive / negative if negative else 0.0
