#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""
Knowledge graph triples: loading, vocabularies, the true-triple index
used for filtered ranking, and Bernoulli ("Bern") negative sampling.

Triple files hold one fact per line, ``head<TAB>relation<TAB>tail``,
as in the WN18 and FB15K distributions.
"""

import os
import hashlib
import logging
from collections import namedtuple, defaultdict
from dataclasses import dataclass

import numpy as np

from ._toy import make_composition_kg
from toruse._exception import DatasetParseError, InvalidArgumentError, InvalidStateError


logger = logging.getLogger(__name__)

SPLITS = ('train', 'valid', 'test')

Triple = namedtuple('Triple', ['head', 'relation', 'tail'])
Triple.__doc__ = """ A fact ``(h, r, t)`` over dense entity and relation ids. """


class Vocabulary:
	""" Bijection between entity / relation names and dense ids.

	Ids are assigned in order of first appearance.

	:type entities: list
	:param entities: (Optional) Entity names, defaults to none.

	:type relations: list
	:param relations: (Optional) Relation names, defaults to none.
	"""

	def __init__(self, entities=(), relations=()):
		""" Constructor """

		self.entities = []
		self.relations = []

		self._entity_ids = {}
		self._relation_ids = {}

		for name in entities:
			self.add_entity(name)

		for name in relations:
			self.add_relation(name)

	@property
	def num_entities(self):
		return len(self.entities)

	@property
	def num_relations(self):
		return len(self.relations)

	def add_entity(self, name):
		""" Id of ``name``, registering it if unseen.

		:type name: str
		:param name: Entity name.

		:rtype: int
		"""

		entity_id = self._entity_ids.get(name)

		if entity_id is None:
			entity_id = self._entity_ids[name] = len(self.entities)
			self.entities.append(name)

		return entity_id

	def add_relation(self, name):
		""" Id of ``name``, registering it if unseen.

		:type name: str
		:param name: Relation name.

		:rtype: int
		"""

		relation_id = self._relation_ids.get(name)

		if relation_id is None:
			relation_id = self._relation_ids[name] = len(self.relations)
			self.relations.append(name)

		return relation_id

	def entity_id(self, name):
		return self._entity_ids[name]

	def relation_id(self, name):
		return self._relation_ids[name]

	def entity_name(self, entity_id):
		return self.entities[entity_id]

	def relation_name(self, relation_id):
		return self.relations[relation_id]

	def to_dict(self):
		return {"entities": list(self.entities), "relations": list(self.relations)}

	@classmethod
	def from_dict(cls, data):
		""" Rebuild a vocabulary from :meth:`to_dict` output.

		:type data: dict
		:param data: Mapping with ``entities`` and ``relations`` lists.

		:rtype: Vocabulary

		:raises InvalidArgumentError: If a name repeats.
		"""

		vocabulary = cls(data["entities"], data["relations"])

		if vocabulary.num_entities != len(data["entities"]) or vocabulary.num_relations != len(data["relations"]):
			raise InvalidArgumentError("vocabulary names must be unique")

		return vocabulary

	def __eq__(self, other):
		if not isinstance(other, Vocabulary):
			return NotImplemented

		return self.entities == other.entities and self.relations == other.relations


class Dataset:
	""" Vocabulary plus train / valid / test triples.

	The three splits are kept verbatim, duplicates included. The
	union of the splits forms the set of known true triples, indexed
	by ``(head, relation)`` and ``(relation, tail)`` for filtering.

	Instances are read-only after construction and can be shared
	between threads.

	:type vocabulary: Vocabulary
	:param vocabulary: Names of the entities and relations.

	:type train: :class:`numpy.ndarray`
	:param train: ``k x 3`` array of ``(head, relation, tail)`` ids.

	:type valid: :class:`numpy.ndarray`
	:param valid: Validation triples, same layout.

	:type test: :class:`numpy.ndarray`
	:param test: Test triples, same layout.

	:raises InvalidArgumentError: If an id does not resolve in the
		vocabulary.
	"""

	def __init__(self, vocabulary, train, valid, test):
		""" Constructor """

		self.vocabulary = vocabulary

		self.train = self._freeze(train)
		self.valid = self._freeze(valid)
		self.test = self._freeze(test)

		self._true = set()
		self._tails = defaultdict(set)
		self._heads = defaultdict(set)

		for head, relation, tail in self.all_triples().tolist():
			self._true.add((head, relation, tail))
			self._tails[(head, relation)].add(tail)
			self._heads[(relation, tail)].add(head)

	def _freeze(self, triples):
		triples = np.array(triples, dtype=np.int64).reshape(-1, 3)

		if triples.size:
			entities = triples[:, [0, 2]]
			relations = triples[:, 1]

			if entities.min() < 0 or entities.max() >= self.vocabulary.num_entities:
				raise InvalidArgumentError("entity id out of vocabulary range")

			if relations.min() < 0 or relations.max() >= self.vocabulary.num_relations:
				raise InvalidArgumentError("relation id out of vocabulary range")

		triples.flags.writeable = False

		return triples

	@property
	def num_entities(self):
		return self.vocabulary.num_entities

	@property
	def num_relations(self):
		return self.vocabulary.num_relations

	def split(self, name):
		""" Triples of one split.

		:type name: str
		:param name: ``train``, ``valid`` or ``test``.

		:rtype: :class:`numpy.ndarray`
		"""

		if name not in SPLITS:
			raise InvalidArgumentError("unknown split: {0!r}".format(name))

		return getattr(self, name)

	def all_triples(self):
		return np.concatenate([self.train, self.valid, self.test])

	def is_true(self, head, relation, tail):
		return (int(head), int(relation), int(tail)) in self._true

	def true_tails(self, head, relation):
		""" Tails ``t`` with ``(head, relation, t)`` in any split.

		:rtype: set
		"""

		return self._tails.get((int(head), int(relation)), set())

	def true_heads(self, relation, tail):
		""" Heads ``h`` with ``(h, relation, tail)`` in any split.

		:rtype: set
		"""

		return self._heads.get((int(relation), int(tail)), set())

	def counts(self):
		""" Dataset statistics.

		:return: Number of entities, relations and triples per split.
		:rtype: dict
		"""

		return {
			"entities": self.num_entities,
			"relations": self.num_relations,
			"train": len(self.train),
			"valid": len(self.valid),
			"test": len(self.test),
		}

	@classmethod
	def from_triples(cls, train, valid=(), test=(), vocabulary=None):
		""" Build a dataset from named triples held in memory.

		:type train: list
		:param train: ``(head, relation, tail)`` name triples.

		:type valid: list
		:param valid: (Optional) Validation name triples.

		:type test: list
		:param test: (Optional) Test name triples.

		:type vocabulary: Vocabulary
		:param vocabulary: (Optional) Vocabulary to extend, defaults to
			a new one filled in order of first appearance.

		:rtype: Dataset
		"""

		vocabulary = vocabulary or Vocabulary()
		splits = []

		for triples in (train, valid, test):
			ids = [
				(vocabulary.add_entity(h), vocabulary.add_relation(r), vocabulary.add_entity(t))
				for h, r, t in triples
			]
			splits.append(ids)

		return cls(vocabulary, *splits)

	def named(self, name):
		""" Name triples of one split, the inverse of :meth:`from_triples`.

		:rtype: list
		"""

		vocabulary = self.vocabulary

		return [
			(vocabulary.entity_name(h), vocabulary.relation_name(r), vocabulary.entity_name(t))
			for h, r, t in self.split(name).tolist()
		]

	def write(self, directory):
		""" Write ``train.txt``, ``valid.txt`` and ``test.txt``.

		:type directory: str
		:param directory: Target directory, created if missing.

		:return: Paths of the written files keyed by split.
		:rtype: dict
		"""

		os.makedirs(directory, exist_ok=True)
		paths = {}

		for name in SPLITS:
			path = paths[name] = os.path.join(directory, name + '.txt')

			with open(path, 'w', encoding='utf-8', newline='\n') as stream:
				for head, relation, tail in self.named(name):
					stream.write("{0}\t{1}\t{2}\n".format(head, relation, tail))

		return paths


def split_paths(directory):
	""" Standard file locations of the three splits in ``directory``.

	:rtype: dict
	"""

	return {name: os.path.join(directory, name + '.txt') for name in SPLITS}


def _read_triples(path):
	triples = []

	with open(path, 'r', encoding='utf-8', newline='') as stream:
		for line_number, line in enumerate(stream, start=1):
			if line.endswith('\n'):
				line = line[:-1]
				if line.endswith('\r'):
					line = line[:-1]

			fields = line.split('\t')

			if len(fields) != 3:
				raise DatasetParseError("expected 3 tab-separated fields, found {0}".format(len(fields)), path, line_number)

			triples.append(fields)

	return triples


def load_dataset(train_path, valid_path, test_path):
	""" Load the three splits of a knowledge graph.

	The vocabulary is built from all three splits, so entities seen only
	in validation or test still receive an id (and an embedding).

	:type train_path: str
	:param train_path: Training triples.

	:type valid_path: str
	:param valid_path: Validation triples.

	:type test_path: str
	:param test_path: Test triples.

	:return: The loaded dataset.
	:rtype: Dataset

	:raises FileNotFoundError: If a file is missing.
	:raises DatasetParseError: For a line without exactly three fields
		or an empty training split.
	"""

	train = _read_triples(train_path)

	if not train:
		raise DatasetParseError("empty split", train_path)

	valid = _read_triples(valid_path)
	test = _read_triples(test_path)

	for name, triples in (('valid', valid), ('test', test)):
		if not triples:
			logger.warning("%s split is empty", name)

	dataset = Dataset.from_triples(train, valid, test)

	logger.info("loaded %(entities)d entities, %(relations)d relations, %(train)d/%(valid)d/%(test)d triples", dataset.counts())

	return dataset


def load_directory(directory):
	""" :func:`load_dataset` on ``train.txt``, ``valid.txt`` and
	``test.txt`` of ``directory``.

	:rtype: Dataset
	"""

	paths = split_paths(directory)

	return load_dataset(paths['train'], paths['valid'], paths['test'])


def checksum(path):
	""" SHA-256 hex digest of a file.

	:rtype: str
	"""

	digest = hashlib.sha256()

	with open(path, 'rb') as stream:
		for block in iter(lambda: stream.read(1 << 20), b''):
			digest.update(block)

	return digest.hexdigest()


@dataclass(frozen=True, eq=False)
class BernStats:
	""" Per relation corruption statistics of the training split.

	:type tph: :class:`numpy.ndarray`
	:param tph: Mean number of tails per head, indexed by relation id.

	:type hpt: :class:`numpy.ndarray`
	:param hpt: Mean number of heads per tail, indexed by relation id.

	:type num_entities: int
	:param num_entities: Number of candidate replacement entities.
	"""

	tph: np.ndarray
	hpt: np.ndarray
	num_entities: int

	def head_probability(self, relation):
		""" Probability of corrupting the head of a triple with
		``relation``: ``tph / (tph + hpt)``.

		:rtype: float
		"""

		tph = self.tph[relation]

		return float(tph / (tph + self.hpt[relation]))


def bern_stats(dataset):
	""" Tails-per-head and heads-per-tail of every relation.

	For relation ``r``, ``tph`` is the number of distinct ``(h, t)``
	pairs under ``r`` divided by the number of distinct heads under
	``r``; ``hpt`` divides by the distinct tails instead. Relations
	absent from training get ``tph = hpt = 1`` (even odds).

	:type dataset: Dataset
	:param dataset: Dataset with a non-empty training split.

	:rtype: BernStats
	"""

	relations = dataset.num_relations
	distinct = np.unique(dataset.train, axis=0)

	pairs = np.bincount(distinct[:, 1], minlength=relations).astype(np.float64)
	heads = np.bincount(np.unique(distinct[:, [1, 0]], axis=0)[:, 0], minlength=relations)
	tails = np.bincount(np.unique(distinct[:, [1, 2]], axis=0)[:, 0], minlength=relations)

	tph = np.ones(relations)
	hpt = np.ones(relations)

	seen = pairs > 0
	tph[seen] = pairs[seen] / heads[seen]
	hpt[seen] = pairs[seen] / tails[seen]

	tph.flags.writeable = False
	hpt.flags.writeable = False

	return BernStats(tph=tph, hpt=hpt, num_entities=dataset.num_entities)


_MAX_FILTER_TRIES = 10


def sample_negative(triple, stats, rng, true_set=None):
	""" Corrupt the head or the tail of a triple.

	The head is replaced with probability ``tph / (tph + hpt)`` of the
	triple's relation, otherwise the tail. The replacement is drawn
	uniformly from all entities but the original one, so the result
	always differs from ``triple`` in exactly one field.

	:type triple: Triple
	:param triple: Positive triple.

	:type stats: BernStats
	:param stats: Statistics from :func:`bern_stats`.

	:type rng: :class:`numpy.random.Generator`
	:param rng: Caller owned random state.

	:type true_set: Dataset
	:param true_set: (Optional) When given, corruptions that are known
		true triples are redrawn (at most 10 times), defaults to
		:data:`None` (no filtering).

	:return: The corrupted triple.
	:rtype: Triple

	:raises InvalidStateError: With fewer than two entities.
	"""

	if stats.num_entities < 2:
		raise InvalidStateError("negative sampling needs at least two entities")

	head, relation, tail = (int(x) for x in triple)
	p_head = stats.head_probability(relation)

	for _ in range(_MAX_FILTER_TRIES):
		replacement = int(rng.integers(stats.num_entities - 1))

		if rng.random() < p_head:
			negative = Triple(replacement + (replacement >= head), relation, tail)
		else:
			negative = Triple(head, relation, replacement + (replacement >= tail))

		if true_set is None or not true_set.is_true(*negative):
			break

	return negative
