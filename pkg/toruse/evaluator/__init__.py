#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""
Link prediction evaluation.

For every evaluated triple the head, then the tail, is replaced by each
entity and the target entity is ranked by score. The *raw* rank counts
every better entity; the *filtered* rank ignores entities whose
substitution yields another known true triple. Ranks are optimistic:
one plus the number of strictly better competitors.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from toruse.kg_data import Triple
from toruse._exception import InvalidArgumentError
from ._report import RankReport


logger = logging.getLogger(__name__)

HITS_CUTOFFS = (1, 3, 10)


@dataclass(frozen=True)
class RankResult:
	""" Ranks of the target of one prediction. """

	triple: Triple
	position: str
	raw: int
	filtered: int


def rank_entity(scores, target, mask=None):
	""" Optimistic rank of ``target`` among all entities.

	:type scores: :class:`numpy.ndarray`
	:param scores: Score of every entity, lower is better.

	:type target: int
	:param target: Entity to rank.

	:type mask: set
	:param mask: (Optional) Entities excluded from the competition,
		defaults to :data:`None`.

	:return: ``1 + |{e not in mask, e != target : scores[e] < scores[target]}|``
	:rtype: int

	:raises InvalidArgumentError: If ``target`` is masked.
	"""

	target = int(target)
	better = scores < scores[target]

	if mask:
		if target in mask:
			raise InvalidArgumentError("the target entity cannot be masked")

		better[np.fromiter(mask, dtype=np.int64, count=len(mask))] = False

	return 1 + int(np.count_nonzero(better))


def _predict(model, dataset, triple):
	head, relation, tail = triple
	results = []

	scores = model.score_all_replacements(triple, 'head')
	mask = dataset.true_heads(relation, tail) - {head}
	results.append(RankResult(triple, 'head', rank_entity(scores, head), rank_entity(scores, head, mask)))

	scores = model.score_all_replacements(triple, 'tail')
	mask = dataset.true_tails(head, relation) - {tail}
	results.append(RankResult(triple, 'tail', rank_entity(scores, tail), rank_entity(scores, tail, mask)))

	return results


def evaluate(model, dataset, hits_cutoffs=HITS_CUTOFFS, split='test', threads=1):
	""" Rank the head and the tail of every triple of a split.

	:type model: EmbeddingModel
	:param model: Model to evaluate; only read.

	:type dataset: Dataset
	:param dataset: Dataset whose splits provide the filter.

	:type hits_cutoffs: list
	:param hits_cutoffs: (Optional) ``n`` of the reported HITS@n,
		defaults to ``(1, 3, 10)``.

	:type split: str
	:param split: (Optional) ``test`` or ``valid``, defaults to
		``test``.

	:type threads: int
	:param threads: (Optional) Worker threads, defaults to 1. Results
		are aggregated in triple order, so the report does not depend
		on it.

	:rtype: RankReport

	:raises InvalidArgumentError: If the model does not match the
		dataset.
	"""

	if model.num_entities != dataset.num_entities or model.num_relations != dataset.num_relations:
		raise InvalidArgumentError(
			"model has {0} entities / {1} relations, dataset {2} / {3}".format(
				model.num_entities, model.num_relations, dataset.num_entities, dataset.num_relations
			)
		)

	triples = [Triple(*row) for row in dataset.split(split).tolist()]

	if threads > 1:
		with ThreadPoolExecutor(max_workers=threads) as pool:
			predictions = list(pool.map(lambda triple: _predict(model, dataset, triple), triples))
	else:
		predictions = []
		step = max(1, len(triples) // 10)

		for index, triple in enumerate(triples, start=1):
			predictions.append(_predict(model, dataset, triple))

			if index % step == 0:
				logger.debug("evaluated %d/%d triples", index, len(triples))

	results = [result for pair in predictions for result in pair]

	return RankReport.from_results(results, dataset.vocabulary, hits_cutoffs, split=split)


def linear_fit(xs, ys):
	""" Least squares line through ``(xs, ys)``.

	:return: ``(slope, intercept, r_squared)``
	:rtype: tuple
	"""

	fit = stats.linregress(np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64))

	return float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2)
