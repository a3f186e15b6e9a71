#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""
Margin loss stochastic gradient descent.

Each epoch shuffles the training triples, cuts them into groups and
walks the groups in order; every positive triple is paired with one
Bern corruption and the pair's hinge term
``[margin + f(positive) - f(negative)]_+`` takes one gradient step.
"""

import json
import time
import logging
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, replace

import numpy as np

from toruse import evaluator
from toruse._random import _custom_rng
from toruse._exception import InvalidArgumentError
from toruse.kg_data import Triple, bern_stats, sample_negative
from toruse.model import ModelKind, init_model, parse_score_kind


logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
	""" Hyperparameters of a training run.

	Defaults are the best WN18 configuration: ``l1`` scoring,
	``n = 10000``, margin 2000, learning rate 0.0005.
	"""

	margin: float = 2000.0
	learning_rate: float = 0.0005
	dimension: int = 10000
	epochs: int = 500
	groups: int = 100
	score_kind: str = 'l1'
	model_kind: str = 'toruse'
	seed: int = 0
	filter_negatives: bool = False
	parallel: bool = False
	threads: int = 1

	def validate(self, train_size=None):
		""" Check the configuration, optionally against the training
		set size.

		:raises InvalidArgumentError: For a non-positive margin,
			learning rate, dimension, epoch or group count, an unknown
			model / score kind, or more groups than training triples.
		"""

		if not self.margin > 0:
			raise InvalidArgumentError("margin must be positive")

		if not self.learning_rate > 0:
			raise InvalidArgumentError("learning rate must be positive")

		for name in ('dimension', 'epochs', 'groups', 'threads'):
			if getattr(self, name) < 1:
				raise InvalidArgumentError("{0} must be a positive integer".format(name))

		parse_score_kind(self.model_kind, self.score_kind)

		if train_size is not None and self.groups > train_size:
			raise InvalidArgumentError("{0} groups for {1} training triples".format(self.groups, train_size))

		return self

	def to_dict(self):
		return asdict(self)

	@classmethod
	def from_dict(cls, data):
		known = {name: data[name] for name in cls.__dataclass_fields__ if name in data}

		return cls(**known)


@dataclass
class EpochStats:
	""" What one epoch did and how long it took. """

	epoch: int
	loss: float
	violations: int
	seconds: float

	def to_json(self):
		return json.dumps({"epoch": self.epoch, "loss": self.loss, "violations": self.violations, "seconds": self.seconds})


def hinge_loss(model, pos, neg, margin):
	""" ``max(0, margin + f(pos) - f(neg))``.

	:type model: EmbeddingModel
	:param model: Scoring model.

	:type pos: Triple
	:param pos: Positive triple.

	:type neg: Triple
	:param neg: Corruption of ``pos``.

	:type margin: float
	:param margin: Margin ``gamma > 0``.

	:rtype: float
	"""

	return max(0.0, margin + model.score_triple(pos) - model.score_triple(neg))


def hinge_gradient(model, pos, neg):
	""" Gradient of ``f(pos) - f(neg)``, the active hinge term, with
	respect to every embedding row it touches.

	:type model: EmbeddingModel
	:param model: Scoring model.

	:type pos: Triple
	:param pos: Positive triple.

	:type neg: Triple
	:param neg: Corruption of ``pos`` (same relation).

	:return: ``(entity_grads, relation_grads)``, dicts from row id to
		gradient vector.
	:rtype: tuple
	"""

	g_pos = model.residual_gradient(model.residual(pos))
	g_neg = model.residual_gradient(model.residual(neg))

	entity_grads = {}
	relation_grads = {}

	def accumulate(grads, row, value):
		row = int(row)
		grads[row] = grads[row] + value if row in grads else value

	# d(h + r - t): +1 for head and relation, -1 for tail
	accumulate(entity_grads, pos[0], g_pos)
	accumulate(entity_grads, pos[2], -g_pos)
	accumulate(relation_grads, pos[1], g_pos)

	accumulate(entity_grads, neg[0], -g_neg)
	accumulate(entity_grads, neg[2], g_neg)
	accumulate(relation_grads, neg[1], -g_neg)

	return entity_grads, relation_grads


def sgd_step(model, pos, neg, margin, learning_rate):
	""" One gradient step on the hinge term of a pair.

	Nothing changes when the pair already satisfies the margin.
	Otherwise every touched row moves by ``-learning_rate * gradient``;
	TorusE rows are canonicalized again, TransE entity rows are
	normalized back onto the unit sphere.

	:type model: EmbeddingModel
	:param model: Model updated in place.

	:type pos: Triple
	:param pos: Positive triple.

	:type neg: Triple
	:param neg: Corruption of ``pos``.

	:type margin: float
	:param margin: Margin ``gamma``.

	:type learning_rate: float
	:param learning_rate: Step size ``alpha``.

	:return: The hinge loss of the pair before the step.
	:rtype: float
	"""

	residual_pos = model.residual(pos)
	residual_neg = model.residual(neg)

	loss = margin + float(model.scores_from_residuals(residual_pos)) - float(model.scores_from_residuals(residual_neg))

	if loss <= 0.0:
		return 0.0

	entity_grads, relation_grads = hinge_gradient(model, pos, neg)

	for row, grad in entity_grads.items():
		model.entities[row] -= learning_rate * grad

	for row, grad in relation_grads.items():
		model.relations[row] -= learning_rate * grad

	if model.is_torus:
		model.canonicalize_rows(entity_grads, relation_grads)
	else:
		model.normalize_entities()

	return loss


def partition(size, groups):
	""" Boundaries of ``groups`` contiguous slices of ``range(size)``
	whose lengths differ by at most one.

	:rtype: list
	"""

	bounds = np.linspace(0, size, groups + 1).round().astype(np.int64)

	return list(zip(bounds[:-1].tolist(), bounds[1:].tolist()))


class Trainer:
	""" Trains one model on one dataset.

	:type dataset: Dataset
	:param dataset: Loaded knowledge graph.

	:type config: TrainConfig
	:param config: Hyperparameters.

	:type metrics: file
	:param metrics: (Optional) Text stream receiving one JSON object
		per epoch, defaults to :data:`None`.

	:type validate_every: int
	:param validate_every: (Optional) Log the filtered validation MRR
		every that many epochs, defaults to 0 (never).
	"""

	def __init__(self, dataset, config, metrics=None, validate_every=0):
		""" Constructor """

		config.validate(len(dataset.train))

		self.dataset = dataset
		self.config = config
		self.metrics = metrics
		self.validate_every = validate_every

		self.stats = bern_stats(dataset)
		self.model = init_model(
			config.model_kind,
			dataset.num_entities,
			dataset.num_relations,
			config.dimension,
			config.score_kind,
			_custom_rng(config.seed, 'init'),
		)

		self.history = []
		self.visits = np.zeros(len(dataset.train), dtype=np.int64)
		self.normalizations = 0

	def _step(self, index, rng):
		pos = Triple(*self.dataset.train[index].tolist())
		neg = sample_negative(pos, self.stats, rng, self.dataset if self.config.filter_negatives else None)

		loss = sgd_step(self.model, pos, neg, self.config.margin, self.config.learning_rate)

		self.visits[index] += 1
		if loss > 0.0 and not self.model.is_torus:
			self.normalizations += 1

		return loss

	def _run_group(self, indices, rng):
		loss, violations = 0.0, 0

		for index in indices:
			step_loss = self._step(index, rng)
			loss += step_loss
			violations += step_loss > 0.0

		return loss, violations

	def run_epoch(self, epoch):
		""" Train for one epoch.

		:type epoch: int
		:param epoch: 1-based epoch index; seeds the epoch's random
			stream.

		:rtype: EpochStats
		"""

		self.visits[:] = 0
		rng = _custom_rng(self.config.seed, 'epoch', epoch)

		started = time.perf_counter()

		order = rng.permutation(len(self.dataset.train))
		groups = [order[start:stop] for start, stop in partition(len(order), self.config.groups)]

		if self.config.parallel and self.config.threads > 1:
			# hogwild: workers race on shared rows, results are not reproducible
			with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
				results = list(pool.map(
					lambda item: self._run_group(item[1], _custom_rng(self.config.seed, 'epoch', epoch, 'group', item[0])),
					enumerate(groups),
				))
		else:
			results = [self._run_group(group, rng) for group in groups]

		seconds = time.perf_counter() - started

		stats = EpochStats(
			epoch=epoch,
			loss=float(sum(loss for loss, _ in results)),
			violations=int(sum(count for _, count in results)),
			seconds=seconds,
		)

		self.history.append(stats)

		logger.info("epoch %d: loss %.6g, %d violations, %.3fs", stats.epoch, stats.loss, stats.violations, stats.seconds)

		if self.metrics is not None:
			self.metrics.write(stats.to_json() + "\n")
			self.metrics.flush()

		if self.validate_every and epoch % self.validate_every == 0 and len(self.dataset.valid):
			report = evaluator.evaluate(self.model, self.dataset, split='valid', threads=self.config.threads)
			logger.info("epoch %d: valid filtered MRR %.4f", epoch, report.mrr_filtered)

		return stats

	def run(self):
		""" Train for the configured number of epochs.

		:return: ``(model, history)``
		:rtype: tuple
		"""

		for epoch in range(1, self.config.epochs + 1):
			self.run_epoch(epoch)

		return self.model, self.history


def train(dataset, config, metrics=None):
	""" Train a model from scratch.

	Deterministic for a given seed unless ``config.parallel`` is set.

	:type dataset: Dataset
	:param dataset: Loaded knowledge graph.

	:type config: TrainConfig
	:param config: Hyperparameters.

	:type metrics: file
	:param metrics: (Optional) Stream receiving per epoch JSON lines.

	:return: ``(model, list of EpochStats)``
	:rtype: tuple
	"""

	return Trainer(dataset, config, metrics=metrics).run()


def sweep(dataset, base_config, margins, learning_rates, score_kinds):
	""" Sequential grid search selecting by filtered validation MRR.

	:type dataset: Dataset
	:param dataset: Dataset with a validation split.

	:type base_config: TrainConfig
	:param base_config: Everything but the swept values.

	:type margins: list
	:param margins: Margins to try.

	:type learning_rates: list
	:param learning_rates: Learning rates to try.

	:type score_kinds: list
	:param score_kinds: Scoring functions to try.

	:return: ``(config, validation filtered MRR)`` pairs, best first.
	:rtype: list
	"""

	if not len(dataset.valid):
		raise InvalidArgumentError("sweeping needs a validation split")

	results = []

	for score_kind, margin, learning_rate in itertools.product(score_kinds, margins, learning_rates):
		config = replace(base_config, score_kind=score_kind, margin=margin, learning_rate=learning_rate)
		model, _ = train(dataset, config)

		report = evaluator.evaluate(model, dataset, split='valid', threads=config.threads)
		logger.info("sweep %s margin=%g lr=%g: valid filtered MRR %.4f", score_kind, margin, learning_rate, report.mrr_filtered)

		results.append((config, report.mrr_filtered))

	return sorted(results, key=lambda item: -item[1])


def default_score_kind(model_kind):
	""" ``l1`` for TorusE, ``l2sq`` for TransE. """

	return 'l1' if ModelKind.parse(model_kind) is ModelKind.TORUSE else 'l2sq'
