#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""Knowledge graph embedding on a torus, with the TransE baseline, a
margin loss trainer and a link prediction evaluator.
"""

__version__ = "1.0.0"

from . import evaluator, kg_data, model, torus_math, trainer
from ._config import DEFAULTS, merge
from ._exception import TorusEError, InvalidArgumentError


def initialize_experiment(config):
	"""Initializes and returns a new Experiment instance.

	:type config: dict
	:param config: Experiment configuration; keys as in
		:data:`toruse._config.DEFAULTS`, missing keys take the default.

	:return: A newly initialized instance of Experiment.
	:rtype: Experiment
	"""

	return Experiment(config)


class Experiment:
	""" Experiment Interface

	Shares one resolved configuration between the dataset, the trainer
	and the evaluator.

	:type config: dict
	:param config: Experiment configuration.
	"""

	def __init__(self, config):
		""" Constructor """

		self.config = merge(DEFAULTS, config)

		if self.config.get('score') is None:
			self.config['score'] = trainer.default_score_kind(self.config['model'])

		self._dataset = None

	def dataset(self):
		"""Loads (once) and returns the dataset of ``data_dir``, or the
		composition toy graph when ``data_dir`` is ``"toy"``.

		:return: The experiment's dataset.
		:rtype: :class:`toruse.kg_data.Dataset`

		:raises InvalidArgumentError: If no ``data_dir`` is configured.
		"""

		if self._dataset is None:
			data_dir = self.config.get('data_dir')

			if not data_dir:
				raise InvalidArgumentError("data_dir is not configured")

			if data_dir == 'toy':
				self._dataset = kg_data.make_composition_kg(seed=self.config['seed'])
			else:
				self._dataset = kg_data.load_directory(data_dir)

		return self._dataset

	def train_config(self):
		"""Hyperparameters of the experiment.

		:rtype: :class:`toruse.trainer.TrainConfig`
		"""

		config = self.config

		return trainer.TrainConfig(
			margin=config['margin'],
			learning_rate=config['lr'],
			dimension=config['dim'],
			epochs=config['epochs'],
			groups=config['groups'],
			score_kind=config['score'],
			model_kind=config['model'],
			seed=config['seed'],
			filter_negatives=config['filter_negatives'],
			parallel=config['parallel'],
			threads=config['threads'],
		)

	def trainer(self, metrics=None):
		"""Initializes and returns a new Trainer for the experiment's
		dataset.

		:type metrics: file
		:param metrics: (Optional) Stream receiving per epoch JSON
			lines, defaults to :data:`None`.

		:return: A newly initialized instance of Trainer.
		:rtype: :class:`toruse.trainer.Trainer`
		"""

		return trainer.Trainer(self.dataset(), self.train_config(), metrics=metrics, validate_every=self.config['valid_every'])

	def evaluator(self, model, split='test', hits_cutoffs=evaluator.HITS_CUTOFFS):
		"""Evaluates ``model`` on the experiment's dataset.

		:type model: :class:`toruse.model.EmbeddingModel`
		:param model: Trained model.

		:type split: str
		:param split: (Optional) ``test`` or ``valid``, defaults to
			``test``.

		:type hits_cutoffs: list
		:param hits_cutoffs: (Optional) HITS@n cutoffs.

		:rtype: :class:`toruse.evaluator.RankReport`
		"""

		return evaluator.evaluate(model, self.dataset(), hits_cutoffs=hits_cutoffs, split=split, threads=self.config['threads'])
