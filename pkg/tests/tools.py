#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import os

import numpy as np

from tests import config
from toruse import initialize_experiment
from toruse.kg_data import Dataset, Triple, Vocabulary, load_directory
from toruse.model import EmbeddingModel


def make_experiment(**overrides):
	c = {"data_dir": 'toy', "dim": 20, "epochs": 5, "groups": 10, "margin": 5.0, "lr": 0.01}
	c.update(overrides)

	return initialize_experiment(c)


def make_tiny():
	return load_directory(os.path.join(config.STATIC_DIR, 'tiny'))


def make_random_dataset(rng, num_entities, num_relations, size, test_size):
	""" Distinct random triples, the last ``test_size`` of them held
	out as the test split. """

	candidates = [
		(h, r, t)
		for h in range(num_entities)
		for r in range(num_relations)
		for t in range(num_entities)
	]
	picked = rng.choice(len(candidates), size=size, replace=False)
	triples = [candidates[i] for i in picked]

	vocabulary = Vocabulary(
		["e{0}".format(i) for i in range(num_entities)],
		["r{0}".format(i) for i in range(num_relations)],
	)

	return Dataset(vocabulary, triples[:-test_size], [], triples[-test_size:])


def make_random_model(rng, kind, score_kind, num_entities, num_relations, dimension):
	if kind == 'toruse':
		entities = rng.random((num_entities, dimension))
		relations = rng.random((num_relations, dimension))
	else:
		entities = rng.normal(size=(num_entities, dimension))
		relations = rng.normal(size=(num_relations, dimension))

	return EmbeddingModel(kind, score_kind, entities, relations)


def brute_force_ranks(model, dataset, split='test'):
	""" Raw and filtered ranks by enumerating and sorting every
	corruption one triple at a time. """

	known = set(map(tuple, dataset.all_triples().tolist()))
	ranks = []

	for head, relation, tail in dataset.split(split).tolist():
		for position in ('head', 'tail'):
			candidates = []

			for entity in range(model.num_entities):
				corrupted = (entity, relation, tail) if position == 'head' else (head, relation, entity)
				candidates.append((model.score_triple(Triple(*corrupted)), corrupted))

			target = (head, relation, tail)
			target_score = model.score_triple(Triple(*target))

			ordered = sorted(candidates)
			raw = 1 + sum(1 for score, _ in ordered if score < target_score)
			filtered = 1 + sum(
				1 for score, triple in ordered
				if score < target_score and (triple == target or triple not in known)
			)

			ranks.append((raw, filtered))

	return ranks


def oracle_metrics(ranks, cutoffs=(1, 3, 10)):
	raw = [r for r, _ in ranks]
	filtered = [f for _, f in ranks]

	return {
		"mrr_raw": sum(1.0 / r for r in raw) / len(raw),
		"mrr_filtered": sum(1.0 / f for f in filtered) / len(filtered),
		"hits": {n: sum(1 for f in filtered if f <= n) / len(filtered) for n in cutoffs},
	}
