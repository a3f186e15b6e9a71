#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


from toruse._random import _custom_rng
from toruse._exception import InvalidArgumentError


RELATIONS = ('r1', 'r2', 'r3')


def make_composition_kg(entities=200, chain_length=5, holdout=0.1, valid_fraction=0.05, seed=0):
	""" Small knowledge graph governed by inversion and composition
	rules.

	Entities are shuffled and cut into chains of ``chain_length``.
	``r1`` links every entity to its successor in the chain, ``r2`` is
	the inverse of ``r1`` and ``r3`` the two hop composition
	``r1 . r1``. A ``holdout`` fraction of all triples becomes the test
	split and ``valid_fraction`` the validation split; every entity
	keeps at least one training triple.

	:type entities: int
	:param entities: (Optional) Number of entities, defaults to 200.

	:type chain_length: int
	:param chain_length: (Optional) Entities per chain, defaults to 5.

	:type holdout: float
	:param holdout: (Optional) Test fraction, defaults to 0.1.

	:type valid_fraction: float
	:param valid_fraction: (Optional) Validation fraction, defaults to
		0.05.

	:type seed: int
	:param seed: (Optional) Generator seed, defaults to 0.

	:return: The generated dataset; entity ``i`` is named ``e{i:04d}``
		and has id ``i``.
	:rtype: Dataset
	"""

	from toruse.kg_data import Dataset, Vocabulary

	if chain_length < 3:
		raise InvalidArgumentError("chains need at least 3 entities for the composition rule")

	if entities < chain_length:
		raise InvalidArgumentError("need at least one full chain of entities")

	if not 0.0 <= holdout + valid_fraction < 1.0:
		raise InvalidArgumentError("held out fractions must leave a training split")

	rng = _custom_rng(seed, 'toy')
	order = rng.permutation(entities).tolist()

	chains = [order[start:start + chain_length] for start in range(0, entities, chain_length)]

	if len(chains) > 1 and len(chains[-1]) < chain_length:
		chains[-2].extend(chains.pop())

	triples = []

	for chain in chains:
		for a, b in zip(chain, chain[1:]):
			triples.append((a, 0, b))
			triples.append((b, 1, a))

		for a, c in zip(chain, chain[2:]):
			triples.append((a, 2, c))

	permutation = rng.permutation(len(triples)).tolist()
	triples = [triples[i] for i in permutation]

	n_test = int(round(holdout * len(triples)))
	n_valid = int(round(valid_fraction * len(triples)))

	remaining = {}
	for h, _, t in triples:
		remaining[h] = remaining.get(h, 0) + 1
		remaining[t] = remaining.get(t, 0) + 1

	held, train = [], []

	for triple in triples:
		h, _, t = triple

		if len(held) < n_test + n_valid and remaining[h] > 1 and remaining[t] > 1:
			remaining[h] -= 1
			remaining[t] -= 1
			held.append(triple)
		else:
			train.append(triple)

	vocabulary = Vocabulary(["e{0:04d}".format(i) for i in range(entities)], RELATIONS)

	return Dataset(vocabulary, train, held[n_test:], held[:n_test])
