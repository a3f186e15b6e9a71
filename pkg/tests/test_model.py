#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import struct

import numpy as np
import pytest

from tests.tools import make_random_model
from toruse import model as models
from toruse.kg_data import Triple, Vocabulary
from toruse.model import EmbeddingModel, init_model
from toruse.model._tkge_format import convert_from_tkge, convert_to_tkge
from toruse._random import _custom_rng
from toruse._exception import InvalidArgumentError, InvalidStateError, ModelFormatError


VARIANTS = [('toruse', 'l1'), ('toruse', 'l2'), ('toruse', 'el2'), ('transe', 'l1'), ('transe', 'l2sq')]


class TestInit:

	def test_torus_coordinates_are_canonical(self):
		model = init_model('toruse', 30, 4, 16, 'l1', _custom_rng(0))

		assert model.entities.shape == (30, 16)
		assert model.relations.shape == (4, 16)
		assert np.all((model.entities >= 0.0) & (model.entities < 1.0))
		assert np.all((model.relations >= 0.0) & (model.relations < 1.0))

	def test_transe_entities_start_on_the_sphere(self):
		model = init_model('transe', 30, 4, 16, 'l2sq', _custom_rng(0))

		np.testing.assert_allclose(np.linalg.norm(model.entities, axis=1), 1.0)

	def test_same_rng_same_tables(self):
		a = init_model('toruse', 10, 2, 8, 'l1', _custom_rng(5, 'init'))
		b = init_model('toruse', 10, 2, 8, 'l1', _custom_rng(5, 'init'))

		np.testing.assert_array_equal(a.entities, b.entities)
		np.testing.assert_array_equal(a.relations, b.relations)

	@pytest.mark.parametrize('value', [1.0, -0.25, np.nan])
	def test_torus_tables_must_be_canonical(self, value):
		with pytest.raises(InvalidArgumentError):
			EmbeddingModel('toruse', 'l1', [[0.1, value]], [[0.2, 0.3]])

		with pytest.raises(InvalidArgumentError):
			EmbeddingModel('toruse', 'l1', [[0.1, 0.2]], [[value, 0.3]])

	def test_transe_tables_are_unbounded(self):
		model = EmbeddingModel('transe', 'l1', [[3.0, -4.0]], [[1.5, 0.0]])

		assert model.entities[0, 1] == -4.0

	def test_zero_dimension(self):
		with pytest.raises(InvalidArgumentError):
			init_model('toruse', 10, 2, 0, 'l1', _custom_rng(0))

	def test_score_must_fit_model(self):
		with pytest.raises(InvalidArgumentError):
			init_model('transe', 10, 2, 4, 'el2', _custom_rng(0))

		with pytest.raises(InvalidArgumentError):
			init_model('toruse', 10, 2, 4, 'l2sq', _custom_rng(0))


class TestScoring:

	@pytest.mark.parametrize('kind,score', VARIANTS)
	def test_replacements_match_single_scores(self, kind, score):
		rng = np.random.default_rng(1)
		model = make_random_model(rng, kind, score, 12, 3, 7)

		triple = Triple(4, 2, 9)
		tails = model.score_all_replacements(triple, 'tail')
		heads = model.score_all_replacements(triple, 'head')

		for entity in range(model.num_entities):
			assert tails[entity] == pytest.approx(model.score_triple(Triple(4, 2, entity)), rel=0, abs=1e-12)
			assert heads[entity] == pytest.approx(model.score_triple(Triple(entity, 2, 9)), rel=0, abs=1e-12)

	def test_replacements_across_chunks(self, monkeypatch):
		monkeypatch.setattr(models, '_CHUNK_ELEMENTS', 10)

		rng = np.random.default_rng(2)
		model = make_random_model(rng, 'toruse', 'el2', 25, 2, 4)

		tails = model.score_all_replacements(Triple(0, 1, 0), 'tail')

		np.testing.assert_allclose(tails, [model.score_triple(Triple(0, 1, e)) for e in range(25)], rtol=0, atol=1e-12)

	def test_torus_score_is_bounded(self):
		rng = np.random.default_rng(3)

		for score in ('l1', 'l2', 'el2'):
			model = make_random_model(rng, 'toruse', score, 20, 2, 9)
			scores = model.score_all_replacements(Triple(3, 1, 5), 'head')

			assert np.all((scores >= 0.0) & (scores <= 9.0))

	def test_el2_matches_complex_exponentials(self):
		rng = np.random.default_rng(4)
		model = make_random_model(rng, 'toruse', 'el2', 5, 1, 50)

		h, r, t = model.entities[0], model.relations[0], model.entities[1]
		bilinear = np.real(np.exp(2j * np.pi * h) * np.exp(2j * np.pi * r) * np.conj(np.exp(2j * np.pi * t))).sum()

		assert model.score_triple(Triple(0, 0, 1)) == pytest.approx((50 - bilinear) / 2.0, abs=1e-9)

	def test_transe_scores(self):
		model = EmbeddingModel('transe', 'l1', [[1.0, 0.0], [0.0, 1.0]], [[0.5, 0.5]])

		assert model.score_triple(Triple(0, 0, 1)) == pytest.approx(2.0)

		model = EmbeddingModel('transe', 'l2sq', [[1.0, 0.0], [0.0, 1.0]], [[0.5, 0.5]])

		assert model.score_triple(Triple(0, 0, 1)) == pytest.approx(2.5)

	def test_ids_out_of_range(self):
		model = make_random_model(np.random.default_rng(0), 'toruse', 'l1', 3, 1, 2)

		with pytest.raises(InvalidArgumentError):
			model.score_triple(Triple(0, 0, 3))

		with pytest.raises(InvalidArgumentError):
			model.score_triple(Triple(0, 1, 0))

		with pytest.raises(InvalidArgumentError):
			model.score_all_replacements(Triple(0, 0, 0), 'relation')

	def test_positive_score_ratio_of_exact_model(self):
		entities = np.array([[0.1, 0.2], [0.4, 0.9], [0.7, 0.6]])
		relation = np.array([[0.3, 0.7]])
		model = EmbeddingModel('toruse', 'l1', entities, relation)

		ratio = models.positive_score_ratio(model, [[0, 0, 1], [1, 0, 2]], _custom_rng(0))

		assert ratio == pytest.approx(0.0, abs=1e-12)


class TestNormalization:

	def test_torus_models_refuse_normalization(self):
		model = init_model('toruse', 5, 1, 3, 'l1', _custom_rng(0))

		with pytest.raises(InvalidStateError):
			model.normalize_entities()

	def test_zero_row(self):
		model = EmbeddingModel('transe', 'l1', np.zeros((2, 3)), np.ones((1, 3)))

		with pytest.raises(InvalidStateError):
			model.normalize_entities()

	def test_relations_are_untouched(self):
		model = EmbeddingModel('transe', 'l1', [[3.0, 4.0]], [[3.0, 4.0]])
		model.normalize_entities()

		np.testing.assert_allclose(model.entities, [[0.6, 0.8]])
		np.testing.assert_array_equal(model.relations, [[3.0, 4.0]])


class TestPersistence:

	@pytest.mark.parametrize('kind,score', VARIANTS)
	def test_save_then_load(self, kind, score, tmp_path):
		model = make_random_model(np.random.default_rng(6), kind, score, 7, 2, 5)
		path = str(tmp_path / 'model.tkge')

		models.save_model(model, path)
		loaded = models.load_model(path)

		assert loaded.kind == model.kind
		assert loaded.score_kind == model.score_kind
		np.testing.assert_array_equal(loaded.entities, model.entities)
		np.testing.assert_array_equal(loaded.relations, model.relations)

	def test_header_layout(self):
		model = make_random_model(np.random.default_rng(7), 'toruse', 'el2', 3, 2, 4)
		data = convert_to_tkge(model)

		assert data[:4] == b'TKGE'
		assert struct.unpack_from('<HBBIII', data, 4) == (1, 0, 2, 4, 3, 2)
		assert len(data) == 20 + 8 * 4 * (3 + 2)

		header = models.read_header(data)
		assert (header.model, header.score, header.dimension) == ('toruse', 'el2', 4)

	def test_bad_magic(self):
		data = bytearray(convert_to_tkge(make_random_model(np.random.default_rng(8), 'toruse', 'l1', 2, 1, 2)))
		data[:4] = b'KGET'

		with pytest.raises(ModelFormatError):
			convert_from_tkge(bytes(data))

	def test_unsupported_version(self):
		data = bytearray(convert_to_tkge(make_random_model(np.random.default_rng(8), 'toruse', 'l1', 2, 1, 2)))
		struct.pack_into('<H', data, 4, 99)

		with pytest.raises(ModelFormatError):
			convert_from_tkge(bytes(data))

	def test_truncated_body(self):
		data = convert_to_tkge(make_random_model(np.random.default_rng(8), 'toruse', 'l1', 2, 1, 2))

		with pytest.raises(ModelFormatError):
			convert_from_tkge(data[:-1])

		with pytest.raises(ModelFormatError):
			convert_from_tkge(data[:10])

	def test_coordinates_off_the_torus(self):
		data = bytearray(convert_to_tkge(make_random_model(np.random.default_rng(8), 'toruse', 'l1', 2, 1, 2)))
		struct.pack_into('<d', data, 20, 1.5)

		with pytest.raises(ModelFormatError):
			convert_from_tkge(bytes(data))

	def test_unknown_kind_code(self):
		data = bytearray(convert_to_tkge(make_random_model(np.random.default_rng(8), 'toruse', 'l1', 2, 1, 2)))
		data[6] = 7

		with pytest.raises(ModelFormatError):
			convert_from_tkge(bytes(data))

	def test_vocabulary_file(self, tmp_path):
		vocabulary = Vocabulary(['Zürich', 'b'], ['located_in'])
		path = str(tmp_path / 'vocab.json')

		models.write_vocabulary(vocabulary, path)

		assert models.read_vocabulary(path) == vocabulary

	def test_describe(self):
		model = init_model('transe', 4, 2, 3, 'l1', _custom_rng(0))
		info = model.describe()

		assert info["model"] == 'transe'
		assert info["entities"] == 4 and info["relations"] == 2 and info["dimension"] == 3
		assert info["entity_norm_mean"] == pytest.approx(1.0)
