#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import csv
import json
import os

import pytest

from tests import config
from toruse import evaluator
from toruse.cli import (
	EXIT_CONSISTENCY, EXIT_FORMAT, EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_USAGE,
	main, summarize_bench,
)
from toruse.kg_data import Vocabulary, make_composition_kg
from toruse.model import write_vocabulary


TRAIN_FLAGS = ['--dim', '8', '--epochs', '2', '--groups', '5', '--margin', '4', '--lr', '0.01']


def _train(data_dir, out, *extra):
	return main(['train', '--data-dir', data_dir, '--out', out] + TRAIN_FLAGS + list(extra))


@pytest.fixture(scope='module')
def trained(toy_dir, tmp_path_factory):
	data_dir = toy_dir
	out = str(tmp_path_factory.mktemp('run'))
	assert _train(data_dir, out) == EXIT_OK

	return data_dir, out


class TestTrain:

	def test_artifacts(self, trained):
		_, out = trained

		for name in ('model.tkge', 'vocab.json', 'metrics.jsonl', 'manifest.json'):
			assert os.path.exists(os.path.join(out, name))

		with open(os.path.join(out, 'metrics.jsonl')) as stream:
			assert len(stream.read().splitlines()) == 2

	def test_manifest(self, trained):
		data_dir, out = trained

		with open(os.path.join(out, 'manifest.json')) as stream:
			manifest = json.load(stream)

		assert manifest["config"]["dim"] == 8
		assert manifest["config"]["score"] == 'l1'
		assert manifest["seed"] == 0
		assert manifest["data_dir"] == data_dir
		assert set(manifest["checksums"]) == {'train', 'valid', 'test'}
		assert manifest["seconds"] >= 0.0

	def test_identical_runs_give_identical_models(self, trained, tmp_path):
		data_dir, out = trained

		assert _train(data_dir, str(tmp_path)) == EXIT_OK

		with open(os.path.join(out, 'model.tkge'), 'rb') as a, open(str(tmp_path / 'model.tkge'), 'rb') as b:
			assert a.read() == b.read()

	def test_manifest_replay(self, trained, tmp_path):
		data_dir, out = trained

		code = main([
			'train', '--data-dir', data_dir, '--out', str(tmp_path),
			'--manifest', os.path.join(out, 'manifest.json'),
		])

		assert code == EXIT_OK

		with open(os.path.join(out, 'model.tkge'), 'rb') as a, open(str(tmp_path / 'model.tkge'), 'rb') as b:
			assert a.read() == b.read()

	def test_missing_data_dir(self, tmp_path):
		assert main(['train', '--out', str(tmp_path)] + TRAIN_FLAGS) == EXIT_USAGE

	def test_invalid_hyperparameter(self, trained, tmp_path):
		data_dir, _ = trained

		assert _train(data_dir, str(tmp_path), '--margin', '-1') == EXIT_USAGE

	def test_score_for_wrong_model(self, trained, tmp_path):
		data_dir, _ = trained

		assert _train(data_dir, str(tmp_path), '--model', 'transe', '--score', 'el2') == EXIT_USAGE

	def test_malformed_dataset(self, tmp_path):
		assert _train(os.path.join(config.STATIC_DIR, 'malformed'), str(tmp_path)) == EXIT_PARSE

	def test_absent_dataset(self, tmp_path):
		assert _train(str(tmp_path / 'nowhere'), str(tmp_path)) == EXIT_IO

	def test_config_file(self, trained, tmp_path):
		data_dir, _ = trained

		config_path = tmp_path / 'run.toml'
		config_path.write_text('data_dir = "{0}"\n\n[train]\nmodel = "transe"\ndim = 6\n'.format(data_dir.replace('\\', '/')))

		out = str(tmp_path / 'out')
		code = main(['train', '--config', str(config_path), '--out', out, '--epochs', '1', '--groups', '5'])

		assert code == EXIT_OK

		with open(os.path.join(out, 'manifest.json')) as stream:
			manifest = json.load(stream)

		assert manifest["config"]["model"] == 'transe'
		assert manifest["config"]["score"] == 'l2sq'
		assert manifest["config"]["dim"] == 6


class TestEval:

	def test_report_files(self, trained, tmp_path):
		data_dir, out = trained
		prefix = str(tmp_path / 'report')

		code = main([
			'eval', '--data-dir', data_dir, '--model-file', os.path.join(out, 'model.tkge'),
			'--per-relation', '--report', prefix,
		])

		assert code == EXIT_OK

		with open(prefix + '.json') as stream:
			document = json.load(stream)

		assert {"mrr_raw", "mrr_filtered", "hits", "per_relation"} <= set(document)
		assert set(document["hits"]) == {"1", "3", "10"}
		assert set(document["per_relation"]) <= {'r1', 'r2', 'r3'}

		with open(prefix + '.txt') as stream:
			assert "MRR (filtered)" in stream.read()

	def test_prints_without_report(self, trained, capsys):
		data_dir, out = trained

		assert main(['eval', '--data-dir', data_dir, '--model-file', os.path.join(out, 'model.tkge'), '--split', 'valid']) == EXIT_OK
		assert "HITS@10" in capsys.readouterr().out

	def test_bad_magic(self, trained, tmp_path):
		data_dir, out = trained

		with open(os.path.join(out, 'model.tkge'), 'rb') as stream:
			data = bytearray(stream.read())

		data[:4] = b'XXXX'
		broken = tmp_path / 'model.tkge'
		broken.write_bytes(bytes(data))

		assert main(['eval', '--data-dir', data_dir, '--model-file', str(broken)]) == EXIT_FORMAT

	def test_vocabulary_mismatch(self, trained, tmp_path):
		data_dir, out = trained

		vocab = str(tmp_path / 'vocab.json')
		write_vocabulary(Vocabulary(['a', 'b'], ['r']), vocab)

		code = main(['eval', '--data-dir', data_dir, '--model-file', os.path.join(out, 'model.tkge'), '--vocab', vocab])

		assert code == EXIT_CONSISTENCY

	def test_dataset_mismatch(self, trained, tmp_path):
		_, out = trained

		other = str(tmp_path / 'other')
		make_composition_kg(entities=30, seed=3).write(other)

		assert main(['eval', '--data-dir', other, '--model-file', os.path.join(out, 'model.tkge')]) == EXIT_CONSISTENCY

	def test_missing_model_file(self, trained, tmp_path):
		data_dir, _ = trained

		assert main(['eval', '--data-dir', data_dir, '--model-file', str(tmp_path / 'absent.tkge')]) == EXIT_IO


class TestInspect:

	def test_describes_model(self, trained, capsys):
		_, out = trained

		assert main(['inspect', '--model-file', os.path.join(out, 'model.tkge')]) == EXIT_OK

		info = json.loads(capsys.readouterr().out)

		assert info["model"] == 'toruse'
		assert info["dimension"] == 8
		assert info["format_version"] == 1
		assert sorted(info["first_relations"]) == ['r1', 'r2', 'r3']


class TestBench:

	def test_csv_shape(self, trained, tmp_path):
		data_dir, _ = trained
		path = str(tmp_path / 'bench.csv')

		code = main(['bench', '--data-dir', data_dir, '--dims', '4,8,16', '--bench-epochs', '2', '--groups', '5', '--out', path])

		assert code == EXIT_OK

		with open(path) as stream:
			rows = list(csv.DictReader(stream))

		assert list(rows[0]) == ['model', 'score-kind', 'dim', 'epoch', 'seconds']
		assert len(rows) == 2 * 3 * 2
		assert {row['model'] for row in rows} == {'toruse', 'transe'}
		assert all(float(row['seconds']) > 0.0 for row in rows)

	def test_summary(self):
		rows = [
			('toruse', 'l1', 10, 1, 1.0), ('toruse', 'l1', 20, 1, 2.0), ('toruse', 'l1', 30, 1, 3.0),
			('transe', 'l1', 10, 1, 2.0), ('transe', 'l1', 20, 1, 4.0), ('transe', 'l1', 30, 1, 6.0),
		]

		fits, faster = summarize_bench(rows)

		assert fits['toruse'][2] == pytest.approx(1.0)
		assert fits['transe'][0] == pytest.approx(0.2)
		assert faster == {10: True, 20: True, 30: True}

	def test_empty_dims(self, trained):
		data_dir, _ = trained

		assert main(['bench', '--data-dir', data_dir, '--dims', ',']) == EXIT_USAGE

	@pytest.mark.slow
	def test_scaling_shape(self, tmp_path):
		data_dir = str(tmp_path / 'toy')
		make_composition_kg(seed=0).write(data_dir)
		path = str(tmp_path / 'bench.csv')

		code = main(['bench', '--data-dir', data_dir, '--dims', '128,1024,8192', '--bench-epochs', '2', '--groups', '10', '--out', path])

		assert code == EXIT_OK

		with open(path) as stream:
			rows = [(row['model'], row['score-kind'], int(row['dim']), int(row['epoch']), float(row['seconds'])) for row in csv.DictReader(stream)]

		fits, faster = summarize_bench(rows)

		assert fits['toruse'][2] >= 0.95
		assert fits['transe'][2] >= 0.95
		assert all(faster.values())


class TestSweepAndToy:

	def test_toy_writes_splits(self, tmp_path):
		out = str(tmp_path / 'toy')

		assert main(['toy', '--out', out, '--entities', '30']) == EXIT_OK

		for name in ('train.txt', 'valid.txt', 'test.txt'):
			assert os.path.getsize(os.path.join(out, name)) > 0

	def test_sweep_csv(self, trained, tmp_path):
		data_dir, _ = trained
		path = str(tmp_path / 'sweep.csv')

		code = main([
			'sweep', '--data-dir', data_dir, '--dim', '4', '--epochs', '1', '--groups', '5',
			'--margins', '1,2', '--lrs', '0.01', '--scores', 'l1', '--out', path,
		])

		assert code == EXIT_OK

		with open(path) as stream:
			rows = list(csv.DictReader(stream))

		assert len(rows) == 2
		assert float(rows[0]['valid_mrr']) >= float(rows[1]['valid_mrr'])


class TestUsage:

	def test_no_command(self):
		assert main([]) == EXIT_USAGE

	def test_unknown_model(self, tmp_path):
		assert main(['train', '--model', 'rotate', '--data-dir', str(tmp_path)]) == EXIT_USAGE

	def test_version(self, capsys):
		assert main(['--version']) == 0
		assert capsys.readouterr().out.startswith('toruse ')

	def test_environment_data_dir(self, trained, tmp_path, monkeypatch):
		data_dir, _ = trained
		monkeypatch.setenv('TORUSE_DATA_DIR', data_dir)

		assert main(['train', '--out', str(tmp_path)] + TRAIN_FLAGS) == EXIT_OK

	def test_hits_cutoffs_flag(self, trained, tmp_path):
		data_dir, out = trained
		prefix = str(tmp_path / 'report')

		main(['eval', '--data-dir', data_dir, '--model-file', os.path.join(out, 'model.tkge'), '--hits', '1,5', '--report', prefix])

		with open(prefix + '.json') as stream:
			assert set(json.load(stream)["hits"]) == {"1", "5"}

		assert evaluator.HITS_CUTOFFS == (1, 3, 10)
