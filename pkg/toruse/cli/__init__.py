#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""
Command line interface: ``toruse {train,eval,bench,inspect,sweep,toy}``.

Exit codes: 0 success, 1 any other library error, 2 bad arguments or
configuration, 3 I/O error, 4 dataset parse error, 5 model format
error, 6 consistency error.
"""

import os
import csv
import sys
import json
import logging
import argparse
import datetime
from dataclasses import replace

import toruse
from toruse import evaluator, kg_data, model as models, trainer
from toruse._config import DEFAULTS, GRID, env_defaults, load_config, merge
from toruse._exception import (
	ConsistencyError,
	DatasetParseError,
	InvalidArgumentError,
	ModelFormatError,
	TorusEError,
)
from ._manifest import MANIFEST_NAME, build_manifest, check_replay, read_manifest, write_manifest


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_FORMAT = 5
EXIT_CONSISTENCY = 6

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _int_list(text):
	try:
		return [int(item) for item in text.split(',') if item.strip()]
	except ValueError:
		raise argparse.ArgumentTypeError("expected a comma separated list of integers: {0!r}".format(text))


def _float_list(text):
	try:
		return [float(item) for item in text.split(',') if item.strip()]
	except ValueError:
		raise argparse.ArgumentTypeError("expected a comma separated list of numbers: {0!r}".format(text))


def _str_list(text):
	return [item.strip() for item in text.split(',') if item.strip()]


def build_parser():
	""" The argument parser of the ``toruse`` command.

	Every flag defaults to :data:`None` so that unset flags fall through
	to the configuration file, the environment and :data:`DEFAULTS`.

	:rtype: :class:`argparse.ArgumentParser`
	"""

	shared = argparse.ArgumentParser(add_help=False)
	shared.add_argument('--data-dir', help="directory holding train.txt, valid.txt and test.txt")
	shared.add_argument('--seed', type=int, help="random seed (default {0})".format(DEFAULTS['seed']))
	shared.add_argument('--threads', type=int, help="worker threads (default {0})".format(DEFAULTS['threads']))
	shared.add_argument('--config', help="TOML configuration file, overridden by flags")
	shared.add_argument('--log-level', help="DEBUG, INFO, WARNING or ERROR (default INFO)")

	hyper = argparse.ArgumentParser(add_help=False)
	hyper.add_argument('--model', choices=[kind.value for kind in models.ModelKind], help="embedding model (default toruse)")
	hyper.add_argument('--score', help="l1, l2 or el2 for toruse; l1 or l2sq for transe (default l1 / l2sq)")
	hyper.add_argument('--dim', type=int, help="embedding dimension (default {0})".format(DEFAULTS['dim']))
	hyper.add_argument('--margin', type=float, help="margin, grid {0} (default {1:g})".format(GRID['margins'], DEFAULTS['margin']))
	hyper.add_argument('--lr', type=float, help="learning rate, grid {0} (default {1:g})".format(GRID['lrs'], DEFAULTS['lr']))
	hyper.add_argument('--epochs', type=int, help="epochs (default {0})".format(DEFAULTS['epochs']))
	hyper.add_argument('--groups', type=int, help="groups per epoch (default {0})".format(DEFAULTS['groups']))
	hyper.add_argument('--filter-negatives', action='store_const', const=True, help="redraw corruptions that are known true triples")
	hyper.add_argument('--parallel', action='store_const', const=True, help="lock free multi-threaded updates, not reproducible")

	parser = argparse.ArgumentParser(prog='toruse', description="Knowledge graph embedding on a torus.")
	parser.add_argument('--version', action='version', version="%(prog)s " + toruse.__version__)
	commands = parser.add_subparsers(dest='command', metavar='command')
	commands.required = True

	train = commands.add_parser('train', parents=[shared, hyper], help="train a model")
	train.add_argument('--out', help="output directory for model.tkge, vocab.json, metrics.jsonl and manifest.json")
	train.add_argument('--valid-every', type=int, help="log the validation MRR every K epochs (default off)")
	train.add_argument('--manifest', help="replay the configuration of a previous run")
	train.set_defaults(handler=cmd_train)

	evaluate = commands.add_parser('eval', parents=[shared], help="evaluate a model by link prediction")
	evaluate.add_argument('--model-file', required=True, help="TKGE model file")
	evaluate.add_argument('--vocab', help="vocabulary JSON (default vocab.json next to the model)")
	evaluate.add_argument('--split', choices=['test', 'valid'], default='test')
	evaluate.add_argument('--hits', type=_int_list, default=list(evaluator.HITS_CUTOFFS), help="HITS@n cutoffs (default 1,3,10)")
	evaluate.add_argument('--per-relation', action='store_true', help="include the per relation filtered MRR")
	evaluate.add_argument('--report', help="write PREFIX.json and PREFIX.txt instead of printing")
	evaluate.set_defaults(handler=cmd_eval)

	bench = commands.add_parser('bench', parents=[shared, hyper], help="time training epochs against the dimension")
	bench.add_argument('--dims', type=_int_list, required=True, help="comma separated dimensions")
	bench.add_argument('--bench-epochs', type=int, default=3, help="timed epochs per run (default 3)")
	bench.add_argument('--out', help="CSV file (default stdout)")
	bench.set_defaults(handler=cmd_bench)

	inspect = commands.add_parser('inspect', parents=[shared], help="describe a model file")
	inspect.add_argument('--model-file', required=True, help="TKGE model file")
	inspect.add_argument('--vocab', help="vocabulary JSON")
	inspect.add_argument('--show', type=int, default=5, help="names listed from the vocabulary (default 5)")
	inspect.set_defaults(handler=cmd_inspect)

	sweep = commands.add_parser('sweep', parents=[shared, hyper], help="grid search by validation MRR")
	sweep.add_argument('--margins', type=_float_list, default=GRID['margins'])
	sweep.add_argument('--lrs', type=_float_list, default=GRID['lrs'])
	sweep.add_argument('--scores', type=_str_list, default=GRID['scores'])
	sweep.add_argument('--out', help="CSV file (default stdout)")
	sweep.set_defaults(handler=cmd_sweep)

	toy = commands.add_parser('toy', parents=[shared], help="write the composition toy knowledge graph")
	toy.add_argument('--out', required=True, help="output directory")
	toy.add_argument('--entities', type=int, default=200)
	toy.add_argument('--chain-length', type=int, default=5)
	toy.set_defaults(handler=cmd_toy)

	return parser


def resolve(args, *extra):
	""" Merge defaults, environment, configuration file, ``extra``
	sources and flags.

	:rtype: dict
	"""

	file_values = load_config(args.config) if getattr(args, 'config', None) else {}
	flags = {key: value for key, value in vars(args).items() if key not in ('handler', 'command', 'config')}

	resolved = merge(DEFAULTS, env_defaults(), file_values, *extra, flags)

	if resolved.get('score') is None:
		resolved['score'] = trainer.default_score_kind(resolved['model'])

	return resolved


def _require_data_dir(parser, resolved):
	if not resolved.get('data_dir'):
		parser.error("--data-dir is required (or set data_dir in the config file or TORUSE_DATA_DIR)")

	return resolved['data_dir']


def train_config(resolved):
	""" :class:`TrainConfig` of a resolved configuration. """

	return trainer.TrainConfig(
		margin=resolved['margin'],
		learning_rate=resolved['lr'],
		dimension=resolved['dim'],
		epochs=resolved['epochs'],
		groups=resolved['groups'],
		score_kind=resolved['score'],
		model_kind=resolved['model'],
		seed=resolved['seed'],
		filter_negatives=resolved['filter_negatives'],
		parallel=resolved['parallel'],
		threads=resolved['threads'],
	)


def _replayable(resolved):
	keys = ('model', 'score', 'dim', 'margin', 'lr', 'epochs', 'groups', 'seed', 'filter_negatives', 'parallel', 'threads')

	return {key: resolved[key] for key in keys}


def cmd_train(args, parser):
	manifest = read_manifest(args.manifest) if args.manifest else None
	resolved = resolve(args, manifest['config'] if manifest else None)

	data_dir = _require_data_dir(parser, resolved)
	out = resolved.get('out') or '.'

	if manifest:
		check_replay(manifest, data_dir)

	config = train_config(resolved)
	dataset = kg_data.load_directory(data_dir)

	os.makedirs(out, exist_ok=True)
	artifacts = {
		"model": os.path.join(out, 'model.tkge'),
		"vocabulary": os.path.join(out, 'vocab.json'),
		"metrics": os.path.join(out, 'metrics.jsonl'),
	}

	started = datetime.datetime.now(datetime.timezone.utc)

	with open(artifacts['metrics'], 'w', encoding='utf-8') as metrics:
		model, _ = trainer.Trainer(dataset, config, metrics=metrics, validate_every=resolved['valid_every']).run()

	finished = datetime.datetime.now(datetime.timezone.utc)

	models.save_model(model, artifacts['model'])
	models.write_vocabulary(dataset.vocabulary, artifacts['vocabulary'])

	manifest_path = os.path.join(out, MANIFEST_NAME)
	write_manifest(
		build_manifest(_replayable(resolved), data_dir, started, finished, artifacts, toruse.__version__),
		manifest_path,
	)

	logger.info("wrote %s, %s and %s", artifacts['model'], artifacts['vocabulary'], manifest_path)

	return EXIT_OK


def _load_checked(model_file, vocab_path, dataset=None):
	model = models.load_model(model_file)

	if vocab_path is None:
		candidate = os.path.join(os.path.dirname(os.path.abspath(model_file)), 'vocab.json')
		vocab_path = candidate if os.path.exists(candidate) else None

	vocabulary = models.read_vocabulary(vocab_path) if vocab_path else None

	if vocabulary is not None and (vocabulary.num_entities, vocabulary.num_relations) != (model.num_entities, model.num_relations):
		raise ConsistencyError(
			"model holds {0} entities / {1} relations, vocabulary {2} / {3}".format(
				model.num_entities, model.num_relations, vocabulary.num_entities, vocabulary.num_relations,
			)
		)

	if dataset is not None:
		if (dataset.num_entities, dataset.num_relations) != (model.num_entities, model.num_relations):
			raise ConsistencyError(
				"model holds {0} entities / {1} relations, dataset {2} / {3}".format(
					model.num_entities, model.num_relations, dataset.num_entities, dataset.num_relations,
				)
			)

		if vocabulary is not None and vocabulary != dataset.vocabulary:
			raise ConsistencyError("vocabulary does not match the dataset ids")

	return model, vocabulary


def cmd_eval(args, parser):
	resolved = resolve(args)
	data_dir = _require_data_dir(parser, resolved)

	dataset = kg_data.load_directory(data_dir)
	model, _ = _load_checked(args.model_file, args.vocab, dataset)

	report = evaluator.evaluate(model, dataset, hits_cutoffs=args.hits, split=args.split, threads=resolved['threads'])

	if args.report:
		with open(args.report + '.json', 'w', encoding='utf-8') as stream:
			stream.write(report.to_json(per_relation=args.per_relation) + "\n")

		with open(args.report + '.txt', 'w', encoding='utf-8') as stream:
			stream.write(report.to_text(per_relation=args.per_relation))

		logger.info("wrote %s.json and %s.txt", args.report, args.report)
	else:
		sys.stdout.write(report.to_text(per_relation=args.per_relation))

	return EXIT_OK


def _open_output(path):
	if path:
		return open(path, 'w', encoding='utf-8', newline='')

	return _Unclosed(sys.stdout)


class _Unclosed:

	def __init__(self, stream):
		self.stream = stream

	def __enter__(self):
		return self.stream

	def __exit__(self, *exc):
		self.stream.flush()


def run_bench(dataset, base_config, dims, epochs):
	""" Time training epochs of TorusE and TransE at every dimension.

	Both models use the ``l1`` score; timing includes negative sampling
	and the TransE normalization and excludes data loading.

	:type dataset: Dataset
	:param dataset: Loaded knowledge graph.

	:type base_config: TrainConfig
	:param base_config: Margin, learning rate, groups and seed.

	:type dims: list
	:param dims: Dimensions to time.

	:type epochs: int
	:param epochs: Timed epochs per run.

	:return: ``(model, score, dim, epoch, seconds)`` rows.
	:rtype: list
	"""

	if not dims:
		raise InvalidArgumentError("--dims must name at least one dimension")

	rows = []

	for kind in models.ModelKind:
		for dim in dims:
			config = replace(base_config, model_kind=kind.value, score_kind='l1', dimension=dim, epochs=epochs, parallel=False)
			runner = trainer.Trainer(dataset, config)

			for epoch in range(1, epochs + 1):
				stats = runner.run_epoch(epoch)
				rows.append((kind.value, 'l1', dim, epoch, stats.seconds))

	return rows


def summarize_bench(rows):
	""" Per model linear fit of mean epoch seconds against dimension.

	:return: ``{model: (slope, intercept, r_squared)}`` and
		``{dim: bool}`` telling whether TorusE was faster.
	:rtype: tuple
	"""

	means = {}

	for kind, _, dim, _, seconds in rows:
		means.setdefault(kind, {}).setdefault(dim, []).append(seconds)

	fits = {}

	for kind, by_dim in means.items():
		dims = sorted(by_dim)

		if len(dims) > 1:
			fits[kind] = evaluator.linear_fit(dims, [sum(by_dim[d]) / len(by_dim[d]) for d in dims])

	faster = {}

	for dim in sorted(means.get('toruse', {})):
		toruse_mean = sum(means['toruse'][dim]) / len(means['toruse'][dim])
		transe_mean = sum(means['transe'][dim]) / len(means['transe'][dim])
		faster[dim] = toruse_mean < transe_mean

	return fits, faster


def cmd_bench(args, parser):
	resolved = resolve(args)
	data_dir = _require_data_dir(parser, resolved)

	if args.bench_epochs < 1:
		raise InvalidArgumentError("--bench-epochs must be positive")

	dataset = kg_data.load_directory(data_dir)
	rows = run_bench(dataset, train_config(resolved), args.dims, args.bench_epochs)

	with _open_output(args.out) as stream:
		writer = csv.writer(stream, lineterminator='\n')
		writer.writerow(['model', 'score-kind', 'dim', 'epoch', 'seconds'])
		writer.writerows(rows)

	fits, faster = summarize_bench(rows)

	for kind, (slope, intercept, r_squared) in fits.items():
		logger.info("%s: %.3g s per dimension, intercept %.3g s, R^2 %.4f", kind, slope, intercept, r_squared)

	for dim, is_faster in faster.items():
		logger.info("dim %d: TorusE %s than TransE", dim, "faster" if is_faster else "not faster")

	return EXIT_OK


def cmd_inspect(args, parser):
	with open(args.model_file, 'rb') as stream:
		header = models.read_header(stream.read(64))

	model, vocabulary = _load_checked(args.model_file, args.vocab)

	info = {"format_version": header.version}
	info.update(model.describe())

	if vocabulary is not None:
		info["first_entities"] = vocabulary.entities[:args.show]
		info["first_relations"] = vocabulary.relations[:args.show]

	sys.stdout.write(json.dumps(info, indent=2, ensure_ascii=False) + "\n")

	return EXIT_OK


def cmd_sweep(args, parser):
	resolved = resolve(args)
	data_dir = _require_data_dir(parser, resolved)

	dataset = kg_data.load_directory(data_dir)
	results = trainer.sweep(dataset, train_config(resolved), args.margins, args.lrs, args.scores)

	with _open_output(args.out) as stream:
		writer = csv.writer(stream, lineterminator='\n')
		writer.writerow(['model', 'score', 'margin', 'lr', 'valid_mrr'])

		for config, mrr in results:
			writer.writerow([config.model_kind, config.score_kind, config.margin, config.learning_rate, mrr])

	best, mrr = results[0]
	logger.info("best: %s margin=%g lr=%g, valid filtered MRR %.4f", best.score_kind, best.margin, best.learning_rate, mrr)

	return EXIT_OK


def cmd_toy(args, parser):
	resolved = resolve(args)

	dataset = kg_data.make_composition_kg(entities=args.entities, chain_length=args.chain_length, seed=resolved['seed'])
	paths = dataset.write(args.out)

	logger.info("wrote %s", ", ".join(paths[name] for name in kg_data.SPLITS))

	return EXIT_OK


def _configure_logging(level):
	handler = logging.StreamHandler(sys.stderr)
	handler.setFormatter(logging.Formatter(_LOG_FORMAT))

	root = logging.getLogger('toruse')
	root.handlers[:] = [handler]
	root.setLevel(str(level).upper())
	root.propagate = False


def main(argv=None):
	""" Entry point of the ``toruse`` command.

	:type argv: list
	:param argv: (Optional) Arguments, defaults to ``sys.argv[1:]``.

	:return: Exit code.
	:rtype: int
	"""

	parser = build_parser()

	try:
		args = parser.parse_args(argv)
	except SystemExit as e:
		return e.code

	try:
		level = args.log_level or env_defaults().get('log_level') or DEFAULTS['log_level']
		_configure_logging(level)
	except ValueError as e:
		parser.print_usage(sys.stderr)
		sys.stderr.write("toruse: error: {0}\n".format(e))
		return EXIT_USAGE

	try:
		return args.handler(args, parser)
	except SystemExit as e:
		return e.code
	except DatasetParseError as e:
		logger.error("%s", e)
		return EXIT_PARSE
	except InvalidArgumentError as e:
		logger.error("%s", e)
		return EXIT_USAGE
	except ModelFormatError as e:
		logger.error("%s", e)
		return EXIT_FORMAT
	except ConsistencyError as e:
		logger.error("%s", e)
		return EXIT_CONSISTENCY
	except TorusEError as e:
		logger.error("%s", e)
		return EXIT_ERROR
	except OSError as e:
		logger.error("%s", e)
		return EXIT_IO
