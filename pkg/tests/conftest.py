#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import logging

import pytest

from tests.tools import make_tiny
from toruse.kg_data import make_composition_kg


@pytest.fixture(scope='session')
def tiny():
	return make_tiny()


@pytest.fixture(scope='session')
def toy():
	return make_composition_kg(seed=0)


@pytest.fixture(scope='session')
def toy_dir(tmp_path_factory):
	directory = tmp_path_factory.mktemp('toy')
	make_composition_kg(entities=40, seed=1).write(str(directory))

	return str(directory)


@pytest.fixture(autouse=True)
def no_env_overrides(monkeypatch):
	for name in ('TORUSE_THREADS', 'TORUSE_LOG_LEVEL', 'TORUSE_DATA_DIR'):
		monkeypatch.delenv(name, raising=False)


@pytest.fixture(autouse=True)
def restore_package_logger():
	# the command line entry point installs its own handler
	package_logger = logging.getLogger('toruse')
	handlers, level, propagate = package_logger.handlers[:], package_logger.level, package_logger.propagate

	yield

	package_logger.handlers[:] = handlers
	package_logger.setLevel(level)
	package_logger.propagate = propagate
