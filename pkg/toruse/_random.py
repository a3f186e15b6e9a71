#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import zlib

import numpy as np


_SEED_MASK = (1 << 64) - 1


def _custom_rng(seed, *stream):
	""" Random generator bound to a named stream of one seed.

	Every consumer of randomness (initialization, the shuffle and
	negative draws of each epoch, the toy graph generator) asks for
	its own stream, so that replaying a run with the same seed
	replays every draw exactly, regardless of how many numbers other
	streams consumed.

	The bit generator is Philox, a counter-based generator; the stream
	names and indices become the spawn key of the seed sequence.

	:type seed: int
	:param seed: Run seed, reduced to 64 bits.

	:type stream: str or int
	:param stream: Names and indices identifying the stream, e.g.
		``('epoch', 3)``.

	:return: A freshly seeded generator.
	:rtype: :class:`numpy.random.Generator`
	"""

	spawn_key = tuple(_stream_code(part) for part in stream)
	sequence = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=spawn_key)

	return np.random.Generator(np.random.Philox(sequence))


def _stream_code(part):
	if isinstance(part, (int, np.integer)):
		return int(part) & 0xFFFFFFFF

	return zlib.crc32(str(part).encode("utf-8"))
