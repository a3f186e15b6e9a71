#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


class TorusEError(Exception):
	""" Base class of every error raised by :mod:`toruse`. """


class InvalidArgumentError(TorusEError, ValueError):
	""" An argument violates the contract of the operation it was
	passed to (non-finite coordinates, mismatched dimensions, ids out
	of range, invalid hyperparameters).
	"""


class InvalidStateError(TorusEError, RuntimeError):
	""" The operation is not defined for the current state of its
	receiver.
	"""


class DatasetParseError(InvalidArgumentError):
	""" A triple file could not be parsed.

	:type path: str
	:param path: File that failed to parse.

	:type line_number: int
	:param line_number: (Optional) 1-based line number of the offending
		line, defaults to :data:`None` for whole-file errors.
	"""

	def __init__(self, message, path, line_number=None):
		self.path = str(path)
		self.line_number = line_number

		if line_number is None:
			super().__init__("{0}: {1}".format(self.path, message))
		else:
			super().__init__("{0}:{1}: {2}".format(self.path, line_number, message))


class ModelFormatError(TorusEError):
	""" A model file is not a valid TKGE document. """


class ConsistencyError(TorusEError):
	""" Artifacts that must agree with each other do not. """


def raise_for_dimension(a, b):
	""" Raise if two coordinate arrays have different shapes.

	:type a: :class:`numpy.ndarray`
	:param a: First operand.

	:type b: :class:`numpy.ndarray`
	:param b: Second operand.

	:raises InvalidArgumentError: When the shapes differ.
	"""

	if a.shape != b.shape:
		raise InvalidArgumentError("dimension mismatch: {0} != {1}".format(a.shape, b.shape))
