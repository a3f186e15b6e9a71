#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


"""
Geometry of the n-dimensional torus ``T^n = R^n / Z^n``.

A point ``[x]`` is stored as its canonical representative, the
fractional part of ``x``, which lies in ``[0, 1)^n``. Differences of
points are carried as wrapped differences in ``(-0.5, 0.5]^n``, the
representative of minimal magnitude, from which the three distances
and the three normalized scoring functions follow directly.

All functions are pure and work in 64-bit floating point.
"""

import enum

import numpy as np

from toruse._exception import InvalidArgumentError, raise_for_dimension


class ScoreKind(str, enum.Enum):
	""" Distance a torus score is built on. """

	L1 = 'l1'
	L2 = 'l2'
	EL2 = 'el2'

	@classmethod
	def parse(cls, value):
		""" Resolve a score kind from its name.

		:type value: str or ScoreKind
		:param value: ``l1``, ``l2`` or ``el2`` (case insensitive).

		:return: The matching score kind.
		:rtype: ScoreKind

		:raises InvalidArgumentError: For unknown names.
		"""

		if isinstance(value, cls):
			return value

		try:
			return cls(str(value).lower())
		except ValueError:
			raise InvalidArgumentError("unknown torus score kind: {0!r}".format(value))


class TorusPoint:
	""" A point of ``T^n`` held as its representative in ``[0, 1)^n``.

	:type coords: :class:`numpy.ndarray` or list
	:param coords: Canonical coordinates. Use :func:`canonicalize` to
		build a point from arbitrary reals.

	:raises InvalidArgumentError: If a coordinate lies outside
		``[0, 1)`` or the point is empty.
	"""

	__slots__ = ('coords',)

	def __init__(self, coords):
		""" Constructor """

		coords = np.array(coords, dtype=np.float64).reshape(-1)

		if coords.size == 0:
			raise InvalidArgumentError("a torus point needs at least one coordinate")

		if not np.all((coords >= 0.0) & (coords < 1.0)):
			raise InvalidArgumentError("torus coordinates must lie in [0, 1)")

		coords.flags.writeable = False
		self.coords = coords

	@property
	def dimension(self):
		return self.coords.size

	def __add__(self, other):
		return torus_add(self, other)

	def __eq__(self, other):
		if not isinstance(other, TorusPoint):
			return NotImplemented

		return self.coords.shape == other.coords.shape and bool(np.all(self.coords == other.coords))

	def __hash__(self):
		return hash(self.coords.tobytes())

	def __repr__(self):
		return "TorusPoint({0})".format(np.array2string(self.coords, precision=6))


class WrappedDiff:
	""" Signed minimal representative of a difference of two points.

	:type deltas: :class:`numpy.ndarray` or list
	:param deltas: Per coordinate differences in ``(-0.5, 0.5]``.

	:raises InvalidArgumentError: If a delta lies outside
		``(-0.5, 0.5]``.
	"""

	__slots__ = ('deltas',)

	def __init__(self, deltas):
		""" Constructor """

		deltas = np.array(deltas, dtype=np.float64).reshape(-1)

		if not np.all((deltas > -0.5) & (deltas <= 0.5)):
			raise InvalidArgumentError("wrapped differences must lie in (-0.5, 0.5]")

		deltas.flags.writeable = False
		self.deltas = deltas

	@property
	def dimension(self):
		return self.deltas.size

	def __repr__(self):
		return "WrappedDiff({0})".format(np.array2string(self.deltas, precision=6))


def frac(raw):
	""" Fractional part of every element of ``raw``, in ``[0, 1)``.

	``raw - floor(raw)`` rounds up to exactly 1.0 for tiny negative
	inputs; those map to 0.0, the same point of the circle.

	:type raw: :class:`numpy.ndarray`
	:param raw: Finite reals of any shape.

	:return: Canonical coordinates, same shape as ``raw``.
	:rtype: :class:`numpy.ndarray`
	"""

	raw = np.asarray(raw, dtype=np.float64)
	out = raw - np.floor(raw)

	return np.where(out >= 1.0, 0.0, out)


def wrap(raw_delta):
	""" Minimal signed representative of differences modulo 1.

	:type raw_delta: :class:`numpy.ndarray`
	:param raw_delta: Finite real differences of any shape.

	:return: Differences in ``(-0.5, 0.5]``, equal to ``raw_delta``
		modulo integers. ``+-0.5`` both map to ``+0.5``.
	:rtype: :class:`numpy.ndarray`
	"""

	raw_delta = np.asarray(raw_delta, dtype=np.float64)
	out = raw_delta - np.ceil(raw_delta - 0.5)

	return np.where(out <= -0.5, out + 1.0, out)


def canonicalize(raw):
	""" Project a real vector onto the torus.

	:type raw: :class:`numpy.ndarray` or list
	:param raw: Finite real coordinates.

	:return: The point whose representative is ``raw - floor(raw)``.
	:rtype: TorusPoint

	:raises InvalidArgumentError: If any coordinate is NaN or infinite.
	"""

	raw = np.array(raw, dtype=np.float64).reshape(-1)

	if not np.all(np.isfinite(raw)):
		raise InvalidArgumentError("cannot canonicalize non-finite coordinates")

	return TorusPoint(frac(raw))


def torus_add(a, b):
	""" Group operation ``[a] + [b] = [a + b]``.

	:type a: TorusPoint
	:param a: First summand.

	:type b: TorusPoint
	:param b: Second summand.

	:return: The canonical sum.
	:rtype: TorusPoint

	:raises InvalidArgumentError: On dimension mismatch.
	"""

	raise_for_dimension(a.coords, b.coords)

	return TorusPoint(frac(a.coords + b.coords))


def wrapped_diff(a, b):
	""" Signed minimal difference ``a - b`` on the torus.

	:type a: TorusPoint
	:param a: Minuend.

	:type b: TorusPoint
	:param b: Subtrahend.

	:return: Deltas with ``|delta_i|`` the circle distance between
		``a_i`` and ``b_i`` and ``a_i - b_i - delta_i`` an integer.
	:rtype: WrappedDiff

	:raises InvalidArgumentError: On dimension mismatch.
	"""

	raise_for_dimension(a.coords, b.coords)

	return WrappedDiff(wrap(a.coords - b.coords))


def _deltas(delta):
	if isinstance(delta, WrappedDiff):
		return delta.deltas

	return np.asarray(delta, dtype=np.float64)


def distance_from_diff(kind, deltas):
	""" Torus distances for an array of wrapped differences.

	:type kind: ScoreKind or str
	:param kind: Distance to compute.

	:type deltas: :class:`numpy.ndarray`
	:param deltas: Wrapped differences, the last axis holds the
		coordinates.

	:return: Distances, one per row of ``deltas``.
	:rtype: :class:`numpy.ndarray` or float
	"""

	kind = ScoreKind.parse(kind)
	deltas = _deltas(deltas)

	if kind is ScoreKind.L1:
		return np.abs(deltas).sum(axis=-1)

	if kind is ScoreKind.L2:
		return np.sqrt(np.square(deltas).sum(axis=-1))

	# |exp(2 pi i a) - exp(2 pi i b)|^2 = 4 sin^2(pi (a - b))
	return np.sqrt((4.0 * np.square(np.sin(np.pi * deltas))).sum(axis=-1))


def score_from_diff(kind, deltas):
	""" Normalized scores for an array of wrapped differences.

	The scores are ``2 d_L1``, ``4 d_L2^2`` and ``d_eL2^2 / 4``, so that
	each one is 0 when the principle holds and ``n`` when every
	coordinate is antipodal.

	:type kind: ScoreKind or str
	:param kind: Scoring function.

	:type deltas: :class:`numpy.ndarray`
	:param deltas: Wrapped differences ``[h] + [r] - [t]``, the last
		axis holds the coordinates.

	:return: Scores in ``[0, n]``, one per row of ``deltas``.
	:rtype: :class:`numpy.ndarray` or float
	"""

	kind = ScoreKind.parse(kind)
	deltas = _deltas(deltas)

	if kind is ScoreKind.L1:
		return 2.0 * np.abs(deltas).sum(axis=-1)

	if kind is ScoreKind.L2:
		return 4.0 * np.square(deltas).sum(axis=-1)

	return np.square(np.sin(np.pi * deltas)).sum(axis=-1)


def distance(kind, a, b):
	""" Distance between two points of the torus.

	:type kind: ScoreKind or str
	:param kind: ``l1``, ``l2`` or ``el2``.

	:type a: TorusPoint
	:param a: First point.

	:type b: TorusPoint
	:param b: Second point.

	:return: The (true, non squared) distance.
	:rtype: float

	:raises InvalidArgumentError: On dimension mismatch.
	"""

	return float(distance_from_diff(kind, wrapped_diff(a, b)))


def score(kind, h, r, t):
	""" Score of a triple embedded on the torus; lower is better.

	:type kind: ScoreKind or str
	:param kind: Scoring function.

	:type h: TorusPoint
	:param h: Head embedding.

	:type r: TorusPoint
	:param r: Relation embedding.

	:type t: TorusPoint
	:param t: Tail embedding.

	:return: A value in ``[0, n]``.
	:rtype: float

	:raises InvalidArgumentError: On dimension mismatch.
	"""

	return float(score_from_diff(kind, wrapped_diff(torus_add(h, r), t)))


def score_gradient(kind, delta):
	""" Derivative of the score with respect to each wrapped delta.

	The gradient with respect to the head and relation coordinates
	is this vector, with respect to the tail coordinates its negation.
	At the kinks the value at the point is used: 0 at ``delta = 0``
	for ``l1`` and ``+2`` at ``delta = 0.5``.

	:type kind: ScoreKind or str
	:param kind: Scoring function.

	:type delta: WrappedDiff or :class:`numpy.ndarray`
	:param delta: Wrapped differences.

	:return: ``2 sign(delta)``, ``8 delta`` or ``pi sin(2 pi delta)``.
	:rtype: :class:`numpy.ndarray`
	"""

	kind = ScoreKind.parse(kind)
	deltas = _deltas(delta)

	if kind is ScoreKind.L1:
		return 2.0 * np.sign(deltas)

	if kind is ScoreKind.L2:
		return 8.0 * deltas

	# sin(2 pi * 0.5) is only ~1e-16 in floating point
	return np.where(deltas == 0.5, 0.0, np.pi * np.sin(2.0 * np.pi * deltas))


def complex_embedding(point):
	""" The map ``g([x]) = exp(2 pi i x)`` onto the unit circles of
	``C^n``.

	:type point: TorusPoint
	:param point: A point of the torus.

	:rtype: :class:`numpy.ndarray`
	"""

	return np.exp(2j * np.pi * point.coords)


def bilinear_score(h, r, t):
	""" Real part of ``g(h)^T diag(g(r)) conj(g(t))``.

	This is the bilinear form of a complex embedding model restricted
	to the unit circles; it equals ``n - 2 score(eL2, h, r, t)``.

	:type h: TorusPoint
	:param h: Head embedding.

	:type r: TorusPoint
	:param r: Relation embedding.

	:type t: TorusPoint
	:param t: Tail embedding.

	:rtype: float
	"""

	raise_for_dimension(h.coords, r.coords)
	raise_for_dimension(h.coords, t.coords)

	product = complex_embedding(h) * complex_embedding(r) * np.conj(complex_embedding(t))

	return float(np.real(product.sum()))
