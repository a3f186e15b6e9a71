#   Copyright (c) 2022 Asif Arman Rahman
#   Licensed under MIT (https://github.com/AsifArmanRahman/firebase/blob/main/LICENSE)

# --------------------------------------------------------------------------------------


import json
import math

import numpy as np


class RankReport:
	""" Aggregated ranks of a link prediction run.

	HITS@n are computed on filtered ranks (``hits``); the raw variant is
	kept in ``hits_raw`` for completeness. MRR averages over the
	individual predictions, two per evaluated triple.
	"""

	def __init__(self, results, mrr_raw, mrr_filtered, hits, hits_raw, mean_rank_raw, mean_rank_filtered, per_relation, split='test'):
		""" Constructor """

		self.results = results
		self.mrr_raw = mrr_raw
		self.mrr_filtered = mrr_filtered
		self.hits = hits
		self.hits_raw = hits_raw
		self.mean_rank_raw = mean_rank_raw
		self.mean_rank_filtered = mean_rank_filtered
		self.per_relation = per_relation
		self.split = split

	@property
	def count(self):
		return len(self.results)

	@classmethod
	def from_results(cls, results, vocabulary, hits_cutoffs, split='test'):
		""" Aggregate per prediction ranks.

		Sums run over ``results`` in order so the figures do not depend
		on how the ranks were computed.

		:type results: list
		:param results: :class:`RankResult` objects, head then tail
			prediction of each triple.

		:type vocabulary: Vocabulary
		:param vocabulary: Names for the per relation breakdown.

		:type hits_cutoffs: list
		:param hits_cutoffs: ``n`` of the reported HITS@n.

		:rtype: RankReport
		"""

		cutoffs = sorted(set(int(n) for n in hits_cutoffs))

		if not results:
			return cls(
				[], 0.0, 0.0,
				{n: 0.0 for n in cutoffs}, {n: 0.0 for n in cutoffs},
				0.0, 0.0, {}, split=split,
			)

		raw = np.array([result.raw for result in results], dtype=np.float64)
		filtered = np.array([result.filtered for result in results], dtype=np.float64)

		per_relation = {}
		grouped = {}

		for result in results:
			grouped.setdefault(result.triple.relation, []).append(1.0 / result.filtered)

		for relation in sorted(grouped):
			name = vocabulary.relation_name(relation) if relation < vocabulary.num_relations else str(relation)
			per_relation[name] = math.fsum(grouped[relation]) / len(grouped[relation])

		return cls(
			list(results),
			mrr_raw=math.fsum(1.0 / raw) / len(raw),
			mrr_filtered=math.fsum(1.0 / filtered) / len(filtered),
			hits={n: float(np.count_nonzero(filtered <= n)) / len(filtered) for n in cutoffs},
			hits_raw={n: float(np.count_nonzero(raw <= n)) / len(raw) for n in cutoffs},
			mean_rank_raw=float(raw.mean()),
			mean_rank_filtered=float(filtered.mean()),
			per_relation=per_relation,
			split=split,
		)

	def to_dict(self):
		return {
			"split": self.split,
			"count": self.count,
			"mrr_raw": self.mrr_raw,
			"mrr_filtered": self.mrr_filtered,
			"hits": {str(n): value for n, value in self.hits.items()},
			"hits_raw": {str(n): value for n, value in self.hits_raw.items()},
			"mean_rank_raw": self.mean_rank_raw,
			"mean_rank_filtered": self.mean_rank_filtered,
			"per_relation": dict(self.per_relation),
		}

	def to_json(self, per_relation=True):
		""" The report as a JSON document.

		:type per_relation: bool
		:param per_relation: (Optional) Include the per relation
			filtered MRR map, defaults to :data:`True`.

		:rtype: str
		"""

		data = self.to_dict()

		if not per_relation:
			del data["per_relation"]

		return json.dumps(data, indent=2, ensure_ascii=False)

	def to_text(self, per_relation=False):
		""" The report as an aligned plain text table.

		:type per_relation: bool
		:param per_relation: (Optional) Append the per relation filtered
			MRR table, defaults to :data:`False`.

		:rtype: str
		"""

		rows = [
			("predictions", str(self.count)),
			("MRR (raw)", "{0:.4f}".format(self.mrr_raw)),
			("MRR (filtered)", "{0:.4f}".format(self.mrr_filtered)),
		]

		rows += [("HITS@{0}".format(n), "{0:.4f}".format(value)) for n, value in self.hits.items()]
		rows += [
			("mean rank (raw)", "{0:.1f}".format(self.mean_rank_raw)),
			("mean rank (filtered)", "{0:.1f}".format(self.mean_rank_filtered)),
		]

		lines = _table(("metric ({0})".format(self.split), "value"), rows)

		if per_relation and self.per_relation:
			lines.append("")
			lines += _table(
				("relation", "MRR (filtered)"),
				[(name, "{0:.4f}".format(value)) for name, value in self.per_relation.items()],
			)

		return "\n".join(lines) + "\n"

	def __repr__(self):
		return "<RankReport {0}: {1} predictions, MRR {2:.4f} filtered>".format(self.split, self.count, self.mrr_filtered)


def _table(header, rows):
	left = max(len(header[0]), *(len(row[0]) for row in rows)) if rows else len(header[0])
	right = max(len(header[1]), *(len(row[1]) for row in rows)) if rows else len(header[1])

	lines = ["{0:<{1}}  {2:>{3}}".format(header[0], left, header[1], right), "-" * (left + 2 + right)]
	lines += ["{0:<{1}}  {2:>{3}}".format(name, left, value, right) for name, value in rows]

	return lines
