"""
Segmenting a policy and laying out the voting tasks
===================================================

A terms-and-conditions document becomes a list of statements, the
statements become unordered pairs, and every pair becomes six voting
tasks: three showing the pair in each presentation order.
"""

from termrank import enumerate_pairs, generate_hits, segment_policy

POLICY = """
Orders ship within five business days. A $300 restocking fee applies to
returned items. We may share your email address with marketing partners.
You agree to binding arbitration for all disputes, e.g. billing errors.
Accounts inactive for 12 months are closed without notice.
"""

doc = segment_policy("shop", "https://example.com/terms", POLICY)
print(f"{len(doc.statements)} statements:")
for s in doc.statements:
    print(f"  {s.statement_id}  {s.text}")

pairs = enumerate_pairs(doc)
print(f"\n{len(pairs)} pairs -> {len(pairs) * 6} voting tasks")

hits = generate_hits(pairs)
by_pair = {}
for hit in hits:
    by_pair.setdefault(hit.pair, []).append(hit.presentation)
first = pairs[0]
print(f"presentations for {first.a} vs {first.b}: {by_pair[first]}")

# a half sample keeps fewer pairs but still covers every statement
half = generate_hits(pairs, fraction=0.5, seed=0)
touched = {hit.pair for hit in half}
covered = {s for pair in touched for s in (pair.a, pair.b)}
print(
    f"fraction=0.5 keeps {len(half)} tasks over {len(touched)} pairs, "
    f"covering {len(covered)}/{len(doc.statements)} statements"
)
