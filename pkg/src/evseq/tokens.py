"""Reserved tokens of the linearized event format.

Structure indicators delimit nesting; the sentinels bracket every
generated sequence.  None of these may appear inside label names or
mention text.
"""

OPEN = "("
CLOSE = ")"
BOS = "<bos>"
EOS = "<eos>"

STRUCTURE_TOKENS = frozenset({OPEN, CLOSE})
SENTINEL_TOKENS = frozenset({BOS, EOS})
RESERVED_TOKENS = STRUCTURE_TOKENS | SENTINEL_TOKENS
