"""Compare baseline and relevancy-filtered query answering as teams grow.

Mirrors the command-line bench harness: per domain, the table reports the
abstraction size, path/chart shape, and per-query clause counts and timings.
On the 9- and 19-agent domains the baseline exceeds the minimizer's variable
guardrail ("too-large"), while the filtered method answers in milliseconds.
"""

from mapex.cli import main

for domain_id, episodes in [("sr3", 100), ("lbf9", 12), ("rware19", 8)]:
    print(f"=== {domain_id} ===")
    main(["bench", "--domain", domain_id, "--episodes", str(episodes),
          "--seed", "42", "--timeout", "30"])
    print()
